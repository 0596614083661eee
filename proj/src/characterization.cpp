// Copyright 2026 The Restless Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "restless/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "restless/errors.hpp"

namespace restless {

WeightedSeries weighted_points(std::span<const double> x, const SignalSeries& signal) {
  if (x.size() != signal.size()) throw ConfigError("abscissa and signal lengths differ");
  WeightedSeries out;
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& p : signal.points) {
    if (p.value && p.std_error > 0.0) smallest = std::min(smallest, p.std_error);
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto& p = signal.points[k];
    if (!p.value) continue;
    out.x.push_back(x[k]);
    out.y.push_back(*p.value);
    if (std::isinf(smallest)) {
      out.weights.push_back(1.0);
    } else {
      const double se = std::max(p.std_error, smallest);
      out.weights.push_back(1.0 / (se * se));
    }
  }
  return out;
}

double periodogram_peak(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw EmptyDataError("periodogram needs at least 3 points");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double span = sorted.back() - sorted.front();
  double spacing = span;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double d = sorted[i] - sorted[i - 1];
    if (d > 0.0) spacing = std::min(spacing, d);
  }
  if (!(span > 0.0)) throw DegenerateError("all abscissae coincide");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  const double top = std::numbers::pi / spacing;
  const double step = 2.0 * std::numbers::pi / (16.0 * span);
  double best_rate = step;
  double best_power = -1.0;
  for (double w = step; w <= top; w += step) {
    std::complex<double> acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += (y[i] - mean) * std::polar(1.0, -w * x[i]);
    const double power = std::norm(acc);
    if (power > best_power) {
      best_power = power;
      best_rate = w;
    }
  }
  return best_rate;
}

FitResult fit_rabi(std::span<const double> amplitudes, const SignalSeries& signal, const FitOptions& options) {
  const auto pts = weighted_points(amplitudes, signal);
  if (pts.x.size() < 4) throw EmptyDataError("Rabi fit needs at least 4 points");
  const double rate0 = periodogram_peak(pts.x, pts.y);
  const double mean = std::accumulate(pts.y.begin(), pts.y.end(), 0.0) / static_cast<double>(pts.y.size());
  std::complex<double> acc{};
  for (std::size_t i = 0; i < pts.x.size(); ++i) acc += (pts.y[i] - mean) * std::polar(1.0, -rate0 * pts.x[i]);
  const double n = static_cast<double>(pts.x.size());
  const std::vector<double> init = {2.0 * std::abs(acc) / n, rate0, std::arg(acc), mean};

  FitResult fit = fit_curve(ModelId::cosine, pts.x, pts.y, pts.weights, init, {}, options);
  auto& v = fit.values;
  bool flip_cross = false;
  if (v[1] < 0.0) {
    v[1] = -v[1];
    v[2] = -v[2];
    flip_cross = !flip_cross;
  }
  if (v[0] < 0.0) {
    v[0] = -v[0];
    v[2] += std::numbers::pi;
  }
  v[2] = std::remainder(v[2], 2.0 * std::numbers::pi);
  if (v[2] <= -std::numbers::pi) v[2] += 2.0 * std::numbers::pi;
  if (flip_cross) {
    // rate and phase changed sign together; their covariances with the
    // untouched parameters flip sign.
    const std::size_t m = 4;
    for (std::size_t p : {std::size_t{1}, std::size_t{2}}) {
      for (std::size_t q : {std::size_t{0}, std::size_t{3}}) {
        fit.covariance[p * m + q] = -fit.covariance[p * m + q];
        fit.covariance[q * m + p] = -fit.covariance[q * m + p];
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(pts.x.begin(), pts.x.end());
  if (v[1] * (*hi - *lo) < 2.0 * std::numbers::pi) {
    fit.ill_conditioned = true;
    fit.warnings.push_back("data span less than one oscillation; rate is poorly constrained");
  }
  return fit;
}

double epc_from_alpha(double alpha, int dimension) {
  if (dimension < 2) throw ConfigError("RB dimension must be at least 2");
  const double d = static_cast<double>(dimension);
  return (1.0 - alpha) * (d - 1.0) / d;
}

RbFit fit_rb(std::span<const double> clifford_lengths, std::span<const double> means,
             std::span<const double> std_errors, int dimension, const FitOptions& options) {
  if (clifford_lengths.size() != means.size() || means.size() != std_errors.size()) {
    throw ConfigError("RB lengths, means and errors must have equal length");
  }
  std::vector<double> distinct(clifford_lengths.begin(), clifford_lengths.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw ConfigError("RB fit needs at least 3 distinct lengths");
  std::vector<double> weights(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!(std_errors[i] > 0.0)) throw DomainError("RB standard errors must be positive");
    weights[i] = 1.0 / (std_errors[i] * std_errors[i]);
  }

  // Log-linear seed on the distance to the asymptote.
  const auto [mn, mx] = std::minmax_element(means.begin(), means.end());
  double asym = 1.0 / dimension;
  if (*mn <= asym + 1e-9) asym = *mn - 0.1 * (*mx - *mn) - 1e-6;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double t = 0.5 * clifford_lengths[i];
    const double u = std::log(means[i] - asym);
    sx += t;
    sy += u;
    sxx += t * t;
    sxy += t * u;
    cnt += 1;
  }
  const double denom = cnt * sxx - sx * sx;
  const double slope = denom != 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
  const double icpt = (sy - slope * sx) / cnt;
  const std::vector<double> init = {asym, asym + std::exp(icpt), std::clamp(std::exp(slope), 1e-6, 1.0)};

  Bounds bounds;
  bounds.lower = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 1e-12};
  RbFit out;
  out.dimension = dimension;
  out.fit = fit_curve(ModelId::rb_decay, clifford_lengths, means, weights, init, bounds, options);
  const double alpha = out.fit.values[2];
  out.unphysical = !(alpha > 0.0 && alpha <= 1.0);
  if (out.unphysical) out.fit.warnings.push_back("fitted alpha outside (0, 1]");
  out.epc = epc_from_alpha(alpha, dimension);
  out.epc_std_error = out.fit.std_errors[2] * (dimension - 1.0) / dimension;
  return out;
}

void average_curves(std::span<const std::vector<double>> curves, std::vector<double>& means,
                    std::vector<double>& std_errors, double floor) {
  if (curves.empty()) throw EmptyDataError("no curves to average");
  const std::size_t L = curves.front().size();
  means.assign(L, 0.0);
  std_errors.assign(L, 0.0);
  const double n = static_cast<double>(curves.size());
  for (const auto& c : curves) {
    if (c.size() != L) throw ConfigError("curves have different lengths");
    for (std::size_t l = 0; l < L; ++l) means[l] += c[l];
  }
  for (auto& m : means) m /= n;
  if (curves.size() > 1) {
    for (const auto& c : curves) {
      for (std::size_t l = 0; l < L; ++l) std_errors[l] += (c[l] - means[l]) * (c[l] - means[l]);
    }
    for (auto& s : std_errors) s = std::sqrt(s / (n - 1.0) / n);
  }
  for (auto& s : std_errors) s = std::max(s, floor);
}

EpcDistribution bootstrap_epc(std::span<const std::vector<double>> curves,
                              std::span<const double> clifford_lengths, std::size_t subset,
                              std::size_t resamples, int dimension, std::uint64_t seed) {
  if (subset == 0 || subset > curves.size()) throw ConfigError("subset must lie in 1..number of curves");
  EpcDistribution out;
  out.subset = subset;
  out.resamples = resamples;
  out.seed = seed;
  std::vector<std::size_t> order(curves.size());
  std::vector<std::vector<double>> picked(subset);
  std::vector<double> means, errors;
  for (std::size_t r = 0; r < resamples; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
    std::mt19937_64 rng(seq);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < subset; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
      picked[i] = curves[order[i]];
    }
    average_curves(picked, means, errors);
    try {
      const auto fit = fit_rb(clifford_lengths, means, errors, dimension);
      if (!fit.fit.usable() || fit.unphysical || !(fit.epc >= 0.0 && fit.epc <= 1.0)) {
        ++out.failures;
        continue;
      }
      out.samples.push_back(fit.epc);
    } catch (const Error&) {
      ++out.failures;
    }
  }
  if (out.samples.empty()) throw EmptyDataError("every bootstrap resample failed to fit");
  const double n = static_cast<double>(out.samples.size());
  out.mean = std::accumulate(out.samples.begin(), out.samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : out.samples) ss += (s - out.mean) * (s - out.mean);
  out.std_dev = out.samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return out;
}

ZTest z_test(double m1, double s1, double m2, double s2) {
  if (!(s1 >= 0.0 && s2 >= 0.0)) throw DomainError("standard deviations must be non-negative");
  const double spread = std::sqrt(s1 * s1 + s2 * s2);
  if (!(spread > 0.0)) throw DomainError("z-test needs a non-zero combined variance");
  ZTest out;
  out.z = (m1 - m2) / spread;
  out.p_value = std::erfc(std::abs(out.z) / std::numbers::sqrt2);
  out.confidence_percent = 100.0 * out.p_value;
  return out;
}

namespace {

// Parameters are T1 in microseconds (converted at the boundary), a, b; or
// the decay product s = a exp(-1/(R T1)) and b.
class RestlessModelProblem final : public FitProblem {
 public:
  enum class Form { full, fixed_a, product };

  RestlessModelProblem(Form form, std::span<const double> etas, double rate, std::uint32_t reps,
                       PopulationAlignment alignment, double fixed_a)
      : form_(form), etas_(etas), rate_(rate), reps_(reps), alignment_(alignment), fixed_a_(fixed_a) {}

  std::size_t num_params() const override { return form_ == Form::full ? 3 : 2; }
  std::size_t num_points() const override { return etas_.size(); }
  std::vector<std::string> param_names() const override {
    switch (form_) {
      case Form::full:
        return {"T1", "a", "b"};
      case Form::fixed_a:
        return {"T1", "b"};
      case Form::product:
        return {"decay_product", "b"};
    }
    return {};
  }

  void predict(std::span<const double> params, std::span<double> out) const override {
    run(params, out, nullptr);
  }

  void jacobian(std::span<const double> params, Eigen::MatrixXd& jac) const override {
    std::vector<double> out(num_points());
    run(params, out, &jac);
  }

  void project(std::span<double> params) const override {
    if (form_ == Form::product) {
      params[0] = std::clamp(params[0], 0.0, 1.0);
      params[1] = std::clamp(params[1], 0.0, 1.0 - params[0]);
      return;
    }
    params[0] = std::max(params[0], 1e-6);
    double a = fixed_a_;
    if (form_ == Form::full) {
      params[1] = std::clamp(params[1], 1e-12, 1.0);
      a = params[1];
    }
    double& b = params[num_params() - 1];
    b = std::clamp(b, 0.0, std::max(0.0, 1.0 - a * decay(params[0])));
  }

  double decay(double t1_us) const { return std::exp(-1.0 / (rate_ * t1_us * 1e-6)); }

 private:
  void run(std::span<const double> params, std::span<double> out, Eigen::MatrixXd* jac) const {
    const std::size_t m = num_params();
    // s and b with their gradients in the fit parameters.
    double s = 0.0;
    double b = params[m - 1];
    std::vector<double> ds(m, 0.0), db(m, 0.0);
    db[m - 1] = 1.0;
    if (form_ == Form::product) {
      s = params[0];
      ds[0] = 1.0;
    } else {
      const double t1 = params[0];
      const double e = decay(t1);
      const double de = e / (rate_ * 1e-6 * t1 * t1);
      const double a = form_ == Form::full ? params[1] : fixed_a_;
      s = a * e;
      ds[0] = a * de;
      if (form_ == Form::full) ds[1] = e;
    }

    const std::size_t K = etas_.size();
    std::vector<double> sum(K, 0.0);
    std::vector<std::size_t> count(K, 0);
    std::vector<double> dsum(jac ? K * m : 0, 0.0);
    double p = 0.0;
    std::vector<double> dp(m, 0.0);
    double p_prev = 0.0;
    std::vector<double> dp_prev(m, 0.0);
    const std::size_t total = K * reps_;
    for (std::size_t n = 0; n < total; ++n) {
      const std::size_t k = n % K;
      const double eta = etas_[k];
      p_prev = p;
      dp_prev = dp;
      const double inner = p_prev + eta * (1.0 - 2.0 * p_prev);
      p = s * inner + b;
      for (std::size_t q = 0; q < m; ++q) dp[q] = ds[q] * inner + s * (1.0 - 2.0 * eta) * dp_prev[q] + db[q];
      const bool same = alignment_ == PopulationAlignment::same_shot;
      if (same || n >= 1) {
        sum[k] += same ? p : p_prev;
        if (jac) {
          for (std::size_t q = 0; q < m; ++q) dsum[k * m + q] += same ? dp[q] : dp_prev[q];
        }
        ++count[k];
      }
    }
    if (jac) jac->resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < K; ++k) {
      const double c = static_cast<double>(std::max<std::size_t>(count[k], 1));
      out[k] = 1.0 - sum[k] / c;
      if (jac) {
        for (std::size_t q = 0; q < m; ++q) {
          (*jac)(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(q)) = -dsum[k * m + q] / c;
        }
      }
    }
  }

  Form form_;
  std::span<const double> etas_;
  double rate_;
  std::uint32_t reps_;
  PopulationAlignment alignment_;
  double fixed_a_;
};

void rescale_param(FitResult& fit, std::size_t p, double factor) {
  const std::size_t m = fit.values.size();
  fit.values[p] *= factor;
  fit.std_errors[p] *= factor;
  for (std::size_t q = 0; q < m; ++q) {
    fit.covariance[p * m + q] *= factor;
    fit.covariance[q * m + p] *= factor;
  }
}

}  // namespace

RestlessModelFit fit_restless_model(std::span<const double> observed_pa, std::span<const double> weights,
                                    std::span<const double> etas, double repetition_rate,
                                    std::uint32_t num_repetitions, const RestlessModelOptions& options) {
  if (observed_pa.size() != etas.size()) throw ConfigError("observed series and etas differ in length");
  if (!(repetition_rate > 0.0)) throw ConfigError("repetition rate must be positive");
  if (num_repetitions == 0) throw ConfigError("need N_s >= 1");
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(observed_pa.size(), 1.0);

  using Form = RestlessModelProblem::Form;
  const Form form = options.fixed_a ? Form::fixed_a : Form::full;
  const double fixed_a = options.fixed_a.value_or(1.0);
  if (options.fixed_a && !(fixed_a > 0.0 && fixed_a <= 1.0)) throw DomainError("fixed a must lie in (0, 1]");
  RestlessModelProblem problem(form, etas, repetition_rate, num_repetitions, options.alignment, fixed_a);

  const double t1_us = 1e6 / (repetition_rate * std::numbers::ln2);
  std::vector<double> init = form == Form::full ? std::vector<double>{t1_us, 1.0, 0.0}
                                                : std::vector<double>{t1_us, 0.0};
  RestlessModelFit out;
  out.fit = levenberg_marquardt(problem, observed_pa, w, init, options.fit);
  for (std::size_t p = 0; p < out.fit.values.size(); ++p) {
    if (out.fit.at_bound[p]) {
      out.fit.warnings.push_back("parameter " + out.fit.names[p] + " pinned at its bound");
    }
  }
  rescale_param(out.fit, 0, 1e-6);

  RestlessModelProblem product(Form::product, etas, repetition_rate, num_repetitions, options.alignment, 1.0);
  const auto pfit = levenberg_marquardt(product, observed_pa, w, std::vector<double>{0.5, 0.0}, options.fit);
  out.decay_product = pfit.values[0];
  out.decay_product_std_error = pfit.std_errors[0];
  return out;
}

PopulationGradient expected_pA_gradient(const PopulationModel& model, std::span<const double> etas,
                                        std::uint32_t num_repetitions, PopulationAlignment alignment) {
  model.validate();
  if (num_repetitions == 0) throw ConfigError("need N_s >= 1");
  RestlessModelProblem problem(RestlessModelProblem::Form::full, etas, model.repetition_rate, num_repetitions,
                               alignment, 1.0);
  const std::vector<double> params{model.t1 * 1e6, model.a, model.b};
  PopulationGradient out;
  out.values.resize(etas.size());
  problem.predict(params, out.values);
  problem.jacobian(params, out.jacobian);
  out.jacobian.col(0) *= 1e6;
  return out;
}

Label identify_ground_label(const FidelityReport& report) {
  if (report.fidelity_a_interval.lo > report.fidelity_b_interval.hi) return Label::A;
  if (report.fidelity_b_interval.lo > report.fidelity_a_interval.hi) return Label::B;
  throw AmbiguityError("readout fidelities of the A and B predecessor sets overlap (F_A = " +
                       std::to_string(report.fidelity_a) + ", F_B = " + std::to_string(report.fidelity_b) +
                       "); the ground label cannot be identified");
}

namespace {

struct RbGrid {
  std::vector<double> lengths;
  std::vector<std::size_t> row;     // per k (0-based): curve index or npos
  std::vector<std::size_t> column;  // per k: length index
  std::size_t num_curves = 0;
};

RbGrid rb_grid(const SequenceMeta& meta) {
  RbGrid g;
  std::map<std::uint32_t, std::size_t> lengths;
  std::map<std::uint64_t, std::size_t> ids;
  for (const auto& d : meta.descriptors()) {
    if (d.tag != GateTag::Clifford) continue;
    lengths.emplace(d.clifford_length, 0);
    ids.emplace(d.sequence_id, 0);
  }
  if (lengths.empty()) throw ConfigError("metadata contains no Clifford sequences");
  std::size_t idx = 0;
  for (auto& [len, slot] : lengths) {
    slot = idx++;
    g.lengths.push_back(len);
  }
  idx = 0;
  for (auto& [id, slot] : ids) slot = idx++;
  g.num_curves = ids.size();
  g.row.assign(meta.size(), static_cast<std::size_t>(-1));
  g.column.assign(meta.size(), 0);
  for (std::size_t k = 0; k < meta.size(); ++k) {
    const auto& d = meta.descriptors()[k];
    if (d.tag != GateTag::Clifford) continue;
    g.row[k] = ids.at(d.sequence_id);
    g.column[k] = lengths.at(d.clifford_length);
  }
  return g;
}

template <typename Score>
RbCurves rb_curves(const LabeledStream& labeled, const SequenceMeta& meta, Score score) {
  if (meta.size() != labeled.num_sequences) throw ConfigError("metadata does not match stream K");
  const auto grid = rb_grid(meta);
  const std::size_t L = grid.lengths.size();
  std::vector<double> correct(grid.num_curves * L, 0.0);
  std::vector<double> count(grid.num_curves * L, 0.0);
  std::size_t seen = 0;
  std::size_t kept = 0;
  for (std::size_t n = 1; n < labeled.size(); ++n) {
    const std::size_t k = n % labeled.num_sequences;
    if (grid.row[k] == static_cast<std::size_t>(-1)) continue;
    ++seen;
    const auto verdict = score(labeled.labels[n - 1], labeled.labels[n], meta.descriptors()[k]);
    if (verdict < 0) continue;
    ++kept;
    const std::size_t cell = grid.row[k] * L + grid.column[k];
    correct[cell] += verdict;
    count[cell] += 1.0;
  }
  RbCurves out;
  out.lengths = grid.lengths;
  out.retained_fraction = seen ? static_cast<double>(kept) / static_cast<double>(seen) : 0.0;
  out.survival.assign(grid.num_curves, std::vector<double>(L, 0.0));
  for (std::size_t r = 0; r < grid.num_curves; ++r) {
    for (std::size_t l = 0; l < L; ++l) {
      const double c = count[r * L + l];
      if (c == 0.0) {
        throw EmptyDataError("no retained shots for RB sequence " + std::to_string(r) + " at length " +
                             std::to_string(static_cast<long>(grid.lengths[l])));
      }
      out.survival[r][l] = correct[r * L + l] / c;
    }
  }
  return out;
}

}  // namespace

RbCurves rb_postselect(const LabeledStream& labeled, const SequenceMeta& meta, Label ground) {
  return rb_curves(labeled, meta, [ground](Label prev, Label now, const SequenceDescriptor& d) {
    if (prev != ground) return -1;
    const Label ideal = d.net_flip ? other(ground) : ground;
    return now == ideal ? 1 : 0;
  });
}

RbCurves rb_all_shots(const LabeledStream& labeled, const SequenceMeta& meta) {
  return rb_curves(labeled, meta, [](Label prev, Label now, const SequenceDescriptor& d) {
    return (now != prev) == d.net_flip ? 1 : 0;
  });
}

}  // namespace restless
