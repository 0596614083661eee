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

#include "restless/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/beta.hpp>

#include "restless/axis.hpp"
#include "restless/errors.hpp"

namespace restless {

std::vector<double> SignalSeries::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value.value_or(std::numeric_limits<double>::quiet_NaN()));
  return out;
}

std::vector<double> SignalSeries::std_errors() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.std_error);
  return out;
}

double binomial_std_error(double s, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, s * (1.0 - s)) / static_cast<double>(n));
}

SignalSeries restless_signal(const LabeledStream& labeled) {
  const std::size_t K = labeled.num_sequences;
  std::vector<std::size_t> changes(K, 0);
  std::vector<std::size_t> counts(K, 0);
  const auto& y = labeled.labels;
  for (std::size_t n = 1; n < y.size(); ++n) {
    const std::size_t k = n % K;
    changes[k] += y[n] != y[n - 1] ? 1 : 0;
    ++counts[k];
  }
  SignalSeries out;
  out.points.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (counts[k] == 0) {
      throw EmptyDataError("no shot with a predecessor for sequence " + std::to_string(k + 1));
    }
    const double s = static_cast<double>(changes[k]) / static_cast<double>(counts[k]);
    out.points[k] = {s, binomial_std_error(s, counts[k]), counts[k], false};
  }
  return out;
}

PostSelection post_select(const LabeledStream& labeled) {
  const std::size_t K = labeled.num_sequences;
  PostSelection sel;
  sel.membership.assign(labeled.size(), PostSet::none);
  sel.count_a.assign(K, 0);
  sel.count_b.assign(K, 0);
  sel.p_a.assign(K, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t n = 1; n < labeled.size(); ++n) {
    const std::size_t k = n % K;
    if (labeled.labels[n - 1] == Label::A) {
      sel.membership[n] = PostSet::A;
      ++sel.count_a[k];
    } else {
      sel.membership[n] = PostSet::B;
      ++sel.count_b[k];
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t total = sel.count_a[k] + sel.count_b[k];
    if (total > 0) sel.p_a[k] = static_cast<double>(sel.count_a[k]) / static_cast<double>(total);
  }
  return sel;
}

ConditionedSignals conditioned_signals(const LabeledStream& labeled, const PostSelection& sel) {
  const std::size_t K = labeled.num_sequences;
  if (sel.membership.size() != labeled.size()) throw ConfigError("post-selection does not match labels");
  std::vector<std::size_t> changes_a(K, 0);
  std::vector<std::size_t> changes_b(K, 0);
  const auto& y = labeled.labels;
  for (std::size_t n = 1; n < y.size(); ++n) {
    const std::size_t k = n % K;
    const std::size_t changed = y[n] != y[n - 1] ? 1 : 0;
    if (sel.membership[n] == PostSet::A) {
      changes_a[k] += changed;
    } else if (sel.membership[n] == PostSet::B) {
      changes_b[k] += changed;
    }
  }
  ConditionedSignals out;
  out.s_a.points.resize(K);
  out.s_b.points.resize(K);
  out.p_a = sel.p_a;
  out.count_a = sel.count_a;
  out.count_b = sel.count_b;
  auto cell = [](std::size_t changes, std::size_t count) {
    SignalPoint p;
    p.count = count;
    if (count > 0) {
      const double s = static_cast<double>(changes) / static_cast<double>(count);
      p.value = s;
      p.std_error = binomial_std_error(s, count);
    }
    return p;
  };
  for (std::size_t k = 0; k < K; ++k) {
    out.s_a.points[k] = cell(changes_a[k], sel.count_a[k]);
    out.s_b.points[k] = cell(changes_b[k], sel.count_b[k]);
  }
  return out;
}

double recombine(std::optional<double> s_a, std::optional<double> s_b, std::size_t count_a,
                 std::size_t count_b, std::size_t n_total) {
  if (count_a + count_b != n_total) {
    throw ConfigError("conditioned counts " + std::to_string(count_a) + " + " +
                      std::to_string(count_b) + " do not add up to " + std::to_string(n_total));
  }
  if (n_total == 0) throw EmptyDataError("no shots to recombine");
  if ((count_a > 0 && !s_a) || (count_b > 0 && !s_b)) {
    throw ConfigError("missing conditioned signal with non-zero count");
  }
  const double wa = count_a > 0 ? static_cast<double>(count_a) * *s_a : 0.0;
  const double wb = count_b > 0 ? static_cast<double>(count_b) * *s_b : 0.0;
  return (wa + wb) / static_cast<double>(n_total);
}

SignalSeries recombine(const ConditionedSignals& cond) {
  const std::size_t K = cond.s_a.size();
  SignalSeries out;
  out.points.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t na = cond.count_a[k];
    const std::size_t nb = cond.count_b[k];
    const std::size_t n = na + nb;
    const double s = recombine(cond.s_a.points[k].value, cond.s_b.points[k].value, na, nb, n);
    // Variance of the count-weighted mean of the two conditioned estimates.
    const double fa = static_cast<double>(na) / static_cast<double>(n);
    const double fb = static_cast<double>(nb) / static_cast<double>(n);
    const double se = std::sqrt(fa * fa * cond.s_a.points[k].std_error * cond.s_a.points[k].std_error +
                                fb * fb * cond.s_b.points[k].std_error * cond.s_b.points[k].std_error);
    out.points[k] = {s, se, n, false};
  }
  return out;
}

SignalSeries normalize_signal(const SignalSeries& raw, double cal_id, double cal_x, Clamp clamp) {
  const double span = cal_x - cal_id;
  if (!std::isfinite(span) || std::abs(span) < 1e-12) {
    throw DegenerateError("calibration levels coincide; cannot normalize");
  }
  SignalSeries out = raw;
  for (auto& p : out.points) {
    p.std_error = raw.points[&p - out.points.data()].std_error / std::abs(span);
    if (!p.value) continue;
    double v = (*p.value - cal_id) / span;
    if (clamp == Clamp::yes && (v < 0.0 || v > 1.0)) {
      v = std::clamp(v, 0.0, 1.0);
      p.clamped = true;
    }
    p.value = v;
  }
  return out;
}

std::pair<double, double> calibration_levels(const SignalSeries& series, const SequenceMeta& meta) {
  if (meta.size() != series.size()) throw ConfigError("metadata and signal lengths differ");
  auto mean_over = [&](GateTag tag) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (auto k : meta.indices_with(tag)) {
      if (const auto& v = series.at(k).value) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  auto id = mean_over(GateTag::CalId);
  auto x = mean_over(GateTag::CalX);
  if (!id) id = mean_over(GateTag::Id);
  if (!x) x = mean_over(GateTag::X);
  if (!id || !x) throw ConfigError("no Id/X calibration sequences available");
  return {*id, *x};
}

DPrimeEndpoints dprime_endpoints(const ShotStream& stream, const SequenceMeta& meta) {
  if (meta.size() != stream.num_sequences()) throw ConfigError("metadata does not match stream K");
  IQPoint sum_id{};
  IQPoint sum_x{};
  std::size_t n_id = 0;
  std::size_t n_x = 0;
  for (std::size_t n = 1; n < stream.size(); ++n) {
    const auto& desc = meta.at(stream.sequence_of(n));
    const IQPoint d = fold(stream[n] - stream[n - 1]);
    if (desc.is_identity_like()) {
      sum_id = sum_id + d;
      ++n_id;
    } else if (desc.is_flip_like()) {
      sum_x = sum_x + d;
      ++n_x;
    }
  }
  if (n_id == 0 || n_x == 0) throw ConfigError("stream needs Id and X sequences for <d'> endpoints");
  return {(1.0 / static_cast<double>(n_id)) * sum_id, (1.0 / static_cast<double>(n_x)) * sum_x};
}

SignalSeries dprime_signal(const ShotStream& stream, const DPrimeEndpoints& endpoints, Clamp clamp) {
  const IQPoint span = endpoints.x - endpoints.id;
  const double length = norm(span);
  if (!(length > 1e-12)) throw DegenerateError("<d'> calibration endpoints coincide");
  const IQPoint u = (1.0 / length) * span;
  const std::size_t K = stream.num_sequences();
  std::vector<double> sum(K, 0.0);
  std::vector<double> sum_sq(K, 0.0);
  std::vector<std::size_t> count(K, 0);
  for (std::size_t n = 1; n < stream.size(); ++n) {
    const std::size_t k = n % K;
    const double c = dot(fold(stream[n] - stream[n - 1]) - endpoints.id, u) / length;
    sum[k] += c;
    sum_sq[k] += c * c;
    ++count[k];
  }
  SignalSeries out;
  out.points.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (count[k] == 0) throw EmptyDataError("no difference points for sequence " + std::to_string(k + 1));
    const double nk = static_cast<double>(count[k]);
    const double mean = sum[k] / nk;
    const double var = std::max(0.0, sum_sq[k] / nk - mean * mean);
    SignalPoint p;
    p.count = count[k];
    p.std_error = std::sqrt(var / nk);
    double v = mean;
    if (clamp == Clamp::yes && (v < 0.0 || v > 1.0)) {
      v = std::clamp(v, 0.0, 1.0);
      p.clamped = true;
    }
    p.value = v;
    out.points[k] = p;
  }
  return out;
}

SignalSeries projected_average_signal(const ShotStream& stream, const SignalAxis& axis) {
  const std::size_t K = stream.num_sequences();
  const IQPoint u = axis.direction();
  std::vector<double> sum(K, 0.0);
  std::vector<double> sum_sq(K, 0.0);
  std::vector<std::size_t> count(K, 0);
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const std::size_t k = n % K;
    const double c = dot(stream[n] - axis.origin, u);
    sum[k] += c;
    sum_sq[k] += c * c;
    ++count[k];
  }
  SignalSeries out;
  out.points.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (count[k] == 0) continue;
    const double nk = static_cast<double>(count[k]);
    const double mean = sum[k] / nk;
    const double var = std::max(0.0, sum_sq[k] / nk - mean * mean);
    out.points[k] = {mean, std::sqrt(var / nk), count[k], false};
  }
  return out;
}

Interval jeffreys_interval(std::size_t successes, std::size_t trials, double confidence) {
  if (trials == 0 || successes > trials) throw DomainError("Jeffreys interval needs 0 <= x <= n, n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  const double alpha = 1.0 - confidence;
  const double a = static_cast<double>(successes) + 0.5;
  const double b = static_cast<double>(trials - successes) + 0.5;
  boost::math::beta_distribution<double> posterior(a, b);
  Interval out;
  out.lo = successes == 0 ? 0.0 : boost::math::quantile(posterior, alpha / 2.0);
  out.hi = successes == trials ? 1.0 : boost::math::quantile(posterior, 1.0 - alpha / 2.0);
  return out;
}

SpamTable SpamTable::from_probabilities(double pa_b_id, double pa_a_x, double pb_a_id, double pb_b_x) {
  for (double p : {pa_b_id, pa_a_x, pb_a_id, pb_b_x}) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("SPAM probability outside [0, 1]");
  }
  SpamTable t;
  constexpr int A = 0, B = 1, Id = 0, X = 1;
  t.probability[A][Id][B] = pa_b_id;
  t.probability[A][Id][A] = 1.0 - pa_b_id;
  t.probability[A][X][A] = pa_a_x;
  t.probability[A][X][B] = 1.0 - pa_a_x;
  t.probability[B][Id][A] = pb_a_id;
  t.probability[B][Id][B] = 1.0 - pb_a_id;
  t.probability[B][X][B] = pb_b_x;
  t.probability[B][X][A] = 1.0 - pb_b_x;
  return t;
}

FidelityReport fidelities_from_table(const SpamTable& table, double confidence) {
  constexpr int A = 0, B = 1, Id = 0, X = 1;
  FidelityReport r;
  r.table = table;
  r.confidence = confidence;
  for (int x = 0; x < 2; ++x) {
    for (int g = 0; g < 2; ++g) {
      const std::size_t n = table.counts[x][g][0] + table.counts[x][g][1];
      for (int y = 0; y < 2; ++y) {
        const double p = table.probability[x][g][y];
        r.intervals[x][g][y] = n > 0 ? jeffreys_interval(table.counts[x][g][y], n, confidence)
                                     : Interval{p, p};
      }
    }
  }
  // An error rate for set x is "the other label after Id" or "the same
  // label after X".
  const double ea_id = table.probability[A][Id][B];
  const double ea_x = table.probability[A][X][A];
  const double eb_id = table.probability[B][Id][A];
  const double eb_x = table.probability[B][X][B];
  r.fidelity_a = 1.0 - 0.5 * (ea_id + ea_x);
  r.fidelity_b = 1.0 - 0.5 * (eb_id + eb_x);
  const auto& ia1 = r.intervals[A][Id][B];
  const auto& ia2 = r.intervals[A][X][A];
  const auto& ib1 = r.intervals[B][Id][A];
  const auto& ib2 = r.intervals[B][X][B];
  r.fidelity_a_interval = {1.0 - 0.5 * (ia1.hi + ia2.hi), 1.0 - 0.5 * (ia1.lo + ia2.lo)};
  r.fidelity_b_interval = {1.0 - 0.5 * (ib1.hi + ib2.hi), 1.0 - 0.5 * (ib1.lo + ib2.lo)};
  return r;
}

FidelityReport readout_fidelities(const ShotStream& stream, const LabeledStream& labeled,
                                  const SequenceMeta& meta, double confidence) {
  if (meta.size() != stream.num_sequences()) throw ConfigError("metadata does not match stream K");
  if (labeled.size() != stream.size()) throw ConfigError("labels do not match stream");
  const auto proj = project_all(stream, labeled.discriminator.axis);
  // [x][G] projections
  std::array<std::array<std::vector<double>, 2>, 2> groups;
  for (std::size_t n = 1; n < stream.size(); ++n) {
    const auto& desc = meta.at(stream.sequence_of(n));
    int g;
    if (desc.is_identity_like()) {
      g = 0;
    } else if (desc.is_flip_like()) {
      g = 1;
    } else {
      continue;
    }
    const int x = static_cast<int>(labeled.labels[n - 1]);
    groups[x][g].push_back(proj[n]);
  }
  SpamTable table;
  std::array<double, 2> thresholds{};
  for (int x = 0; x < 2; ++x) {
    if (groups[x][0].empty() || groups[x][1].empty()) {
      throw ConfigError(std::string("post-selected set ") + (x == 0 ? "A" : "B") +
                        " lacks Id- or X-tagged shots");
    }
    thresholds[x] = cdf_max_separation_threshold(groups[x][0], groups[x][1]).threshold;
    for (int g = 0; g < 2; ++g) {
      for (double p : groups[x][g]) {
        Label y = p <= thresholds[x] ? Label::A : Label::B;
        if (labeled.swapped) y = other(y);
        ++table.counts[x][g][static_cast<int>(y)];
      }
      const double n = static_cast<double>(groups[x][g].size());
      for (int y = 0; y < 2; ++y) {
        table.probability[x][g][y] = static_cast<double>(table.counts[x][g][y]) / n;
      }
    }
  }
  auto report = fidelities_from_table(table, confidence);
  report.thresholds = thresholds;
  return report;
}

ConditionedSignals spam_correct(const ConditionedSignals& cond, const FidelityReport& report) {
  const auto& t = report.table;
  ConditionedSignals out = cond;
  // For set A a state change reads B: P_A(B|Id) is the false-change floor,
  // P_A(B|X) the true-change ceiling. Set B mirrors this.
  out.s_a = normalize_signal(cond.s_a, t.p(Label::A, false, Label::B), t.p(Label::A, true, Label::B),
                             Clamp::no);
  out.s_b = normalize_signal(cond.s_b, t.p(Label::B, false, Label::A), t.p(Label::B, true, Label::A),
                             Clamp::no);
  return out;
}

}  // namespace restless
