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

#include "restless/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "restless/errors.hpp"

namespace restless {

namespace {

double survival(double duration, double t1) {
  if (std::isinf(t1)) return 1.0;
  return std::exp(-std::max(0.0, duration) / t1);
}

class IqEmitter {
 public:
  IqEmitter(const SimConfig& cfg, std::mt19937_64& rng)
      : cfg_(cfg), rng_(rng), noise_(0.0, cfg.iq_sigma) {}

  IQPoint operator()(std::uint8_t state) {
    const bool wrong = cfg_.assignment_error > 0.0 && uniform_(rng_) < cfg_.assignment_error;
    const IQPoint& c = (state != 0) != wrong ? cfg_.centroid_1 : cfg_.centroid_0;
    const double di = noise_(rng_);
    const double dq = noise_(rng_);
    return {c.i_val + di, c.q_val + dq};
  }

 private:
  const SimConfig& cfg_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> noise_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

double beta_draw(std::mt19937_64& rng, double mean, double concentration) {
  if (std::isinf(concentration) || mean <= 0.0 || mean >= 1.0) return mean;
  std::gamma_distribution<double> ga(concentration * mean, 1.0);
  std::gamma_distribution<double> gb(concentration * (1.0 - mean), 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

}  // namespace

void SimConfig::validate(const SequenceMeta& meta) const {
  if (!(t1 > 0.0)) throw ConfigError("T1 must be positive");
  if (!(repetition_rate > 0.0) || !std::isfinite(repetition_rate)) {
    throw ConfigError("repetition rate must be positive and finite");
  }
  if (!(t_meas >= 0.0)) throw ConfigError("t_meas must be non-negative");
  if (!(assignment_error >= 0.0 && assignment_error < 0.5)) {
    throw ConfigError("assignment error must lie in [0, 0.5)");
  }
  if (!(iq_sigma > 0.0)) throw ConfigError("iq_sigma must be positive");
  if (!is_finite(centroid_0) || !is_finite(centroid_1)) throw ConfigError("centroids must be finite");
  double longest = 0.0;
  for (const auto& d : meta.descriptors()) longest = std::max(longest, d.duration);
  const double period = 1.0 / repetition_rate;
  if (period < t_meas + longest) {
    throw ConfigError("trigger period 1/R = " + std::to_string(period * 1e6) +
                      " us is shorter than t_meas + longest sequence = " +
                      std::to_string((t_meas + longest) * 1e6) + " us");
  }
}

SimulatedRun simulate_restless(const SimConfig& cfg, const SequenceMeta& meta,
                               std::uint32_t num_repetitions) {
  cfg.validate(meta);
  if (meta.size() == 0 || num_repetitions == 0) throw ConfigError("need K >= 1 and N_s >= 1");
  const auto etas = meta.etas();
  const auto K = static_cast<std::uint32_t>(meta.size());
  std::vector<double> idle_decay(K);
  for (std::uint32_t k = 0; k < K; ++k) {
    idle_decay[k] = 1.0 - survival(cfg.idle_time(meta.descriptors()[k].duration), cfg.t1);
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  IqEmitter emit(cfg, rng);
  const std::size_t total = static_cast<std::size_t>(K) * num_repetitions;
  std::vector<IQPoint> points;
  points.reserve(total);
  TruthRecord truth;
  truth.states.reserve(total);

  std::uint8_t state = 0;
  for (std::size_t n = 0; n < total; ++n) {
    const std::size_t k = n % K;
    if (state == 1 && uniform(rng) < idle_decay[k]) state = 0;
    if (uniform(rng) < etas[k]) state ^= 1;
    truth.states.push_back(state);
    points.push_back(emit(state));
  }
  return {ShotStream(std::move(points), K, num_repetitions, cfg.repetition_rate,
                     AcquisitionMode::restless),
          std::move(truth)};
}

SimulatedRun simulate_standard(const SimConfig& cfg, const SequenceMeta& meta,
                               std::uint32_t num_repetitions) {
  cfg.validate(meta);
  if (meta.size() == 0 || num_repetitions == 0) throw ConfigError("need K >= 1 and N_s >= 1");
  const auto etas = meta.etas();
  const auto K = static_cast<std::uint32_t>(meta.size());
  const double carry = survival(1.0 / cfg.repetition_rate - cfg.t_meas, cfg.t1);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  IqEmitter emit(cfg, rng);
  const std::size_t total = static_cast<std::size_t>(K) * num_repetitions;
  std::vector<IQPoint> points;
  points.reserve(total);
  TruthRecord truth;
  truth.states.reserve(total);

  std::uint8_t state = 0;
  for (std::size_t n = 0; n < total; ++n) {
    const std::size_t k = n % K;
    std::uint8_t start = state == 1 && uniform(rng) < carry ? 1 : 0;
    if (uniform(rng) < etas[k]) start ^= 1;
    state = start;
    truth.states.push_back(state);
    points.push_back(emit(state));
  }
  return {ShotStream(std::move(points), K, num_repetitions, cfg.repetition_rate,
                     AcquisitionMode::standard),
          std::move(truth)};
}

SimulatedRun simulate(const SimConfig& cfg, const SequenceMeta& meta, std::uint32_t num_repetitions) {
  return cfg.mode == AcquisitionMode::restless ? simulate_restless(cfg, meta, num_repetitions)
                                               : simulate_standard(cfg, meta, num_repetitions);
}

double PopulationModel::decay_factor() const {
  return survival(1.0 / repetition_rate, t1);
}

void PopulationModel::validate() const {
  if (!(t1 > 0.0)) throw DomainError("T1 must be positive");
  if (!(repetition_rate > 0.0)) throw DomainError("repetition rate must be positive");
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("a must lie in (0, 1]");
  if (!(b >= 0.0)) throw DomainError("b must be non-negative");
  if (a * decay_factor() + b > 1.0 + 1e-12) {
    throw DomainError("a exp(-1/(R T1)) + b exceeds 1; populations would leave [0, 1]");
  }
}

std::vector<double> excited_population_trace(const PopulationModel& model, std::span<const double> etas,
                                             std::uint32_t num_repetitions) {
  model.validate();
  if (etas.empty()) throw ConfigError("no sequences");
  const double scale = model.a * model.decay_factor();
  const std::size_t K = etas.size();
  std::vector<double> p(K * num_repetitions);
  double prev = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double eta = etas[n % K];
    prev = scale * (prev + eta * (1.0 - 2.0 * prev)) + model.b;
    p[n] = prev;
  }
  return p;
}

double population_fixed_point(const PopulationModel& model, double eta) {
  model.validate();
  const double scale = model.a * model.decay_factor();
  return (scale * eta + model.b) / (1.0 - scale * (1.0 - 2.0 * eta));
}

std::vector<double> expected_pA(const PopulationModel& model, std::span<const double> etas,
                                std::uint32_t num_repetitions, PopulationAlignment alignment) {
  const auto p = excited_population_trace(model, etas, num_repetitions);
  const std::size_t K = etas.size();
  std::vector<double> sum(K, 0.0);
  std::vector<std::size_t> count(K, 0);
  for (std::size_t n = 0; n < p.size(); ++n) {
    const std::size_t k = n % K;
    if (alignment == PopulationAlignment::same_shot) {
      sum[k] += p[n];
      ++count[k];
    } else if (n >= 1) {
      sum[k] += p[n - 1];
      ++count[k];
    }
  }
  std::vector<double> out(K);
  for (std::size_t k = 0; k < K; ++k) {
    out[k] = count[k] > 0 ? 1.0 - sum[k] / static_cast<double>(count[k])
                          : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

ChainPrediction chain_prediction(const SimConfig& cfg, const SequenceMeta& meta,
                                 std::uint32_t num_repetitions, double label_error) {
  cfg.validate(meta);
  const auto etas = meta.etas();
  const std::size_t K = etas.size();
  const double eps = label_error;
  const double a_given[2] = {1.0 - eps, eps};  // P(label A | state)

  std::vector<double> sum_pa(K, 0.0), sum_change(K, 0.0), sum_a_change(K, 0.0),
      sum_b_change(K, 0.0), sum_excited(K, 0.0);
  std::vector<std::size_t> count(K, 0), count_all(K, 0);

  double q = 0.0;  // P(state 1) after the previous shot
  const std::size_t total = K * num_repetitions;
  for (std::size_t n = 0; n < total; ++n) {
    const std::size_t k = n % K;
    const double eta = etas[k];
    const double surv = survival(cfg.idle_time(meta.descriptors()[k].duration), cfg.t1);
    // P(x = 1 | previous x)
    const double up[2] = {eta, surv * (1.0 - eta) + (1.0 - surv) * eta};
    const double next = (1.0 - q) * up[0] + q * up[1];
    if (n >= 1) {
      const double prev[2] = {1.0 - q, q};
      double p_a = 0.0, a_then_b = 0.0, b_then_a = 0.0;
      for (int x = 0; x < 2; ++x) {
        p_a += prev[x] * a_given[x];
        for (int y = 0; y < 2; ++y) {
          const double joint = prev[x] * (y == 1 ? up[x] : 1.0 - up[x]);
          a_then_b += joint * a_given[x] * (1.0 - a_given[y]);
          b_then_a += joint * (1.0 - a_given[x]) * a_given[y];
        }
      }
      sum_pa[k] += p_a;
      sum_a_change[k] += a_then_b;
      sum_b_change[k] += b_then_a;
      sum_change[k] += a_then_b + b_then_a;
      ++count[k];
    }
    sum_excited[k] += next;
    ++count_all[k];
    q = next;
  }

  ChainPrediction out;
  out.p_a.resize(K);
  out.s.resize(K);
  out.s_a.resize(K);
  out.s_b.resize(K);
  out.excited.resize(K);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < K; ++k) {
    const double c = static_cast<double>(count[k]);
    out.p_a[k] = count[k] ? sum_pa[k] / c : nan;
    out.s[k] = count[k] ? sum_change[k] / c : nan;
    out.s_a[k] = sum_pa[k] > 0.0 ? sum_a_change[k] / sum_pa[k] : nan;
    out.s_b[k] = c - sum_pa[k] > 0.0 ? sum_b_change[k] / (c - sum_pa[k]) : nan;
    out.excited[k] = sum_excited[k] / static_cast<double>(count_all[k]);
  }
  return out;
}

SequenceMeta id_x_meta(std::uint32_t n_id, std::uint32_t n_x, double eta_x, double gate_duration) {
  std::vector<SequenceDescriptor> d;
  for (std::uint32_t n = 0; n < n_id; ++n) {
    SequenceDescriptor s;
    s.tag = GateTag::Id;
    s.eta = 0.0;
    s.duration = gate_duration;
    d.push_back(s);
  }
  for (std::uint32_t n = 0; n < n_x; ++n) {
    SequenceDescriptor s;
    s.tag = GateTag::X;
    s.eta = eta_x;
    s.net_flip = true;
    s.duration = gate_duration;
    d.push_back(s);
  }
  return SequenceMeta(std::move(d));
}

SequenceMeta rabi_meta(std::span<const double> amplitudes, double rate, std::uint32_t n_cal,
                       double gate_duration) {
  std::vector<SequenceDescriptor> d;
  for (double amp : amplitudes) {
    SequenceDescriptor s;
    s.tag = GateTag::Rabi;
    s.amplitude = amp;
    const double half = std::sin(0.5 * rate * amp);
    s.eta = half * half;
    s.duration = gate_duration;
    d.push_back(s);
  }
  for (std::uint32_t n = 0; n < n_cal; ++n) {
    SequenceDescriptor s;
    s.tag = GateTag::CalId;
    s.eta = 0.0;
    s.duration = gate_duration;
    d.push_back(s);
  }
  for (std::uint32_t n = 0; n < n_cal; ++n) {
    SequenceDescriptor s;
    s.tag = GateTag::CalX;
    s.eta = 1.0;
    s.net_flip = true;
    s.duration = gate_duration;
    d.push_back(s);
  }
  return SequenceMeta(std::move(d));
}

double rb_alpha_from_epc(double epc, int dimension) {
  if (dimension < 2) throw ConfigError("RB dimension must be at least 2");
  const double d = static_cast<double>(dimension);
  return 1.0 - epc * d / (d - 1.0);
}

SequenceMeta rb_meta(const RbLayout& layout) {
  if (layout.lengths.empty() || layout.num_sequences == 0) throw ConfigError("empty RB layout");
  const double alpha = rb_alpha_from_epc(layout.epc, 2);
  std::mt19937_64 rng(layout.seed);
  std::vector<SequenceDescriptor> d;
  d.reserve(layout.num_sequences * layout.lengths.size() + 2 * layout.n_cal);
  for (std::uint32_t s = 0; s < layout.num_sequences; ++s) {
    for (auto len : layout.lengths) {
      SequenceDescriptor desc;
      desc.tag = GateTag::Clifford;
      desc.clifford_length = len;
      desc.sequence_id = s;
      desc.net_flip = (s % 2) == 1;
      const double decay = 0.5 * std::pow(alpha, 0.5 * len);
      const double mean = desc.net_flip ? 0.5 + decay : 0.5 - decay;
      desc.eta = beta_draw(rng, mean, layout.concentration);
      desc.duration = len * layout.clifford_duration;
      d.push_back(desc);
    }
  }
  for (std::uint32_t n = 0; n < 2 * layout.n_cal; ++n) {
    SequenceDescriptor desc;
    desc.tag = n < layout.n_cal ? GateTag::CalId : GateTag::CalX;
    desc.eta = n < layout.n_cal ? 0.0 : 1.0;
    desc.net_flip = n >= layout.n_cal;
    desc.duration = layout.clifford_duration;
    d.push_back(desc);
  }
  return SequenceMeta(std::move(d));
}

std::vector<std::vector<double>> simulate_rb_survival(std::span<const std::uint32_t> lengths,
                                                      std::uint32_t num_curves, double epc,
                                                      int dimension, std::uint32_t shots,
                                                      double concentration, std::uint64_t seed) {
  if (shots == 0) throw ConfigError("need at least one shot per point");
  const double alpha = rb_alpha_from_epc(epc, dimension);
  const double floor = 1.0 / dimension;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out(num_curves, std::vector<double>(lengths.size()));
  for (auto& curve : out) {
    for (std::size_t l = 0; l < lengths.size(); ++l) {
      const double mean = floor + (1.0 - floor) * std::pow(alpha, 0.5 * lengths[l]);
      const double p = beta_draw(rng, mean, concentration);
      std::binomial_distribution<std::uint32_t> draw(shots, p);
      curve[l] = static_cast<double>(draw(rng)) / shots;
    }
  }
  return out;
}

}  // namespace restless
