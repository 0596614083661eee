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

#include "restless/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "restless/errors.hpp"

namespace restless {

double empirical_quantile(std::span<double> values, double q) {
  if (values.empty()) throw EmptyDataError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  auto lo_it = values.begin() + static_cast<std::ptrdiff_t>(lo);
  std::nth_element(values.begin(), lo_it, values.end());
  const double x_lo = *lo_it;
  if (frac == 0.0 || lo + 1 >= values.size()) return x_lo;
  // The next order statistic is the minimum of the upper partition.
  const double x_hi = *std::min_element(lo_it + 1, values.end());
  return x_lo + frac * (x_hi - x_lo);
}

ThresholdEstimate quantile_threshold(std::span<const double> projections) {
  if (projections.size() < kMinQuantileSamples) {
    throw EmptyDataError("quantile threshold needs at least " + std::to_string(kMinQuantileSamples) +
                         " projections, got " + std::to_string(projections.size()));
  }
  std::vector<double> work(projections.begin(), projections.end());
  const double q01 = empirical_quantile(work, 0.01);
  // After the first selection everything above the 1% order statistic sits
  // in the upper partition, so the 99% level is selected there alone.
  const std::size_t n = work.size();
  const double h = 0.99 * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(0.01 * static_cast<double>(n - 1)));
  const auto hi = static_cast<std::size_t>(std::floor(h));
  auto hi_it = work.begin() + static_cast<std::ptrdiff_t>(hi);
  std::nth_element(work.begin() + static_cast<std::ptrdiff_t>(lo) + 1, hi_it, work.end());
  double q99 = *hi_it;
  if (const double frac = h - static_cast<double>(hi); frac != 0.0 && hi + 1 < n) {
    q99 += frac * (*std::min_element(hi_it + 1, work.end()) - q99);
  }
  ThresholdEstimate est;
  est.threshold = 0.5 * (q01 + q99);
  const auto [mn, mx] = std::minmax_element(work.begin(), work.end());
  est.zero_separation = *mn == *mx;
  return est;
}

CdfThreshold cdf_max_separation_threshold(std::span<const double> proj_id,
                                          std::span<const double> proj_x) {
  if (proj_id.empty() || proj_x.empty()) throw EmptyDataError("CDF threshold needs both samples");
  std::vector<double> a(proj_id.begin(), proj_id.end());
  std::vector<double> b(proj_x.begin(), proj_x.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  // Sweep the distinct pooled values; D is right-continuous and constant on
  // [v_m, v_{m+1}).
  std::size_t ia = 0;
  std::size_t ib = 0;
  double best = -1.0;
  double best_lo = 0.0;
  double best_hi = 0.0;
  bool in_run = false;
  while (ia < a.size() || ib < b.size()) {
    double v;
    if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib])) {
      v = a[ia];
    } else {
      v = b[ib];
    }
    while (ia < a.size() && a[ia] == v) ++ia;
    while (ib < b.size() && b[ib] == v) ++ib;
    const double d = std::abs(static_cast<double>(ib) / nb - static_cast<double>(ia) / na);
    if (in_run && d != best) {
      best_hi = v;
      in_run = false;
    }
    if (d > best) {
      best = d;
      best_lo = v;
      in_run = true;
    }
  }

  CdfThreshold out;
  out.max_separation = std::max(best, 0.0);
  if (out.max_separation == 0.0 || in_run) {
    // Every run of the maximum extends to the last sample only when D == 0
    // everywhere, i.e. the empirical distributions coincide.
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    out.threshold = empirical_quantile(pooled, 0.5);
    out.zero_separation = true;
    return out;
  }
  out.threshold = 0.5 * (best_lo + best_hi);
  return out;
}

std::string_view to_string(DiscriminationMethod method) {
  return method == DiscriminationMethod::quantile_midpoint ? "quantile_midpoint" : "cdf_max_separation";
}

std::vector<double> project_all(const ShotStream& stream, const SignalAxis& axis) {
  std::vector<double> out(stream.size());
  const IQPoint u = axis.direction();
  for (std::size_t n = 0; n < stream.size(); ++n) out[n] = dot(stream[n] - axis.origin, u);
  return out;
}

Discriminator train_quantile_discriminator(const ShotStream& stream, const SignalAxis& axis) {
  const auto proj = project_all(stream, axis);
  const auto est = quantile_threshold(proj);
  Discriminator d;
  d.axis = axis;
  d.threshold = est.threshold;
  d.method = DiscriminationMethod::quantile_midpoint;
  d.zero_separation = est.zero_separation;
  return d;
}

Discriminator train_cdf_discriminator(const ShotStream& stream, const SignalAxis& axis,
                                      const SequenceMeta& meta) {
  if (meta.size() != stream.num_sequences()) {
    throw ConfigError("sequence metadata has " + std::to_string(meta.size()) +
                      " entries, stream has K=" + std::to_string(stream.num_sequences()));
  }
  std::vector<double> id;
  std::vector<double> x;
  const IQPoint u = axis.direction();
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const auto& desc = meta.at(stream.sequence_of(n));
    const double p = dot(stream[n] - axis.origin, u);
    if (desc.is_identity_like()) id.push_back(p);
    if (desc.is_flip_like()) x.push_back(p);
  }
  if (id.empty() || x.empty()) throw ConfigError("stream needs both Id and X tagged sequences");
  const auto est = cdf_max_separation_threshold(id, x);
  Discriminator d;
  d.axis = axis;
  d.threshold = est.threshold;
  d.method = DiscriminationMethod::cdf_max_separation;
  d.zero_separation = est.zero_separation;
  return d;
}

LabeledStream label_shots(const ShotStream& stream, const Discriminator& disc) {
  LabeledStream out;
  out.discriminator = disc;
  out.num_sequences = stream.num_sequences();
  out.num_repetitions = stream.num_repetitions();
  out.labels.resize(stream.size());
  const IQPoint u = disc.axis.direction();
  for (std::size_t n = 0; n < stream.size(); ++n) {
    out.labels[n] = dot(stream[n] - disc.axis.origin, u) <= disc.threshold ? Label::A : Label::B;
  }
  return out;
}

LabeledStream swap_labels(const LabeledStream& labeled) {
  LabeledStream out = labeled;
  for (auto& y : out.labels) y = other(y);
  out.swapped = !labeled.swapped;
  return out;
}

}  // namespace restless
