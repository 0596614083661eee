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

#include "restless/axis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "restless/discrimination.hpp"
#include "restless/errors.hpp"

namespace restless {

PointMoments moments(std::span<const IQPoint> points) {
  if (points.empty()) throw EmptyDataError("moments of empty point set");
  PointMoments m;
  const double n = static_cast<double>(points.size());
  double si = 0.0;
  double sq = 0.0;
  for (const auto& p : points) {
    si += p.i_val;
    sq += p.q_val;
  }
  m.mean = {si / n, sq / n};
  for (const auto& p : points) {
    const double di = p.i_val - m.mean.i_val;
    const double dq = p.q_val - m.mean.q_val;
    m.c_ii += di * di;
    m.c_qq += dq * dq;
    m.c_iq += di * dq;
  }
  m.c_ii /= n;
  m.c_qq /= n;
  m.c_iq /= n;
  return m;
}

double principal_axis_angle(std::span<const IQPoint> points) {
  if (points.size() < 2) throw DegenerateError("axis needs at least two points");
  const auto m = moments(points);
  if (m.c_ii == 0.0 && m.c_qq == 0.0) throw DegenerateError("all points coincide; no axis defined");
  // Eigenvector of the larger eigenvalue of [[c_ii, c_iq], [c_iq, c_qq]].
  return normalize_axis_angle(0.5 * std::atan2(2.0 * m.c_iq, m.c_ii - m.c_qq));
}

SignalAxis standard_axis(std::span<const IQPoint> averages) {
  SignalAxis axis;
  axis.theta = principal_axis_angle(averages);
  axis.origin = moments(averages).mean;
  return axis;
}

DiffSeries difference_points(const ShotStream& stream) {
  if (stream.size() < 2) throw EmptyDataError("difference points need at least two shots");
  DiffSeries out;
  out.diffs.resize(stream.size() - 1);
  out.folded.resize(stream.size() - 1);
  for (std::size_t n = 1; n < stream.size(); ++n) {
    const IQPoint d = stream[n] - stream[n - 1];
    out.diffs[n - 1] = d;
    out.folded[n - 1] = fold(d);
  }
  return out;
}

std::vector<IQPoint> folded_averages(const ShotStream& stream) {
  if (stream.size() < 2) throw EmptyDataError("difference points need at least two shots");
  const std::size_t K = stream.num_sequences();
  std::vector<IQPoint> sums(K);
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t n = 1; n < stream.size(); ++n) {
    const std::size_t k = n % K;
    sums[k] = sums[k] + fold(stream[n] - stream[n - 1]);
    ++counts[k];
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (counts[k] == 0) throw EmptyDataError("no difference points for sequence " + std::to_string(k + 1));
    sums[k] = (1.0 / static_cast<double>(counts[k])) * sums[k];
  }
  return sums;
}

double snr(std::span<const double> projections, double threshold) {
  double n_lo = 0, s_lo = 0, ss_lo = 0;
  double n_hi = 0, s_hi = 0, ss_hi = 0;
  for (double x : projections) {
    if (x <= threshold) {
      n_lo += 1;
      s_lo += x;
    } else {
      n_hi += 1;
      s_hi += x;
    }
  }
  if (n_lo == 0 || n_hi == 0) throw DegenerateError("SNR undefined: one side of the threshold is empty");
  const double mu_lo = s_lo / n_lo;
  const double mu_hi = s_hi / n_hi;
  for (double x : projections) {
    if (x <= threshold) {
      ss_lo += (x - mu_lo) * (x - mu_lo);
    } else {
      ss_hi += (x - mu_hi) * (x - mu_hi);
    }
  }
  const double spread = std::sqrt(ss_lo / n_lo) + std::sqrt(ss_hi / n_hi);
  if (spread == 0.0) return std::numeric_limits<double>::max();
  return std::abs(mu_hi - mu_lo) / spread;
}

namespace {

double branch_snr(const ShotStream& stream, const SignalAxis& axis) {
  const auto proj = project_all(stream, axis);
  const auto thr = quantile_threshold(proj);
  try {
    return snr(proj, thr.threshold);
  } catch (const DegenerateError&) {
    return 0.0;
  }
}

}  // namespace

RestlessAxisResult restless_axis(const ShotStream& stream) {
  const auto dprime = folded_averages(stream);
  const auto m = moments(dprime);
  const double scale = m.mean.i_val * m.mean.i_val + m.mean.q_val * m.mean.q_val;
  if (dprime.size() < 2 || m.c_ii + m.c_qq <= 1e-12 * std::max(1.0, scale)) {
    throw DegenerateError(
        "the <d'>_k averages coincide, so no signal axis can be recovered; add Id and X "
        "calibration sequences to the experiment");
  }
  const double theta_d = normalize_axis_angle(0.5 * std::atan2(2.0 * m.c_iq, m.c_ii - m.c_qq));

  SignalAxis candidate_a;
  candidate_a.theta = theta_d;
  candidate_a.origin = moments(stream.points()).mean;
  SignalAxis candidate_b = candidate_a;
  candidate_b.theta = normalize_axis_angle(std::numbers::pi - theta_d);

  RestlessAxisResult out;
  auto& diag = out.diagnostics;
  diag.theta_d = theta_d;
  diag.num_sequences = stream.num_sequences();
  diag.num_repetitions = stream.num_repetitions();
  diag.snr_branch_a = branch_snr(stream, candidate_a);
  diag.snr_branch_b = candidate_b.theta == candidate_a.theta ? diag.snr_branch_a
                                                              : branch_snr(stream, candidate_b);
  if (diag.snr_branch_b > diag.snr_branch_a + 1e-9) {
    diag.chosen = 'b';
    out.axis = candidate_b;
  } else {
    diag.chosen = 'a';
    out.axis = candidate_a;
  }
  diag.theta_m = out.axis.theta;
  return out;
}

}  // namespace restless
