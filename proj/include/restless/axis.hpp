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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "restless/core.hpp"

namespace restless {

/// Centroid and 2x2 covariance of a point cloud.
struct PointMoments {
  IQPoint mean{};
  double c_ii = 0.0;
  double c_qq = 0.0;
  double c_iq = 0.0;
};

PointMoments moments(std::span<const IQPoint> points);

/// Direction of largest variance of the centered points, in [0, pi).
/// Throws DegenerateError when all points coincide.
double principal_axis_angle(std::span<const IQPoint> points);

/// Signal axis from averaged (reset) data: principal axis of the averages,
/// anchored at their centroid.
SignalAxis standard_axis(std::span<const IQPoint> averages);

/// d'_j = (|Re d_j|, |Im d_j|).
inline IQPoint fold(IQPoint d) { return {d.i_val < 0 ? -d.i_val : d.i_val, d.q_val < 0 ? -d.q_val : d.q_val}; }

/// Consecutive-shot differences d_j = m_j - m_{j-1} for j = 2..n and their
/// first-quadrant folds. Differences cross repetition boundaries.
struct DiffSeries {
  std::vector<IQPoint> diffs;   // entry n belongs to j = n + 2
  std::vector<IQPoint> folded;

  std::uint64_t j_of(std::size_t n) const noexcept { return n + 2; }
};

DiffSeries difference_points(const ShotStream& stream);

/// Per-sequence averages <d'>_k over shots with a predecessor.
std::vector<IQPoint> folded_averages(const ShotStream& stream);

/// |mu_above - mu_below| / (sigma_above + sigma_below) with population
/// standard deviations; values equal to the threshold count as below.
/// Returns the largest finite double when both spreads vanish.
double snr(std::span<const double> projections, double threshold);

struct RestlessAxisDiagnostics {
  double theta_d = 0.0;
  double theta_m = 0.0;
  double snr_branch_a = 0.0;  // candidate theta_d
  double snr_branch_b = 0.0;  // candidate pi - theta_d
  char chosen = 'a';
  std::uint32_t num_sequences = 0;
  std::uint32_t num_repetitions = 0;
};

struct RestlessAxisResult {
  SignalAxis axis;
  RestlessAxisDiagnostics diagnostics;
};

/// Recovers the signal axis from restless single shots. The principal axis
/// of the <d'>_k gives theta_d; folding leaves the sign of the I component
/// ambiguous, so both theta_d and pi - theta_d are scored by the SNR of the
/// raw shots split at their quantile threshold. Equal scores (within 1e-9)
/// keep theta_d.
RestlessAxisResult restless_axis(const ShotStream& stream);

}  // namespace restless
