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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "restless/core.hpp"
#include "restless/discrimination.hpp"

namespace restless {

/// One per-sequence estimate. `value` is empty when no shot contributed;
/// missing cells are never reported as zero.
struct SignalPoint {
  std::optional<double> value;
  double std_error = 0.0;
  std::size_t count = 0;
  bool clamped = false;
};

/// Per-sequence signal, entry k-1 for sequence k.
struct SignalSeries {
  std::vector<SignalPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  const SignalPoint& at(std::uint32_t k) const { return points.at(k - 1); }
  /// Values with missing cells as NaN, for plotting and fitting.
  std::vector<double> values() const;
  std::vector<double> std_errors() const;
};

/// sqrt(s(1-s)/n); zero for n == 0.
double binomial_std_error(double s, std::size_t n);

/// s_k = mean over shots of sequence k of the indicator y_j != y_{j-1}.
/// The first shot (no predecessor) is excluded. Throws EmptyDataError if a
/// sequence has no contributing shot.
SignalSeries restless_signal(const LabeledStream& labeled);

enum class PostSet : std::uint8_t { none = 0, A = 1, B = 2 };

/// Shots grouped by the label of their predecessor.
struct PostSelection {
  std::vector<PostSet> membership;        // per shot; none for j = 1
  std::vector<std::size_t> count_a;       // |M_A|_k
  std::vector<std::size_t> count_b;       // |M_B|_k
  std::vector<double> p_a;                // |M_A|_k / (|M_A|_k + |M_B|_k)
};

PostSelection post_select(const LabeledStream& labeled);

struct ConditionedSignals {
  SignalSeries s_a;
  SignalSeries s_b;
  std::vector<double> p_a;
  std::vector<std::size_t> count_a;
  std::vector<std::size_t> count_b;
};

ConditionedSignals conditioned_signals(const LabeledStream& labeled, const PostSelection& sel);

/// (|M_A| s_A + |M_B| s_B) / n_total. A missing conditioned value is only
/// allowed when its count is zero. Throws ConfigError when counts disagree.
double recombine(std::optional<double> s_a, std::optional<double> s_b, std::size_t count_a,
                 std::size_t count_b, std::size_t n_total);

/// Count-weighted recombination for every sequence.
SignalSeries recombine(const ConditionedSignals& cond);

enum class Clamp : bool { no = false, yes = true };

/// (s - cal_id) / (cal_x - cal_id), clamped to [0, 1] unless disabled.
/// Standard errors scale by 1 / |cal_x - cal_id|.
SignalSeries normalize_signal(const SignalSeries& raw, double cal_id, double cal_x,
                              Clamp clamp = Clamp::yes);

/// Means of the series over the calibration sequences (CalId / CalX tags,
/// falling back to Id / X when no calibration tags exist).
std::pair<double, double> calibration_levels(const SignalSeries& series, const SequenceMeta& meta);

struct DPrimeEndpoints {
  IQPoint id;
  IQPoint x;
};

/// <d'> averaged over the Id-like and X-like sequences of the stream.
DPrimeEndpoints dprime_endpoints(const ShotStream& stream, const SequenceMeta& meta);

/// Affine coordinate of <d'>_k along the line from endpoints.id to
/// endpoints.x. The standard error comes from the per-shot spread of the
/// projected folded differences.
SignalSeries dprime_signal(const ShotStream& stream, const DPrimeEndpoints& endpoints,
                           Clamp clamp = Clamp::yes);

/// Mean projection of the shots of each sequence onto the axis, with the
/// standard error from the per-shot spread. This is plain averaging and is
/// only meaningful for reset (standard-mode) data.
SignalSeries projected_average_signal(const ShotStream& stream, const SignalAxis& axis);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Equal-tailed interval of the Beta(x + 1/2, n - x + 1/2) posterior, with
/// lo = 0 at x = 0 and hi = 1 at x = n.
Interval jeffreys_interval(std::size_t successes, std::size_t trials, double confidence = 0.95);

/// Assignment statistics P_x(y|G) for initial-label set x, operation G.
/// Index order: [x][G][y] with x, y in {A, B} and G in {Id, X}.
struct SpamTable {
  std::array<std::array<std::array<std::size_t, 2>, 2>, 2> counts{};
  std::array<std::array<std::array<double, 2>, 2>, 2> probability{};

  static SpamTable from_probabilities(double pa_b_id, double pa_a_x, double pb_a_id, double pb_b_x);
  double p(Label x, bool flip_gate, Label y) const {
    return probability[static_cast<int>(x)][flip_gate ? 1 : 0][static_cast<int>(y)];
  }
};

struct FidelityReport {
  SpamTable table;
  std::array<std::array<std::array<Interval, 2>, 2>, 2> intervals{};  // per P_x(y|G)
  double fidelity_a = 0.0;
  double fidelity_b = 0.0;
  Interval fidelity_a_interval;
  Interval fidelity_b_interval;
  std::array<double, 2> thresholds{};  // x_T used for set A and set B
  double confidence = 0.95;
};

/// F_A = 1 - [P_A(B|Id) + P_A(A|X)] / 2 and F_B = 1 - [P_B(A|Id) + P_B(B|X)] / 2.
/// Fidelity intervals combine the bounds of the two error rates.
FidelityReport fidelities_from_table(const SpamTable& table, double confidence = 0.95);

/// SPAM table from a labeled restless Id/X stream: shots are grouped by
/// predecessor label and operation, and each group is re-assigned with its
/// own CDF max-separation threshold.
FidelityReport readout_fidelities(const ShotStream& stream, const LabeledStream& labeled,
                                  const SequenceMeta& meta, double confidence = 0.95);

/// Inverts the 2x2 assignment matrix of each post-selected set, then
/// recombines. Unclamped.
ConditionedSignals spam_correct(const ConditionedSignals& cond, const FidelityReport& report);

}  // namespace restless
