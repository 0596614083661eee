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
#include <string_view>
#include <vector>

#include "restless/core.hpp"

namespace restless {

/// Type-7 empirical quantile (linear interpolation between order
/// statistics). Reorders `values`.
double empirical_quantile(std::span<double> values, double q);

inline constexpr std::size_t kMinQuantileSamples = 100;

struct ThresholdEstimate {
  double threshold = 0.0;
  bool zero_separation = false;  // all projections coincide
};

/// Mean of the 1% and 99% quantiles. Needs at least 100 projections.
ThresholdEstimate quantile_threshold(std::span<const double> projections);

struct CdfThreshold {
  double threshold = 0.0;
  double max_separation = 0.0;   // max |F_X - F_Id|
  bool zero_separation = false;  // samples indistinguishable; threshold at pooled median
};

/// Location where the empirical CDFs of the two samples are furthest apart.
/// The separation is a step function; the result is the midpoint of the
/// first interval on which it attains its maximum.
CdfThreshold cdf_max_separation_threshold(std::span<const double> proj_id,
                                          std::span<const double> proj_x);

enum class DiscriminationMethod : std::uint8_t { quantile_midpoint, cdf_max_separation };

std::string_view to_string(DiscriminationMethod method);

enum class Label : std::uint8_t { A = 0, B = 1 };

inline Label other(Label y) { return y == Label::A ? Label::B : Label::A; }

/// A = projection at or below the threshold, B = above.
struct Discriminator {
  SignalAxis axis;
  double threshold = 0.0;
  DiscriminationMethod method = DiscriminationMethod::quantile_midpoint;
  bool zero_separation = false;

  Label classify(IQPoint p) const { return axis.project(p) <= threshold ? Label::A : Label::B; }
};

/// Labels for a stream, held alongside the acquisition grid they index.
/// Storage position n carries global index j = n + 1.
struct LabeledStream {
  std::vector<Label> labels;
  Discriminator discriminator;
  std::uint32_t num_sequences = 1;
  std::uint32_t num_repetitions = 1;
  bool swapped = false;  // true after a global A<->B relabel

  std::size_t size() const noexcept { return labels.size(); }
  std::uint32_t sequence_of(std::size_t n) const noexcept {
    return static_cast<std::uint32_t>(n % num_sequences) + 1;
  }
};

std::vector<double> project_all(const ShotStream& stream, const SignalAxis& axis);

/// Quantile-midpoint discriminator trained on every shot of the stream.
Discriminator train_quantile_discriminator(const ShotStream& stream, const SignalAxis& axis);

/// CDF-separation discriminator trained on the Id-like and X-like sequences.
Discriminator train_cdf_discriminator(const ShotStream& stream, const SignalAxis& axis,
                                      const SequenceMeta& meta);

LabeledStream label_shots(const ShotStream& stream, const Discriminator& disc);

/// Global A<->B relabel.
LabeledStream swap_labels(const LabeledStream& labeled);

}  // namespace restless
