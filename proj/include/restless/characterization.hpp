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
#include <optional>
#include <span>
#include <vector>

#include "restless/discrimination.hpp"
#include "restless/fit.hpp"
#include "restless/signals.hpp"
#include "restless/simulator.hpp"

namespace restless {

/// Inverse-variance weights for a signal, skipping missing cells. Zero
/// standard errors are floored at the smallest positive one in the series;
/// a series without any spread gets unit weights.
struct WeightedSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weights;
};

WeightedSeries weighted_points(std::span<const double> x, const SignalSeries& signal);

/// Angular frequency with the largest periodogram power for samples at
/// (possibly irregular) positions x.
double periodogram_peak(std::span<const double> x, std::span<const double> y);

/// amplitude cos(rate * alpha + phase) + offset, with amplitude >= 0,
/// rate >= 0 and phase in (-pi, pi]. Warns when the data span less than one
/// oscillation or the rate is not identifiable.
FitResult fit_rabi(std::span<const double> amplitudes, const SignalSeries& signal,
                   const FitOptions& options = {});

struct RbFit {
  FitResult fit;
  double epc = 0.0;
  double epc_std_error = 0.0;
  int dimension = 2;
  bool unphysical = false;  // alpha outside (0, 1]
};

/// (1 - alpha)(d - 1)/d: (1 - alpha)/2 for one qubit, 3(1 - alpha)/4 for two.
double epc_from_alpha(double alpha, int dimension);

/// Fits A + (B - A) alpha^{N_c/2} with weights 1/stderr^2.
RbFit fit_rb(std::span<const double> clifford_lengths, std::span<const double> means,
             std::span<const double> std_errors, int dimension, const FitOptions& options = {});

struct EpcDistribution {
  std::vector<double> samples;
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t resamples = 0;
  std::size_t subset = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;  // resamples whose fit failed or was unphysical
};

/// Each resample draws `subset` curves without replacement, averages them per
/// length (standard error of the mean, floored at 1e-6), fits, and records
/// the EPC. Resample r uses an RNG seeded from (seed, r).
EpcDistribution bootstrap_epc(std::span<const std::vector<double>> curves,
                              std::span<const double> clifford_lengths, std::size_t subset,
                              std::size_t resamples, int dimension, std::uint64_t seed);

struct ZTest {
  double z = 0.0;
  double p_value = 1.0;            // P(|Z| >= |z|)
  double confidence_percent = 100.0;
};

/// z = (m1 - m2) / sqrt(s1^2 + s2^2); agreement confidence is the two-sided
/// p-value.
ZTest z_test(double m1, double s1, double m2, double s2);

struct RestlessModelOptions {
  PopulationAlignment alignment = PopulationAlignment::predecessor;
  std::optional<double> fixed_a;  // fit only T1 and b
  FitOptions fit;
};

struct RestlessModelFit {
  FitResult fit;                    // T1, a, b (a absent when fixed)
  double decay_product = 0.0;       // a exp(-1/(R T1)), the identifiable combination
  double decay_product_std_error = 0.0;
};

/// Least-squares fit of expected_pA(T1, a, b) to an observed p_{k,A} series.
/// Empty weights mean unit weights.
RestlessModelFit fit_restless_model(std::span<const double> observed_pa, std::span<const double> weights,
                                    std::span<const double> etas, double repetition_rate,
                                    std::uint32_t num_repetitions,
                                    const RestlessModelOptions& options = {});

/// expected_pA together with its derivatives in (T1 [s], a, b), one column
/// each, as used by the restless-model fit.
struct PopulationGradient {
  std::vector<double> values;
  Eigen::MatrixXd jacobian;
};

PopulationGradient expected_pA_gradient(const PopulationModel& model, std::span<const double> etas,
                                        std::uint32_t num_repetitions,
                                        PopulationAlignment alignment = PopulationAlignment::predecessor);

/// Ground label: the predecessor set with the higher readout fidelity.
/// Throws AmbiguityError when the two fidelity intervals overlap.
Label identify_ground_label(const FidelityReport& report);

/// Survival curves of an RB stream, entry [sequence][length].
struct RbCurves {
  std::vector<double> lengths;
  std::vector<std::vector<double>> survival;
  double retained_fraction = 1.0;
};

/// Keeps shots whose predecessor carries the ground label and scores each
/// against the ideal outcome of its sequence from the ground state.
RbCurves rb_postselect(const LabeledStream& labeled, const SequenceMeta& meta, Label ground);

/// All shots with a predecessor; a shot is correct when it changes label
/// exactly for sequences with a net flip.
RbCurves rb_all_shots(const LabeledStream& labeled, const SequenceMeta& meta);

/// Means and standard errors of the mean across curves, per length.
void average_curves(std::span<const std::vector<double>> curves, std::vector<double>& means,
                    std::vector<double>& std_errors, double floor = 1e-6);

}  // namespace restless
