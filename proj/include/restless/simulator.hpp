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
#include "restless/stream_io.hpp"

namespace restless {

/// Physical parameters of a simulated two-level readout chain.
struct SimConfig {
  double t1 = 50e-6;                 // s; +inf disables decay
  double repetition_rate = 100e3;    // Hz
  double t_meas = 2.5e-6;            // s
  double assignment_error = 0.0;     // probability of emitting from the wrong centroid
  IQPoint centroid_0{0.2, -0.4};
  IQPoint centroid_1{-0.5, 0.3};
  double iq_sigma = 0.1;
  std::uint64_t seed = 1;
  AcquisitionMode mode = AcquisitionMode::restless;

  /// Throws ConfigError unless T1 > 0, R > 0, t_meas >= 0, 0 <= eps < 0.5,
  /// sigma > 0 and every sequence fits the trigger period.
  void validate(const SequenceMeta& meta) const;

  /// Idle time between the end of the readout and the next sequence.
  double idle_time(double sequence_duration) const {
    return 1.0 / repetition_rate - sequence_duration - t_meas;
  }
};

struct SimulatedRun {
  ShotStream stream;
  TruthRecord truth;
};

/// Sequential restless chain from the ground state. Per shot: idle decay of
/// an excited qubit, flip with the sequence's eta, record the projected
/// state, emit an IQ point (from the wrong centroid with probability eps).
SimulatedRun simulate_restless(const SimConfig& cfg, const SequenceMeta& meta,
                               std::uint32_t num_repetitions);

/// Reset-based acquisition. The previous state survives the full off period
/// 1/R - t_meas with probability exp(-(1/R - t_meas)/T1) and otherwise
/// relaxes; the sequence then flips the state with its eta.
SimulatedRun simulate_standard(const SimConfig& cfg, const SequenceMeta& meta,
                               std::uint32_t num_repetitions);

/// Dispatches on cfg.mode.
SimulatedRun simulate(const SimConfig& cfg, const SequenceMeta& meta, std::uint32_t num_repetitions);

/// Parameters of the phenomenological restless population model
/// p_j = a [p_{j-1} + eta_k (1 - 2 p_{j-1})] exp(-1/(R T1)) + b.
struct PopulationModel {
  double t1 = 50e-6;
  double a = 1.0;
  double b = 0.0;
  double repetition_rate = 100e3;

  double decay_factor() const;  // exp(-1/(R T1))
  /// Throws DomainError unless a in (0, 1], b >= 0, T1 > 0 and a E + b <= 1.
  void validate() const;
};

/// p_{|1>,j} for j = 1 .. K N_s starting from p_0 = 0.
std::vector<double> excited_population_trace(const PopulationModel& model, std::span<const double> etas,
                                             std::uint32_t num_repetitions);

/// Fixed point of the recursion for a constant eta.
double population_fixed_point(const PopulationModel& model, double eta);

/// Which population a p_{k,A} prediction averages.
enum class PopulationAlignment {
  same_shot,    // 1 - mean_i p_{k+iK}
  predecessor,  // 1 - mean over shots with a predecessor of p_{k+iK-1}
};

/// Predicted fraction of label-A shots per sequence, assuming A is ground.
std::vector<double> expected_pA(const PopulationModel& model, std::span<const double> etas,
                                std::uint32_t num_repetitions,
                                PopulationAlignment alignment = PopulationAlignment::same_shot);

/// Exact per-sequence expectations of the restless statistics under the
/// simulator's own Markov chain, with label errors independent per shot
/// at rate `label_error` and A identified with the ground state.
struct ChainPrediction {
  std::vector<double> p_a;   // P(predecessor label A), shots with a predecessor
  std::vector<double> s;     // P(label change)
  std::vector<double> s_a;   // P(change | predecessor A)
  std::vector<double> s_b;   // P(change | predecessor B)
  std::vector<double> excited;  // P(true state 1) after the shot
};

ChainPrediction chain_prediction(const SimConfig& cfg, const SequenceMeta& meta,
                                 std::uint32_t num_repetitions, double label_error);

// Sequence builders.

/// n_id identity sequences followed by n_x flips with probability eta_x.
SequenceMeta id_x_meta(std::uint32_t n_id, std::uint32_t n_x, double eta_x = 1.0,
                       double gate_duration = 50e-9);

/// Rabi sweep: eta = sin^2(rate * amplitude / 2) per amplitude, followed by
/// n_cal CalId and n_cal CalX sequences.
SequenceMeta rabi_meta(std::span<const double> amplitudes, double rate, std::uint32_t n_cal = 3,
                       double gate_duration = 50e-9);

/// Single-qubit randomized-benchmarking layout.
struct RbLayout {
  std::vector<std::uint32_t> lengths;
  std::uint32_t num_sequences = 200;
  double epc = 0.0036;
  double clifford_duration = 15.6e-9;
  /// Concentration of the per-(sequence, length) Beta spread of the flip
  /// probability around its ideal mean; infinity gives no spread.
  double concentration = 1e5;
  std::uint32_t n_cal = 4;
  std::uint64_t seed = 7;
};

/// Decay parameter of A + (B - A) alpha^{N_c/2} for an error per Clifford.
double rb_alpha_from_epc(double epc, int dimension);

/// Sequence k = s * L + l (0-based s, l) holds random sequence s at length
/// lengths[l]; odd s compose to a net flip. Calibration sequences follow.
SequenceMeta rb_meta(const RbLayout& layout);

/// Signal-level RB curves for a dimension-d system: per curve and length the
/// ideal survival 1/d + (1 - 1/d) alpha^{N_c/2}, spread by a Beta draw and
/// sampled binomially with `shots` trials. Entry [curve][length].
std::vector<std::vector<double>> simulate_rb_survival(std::span<const std::uint32_t> lengths,
                                                      std::uint32_t num_curves, double epc,
                                                      int dimension, std::uint32_t shots,
                                                      double concentration, std::uint64_t seed);

}  // namespace restless
