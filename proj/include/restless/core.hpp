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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace restless {

/// One demodulated single-shot outcome in digitizer units.
struct IQPoint {
  double i_val = 0.0;
  double q_val = 0.0;

  friend IQPoint operator+(IQPoint a, IQPoint b) { return {a.i_val + b.i_val, a.q_val + b.q_val}; }
  friend IQPoint operator-(IQPoint a, IQPoint b) { return {a.i_val - b.i_val, a.q_val - b.q_val}; }
  friend IQPoint operator*(double s, IQPoint a) { return {s * a.i_val, s * a.q_val}; }
  friend bool operator==(const IQPoint&, const IQPoint&) = default;
};

double dot(IQPoint a, IQPoint b);
double norm(IQPoint a);
bool is_finite(IQPoint p);

enum class AcquisitionMode : std::uint8_t { standard = 0, restless = 1 };

std::string_view to_string(AcquisitionMode mode);
AcquisitionMode parse_mode(std::string_view text);

/// Position of one shot inside the K x N_s acquisition grid.
struct ShotIndex {
  std::uint64_t j = 0;  // global, 1-based
  std::uint32_t k = 0;  // sequence, 1..K
  std::uint32_t i = 0;  // repetition, 0..N_s-1
};

/// j = k + iK. Throws IndexError when k is outside 1..K.
std::uint64_t global_index(std::uint32_t k, std::uint64_t i, std::uint32_t num_sequences);

/// Inverse of global_index for j >= 1.
ShotIndex split_index(std::uint64_t j, std::uint32_t num_sequences);

/// Time-ordered single shots. Shot n (0-based storage) has global index
/// j = n + 1, so the exhaustive-indexing invariant holds by construction;
/// readers validate the serialized j column against it.
class ShotStream {
 public:
  ShotStream() = default;
  ShotStream(std::vector<IQPoint> points, std::uint32_t num_sequences,
             std::uint32_t num_repetitions, double repetition_rate_hz,
             AcquisitionMode mode, bool truncated = false);

  std::span<const IQPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const IQPoint& operator[](std::size_t n) const { return points_[n]; }

  std::uint32_t num_sequences() const noexcept { return num_sequences_; }
  std::uint32_t num_repetitions() const noexcept { return num_repetitions_; }
  double repetition_rate() const noexcept { return repetition_rate_; }
  AcquisitionMode mode() const noexcept { return mode_; }
  bool truncated() const noexcept { return truncated_; }

  /// Sequence index k (1-based) of storage position n.
  std::uint32_t sequence_of(std::size_t n) const noexcept {
    return static_cast<std::uint32_t>(n % num_sequences_) + 1;
  }
  ShotIndex index_of(std::size_t n) const { return split_index(n + 1, num_sequences_); }

  /// Number of shots recorded for sequence k.
  std::size_t count_for(std::uint32_t k) const;

  friend bool operator==(const ShotStream&, const ShotStream&) = default;

 private:
  std::vector<IQPoint> points_;
  std::uint32_t num_sequences_ = 1;
  std::uint32_t num_repetitions_ = 1;
  double repetition_rate_ = 0.0;
  AcquisitionMode mode_ = AcquisitionMode::standard;
  bool truncated_ = false;
};

/// A line in the IQ plane through `origin` at angle `theta` in [0, pi).
struct SignalAxis {
  double theta = 0.0;
  IQPoint origin{};
  std::optional<std::pair<IQPoint, IQPoint>> scale_ref;

  IQPoint direction() const;
  double project(IQPoint p) const;
};

/// Wraps any angle onto [0, pi); an axis has no orientation.
double normalize_axis_angle(double theta);

/// Smallest angle between two axes, in [0, pi/2].
double axis_angle_distance(double a, double b);

enum class GateTag : std::uint8_t { Id, X, Rabi, Clifford, CalId, CalX };

std::string_view to_string(GateTag tag);
GateTag parse_gate_tag(std::string_view text);

/// Per-sequence descriptor. `eta` is the probability that the sequence flips
/// the qubit state, known for simulated and Id/X experiments.
struct SequenceDescriptor {
  GateTag tag = GateTag::Id;
  double amplitude = 0.0;         // Rabi drive amplitude
  std::uint32_t clifford_length = 0;
  std::uint64_t sequence_id = 0;  // random Clifford sequence realization
  bool net_flip = false;          // ideal Clifford sequence composes to X
  std::optional<double> eta;
  double duration = 0.0;          // gate duration in seconds

  bool is_identity_like() const { return tag == GateTag::Id || tag == GateTag::CalId; }
  bool is_flip_like() const { return tag == GateTag::X || tag == GateTag::CalX; }
};

class SequenceMeta {
 public:
  SequenceMeta() = default;
  explicit SequenceMeta(std::vector<SequenceDescriptor> descriptors);

  std::size_t size() const noexcept { return descriptors_.size(); }
  const SequenceDescriptor& at(std::uint32_t k) const;  // 1-based
  std::span<const SequenceDescriptor> descriptors() const noexcept { return descriptors_; }

  /// Flip probabilities for every sequence. Throws ConfigError when any is unknown.
  std::vector<double> etas() const;

  /// 1-based indices of sequences carrying `tag`.
  std::vector<std::uint32_t> indices_with(GateTag tag) const;

 private:
  std::vector<SequenceDescriptor> descriptors_;
};

/// Componentwise mean of all shots with sequence index k.
IQPoint average_iq(const ShotStream& stream, std::uint32_t k);

/// average_iq for every k in one pass.
std::vector<IQPoint> average_iq_all(const ShotStream& stream);

}  // namespace restless
