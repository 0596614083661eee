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

#include "restless/core.hpp"

#include <cmath>
#include <numbers>

#include "restless/errors.hpp"

namespace restless {

double dot(IQPoint a, IQPoint b) { return a.i_val * b.i_val + a.q_val * b.q_val; }

double norm(IQPoint a) { return std::hypot(a.i_val, a.q_val); }

bool is_finite(IQPoint p) { return std::isfinite(p.i_val) && std::isfinite(p.q_val); }

std::string_view to_string(AcquisitionMode mode) {
  return mode == AcquisitionMode::restless ? "restless" : "standard";
}

AcquisitionMode parse_mode(std::string_view text) {
  if (text == "restless") return AcquisitionMode::restless;
  if (text == "standard") return AcquisitionMode::standard;
  throw ConfigError("unknown acquisition mode '" + std::string(text) + "'");
}

std::uint64_t global_index(std::uint32_t k, std::uint64_t i, std::uint32_t num_sequences) {
  if (num_sequences == 0 || k < 1 || k > num_sequences) {
    throw IndexError("sequence index " + std::to_string(k) + " outside 1.." +
                     std::to_string(num_sequences));
  }
  return k + i * num_sequences;
}

ShotIndex split_index(std::uint64_t j, std::uint32_t num_sequences) {
  if (j == 0 || num_sequences == 0) throw IndexError("global index must be >= 1");
  ShotIndex idx;
  idx.j = j;
  idx.k = static_cast<std::uint32_t>((j - 1) % num_sequences) + 1;
  idx.i = static_cast<std::uint32_t>((j - 1) / num_sequences);
  return idx;
}

ShotStream::ShotStream(std::vector<IQPoint> points, std::uint32_t num_sequences,
                       std::uint32_t num_repetitions, double repetition_rate_hz,
                       AcquisitionMode mode, bool truncated)
    : points_(std::move(points)),
      num_sequences_(num_sequences),
      num_repetitions_(num_repetitions),
      repetition_rate_(repetition_rate_hz),
      mode_(mode),
      truncated_(truncated) {
  if (num_sequences_ == 0) throw ConfigError("number of sequences K must be positive");
  if (num_repetitions_ == 0) throw ConfigError("number of repetitions N_s must be positive");
  if (!(repetition_rate_ >= 0.0) || !std::isfinite(repetition_rate_)) {
    throw ConfigError("repetition rate must be finite and non-negative");
  }
  const std::uint64_t full = std::uint64_t{num_sequences_} * num_repetitions_;
  if (points_.size() > full) {
    throw IndexError("stream holds " + std::to_string(points_.size()) +
                     " shots but K*N_s = " + std::to_string(full));
  }
  // Truncated streams are a prefix of the full ordering, so per-k counts
  // differ by at most one.
  if (points_.size() != full && !truncated_) {
    throw ConfigError("stream holds " + std::to_string(points_.size()) + " of " +
                      std::to_string(full) + " shots and is not flagged truncated");
  }
  for (std::size_t n = 0; n < points_.size(); ++n) {
    if (!is_finite(points_[n])) {
      throw ParseError("non-finite IQ component", static_cast<long long>(n + 1));
    }
  }
}

std::size_t ShotStream::count_for(std::uint32_t k) const {
  if (k < 1 || k > num_sequences_) throw IndexError("sequence index out of range");
  const std::size_t n = points_.size();
  if (n < k) return 0;
  return (n - k) / num_sequences_ + 1;
}

IQPoint SignalAxis::direction() const { return {std::cos(theta), std::sin(theta)}; }

double SignalAxis::project(IQPoint p) const { return dot(p - origin, direction()); }

double normalize_axis_angle(double theta) {
  constexpr double pi = std::numbers::pi;
  double t = std::fmod(theta, pi);
  if (t < 0) t += pi;
  if (t >= pi) t -= pi;
  return t;
}

double axis_angle_distance(double a, double b) {
  const double d = normalize_axis_angle(a - b);
  return std::min(d, std::numbers::pi - d);
}

std::string_view to_string(GateTag tag) {
  switch (tag) {
    case GateTag::Id: return "Id";
    case GateTag::X: return "X";
    case GateTag::Rabi: return "Rabi";
    case GateTag::Clifford: return "Clifford";
    case GateTag::CalId: return "CalId";
    case GateTag::CalX: return "CalX";
  }
  return "?";
}

GateTag parse_gate_tag(std::string_view text) {
  for (auto tag : {GateTag::Id, GateTag::X, GateTag::Rabi, GateTag::Clifford, GateTag::CalId,
                   GateTag::CalX}) {
    if (to_string(tag) == text) return tag;
  }
  throw ConfigError("unknown gate tag '" + std::string(text) + "'");
}

SequenceMeta::SequenceMeta(std::vector<SequenceDescriptor> descriptors)
    : descriptors_(std::move(descriptors)) {
  for (std::size_t n = 0; n < descriptors_.size(); ++n) {
    const auto& d = descriptors_[n];
    if (d.eta && !(*d.eta >= 0.0 && *d.eta <= 1.0)) {
      throw ConfigError("flip probability of sequence " + std::to_string(n + 1) +
                        " outside [0, 1]");
    }
    if (!(d.duration >= 0.0)) {
      throw ConfigError("negative duration for sequence " + std::to_string(n + 1));
    }
  }
}

const SequenceDescriptor& SequenceMeta::at(std::uint32_t k) const {
  if (k < 1 || k > descriptors_.size()) throw IndexError("sequence index out of range");
  return descriptors_[k - 1];
}

std::vector<double> SequenceMeta::etas() const {
  std::vector<double> out;
  out.reserve(descriptors_.size());
  for (std::size_t n = 0; n < descriptors_.size(); ++n) {
    if (!descriptors_[n].eta) {
      throw ConfigError("flip probability unknown for sequence " + std::to_string(n + 1));
    }
    out.push_back(*descriptors_[n].eta);
  }
  return out;
}

std::vector<std::uint32_t> SequenceMeta::indices_with(GateTag tag) const {
  std::vector<std::uint32_t> out;
  for (std::size_t n = 0; n < descriptors_.size(); ++n) {
    if (descriptors_[n].tag == tag) out.push_back(static_cast<std::uint32_t>(n + 1));
  }
  return out;
}

IQPoint average_iq(const ShotStream& stream, std::uint32_t k) {
  const std::size_t count = stream.count_for(k);
  if (count == 0) throw EmptyDataError("no shots for sequence " + std::to_string(k));
  double si = 0.0;
  double sq = 0.0;
  const std::size_t K = stream.num_sequences();
  for (std::size_t n = k - 1; n < stream.size(); n += K) {
    si += stream[n].i_val;
    sq += stream[n].q_val;
  }
  return {si / static_cast<double>(count), sq / static_cast<double>(count)};
}

std::vector<IQPoint> average_iq_all(const ShotStream& stream) {
  const std::size_t K = stream.num_sequences();
  if (stream.size() < K) throw EmptyDataError("stream does not cover every sequence");
  std::vector<IQPoint> sums(K);
  std::vector<std::size_t> counts(K, 0);
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const std::size_t k = n % K;
    sums[k] = sums[k] + stream[n];
    ++counts[k];
  }
  for (std::size_t k = 0; k < K; ++k) sums[k] = (1.0 / static_cast<double>(counts[k])) * sums[k];
  return sums;
}

}  // namespace restless
