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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "restless/core.hpp"

namespace restless {

// Shot CSV:
//   # K=20
//   # N_s=10000
//   # R=100000
//   # mode=restless
//   # truncated=0            (optional)
//   j,k,i,I,Q[,state]
// Numbers are written with 9 significant digits.
//
// Binary (little endian): "RSTL", u16 version, u32 K, u32 N_s, f64 R, u8 mode,
// then packed (u64 j, f64 I, f64 Q) records. k and i follow from j. A record
// count below K*N_s marks the stream truncated.

enum class StreamFormat { csv, binary };

inline constexpr std::uint16_t kBinaryVersion = 1;

/// Picks binary for ".bin"/".rstl" extensions, CSV otherwise.
StreamFormat format_for_path(const std::filesystem::path& path);

ShotStream read_stream(std::istream& in, StreamFormat format);
void write_stream(const ShotStream& stream, std::ostream& out, StreamFormat format);

ShotStream read_stream(const std::filesystem::path& path);
void write_stream(const ShotStream& stream, const std::filesystem::path& path);

/// Stream plus the simulator's true post-measurement states (0 or 1).
struct TruthRecord {
  std::vector<std::uint8_t> states;
};

/// CSV with an extra `state` column.
void write_truth_csv(const ShotStream& stream, const TruthRecord& truth, std::ostream& out);
std::pair<ShotStream, TruthRecord> read_truth_csv(std::istream& in);

}  // namespace restless
