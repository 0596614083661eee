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

#include "restless/stream_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include "restless/errors.hpp"

namespace restless {
namespace {

constexpr std::array<char, 4> kMagic{'R', 'S', 'T', 'L'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  std::memcpy(&value, bytes.data(), sizeof(T));
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

void format_g9(std::string& buf, double v) {
  char tmp[32];
  const int n = std::snprintf(tmp, sizeof tmp, "%.9g", v);
  buf.append(tmp, static_cast<std::size_t>(n));
}

struct CsvHeader {
  std::uint32_t K = 0;
  std::uint32_t N_s = 0;
  double R = 0.0;
  AcquisitionMode mode = AcquisitionMode::standard;
  bool truncated = false;
};

void write_csv_body(const ShotStream& stream, const TruthRecord* truth, std::ostream& out) {
  out << "# K=" << stream.num_sequences() << '\n'
      << "# N_s=" << stream.num_repetitions() << '\n';
  std::string r;
  format_g9(r, stream.repetition_rate());
  out << "# R=" << r << '\n' << "# mode=" << to_string(stream.mode()) << '\n';
  if (stream.truncated()) out << "# truncated=1\n";
  out << (truth ? "j,k,i,I,Q,state\n" : "j,k,i,I,Q\n");
  std::string line;
  for (std::size_t n = 0; n < stream.size(); ++n) {
    const auto idx = stream.index_of(n);
    line.clear();
    line += std::to_string(idx.j);
    line += ',';
    line += std::to_string(idx.k);
    line += ',';
    line += std::to_string(idx.i);
    line += ',';
    format_g9(line, stream[n].i_val);
    line += ',';
    format_g9(line, stream[n].q_val);
    if (truth) {
      line += ',';
      line += truth->states[n] ? '1' : '0';
    }
    line += '\n';
    out << line;
  }
}

std::pair<ShotStream, TruthRecord> read_csv_body(std::istream& in, bool expect_state) {
  std::map<std::string, std::string, std::less<>> meta;
  std::string line;
  long long line_no = 0;
  bool have_header = false;
  std::vector<IQPoint> points;
  TruthRecord truth;
  CsvHeader h;
  std::size_t columns = 0;

  auto require_meta = [&](std::string_view key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError("missing metadata '" + std::string(key) + "'", line_no);
    return it->second;
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (have_header) throw ParseError("metadata after header", line_no);
      view.remove_prefix(1);
      view = trim(view);
      const auto eq = view.find('=');
      if (eq == std::string_view::npos) continue;  // free-form comment
      meta.emplace(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
      continue;
    }
    if (!have_header) {
      const auto fields = split_fields(view);
      const bool base = fields.size() >= 5 && fields[0] == "j" && fields[1] == "k" &&
                        fields[2] == "i" && fields[3] == "I" && fields[4] == "Q";
      const bool with_state = fields.size() == 6 && fields[5] == "state";
      if (!base || (fields.size() != 5 && !with_state) || (expect_state && !with_state)) {
        throw ParseError("bad header, expected j,k,i,I,Q" + std::string(expect_state ? ",state" : ""),
                         line_no);
      }
      columns = fields.size();
      if (!parse_number(require_meta("K"), h.K) || h.K == 0)
        throw ParseError("bad K metadata", line_no);
      if (!parse_number(require_meta("N_s"), h.N_s) || h.N_s == 0)
        throw ParseError("bad N_s metadata", line_no);
      if (!parse_number(require_meta("R"), h.R)) throw ParseError("bad R metadata", line_no);
      try {
        h.mode = parse_mode(require_meta("mode"));
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_no);
      }
      if (auto it = meta.find("truncated"); it != meta.end()) h.truncated = it->second == "1";
      have_header = true;
      continue;
    }
    const auto fields = split_fields(view);
    if (fields.size() != columns) throw ParseError("wrong field count", line_no);
    std::uint64_t j = 0;
    std::uint64_t k = 0;
    std::uint64_t i = 0;
    IQPoint p;
    if (!parse_number(fields[0], j) || !parse_number(fields[1], k) || !parse_number(fields[2], i) ||
        !parse_number(fields[3], p.i_val) || !parse_number(fields[4], p.q_val)) {
      throw ParseError("malformed row", line_no);
    }
    const std::uint64_t expected_j = points.size() + 1;
    if (j != expected_j) {
      throw ParseError("index ordering violation at j=" + std::to_string(j) + ", expected j=" +
                           std::to_string(expected_j),
                       static_cast<long long>(j));
    }
    if (k < 1 || k > h.K || j != k + i * h.K) {
      throw ParseError("j != k + iK at j=" + std::to_string(j), static_cast<long long>(j));
    }
    if (!is_finite(p)) {
      throw ParseError("non-finite IQ component at j=" + std::to_string(j), static_cast<long long>(j));
    }
    if (columns == 6) {
      if (fields[5] != "0" && fields[5] != "1") throw ParseError("state must be 0 or 1", line_no);
      truth.states.push_back(fields[5] == "1" ? 1 : 0);
    }
    points.push_back(p);
  }
  if (!have_header) throw ParseError("missing header", line_no);
  const std::uint64_t full = std::uint64_t{h.K} * h.N_s;
  if (points.size() > full) throw ParseError("more shots than K*N_s", line_no);
  const bool truncated = h.truncated || points.size() < full;
  if (points.size() < full && !h.truncated && !points.empty()) {
    throw ParseError("stream shorter than K*N_s but not flagged truncated", line_no);
  }
  return {ShotStream(std::move(points), h.K, h.N_s, h.R, h.mode, truncated), std::move(truth)};
}

ShotStream read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw ParseError("bad magic bytes", 0);
  std::uint16_t version = 0;
  std::uint32_t K = 0;
  std::uint32_t N_s = 0;
  double R = 0.0;
  std::uint8_t mode = 0;
  if (!get_le(in, version) || !get_le(in, K) || !get_le(in, N_s) || !get_le(in, R) ||
      !get_le(in, mode)) {
    throw ParseError("truncated header", 0);
  }
  if (version != kBinaryVersion) throw ParseError("unsupported version " + std::to_string(version), 0);
  if (mode > 1) throw ParseError("bad mode byte", 0);
  if (K == 0 || N_s == 0) throw ParseError("K and N_s must be positive", 0);
  std::vector<IQPoint> points;
  const std::uint64_t full = std::uint64_t{K} * N_s;
  points.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(full, 1u << 24)));
  while (true) {
    std::uint64_t j = 0;
    if (!get_le(in, j)) {
      if (in.gcount() != 0) throw ParseError("partial record", static_cast<long long>(points.size() + 1));
      break;
    }
    IQPoint p;
    if (!get_le(in, p.i_val) || !get_le(in, p.q_val)) {
      throw ParseError("partial record", static_cast<long long>(j));
    }
    if (j != points.size() + 1) {
      throw ParseError("index ordering violation at j=" + std::to_string(j), static_cast<long long>(j));
    }
    if (!is_finite(p)) throw ParseError("non-finite IQ component", static_cast<long long>(j));
    if (points.size() == full) throw ParseError("more records than K*N_s", static_cast<long long>(j));
    points.push_back(p);
  }
  const bool truncated = points.size() < full;
  return ShotStream(std::move(points), K, N_s, R, static_cast<AcquisitionMode>(mode), truncated);
}

void write_binary(const ShotStream& stream, std::ostream& out) {
  out.write(kMagic.data(), 4);
  put_le(out, kBinaryVersion);
  put_le(out, stream.num_sequences());
  put_le(out, stream.num_repetitions());
  put_le(out, stream.repetition_rate());
  put_le(out, static_cast<std::uint8_t>(stream.mode()));
  for (std::size_t n = 0; n < stream.size(); ++n) {
    put_le(out, static_cast<std::uint64_t>(n + 1));
    put_le(out, stream[n].i_val);
    put_le(out, stream[n].q_val);
  }
}

}  // namespace

StreamFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".rstl") ? StreamFormat::binary : StreamFormat::csv;
}

ShotStream read_stream(std::istream& in, StreamFormat format) {
  if (format == StreamFormat::binary) return read_binary(in);
  return read_csv_body(in, false).first;
}

void write_stream(const ShotStream& stream, std::ostream& out, StreamFormat format) {
  if (format == StreamFormat::binary) {
    write_binary(stream, out);
  } else {
    write_csv_body(stream, nullptr, out);
  }
}

ShotStream read_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_stream(in, format_for_path(path));
}

void write_stream(const ShotStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_stream(stream, out, format_for_path(path));
}

void write_truth_csv(const ShotStream& stream, const TruthRecord& truth, std::ostream& out) {
  if (truth.states.size() != stream.size()) throw ConfigError("truth length differs from stream");
  write_csv_body(stream, &truth, out);
}

std::pair<ShotStream, TruthRecord> read_truth_csv(std::istream& in) { return read_csv_body(in, true); }

}  // namespace restless
