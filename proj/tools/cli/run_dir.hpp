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

// Output directory bookkeeping. Every file a command writes goes through a
// RunDir so the manifest lists it; the manifest is written last. A RunDir
// destroyed before finish() removes what it wrote, so a failed command leaves
// no directory without a manifest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "restless/json_io.hpp"

namespace restless::cli {

/// Seed from the RESTLESS_SEED environment variable, if set.
std::optional<std::uint64_t> env_seed();

class RunDir {
 public:
  RunDir(std::filesystem::path dir, std::string command, std::vector<std::string> argv);
  ~RunDir();
  RunDir(const RunDir&) = delete;
  RunDir& operator=(const RunDir&) = delete;

  /// Path for a new output file, recorded in the manifest.
  std::filesystem::path file(const std::string& name);

  void add_input(const std::string& role, const std::filesystem::path& path);
  void add_config(const std::filesystem::path& path);
  void add_seed(const std::string& name, std::uint64_t seed);

  /// Writes manifest.json. Call once after every output is on disk.
  void finish();

 private:
  std::filesystem::path dir_;
  std::string command_;
  std::vector<std::string> argv_;
  Json inputs_ = Json::object();
  Json configs_ = Json::array();
  Json seeds_ = Json::object();
  std::vector<std::string> outputs_;
  bool created_ = false;
  bool finished_ = false;
};

}  // namespace restless::cli
