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

#include "run_dir.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

#include "restless/errors.hpp"

#ifndef RESTLESS_VERSION
#define RESTLESS_VERSION "0.0.0"
#endif

namespace restless::cli {

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("RESTLESS_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (*end != '\0') throw ConfigError("RESTLESS_SEED must be a non-negative integer");
  return v;
}

RunDir::RunDir(std::filesystem::path dir, std::string command, std::vector<std::string> argv)
    : dir_(std::move(dir)), command_(std::move(command)), argv_(std::move(argv)) {
  std::error_code ec;
  created_ = std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

RunDir::~RunDir() {
  if (finished_) return;
  std::error_code ec;
  for (const auto& name : outputs_) std::filesystem::remove(dir_ / name, ec);
  if (created_ && std::filesystem::is_empty(dir_, ec)) std::filesystem::remove(dir_, ec);
}

std::filesystem::path RunDir::file(const std::string& name) {
  outputs_.push_back(name);
  return dir_ / name;
}

void RunDir::add_input(const std::string& role, const std::filesystem::path& path) {
  inputs_[role] = path.string();
}

void RunDir::add_config(const std::filesystem::path& path) { configs_.push_back(path.string()); }

void RunDir::add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }

void RunDir::finish() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

  Json m;
  m["command"] = command_;
  m["argv"] = argv_;
  m["config_paths"] = configs_;
  m["seeds"] = seeds_;
  m["inputs"] = inputs_;
  m["outputs"] = outputs_;
  m["tool_version"] = RESTLESS_VERSION;
  m["timestamp"] = stamp;
  write_json(m, dir_ / "manifest.json");
  finished_ = true;
}

}  // namespace restless::cli
