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

#include <filesystem>

#include <json.hpp>

#include "restless/axis.hpp"
#include "restless/bench.hpp"
#include "restless/characterization.hpp"
#include "restless/discrimination.hpp"
#include "restless/fit.hpp"
#include "restless/signals.hpp"
#include "restless/simulator.hpp"

namespace restless {

using Json = nlohmann::ordered_json;

Json to_json(IQPoint p);
Json to_json(const SignalAxis& axis);
Json to_json(const RestlessAxisDiagnostics& diag);
Json to_json(const Discriminator& disc);
Json to_json(const SignalSeries& series);
Json to_json(const FitResult& fit);
Json to_json(const RbFit& fit);
Json to_json(const EpcDistribution& dist);
Json to_json(const FidelityReport& report);
Json to_json(const SimConfig& cfg);
Json to_json(const SequenceMeta& meta);
Json to_json(const BenchReport& report);
Json to_json(const ZTest& test);

/// Reads a SimConfig; absent keys keep their defaults. T1 may be the string
/// "inf". Throws ConfigError on malformed values.
SimConfig sim_config_from_json(const Json& j);

/// Either an explicit list {"sequences": [...]} or a builder:
///   {"builder": "id_x", "n_id": 10, "n_x": 10, "eta_x": 0.99}
///   {"builder": "rabi", "amplitudes": {"start": -90, "stop": 90, "count": 128},
///    "rate": 0.5853, "n_cal": 3}
///   {"builder": "rb", "lengths": [...], "num_sequences": 200, "epc": 0.0036, ...}
SequenceMeta sequence_meta_from_json(const Json& j);

/// Evenly spaced amplitudes of a Rabi builder entry.
std::vector<double> linspace(double start, double stop, std::size_t count);

Json read_json(const std::filesystem::path& path);
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace restless
