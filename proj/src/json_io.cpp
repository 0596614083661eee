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

#include "restless/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "restless/errors.hpp"

namespace restless {

namespace {

// JSON has no infinities; an unidentified standard error is written as null.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json interval(const Interval& i) { return Json::array({i.lo, i.hi}); }

IQPoint point_from(const Json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(std::string(key) + " must be an [I, Q] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(IQPoint p) { return Json::array({p.i_val, p.q_val}); }

Json to_json(const SignalAxis& axis) {
  Json j;
  j["theta"] = axis.theta;
  j["origin"] = to_json(axis.origin);
  return j;
}

Json to_json(const RestlessAxisDiagnostics& d) {
  Json j;
  j["theta_d"] = d.theta_d;
  j["theta_m"] = d.theta_m;
  j["snr_theta_d"] = number(d.snr_branch_a);
  j["snr_pi_minus_theta_d"] = number(d.snr_branch_b);
  j["chosen"] = d.chosen == 'a' ? "theta_d" : "pi_minus_theta_d";
  j["K"] = d.num_sequences;
  j["N_s"] = d.num_repetitions;
  return j;
}

Json to_json(const Discriminator& disc) {
  Json j;
  j["axis"] = to_json(disc.axis);
  j["threshold"] = disc.threshold;
  j["method"] = std::string(to_string(disc.method));
  j["zero_separation"] = disc.zero_separation;
  return j;
}

Json to_json(const SignalSeries& series) {
  Json arr = Json::array();
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& p = series.points[k];
    Json e;
    e["k"] = k + 1;
    e["value"] = p.value ? Json(*p.value) : Json(nullptr);
    e["std_error"] = p.std_error;
    e["count"] = p.count;
    e["clamped"] = p.clamped;
    arr.push_back(e);
  }
  return arr;
}

Json to_json(const FitResult& fit) {
  Json j;
  Json params = Json::object();
  for (std::size_t p = 0; p < fit.names.size(); ++p) {
    params[fit.names[p]] = {{"value", fit.values[p]},
                            {"std_error", number(fit.std_errors[p])},
                            {"at_bound", p < fit.at_bound.size() && fit.at_bound[p]}};
  }
  j["parameters"] = params;
  Json cov = Json::array();
  for (double c : fit.covariance) cov.push_back(number(c));
  j["covariance"] = cov;
  j["chi_square"] = fit.chi_square;
  j["residual_norm"] = fit.residual_norm;
  j["dof"] = fit.dof;
  j["converged"] = fit.converged;
  j["usable"] = fit.usable();
  j["ill_conditioned"] = fit.ill_conditioned;
  j["iterations"] = fit.iterations;
  j["warnings"] = fit.warnings;
  return j;
}

Json to_json(const RbFit& fit) {
  Json j = to_json(fit.fit);
  j["dimension"] = fit.dimension;
  j["epc"] = fit.epc;
  j["epc_std_error"] = number(fit.epc_std_error);
  j["unphysical"] = fit.unphysical;
  return j;
}

Json to_json(const EpcDistribution& d) {
  Json j;
  j["mean"] = d.mean;
  j["std_dev"] = d.std_dev;
  j["resamples"] = d.resamples;
  j["subset"] = d.subset;
  j["seed"] = d.seed;
  j["failures"] = d.failures;
  j["samples"] = d.samples;
  return j;
}

Json to_json(const FidelityReport& r) {
  static constexpr const char* kLabel[2] = {"A", "B"};
  static constexpr const char* kGate[2] = {"Id", "X"};
  Json table = Json::array();
  for (int x = 0; x < 2; ++x) {
    for (int g = 0; g < 2; ++g) {
      for (int y = 0; y < 2; ++y) {
        table.push_back({{"set", kLabel[x]},
                         {"operation", kGate[g]},
                         {"outcome", kLabel[y]},
                         {"count", r.table.counts[x][g][y]},
                         {"probability", r.table.probability[x][g][y]},
                         {"interval", interval(r.intervals[x][g][y])}});
      }
    }
  }
  Json j;
  j["spam"] = table;
  j["fidelity_A"] = r.fidelity_a;
  j["fidelity_A_interval"] = interval(r.fidelity_a_interval);
  j["fidelity_B"] = r.fidelity_b;
  j["fidelity_B_interval"] = interval(r.fidelity_b_interval);
  j["thresholds"] = {{"A", r.thresholds[0]}, {"B", r.thresholds[1]}};
  j["confidence"] = r.confidence;
  return j;
}

Json to_json(const SimConfig& cfg) {
  Json j;
  j["T1"] = std::isinf(cfg.t1) ? Json("inf") : Json(cfg.t1);
  j["R"] = cfg.repetition_rate;
  j["t_meas"] = cfg.t_meas;
  j["assignment_error"] = cfg.assignment_error;
  j["centroid_0"] = to_json(cfg.centroid_0);
  j["centroid_1"] = to_json(cfg.centroid_1);
  j["iq_sigma"] = cfg.iq_sigma;
  j["seed"] = cfg.seed;
  j["mode"] = std::string(to_string(cfg.mode));
  return j;
}

Json to_json(const SequenceMeta& meta) {
  Json arr = Json::array();
  for (const auto& d : meta.descriptors()) {
    Json e;
    e["tag"] = std::string(to_string(d.tag));
    if (d.tag == GateTag::Rabi) e["amplitude"] = d.amplitude;
    if (d.tag == GateTag::Clifford) {
      e["clifford_length"] = d.clifford_length;
      e["sequence_id"] = d.sequence_id;
    }
    e["net_flip"] = d.net_flip;
    e["eta"] = d.eta ? Json(*d.eta) : Json(nullptr);
    e["duration"] = d.duration;
    arr.push_back(e);
  }
  return Json{{"sequences", arr}};
}

Json to_json(const BenchReport& r) {
  Json j;
  j["method"] = std::string(to_string(r.method));
  Json pts = Json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"N_s", p.size}, {"seconds", p.seconds}, {"repeats", p.repeats}, {"inner_loops", p.inner_loops}});
  }
  j["points"] = pts;
  j["scaling_exponent"] = r.scaling_exponent ? Json(*r.scaling_exponent) : Json(nullptr);
  j["intercept"] = r.intercept ? Json(*r.intercept) : Json(nullptr);
  if (!r.points.empty()) {
    j["size_range"] = Json::array({r.points.front().size, r.points.back().size});
  }
  j["environment"] = r.environment;
  j["notices"] = r.notices;
  return j;
}

Json to_json(const ZTest& t) {
  return Json{{"z", t.z}, {"p_value", t.p_value}, {"confidence_percent", t.confidence_percent}};
}

SimConfig sim_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
  SimConfig cfg;
  if (j.contains("T1")) {
    const auto& t = j["T1"];
    if (t.is_string() && t.get<std::string>() == "inf") {
      cfg.t1 = std::numeric_limits<double>::infinity();
    } else if (t.is_number()) {
      cfg.t1 = t.get<double>();
    } else {
      throw ConfigError("T1 must be a number or \"inf\"");
    }
  }
  cfg.repetition_rate = get_or(j, "R", cfg.repetition_rate);
  cfg.t_meas = get_or(j, "t_meas", cfg.t_meas);
  cfg.assignment_error = get_or(j, "assignment_error", cfg.assignment_error);
  if (j.contains("centroid_0")) cfg.centroid_0 = point_from(j["centroid_0"], "centroid_0");
  if (j.contains("centroid_1")) cfg.centroid_1 = point_from(j["centroid_1"], "centroid_1");
  cfg.iq_sigma = get_or(j, "iq_sigma", cfg.iq_sigma);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  if (j.contains("mode")) {
    try {
      cfg.mode = parse_mode(j["mode"].get<std::string>());
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("mode must be a string");
    }
  }
  return cfg;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {start};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

SequenceMeta sequence_meta_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("sequence metadata must be a JSON object");
  if (j.contains("sequences")) {
    std::vector<SequenceDescriptor> out;
    for (const auto& e : j["sequences"]) {
      SequenceDescriptor d;
      try {
        d.tag = parse_gate_tag(e.at("tag").get<std::string>());
      } catch (const nlohmann::json::exception&) {
        throw ConfigError("every sequence needs a string 'tag'");
      }
      d.amplitude = get_or(e, "amplitude", 0.0);
      d.clifford_length = get_or<std::uint32_t>(e, "clifford_length", 0);
      d.sequence_id = get_or<std::uint64_t>(e, "sequence_id", 0);
      d.net_flip = get_or(e, "net_flip", false);
      if (e.contains("eta") && !e["eta"].is_null()) d.eta = get_or(e, "eta", 0.0);
      d.duration = get_or(e, "duration", 0.0);
      out.push_back(d);
    }
    return SequenceMeta(std::move(out));
  }
  const std::string builder = get_or<std::string>(j, "builder", "");
  const double gate = get_or(j, "gate_duration", 50e-9);
  if (builder == "id_x") {
    return id_x_meta(get_or<std::uint32_t>(j, "n_id", 10), get_or<std::uint32_t>(j, "n_x", 10),
                     get_or(j, "eta_x", 1.0), gate);
  }
  if (builder == "rabi") {
    std::vector<double> amps;
    if (j.contains("amplitudes") && j["amplitudes"].is_array()) {
      amps = j["amplitudes"].get<std::vector<double>>();
    } else {
      const Json a = j.value("amplitudes", Json::object());
      amps = linspace(get_or(a, "start", -90.0), get_or(a, "stop", 90.0), get_or<std::size_t>(a, "count", 128));
    }
    return rabi_meta(amps, get_or(j, "rate", 0.5853), get_or<std::uint32_t>(j, "n_cal", 3), gate);
  }
  if (builder == "rb") {
    RbLayout layout;
    layout.lengths = get_or(j, "lengths", layout.lengths);
    layout.num_sequences = get_or(j, "num_sequences", layout.num_sequences);
    layout.epc = get_or(j, "epc", layout.epc);
    layout.clifford_duration = get_or(j, "clifford_duration", layout.clifford_duration);
    layout.concentration = get_or(j, "concentration", layout.concentration);
    layout.n_cal = get_or(j, "n_cal", layout.n_cal);
    layout.seed = get_or(j, "seed", layout.seed);
    return rb_meta(layout);
  }
  throw ConfigError("sequence metadata needs 'sequences' or a 'builder' of id_x, rabi or rb");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace restless
