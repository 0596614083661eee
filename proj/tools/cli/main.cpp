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

// restless: simulate, analyze and benchmark restless single-shot data.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 degenerate data.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "restless/axis.hpp"
#include "restless/bench.hpp"
#include "restless/characterization.hpp"
#include "restless/discrimination.hpp"
#include "restless/errors.hpp"
#include "restless/json_io.hpp"
#include "restless/signals.hpp"
#include "restless/simulator.hpp"
#include "restless/stream_io.hpp"
#include "run_dir.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace restless;
using restless::cli::RunDir;

namespace {

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

// ------------------------------------------------------------------ tables

std::string cell(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Column-oriented CSV with nine significant digits; NaN becomes an empty cell.
class Table {
 public:
  void add(std::string name, std::vector<double> values) {
    std::vector<std::string> col;
    col.reserve(values.size());
    for (double v : values) col.push_back(cell(v));
    add_text(std::move(name), std::move(col));
  }
  void add_text(std::string name, std::vector<std::string> values) {
    names_.push_back(std::move(name));
    cols_.push_back(std::move(values));
  }
  void write(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (std::size_t c = 0; c < names_.size(); ++c) out << (c ? "," : "") << names_[c];
    out << '\n';
    std::size_t rows = 0;
    for (const auto& c : cols_) rows = std::max(rows, c.size());
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols_.size(); ++c) {
        out << (c ? "," : "") << (r < cols_[c].size() ? cols_[c][r] : "");
      }
      out << '\n';
    }
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> cols_;
};

// ------------------------------------------------------------------ inputs

SequenceMeta load_meta(const fs::path& path) { return sequence_meta_from_json(read_json(path)); }

void require_match(const SequenceMeta& meta, const ShotStream& stream) {
  if (meta.size() != stream.num_sequences()) {
    throw ConfigError("metadata lists " + std::to_string(meta.size()) + " sequences but the stream has K = " +
                      std::to_string(stream.num_sequences()));
  }
}

bool has_calibration(const SequenceMeta& meta) {
  auto any = [&](GateTag t) { return !meta.indices_with(t).empty(); };
  return (any(GateTag::CalId) || any(GateTag::Id)) && (any(GateTag::CalX) || any(GateTag::X));
}

std::optional<SignalSeries> normalized(const SignalSeries& raw, const SequenceMeta& meta) {
  if (!has_calibration(meta)) return std::nullopt;
  const auto [id, x] = calibration_levels(raw, meta);
  return normalize_signal(raw, id, x, Clamp::no);
}

std::vector<double> sequence_numbers(std::size_t k) {
  std::vector<double> out(k);
  for (std::size_t n = 0; n < k; ++n) out[n] = static_cast<double>(n + 1);
  return out;
}

std::vector<std::string> tag_names(const SequenceMeta& meta) {
  std::vector<std::string> out;
  for (const auto& d : meta.descriptors()) out.emplace_back(to_string(d.tag));
  return out;
}

LabeledStream restless_labels(const ShotStream& stream, const SequenceMeta& meta, bool cdf) {
  const auto axis = restless_axis(stream).axis;
  return label_shots(stream, cdf ? train_cdf_discriminator(stream, axis, meta)
                                 : train_quantile_discriminator(stream, axis));
}

// Density of the raw IQ points plus its CSV twin.
void write_density(RunDir& dir, const std::string& stem, const std::string& title,
                   std::span<const IQPoint> points) {
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& p : points) {
    xs.push_back(p.i_val);
    ys.push_back(p.q_val);
  }
  constexpr std::size_t kBins = 60;
  const auto h = plot::histogram2d(xs, ys, kBins);
  std::vector<double> ci, cq, count;
  const double wx = (h.x_max - h.x_min) / kBins;
  const double wy = (h.y_max - h.y_min) / kBins;
  for (std::size_t r = 0; r < kBins; ++r) {
    for (std::size_t c = 0; c < kBins; ++c) {
      ci.push_back(h.x_min + (c + 0.5) * wx);
      cq.push_back(h.y_min + (r + 0.5) * wy);
      count.push_back(h.counts[r][c]);
    }
  }
  Table t;
  t.add("i_center", ci);
  t.add("q_center", cq);
  t.add("count", count);
  t.write(dir.file(stem + ".csv"));
  plot::Chart chart(title, "I", "Q");
  chart.set_heatmap(h);
  chart.write(dir.file(stem + ".svg"));
}

void add_series(Table& t, plot::Chart& chart, const std::string& name, const SignalSeries& s,
                std::size_t color, const std::vector<double>& x) {
  t.add(name, s.values());
  t.add(name + "_se", s.std_errors());
  plot::Series ps;
  ps.label = name;
  ps.x = x;
  ps.y = s.values();
  ps.y_error = s.std_errors();
  ps.color = plot::kPalette[color % std::size(plot::kPalette)];
  ps.markers = true;
  chart.add(std::move(ps));
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string config, meta, out, format = "csv", mode;
  std::uint32_t reps = 0;
};

void cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  const Json cj = read_json(a.config);
  SimConfig cfg = sim_config_from_json(cj);
  if (!a.mode.empty()) cfg.mode = parse_mode(a.mode);
  if (auto s = cli::env_seed()) cfg.seed = *s;
  const std::uint32_t reps = a.reps ? a.reps : cj.value("repetitions", 1000u);
  if (reps == 0) throw ConfigError("repetitions must be positive");
  const SequenceMeta meta = load_meta(a.meta);
  cfg.validate(meta);

  const auto run = simulate(cfg, meta, reps);

  RunDir dir(a.out, "simulate", argv);
  dir.add_config(a.config);
  dir.add_input("meta", a.meta);
  dir.add_seed("simulation", cfg.seed);
  const std::string ext = a.format == "bin" ? "bin" : "csv";
  write_stream(run.stream, dir.file("stream." + ext));
  {
    std::ofstream out(dir.file("truth.csv"), std::ios::binary);
    write_truth_csv(run.stream, run.truth, out);
  }
  Json resolved = to_json(cfg);
  resolved["repetitions"] = reps;
  write_json(resolved, dir.file("config.json"));
  write_json(to_json(meta), dir.file("meta.json"));
  dir.finish();
  std::cout << "simulated " << run.stream.size() << " shots (K = " << meta.size() << ", N_s = " << reps << ", "
            << to_string(cfg.mode) << ") into " << a.out << '\n';
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string stream, meta, out, standard, discriminator = "quantile";
  bool dprime = false, postselect = false, spam = false, axis_diagnostics = false;
  double confidence = 0.95;
};

void cmd_analyze(const AnalyzeArgs& a, const std::vector<std::string>& argv) {
  const ShotStream stream = read_stream(a.stream);
  const SequenceMeta meta = load_meta(a.meta);
  require_match(meta, stream);
  const std::size_t K = meta.size();
  const auto ks = sequence_numbers(K);

  RunDir dir(a.out, "analyze", argv);
  dir.add_input("stream", a.stream);
  dir.add_input("meta", a.meta);

  Table table;
  table.add("k", ks);
  table.add_text("tag", tag_names(meta));
  plot::Chart chart("Signal per sequence", "sequence k", "normalized signal");
  std::size_t color = 0;
  auto emit = [&](const std::string& name, const SignalSeries& raw) {
    table.add(name + "_raw", raw.values());
    table.add(name + "_raw_se", raw.std_errors());
    if (auto n = normalized(raw, meta)) {
      add_series(table, chart, name, *n, color++, ks);
    } else {
      add_series(table, chart, name + "_raw", raw, color++, ks);
    }
  };

  Json report;
  report["mode"] = std::string(to_string(stream.mode()));
  report["shots"] = stream.size();
  report["num_sequences"] = K;
  report["num_repetitions"] = stream.num_repetitions();

  if (stream.mode() == AcquisitionMode::standard) {
    if (a.dprime) warn("<d'> is meaningless for reset data; standard averaging is used instead");
    if (a.postselect || a.spam) warn("post-selection and SPAM need a restless stream; skipped");
    const auto axis = standard_axis(average_iq_all(stream));
    report["axis"] = to_json(axis);
    emit("standard", projected_average_signal(stream, axis));
  } else {
    const bool cdf = a.discriminator == "cdf";
    const auto axis = restless_axis(stream);
    const auto labeled = restless_labels(stream, meta, cdf);
    report["discriminator"] = to_json(labeled.discriminator);
    emit("s", restless_signal(labeled));

    if (a.postselect || a.spam) {
      const auto sel = post_select(labeled);
      const auto cond = conditioned_signals(labeled, sel);
      table.add("p_a", sel.p_a);
      emit("s_a", cond.s_a);
      emit("s_b", cond.s_b);
      if (a.spam) {
        const auto fid = readout_fidelities(stream, labeled, meta, a.confidence);
        Json sj = to_json(fid);
        try {
          sj["ground_label"] = identify_ground_label(fid) == Label::A ? "A" : "B";
        } catch (const AmbiguityError& e) {
          warn(e.what());
          sj["ground_label"] = nullptr;
        }
        write_json(sj, dir.file("spam.json"));
        const auto corrected = spam_correct(cond, fid);
        emit("s_a_spam", corrected.s_a);
        emit("s_b_spam", corrected.s_b);
      }
    }
    if (a.dprime) {
      const auto d = dprime_signal(stream, dprime_endpoints(stream, meta), Clamp::no);
      add_series(table, chart, "dprime", d, color++, ks);
    }
    if (a.axis_diagnostics) {
      Json aj;
      aj["axis"] = to_json(axis.axis);
      aj["diagnostics"] = to_json(axis.diagnostics);
      write_json(aj, dir.file("axis.json"));
      write_density(dir, "difference_density", "Folded difference points", difference_points(stream).folded);
    }
  }

  if (!a.standard.empty()) {
    const ShotStream twin = read_stream(a.standard);
    require_match(meta, twin);
    dir.add_input("standard", a.standard);
    if (twin.mode() != AcquisitionMode::standard) warn("--standard stream is not in standard mode");
    emit("standard_twin", projected_average_signal(twin, standard_axis(average_iq_all(twin))));
  }

  write_density(dir, "iq_density", "Single-shot IQ density", stream.points());
  table.write(dir.file("signals.csv"));
  chart.write(dir.file("signals.svg"));
  write_json(report, dir.file("analysis.json"));
  dir.finish();
  std::cout << "analyzed " << stream.size() << " shots into " << a.out << '\n';
}

// ------------------------------------------------------------------ rabi

struct RabiArgs {
  std::string stream, meta, out;
  bool naive = false;
};

SignalSeries select(const SignalSeries& s, std::span<const std::uint32_t> ks) {
  SignalSeries out;
  for (auto k : ks) out.points.push_back(s.at(k));
  return out;
}

void cmd_rabi(const RabiArgs& a, const std::vector<std::string>& argv) {
  const ShotStream stream = read_stream(a.stream);
  const SequenceMeta meta = load_meta(a.meta);
  require_match(meta, stream);
  const auto ks = meta.indices_with(GateTag::Rabi);
  if (ks.size() < 4) throw ConfigError("metadata needs at least 4 Rabi sequences");
  std::vector<double> amps;
  for (auto k : ks) amps.push_back(meta.at(k).amplitude);

  RunDir dir(a.out, "rabi", argv);
  dir.add_input("stream", a.stream);
  dir.add_input("meta", a.meta);

  std::vector<std::pair<std::string, SignalSeries>> analyses;
  auto norm = [&](const SignalSeries& raw) {
    auto n = normalized(raw, meta);
    if (!n) throw ConfigError("Rabi analysis needs Id/X calibration sequences");
    return select(*n, ks);
  };
  if (stream.mode() == AcquisitionMode::standard) {
    if (a.naive) warn("--naive only applies to restless streams; standard averaging is the analysis");
    analyses.emplace_back("standard",
                          norm(projected_average_signal(stream, standard_axis(average_iq_all(stream)))));
  } else {
    const auto labeled = restless_labels(stream, meta, false);
    const auto cond = conditioned_signals(labeled, post_select(labeled));
    analyses.emplace_back("s", norm(restless_signal(labeled)));
    analyses.emplace_back("s_a", norm(cond.s_a));
    analyses.emplace_back("s_b", norm(cond.s_b));
    if (a.naive) {
      // Naive averages have flattened calibrations, so they are scaled by the
      // separation of the labeled clusters instead.
      const auto axis = standard_axis(average_iq_all(stream));
      const auto proj = project_all(stream, axis);
      double sum[2] = {0, 0};
      std::size_t n[2] = {0, 0};
      for (std::size_t i = 0; i < proj.size(); ++i) {
        const int y = static_cast<int>(labeled.labels[i]);
        sum[y] += proj[i];
        ++n[y];
      }
      if (n[0] == 0 || n[1] == 0) throw DegenerateError("all shots carry one label");
      const double m0 = sum[0] / static_cast<double>(n[0]);
      const double m1 = sum[1] / static_cast<double>(n[1]);
      auto raw = projected_average_signal(stream, axis);
      for (auto& p : raw.points) {
        if (p.value) *p.value = (*p.value - m0) / (m1 - m0);
        p.std_error /= std::abs(m1 - m0);
      }
      analyses.emplace_back("naive", select(raw, ks));
    }
  }

  Table table;
  table.add("amplitude", amps);
  plot::Chart chart("Rabi oscillation", "drive amplitude", "excited population");
  Json fits = Json::object();
  std::vector<FitResult> results;
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    const auto& [name, series] = analyses[i];
    add_series(table, chart, name, series, i, amps);
    FitResult fit = fit_rabi(amps, series);
    if (!fit.usable()) warn(name + " fit did not converge");
    std::vector<double> curve;
    const auto model = make_model(ModelId::cosine);
    for (double x : amps) curve.push_back(model->value(x, fit.values));
    table.add(name + "_fit", curve);
    fits[name] = to_json(fit);
    results.push_back(std::move(fit));
  }
  // Fitted curve of the first analysis on a fine grid.
  {
    const auto model = make_model(ModelId::cosine);
    plot::Series line;
    line.label = analyses.front().first + " fit";
    line.x = linspace(amps.front(), amps.back(), 400);
    for (double x : line.x) line.y.push_back(model->value(x, results.front().values));
    line.color = "#000000";
    chart.add(std::move(line));
  }

  Json consistency = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      const double se = std::hypot(results[i].std_error("rate"), results[j].std_error("rate"));
      consistency.push_back({{"pair", {analyses[i].first, analyses[j].first}},
                             {"rate_difference", results[i].value("rate") - results[j].value("rate")},
                             {"z", std::abs(results[i].value("rate") - results[j].value("rate")) / se}});
    }
  }
  write_json(Json{{"fits", fits}, {"rate_consistency", consistency}}, dir.file("rabi.json"));
  table.write(dir.file("rabi.csv"));
  chart.write(dir.file("rabi.svg"));
  dir.finish();
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::cout << analyses[i].first << ": rate = " << results[i].value("rate") << " +- "
              << results[i].std_error("rate") << ", amplitude = " << results[i].value("amplitude") << '\n';
  }
}

// ------------------------------------------------------------------ rb

struct RbArgs {
  std::string config, stream, meta, survival, out;
  int dimension = 2;
  bool postselect = false;
  std::size_t subset = 0, resamples = 0;
  std::optional<std::uint64_t> boot_seed;
};

struct SurvivalData {
  std::vector<double> lengths;
  std::vector<std::vector<double>> curves;
  double retained_fraction = 1.0;
};

SurvivalData read_survival_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto split = [](const std::string& line, long long record) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) {
        out.push_back(std::nan(""));
        continue;
      }
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + tok + "'", record);
      }
    }
    return out;
  };
  SurvivalData d;
  std::string line;
  long long record = 0;
  if (!std::getline(in, line)) throw ParseError("missing header of Clifford lengths", 0);
  d.lengths = split(line, record++);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line, record);
    if (row.size() != d.lengths.size()) throw ParseError("row length differs from header", record);
    d.curves.push_back(std::move(row));
    ++record;
  }
  if (d.curves.empty()) throw EmptyDataError("survival file has no curves");
  return d;
}

void write_survival_csv(const SurvivalData& d, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  auto row = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << cell(v[i]);
    out << '\n';
  };
  row(d.lengths);
  for (const auto& c : d.curves) row(c);
}

SurvivalData curves_from_stream(const ShotStream& stream, const SequenceMeta& meta, bool postselect,
                                Json& report, double confidence = 0.95) {
  require_match(meta, stream);
  if (meta.indices_with(GateTag::Clifford).empty()) throw ConfigError("metadata has no Clifford sequences");
  if (stream.mode() != AcquisitionMode::restless) throw ConfigError("RB analysis expects a restless stream");
  const auto labeled = restless_labels(stream, meta, false);
  RbCurves c;
  if (postselect) {
    const auto fid = readout_fidelities(stream, labeled, meta, confidence);
    const Label ground = identify_ground_label(fid);
    report["fidelities"] = to_json(fid);
    report["ground_label"] = ground == Label::A ? "A" : "B";
    c = rb_postselect(labeled, meta, ground);
  } else {
    c = rb_all_shots(labeled, meta);
  }
  return {c.lengths, c.survival, c.retained_fraction};
}

void cmd_rb(const RbArgs& a, const std::vector<std::string>& argv) {
  const int sources = !a.config.empty() + !a.stream.empty() + !a.survival.empty();
  if (sources != 1) throw ConfigError("give exactly one of --config, --stream (with --meta) or --survival");
  const auto env = cli::env_seed();

  RunDir dir(a.out, "rb", argv);
  Json report;
  report["dimension"] = a.dimension;
  report["postselect"] = a.postselect;

  std::size_t subset = 0, resamples = 1000;  // subset 0: half the curves
  std::uint64_t boot_seed = 3;
  SurvivalData data;

  if (!a.config.empty()) {
    dir.add_config(a.config);
    const Json cj = read_json(a.config);
    if (const auto b = cj.find("bootstrap"); b != cj.end()) {
      subset = b->value("subset", subset);
      resamples = b->value("resamples", resamples);
      boot_seed = b->value("seed", boot_seed);
    }
    if (const auto s = cj.find("survival"); s != cj.end()) {
      const auto lengths = s->value("lengths", std::vector<std::uint32_t>{});
      std::uint64_t seed = s->value("seed", std::uint64_t{1});
      if (env) seed = *env;
      dir.add_seed("survival", seed);
      data.curves = simulate_rb_survival(lengths, s->value("curves", 90u), s->value("epc", 0.0), a.dimension,
                                         s->value("shots", 1000u), s->value("concentration", 1e5), seed);
      data.lengths.assign(lengths.begin(), lengths.end());
    } else if (cj.contains("sim") && cj.contains("layout")) {
      if (a.dimension != 2) {
        throw ConfigError("restless stream simulation is single-qubit; use a 'survival' config for --dimension 4");
      }
      SimConfig cfg = sim_config_from_json(cj["sim"]);
      Json layout = cj["layout"];
      layout["builder"] = "rb";
      if (env) {
        cfg.seed = *env;
        layout["seed"] = *env + 100;
      }
      const SequenceMeta meta = sequence_meta_from_json(layout);
      cfg.validate(meta);
      dir.add_seed("simulation", cfg.seed);
      dir.add_seed("layout", layout.value("seed", RbLayout{}.seed));
      const auto run = simulate_restless(cfg, meta, cj.value("repetitions", 2000u));
      data = curves_from_stream(run.stream, meta, a.postselect, report);
    } else {
      throw ConfigError("RB config needs a 'survival' block or both 'sim' and 'layout'");
    }
  } else if (!a.stream.empty()) {
    if (a.meta.empty()) throw ConfigError("--stream needs --meta");
    dir.add_input("stream", a.stream);
    dir.add_input("meta", a.meta);
    if (a.dimension != 2) throw ConfigError("streams are single-qubit; use --survival for --dimension 4");
    data = curves_from_stream(read_stream(a.stream), load_meta(a.meta), a.postselect, report);
  } else {
    dir.add_input("survival", a.survival);
    data = read_survival_csv(a.survival);
  }
  if (a.subset) subset = a.subset;
  if (a.resamples) resamples = a.resamples;
  if (a.boot_seed) boot_seed = *a.boot_seed;
  if (env) boot_seed = *env + 2;
  dir.add_seed("bootstrap", boot_seed);
  if (subset == 0) subset = std::max<std::size_t>(1, data.curves.size() / 2);
  if (subset >= data.curves.size()) {
    warn("bootstrap subset covers every curve; the EPC spread collapses to zero");
    subset = data.curves.size();
  }

  std::vector<double> means, ses;
  average_curves(data.curves, means, ses);
  const RbFit full = fit_rb(data.lengths, means, ses, a.dimension);
  const auto dist = bootstrap_epc(data.curves, data.lengths, subset, resamples, a.dimension, boot_seed);

  report["retained_fraction"] = data.retained_fraction;
  report["num_curves"] = data.curves.size();
  report["full_fit"] = to_json(full);
  Json dj = to_json(dist);
  dj.erase("samples");
  report["bootstrap"] = dj;
  write_json(report, dir.file("epc.json"));

  write_survival_csv(data, dir.file("survival.csv"));
  const auto model = make_model(ModelId::rb_decay);
  std::vector<double> curve;
  for (double m : data.lengths) curve.push_back(model->value(m, full.fit.values));
  Table decay;
  decay.add("clifford_length", data.lengths);
  decay.add("mean_survival", means);
  decay.add("std_error", ses);
  decay.add("fit", curve);
  decay.write(dir.file("rb_decay.csv"));

  plot::Chart dc("Randomized benchmarking decay", "Clifford length", "survival probability");
  dc.add({"mean", data.lengths, means, ses, plot::kPalette[0], false, true});
  plot::Series line{"fit", {}, {}, {}, plot::kPalette[1], true, false};
  line.x = linspace(data.lengths.front(), data.lengths.back(), 300);
  for (double m : line.x) line.y.push_back(model->value(m, full.fit.values));
  dc.add(std::move(line));
  dc.write(dir.file("rb_decay.svg"));

  Table samples;
  samples.add("epc", dist.samples);
  samples.write(dir.file("epc_samples.csv"));

  // Histogram of the bootstrap samples.
  constexpr std::size_t kBins = 30;
  if (!dist.samples.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(dist.samples.begin(), dist.samples.end());
    const double lo = *lo_it;
    const double width = std::max(*hi_it - lo, 1e-12) / kBins;
    std::vector<double> centers(kBins), counts(kBins, 0.0);
    for (std::size_t b = 0; b < kBins; ++b) centers[b] = lo + (b + 0.5) * width;
    for (double s : dist.samples) counts[std::min(kBins - 1, static_cast<std::size_t>((s - lo) / width))] += 1.0;
    Table hist;
    hist.add("epc_center", centers);
    hist.add("count", counts);
    hist.write(dir.file("epc_histogram.csv"));
    plot::Chart hc("Bootstrap EPC distribution", "error per Clifford", "count");
    plot::Series bars{"", centers, counts, {}, plot::kPalette[2], true, true};
    hc.add(std::move(bars));
    hc.write(dir.file("epc_histogram.svg"));
  }
  dir.finish();
  std::cout << "EPC (d = " << a.dimension << ") = " << dist.mean * 100 << " +- " << dist.std_dev * 100
            << " % over " << dist.resamples << " resamples (" << dist.failures << " failed)\n";
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::vector<std::size_t> sizes{1000, 3000, 10000, 30000, 100000};
  std::vector<std::string> methods{"svd_full", "kmeans", "restless_analysis"};
  std::size_t repeats = 5;
  std::uint64_t seed = 1;
  std::string config, out;
};

void cmd_bench(BenchArgs a, const std::vector<std::string>& argv, bool sizes_given, bool methods_given) {
  if (!a.config.empty()) {
    // Command-line lists win over the file.
    const Json cj = read_json(a.config);
    if (!sizes_given) a.sizes = cj.value("sizes", a.sizes);
    if (!methods_given) a.methods = cj.value("methods", a.methods);
    a.repeats = cj.value("repeats", a.repeats);
    a.seed = cj.value("seed", a.seed);
  }
  std::vector<BenchMethod> methods;
  for (const auto& m : a.methods) methods.push_back(parse_bench_method(m));
  if (auto s = cli::env_seed()) a.seed = *s;

  RunDir dir(a.out, "bench", argv);
  if (!a.config.empty()) dir.add_config(a.config);
  dir.add_seed("data", a.seed);
  Json reports = Json::array();
  Table table;
  std::vector<std::string> col_method;
  std::vector<double> col_n, col_sec, col_rep, col_inner;
  plot::Chart chart("Runtime scaling", "N_s", "seconds per call");
  chart.set_log_x(true);
  chart.set_log_y(true);
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto r = run_scaling(methods[i], a.sizes, a.repeats, a.seed);
    reports.push_back(to_json(r));
    plot::Series s;
    s.label = std::string(to_string(r.method));
    s.color = plot::kPalette[i % std::size(plot::kPalette)];
    s.markers = true;
    for (const auto& p : r.points) {
      col_method.emplace_back(to_string(r.method));
      col_n.push_back(static_cast<double>(p.size));
      col_sec.push_back(p.seconds);
      col_rep.push_back(static_cast<double>(p.repeats));
      col_inner.push_back(static_cast<double>(p.inner_loops));
      s.x.push_back(static_cast<double>(p.size));
      s.y.push_back(p.seconds);
    }
    chart.add(std::move(s));
    for (const auto& n : r.notices) warn(n);
    std::cout << to_string(r.method) << ": exponent = "
              << (r.scaling_exponent ? cell(*r.scaling_exponent) : std::string("n/a (needs 4 sizes)")) << '\n';
  }
  table.add_text("method", col_method);
  table.add("N_s", col_n);
  table.add("seconds", col_sec);
  table.add("repeats", col_rep);
  table.add("inner_loops", col_inner);
  table.write(dir.file("bench.csv"));
  write_json(Json{{"environment", environment_descriptor()}, {"reports", reports}}, dir.file("bench.json"));
  chart.write(dir.file("bench.svg"));
  dir.finish();
}

// ------------------------------------------------------------------ main

const std::map<std::string, std::string> kHints = {
    {"analyze",
     "check that the stream holds both Id- and X-like sequences and that the two readout clusters are "
     "resolved; try --discriminator cdf for strongly overlapping clusters"},
    {"rabi", "check that the sweep drives the qubit and that calibration sequences are present"},
    {"rb", "check that the stream holds calibration sequences and enough shots per Clifford length"},
    {"bench", "use sizes of at least two points"},
    {"simulate", "check the centroids and noise width in the configuration"},
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Restless single-shot readout: simulation, analysis and benchmarks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate a shot stream with ground-truth states");
  c_sim->add_option("--config", sim.config, "simulation config (JSON)")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--meta", sim.meta, "sequence metadata (JSON)")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out, "output directory")->required();
  c_sim->add_option("--reps", sim.reps, "repetitions N_s (overrides the config)");
  c_sim->add_option("--format", sim.format, "stream format")->check(CLI::IsMember({"csv", "bin"}));
  c_sim->add_option("--mode", sim.mode, "acquisition mode override")->check(CLI::IsMember({"standard", "restless"}));

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Axis, labels and signals of a stream");
  c_an->add_option("--stream", an.stream, "shot stream (.csv or .bin)")->required()->check(CLI::ExistingFile);
  c_an->add_option("--meta", an.meta, "sequence metadata (JSON)")->required()->check(CLI::ExistingFile);
  c_an->add_option("--out", an.out, "output directory")->required();
  c_an->add_option("--standard", an.standard, "standard-mode twin stream for comparison")
      ->check(CLI::ExistingFile);
  c_an->add_option("--discriminator", an.discriminator, "threshold rule")
      ->check(CLI::IsMember({"quantile", "cdf"}));
  c_an->add_option("--confidence", an.confidence, "interval confidence")->check(CLI::Range(0.0, 1.0));
  c_an->add_flag("--dprime", an.dprime, "also compute the <d'> signal");
  c_an->add_flag("--postselect", an.postselect, "conditioned signals s_A, s_B");
  c_an->add_flag("--spam", an.spam, "readout fidelity table and SPAM-corrected signals");
  c_an->add_flag("--axis-diagnostics", an.axis_diagnostics, "axis candidates and difference density");

  RabiArgs rb_rabi;
  auto* c_rabi = app.add_subcommand("rabi", "Fit Rabi oscillations");
  c_rabi->add_option("--stream", rb_rabi.stream, "shot stream")->required()->check(CLI::ExistingFile);
  c_rabi->add_option("--meta", rb_rabi.meta, "metadata carrying the drive amplitudes")
      ->required()
      ->check(CLI::ExistingFile);
  c_rabi->add_option("--out", rb_rabi.out, "output directory")->required();
  c_rabi->add_flag("--naive", rb_rabi.naive, "also fit plain averages of the restless shots");

  RbArgs rb;
  std::uint64_t boot_seed = 0;
  auto* c_rb = app.add_subcommand("rb", "Randomized benchmarking error per Clifford");
  c_rb->add_option("--config", rb.config, "RB config: 'sim' + 'layout' or 'survival'")->check(CLI::ExistingFile);
  c_rb->add_option("--stream", rb.stream, "restless RB stream")->check(CLI::ExistingFile);
  c_rb->add_option("--meta", rb.meta, "metadata for --stream")->check(CLI::ExistingFile);
  c_rb->add_option("--survival", rb.survival, "survival CSV: header of lengths, one curve per row")
      ->check(CLI::ExistingFile);
  c_rb->add_option("--out", rb.out, "output directory")->required();
  c_rb->add_option("--dimension", rb.dimension, "Hilbert space dimension")->check(CLI::IsMember({2, 4}));
  c_rb->add_flag("--postselect", rb.postselect, "keep shots whose predecessor is in the ground state");
  c_rb->add_option("--subset", rb.subset, "curves per bootstrap resample (default half)");
  c_rb->add_option("--resamples", rb.resamples, "bootstrap resamples");
  auto* opt_boot = c_rb->add_option("--bootstrap-seed", boot_seed, "bootstrap seed");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Runtime scaling of labeling methods");
  c_bench->add_option("--config", bench.config, "bench config (JSON)")->check(CLI::ExistingFile);
  auto* opt_sizes = c_bench->add_option("--sizes", bench.sizes, "point counts")->delimiter(',');
  auto* opt_methods =
      c_bench->add_option("--methods", bench.methods, "svd_full, kmeans, restless_analysis")->delimiter(',');
  c_bench->add_option("--repeats", bench.repeats, "timed repeats per size");
  c_bench->add_option("--seed", bench.seed, "data seed");
  c_bench->add_option("--out", bench.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command = "restless";
  try {
    if (*c_sim) {
      command = "simulate";
      cmd_simulate(sim, args);
    } else if (*c_an) {
      command = "analyze";
      cmd_analyze(an, args);
    } else if (*c_rabi) {
      command = "rabi";
      cmd_rabi(rb_rabi, args);
    } else if (*c_rb) {
      command = "rb";
      if (opt_boot->count()) rb.boot_seed = boot_seed;
      cmd_rb(rb, args);
    } else if (*c_bench) {
      command = "bench";
      cmd_bench(bench, args, opt_sizes->count() > 0, opt_methods->count() > 0);
    }
  } catch (const DegenerateError& e) {
    std::cerr << "error: degenerate data: " << e.what() << "\nhint: " << kHints.at(command) << '\n';
    return 3;
  } catch (const EmptyDataError& e) {
    std::cerr << "error: insufficient data: " << e.what() << "\nhint: " << kHints.at(command) << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
