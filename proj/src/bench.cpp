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

#include "restless/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "restless/axis.hpp"
#include "restless/discrimination.hpp"
#include "restless/errors.hpp"
#include "restless/simulator.hpp"

namespace restless {

namespace {

// Keeps benchmarked results observable.
volatile double g_sink = 0.0;

double squared_distance(IQPoint a, IQPoint b) {
  const IQPoint d = a - b;
  return d.i_val * d.i_val + d.q_val * d.q_val;
}

}  // namespace

std::vector<IQPoint> gen_clusters(std::size_t n, std::span<const IQPoint, 2> centers, double sigma,
                                  std::uint64_t seed) {
  if (n < 2) throw ConfigError("gen_clusters needs at least 2 points");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<IQPoint> out;
  out.reserve(n);
  const std::size_t first = (n + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const IQPoint& c = centers[i < first ? 0 : 1];
    const double di = noise(rng);
    const double dq = noise(rng);
    out.push_back({c.i_val + di, c.q_val + dq});
  }
  return out;
}

KMeansResult kmeans2(std::span<const IQPoint> points, std::uint64_t seed, std::size_t max_iter) {
  if (points.size() < 2) throw DegenerateError("k-means needs at least two points");
  std::mt19937_64 rng(seed);
  constexpr std::size_t kSubsample = 1024;
  std::vector<std::size_t> sample;
  if (points.size() <= kSubsample) {
    sample.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) sample[i] = i;
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    sample.resize(kSubsample);
    for (auto& s : sample) s = pick(rng);
  }
  auto farthest_from = [&](IQPoint ref, std::span<const std::size_t> idx) {
    std::size_t best = idx[0];
    double best_d = -1.0;
    for (auto i : idx) {
      const double d = squared_distance(points[i], ref);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  const std::size_t b = farthest_from(points[sample[0]], sample);
  std::size_t c = farthest_from(points[b], sample);
  if (points[c] == points[b]) {
    std::vector<std::size_t> all(points.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    c = farthest_from(points[b], all);
    if (points[c] == points[b]) throw DegenerateError("all points coincide; k-means is undefined");
  }

  KMeansResult out;
  out.centroids = {points[b], points[c]};
  out.labels.assign(points.size(), 0);
  bool first = true;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::size_t changes = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::uint8_t label =
          squared_distance(points[i], out.centroids[1]) < squared_distance(points[i], out.centroids[0]) ? 1 : 0;
      if (label != out.labels[i]) ++changes;
      out.labels[i] = label;
    }
    if (!first && changes == 0) break;
    first = false;
    std::array<IQPoint, 2> sum{};
    std::array<std::size_t, 2> count{};
    for (std::size_t i = 0; i < points.size(); ++i) {
      sum[out.labels[i]] = sum[out.labels[i]] + points[i];
      ++count[out.labels[i]];
    }
    for (int c2 = 0; c2 < 2; ++c2) {
      if (count[c2] > 0) {
        out.centroids[c2] = (1.0 / static_cast<double>(count[c2])) * sum[c2];
        continue;
      }
      // Empty cluster: move it onto the point worst served by the other one.
      const int o = 1 - c2;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = squared_distance(points[i], out.centroids[o]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      out.centroids[c2] = points[far];
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      inertia += std::min(squared_distance(points[i], out.centroids[0]),
                          squared_distance(points[i], out.centroids[1]));
    }
    out.inertia.push_back(inertia);
    out.iterations = iter + 1;
  }
  return out;
}

SignalAxis full_svd_axis(std::span<const IQPoint> points, bool force) {
  const std::size_t n = points.size();
  if (n < 2) throw DegenerateError("axis needs at least two points");
  if (n > kFullSvdLimit && !force) {
    throw ConfigError("full SVD of " + std::to_string(n) + " points needs " + std::to_string(n) +
                      "^2 work; pass force to run it anyway");
  }
  IQPoint mean{};
  for (const auto& p : points) mean = mean + p;
  mean = (1.0 / static_cast<double>(n)) * mean;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = points[i].i_val - mean.i_val;
    y[i] = points[i].q_val - mean.q_val;
  }

  // First reflector zeroes x below row 0.
  auto norm_of = [](std::span<const double> v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
  };
  std::vector<double> v1 = x;
  const double nx = norm_of(x);
  double beta1 = 0.0;
  double r00 = 0.0;
  if (nx > 0.0) {
    const double sgn = x[0] >= 0.0 ? 1.0 : -1.0;
    v1[0] += sgn * nx;
    beta1 = 2.0 / std::inner_product(v1.begin(), v1.end(), v1.begin(), 0.0);
    r00 = -sgn * nx;
    const double proj = beta1 * std::inner_product(v1.begin(), v1.end(), y.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i] -= proj * v1[i];
  } else {
    std::fill(v1.begin(), v1.end(), 0.0);
  }
  const double r01 = y[0];
  // Second reflector acts on rows 1..n-1.
  std::vector<double> v2(n, 0.0);
  const double ny = norm_of(std::span<const double>(y).subspan(1));
  double beta2 = 0.0;
  double r11 = 0.0;
  if (ny > 0.0) {
    const double sgn = y[1] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i < n; ++i) v2[i] = y[i];
    v2[1] += sgn * ny;
    beta2 = 2.0 / std::inner_product(v2.begin(), v2.end(), v2.begin(), 0.0);
    r11 = -sgn * ny;
  }
  if (r00 == 0.0 && r01 == 0.0 && r11 == 0.0) throw DegenerateError("all points coincide; no axis defined");

  // One Jacobi rotation diagonalizes R^T R; its leading eigenvector is the
  // first right singular vector.
  const double a = r00 * r00;
  const double b = r00 * r01;
  const double c = r01 * r01 + r11 * r11;
  const double theta = normalize_axis_angle(0.5 * std::atan2(2.0 * b, a - c));

  // Left basis Q e_i = e_i - beta2 v2_i v2 - beta1 (v1_i - beta2 v2_i <v1, v2>) v1,
  // formed column by column.
  const double c12 = std::inner_product(v1.begin(), v1.end(), v2.begin(), 0.0);
  std::vector<double> column(n);
  double checksum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = beta2 * v2[i];
    const double w1 = beta1 * (v1[i] - w2 * c12);
    double sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double e = -w2 * v2[r] - w1 * v1[r];
      column[r] = e;
      sq += e * e;
    }
    column[i] += 1.0;
    sq += 2.0 * (column[i] - 1.0) + 1.0;
    checksum += sq;
  }
  g_sink = checksum;

  SignalAxis axis;
  axis.theta = theta;
  axis.origin = mean;
  return axis;
}

std::string_view to_string(BenchMethod method) {
  switch (method) {
    case BenchMethod::svd_full:
      return "svd_full";
    case BenchMethod::kmeans:
      return "kmeans";
    case BenchMethod::restless_analysis:
      return "restless_analysis";
  }
  return "unknown";
}

BenchMethod parse_bench_method(std::string_view text) {
  if (text == "svd_full") return BenchMethod::svd_full;
  if (text == "kmeans") return BenchMethod::kmeans;
  if (text == "restless_analysis") return BenchMethod::restless_analysis;
  throw ConfigError("unknown benchmark method '" + std::string(text) +
                    "' (expected svd_full, kmeans or restless_analysis)");
}

ShotStream bench_restless_stream(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("restless benchmark stream needs at least 2 shots");
  SimConfig cfg;
  cfg.centroid_0 = kBenchCenters[0];
  cfg.centroid_1 = kBenchCenters[1];
  cfg.iq_sigma = kBenchSigma;
  cfg.seed = seed;
  const auto meta = id_x_meta(1, 1);
  const auto reps = static_cast<std::uint32_t>((n + 1) / 2);
  auto run = simulate_restless(cfg, meta, reps);
  if (run.stream.size() == n) return std::move(run.stream);
  std::vector<IQPoint> pts(run.stream.points().begin(), run.stream.points().begin() + static_cast<std::ptrdiff_t>(n));
  return ShotStream(std::move(pts), 2, reps, cfg.repetition_rate, AcquisitionMode::restless, true);
}

SignalSeries restless_pipeline(const ShotStream& stream) {
  const auto axis = restless_axis(stream);
  const auto disc = train_quantile_discriminator(stream, axis.axis);
  return restless_signal(label_shots(stream, disc));
}

LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw EmptyDataError("log-log fit needs at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("log-log fit needs positive values");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DegenerateError("log-log fit needs distinct sizes");
  LogLogFit out;
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

std::string environment_descriptor() {
  std::string s;
#if defined(__clang__)
  s += "clang " __clang_version__;
#elif defined(__GNUC__)
  s += "gcc " __VERSION__;
#else
  s += "unknown compiler";
#endif
#ifdef NDEBUG
  s += ", optimized";
#else
  s += ", debug";
#endif
  s += ", " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads, single-threaded run";
  return s;
}

constexpr std::size_t kPoolPoints = 4000000;  // input points kept per size

BenchReport run_scaling(BenchMethod method, std::span<const std::size_t> sizes, std::size_t repeats,
                        std::uint64_t seed, double min_sample_seconds) {
  if (repeats == 0) throw ConfigError("need at least one repeat");
  using clock = std::chrono::steady_clock;
  BenchReport report;
  report.method = method;
  report.environment = environment_descriptor();

  for (std::size_t n : sizes) {
    if (method == BenchMethod::svd_full && n > kFullSvdLimit) {
      report.notices.push_back("skipped svd_full at " + std::to_string(n) + " points (memory/time guard)");
      continue;
    }
    // Timed loops cycle through distinct inputs so that small sizes are not
    // flattered by the branch predictor learning one repeated data set.
    std::vector<std::vector<IQPoint>> point_pool;
    std::vector<ShotStream> stream_pool;
    auto add_instance = [&] {
      const std::uint64_t s = seed + point_pool.size() + stream_pool.size();
      if (method == BenchMethod::restless_analysis) {
        stream_pool.push_back(bench_restless_stream(n, s));
      } else {
        point_pool.push_back(gen_clusters(n, kBenchCenters, kBenchSigma, s));
      }
    };
    auto pool_size = [&] { return point_pool.size() + stream_pool.size(); };
    auto call = [&](std::size_t l) {
      const std::size_t i = l % pool_size();
      switch (method) {
        case BenchMethod::svd_full:
          g_sink = full_svd_axis(point_pool[i]).theta;
          break;
        case BenchMethod::kmeans:
          g_sink = kmeans2(point_pool[i], seed).centroids[0].i_val;
          break;
        case BenchMethod::restless_analysis:
          g_sink = restless_pipeline(stream_pool[i]).points[0].value.value_or(0.0);
          break;
      }
    };
    add_instance();
    call(0);  // warm-up
    const auto t0 = clock::now();
    call(0);
    const double single = std::chrono::duration<double>(clock::now() - t0).count();
    if (!(single > 0.0)) {
      report.notices.push_back("timer resolution too coarse at " + std::to_string(n) + " points; skipped");
      continue;
    }
    const auto inner = static_cast<std::size_t>(std::max(1.0, std::ceil(min_sample_seconds / single)));
    const std::size_t wanted = std::min(inner, std::max<std::size_t>(1, kPoolPoints / n));
    while (pool_size() < wanted) add_instance();
    std::vector<double> samples;
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto start = clock::now();
      for (std::size_t l = 0; l < inner; ++l) call(l);
      samples.push_back(std::chrono::duration<double>(clock::now() - start).count() / static_cast<double>(inner));
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t mid = samples.size() / 2;
    const double median = samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
    report.points.push_back({n, median, repeats, inner});
  }

  if (report.points.size() >= 4) {
    std::vector<double> xs, ys;
    for (const auto& p : report.points) {
      xs.push_back(static_cast<double>(p.size));
      ys.push_back(p.seconds);
    }
    const auto fit = loglog_fit(xs, ys);
    report.scaling_exponent = fit.slope;
    report.intercept = fit.intercept;
  } else {
    report.notices.push_back("fewer than 4 timed sizes; no scaling exponent fitted");
  }
  return report;
}

}  // namespace restless
