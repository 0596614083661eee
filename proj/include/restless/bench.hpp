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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "restless/core.hpp"
#include "restless/signals.hpp"

namespace restless {

inline constexpr std::array<IQPoint, 2> kBenchCenters{IQPoint{-0.5, -0.5}, IQPoint{0.5, 0.5}};
inline constexpr double kBenchSigma = 0.2;

/// n/2 points around each center (the first center gets the extra point
/// for odd n), isotropic Gaussian spread. Cluster c occupies the half
/// [c * ceil(n/2), ...).
std::vector<IQPoint> gen_clusters(std::size_t n, std::span<const IQPoint, 2> centers = kBenchCenters,
                                  double sigma = kBenchSigma, std::uint64_t seed = 1);

struct KMeansResult {
  std::vector<std::uint8_t> labels;
  std::array<IQPoint, 2> centroids{};
  std::size_t iterations = 0;
  std::vector<double> inertia;  // within-cluster sum of squares after each iteration
};

/// Lloyd's algorithm with k = 2 from a farthest-pair seed on a subsample.
/// Throws DegenerateError when all points coincide.
KMeansResult kmeans2(std::span<const IQPoint> points, std::uint64_t seed = 1, std::size_t max_iter = 300);

inline constexpr std::size_t kFullSvdLimit = 100000;

/// Principal axis through a full SVD of the centered n x 2 data: Householder
/// QR, a Jacobi rotation on the 2 x 2 factor, and every column of the n x n
/// left basis formed explicitly (quadratic time, linear memory). Refuses
/// n > kFullSvdLimit unless forced.
SignalAxis full_svd_axis(std::span<const IQPoint> points, bool force = false);

enum class BenchMethod { svd_full, kmeans, restless_analysis };

std::string_view to_string(BenchMethod method);
BenchMethod parse_bench_method(std::string_view text);

/// Time-ordered restless Id/X shots with the bench cluster geometry.
ShotStream bench_restless_stream(std::size_t n, std::uint64_t seed);

/// Difference, fold, average, axis, threshold, labels, s_k.
SignalSeries restless_pipeline(const ShotStream& stream);

struct BenchPoint {
  std::size_t size = 0;
  double seconds = 0.0;        // median per call
  std::size_t repeats = 0;
  std::size_t inner_loops = 1;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of ln y on ln x.
LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y);

struct BenchReport {
  BenchMethod method = BenchMethod::kmeans;
  std::vector<BenchPoint> points;
  std::optional<double> scaling_exponent;  // needs at least 4 sizes
  std::optional<double> intercept;
  std::string environment;
  std::vector<std::string> notices;
};

std::string environment_descriptor();

/// Median-of-repeats timing per size after one untimed warm-up call. Short
/// calls are looped so each timed sample lasts at least `min_sample_seconds`.
BenchReport run_scaling(BenchMethod method, std::span<const std::size_t> sizes, std::size_t repeats = 5,
                        std::uint64_t seed = 1, double min_sample_seconds = 0.02);

}  // namespace restless
