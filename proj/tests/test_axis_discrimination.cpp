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


#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "restless/axis.hpp"
#include "restless/discrimination.hpp"
#include "restless/errors.hpp"
#include "restless/simulator.hpp"

using namespace restless;

namespace {

std::vector<IQPoint> line_cloud(double theta, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> along(0.0, 2.0), across(0.0, 0.1);
  std::vector<IQPoint> pts;
  for (std::size_t m = 0; m < n; ++m) {
    const double a = along(rng), c = across(rng);
    pts.push_back({1.0 + a * std::cos(theta) - c * std::sin(theta), -2.0 + a * std::sin(theta) + c * std::cos(theta)});
  }
  return pts;
}

}  // namespace

TEST_CASE("principal axis of an elongated cloud") {
  for (double theta : {0.0, 0.4, 1.3, 2.5}) {
    const auto pts = line_cloud(theta, 4000, 3);
    CHECK(axis_angle_distance(principal_axis_angle(pts), theta) < 0.01);
  }
  const std::vector<IQPoint> same(5, IQPoint{1, 1});
  CHECK_THROWS_AS(principal_axis_angle(same), DegenerateError);
}

TEST_CASE("moments of a known set") {
  const std::vector<IQPoint> pts{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  const auto m = moments(pts);
  CHECK(m.mean == IQPoint{1, 1});
  CHECK(m.c_ii == doctest::Approx(1.0));
  CHECK(m.c_qq == doctest::Approx(1.0));
  CHECK(m.c_iq == doctest::Approx(0.0));
}

TEST_CASE("difference points and folding") {
  const std::vector<IQPoint> pts{{0, 0}, {1, -2}, {-1, 1}, {-1, 1}};
  const ShotStream s(pts, 2, 2, 1e5, AcquisitionMode::restless);
  const auto d = difference_points(s);
  REQUIRE(d.diffs.size() == 3);
  CHECK(d.diffs[0] == IQPoint{1, -2});
  CHECK(d.folded[1] == IQPoint{2, 3});
  CHECK(d.folded[2] == IQPoint{0, 0});
  CHECK(d.j_of(0) == 2);
  const auto avg = folded_averages(s);
  // Sequence 1 collects j = 3 only; sequence 2 collects j = 2 and j = 4.
  CHECK(avg[0] == IQPoint{2, 3});
  CHECK(avg[1] == IQPoint{0.5, 1.0});
}

TEST_CASE("fold is idempotent and ignores signs") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int n = 0; n < 1000; ++n) {
    const IQPoint d{g(rng), g(rng)};
    CHECK(fold(fold(d)) == fold(d));
    CHECK(fold(-1.0 * d) == fold(d));
    CHECK(fold({-d.i_val, d.q_val}) == fold(d));
  }
}

TEST_CASE("restless axis recovers the centroid direction") {
  SimConfig cfg;
  cfg.seed = 12;
  const auto meta = id_x_meta(5, 5, 1.0);
  const auto run = simulate_restless(cfg, meta, 2000);
  const auto res = restless_axis(run.stream);
  const IQPoint sep = cfg.centroid_1 - cfg.centroid_0;
  const double truth = normalize_axis_angle(std::atan2(sep.q_val, sep.i_val));
  CHECK(axis_angle_distance(res.axis.theta, truth) < 0.02);
  // The rejected branch is the mirror image.
  const double to_a = axis_angle_distance(res.diagnostics.theta_d, res.axis.theta);
  const double to_b = axis_angle_distance(std::numbers::pi - res.diagnostics.theta_d, res.axis.theta);
  CHECK(std::min(to_a, to_b) < 1e-12);
  CHECK(res.diagnostics.num_sequences == 10);
}

TEST_CASE("restless axis needs distinguishable sequences") {
  const std::vector<IQPoint> pts(300, IQPoint{0.2, -0.4});
  const ShotStream frozen(pts, 3, 100, 1e5, AcquisitionMode::restless);
  CHECK_THROWS_AS(restless_axis(frozen), DegenerateError);
}

TEST_CASE("quantile threshold against a sorted-copy oracle") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (std::size_t n : {100u, 101u, 997u, 5000u}) {
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng) + ((rng() & 1) ? 4.0 : 0.0);
    const auto est = quantile_threshold(v);
    const double expect = 0.5 * (oracle::quantile(v, 0.01) + oracle::quantile(v, 0.99));
    CHECK(est.threshold == doctest::Approx(expect).epsilon(1e-14));
    CHECK_FALSE(est.zero_separation);
  }
  std::vector<double> few(99, 1.0);
  CHECK_THROWS_AS(quantile_threshold(few), EmptyDataError);
  std::vector<double> flat(200, 1.0);
  CHECK(quantile_threshold(flat).zero_separation);
}

TEST_CASE("empirical quantile interpolates between order statistics") {
  std::vector<double> v{4, 1, 3, 2};
  CHECK(empirical_quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(empirical_quantile(v, 0.0) == 1.0);
  CHECK(empirical_quantile(v, 1.0) == 4.0);
  CHECK_THROWS_AS(empirical_quantile(v, 1.5), DomainError);
}

TEST_CASE("CDF threshold sits in the maximal-separation run") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> id(800), x(700);
  for (auto& v : id) v = g(rng);
  for (auto& v : x) v = 2.0 + g(rng);
  const auto t = cdf_max_separation_threshold(id, x);
  CHECK(t.max_separation == doctest::Approx(oracle::max_cdf_gap(id, x)).epsilon(1e-12));
  // The threshold itself achieves the maximal gap.
  auto frac = [](const std::vector<double>& s, double c) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= c; })) /
           static_cast<double>(s.size());
  };
  CHECK(std::abs(frac(id, t.threshold) - frac(x, t.threshold)) == doctest::Approx(t.max_separation));

  const std::vector<double> same{1, 2, 3};
  const auto z = cdf_max_separation_threshold(same, same);
  CHECK(z.zero_separation);
  CHECK(z.threshold == doctest::Approx(2.0));
}

TEST_CASE("labels follow the <= threshold rule and swap cleanly") {
  const std::vector<IQPoint> pts{{-1, 0}, {0, 0}, {1, 0}, {2, 0}};
  const ShotStream s(pts, 2, 2, 1e5, AcquisitionMode::restless);
  Discriminator d;
  d.axis.theta = 0.0;
  d.threshold = 0.0;
  const auto lab = label_shots(s, d);
  CHECK(lab.labels == std::vector<Label>{Label::A, Label::A, Label::B, Label::B});
  const auto sw = swap_labels(lab);
  CHECK(sw.swapped);
  CHECK(sw.labels == std::vector<Label>{Label::B, Label::B, Label::A, Label::A});
  CHECK(swap_labels(sw).labels == lab.labels);
  CHECK_FALSE(swap_labels(sw).swapped);
}

TEST_CASE("well separated noiseless-label stream is labeled consistently with the truth") {
  SimConfig cfg;
  cfg.seed = 3;
  const auto meta = id_x_meta(4, 4, 0.8);
  const auto run = simulate_restless(cfg, meta, 500);
  const auto axis = restless_axis(run.stream);
  const auto lab = label_shots(run.stream, train_quantile_discriminator(run.stream, axis.axis));
  std::size_t agree = 0;
  for (std::size_t n = 0; n < lab.size(); ++n) agree += (lab.labels[n] == Label::A) == (run.truth.states[n] == 0);
  const double frac = static_cast<double>(agree) / static_cast<double>(lab.size());
  CHECK((frac > 0.999 || frac < 0.001));
  const auto cdf = train_cdf_discriminator(run.stream, axis.axis, meta);
  CHECK(cdf.method == DiscriminationMethod::cdf_max_separation);
}
