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
#include "restless/characterization.hpp"
#include "restless/discrimination.hpp"
#include "restless/errors.hpp"
#include "restless/fit.hpp"

using namespace restless;

TEST_CASE("weighted straight line matches the closed-form solution") {
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  const std::vector<double> y{0.9, 3.2, 4.8, 7.1, 9.2, 10.8};
  const std::vector<double> w{1, 2, 1, 3, 1, 2};
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  const double slope = (sw * sxy - sx * sy) / det;
  const double intercept = (sxx * sy - sx * sxy) / det;
  const std::vector<double> init{0.0, 0.0};
  const auto fit = fit_curve(ModelId::linear, x, y, w, init);
  REQUIRE(fit.converged);
  CHECK(fit.value("slope") == doctest::Approx(slope).epsilon(1e-9));
  CHECK(fit.value("intercept") == doctest::Approx(intercept).epsilon(1e-9));
  // Covariance of weighted least squares: (X^T W X)^-1.
  CHECK(fit.std_error("slope") == doctest::Approx(std::sqrt(sw / det)).epsilon(1e-6));
  CHECK(fit.dof == 4);
  CHECK_THROWS_AS(fit.value("curvature"), ConfigError);
}

TEST_CASE("curve model gradients agree with central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (ModelId id : {ModelId::linear, ModelId::cosine, ModelId::rb_decay}) {
    const auto model = make_model(id);
    const std::size_t m = model->param_names().size();
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> theta(m);
      for (auto& t : theta) t = 0.2 + 0.7 * u(rng);
      const double x = 1.0 + 20.0 * u(rng);
      std::vector<double> grad(m);
      model->gradient(x, theta, grad);
      for (std::size_t p = 0; p < m; ++p) {
        const auto f = [&](double v) {
          auto t = theta;
          t[p] = v;
          return model->value(x, t);
        };
        CHECK(grad[p] == doctest::Approx(oracle::derivative(f, theta[p])).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("box bounds hold during the fit") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 2, 3, 4};
  const std::vector<double> w(4, 1.0);
  const std::vector<double> init{0.0, 0.0};
  Bounds bounds{{-10.0, -10.0}, {10.0, 0.5}};
  const auto fit = fit_curve(ModelId::linear, x, y, w, init, bounds);
  CHECK(fit.value("slope") == doctest::Approx(0.5));
  CHECK(fit.at_bound[1]);
  CHECK_FALSE(fit.at_bound[0]);
}

TEST_CASE("unidentifiable parameters are reported, not hidden") {
  // y depends on p0 + p1 only.
  class Sum final : public FitProblem {
   public:
    std::size_t num_params() const override { return 2; }
    std::size_t num_points() const override { return 3; }
    std::vector<std::string> param_names() const override { return {"p0", "p1"}; }
    void predict(std::span<const double> p, std::span<double> out) const override {
      for (std::size_t i = 0; i < 3; ++i) out[i] = (p[0] + p[1]) * static_cast<double>(i + 1);
    }
  };
  const std::vector<double> y{2, 4, 6}, w{1, 1, 1}, init{0.3, 0.1};
  const auto fit = levenberg_marquardt(Sum{}, y, w, init);
  CHECK(fit.ill_conditioned);
  CHECK(fit.values[0] + fit.values[1] == doctest::Approx(2.0));
  CHECK(std::isinf(fit.std_errors[0]));
  CHECK_FALSE(fit.warnings.empty());
}

TEST_CASE("fit input validation") {
  const std::vector<double> x{0, 1}, y{0, 1}, w{1, 1}, init{0, 0};
  const std::vector<double> nan_y{0, std::nan("")};
  CHECK_THROWS_AS(fit_curve(ModelId::linear, x, nan_y, w, init), DomainError);
  const std::vector<double> short_x{0};
  CHECK_THROWS_AS(fit_curve(ModelId::linear, short_x, y, w, init), ConfigError);
  const std::vector<double> neg_w{1, -1};
  CHECK_THROWS_AS(fit_curve(ModelId::linear, x, y, neg_w, init), DomainError);
}

TEST_CASE("Rabi fit recovers a noiseless cosine") {
  std::vector<double> amps;
  SignalSeries s;
  for (int n = 0; n < 60; ++n) {
    const double a = -30.0 + n;
    amps.push_back(a);
    s.points.push_back({0.5 - 0.5 * std::cos(0.31 * a), 0.01, 100});
  }
  const auto fit = fit_rabi(amps, s);
  REQUIRE(fit.converged);
  CHECK(fit.value("rate") == doctest::Approx(0.31).epsilon(1e-8));
  CHECK(fit.value("amplitude") == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(std::abs(fit.value("phase")) - std::numbers::pi) < 1e-6);
  CHECK(fit.value("offset") == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(fit.warnings.empty());
}

TEST_CASE("Rabi fit warns when less than one oscillation is covered") {
  std::vector<double> amps;
  SignalSeries s;
  for (int n = 0; n < 20; ++n) {
    const double a = 0.1 * n;
    amps.push_back(a);
    s.points.push_back({0.5 - 0.5 * std::cos(0.5 * a), 0.01, 100});
  }
  const auto fit = fit_rabi(amps, s);
  CHECK_FALSE(fit.warnings.empty());
}

TEST_CASE("RB fit and the EPC conversion") {
  CHECK(epc_from_alpha(0.99, 2) == doctest::Approx(0.005));
  CHECK(epc_from_alpha(0.9, 4) == doctest::Approx(0.075));
  const double alpha = 0.993;
  std::vector<double> len, mean, se;
  for (double L : {5.0, 20.0, 50.0, 100.0, 200.0, 500.0}) {
    len.push_back(L);
    mean.push_back(0.5 + 0.48 * std::pow(alpha, L / 2));
    se.push_back(1e-3);
  }
  const auto fit = fit_rb(len, mean, se, 2);
  REQUIRE(fit.fit.converged);
  CHECK(fit.fit.value("alpha") == doctest::Approx(alpha).epsilon(1e-8));
  CHECK(fit.epc == doctest::Approx(epc_from_alpha(alpha, 2)).epsilon(1e-6));
  CHECK_FALSE(fit.unphysical);
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(fit_rb(two, two, two, 2), ConfigError);
}

TEST_CASE("bootstrap is reproducible and centred on the generator") {
  const std::vector<std::uint32_t> lengths{5, 20, 60, 150, 400};
  const auto curves = simulate_rb_survival(lengths, 60, 0.0036, 2, 2000, 50.0, 3);
  const std::vector<double> len(lengths.begin(), lengths.end());
  const auto a = bootstrap_epc(curves, len, 30, 200, 2, 11);
  const auto b = bootstrap_epc(curves, len, 30, 200, 2, 11);
  CHECK(a.samples == b.samples);
  CHECK(a.resamples == 200);
  CHECK(std::abs(a.mean - 0.0036) < 4 * a.std_dev + 2e-4);
  CHECK_THROWS_AS(bootstrap_epc(curves, len, 61, 10, 2, 1), ConfigError);
}

TEST_CASE("curve averaging with a standard-error floor") {
  const std::vector<std::vector<double>> curves{{1.0, 0.5}, {1.0, 0.7}};
  std::vector<double> m, se;
  average_curves(curves, m, se);
  CHECK(m[0] == 1.0);
  CHECK(se[0] == 1e-6);
  CHECK(m[1] == doctest::Approx(0.6));
  CHECK(se[1] == doctest::Approx(0.1));
}

TEST_CASE("z-test") {
  const auto t = z_test(6.20, 0.35, 5.99, 0.39);
  CHECK(t.z == doctest::Approx(0.21 / std::sqrt(0.35 * 0.35 + 0.39 * 0.39)));
  CHECK(t.confidence_percent == doctest::Approx(100 * std::erfc(std::abs(t.z) / std::sqrt(2.0))));
  const auto r = z_test(5.99, 0.39, 6.20, 0.35);
  CHECK(r.z == doctest::Approx(-t.z));
  CHECK(r.p_value == doctest::Approx(t.p_value));
  CHECK(z_test(1.0, 0.1, 1.0, 0.1).confidence_percent == doctest::Approx(100.0));
  CHECK_THROWS_AS(z_test(1, 0, 2, 0), DomainError);
}

TEST_CASE("restless model fit with a fixed SPAM scale recovers T1 and b") {
  const auto etas = id_x_meta(10, 10, 0.99).etas();
  const PopulationModel truth{50e-6, 0.983, 0.084, 1e5};
  const auto pa = expected_pA(truth, etas, 500, PopulationAlignment::predecessor);
  RestlessModelOptions opts;
  opts.fixed_a = 0.983;
  const auto fit = fit_restless_model(pa, {}, etas, 1e5, 500, opts);
  REQUIRE(fit.fit.converged);
  CHECK(fit.fit.value("T1") == doctest::Approx(50e-6).epsilon(1e-6));
  CHECK(fit.fit.value("b") == doctest::Approx(0.084).epsilon(1e-6));
  CHECK(fit.decay_product == doctest::Approx(truth.a * truth.decay_factor()).epsilon(1e-6));
}

TEST_CASE("the full restless model only identifies a exp(-1/(R T1))") {
  const auto etas = id_x_meta(10, 10, 0.99).etas();
  const PopulationModel truth{50e-6, 0.983, 0.084, 1e5};
  const auto pa = expected_pA(truth, etas, 500, PopulationAlignment::predecessor);
  const auto fit = fit_restless_model(pa, {}, etas, 1e5, 500);
  CHECK(fit.decay_product == doctest::Approx(truth.a * truth.decay_factor()).epsilon(1e-6));
  CHECK(fit.fit.value("b") == doctest::Approx(0.084).epsilon(1e-6));
  const double product = fit.fit.value("a") * std::exp(-1.0 / (1e5 * fit.fit.value("T1")));
  CHECK(product == doctest::Approx(fit.decay_product).epsilon(1e-6));
  CHECK(fit.fit.ill_conditioned);
}

TEST_CASE("restless model gradient matches finite differences of the recursion") {
  const auto etas = id_x_meta(4, 4, 0.9).etas();
  const PopulationModel m{40e-6, 0.95, 0.05, 1e5};
  const auto g = expected_pA_gradient(m, etas, 50);
  const auto base = expected_pA(m, etas, 50, PopulationAlignment::predecessor);
  for (std::size_t k = 0; k < etas.size(); ++k) CHECK(g.values[k] == doctest::Approx(base[k]).epsilon(1e-14));
  for (int p = 0; p < 3; ++p) {
    for (std::size_t k = 0; k < etas.size(); ++k) {
      const auto f = [&](double v) {
        PopulationModel q = m;
        (p == 0 ? q.t1 : p == 1 ? q.a : q.b) = v;
        return expected_pA(q, etas, 50, PopulationAlignment::predecessor)[k];
      };
      const double x0 = p == 0 ? m.t1 : p == 1 ? m.a : m.b;
      const double h = 1e-6 * std::abs(x0);
      CHECK(g.jacobian(static_cast<Eigen::Index>(k), p) ==
            doctest::Approx((f(x0 + h) - f(x0 - h)) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("ground label comes from the better readout fidelity") {
  FidelityReport r;
  r.fidelity_a_interval = {0.97, 0.99};
  r.fidelity_b_interval = {0.80, 0.85};
  CHECK(identify_ground_label(r) == Label::A);
  std::swap(r.fidelity_a_interval, r.fidelity_b_interval);
  CHECK(identify_ground_label(r) == Label::B);
  r.fidelity_a_interval = {0.80, 0.90};
  r.fidelity_b_interval = {0.85, 0.95};
  CHECK_THROWS_AS(identify_ground_label(r), AmbiguityError);
}

TEST_CASE("RB post-selection keeps ground-predecessor shots") {
  RbLayout layout;
  layout.lengths = {1, 5, 20};
  layout.num_sequences = 6;
  layout.concentration = std::numeric_limits<double>::infinity();
  const auto meta = rb_meta(layout);
  SimConfig cfg;
  cfg.repetition_rate = 50e3;
  cfg.seed = 4;
  const auto run = simulate_restless(cfg, meta, 400);
  SignalAxis axis;
  const IQPoint sep = cfg.centroid_1 - cfg.centroid_0;
  axis.theta = normalize_axis_angle(std::atan2(sep.q_val, sep.i_val));
  axis.origin = 0.5 * (cfg.centroid_0 + cfg.centroid_1);
  Discriminator d;
  d.axis = axis;
  const auto l = label_shots(run.stream, d);
  const auto curves = rb_postselect(l, meta, Label::A);
  // Calibration sequences do not enter the curves.
  std::size_t ground_pred = 0, clifford = 0;
  for (std::size_t n = 1; n < l.size(); ++n) {
    if (meta.at(l.sequence_of(n)).tag != GateTag::Clifford) continue;
    ++clifford;
    ground_pred += l.labels[n - 1] == Label::A;
  }
  CHECK(curves.retained_fraction == doctest::Approx(static_cast<double>(ground_pred) / clifford));
  REQUIRE(curves.survival.size() == 6);
  CHECK(curves.lengths == std::vector<double>{1, 5, 20});
  for (const auto& c : curves.survival) CHECK(c[0] > 0.9);
  const auto all = rb_all_shots(l, meta);
  CHECK(all.retained_fraction == 1.0);
}
