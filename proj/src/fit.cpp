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

#include "restless/fit.hpp"

#include <algorithm>
#include <cmath>

#include "restless/errors.hpp"

namespace restless {

std::size_t FitResult::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown fit parameter '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

void FitProblem::jacobian(std::span<const double> params, Eigen::MatrixXd& jac) const {
  const std::size_t m = num_params();
  const std::size_t n = num_points();
  jac.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  std::vector<double> theta(params.begin(), params.end());
  std::vector<double> plus(n), minus(n);
  for (std::size_t p = 0; p < m; ++p) {
    const double h = 6e-6 * std::max(std::abs(theta[p]), 1.0);
    const double saved = theta[p];
    theta[p] = saved + h;
    predict(theta, plus);
    theta[p] = saved - h;
    predict(theta, minus);
    theta[p] = saved;
    for (std::size_t i = 0; i < n; ++i) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = (plus[i] - minus[i]) / (2.0 * h);
    }
  }
}

void FitProblem::project(std::span<double> params) const {
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (p < lower.size()) params[p] = std::max(params[p], lower[p]);
    if (p < upper.size()) params[p] = std::min(params[p], upper[p]);
  }
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double weighted_cost(const FitProblem& problem, std::span<const double> theta, std::span<const double> y,
                     std::span<const double> w, std::vector<double>& pred) {
  problem.predict(theta, pred);
  double cost = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - pred[i];
    cost += w[i] * r * r;
  }
  return cost;
}

void fill_uncertainty(const MatrixXd& normal, const FitOptions& options, FitResult& out) {
  const Index m = normal.rows();
  VectorXd scale(m);
  for (Index p = 0; p < m; ++p) scale(p) = std::sqrt(std::max(normal(p, p), 0.0));
  std::vector<bool> unidentified(static_cast<std::size_t>(m), false);
  MatrixXd scaled = MatrixXd::Identity(m, m);
  for (Index p = 0; p < m; ++p) {
    if (scale(p) == 0.0) {
      unidentified[static_cast<std::size_t>(p)] = true;
      continue;
    }
    for (Index q = 0; q < m; ++q) {
      if (scale(q) > 0.0) scaled(p, q) = normal(p, q) / (scale(p) * scale(q));
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(scaled);
  const VectorXd& lambda = eig.eigenvalues();
  const double top = lambda.maxCoeff();
  MatrixXd pinv = MatrixXd::Zero(m, m);
  for (Index e = 0; e < m; ++e) {
    const VectorXd v = eig.eigenvectors().col(e);
    if (lambda(e) <= options.rank_tolerance * top) {
      for (Index p = 0; p < m; ++p) {
        if (std::abs(v(p)) > 1e-6) unidentified[static_cast<std::size_t>(p)] = true;
      }
      continue;
    }
    pinv += v * v.transpose() / lambda(e);
  }
  out.covariance.assign(static_cast<std::size_t>(m * m), 0.0);
  out.std_errors.assign(static_cast<std::size_t>(m), 0.0);
  for (Index p = 0; p < m; ++p) {
    for (Index q = 0; q < m; ++q) {
      const bool known = scale(p) > 0.0 && scale(q) > 0.0;
      out.covariance[static_cast<std::size_t>(p * m + q)] =
          known ? pinv(p, q) / (scale(p) * scale(q)) : 0.0;
    }
    const auto ps = static_cast<std::size_t>(p);
    out.std_errors[ps] = unidentified[ps] ? std::numeric_limits<double>::infinity()
                                          : std::sqrt(std::max(0.0, out.covariance[ps * m + ps]));
  }
  const bool any = std::find(unidentified.begin(), unidentified.end(), true) != unidentified.end();
  if (any) {
    out.ill_conditioned = true;
    std::string which;
    for (std::size_t p = 0; p < unidentified.size(); ++p) {
      if (unidentified[p]) which += (which.empty() ? "" : ", ") + out.names[p];
    }
    out.warnings.push_back("normal matrix is rank deficient; not identifiable from the data: " + which);
  }
}

}  // namespace

FitResult levenberg_marquardt(const FitProblem& problem, std::span<const double> y,
                              std::span<const double> weights, std::span<const double> init,
                              const FitOptions& options) {
  const std::size_t m = problem.num_params();
  const std::size_t n = problem.num_points();
  if (init.size() != m) throw ConfigError("initial guess has the wrong number of parameters");
  if (y.size() != n || weights.size() != n) throw ConfigError("data and weights must match the model size");
  if (n < m) throw ConfigError("fewer data points than parameters");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) throw DomainError("non-finite data point at index " + std::to_string(i));
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw DomainError("weights must be finite and non-negative");
    }
  }

  FitResult out;
  out.names = problem.param_names();
  std::vector<double> theta(init.begin(), init.end());
  problem.project(theta);
  std::vector<double> pred(n), trial_pred(n), trial(m);
  double cost = weighted_cost(problem, theta, y, weights, pred);
  if (!std::isfinite(cost)) throw DomainError("model is not finite at the initial guess");

  VectorXd sw(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) sw(static_cast<Index>(i)) = std::sqrt(weights[i]);

  double damping = options.initial_damping;
  MatrixXd jac;
  bool converged = false;
  std::size_t iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    if (cost == 0.0) {
      converged = true;
      break;
    }
    problem.jacobian(theta, jac);
    const MatrixXd jw = sw.asDiagonal() * jac;
    VectorXd r(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) r(static_cast<Index>(i)) = sw(static_cast<Index>(i)) * (y[i] - pred[i]);
    const MatrixXd normal = jw.transpose() * jw;
    const VectorXd grad = jw.transpose() * r;
    VectorXd diag = normal.diagonal();
    const double floor = std::max(diag.maxCoeff(), 1e-300) * 1e-12;
    for (Index p = 0; p < diag.size(); ++p) diag(p) = std::max(diag(p), floor);

    const double theta_norm = Eigen::Map<const VectorXd>(theta.data(), static_cast<Index>(m)).norm();
    while (true) {
      auto solve = [&](const std::vector<bool>& frozen) {
        MatrixXd damped = normal;
        damped.diagonal() += damping * diag;
        VectorXd rhs = grad;
        for (std::size_t p = 0; p < m; ++p) {
          if (!frozen[p]) continue;
          const auto ip = static_cast<Index>(p);
          damped.row(ip).setZero();
          damped.col(ip).setZero();
          damped(ip, ip) = 1.0;
          rhs(ip) = 0.0;
        }
        return VectorXd(damped.ldlt().solve(rhs));
      };
      std::vector<bool> frozen(m, false);
      VectorXd delta = solve(frozen);
      if (delta.allFinite()) {
        // Parameters held at an active bound drop out of the step so the
        // remaining ones can move freely along it.
        for (std::size_t p = 0; p < m; ++p) trial[p] = theta[p] + delta(static_cast<Index>(p));
        problem.project(trial);
        bool any = false;
        for (std::size_t p = 0; p < m; ++p) {
          if (delta(static_cast<Index>(p)) != 0.0 && trial[p] == theta[p]) frozen[p] = any = true;
        }
        if (any) delta = solve(frozen);
      }
      if (!delta.allFinite()) {
        damping *= 10.0;
        if (damping > 1e16) {
          converged = true;
          break;
        }
        continue;
      }
      for (std::size_t p = 0; p < m; ++p) trial[p] = theta[p] + delta(static_cast<Index>(p));
      problem.project(trial);
      double step = 0.0;
      for (std::size_t p = 0; p < m; ++p) step += (trial[p] - theta[p]) * (trial[p] - theta[p]);
      step = std::sqrt(step);
      if (step <= options.step_tolerance * (1.0 + theta_norm)) {
        converged = true;
        break;
      }
      const double trial_cost = weighted_cost(problem, trial, y, weights, trial_pred);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
        theta = trial;
        pred.swap(trial_pred);
        cost = trial_cost;
        damping = std::max(damping / 10.0, 1e-12);
        if (rel < options.relative_tolerance || cost == 0.0) converged = true;
        break;
      }
      damping *= 10.0;
      if (damping > 1e16) {
        // No damped step reduces the objective: a numerical minimum.
        converged = true;
        break;
      }
    }
  }

  out.values = theta;
  out.iterations = iter;
  out.converged = converged;
  out.chi_square = cost;
  out.residual_norm = std::sqrt(cost);
  out.dof = n - m;
  if (!converged) out.warnings.push_back("no convergence within " + std::to_string(options.max_iterations) + " iterations");

  problem.jacobian(theta, jac);
  const MatrixXd jw = sw.asDiagonal() * jac;
  fill_uncertainty(jw.transpose() * jw, options, out);

  out.at_bound.assign(m, false);
  for (std::size_t p = 0; p < m; ++p) {
    const double tol = 1e-12 * std::max(1.0, std::abs(theta[p]));
    if (p < problem.lower.size() && std::abs(theta[p] - problem.lower[p]) <= tol) out.at_bound[p] = true;
    if (p < problem.upper.size() && std::abs(theta[p] - problem.upper[p]) <= tol) out.at_bound[p] = true;
  }
  return out;
}

namespace {

class LinearModel final : public CurveModel {
 public:
  std::vector<std::string> param_names() const override { return {"intercept", "slope"}; }
  double value(double x, std::span<const double> t) const override { return t[0] + t[1] * x; }
  void gradient(double x, std::span<const double>, std::span<double> g) const override {
    g[0] = 1.0;
    g[1] = x;
  }
};

class CosineModel final : public CurveModel {
 public:
  std::vector<std::string> param_names() const override { return {"amplitude", "rate", "phase", "offset"}; }
  double value(double x, std::span<const double> t) const override {
    return t[0] * std::cos(t[1] * x + t[2]) + t[3];
  }
  void gradient(double x, std::span<const double> t, std::span<double> g) const override {
    const double arg = t[1] * x + t[2];
    const double s = std::sin(arg);
    g[0] = std::cos(arg);
    g[1] = -t[0] * x * s;
    g[2] = -t[0] * s;
    g[3] = 1.0;
  }
};

class RbDecayModel final : public CurveModel {
 public:
  std::vector<std::string> param_names() const override { return {"asymptote", "start", "alpha"}; }
  double value(double x, std::span<const double> t) const override {
    return t[0] + (t[1] - t[0]) * std::pow(t[2], 0.5 * x);
  }
  void gradient(double x, std::span<const double> t, std::span<double> g) const override {
    const double decay = std::pow(t[2], 0.5 * x);
    g[0] = 1.0 - decay;
    g[1] = decay;
    g[2] = x == 0.0 ? 0.0 : (t[1] - t[0]) * 0.5 * x * std::pow(t[2], 0.5 * x - 1.0);
  }
};

class CurveProblem final : public FitProblem {
 public:
  CurveProblem(const CurveModel& model, std::span<const double> x) : model_(model), x_(x) {}

  std::size_t num_params() const override { return model_.param_names().size(); }
  std::size_t num_points() const override { return x_.size(); }
  std::vector<std::string> param_names() const override { return model_.param_names(); }
  void predict(std::span<const double> params, std::span<double> out) const override {
    for (std::size_t i = 0; i < x_.size(); ++i) out[i] = model_.value(x_[i], params);
  }
  void jacobian(std::span<const double> params, Eigen::MatrixXd& jac) const override {
    const std::size_t m = num_params();
    jac.resize(static_cast<Index>(x_.size()), static_cast<Index>(m));
    std::vector<double> g(m);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      model_.gradient(x_[i], params, g);
      for (std::size_t p = 0; p < m; ++p) jac(static_cast<Index>(i), static_cast<Index>(p)) = g[p];
    }
  }

 private:
  const CurveModel& model_;
  std::span<const double> x_;
};

}  // namespace

std::unique_ptr<CurveModel> make_model(ModelId id) {
  switch (id) {
    case ModelId::linear:
      return std::make_unique<LinearModel>();
    case ModelId::cosine:
      return std::make_unique<CosineModel>();
    case ModelId::rb_decay:
      return std::make_unique<RbDecayModel>();
  }
  throw ConfigError("unknown model id");
}

FitResult fit_curve(const CurveModel& model, std::span<const double> x, std::span<const double> y,
                    std::span<const double> weights, std::span<const double> init, const Bounds& bounds,
                    const FitOptions& options) {
  if (x.size() != y.size() || x.size() != weights.size()) {
    throw ConfigError("x, y and weights must have equal length");
  }
  CurveProblem problem(model, x);
  problem.lower = bounds.lower;
  problem.upper = bounds.upper;
  return levenberg_marquardt(problem, y, weights, init, options);
}

FitResult fit_curve(ModelId id, std::span<const double> x, std::span<const double> y,
                    std::span<const double> weights, std::span<const double> init, const Bounds& bounds,
                    const FitOptions& options) {
  const auto model = make_model(id);
  return fit_curve(*model, x, y, weights, init, bounds, options);
}

}  // namespace restless
