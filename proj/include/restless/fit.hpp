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

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace restless {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> std_errors;  // 1 sigma from (J^T W J)^-1; +inf when unidentifiable
  std::vector<double> covariance;  // row-major, names.size()^2
  std::vector<bool> at_bound;
  double chi_square = 0.0;         // sum w_i r_i^2 at the optimum
  double residual_norm = 0.0;      // sqrt(chi_square)
  std::size_t dof = 0;
  bool converged = false;
  bool ill_conditioned = false;    // rank-deficient normal matrix at the optimum
  std::size_t iterations = 0;
  std::vector<std::string> warnings;

  /// Estimates are usable only from a converged fit.
  bool usable() const { return converged; }
  std::size_t index_of(const std::string& name) const;
  double value(const std::string& name) const { return values[index_of(name)]; }
  double std_error(const std::string& name) const { return std_errors[index_of(name)]; }
};

struct FitOptions {
  std::size_t max_iterations = 500;
  double relative_tolerance = 1e-10;  // on the objective
  double step_tolerance = 1e-12;      // on ||delta|| / (1 + ||theta||)
  double initial_damping = 1e-3;
  /// Smallest eigenvalue ratio of the scaled normal matrix below which the
  /// optimum is reported as rank deficient.
  double rank_tolerance = 1e-10;
};

/// A weighted least-squares problem: predictions for a fixed data set as a
/// function of the parameters.
class FitProblem {
 public:
  virtual ~FitProblem() = default;

  virtual std::size_t num_params() const = 0;
  virtual std::size_t num_points() const = 0;
  virtual std::vector<std::string> param_names() const = 0;
  virtual void predict(std::span<const double> params, std::span<double> out) const = 0;
  /// d prediction_i / d param_p. The default uses central differences.
  virtual void jacobian(std::span<const double> params, Eigen::MatrixXd& jac) const;
  /// Maps a trial point onto the feasible set. The default clamps to box bounds.
  virtual void project(std::span<double> params) const;

  std::vector<double> lower;  // box bounds, default unbounded
  std::vector<double> upper;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling. Minimizes
/// sum_i w_i (y_i - f_i(theta))^2 with accepted steps never increasing the
/// objective.
FitResult levenberg_marquardt(const FitProblem& problem, std::span<const double> y,
                              std::span<const double> weights, std::span<const double> init,
                              const FitOptions& options = {});

/// Scalar model f(x; theta) with an analytic gradient in theta.
class CurveModel {
 public:
  virtual ~CurveModel() = default;
  virtual std::vector<std::string> param_names() const = 0;
  virtual double value(double x, std::span<const double> params) const = 0;
  virtual void gradient(double x, std::span<const double> params, std::span<double> out) const = 0;
};

enum class ModelId { linear, cosine, rb_decay };

/// linear:   intercept + slope x
/// cosine:   amplitude cos(rate x + phase) + offset
/// rb_decay: asymptote + (start - asymptote) alpha^(x/2)
std::unique_ptr<CurveModel> make_model(ModelId id);

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Fits a curve model to (x, y) with weights w. Requires equal lengths of at
/// least the parameter count.
FitResult fit_curve(const CurveModel& model, std::span<const double> x, std::span<const double> y,
                    std::span<const double> weights, std::span<const double> init,
                    const Bounds& bounds = {}, const FitOptions& options = {});

FitResult fit_curve(ModelId id, std::span<const double> x, std::span<const double> y,
                    std::span<const double> weights, std::span<const double> init,
                    const Bounds& bounds = {}, const FitOptions& options = {});

}  // namespace restless
