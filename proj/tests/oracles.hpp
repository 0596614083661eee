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

// Reference computations that share no code with the library. Tests compare
// library results against these.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

// Regularized incomplete beta by the modified Lentz continued fraction.
inline double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h;
}

inline double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

inline double beta_quantile(double a, double b, double p) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (beta_cdf(a, b, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::pair<double, double> jeffreys(std::size_t x, std::size_t n, double confidence) {
  const double a = static_cast<double>(x) + 0.5;
  const double b = static_cast<double>(n - x) + 0.5;
  const double tail = 0.5 * (1.0 - confidence);
  const double lo = x == 0 ? 0.0 : beta_quantile(a, b, tail);
  const double hi = x == n ? 1.0 : beta_quantile(a, b, 1.0 - tail);
  return {lo, hi};
}

// Linear-interpolated quantile on a fully sorted copy.
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v[lo];
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

// Closed-form stationary excited population of p' = a[p + eta(1 - 2p)]E + b.
inline double fixed_point(double a, double e, double b, double eta) {
  return (a * eta * e + b) / (1.0 - a * e * (1.0 - 2.0 * eta));
}

// Central-difference derivative with a step scaled to the argument.
inline double derivative(const std::function<double(double)>& f, double x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Brute-force scan of the two empirical CDFs on the pooled sample; returns
// the largest |F_x - F_id| over all cut points.
inline double max_cdf_gap(std::span<const double> id, std::span<const double> x) {
  std::vector<double> pooled(id.begin(), id.end());
  pooled.insert(pooled.end(), x.begin(), x.end());
  double best = 0.0;
  for (double t : pooled) {
    const double fi = static_cast<double>(std::count_if(id.begin(), id.end(), [&](double v) { return v <= t; })) /
                      static_cast<double>(id.size());
    const double fx = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v <= t; })) /
                      static_cast<double>(x.size());
    best = std::max(best, std::abs(fi - fx));
  }
  return best;
}

}  // namespace oracle
