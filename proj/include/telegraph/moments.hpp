// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form moments of X(t) and the increment-variance function used by the
// moment estimators. Every cosh/sinh/Bessel product is evaluated in
// e^{-lambda t}-scaled form.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "telegraph/simulate.hpp"
#include "telegraph/specfn.hpp"

namespace telegraph {

struct MomentQuery {
  int p;
  double t;
  ModelParams params;

  void validate() const {
    if (p < 1) throw std::domain_error("MomentQuery: p must be >= 1, got " + std::to_string(p));
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("MomentQuery: t must be positive");
    params.validate();
  }
};

namespace detail {

// Below these lambda*t values the closed forms cancel; a convergent Taylor
// series of the same expression is summed instead.
inline constexpr double kSecondMomentSeriesMax = 0.5;
inline constexpr double kFourthMomentSeriesMax = 1.0;
inline constexpr double kDerivSeriesMax = 0.5;

// sum_{j>=0} 2 (-y)^j / (j+2)!  so that  y - 1 + e^{-y} = (y^2/2) * this.
inline double second_moment_kernel(double y) {
  double term = 1.0;  // (-y)^j * 2/(j+2)!, starts at 2/2! = 1
  double sum = term;
  for (int j = 1; j < 60; ++j) {
    term *= -y / (j + 2);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// e^{-x} x^{-4} { x(x-3)cosh x + (3 + x(x-1)) sinh x } as a positive series:
// the bracket equals sum_{m>=4} b_m x^m with b_m = (m-2)/(m-1)! for even m and
// (m-1)(m-3)/m! for odd m.
inline double fourth_moment_kernel(double x) {
  double fact = 6.0;  // (m-1)! at m = 4
  double xp = 1.0;    // x^{m-4}
  double sum = 0.0;
  for (int m = 4; m < 80; ++m) {
    // fact holds (m-1)!
    const double b = (m % 2 == 0) ? (m - 2) / fact : (m - 1.0) * (m - 3.0) / (fact * m);
    const double term = b * xp;
    sum += term;
    if (term < 1e-17 * sum) break;
    fact *= m;
    xp *= x;
  }
  return std::exp(-x) * sum;
}

// e^{-2x}(1+x) + x - 1 = x^3 * sum_{k>=3} (-2)^{k-1} (k-2)/k! x^{k-3}.
inline double deriv_kernel(double x) {
  double pow2 = 4.0;      // (-2)^{k-1} at k = 3
  double fact = 6.0;      // k!
  double xp = 1.0;
  double sum = 0.0;
  for (int k = 3; k < 80; ++k) {
    const double term = pow2 * (k - 2) / fact * xp;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    pow2 *= -2.0;
    fact *= (k + 1);
    xp *= x;
  }
  return sum;
}

inline double gamma_half_odd(int p) {
  // Gamma((p+1)/2) for the orders with dedicated paths.
  constexpr double sqrt_pi = 1.7724538509055160273;
  switch (p) {
    case 2: return 0.5 * sqrt_pi;
    case 4: return 0.75 * sqrt_pi;
    case 6: return 1.875 * sqrt_pi;
    default: return std::exp(log_gamma(0.5 * (p + 1)));
  }
}

}  // namespace detail

/// E X(t)^2 = (v^2/lambda)(t - (1 - e^{-2 lambda t})/(2 lambda)).
inline double second_moment(double t, const ModelParams& params) {
  if (!(t > 0.0)) throw std::domain_error("second_moment: t must be positive");
  params.validate();
  const double x = params.lambda * t;
  const double v2 = params.v * params.v;
  if (x < detail::kSecondMomentSeriesMax) return v2 * t * t * detail::second_moment_kernel(2.0 * x);
  return (v2 / params.lambda) * (t + std::expm1(-2.0 * x) / (2.0 * params.lambda));
}

/// E X(t)^4 = 3 (v/lambda)^4 e^{-lambda t} { lt(lt-3) cosh(lt) + (3 + lt(lt-1)) sinh(lt) }.
inline double fourth_moment(double t, const ModelParams& params) {
  if (!(t > 0.0)) throw std::domain_error("fourth_moment: t must be positive");
  params.validate();
  const double x = params.lambda * t;
  const double vt = params.v * t;
  if (x < detail::kFourthMomentSeriesMax) return 3.0 * vt * vt * vt * vt * detail::fourth_moment_kernel(x);
  const double e2 = std::exp(-2.0 * x);
  const double c = 0.5 * (1.0 + e2);
  const double s = 0.5 * (1.0 - e2);
  const double r = params.v / params.lambda;
  return 3.0 * r * r * r * r * (x * (x - 3.0) * c + (3.0 + x * (x - 1.0)) * s);
}

/// E X(t)^p from the Bessel representation: zero for odd p, otherwise
/// (vt)^p (2/(lambda t))^{(p-1)/2} Gamma((p+1)/2) e^{-lambda t}[I_{(p+1)/2} + I_{(p-1)/2}](lambda t).
inline double moment_p(const MomentQuery& q) {
  q.validate();
  if (q.p % 2 != 0) return 0.0;
  const double x = q.params.lambda * q.t;
  const double vt = q.params.v * q.t;
  const double bracket = bessel_i_scaled(BesselOrder(q.p + 1), x) + bessel_i_scaled(BesselOrder(q.p - 1), x);
  const double half_pm1 = 0.5 * (q.p - 1);

  const double direct = std::pow(vt, q.p) * std::pow(2.0 / x, half_pm1) * detail::gamma_half_odd(q.p) * bracket;
  if (std::isfinite(direct) && std::fpclassify(direct) == FP_NORMAL) return direct;
  const double log_value = q.p * std::log(vt) + half_pm1 * std::log(2.0 / x) + log_gamma(0.5 * (q.p + 1)) + std::log(bracket);
  return std::exp(log_value);
}

/// Three-term small-t expansion v^p t^p (1 - c1 lambda t + c2 (lambda t)^2), p in {2,4,6}.
inline double moment_expansion(int p, double t, const ModelParams& params) {
  double c1 = 0.0;
  double c2 = 0.0;
  switch (p) {
    case 2: c1 = 2.0 / 3.0; c2 = 1.0 / 3.0; break;
    case 4: c1 = 4.0 / 5.0; c2 = 2.0 / 5.0; break;
    case 6: c1 = 6.0 / 7.0; c2 = 3.0 / 7.0; break;
    default: throw std::domain_error("moment_expansion: p must be 2, 4 or 6, got " + std::to_string(p));
  }
  if (!(t > 0.0)) throw std::domain_error("moment_expansion: t must be positive");
  params.validate();
  const double x = params.lambda * t;
  return std::pow(params.v * t, p) * (1.0 - c1 * x + c2 * x * x);
}

/// f(lambda) = E eta^2 for a grid step delta: the moment condition target.
inline double increment_variance_fn(double lambda, double delta, double v) {
  return second_moment(delta, ModelParams{lambda, v});
}

/// f'(lambda) = -v^2 (e^{-2 lambda delta}(1 + lambda delta) + lambda delta - 1) / lambda^3.
inline double increment_variance_fn_deriv(double lambda, double delta, double v) {
  if (!(lambda > 0.0) || !(delta > 0.0) || !(v > 0.0)) {
    throw std::domain_error("increment_variance_fn_deriv: arguments must be positive");
  }
  const double x = lambda * delta;
  if (x < detail::kDerivSeriesMax) return -v * v * delta * delta * delta * detail::deriv_kernel(x);
  const double h = std::exp(-2.0 * x) * (1.0 + x) + x - 1.0;
  return -v * v * h / (lambda * lambda * lambda);
}

}  // namespace telegraph
