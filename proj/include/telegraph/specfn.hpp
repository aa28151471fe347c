// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Special functions: log-Gamma and exponentially scaled modified Bessel
// functions of the first kind, e^{-x} I_nu(x), for integer and half-integer
// nonnegative orders.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace telegraph {

/// Order nu of a modified Bessel function, stored as 2*nu so that
/// half-integers are exact.
class BesselOrder {
 public:
  constexpr explicit BesselOrder(int twice_nu) : twice_nu_(twice_nu) {
    if (twice_nu < 0) throw std::domain_error("BesselOrder: negative order");
  }
  static constexpr BesselOrder integer(int nu) { return BesselOrder(2 * nu); }
  static constexpr BesselOrder half(int twice_nu) { return BesselOrder(twice_nu); }

  constexpr int twice_nu() const { return twice_nu_; }
  constexpr double value() const { return 0.5 * twice_nu_; }
  constexpr bool is_half_integer() const { return twice_nu_ % 2 == 1; }

  friend constexpr bool operator==(BesselOrder, BesselOrder) = default;

 private:
  int twice_nu_;
};

inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive, got " + std::to_string(x));
  }
  return std::lgamma(x);
}

namespace detail {

inline constexpr double kSeriesRelTol = 1e-17;
inline constexpr int kSeriesMaxTerms = 500;

// e^{-x} I_nu(x) from the ascending series, all terms positive.
inline double bessel_i_scaled_series(double nu, double x) {
  const double half_x = 0.5 * x;
  double term = std::exp(-x + nu * std::log(half_x) - std::lgamma(nu + 1.0));
  double sum = term;
  const double q = half_x * half_x;
  for (int k = 1; k < kSeriesMaxTerms; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (term < kSeriesRelTol * sum) break;
  }
  return sum;
}

// Hankel asymptotic expansion of e^{-x} I_nu(x) for large x. Terminates
// exactly for half-integer orders; the e^{-2x} reflected part is dropped.
inline double bessel_i_scaled_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < kSeriesMaxTerms; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    if (term == 0.0) break;
    const double a = std::abs(term);
    if (a > prev_abs) break;  // divergent tail
    sum += term;
    if (a < kSeriesRelTol * std::abs(sum)) break;
    prev_abs = a;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// Closed forms for nu = 1/2, 3/2, 5/2 written with e^{-x}sinh(x) and
// e^{-x}cosh(x); only used where the combination does not cancel.
inline double bessel_i_scaled_half_closed(int twice_nu, double x) {
  const double e2 = std::exp(-2.0 * x);
  const double s = 0.5 * (1.0 - e2);
  const double c = 0.5 * (1.0 + e2);
  const double pref = std::sqrt(2.0 / (std::numbers::pi * x));
  switch (twice_nu) {
    case 1: return pref * s;
    case 3: return pref * (c - s / x);
    case 5: return pref * ((1.0 + 3.0 / (x * x)) * s - 3.0 * c / x);
    default: throw std::logic_error("bessel_i_scaled_half_closed: unsupported order");
  }
}

inline constexpr double kHalfClosedFormMinX = 8.0;

}  // namespace detail

/// Returns e^{-x} I_nu(x) for x >= 0.
///
/// Small and moderate arguments use the ascending series. Large arguments use
/// the sinh/cosh closed forms for nu in {1/2, 3/2, 5/2} and the asymptotic
/// expansion otherwise. The unscaled I_nu(x) is never formed.
inline double bessel_i_scaled(BesselOrder order, double x) {
  if (!(x >= 0.0)) {
    throw std::domain_error("bessel_i_scaled: argument must be nonnegative, got " + std::to_string(x));
  }
  const double nu = order.value();
  if (x == 0.0) return order.twice_nu() == 0 ? 1.0 : 0.0;
  if (std::isinf(x)) return 0.0;

  const int tn = order.twice_nu();
  if (order.is_half_integer() && tn <= 5 && x > detail::kHalfClosedFormMinX) {
    return detail::bessel_i_scaled_half_closed(tn, x);
  }
  const double series_max_x = std::max(30.0, 2.0 * nu * nu);
  if (x <= series_max_x) return detail::bessel_i_scaled_series(nu, x);
  return detail::bessel_i_scaled_asymptotic(nu, x);
}

}  // namespace telegraph
