// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "telegraph/moments.hpp"
#include "telegraph/rng.hpp"

namespace telegraph {
namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

TEST(MomentP, OddOrdersVanish) {
  for (int p = 1; p <= 15; p += 2) {
    for (double t : {0.01, 1.0, 40.0}) EXPECT_EQ(moment_p({p, t, {1.3, 0.8}}), 0.0);
  }
}

TEST(MomentP, MatchesSecondAndFourthMoment) {
  for (double lt : {1e-3, 0.1, 0.4, 0.6, 1.0, 3.0, 10.0, 100.0}) {
    for (double v : {0.5, 1.0, 3.0}) {
      const ModelParams params{2.0, v};
      const double t = lt / params.lambda;
      EXPECT_LT(rel_err(moment_p({2, t, params}), second_moment(t, params)), 1e-10) << lt;
      EXPECT_LT(rel_err(moment_p({4, t, params}), fourth_moment(t, params)), 1e-10) << lt;
    }
  }
}

TEST(MomentP, HigherEvenOrdersPositive) {
  for (int p = 6; p <= 20; p += 2) {
    for (double t : {1e-3, 1.0, 50.0}) {
      const double m = moment_p({p, t, {1.0, 1.0}});
      EXPECT_GT(m, 0.0);
      EXPECT_LE(m, std::pow(t, p) * (1.0 + 1e-12));
    }
  }
}

TEST(SecondMoment, KnownValue) {
  // mpmath: 1 - (1 - exp(-2))/2
  EXPECT_LT(rel_err(second_moment(1.0, {1.0, 1.0}), 0.5676676416183063459), 1e-14);
}

TEST(SecondMoment, Limits) {
  const ModelParams params{1.0, 1.7};
  const double t = 1e6;
  EXPECT_NEAR(second_moment(t, params) / (params.v * params.v * t / params.lambda), 1.0, 1e-5);
  const ModelParams slow{1e-10, 1.7};
  EXPECT_LT(rel_err(second_moment(2.0, slow), 1.7 * 1.7 * 4.0), 1e-8);
}

TEST(SecondMoment, MatchesLongDoubleAroundSeriesSwitch) {
  for (double lt : {0.1, 0.3, 0.4999999, 0.5, 0.5000001, 0.8}) {
    const ModelParams params{1.0, 1.3};
    const long double x = lt;
    const long double want = 1.69L * (x + std::expm1(-2.0L * x) / 2.0L);
    EXPECT_LT(rel_err(second_moment(lt, params), static_cast<double>(want)), 1e-14) << lt;
  }
}

TEST(FourthMoment, KnownValues) {
  // mpmath, closed form at 50 digits
  EXPECT_LT(rel_err(fourth_moment(0.5, {2.0, 1.0}), 0.03031158598283780067), 1e-13);
  EXPECT_LT(rel_err(fourth_moment(1.0, {1.0, 1.0}), 0.4849853757254048108), 1e-13);
  EXPECT_LT(rel_err(moment_p({4, 1.0, {1.0, 1.0}}), 0.4849853757254048108), 1e-13);
}

TEST(FourthMoment, BallisticLimit) {
  EXPECT_LT(rel_err(fourth_moment(2.0, {1e-10, 1.5}), std::pow(3.0, 4)), 1e-8);
}

TEST(MomentExpansion, Coefficients) {
  // Evaluating at lambda*t = 1 and 2 recovers c1 and c2 exactly.
  const ModelParams params{1.0, 1.0};
  auto coeffs = [&](int p) {
    const double a = moment_expansion(p, 1.0, params);  // 1 - c1 + c2
    const double b = moment_expansion(p, 1.0, {2.0, 1.0});  // 1 - 2c1 + 4c2
    const double c2 = (b - 2.0 * a + 1.0) / 2.0;
    const double c1 = 1.0 + c2 - a;
    return std::pair{c1, c2};
  };
  auto [a1, a2] = coeffs(2);
  EXPECT_NEAR(a1, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(a2, 1.0 / 3.0, 1e-15);
  auto [b1, b2] = coeffs(4);
  EXPECT_NEAR(b1, 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(b2, 2.0 / 5.0, 1e-15);
  auto [c1, c2] = coeffs(6);
  EXPECT_NEAR(c1, 6.0 / 7.0, 1e-15);
  EXPECT_NEAR(c2, 3.0 / 7.0, 1e-15);
  EXPECT_THROW(moment_expansion(8, 1.0, params), std::domain_error);
  EXPECT_THROW(moment_expansion(3, 1.0, params), std::domain_error);
}

TEST(MomentExpansion, RemainderIsThirdOrder) {
  const ModelParams params{1.0, 1.0};
  for (int p : {2, 4, 6}) {
    double lo = INFINITY, hi = 0.0;
    for (double t : {1e-2, 1e-3, 1e-4}) {
      const double ratio = std::abs(moment_p({p, t, params}) - moment_expansion(p, t, params)) / std::pow(t, p + 3);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    EXPECT_GT(lo, 0.0) << p;
    EXPECT_LT(hi / lo, 3.0) << p;
  }
}

TEST(IncrementVarianceFn, ValueAndLimits) {
  // mpmath: (1/1)(0.1 - (1 - exp(-0.2))/2)
  EXPECT_LT(rel_err(increment_variance_fn(1.0, 0.1, 1.0), 0.009365376538990929335), 1e-14);
  EXPECT_LT(rel_err(increment_variance_fn(1e-12, 0.1, 2.0), 0.04), 1e-10);
  EXPECT_LT(increment_variance_fn(1e8, 0.1, 2.0), 1e-7);
  EXPECT_GT(increment_variance_fn(1e8, 0.1, 2.0), 0.0);
}

TEST(IncrementVarianceFn, StrictlyDecreasing) {
  double prev = INFINITY;
  for (int i = 0; i <= 200; ++i) {
    const double lambda = 1e-6 * std::pow(10.0, i * 0.06);
    const double f = increment_variance_fn(lambda, 0.01, 1.0);
    EXPECT_LT(f, prev) << lambda;
    prev = f;
  }
}

TEST(IncrementVarianceFnDeriv, MatchesFiniteDifference) {
  const double h = 1e-5;
  const double fd = (increment_variance_fn(1.0 + h, 0.1, 1.0) - increment_variance_fn(1.0 - h, 0.1, 1.0)) / (2.0 * h);
  EXPECT_LT(rel_err(increment_variance_fn_deriv(1.0, 0.1, 1.0), fd), 1e-6);
  for (double lambda : {0.01, 0.3, 2.0, 7.0, 40.0}) {
    const double step = 1e-5 * lambda;
    const double d = (increment_variance_fn(lambda + step, 0.1, 1.4) - increment_variance_fn(lambda - step, 0.1, 1.4)) /
                     (2.0 * step);
    EXPECT_LT(rel_err(increment_variance_fn_deriv(lambda, 0.1, 1.4), d), 1e-6) << lambda;
  }
}

TEST(IncrementVarianceFnDeriv, KnownValueSignAndLimit) {
  // mpmath at 50 digits
  EXPECT_LT(rel_err(increment_variance_fn_deriv(1.0, 0.1, 1.0), -0.0006038283857800445369), 1e-13);
  for (double lambda : {1e-9, 1e-3, 1.0, 1e3}) EXPECT_LT(increment_variance_fn_deriv(lambda, 0.1, 1.0), 0.0);
  const double delta = 0.01, v = 2.0;
  EXPECT_LT(rel_err(increment_variance_fn_deriv(1e-6, delta, v), -(2.0 / 3.0) * v * v * delta * delta * delta), 1e-7);
  const double a = increment_variance_fn_deriv(0.5 / 0.1 * (1.0 - 1e-12), 0.1, 1.0);
  const double b = increment_variance_fn_deriv(0.5 / 0.1, 0.1, 1.0);
  EXPECT_LT(rel_err(a, b), 1e-12);
}

TEST(IntegralIdentities, HoldUnderQuadrature) {
  for (int p : {2, 4, 6}) {
    for (double lt : {0.1, 1.0, 10.0}) {
      const double lambda = 2.0, v = 0.7, t = lt / lambda;
      const double l0 = oracle::identity_i0_lhs_scaled(p, t, lambda, v);
      const double r0 = oracle::identity_i0_rhs_scaled(p, t, lambda, v);
      EXPECT_LT(rel_err(l0, r0), 1e-8) << "p=" << p << " lt=" << lt;
      const double l1 = oracle::identity_i1_lhs_scaled(p, t, lambda, v);
      const double r1 = oracle::identity_i1_rhs_scaled(p, t, lambda, v);
      EXPECT_LT(rel_err(l1, r1), 1e-8) << "p=" << p << " lt=" << lt;
    }
  }
}

TEST(IntegralIdentities, OddOrdersIntegrateToZero) {
  for (int p : {1, 3}) {
    EXPECT_NEAR(oracle::identity_i0_lhs_scaled(p, 1.0, 1.0, 1.0), 0.0, 1e-14);
    EXPECT_NEAR(oracle::identity_i1_lhs_scaled(p, 1.0, 1.0, 1.0), 0.0, 1e-14);
  }
}

TEST(Moments, DomainErrors) {
  EXPECT_THROW(moment_p({0, 1.0, {1.0, 1.0}}), std::domain_error);
  EXPECT_THROW(moment_p({2, 0.0, {1.0, 1.0}}), std::domain_error);
  EXPECT_THROW(moment_p({2, 1.0, {-1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(second_moment(-1.0, {1.0, 1.0}), std::domain_error);
  EXPECT_THROW(fourth_moment(0.0, {1.0, 1.0}), std::domain_error);
  EXPECT_THROW(increment_variance_fn_deriv(0.0, 0.1, 1.0), std::domain_error);
}

TEST(FourthMoment, MonteCarloCheck) {
  const int paths = 10'000'000;
  const ModelParams params{1.0, 1.0};
  double s4 = 0.0, s8 = 0.0;
  for (int r = 0; r < paths; ++r) {
    auto rng = RandomStream::substream(777, r);
    const double x = simulate_path(params, 1.0, rng).position_at(1.0);
    const double x4 = x * x * x * x;
    s4 += x4;
    s8 += x4 * x4;
  }
  const double m4 = s4 / paths;
  const double se = std::sqrt((s8 / paths - m4 * m4) / paths);
  EXPECT_LT(std::abs(m4 - moment_p({4, 1.0, params})), 4.0 * se);
}

}  // namespace
}  // namespace telegraph
