// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Estimators of the switching rate lambda from a discretely observed path:
//  - MomentImplicit: root of (1/n) sum eta_i^2 = f(lambda)
//  - MomentExplicit: first-order expansion of the same moment condition
//  - Efficient:      log-transformed fraction of non-flat increments
//  - PseudoMLE:      maximizer of the independent-increment likelihood
//  - Oracle:         N(T)/T from the continuous path (simulation only)
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "telegraph/moments.hpp"
#include "telegraph/simulate.hpp"
#include "telegraph/specfn.hpp"

namespace telegraph {

enum class EstimatorKind { MomentImplicit, MomentExplicit, Efficient, PseudoMLE, Oracle };

inline constexpr std::array<EstimatorKind, 5> kAllEstimatorKinds = {
    EstimatorKind::MomentImplicit, EstimatorKind::MomentExplicit, EstimatorKind::Efficient,
    EstimatorKind::PseudoMLE, EstimatorKind::Oracle};

constexpr std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MomentImplicit: return "MomentImplicit";
    case EstimatorKind::MomentExplicit: return "MomentExplicit";
    case EstimatorKind::Efficient: return "Efficient";
    case EstimatorKind::PseudoMLE: return "PseudoMLE";
    case EstimatorKind::Oracle: return "Oracle";
  }
  return "?";
}

inline std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) {
  for (auto kind : kAllEstimatorKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

struct EstimateResult {
  EstimatorKind kind{};
  double value = 0.0;
  bool converged = true;
  bool at_boundary = false;
  int iterations = 0;
  int objective_evals = 0;
};

struct Tolerances {
  double flat_rel = 1e-9;           // band around v*delta treated as "no switch"
  double root_abs = 1e-10;          // bisection tolerance in lambda
  double mle_rel = 1e-8;            // golden-section relative width
  double lambda_max_factor = 50.0;  // search cap is lambda_max_factor / delta

  void validate() const {
    if (!(flat_rel > 0.0 && flat_rel < 1e-3)) throw std::invalid_argument("Tolerances: flat_rel must be in (0, 1e-3)");
    if (!(root_abs > 0.0)) throw std::invalid_argument("Tolerances: root_abs must be positive");
    if (!(mle_rel > 0.0)) throw std::invalid_argument("Tolerances: mle_rel must be positive");
    if (!(lambda_max_factor > 0.0)) throw std::invalid_argument("Tolerances: lambda_max_factor must be positive");
  }
};

/// Increment inconsistent with the speed bound |eta| <= v*delta.
class CorruptSampleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// True iff at least one switch occurred in the step, i.e. |eta| is strictly
/// inside v*delta by more than the flat_rel band.
inline bool classify_flat(double eta, double v, double delta, const Tolerances& tol = {}) {
  const double bound = v * delta;
  const double a = std::abs(eta);
  if (!(a <= bound * (1.0 + tol.flat_rel))) {
    throw CorruptSampleError("increment |eta|=" + std::to_string(a) + " exceeds v*delta=" + std::to_string(bound));
  }
  return a < bound * (1.0 - tol.flat_rel);
}

namespace detail {

inline void require_nonempty(const DiscreteSample& sample, const char* who) {
  if (sample.n() == 0) throw std::invalid_argument(std::string(who) + ": empty sample");
}

inline void require_positive_v(double v, const char* who) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": v must be positive");
}

}  // namespace detail

/// Number of increments classified as containing a switch.
inline std::size_t count_switch_steps(const DiscreteSample& sample, double v, const Tolerances& tol = {}) {
  const auto x = sample.positions();
  std::size_t k = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (classify_flat(x[i] - x[i - 1], v, sample.delta(), tol)) ++k;
  }
  return k;
}

/// Counting statistic k/(n delta); biased for fixed delta, with mean (1 - e^{-lambda delta})/delta.
inline double switch_step_rate(const DiscreteSample& sample, double v, const Tolerances& tol = {}) {
  detail::require_nonempty(sample, "switch_step_rate");
  return static_cast<double>(count_switch_steps(sample, v, tol)) / sample.horizon();
}

inline EstimateResult moment_estimator_implicit(const DiscreteSample& sample, double v, const Tolerances& tol = {}) {
  detail::require_nonempty(sample, "moment_estimator_implicit");
  detail::require_positive_v(v, "moment_estimator_implicit");
  tol.validate();
  const double delta = sample.delta();
  const auto x = sample.positions();
  double sum_sq = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double eta = x[i] - x[i - 1];
    sum_sq += eta * eta;
  }
  const double u = sum_sq / static_cast<double>(sample.n());

  EstimateResult r{EstimatorKind::MomentImplicit};
  const double cap = v * v * delta * delta;
  if (u >= cap * (1.0 - tol.flat_rel)) {
    r.value = 0.0;
    r.at_boundary = true;
    return r;
  }

  auto g = [&](double lambda) {
    ++r.objective_evals;
    return increment_variance_fn(lambda, delta, v) - u;
  };
  double lo = tol.root_abs;
  double hi = tol.lambda_max_factor / delta;
  // f decreases in lambda: need g(lo) > 0 >= g(hi).
  double g_hi = g(hi);
  for (int expand = 0; expand < 3 && g_hi > 0.0; ++expand) {
    hi *= 10.0;
    g_hi = g(hi);
  }
  if (g_hi > 0.0) {
    r.value = hi;
    r.converged = false;
    r.at_boundary = true;
    return r;
  }
  if (g(lo) <= 0.0) {
    r.value = lo;
    r.at_boundary = true;
    return r;
  }
  while (hi - lo >= tol.root_abs * (1.0 + 0.5 * (lo + hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++r.iterations;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  r.value = 0.5 * (lo + hi);
  return r;
}

/// lambda* = (3 / (2 n delta)) sum (1 - eta_i^2 / (v delta)^2).
inline EstimateResult moment_estimator_explicit(const DiscreteSample& sample, double v) {
  detail::require_nonempty(sample, "moment_estimator_explicit");
  detail::require_positive_v(v, "moment_estimator_explicit");
  const double bound_sq = v * sample.delta() * v * sample.delta();
  const auto x = sample.positions();
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double eta = x[i] - x[i - 1];
    // Rounding can push |eta| a few ulps past v*delta; the summand is >= 0 in exact arithmetic.
    sum += std::max(0.0, 1.0 - eta * eta / bound_sq);
  }
  EstimateResult r{EstimatorKind::MomentExplicit};
  r.value = 1.5 * sum / sample.horizon();
  r.at_boundary = r.value == 0.0;
  return r;
}

/// lambda_hat = -(1/delta) log(1 - k/n), k = number of non-flat increments.
inline EstimateResult efficient_estimator(const DiscreteSample& sample, double v, const Tolerances& tol = {}) {
  detail::require_nonempty(sample, "efficient_estimator");
  detail::require_positive_v(v, "efficient_estimator");
  tol.validate();
  const std::size_t n = sample.n();
  const std::size_t k = count_switch_steps(sample, v, tol);
  EstimateResult r{EstimatorKind::Efficient};
  if (k == 0) {
    r.value = 0.0;
    r.at_boundary = true;
  } else if (k == n) {
    r.value = tol.lambda_max_factor / sample.delta();
    r.converged = false;
    r.at_boundary = true;
  } else {
    r.value = -std::log1p(-static_cast<double>(k) / static_cast<double>(n)) / sample.delta();
  }
  return r;
}

struct TransitionLaw {
  double density;    // absolutely continuous part at dx
  double atom_mass;  // mass of each atom at dx = +-v*delta
};

namespace detail {

// log of 2v times the continuous part of the one-step law at dx, with
// z = (lambda/v) sqrt(v^2 delta^2 - dx^2):
//   e^{-lambda delta} * lambda * (I0(z) + lambda delta I1(z)/z).
inline double log_scaled_transition_density(double dx, double delta, double lambda, double v) {
  const double bound = v * delta;
  const double a = std::min(std::abs(dx), bound);
  const double root_u = std::sqrt((bound - a) * (bound + a));
  const double z = (lambda / v) * root_u;
  const double i0 = bessel_i_scaled(BesselOrder::integer(0), z);
  const double i1_over_z = z > 0.0 ? bessel_i_scaled(BesselOrder::integer(1), z) / z : 0.5;
  return z - lambda * delta + std::log(lambda) + std::log(i0 + lambda * delta * i1_over_z);
}

inline double log_transition_density_unchecked(double dx, double delta, double lambda, double v) {
  return log_scaled_transition_density(dx, delta, lambda, v) - std::log(2.0 * v);
}

inline void check_transition_args(double dx, double delta, double lambda, double v) {
  if (!(delta > 0.0) || !(lambda > 0.0) || !(v > 0.0)) {
    throw std::domain_error("transition_density: delta, lambda and v must be positive");
  }
  if (!(std::abs(dx) <= v * delta * (1.0 + 1e-12))) {
    throw std::domain_error("transition_density: |dx| exceeds v*delta");
  }
}

}  // namespace detail

/// One-step law of the increment over delta: continuous density at dx and the
/// mass e^{-lambda delta}/2 of each atom at +-v*delta. At |dx| = v*delta the
/// continuous part is returned as its one-sided limit.
inline TransitionLaw transition_density(double dx, double delta, double lambda, double v) {
  detail::check_transition_args(dx, delta, lambda, v);
  return TransitionLaw{std::exp(detail::log_transition_density_unchecked(dx, delta, lambda, v)),
                       0.5 * std::exp(-lambda * delta)};
}

namespace detail {

// Per-sample data the likelihood needs: non-flat increments and the flat count.
struct LikelihoodData {
  std::vector<double> switched;  // eta_i with a switch
  std::size_t flat_count = 0;
  double delta = 0.0;
  double v = 0.0;

  LikelihoodData(const DiscreteSample& sample, double v_, const Tolerances& tol) : delta(sample.delta()), v(v_) {
    const auto x = sample.positions();
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double eta = x[i] - x[i - 1];
      if (classify_flat(eta, v, delta, tol)) {
        switched.push_back(eta);
      } else {
        ++flat_count;
      }
    }
  }

  // Log-likelihood without the lambda-free terms -log 2 (atoms) and
  // -log(2v) (density); what the maximizer works on.
  double operator()(double lambda) const {
    double ll = -static_cast<double>(flat_count) * lambda * delta;
    for (double eta : switched) ll += log_scaled_transition_density(eta, delta, lambda, v);
    return ll;
  }

  double constant_part() const {
    return -static_cast<double>(flat_count) * std::numbers::ln2 -
           static_cast<double>(switched.size()) * std::log(2.0 * v);
  }
};

}  // namespace detail

/// Sum over increments of log(atom mass) for flat steps and log(continuous
/// density) for steps with a switch.
inline double log_likelihood(const DiscreteSample& sample, double v, double lambda, const Tolerances& tol = {}) {
  if (!(lambda > 0.0)) throw std::domain_error("log_likelihood: lambda must be positive");
  detail::require_positive_v(v, "log_likelihood");
  const detail::LikelihoodData data(sample, v, tol);
  return data(lambda) + data.constant_part();
}

/// Maximizes log_likelihood over (0, lambda_max_factor/delta]: a 64-point
/// log-grid scan locates the bracket, then golden-section search refines it.
inline EstimateResult pseudo_mle(const DiscreteSample& sample, double v, const Tolerances& tol = {}) {
  detail::require_nonempty(sample, "pseudo_mle");
  detail::require_positive_v(v, "pseudo_mle");
  tol.validate();
  const detail::LikelihoodData data(sample, v, tol);
  EstimateResult r{EstimatorKind::PseudoMLE};

  constexpr int kGrid = 64;
  const double cap = tol.lambda_max_factor / sample.delta();
  const double floor = cap * 1e-10;
  std::array<double, kGrid> grid{};
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = floor * std::pow(cap / floor, static_cast<double>(i) / (kGrid - 1));
    if (i == kGrid - 1) grid[i] = cap;
    const double ll = data(grid[i]);
    ++r.objective_evals;
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }

  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kGrid - 1)];
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = data(c);
  double fd = data(d);
  r.objective_evals += 2;
  while (b - a > tol.mle_rel * 0.5 * (a + b)) {
    ++r.iterations;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = data(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = data(d);
    }
    ++r.objective_evals;
  }
  double x = 0.5 * (a + b);
  double fx = data(x);
  ++r.objective_evals;
  // The grid endpoints are candidates too: a monotone likelihood peaks there.
  if (best == 0 && data(floor) >= fx) {
    x = floor;
  } else if (best == kGrid - 1 && data(cap) >= fx) {
    x = cap;
  }
  r.value = x;
  const double edge_tol = 2.0 * tol.mle_rel;
  r.at_boundary = std::abs(x - floor) <= edge_tol * floor || std::abs(x - cap) <= edge_tol * cap;
  r.converged = !r.at_boundary;
  return r;
}

/// N(T)/T from the continuous path.
inline EstimateResult oracle_estimator(const TelegraphPath& path) {
  EstimateResult r{EstimatorKind::Oracle};
  r.value = static_cast<double>(path.event_count()) / path.horizon();
  return r;
}

/// Runs one sample-based estimator.
inline EstimateResult estimate(EstimatorKind kind, const DiscreteSample& sample, double v, const Tolerances& tol = {}) {
  switch (kind) {
    case EstimatorKind::MomentImplicit: return moment_estimator_implicit(sample, v, tol);
    case EstimatorKind::MomentExplicit: return moment_estimator_explicit(sample, v);
    case EstimatorKind::Efficient: return efficient_estimator(sample, v, tol);
    case EstimatorKind::PseudoMLE: return pseudo_mle(sample, v, tol);
    case EstimatorKind::Oracle: break;
  }
  throw std::invalid_argument("estimate: the Oracle estimator needs the continuous path");
}

}  // namespace telegraph
