// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Exact simulation of telegraph paths and exact evaluation of positions on an
// equidistant observation grid. Switch times are kept as drawn; positions are
// computed analytically, so there is no time-discretization error.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "telegraph/rng.hpp"

namespace telegraph {

/// Generative parameters: switch rate lambda and speed v, both positive.
struct ModelParams {
  double lambda;
  double v;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw std::invalid_argument("ModelParams: lambda must be positive and finite");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("ModelParams: v must be positive and finite");
    }
  }
};

/// One exact realization on [0, horizon]. Immutable after construction.
class TelegraphPath {
 public:
  TelegraphPath(ModelParams params, double horizon, int initial_direction, std::vector<double> switch_times)
      : params_(params),
        horizon_(horizon),
        direction_(initial_direction),
        switch_times_(std::move(switch_times)) {
    params_.validate();
    if (!(horizon_ > 0.0)) throw std::invalid_argument("TelegraphPath: horizon must be positive");
    if (direction_ != 1 && direction_ != -1) {
      throw std::invalid_argument("TelegraphPath: initial direction must be +1 or -1");
    }
    double prev = 0.0;
    for (double s : switch_times_) {
      if (!(s > prev) || s > horizon_) {
        throw std::invalid_argument("TelegraphPath: switch times must be strictly increasing in (0, horizon]");
      }
      prev = s;
    }
    // anchor_[j] = X(s_j) with s_0 = 0.
    anchors_.reserve(switch_times_.size() + 1);
    anchors_.push_back(0.0);
    double x = 0.0;
    double last = 0.0;
    double slope = direction_ * params_.v;
    for (double s : switch_times_) {
      x += slope * (s - last);
      anchors_.push_back(x);
      last = s;
      slope = -slope;
    }
  }

  const ModelParams& params() const { return params_; }
  double horizon() const { return horizon_; }
  int initial_direction() const { return direction_; }
  std::span<const double> switch_times() const { return switch_times_; }

  /// N(horizon).
  std::size_t event_count() const { return switch_times_.size(); }

  /// Number of switches in the half-open window (a, b].
  std::size_t events_in(double a, double b) const {
    const auto lo = std::upper_bound(switch_times_.begin(), switch_times_.end(), a);
    const auto hi = std::upper_bound(switch_times_.begin(), switch_times_.end(), b);
    return static_cast<std::size_t>(hi - lo);
  }

  /// X(t) for t in [0, horizon]; O(log N) per query.
  double position_at(double t) const {
    if (!(t >= 0.0) || t > horizon_) {
      throw std::domain_error("position_at: t=" + std::to_string(t) + " outside [0, horizon]");
    }
    const auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
    return position_after(static_cast<std::size_t>(it - switch_times_.begin()), t);
  }

  /// X(t) given that exactly j switch times are <= t. No range checks.
  double position_after(std::size_t j, double t) const {
    const double start = j == 0 ? 0.0 : switch_times_[j - 1];
    const double slope = (j % 2 == 0 ? direction_ : -direction_) * params_.v;
    return anchors_[j] + slope * (t - start);
  }

 private:
  ModelParams params_;
  double horizon_;
  int direction_;
  std::vector<double> switch_times_;
  std::vector<double> anchors_;
};

/// Draws a path: initial direction first, then exponential(lambda) gaps
/// accumulated until the horizon is passed.
inline TelegraphPath simulate_path(const ModelParams& params, double horizon, RandomStream& rng) {
  params.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("simulate_path: horizon must be positive and finite");
  }
  const int direction = rng.sign();
  std::vector<double> times;
  const double expected = params.lambda * horizon;
  if (expected < 1e8) times.reserve(static_cast<std::size_t>(expected + 4.0 * std::sqrt(expected) + 8.0));
  double t = rng.exponential(params.lambda);
  while (t <= horizon) {
    times.push_back(t);
    t += rng.exponential(params.lambda);
  }
  return TelegraphPath(params, horizon, direction, std::move(times));
}

/// Positions X_0..X_n observed at t_i = i*delta. X_0 = 0.
class DiscreteSample {
 public:
  DiscreteSample(double delta, std::vector<double> positions, double v)
      : delta_(delta), positions_(std::move(positions)), v_(v) {
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw std::invalid_argument("DiscreteSample: delta must be positive");
    if (!(v_ > 0.0)) throw std::invalid_argument("DiscreteSample: v must be positive");
    if (positions_.size() < 2) throw std::invalid_argument("DiscreteSample: need at least two positions (n >= 1)");
    if (positions_.front() != 0.0) throw std::invalid_argument("DiscreteSample: positions[0] must be 0");
    for (std::size_t i = 1; i < positions_.size(); ++i) {
      const double step = std::abs(positions_[i] - positions_[i - 1]);
      if (!(step <= max_step(i))) {
        throw std::invalid_argument("DiscreteSample: increment " + std::to_string(i) + " exceeds v*delta");
      }
    }
  }

  double delta() const { return delta_; }
  std::size_t n() const { return positions_.size() - 1; }
  double v() const { return v_; }
  double horizon() const { return static_cast<double>(n()) * delta_; }
  std::span<const double> positions() const { return positions_; }

  /// Largest admissible |X_i - X_{i-1}|: v*delta up to 1e-12 relative, plus
  /// the rounding carried by grid times i*delta and positions of size <= v*t_i.
  double max_step(std::size_t i) const {
    const double t = static_cast<double>(i) * delta_;
    return v_ * delta_ * (1.0 + 1e-12) + 8.0 * std::numeric_limits<double>::epsilon() * v_ * t;
  }

 private:
  double delta_;
  std::vector<double> positions_;
  double v_;
};

inline DiscreteSample sample_on_grid(const TelegraphPath& path, double delta, std::size_t n) {
  if (!(delta > 0.0)) throw std::invalid_argument("sample_on_grid: delta must be positive");
  if (n == 0) throw std::invalid_argument("sample_on_grid: n must be positive");
  if (static_cast<double>(n) * delta > path.horizon() * (1.0 + 1e-12)) {
    throw std::domain_error("sample_on_grid: grid extends beyond the path horizon");
  }
  // Grid times are increasing, so a forward cursor replaces the per-point
  // binary search of position_at; the arithmetic is identical.
  const auto switches = path.switch_times();
  std::vector<double> positions(n + 1);
  positions[0] = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = std::min(static_cast<double>(i) * delta, path.horizon());
    while (j < switches.size() && switches[j] <= t) ++j;
    positions[i] = path.position_after(j, t);
  }
  return DiscreteSample(delta, std::move(positions), path.params().v);
}

/// eta_i = X_i - X_{i-1}, i = 1..n.
inline std::vector<double> increments(const DiscreteSample& sample) {
  const auto x = sample.positions();
  std::vector<double> eta(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) eta[i - 1] = x[i] - x[i - 1];
  return eta;
}

}  // namespace telegraph
