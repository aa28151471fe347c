// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace telegraph {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes on [0,1] half (symmetric) with the embedded 7-point Gauss weights.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b, int& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * fsum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * fsum;
  }
  evals += 15;
  return Segment{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b]. The
/// interval with the largest error estimate is bisected until the total
/// estimate drops below max(abs_tol, rel_tol*|I|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                           int max_segments = 2000) {
  if (!(b > a)) throw std::invalid_argument("integrate: require a < b");
  QuadratureResult result;
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gauss_kronrod_15(f, a, b, result.evaluations));
  double total = heap.top().value;
  double error = heap.top().error;
  while (static_cast<int>(heap.size()) < max_segments) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(total))) {
      result.converged = true;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid, result.evaluations);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b, result.evaluations);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  auto segments = std::move(heap);
  while (!segments.empty()) {
    total += segments.top().value;
    error += segments.top().error;
    segments.pop();
  }
  if (error <= std::max(abs_tol, rel_tol * std::abs(total))) result.converged = true;
  result.value = total;
  result.error_estimate = error;
  return result;
}

}  // namespace telegraph
