// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Tolerances are fixed below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "telegraph/cli.hpp"
#include "telegraph/estimators.hpp"
#include "telegraph/moments.hpp"
#include "telegraph/montecarlo.hpp"

namespace {

using namespace telegraph;

// Pinned tolerances.
constexpr double kMomentRelTol = 1e-10;
constexpr double kIdentityRelTol = 1e-8;
constexpr double kMassTol = 1e-8;
constexpr double kModerateVarLo = 1.05, kModerateVarHi = 1.35;
constexpr double kBiasTol = 0.02;
constexpr double kBoundaryFrac = 0.01;
constexpr double kPairedMedianTol = 0.05;
constexpr double kEfficientVarLo = 0.85, kEfficientVarHi = 1.15;
constexpr double kSeparationSe = 2.0;
constexpr double kSkewTol = 0.25, kKurtTol = 0.5;
constexpr double kRemainderSpread = 3.0;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail, double seconds) {
  std::printf("criterion %2d: %s  %s  [%s] (%.1f s)\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void moment_formulas() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double lt : {0.1, 1.0, 10.0}) {
    for (double v : {0.5, 1.0, 3.0}) {
      const ModelParams params{1.0, v};
      worst = std::max(worst, rel_err(moment_p({2, lt, params}), second_moment(lt, params)));
      worst = std::max(worst, rel_err(moment_p({4, lt, params}), fourth_moment(lt, params)));
    }
  }
  report(1, worst <= kMomentRelTol, "moment_p vs second/fourth moment closed forms",
         "max rel err " + fmt("%.2e", worst), seconds_since(t0));
}

void integral_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int p : {2, 4, 6}) {
    for (double lt : {0.1, 1.0, 10.0}) {
      worst = std::max(worst, rel_err(oracle::identity_i0_lhs_scaled(p, lt, 1.0, 1.0),
                                      oracle::identity_i0_rhs_scaled(p, lt, 1.0, 1.0)));
      worst = std::max(worst, rel_err(oracle::identity_i1_lhs_scaled(p, lt, 1.0, 1.0),
                                      oracle::identity_i1_rhs_scaled(p, lt, 1.0, 1.0)));
    }
  }
  report(2, worst <= kIdentityRelTol, "Bessel integral identities under quadrature",
         "max rel err " + fmt("%.2e", worst), seconds_since(t0));
}

void density_normalization() {
  const auto t0 = std::chrono::steady_clock::now();
  const double a = std::abs(oracle::transition_total_mass(0.1, 1.0, 1.0) - 1.0);
  const double b = std::abs(oracle::transition_total_mass(0.05, 5.0, 2.0) - 1.0);
  report(3, std::max(a, b) <= kMassTol, "one-step law total mass",
         "|mass-1| = " + fmt("%.2e", a) + ", " + fmt("%.2e", b), seconds_since(t0));
}

void design_point() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c;
  c.lambda0 = 1.0;
  c.v = 1.0;
  c.delta = 0.01;
  c.n = 100'000;
  c.replications = 1000;
  c.master_seed = 20240601;
  c.estimators = {EstimatorKind::MomentExplicit, EstimatorKind::MomentImplicit, EstimatorKind::Efficient};
  const auto table = run_replications(c);
  const auto summary = summarize_table(c, table);
  const double elapsed = seconds_since(t0);
  const double reps = static_cast<double>(c.replications);

  auto moment_check = [&](const EstimatorSummary& s, std::string& detail) {
    detail = "var " + fmt("%.4f", s.scaled_error_variance) + ", bias " + fmt("%+.4f", s.bias) + ", boundary " +
             std::to_string(s.boundary_count);
    return s.scaled_error_variance >= kModerateVarLo && s.scaled_error_variance <= kModerateVarHi &&
           std::abs(s.bias) < kBiasTol && static_cast<double>(s.boundary_count) < kBoundaryFrac * reps;
  };

  const auto& ex = summary.at(EstimatorKind::MomentExplicit);
  const auto& im = summary.at(EstimatorKind::MomentImplicit);
  const auto& ef = summary.at(EstimatorKind::Efficient);

  std::string d4;
  const bool ok4 = moment_check(ex, d4);
  report(4, ok4, "explicit moment estimator scaled variance, bias, boundary", d4, elapsed);

  std::string d5;
  bool ok5 = moment_check(im, d5);
  const double med = median_paired_abs_difference(table.column(EstimatorKind::MomentImplicit),
                                                  table.column(EstimatorKind::MomentExplicit));
  ok5 = ok5 && med < kPairedMedianTol;
  report(5, ok5, "implicit moment estimator scaled variance, bias, pairing", d5 + ", median |diff| " + fmt("%.4f", med),
         0.0);

  const double se_ex = std::hypot(ef.variance_stderr, ex.variance_stderr);
  const double se_im = std::hypot(ef.variance_stderr, im.variance_stderr);
  const bool ok6 = ef.scaled_error_variance >= kEfficientVarLo && ef.scaled_error_variance <= kEfficientVarHi &&
                   static_cast<double>(ef.boundary_count) < kBoundaryFrac * reps &&
                   ex.scaled_error_variance - ef.scaled_error_variance > kSeparationSe * se_ex &&
                   im.scaled_error_variance - ef.scaled_error_variance > kSeparationSe * se_im;
  report(6, ok6, "efficient estimator variance and separation",
         "var " + fmt("%.4f", ef.scaled_error_variance) + ", gap to explicit " +
             fmt("%.4f", ex.scaled_error_variance - ef.scaled_error_variance) + " (2se " + fmt("%.4f", 2 * se_ex) +
             "), gap to implicit " + fmt("%.4f", im.scaled_error_variance - ef.scaled_error_variance) + " (2se " +
             fmt("%.4f", 2 * se_im) + ")",
         0.0);

  bool ok8 = true;
  std::string d8;
  for (const auto* s : {&ex, &im, &ef}) {
    ok8 = ok8 && std::abs(s->skewness) < kSkewTol && std::abs(s->excess_kurtosis) < kKurtTol;
    d8 += std::string(to_string(s->kind)) + " skew " + fmt("%+.3f", s->skewness) + " kurt " +
          fmt("%+.3f", s->excess_kurtosis) + "; ";
  }
  d8.resize(d8.size() - 2);
  report(8, ok8, "scaled-error skewness and excess kurtosis", d8, 0.0);
}

void oracle_variance() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c;
  c.lambda0 = 1.0;
  c.delta = 1.0;
  c.n = 1000;
  c.replications = 1000;
  c.master_seed = 777;
  c.estimators = {EstimatorKind::Oracle};
  const double var = run_experiment(c).at(EstimatorKind::Oracle).scaled_error_variance;
  report(7, var >= kEfficientVarLo && var <= kEfficientVarHi, "continuous-observation oracle variance",
         "var " + fmt("%.4f", var), seconds_since(t0));
}

void pseudo_mle_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  auto rng = RandomStream::substream(31415, 0);
  const auto path = simulate_path({1.0, 1.0}, 10.0, rng);
  const double truth = oracle_estimator(path).value;
  std::vector<double> gaps;
  for (double delta : {0.1, 0.01, 0.001}) {
    const auto n = static_cast<std::size_t>(std::llround(10.0 / delta));
    gaps.push_back(std::abs(pseudo_mle(sample_on_grid(path, delta, n), 1.0).value - truth));
  }
  const bool ok = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  report(9, ok, "pseudo-MLE approaches N(T)/T as delta shrinks",
         "gaps " + fmt("%.3e", gaps[0]) + ", " + fmt("%.3e", gaps[1]) + ", " + fmt("%.3e", gaps[2]),
         seconds_since(t0));
}

void small_t_expansions() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const ModelParams params{1.0, 1.0};
  for (int p : {2, 4, 6}) {
    double lo = INFINITY, hi = 0.0;
    for (double t : {1e-2, 1e-3, 1e-4}) {
      const double ratio = std::abs(moment_p({p, t, params}) - moment_expansion(p, t, params)) / std::pow(t, p + 3);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    ok = ok && lo > 0.0 && std::isfinite(hi) && hi / lo <= kRemainderSpread;
    detail += "p=" + std::to_string(p) + " spread " + fmt("%.3f", hi / lo) + "; ";
  }
  detail.resize(detail.size() - 2);
  report(10, ok, "remainder of small-t expansions is third order", detail, seconds_since(t0));
}

void determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "telegraph_acceptance";
  fs::create_directories(dir);
  auto write_config = [&](const std::string& name, const std::string& parallelism) {
    const auto file = (dir / name).string();
    std::ofstream(file) << R"({"lambda0": 1.5, "v": 1, "delta": 0.02, "n": 2000, "replications": 40,
      "master_seed": 8675309, "estimators": ["MomentImplicit", "MomentExplicit", "Efficient", "PseudoMLE", "Oracle"],
      "parallelism": )" << parallelism
                        << "}\n";
    return file;
  };
  auto run_experiment_cli = [](const std::string& config) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"experiment", "--config", config}, out, err);
    return code == 0 ? out.str() : std::string("exit ") + std::to_string(code) + ": " + err.str();
  };
  const auto serial = run_experiment_cli(write_config("serial.json", "1"));
  const auto again = run_experiment_cli(write_config("serial.json", "1"));
  const auto three = run_experiment_cli(write_config("three.json", "3"));
  const auto unset = run_experiment_cli(write_config("unset.json", "null"));
  fs::remove_all(dir);
  const bool ok = serial.rfind("{", 0) == 0 && serial == again && serial == three && serial == unset;
  report(11, ok, "experiment JSON byte-identical across runs and parallelism",
         std::to_string(serial.size()) + " bytes", seconds_since(t0));
}

}  // namespace

int main() {
  moment_formulas();
  integral_identities();
  density_normalization();
  design_point();
  oracle_variance();
  pseudo_mle_limit();
  small_t_expansions();
  determinism();
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
