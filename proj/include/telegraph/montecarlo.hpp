// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Replication harness: simulate, sample, estimate, and summarize scaled errors
// sqrt(n delta)(lambda_hat - lambda0) against their Gaussian limits.
//
// Replication r (1-based) always uses RandomStream::substream(master_seed, r)
// and writes into slot r - 1 of a preallocated table; statistics are reduced sequentially
// over that table. Output is therefore independent of the worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "telegraph/estimators.hpp"
#include "telegraph/rng.hpp"
#include "telegraph/sample_io.hpp"
#include "telegraph/simulate.hpp"

namespace telegraph {

struct ExperimentConfig {
  double lambda0 = 1.0;
  double v = 1.0;
  double delta = 0.01;
  std::uint64_t n = 1000;
  std::uint64_t replications = 100;
  std::uint64_t master_seed = 0;
  std::vector<EstimatorKind> estimators;
  std::optional<unsigned> parallelism;

  double horizon() const { return delta * static_cast<double>(n); }

  void validate() const {
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw std::invalid_argument("config: 'lambda0' must be positive");
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("config: 'v' must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("config: 'delta' must be positive");
    if (n < 1) throw std::invalid_argument("config: 'n' must be >= 1");
    if (replications < 2) throw std::invalid_argument("config: 'replications' must be >= 2");
    if (estimators.empty()) throw std::invalid_argument("config: 'estimators' must not be empty");
    if (parallelism && *parallelism == 0) throw std::invalid_argument("config: 'parallelism' must be positive");
  }
};

/// Asymptotic variance of the scaled error, if known: 6/5 lambda0 for the
/// moment estimators, lambda0 for the efficient and oracle estimators.
inline std::optional<double> theoretical_variance(EstimatorKind kind, double lambda0) {
  switch (kind) {
    case EstimatorKind::MomentImplicit:
    case EstimatorKind::MomentExplicit: return 1.2 * lambda0;
    case EstimatorKind::Efficient:
    case EstimatorKind::Oracle: return lambda0;
    case EstimatorKind::PseudoMLE: return std::nullopt;
  }
  return std::nullopt;
}

/// Moment statistics of a scaled-error vector.
struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;         // unbiased
  double variance_stderr = 0.0;  // sqrt(2/(R-1)) * variance
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool degenerate = false;       // zero variance; shape statistics reported as 0
};

inline SummaryStats summarize(const std::vector<double>& z) {
  if (z.size() < 2) throw std::invalid_argument("summarize: need at least two values");
  SummaryStats s;
  s.count = z.size();
  const double r = static_cast<double>(z.size());
  double sum = 0.0;
  for (double x : z) sum += x;
  s.mean = sum / r;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : z) {
    const double d = x - s.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  s.variance = m2 / (r - 1.0);
  s.variance_stderr = std::sqrt(2.0 / (r - 1.0)) * s.variance;
  m2 /= r;
  m3 /= r;
  m4 /= r;
  if (m2 <= 0.0) {
    s.degenerate = true;
    return s;
  }
  s.skewness = m3 / std::pow(m2, 1.5);
  s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return s;
}

/// Z_r = sqrt(n delta)(value_r - lambda0) over replications that converged
/// away from the boundary; the rest are skipped.
inline std::vector<double> scaled_errors(const std::vector<EstimateResult>& estimates, double lambda0, std::uint64_t n,
                                         double delta) {
  const double scale = std::sqrt(static_cast<double>(n) * delta);
  std::vector<double> z;
  z.reserve(estimates.size());
  for (const auto& e : estimates) {
    if (e.converged && !e.at_boundary) z.push_back(scale * (e.value - lambda0));
  }
  return z;
}

inline bool usable(const EstimateResult& e) { return e.converged && !e.at_boundary; }

struct EstimatorSummary {
  EstimatorKind kind{};
  std::size_t used = 0;
  std::size_t boundary_count = 0;
  double mean = 0.0;  // of lambda_hat
  double bias = 0.0;
  double scaled_error_mean = 0.0;
  double scaled_error_variance = 0.0;
  std::optional<double> theoretical_variance;
  double variance_stderr = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool degenerate = false;
};

struct MonteCarloSummary {
  ExperimentConfig config;
  std::vector<EstimatorSummary> estimators;

  const EstimatorSummary& at(EstimatorKind kind) const {
    for (const auto& s : estimators) {
      if (s.kind == kind) return s;
    }
    throw std::out_of_range("MonteCarloSummary: estimator not in experiment");
  }
};

/// Per-replication estimates, one column per requested estimator.
struct ReplicationTable {
  std::vector<EstimatorKind> kinds;
  std::vector<std::vector<EstimateResult>> columns;  // columns[k][r]

  const std::vector<EstimateResult>& column(EstimatorKind kind) const {
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      if (kinds[k] == kind) return columns[k];
    }
    throw std::out_of_range("ReplicationTable: estimator not in experiment");
  }
};

/// Estimates for replication index r (0-based slot, substream r + 1).
inline std::vector<EstimateResult> run_replication(const ExperimentConfig& config, std::uint64_t r,
                                                   const Tolerances& tol = {}) {
  auto rng = RandomStream::substream(config.master_seed, r + 1);
  const ModelParams params{config.lambda0, config.v};
  const auto path = simulate_path(params, config.horizon(), rng);
  std::optional<DiscreteSample> sample;
  std::vector<EstimateResult> out;
  out.reserve(config.estimators.size());
  for (auto kind : config.estimators) {
    if (kind == EstimatorKind::Oracle) {
      out.push_back(oracle_estimator(path));
      continue;
    }
    if (!sample) sample.emplace(sample_on_grid(path, config.delta, config.n));
    out.push_back(estimate(kind, *sample, config.v, tol));
  }
  return out;
}

inline ReplicationTable run_replications(const ExperimentConfig& config, const Tolerances& tol = {}) {
  config.validate();
  const std::size_t reps = config.replications;
  ReplicationTable table;
  table.kinds = config.estimators;
  table.columns.assign(config.estimators.size(), std::vector<EstimateResult>(reps));

  auto store = [&](std::size_t r, const std::vector<EstimateResult>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) table.columns[k][r] = row[k];
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(config.parallelism.value_or(1), reps));
  if (workers <= 1) {
    for (std::size_t r = 0; r < reps; ++r) store(r, run_replication(config, r, tol));
    return table;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        store(r, run_replication(config, r, tol));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

inline MonteCarloSummary summarize_table(const ExperimentConfig& config, const ReplicationTable& table) {
  MonteCarloSummary summary{config, {}};
  for (std::size_t k = 0; k < table.kinds.size(); ++k) {
    const auto& column = table.columns[k];
    EstimatorSummary s;
    s.kind = table.kinds[k];
    s.theoretical_variance = theoretical_variance(s.kind, config.lambda0);
    double sum = 0.0;
    for (const auto& e : column) {
      if (usable(e)) {
        sum += e.value;
        ++s.used;
      } else {
        ++s.boundary_count;
      }
    }
    if (s.used > 0) {
      s.mean = sum / static_cast<double>(s.used);
      s.bias = s.mean - config.lambda0;
    }
    const auto z = scaled_errors(column, config.lambda0, config.n, config.delta);
    if (z.size() >= 2) {
      const auto stats = summarize(z);
      s.scaled_error_mean = stats.mean;
      s.scaled_error_variance = stats.variance;
      s.variance_stderr = stats.variance_stderr;
      s.skewness = stats.skewness;
      s.excess_kurtosis = stats.excess_kurtosis;
      s.degenerate = stats.degenerate;
    } else {
      s.degenerate = true;
    }
    summary.estimators.push_back(s);
  }
  return summary;
}

inline MonteCarloSummary run_experiment(const ExperimentConfig& config, const Tolerances& tol = {}) {
  return summarize_table(config, run_replications(config, tol));
}

/// Median of |a_r - b_r| over replications where both estimates are usable.
inline double median_paired_abs_difference(const std::vector<EstimateResult>& a, const std::vector<EstimateResult>& b) {
  std::vector<double> d;
  for (std::size_t r = 0; r < std::min(a.size(), b.size()); ++r) {
    if (usable(a[r]) && usable(b[r])) d.push_back(std::abs(a[r].value - b[r].value));
  }
  if (d.empty()) throw std::invalid_argument("median_paired_abs_difference: no paired replications");
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

// ---- JSON / CSV surfaces ---------------------------------------------------

/// Parses the experiment configuration. Keys must be exactly lambda0, v,
/// delta, n, replications, master_seed, estimators and (optionally null)
/// parallelism. Throws InputError naming the offending key.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> kKeys = {"lambda0",     "v",          "delta",      "n",
                                                 "replications", "master_seed", "estimators", "parallelism"};
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) throw InputError("config: unknown key '" + key + "'");
  }
  for (const auto& key : kKeys) {
    if (key != "parallelism" && !j.contains(key)) throw InputError("config: missing key '" + key + "'");
  }
  auto number = [&](const char* key) {
    const auto& value = j.at(key);
    if (!value.is_number()) throw InputError(std::string("config: key '") + key + "' must be a number");
    return value.get<double>();
  };
  auto count = [&](const char* key) {
    const auto& value = j.at(key);
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0) throw InputError(std::string("config: key '") + key + "' must be a nonnegative integer");
    return value.get<std::uint64_t>();
  };
  ExperimentConfig c;
  c.lambda0 = number("lambda0");
  c.v = number("v");
  c.delta = number("delta");
  c.n = count("n");
  c.replications = count("replications");
  c.master_seed = count("master_seed");
  const auto& names = j.at("estimators");
  if (!names.is_array()) throw InputError("config: key 'estimators' must be an array of names");
  for (const auto& name : names) {
    const auto kind = name.is_string() ? parse_estimator_kind(name.get<std::string>()) : std::nullopt;
    if (!kind) throw InputError("config: key 'estimators' has unknown estimator " + name.dump());
    if (std::find(c.estimators.begin(), c.estimators.end(), *kind) == c.estimators.end()) c.estimators.push_back(*kind);
  }
  if (j.contains("parallelism") && !j.at("parallelism").is_null()) {
    const auto p = count("parallelism");
    if (p == 0 || p > 4096) throw InputError("config: key 'parallelism' must be in [1, 4096]");
    c.parallelism = static_cast<unsigned>(p);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return c;
}

/// Summary document. The echoed config omits `parallelism`, a scheduling hint
/// that does not affect results, so output bytes do not depend on it.
inline nlohmann::ordered_json summary_to_json(const MonteCarloSummary& summary) {
  const auto& c = summary.config;
  nlohmann::ordered_json config;
  config["lambda0"] = c.lambda0;
  config["v"] = c.v;
  config["delta"] = c.delta;
  config["n"] = c.n;
  config["replications"] = c.replications;
  config["master_seed"] = c.master_seed;
  auto names = nlohmann::ordered_json::array();
  for (auto kind : c.estimators) names.push_back(std::string(to_string(kind)));
  config["estimators"] = names;

  auto records = nlohmann::ordered_json::array();
  for (const auto& s : summary.estimators) {
    nlohmann::ordered_json rec;
    rec["kind"] = std::string(to_string(s.kind));
    rec["used"] = s.used;
    rec["boundary_count"] = s.boundary_count;
    rec["mean"] = s.mean;
    rec["bias"] = s.bias;
    rec["scaled_error_mean"] = s.scaled_error_mean;
    rec["scaled_error_variance"] = s.scaled_error_variance;
    if (s.theoretical_variance) {
      rec["theoretical_variance"] = *s.theoretical_variance;
    } else {
      rec["theoretical_variance"] = nullptr;
    }
    rec["variance_stderr"] = s.variance_stderr;
    rec["skewness"] = s.skewness;
    rec["excess_kurtosis"] = s.excess_kurtosis;
    rec["degenerate"] = s.degenerate;
    records.push_back(rec);
  }
  nlohmann::ordered_json doc;
  doc["config"] = config;
  doc["estimators"] = records;
  return doc;
}

/// Raw scaled errors as `estimator,replication,z` (1-based replication index).
inline void write_raw_z_csv(std::ostream& out, const ExperimentConfig& config, const ReplicationTable& table) {
  const double scale = std::sqrt(static_cast<double>(config.n) * config.delta);
  char buf[64];
  out << "estimator,replication,z\n";
  for (std::size_t k = 0; k < table.kinds.size(); ++k) {
    const auto name = to_string(table.kinds[k]);
    for (std::size_t r = 0; r < table.columns[k].size(); ++r) {
      const auto& e = table.columns[k][r];
      if (!usable(e)) continue;
      const auto res = std::to_chars(buf, buf + sizeof buf, scale * (e.value - config.lambda0),
                                     std::chars_format::general, 17);
      out << name << ',' << (r + 1) << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
    }
  }
}

}  // namespace telegraph
