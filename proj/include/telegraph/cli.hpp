// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: simulate, moments, estimate, experiment.
// Exit status: 0 success, 1 validation error, 2 runtime error.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "telegraph/estimators.hpp"
#include "telegraph/moments.hpp"
#include "telegraph/montecarlo.hpp"
#include "telegraph/rng.hpp"
#include "telegraph/sample_io.hpp"
#include "telegraph/simulate.hpp"

namespace telegraph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Failure unrelated to user input (e.g. an unwritable output path).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample produced by `simulate --seed seed`: substream 0 of the seed.
inline DiscreteSample simulate_sample(const ModelParams& params, double delta, std::size_t n, std::uint64_t seed) {
  auto rng = RandomStream::substream(seed, 0);
  const auto path = simulate_path(params, delta * static_cast<double>(n), rng);
  return sample_on_grid(path, delta, n);
}

/// The four sample-based estimators in their canonical order.
inline std::vector<EstimatorKind> default_sample_estimators() {
  return {EstimatorKind::MomentImplicit, EstimatorKind::MomentExplicit, EstimatorKind::Efficient,
          EstimatorKind::PseudoMLE};
}

inline nlohmann::ordered_json estimate_to_json(const EstimateResult& e) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(e.kind));
  j["value"] = e.value;
  j["converged"] = e.converged;
  j["at_boundary"] = e.at_boundary;
  j["iterations"] = e.iterations;
  return j;
}

inline nlohmann::ordered_json estimates_to_json(const DiscreteSample& sample, double v,
                                                const std::vector<EstimatorKind>& kinds) {
  auto arr = nlohmann::ordered_json::array();
  for (auto kind : kinds) arr.push_back(estimate_to_json(estimate(kind, sample, v)));
  return arr;
}

namespace detail {

inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// Writes to --out when given, otherwise to the provided stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw RuntimeFailure("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw RuntimeFailure("failed writing output");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::ifstream open_input(const std::string& path, const char* option) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string(option) + ": cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs the subcommand.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Telegraph process simulation and switching-rate estimation", "telegraph"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a path and print its grid sample");
  double sim_lambda = 0.0, sim_v = 0.0, sim_delta = 0.0;
  std::size_t sim_n = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_format = "csv";
  sim->add_option("--lambda", sim_lambda, "switching rate")->required()->check(CLI::PositiveNumber);
  sim->add_option("--v", sim_v, "speed")->required()->check(CLI::PositiveNumber);
  sim->add_option("--delta", sim_delta, "grid step")->required()->check(CLI::PositiveNumber);
  sim->add_option("--n", sim_n, "number of grid steps")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "random seed")->required();
  sim->add_option("--out", sim_out, "output path (default stdout)");
  sim->add_option("--format", sim_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // moments
  auto* mom = app.add_subcommand("moments", "Tabulate E X(t)^p");
  std::vector<int> mom_p;
  std::vector<double> mom_t;
  double mom_lambda = 0.0, mom_v = 0.0;
  std::string mom_out;
  mom->add_option("--p", mom_p, "moment orders (comma list)")->required()->delimiter(',')->check(CLI::PositiveNumber);
  mom->add_option("--t", mom_t, "times (comma list)")->required()->delimiter(',')->check(CLI::PositiveNumber);
  mom->add_option("--lambda", mom_lambda, "switching rate")->required()->check(CLI::PositiveNumber);
  mom->add_option("--v", mom_v, "speed")->required()->check(CLI::PositiveNumber);
  mom->add_option("--out", mom_out, "output path (default stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate lambda from a t,x CSV sample");
  std::string est_input, est_out;
  double est_v = 0.0;
  std::vector<std::string> est_names;
  est->add_option("--input", est_input, "CSV sample with header t,x")->required();
  est->add_option("--v", est_v, "known speed")->required()->check(CLI::PositiveNumber);
  est->add_option("--estimators", est_names, "MomentImplicit,MomentExplicit,Efficient,PseudoMLE")->delimiter(',');
  est->add_option("--out", est_out, "output path (default stdout)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
  std::string exp_config, exp_out, exp_raw_z;
  exp->add_option("--config", exp_config, "experiment configuration (JSON)")->required();
  exp->add_option("--out", exp_out, "summary output path (default stdout)");
  exp->add_option("--raw-z", exp_raw_z, "write per-replication scaled errors as CSV");

  if (!args.empty() && !args.front().starts_with('-') && app.get_subcommand_no_throw(args.front()) == nullptr) {
    err << "error: unknown subcommand '" << args.front() << "'\n";
    return kExitValidation;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (sim->parsed()) {
      const ModelParams params{sim_lambda, sim_v};
      const auto sample = simulate_sample(params, sim_delta, sim_n, sim_seed);
      detail::Sink sink(sim_out, out);
      if (sim_format == "csv") {
        write_sample_csv(*sink, sample);
      } else {
        nlohmann::ordered_json j;
        j["lambda"] = sim_lambda;
        j["v"] = sim_v;
        j["delta"] = sim_delta;
        j["n"] = sim_n;
        j["seed"] = sim_seed;
        auto t = nlohmann::ordered_json::array();
        auto x = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < sample.positions().size(); ++i) {
          t.push_back(static_cast<double>(i) * sample.delta());
          x.push_back(sample.positions()[i]);
        }
        j["t"] = std::move(t);
        j["x"] = std::move(x);
        *sink << j.dump() << '\n';
      }
      sink.finish();
    } else if (mom->parsed()) {
      const ModelParams params{mom_lambda, mom_v};
      detail::Sink sink(mom_out, out);
      *sink << "p,t,lambda,v,value\n";
      for (int p : mom_p) {
        for (double t : mom_t) {
          const double value = moment_p(MomentQuery{p, t, params});
          *sink << p << ',' << detail::format_double(t) << ',' << detail::format_double(mom_lambda) << ','
                << detail::format_double(mom_v) << ',' << detail::format_double(value) << '\n';
        }
      }
      sink.finish();
    } else if (est->parsed()) {
      std::vector<EstimatorKind> kinds;
      for (const auto& name : est_names) {
        const auto kind = parse_estimator_kind(name);
        if (!kind || *kind == EstimatorKind::Oracle) {
          throw InputError("--estimators: unknown or unavailable estimator '" + name + "'");
        }
        kinds.push_back(*kind);
      }
      if (kinds.empty()) kinds = default_sample_estimators();
      auto in = detail::open_input(est_input, "--input");
      const auto sample = read_sample_csv(in, est_v);
      const auto doc = estimates_to_json(sample, est_v, kinds);
      detail::Sink sink(est_out, out);
      *sink << doc.dump(2) << '\n';
      sink.finish();
    } else if (exp->parsed()) {
      auto in = detail::open_input(exp_config, "--config");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("--config: malformed JSON: ") + e.what());
      }
      const auto config = config_from_json(j);
      const auto table = run_replications(config);
      const auto summary = summarize_table(config, table);
      detail::Sink sink(exp_out, out);
      *sink << summary_to_json(summary).dump(2) << '\n';
      sink.finish();
      if (!exp_raw_z.empty()) {
        std::ostringstream discard;
        detail::Sink raw(exp_raw_z, discard);
        write_raw_z_csv(*raw, config, table);
        raw.finish();
      }
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace telegraph::cli
