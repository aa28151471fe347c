// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "telegraph/simulate.hpp"

namespace telegraph {

/// Malformed sample or configuration input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double parse_double(std::string_view text, std::size_t line, const char* column) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InputError("line " + std::to_string(line) + ": column '" + column + "' is not a finite number");
  }
  return value;
}

}  // namespace detail

/// Writes `t,x` rows with 17 significant digits; t_i = i*delta.
inline void write_sample_csv(std::ostream& out, const DiscreteSample& sample) {
  char buf[64];
  out << "t,x\n";
  const auto x = sample.positions();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) * sample.delta();
    auto r = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::general, 17);
    *r.ptr++ = ',';
    r = std::to_chars(r.ptr, buf + sizeof buf, x[i], std::chars_format::general, 17);
    *r.ptr++ = '\n';
    out.write(buf, r.ptr - buf);
  }
}

/// Reads the `t,x` format. delta is taken as t_1 - t_0 and every t_i must
/// match i*delta to 1e-9 relative.
inline DiscreteSample read_sample_csv(std::istream& in, double v) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("sample: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x") throw InputError("sample: header must be 't,x', got '" + line + "'");

  std::vector<double> times;
  std::vector<double> positions;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("line " + std::to_string(lineno) + ": expected two columns 't,x'");
    const std::string_view sv(line);
    times.push_back(detail::parse_double(sv.substr(0, comma), lineno, "t"));
    positions.push_back(detail::parse_double(sv.substr(comma + 1), lineno, "x"));
  }
  if (times.size() < 2) throw InputError("sample: need at least two rows");
  if (times[0] != 0.0) throw InputError("sample: column 't' must start at 0");
  const double delta = times[1] - times[0];
  if (!(delta > 0.0)) throw InputError("sample: column 't' must be increasing");
  for (std::size_t i = 2; i < times.size(); ++i) {
    const double expected = static_cast<double>(i) * delta;
    if (std::abs(times[i] - expected) > 1e-9 * expected) {
      throw InputError("line " + std::to_string(i + 2) + ": column 't' is not on an equidistant grid");
    }
  }
  try {
    return DiscreteSample(delta, std::move(positions), v);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("sample: ") + e.what());
  }
}

}  // namespace telegraph
