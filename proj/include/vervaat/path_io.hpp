#ifndef VERVAAT_PATH_IO_HPP_
#define VERVAAT_PATH_IO_HPP_

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vervaat/path.hpp"

namespace vervaat {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_real(std::string_view s) {
  try {
    std::size_t used = 0;
    const double x = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed number '" + std::string(s) + "'");
  }
}

/// Writes `t,value` header plus one row per grid point.
inline void write_path_csv(std::ostream& out, const SampledPath& path) {
  out << "t,value\n";
  for (std::size_t i = 0; i <= path.n_steps(); ++i)
    out << format_real(path.time(i)) << ',' << format_real(path[i]) << '\n';
}

/*
 * Reads one or more paths written by write_path_csv. Blocks are separated by
 * blank lines or repeated headers; lines starting with '#' are ignored.
 * The grid must be uniform and start at t = 0.
 */
inline std::vector<SampledPath> read_paths_csv(std::istream& in) {
  std::vector<SampledPath> paths;
  std::vector<double> times, values;
  auto flush = [&] {
    if (times.empty()) return;
    if (times.size() < 2 || times.front() != 0.0)
      throw std::invalid_argument("path block must start at t=0 and hold at least 2 rows");
    paths.emplace_back(times.back(), values);
    times.clear();
    values.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') {
      flush();
      continue;
    }
    if (line == "t,value") {
      flush();
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("expected 't,value' row, got '" + line + "'");
    times.push_back(parse_real(std::string_view(line).substr(0, comma)));
    values.push_back(parse_real(std::string_view(line).substr(comma + 1)));
  }
  flush();
  return paths;
}

/// Steps as a string over {+,-}.
inline std::string to_step_string(const LatticeWalk& w) {
  std::string s;
  s.reserve(w.length());
  for (std::size_t j = 1; j <= w.length(); ++j) s.push_back(w.step(j) > 0 ? '+' : '-');
  return s;
}

inline LatticeWalk from_step_string(std::string_view s) {
  std::vector<int> steps;
  steps.reserve(s.size());
  for (char c : s) {
    if (c == '+') steps.push_back(1);
    else if (c == '-') steps.push_back(-1);
    else throw std::invalid_argument("step strings use only '+' and '-'");
  }
  return LatticeWalk::from_steps(steps);
}

}  // namespace vervaat

#endif  // VERVAAT_PATH_IO_HPP_
