#pragma once

// Run configuration: key=value files, presets and command-line overrides.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/limitset.hpp"

namespace kleinian {

struct RunConfig {
  std::string command;
  std::string preset;
  std::string marking;
  std::string seeds;
  std::string input;
  std::string out;
  double epsilon = 1e-3;
  int depth = 12;
  double tol = 1e-6;
  Window window{-1, -1, 2, 2};
  int resolution = 512;
  int threads = 1;
  int radius = 1;
};

namespace detail {

inline std::string config_trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x))
    throw Error(ErrorCode::ParseError, key + ": expected a number, got '" + v + "'");
  return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error(ErrorCode::ParseError, key + ": expected an integer, got '" + v + "'");
  if (x < -1000000 || x > 1000000) throw Error(ErrorCode::RangeError, key + " out of range");
  return static_cast<int>(x);
}

inline Window parse_window(const std::string& v) {
  std::string s = v;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream is(s);
  std::vector<std::string> parts;
  for (std::string t; is >> t;) parts.push_back(t);
  if (parts.size() != 4) throw Error(ErrorCode::ParseError, "window: expected x0,y0,x1,y1");
  Window w{parse_real("window", parts[0]), parse_real("window", parts[1]), parse_real("window", parts[2]),
           parse_real("window", parts[3])};
  if (!w.valid()) throw Error(ErrorCode::RangeError, "window must satisfy x0 < x1 and y0 < y1");
  return w;
}

template <class T>
void check_range(const std::string& key, T x, T lo, T hi, bool open_lo = false) {
  if (x < lo || x > hi || (open_lo && x == lo)) {
    std::ostringstream os;
    os << key << "=" << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
    throw Error(ErrorCode::RangeError, os.str());
  }
}

}  // namespace detail

/// Sets one key; throws UnknownKey, ParseError or RangeError.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "preset") {
    if (!value.empty() && value != "hw-gasket") throw Error(ErrorCode::RangeError, "unknown preset '" + value + "'");
    c.preset = value;
  } else if (key == "marking") {
    c.marking = value;
  } else if (key == "seeds") {
    c.seeds = value;
  } else if (key == "input") {
    c.input = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "epsilon") {
    c.epsilon = parse_real(key, value);
    check_range(key, c.epsilon, 0.0, 1.0, true);
  } else if (key == "depth") {
    c.depth = parse_int(key, value);
    check_range(key, c.depth, 0, 40);
  } else if (key == "tol") {
    c.tol = parse_real(key, value);
    check_range(key, c.tol, 0.0, 0.1, true);
  } else if (key == "resolution") {
    c.resolution = parse_int(key, value);
    check_range(key, c.resolution, 16, 8192);
  } else if (key == "threads") {
    c.threads = parse_int(key, value);
    check_range(key, c.threads, 1, 256);
  } else if (key == "radius") {
    c.radius = parse_int(key, value);
    check_range(key, c.radius, 1, 64);
  } else if (key == "window") {
    c.window = parse_window(value);
  } else {
    throw Error(ErrorCode::UnknownKey, "unknown key '" + key + "'");
  }
}

/// Ordered key=value pairs from a config stream, errors tagged with the line.
inline std::vector<std::pair<std::string, std::string>> read_config_pairs(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::config_trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = detail::config_trim(line.substr(0, eq)), value = detail::config_trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty key");
    // Check the value now so the error can name its line.
    RunConfig probe;
    try {
      set_config_value(probe, key, value);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
    out.emplace_back(key, value);
  }
  return out;
}

inline void apply_preset(RunConfig& c) {
  if (c.preset == "hw-gasket") {
    c.epsilon = 1e-3;
    c.depth = 12;
    c.window = {-1, -1, 2, 2};
  }
}

/// Defaults, then the preset, then the file, then command-line overrides.
/// The preset itself may come from either source; the command line wins.
inline RunConfig merge_config(const std::vector<std::pair<std::string, std::string>>& file,
                              const std::vector<std::pair<std::string, std::string>>& overrides,
                              std::string command = {}) {
  RunConfig c;
  c.command = std::move(command);
  for (const auto* src : {&file, &overrides})
    for (const auto& [k, v] : *src)
      if (k == "preset") set_config_value(c, k, v);
  apply_preset(c);
  for (const auto* src : {&file, &overrides})
    for (const auto& [k, v] : *src)
      if (k != "preset") set_config_value(c, k, v);
  return c;
}

inline RunConfig load_config(std::istream& in, const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  return merge_config(read_config_pairs(in), overrides);
}

/// Shortest text that reads back as the same double.
inline std::string format_real(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

/// Effective configuration as key=value lines in a fixed order.
inline std::vector<std::string> echo_config(const RunConfig& c) {
  std::vector<std::string> out;
  if (!c.command.empty()) out.push_back("command=" + c.command);
  out.push_back("preset=" + c.preset);
  out.push_back("marking=" + c.marking);
  out.push_back("seeds=" + c.seeds);
  out.push_back("input=" + c.input);
  out.push_back("epsilon=" + format_real(c.epsilon));
  out.push_back("depth=" + std::to_string(c.depth));
  out.push_back("tol=" + format_real(c.tol));
  out.push_back("window=" + format_real(c.window.x0) + "," + format_real(c.window.y0) + "," +
                format_real(c.window.x1) + "," + format_real(c.window.y1));
  out.push_back("resolution=" + std::to_string(c.resolution));
  out.push_back("threads=" + std::to_string(c.threads));
  out.push_back("radius=" + std::to_string(c.radius));
  return out;
}

}  // namespace kleinian
