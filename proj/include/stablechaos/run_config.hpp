#pragma once

// Run configuration: a flat "key = value" text format with strict validation.
// Unknown keys are rejected so a typo cannot silently fall back to a default.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "stablechaos/chaos_expansion.hpp"
#include "stablechaos/kernels.hpp"
#include "stablechaos/stable_sampling.hpp"

namespace stablechaos {

struct RunConfig {
  KernelKind equation = KernelKind::heat;  // required key "equation"
  double alpha = 0.0;                      // required key "alpha"
  int dim = 1;
  double delta = 1.5;
  double horizon = 1.0;
  std::size_t atoms = 1000;
  std::uint64_t seed = 42;
  SolutionMode mode = SolutionMode::additive;
  std::optional<int> max_order;  // nullopt: unbounded
  int t_points = 101;
  int x_points = 101;
  double x_min = 0.0;
  double x_max = 1.0;
  std::string output_path;

  StableParams stable_params() const { return StableParams{alpha, horizon, dim}; }
  Kernel kernel() const { return make_kernel(equation, dim); }
  WeightFn weight() const { return make_weight(delta, stable_params()); }
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config: key '" + key + "': " + why);
}

inline std::string_view config_trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double config_double(const std::string& key, std::string_view value) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    config_fail(key, "expected a number, got '" + std::string(value) + "'");
  return v;
}

inline long long config_int(const std::string& key, std::string_view value) {
  long long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    config_fail(key, "expected an integer, got '" + std::string(value) + "'");
  return v;
}

inline std::uint64_t config_u64(const std::string& key, std::string_view value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    config_fail(key, "expected an unsigned integer, got '" + std::string(value) + "'");
  return v;
}

}  // namespace detail

// Parses configuration text.  Blank lines and lines starting with '#' are
// ignored; every other line must read "key = value" with a known key.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  bool saw_equation = false, saw_alpha = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = detail::config_trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config: line is not 'key = value': '" + std::string(line) +
                                  "'");
    const std::string key{detail::config_trim(line.substr(0, eq))};
    const std::string_view value = detail::config_trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: empty key");
    if (value.empty()) detail::config_fail(key, "empty value");

    if (key == "equation") {
      if (value == "heat")
        cfg.equation = KernelKind::heat;
      else if (value == "wave")
        cfg.equation = KernelKind::wave;
      else
        detail::config_fail(key, "expected 'heat' or 'wave'");
      saw_equation = true;
    } else if (key == "alpha") {
      cfg.alpha = detail::config_double(key, value);
      saw_alpha = true;
    } else if (key == "dim") {
      cfg.dim = static_cast<int>(detail::config_int(key, value));
    } else if (key == "delta") {
      cfg.delta = detail::config_double(key, value);
    } else if (key == "horizon") {
      cfg.horizon = detail::config_double(key, value);
    } else if (key == "atoms") {
      const long long v = detail::config_int(key, value);
      if (v < 0) detail::config_fail(key, "must be >= 0");
      cfg.atoms = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      cfg.seed = detail::config_u64(key, value);
    } else if (key == "mode") {
      if (value == "additive")
        cfg.mode = SolutionMode::additive;
      else if (value == "multiplicative")
        cfg.mode = SolutionMode::multiplicative;
      else
        detail::config_fail(key, "expected 'additive' or 'multiplicative'");
    } else if (key == "max_order") {
      if (value == "unbounded") {
        cfg.max_order.reset();
      } else {
        const long long v = detail::config_int(key, value);
        if (v < 0) detail::config_fail(key, "must be >= 0 or 'unbounded'");
        cfg.max_order = static_cast<int>(v);
      }
    } else if (key == "t_points") {
      cfg.t_points = static_cast<int>(detail::config_int(key, value));
    } else if (key == "x_points") {
      cfg.x_points = static_cast<int>(detail::config_int(key, value));
    } else if (key == "x_min") {
      cfg.x_min = detail::config_double(key, value);
    } else if (key == "x_max") {
      cfg.x_max = detail::config_double(key, value);
    } else if (key == "output_path") {
      cfg.output_path = std::string(value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  if (!saw_equation) throw std::invalid_argument("config: missing required key 'equation'");
  if (!saw_alpha) throw std::invalid_argument("config: missing required key 'alpha'");

  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 2.0))
    detail::config_fail("alpha", "must lie in (0, 2)");
  if (cfg.dim < 1) detail::config_fail("dim", "must be >= 1");
  if (!(cfg.horizon > 0.0)) detail::config_fail("horizon", "must be positive");
  if (cfg.t_points < 2) detail::config_fail("t_points", "grid needs at least 2 points");
  if (cfg.x_points < 2) detail::config_fail("x_points", "grid needs at least 2 points");
  if (!(cfg.x_min < cfg.x_max)) detail::config_fail("x_max", "must exceed x_min");

  // hypothesis gate: reject parameter sets whose kernel alpha-mass is infinite
  Kernel k;
  try {
    k = cfg.kernel();
  } catch (const std::domain_error& e) {
    detail::config_fail("dim", e.what());
  }
  if (!green_alpha_integrable(k, cfg.alpha))
    detail::config_fail("alpha",
                        "kernel alpha-mass is infinite for this (equation, dim, alpha)");
  if (!(cfg.delta > static_cast<double>(cfg.dim) / cfg.alpha))
    detail::config_fail("delta", "must exceed dim/alpha");
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace stablechaos
