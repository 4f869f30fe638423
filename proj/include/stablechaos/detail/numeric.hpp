#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

namespace stablechaos::detail {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Neumaier-compensated accumulator.  Long alternating-sign sums (chain
// weights, characteristic-function averages) lose digits under plain
// addition; the compensation keeps them near working precision.
struct NeumaierSum {
  double s = 0.0;
  double c = 0.0;

  void add(double v) noexcept {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }

  double value() const noexcept { return s + c; }
};

// Lebesgue volume of the d-dimensional unit ball.
inline double unit_ball_volume(int dim) {
  return std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

// Surface area of the (d-1)-sphere bounding the unit ball.
inline double unit_sphere_area(int dim) {
  return 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// log(exp(a) + exp(b) + exp(c)) with -inf handled.
inline double log_sum_exp3(double a, double b, double c) noexcept {
  const double m = std::max({a, b, c});
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

// Binomial coefficient in double precision; saturates instead of overflowing.
inline double binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (r > 1e300) return std::numeric_limits<double>::infinity();
  }
  return r;
}

// Shortest-round-trip decimal rendering (17 significant digits, locale-free).
// Every CSV writer goes through here so output bytes are reproducible.
inline void append_double(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

inline double squared_distance(const double* a, const double* b, int dim) noexcept {
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    r2 += d * d;
  }
  return r2;
}

inline double squared_norm(const double* a, int dim) noexcept {
  double r2 = 0.0;
  for (int k = 0; k < dim; ++k) r2 += a[k] * a[k];
  return r2;
}

}  // namespace stablechaos::detail
