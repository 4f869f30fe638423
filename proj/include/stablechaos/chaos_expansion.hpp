#pragma once

// Chaos-series evaluation of the multiplicative equation.  The order-n term
// of the solution series collapses, per cloud, to a sum over size-n atom
// subsets of chain products of Green's functions; a dynamic program over
// time-ordered atoms evaluates the full series in O(J^2) per cloud and O(J)
// per evaluation point, with a brute-force subset enumerator kept as the
// independent cross-check.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "stablechaos/detail/numeric.hpp"
#include "stablechaos/kernels.hpp"
#include "stablechaos/noise_field.hpp"
#include "stablechaos/stable_sampling.hpp"

namespace stablechaos {

enum class SolutionMode { additive, multiplicative };

struct ChaosConfig {
  std::optional<int> max_order;  // nullopt: full series
  std::size_t cloud_size = 1000;
  SolutionMode mode = SolutionMode::multiplicative;
};

// ------------------------------------------------------------------
// chain kernel
// ------------------------------------------------------------------

// Product of Green's-function links along a time-ordered chain of space-time
// points, ending with the link to (t, x):
//   G_{t - t_n}(x - x_n) * G_{t_n - t_{n-1}}(x_n - x_{n-1}) * ... ,
// gated by the strict ordering 0 < t_1 < ... < t_n < t.  An empty chain has
// value 1; any ordering violation gives 0.
inline double kernel_chain(const Kernel& k, std::span<const double> times,
                           std::span<const double> positions, double t,
                           std::span<const double> x) {
  const std::size_t n = times.size();
  const int d = k.dim;
  if (positions.size() != n * static_cast<std::size_t>(d))
    throw std::invalid_argument("kernel_chain: positions size must be times size * dim");
  if (n == 0) return 1.0;
  if (!(times[0] > 0.0) || !(times[n - 1] < t)) return 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(times[i] < times[i + 1])) return 0.0;
  double value = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double r2 = detail::squared_distance(positions.data() + (i + 1) * d,
                                               positions.data() + i * d, d);
    value *= green_radial2(k, times[i + 1] - times[i], r2);
    if (value == 0.0) return 0.0;
  }
  const double r2 = detail::squared_distance(x.data(), positions.data() + (n - 1) * d, d);
  return value * green_radial2(k, t - times[n - 1], r2);
}

// ------------------------------------------------------------------
// brute-force order-n term
// ------------------------------------------------------------------

// Order-n series term by direct enumeration of size-n atom subsets in time
// order.  The combinatorial guard rejects clouds where C(J, n) exceeds 1e7.
inline double multiple_integral_bruteforce(const AtomCloud& cloud, const Kernel& k, int n,
                                           double t, std::span<const double> x) {
  if (n < 1) throw std::invalid_argument("multiple_integral_bruteforce: order must be >= 1");
  if (k.dim != cloud.params().dim)
    throw std::invalid_argument("multiple_integral_bruteforce: dimension mismatch");
  const std::size_t count = cloud.size();
  if (static_cast<std::size_t>(n) > count) return 0.0;  // nilpotence on finite clouds
  if (!(detail::binomial(count, static_cast<std::size_t>(n)) <= 1e7))
    throw std::length_error("multiple_integral_bruteforce: C(J, n) exceeds 1e7");

  const auto& order = cloud.time_order();
  const double* times = cloud.times().data();
  const double* positions = cloud.positions().data();
  const double* weights = cloud.series_weights().data();
  const int d = k.dim;
  detail::NeumaierSum sum;

  // Depth-first walk over index combinations taken from the time-sorted list;
  // partial products prune dead branches (wave cones kill most of them).
  auto extend = [&](std::size_t cursor_begin, std::size_t prev, double partial, int picked,
                    auto&& self) -> void {
    for (std::size_t c = cursor_begin; c + (static_cast<std::size_t>(n) - picked) <= count; ++c) {
      const std::size_t i = order[c];
      const double ti = times[i];
      if (ti >= t) break;  // later atoms cannot start or continue a chain below t
      if (ti <= 0.0) continue;
      double link = 1.0;
      if (picked > 0) {
        const double r2 = detail::squared_distance(
            positions + i * static_cast<std::size_t>(d),
            positions + prev * static_cast<std::size_t>(d), d);
        link = green_radial2(k, ti - times[prev], r2);
        if (link == 0.0) continue;
      }
      const double value = partial * weights[i] * link;
      if (picked + 1 == n) {
        const double r2 = detail::squared_distance(
            x.data(), positions + i * static_cast<std::size_t>(d), d);
        const double g = green_radial2(k, t - ti, r2);
        if (g != 0.0) sum.add(value * g);
      } else {
        self(c + 1, i, value, picked + 1, self);
      }
    }
  };
  extend(0, 0, 1.0, 0, extend);
  return sum.value();
}

// ------------------------------------------------------------------
// dynamic-programming evaluator
// ------------------------------------------------------------------

// Frozen per-cloud chain state.  In time order, the accumulator of atom i is
//   A_i = v_i * (1 + sum_{T_j < T_i} G_{T_i - T_j}(X_i - X_j) A_j),
// the total weight of all chains ending at atom i.  With a finite max_order
// the same recursion runs order-by-order and the accumulators of orders
// 1..max_order are summed.  Once built, evaluation at (t, x) is a read-only
// O(J) pass and parallelizes freely across targets.
class ChainWeights {
 public:
  ChainWeights() = default;

  ChainWeights(const AtomCloud& cloud, const Kernel& k, std::optional<int> max_order)
      : kernel_(k), dim_(k.dim) {
    if (k.dim != cloud.params().dim)
      throw std::invalid_argument("ChainWeights: kernel and cloud dimension disagree");
    if (!green_alpha_integrable(k, cloud.params().alpha))
      throw std::domain_error(
          "ChainWeights: alpha-mass of the kernel is infinite for these parameters");
    if (max_order && *max_order < 0)
      throw std::invalid_argument("ChainWeights: max_order must be >= 0");

    const std::size_t n = cloud.size();
    const auto& order = cloud.time_order();
    times_.resize(n);
    prefactors_.resize(n);
    positions_.resize(n * static_cast<std::size_t>(dim_));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t i = order[j];
      times_[j] = cloud.time(i);
      prefactors_[j] = cloud.series_weight(i);
      const auto p = cloud.position(i);
      std::copy(p.begin(), p.end(), positions_.begin() + j * static_cast<std::size_t>(dim_));
    }
    max_order_ = max_order;
    if (!max_order)
      build_full_();
    else
      build_truncated_(*max_order);
  }

  // u(t, x) = 1 + sum_i G_{t - T_i}(x - X_i) * A_i over atoms before t.
  double eval(double t, std::span<const double> x) const {
    return 1.0 + detail::green_weighted_tail(
                     kernel_, times_.size(), [](std::size_t j) { return j; }, times_.data(),
                     positions_.data(), accumulated_.data(), t, x.data());
  }

  std::size_t size() const noexcept { return times_.size(); }
  std::optional<int> max_order() const noexcept { return max_order_; }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> prefactors() const noexcept { return prefactors_; }
  std::span<const double> accumulated() const noexcept { return accumulated_; }

 private:
  double link_(std::size_t to, std::size_t from) const noexcept {
    const double r2 = detail::squared_distance(
        positions_.data() + to * static_cast<std::size_t>(dim_),
        positions_.data() + from * static_cast<std::size_t>(dim_), dim_);
    return green_radial2(kernel_, times_[to] - times_[from], r2);
  }

  void build_full_() {
    const std::size_t n = times_.size();
    accumulated_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (times_[i] <= 0.0) continue;  // chains must start strictly after time zero
      detail::NeumaierSum inner;
      inner.add(1.0);
      for (std::size_t j = 0; j < i; ++j) {
        if (accumulated_[j] == 0.0) continue;
        const double g = link_(i, j);
        if (g != 0.0) inner.add(g * accumulated_[j]);
      }
      accumulated_[i] = prefactors_[i] * inner.value();
    }
  }

  void build_truncated_(int max_order) {
    const std::size_t n = times_.size();
    accumulated_.assign(n, 0.0);
    if (max_order == 0 || n == 0) return;
    std::vector<double> cur(n, 0.0), next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      cur[i] = times_[i] > 0.0 ? prefactors_[i] : 0.0;  // order 1
    for (std::size_t i = 0; i < n; ++i) accumulated_[i] = cur[i];
    for (int m = 2; m <= max_order; ++m) {
      for (std::size_t i = 0; i < n; ++i) {
        if (times_[i] <= 0.0) {
          next[i] = 0.0;
          continue;
        }
        detail::NeumaierSum inner;
        for (std::size_t j = 0; j < i; ++j) {
          if (cur[j] == 0.0) continue;
          const double g = link_(i, j);
          if (g != 0.0) inner.add(g * cur[j]);
        }
        next[i] = prefactors_[i] * inner.value();
      }
      std::swap(cur, next);
      for (std::size_t i = 0; i < n; ++i) accumulated_[i] += cur[i];
    }
  }

  Kernel kernel_;
  int dim_ = 1;
  std::optional<int> max_order_;
  std::vector<double> times_;        // ascending
  std::vector<double> positions_;    // flat, time order
  std::vector<double> prefactors_;   // v_i, time order
  std::vector<double> accumulated_;  // A_i (or sum of order-resolved A_i^{(m)})
};

// One-shot evaluation of the configured solution at (t, x).
inline double solution_dp(const AtomCloud& cloud, const Kernel& k, const ChaosConfig& cfg,
                          double t, std::span<const double> x) {
  if (cfg.mode == SolutionMode::additive) return additive_solution(cloud, k, t, x);
  return ChainWeights(cloud, k, cfg.max_order).eval(t, x);
}

// ------------------------------------------------------------------
// Picard iteration
// ------------------------------------------------------------------

// Fixed-point iterates u_0 = 1, u_{m+1}(t,x) = 1 + sum_i v_i G_{t-T_i}(x-X_i)
// u_m(T_i, X_i), with the atom-site values memoized per level.  Returns
// [u_0(t,x), ..., u_levels(t,x)]; level m equals the series truncated at
// order m.
inline std::vector<double> picard_iterate(const AtomCloud& cloud, const Kernel& k, int levels,
                                          double t, std::span<const double> x) {
  if (levels < 0) throw std::invalid_argument("picard_iterate: levels must be >= 0");
  if (k.dim != cloud.params().dim)
    throw std::invalid_argument("picard_iterate: kernel and cloud dimension disagree");
  if (!green_alpha_integrable(k, cloud.params().alpha))
    throw std::domain_error(
        "picard_iterate: alpha-mass of the kernel is infinite for these parameters");

  const std::size_t n = cloud.size();
  const auto& order = cloud.time_order();
  const double* times = cloud.times().data();
  const double* positions = cloud.positions().data();
  const double* v = cloud.series_weights().data();

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(levels) + 1);
  values.push_back(1.0);

  std::vector<double> site_prev(n, 1.0), site_cur(n, 0.0), effective(n, 0.0);
  for (int level = 1; level <= levels; ++level) {
    for (std::size_t i = 0; i < n; ++i) effective[i] = v[i] * site_prev[i];
    values.push_back(1.0 + detail::green_weighted_tail(
                               k, n, [&](std::size_t j) { return order[j]; }, times, positions,
                               effective.data(), t, x.data()));
    if (level == levels) break;  // last site table would go unused
    for (std::size_t i = 0; i < n; ++i)
      site_cur[i] = 1.0 + detail::green_weighted_tail(
                              k, n, [&](std::size_t j) { return order[j]; }, times, positions,
                              effective.data(), times[i], positions + i * cloud.params().dim);
    std::swap(site_prev, site_cur);
  }
  return values;
}

// ------------------------------------------------------------------
// tail asymptotics reference
// ------------------------------------------------------------------

// Leading-order tail weight of the order-n series term:
//   n (n!)^{alpha-2} alpha^{n-1} ||f||_alpha^alpha (log lambda)^{n-1} lambda^{-alpha}.
inline double tail_reference(int n, double alpha, double f_norm_alpha, double lambda) {
  if (n < 1) throw std::invalid_argument("tail_reference: order must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("tail_reference: alpha must lie in (0, 2)");
  if (!(f_norm_alpha > 0.0))
    throw std::invalid_argument("tail_reference: kernel norm must be positive");
  if (!(lambda > 1.0)) throw std::invalid_argument("tail_reference: lambda must exceed 1");
  const double nd = static_cast<double>(n);
  return nd * std::pow(std::tgamma(nd + 1.0), alpha - 2.0) * std::pow(alpha, nd - 1.0) *
         f_norm_alpha * std::pow(std::log(lambda), nd - 1.0) * std::pow(lambda, -alpha);
}

}  // namespace stablechaos
