#pragma once

// The noise field itself: box measurements of the driving stable noise,
// empirical characteristic functions with their replication harness, and the
// first-order (additive) solution evaluator.

#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "stablechaos/detail/numeric.hpp"
#include "stablechaos/detail/parallel.hpp"
#include "stablechaos/detail/rng.hpp"
#include "stablechaos/kernels.hpp"
#include "stablechaos/stable_sampling.hpp"

namespace stablechaos {

// Axis-aligned space-time box [t_lo, t_hi] x prod_k [x_lo[k], x_hi[k]].
struct BoxRegion {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<double> x_lo;
  std::vector<double> x_hi;

  int dim() const noexcept { return static_cast<int>(x_lo.size()); }

  double lebesgue() const noexcept {
    double v = t_hi - t_lo;
    for (std::size_t k = 0; k < x_lo.size(); ++k) v *= x_hi[k] - x_lo[k];
    return v;
  }

  bool contains(double t, std::span<const double> x) const noexcept {
    if (t < t_lo || t > t_hi) return false;
    for (std::size_t k = 0; k < x_lo.size(); ++k)
      if (x[k] < x_lo[k] || x[k] > x_hi[k]) return false;
    return true;
  }

  void validate(int expected_dim) const {
    if (dim() != expected_dim || x_hi.size() != x_lo.size())
      throw std::invalid_argument("BoxRegion: dimension mismatch");
    if (!(t_hi >= t_lo)) throw std::invalid_argument("BoxRegion: t_hi < t_lo");
    for (std::size_t k = 0; k < x_lo.size(); ++k)
      if (!(x_hi[k] >= x_lo[k])) throw std::invalid_argument("BoxRegion: x_hi < x_lo");
  }
};

// Truncated series value of the noise charged to a box:
//   Z(B) = sum_i v_i 1_B(T_i, X_i).
inline double z_measure(const AtomCloud& cloud, const BoxRegion& box) {
  box.validate(cloud.params().dim);
  detail::NeumaierSum sum;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (box.contains(cloud.time(i), cloud.position(i))) sum.add(cloud.series_weight(i));
  return sum.value();
}

// Mean of exp(i u s) over the sample.
inline std::complex<double> empirical_cf(std::span<const double> samples, double u) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: empty sample");
  detail::NeumaierSum re, im;
  for (const double s : samples) {
    re.add(std::cos(u * s));
    im.add(std::sin(u * s));
  }
  const double n = static_cast<double>(samples.size());
  return {re.value() / n, im.value() / n};
}

// Characteristic function the box measurement converges to:
// exp(-leb(B) |u|^alpha / C_alpha).
inline double target_cf(double alpha, double lebesgue, double u) {
  return std::exp(-lebesgue / stable_constant(alpha) * std::pow(std::abs(u), alpha));
}

namespace detail {

// Shared evaluator core: sum over atoms, in time order, of
// weight[i] * G(t - time_i, x - pos_i), skipping atoms at or before time zero
// and stopping at the first atom with time >= t.  Both the additive solution
// and the chain evaluator run this exact loop so their outputs agree
// bit-for-bit when the weights coincide.
template <class IndexFn>
double green_weighted_tail(const Kernel& k, std::size_t count, IndexFn index,
                           const double* times, const double* positions, const double* weights,
                           double t, const double* x) {
  NeumaierSum acc;
  const int d = k.dim;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t i = index(j);
    const double ti = times[i];
    if (ti >= t) break;  // time-ordered traversal: nothing later can contribute
    if (ti <= 0.0) continue;
    const double r2 = squared_distance(x, positions + i * static_cast<std::size_t>(d), d);
    const double g = green_radial2(k, t - ti, r2);
    if (g != 0.0) acc.add(weights[i] * g);
  }
  return acc.value();
}

}  // namespace detail

// First-order solution  u(t,x) = 1 + sum_i v_i G_{t-T_i}(x - X_i)  with the
// chain convention: atoms at time zero and atoms at or after t are excluded.
inline double additive_solution(const AtomCloud& cloud, const Kernel& k, double t,
                                std::span<const double> x) {
  if (k.dim != cloud.params().dim)
    throw std::invalid_argument("additive_solution: kernel and cloud dimension disagree");
  if (!green_alpha_integrable(k, cloud.params().alpha))
    throw std::domain_error(
        "additive_solution: alpha-mass of the kernel is infinite for these parameters");
  const auto& order = cloud.time_order();
  return 1.0 + detail::green_weighted_tail(
                   k, cloud.size(), [&](std::size_t j) { return order[j]; },
                   cloud.times().data(), cloud.positions().data(),
                   cloud.series_weights().data(), t, x.data());
}

// ------------------------------------------------------------------
// characteristic-function replication harness
// ------------------------------------------------------------------

struct CfRow {
  double u = 0.0;
  double empirical_re = 0.0;
  double empirical_im = 0.0;
  double target = 0.0;
  double band = 0.0;  // acceptance half-width 4 / sqrt(replications)
};

struct CfHarnessConfig {
  StableParams params;
  WeightFn weight;
  BoxRegion box;
  std::size_t cloud_size = 2000;
  std::size_t replications = 20000;
  std::uint64_t seed = 42;
  std::vector<double> frequencies = {0.5, 1.0, 2.0};
  int threads = 0;  // 0: resolve from environment
};

// Replicates Z(B) over independent seeded clouds and compares the empirical
// characteristic function to its stable-law target.  Block sums are merged in
// block order, so the result is independent of the thread count.
inline std::vector<CfRow> cf_replication(const CfHarnessConfig& cfg) {
  cfg.params.validate();
  cfg.box.validate(cfg.params.dim);
  if (cfg.replications == 0) throw std::invalid_argument("cf_replication: no replications");
  const std::size_t n_freq = cfg.frequencies.size();
  const std::size_t n_blocks = 128;
  std::vector<detail::NeumaierSum> block_re(n_blocks * n_freq), block_im(n_blocks * n_freq);

  detail::parallel_blocks(
      cfg.replications, n_blocks, cfg.threads,
      [&](std::size_t lo, std::size_t hi, std::size_t block) {
        AtomCloud cloud;
        for (std::size_t r = lo; r < hi; ++r) {
          const std::uint64_t rep_seed =
              detail::mix64(cfg.seed ^ detail::CounterRng(cfg.seed, detail::Stream::replicate, r)
                                           .next_u64());
          if (cloud.size() == 0)
            cloud = AtomCloud(cfg.params, cfg.weight, rep_seed, cfg.cloud_size);
          else
            cloud.resample(rep_seed);
          const double z = z_measure(cloud, cfg.box);
          for (std::size_t f = 0; f < n_freq; ++f) {
            block_re[block * n_freq + f].add(std::cos(cfg.frequencies[f] * z));
            block_im[block * n_freq + f].add(std::sin(cfg.frequencies[f] * z));
          }
        }
      });

  const double n = static_cast<double>(cfg.replications);
  const double band = 4.0 / std::sqrt(n);
  const double leb = cfg.box.lebesgue();
  std::vector<CfRow> rows(n_freq);
  for (std::size_t f = 0; f < n_freq; ++f) {
    detail::NeumaierSum re, im;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      re.add(block_re[b * n_freq + f].value());
      im.add(block_im[b * n_freq + f].value());
    }
    rows[f] = CfRow{cfg.frequencies[f], re.value() / n, im.value() / n,
                    target_cf(cfg.params.alpha, leb, cfg.frequencies[f]), band};
  }
  return rows;
}

// CSV schema: u,empirical_re,empirical_im,target,band.
inline void write_cf_csv(std::ostream& os, const std::vector<CfRow>& rows) {
  os << "u,empirical_re,empirical_im,target,band\n";
  std::string line;
  for (const CfRow& r : rows) {
    line.clear();
    detail::append_double(line, r.u);
    line += ',';
    detail::append_double(line, r.empirical_re);
    line += ',';
    detail::append_double(line, r.empirical_im);
    line += ',';
    detail::append_double(line, r.target);
    line += ',';
    detail::append_double(line, r.band);
    line += '\n';
    os << line;
  }
}

}  // namespace stablechaos
