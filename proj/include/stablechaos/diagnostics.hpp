#pragma once

// Numerical verification surface: Monte Carlo estimates of the weighted
// chain-kernel masses, their closed-form envelopes, the admissible exponent
// window, ratio diagnostics for the two series whose finiteness drives
// convergence of the chaos expansion, and Stirling sandwich constants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablechaos/chaos_expansion.hpp"
#include "stablechaos/detail/numeric.hpp"
#include "stablechaos/detail/parallel.hpp"
#include "stablechaos/detail/rng.hpp"
#include "stablechaos/kernels.hpp"
#include "stablechaos/stable_sampling.hpp"

namespace stablechaos {

// ------------------------------------------------------------------
// Monte Carlo chain mass
// ------------------------------------------------------------------

struct McEstimate {
  double estimate = 0.0;
  double stderr_mean = 0.0;
  std::size_t resampled = 0;  // non-finite draws that were redrawn
};

// Estimates the order-n weighted chain mass
//   K_n(t, x) = integral over 0 < t_1 < ... < t_n < t of
//               f_n(t_k, x_k; t, x)^p * prod_k phi(x_k)^{alpha - p} dx dt
// by importance sampling: times are sorted uniforms on [0, t] (simplex volume
// t^n / n!), positions are phi^alpha draws, and each sample is paired with
// its time-reversed antithetic twin.  Non-finite samples (wave kernel poles)
// are redrawn; more than 0.1% of them aborts the run.
inline McEstimate chain_pmass_mc(const Kernel& k, const WeightFn& w, int n, double p, double t,
                                 std::span<const double> x, std::size_t samples,
                                 std::uint64_t seed, int threads = 0) {
  if (n < 1) throw std::invalid_argument("chain_pmass_mc: order must be >= 1");
  if (samples < 100) throw std::invalid_argument("chain_pmass_mc: needs at least 100 samples");
  if (!(p > 0.0)) throw std::domain_error("chain_pmass_mc: p must be positive");
  if (!(t > 0.0)) throw std::domain_error("chain_pmass_mc: t must be positive");
  if (w.dim != k.dim) throw std::invalid_argument("chain_pmass_mc: dimension mismatch");

  const std::size_t pairs = samples / 2;
  const std::size_t n_blocks = 64;
  const int d = k.dim;
  const std::size_t nn = static_cast<std::size_t>(n);
  const double simplex = std::pow(t, n) / std::tgamma(n + 1.0);
  const std::size_t bad_limit = std::max<std::size_t>(1, samples / 1000);

  struct Block {
    detail::NeumaierSum sum, sum_sq;
    std::size_t bad = 0;
    bool aborted = false;
  };
  std::vector<Block> blocks(n_blocks);

  detail::parallel_blocks(
      pairs, n_blocks, threads, [&](std::size_t lo, std::size_t hi, std::size_t bi) {
        Block& blk = blocks[bi];
        std::vector<double> fwd_times(nn), rev_times(nn), positions(nn * d);
        for (std::size_t m = lo; m < hi && !blk.aborted; ++m) {
          detail::CounterRng rng(seed, detail::Stream::mc, m);
          double pair_value = 0.0;
          for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > 0 && ++blk.bad >= bad_limit) {
              blk.aborted = true;
              break;
            }
            for (std::size_t i = 0; i < nn; ++i) fwd_times[i] = t * rng.unit();
            std::sort(fwd_times.begin(), fwd_times.end());
            for (std::size_t i = 0; i < nn; ++i) rev_times[i] = t - fwd_times[nn - 1 - i];
            double phi_prod = 1.0;
            for (std::size_t i = 0; i < nn; ++i) {
              detail::sample_weight_position(rng, w, positions.data() + i * d);
              phi_prod *= w.value(std::span<const double>(positions.data() + i * d,
                                                          static_cast<std::size_t>(d)));
            }
            const double weight = simplex * std::pow(phi_prod, -p);
            const double fa = kernel_chain(k, fwd_times, positions, t, x);
            const double fb = kernel_chain(k, rev_times, positions, t, x);
            const double va = fa > 0.0 ? weight * std::pow(fa, p) : 0.0;
            const double vb = fb > 0.0 ? weight * std::pow(fb, p) : 0.0;
            pair_value = 0.5 * (va + vb);
            if (std::isfinite(pair_value)) break;
          }
          if (blk.aborted) break;
          blk.sum.add(pair_value);
          blk.sum_sq.add(pair_value * pair_value);
        }
      });

  std::size_t bad_total = 0;
  detail::NeumaierSum sum, sum_sq;
  for (const Block& blk : blocks) {
    if (blk.aborted)
      throw std::runtime_error(
          "chain_pmass_mc: more than 0.1% of the draws were non-finite; aborting");
    bad_total += blk.bad;
    sum.add(blk.sum.value());
    sum_sq.add(blk.sum_sq.value());
  }
  const double np = static_cast<double>(pairs);
  const double mean = sum.value() / np;
  const double var = std::max(0.0, (sum_sq.value() - np * mean * mean) / (np - 1.0));
  return McEstimate{mean, std::sqrt(var / np), bad_total};
}

// ------------------------------------------------------------------
// closed-form chain mass envelope
// ------------------------------------------------------------------

namespace detail {

// log of the geometric coefficient C_{eta,p,d} multiplying the order-n
// envelope; eta = delta (p - alpha).
inline double log_chain_bound_coeff(const Kernel& k, double p, double eta) {
  const double d = static_cast<double>(k.dim);
  const double split = std::max(std::pow(2.0, eta - 1.0), 1.0);
  if (k.kind == KernelKind::heat) {
    const double shape = 0.5 * d * (1.0 - p) + 1.0;
    return std::log(3.0) + std::log(heat_lp_prefactor(p, k.dim)) + std::log(split) +
           eta * std::log(d) + std::max(0.5 * eta * std::log(2.0 / p), 0.0) +
           std::lgamma(shape);
  }
  if (k.dim == 1) return std::log(3.0 * split) + (1.0 - p) * std::log(2.0);
  return std::log(3.0 * split) + (1.0 - p) * std::log(two_pi) - std::log(2.0 - p) +
         std::lgamma(3.0 - p);
}

// log of the closed-form envelope of the order-n weighted chain mass.
inline double log_chain_pmass_bound(const Kernel& k, const WeightFn& w, int n, double p,
                                    double t, double radius) {
  const double alpha = w.alpha;
  const double nd = static_cast<double>(n);
  const double eta = w.delta * (p - alpha);
  const double log_c0 = std::log(w.c0);
  const double log_t = std::log(t);
  const double log_r = radius > 0.0 ? std::log(radius) : -std::numeric_limits<double>::infinity();
  const double coeff = log_chain_bound_coeff(k, p, eta);
  if (k.kind == KernelKind::heat) {
    const double d = static_cast<double>(k.dim);
    const double shape = 0.5 * d * (1.0 - p) + 1.0;  // per-order time exponent
    const double poly = log_sum_exp3(0.0, nd * eta * log_r,
                                     0.5 * nd * eta * log_t + std::lgamma(0.5 * (1.0 + nd * eta)));
    return nd * ((p - alpha) * log_c0 + coeff) + poly + nd * shape * log_t -
           std::lgamma(nd * shape + 1.0);
  }
  const double a = wave_time_exponent(p, k.dim);
  const double poly = log_sum_exp3(0.0, nd * eta * log_r, nd * eta * log_t);
  return nd * ((p - alpha) * log_c0 + coeff) + poly + nd * a * log_t -
         std::lgamma(nd * a + 1.0);
}

}  // namespace detail

// Closed-form envelope dominating the order-n weighted chain mass.  Valid for
// alpha < p, and for heat kernels additionally p < 1 + 2/d.
inline double chain_pmass_bound(const Kernel& k, const WeightFn& w, int n, double p, double t,
                                std::span<const double> x) {
  if (n < 1) throw std::invalid_argument("chain_pmass_bound: order must be >= 1");
  if (w.dim != k.dim) throw std::invalid_argument("chain_pmass_bound: dimension mismatch");
  if (!(p > w.alpha)) throw std::domain_error("chain_pmass_bound: requires p > alpha");
  if (!(t > 0.0)) throw std::domain_error("chain_pmass_bound: t must be positive");
  if (k.kind == KernelKind::heat && !(p < 1.0 + 2.0 / static_cast<double>(k.dim)))
    throw std::domain_error("chain_pmass_bound: heat kernel requires p < 1 + 2/dim");
  if (k.kind == KernelKind::wave && k.dim == 2 && !(p < 2.0))
    throw std::domain_error("chain_pmass_bound: wave kernel in dim 2 requires p < 2");
  const double radius = std::sqrt(detail::squared_norm(x.data(), k.dim));
  return std::exp(detail::log_chain_pmass_bound(k, w, n, p, t, radius));
}

// ------------------------------------------------------------------
// admissible exponent window
// ------------------------------------------------------------------

struct PRange {
  double lo = 0.0;  // always open (p > alpha)
  double hi = 0.0;
  bool hi_closed = false;

  bool empty() const noexcept { return !(lo < hi); }
  bool contains(double p) const noexcept {
    return p > lo && (hi_closed ? p <= hi : p < hi);
  }
};

// Exponents p for which the order-n envelope decays factorially: p > alpha
// together with the kernel-specific growth condition.  Heat kernels need
// delta (p - alpha) < d (1 - p) + 2 and p < 1 + 2/d; wave kernels admit the
// whole of (alpha, 2] in d = 1 and (alpha, 2) in d = 2.
inline PRange admissible_p_range(const Kernel& k, double alpha, double delta) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("admissible_p_range: alpha must lie in (0, 2)");
  if (!green_alpha_integrable(k, alpha))
    throw std::domain_error("admissible_p_range: alpha-mass of the kernel is infinite");
  const double d = static_cast<double>(k.dim);
  if (!(delta > d / alpha))
    throw std::domain_error("admissible_p_range: delta must exceed dim/alpha");
  PRange r;
  r.lo = alpha;
  if (k.kind == KernelKind::wave) {
    r.hi = 2.0;
    r.hi_closed = k.dim == 1;
    return r;
  }
  const double integrability = 1.0 + 2.0 / d;              // open
  const double growth = (d + 2.0 + delta * alpha) / (delta + d);  // open
  r.hi = std::min({integrability, growth, 2.0});
  r.hi_closed = 2.0 < integrability && 2.0 < growth;
  return r;
}

// ------------------------------------------------------------------
// convergence reports
// ------------------------------------------------------------------

enum class Verdict { converges, diverges, inconclusive };

inline const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::converges: return "converges";
    case Verdict::diverges: return "diverges";
    default: return "inconclusive";
  }
}

struct ConvergenceReport {
  double p = 0.0;
  std::vector<double> terms;      // a_1 .. a_{n_max} (may underflow to zero)
  std::vector<double> log_terms;  // exact logs used for the ratio diagnostics
  Verdict verdict = Verdict::inconclusive;
  double ratio_estimate = 0.0;  // extrapolated limit of a_{n+1}/a_n
  std::string notes;

  void write(std::ostream& os) const {
    os << "p=" << detail::format_double(p) << '\n';
    os << "n,term,ratio\n";
    std::string line;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      line.clear();
      line += std::to_string(i + 1);
      line += ',';
      detail::append_double(line, terms[i]);
      line += ',';
      if (i == 0)
        line += "nan";
      else
        detail::append_double(line, std::exp(log_terms[i] - log_terms[i - 1]));
      line += '\n';
      os << line;
    }
    os << "verdict=" << verdict_name(verdict)
       << " ratio_estimate=" << detail::format_double(ratio_estimate);
    if (!notes.empty()) os << " notes=" << notes;
    os << '\n';
  }
};

namespace detail {

// Ratio-test heuristic on closed-form envelope terms.  The terms have the
// structural form Q^n / (n!)^s (times slowly varying factors), so successive
// log-ratios follow log r_n = log Q - s log(n + 1) + o(1).  A least-squares
// fit of that line over the tail half of the window recovers s; s > 0 means
// the ratios eventually fall to zero no matter how large Q is, s ~ 0 means a
// genuinely geometric tail whose level is compared against the margin band,
// and s < 0 means super-geometric growth.  Thresholding the last raw ratio
// instead would misreport convergent series whose factorial decay has not
// yet overtaken a large geometric constant inside the window.
inline void assign_verdict(ConvergenceReport& rep, double margin = 0.05) {
  const std::size_t n = rep.log_terms.size();
  if (n < 2) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "window too short";
    return;
  }
  std::vector<double> log_ratios(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) log_ratios[i] = rep.log_terms[i + 1] - rep.log_terms[i];

  // Underflowed tails: once terms hit zero the series has converged for any
  // practical purpose.
  if (!std::isfinite(rep.log_terms.back()) && rep.log_terms.back() < 0.0) {
    rep.verdict = Verdict::converges;
    rep.ratio_estimate = 0.0;
    rep.notes = "terms underflow to zero inside the window";
    return;
  }

  const std::size_t fit_begin = log_ratios.size() / 2;
  const std::size_t m = log_ratios.size() - fit_begin;
  if (m < 3) {
    const double r = std::exp(log_ratios.back());
    rep.ratio_estimate = r;
    rep.verdict = r < 1.0 - margin  ? Verdict::converges
                  : r > 1.0 + margin ? Verdict::diverges
                                     : Verdict::inconclusive;
    rep.notes = "window too short for trend fit; used last ratio";
    return;
  }

  // Least squares of log r_n against log(n + 1) over the tail half.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = fit_begin; i < log_ratios.size(); ++i) {
    const double xi = std::log(static_cast<double>(i + 2));  // ratio index n = i + 1
    const double yi = log_ratios[i];
    sx += xi;
    sy += yi;
    sxx += xi * xi;
    sxy += xi * yi;
  }
  const double md = static_cast<double>(m);
  const double slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / md;
  const double s = -slope;  // factorial-decay exponent
  const double s_tol = 0.02;
  char buf[160];

  if (s > s_tol) {
    rep.verdict = Verdict::converges;
    rep.ratio_estimate = 0.0;
    std::snprintf(buf, sizeof(buf),
                  "factorial decay exponent %.3f > 0; ratios fall to zero eventually", s);
    rep.notes = buf;
    return;
  }
  if (s < -s_tol) {
    rep.verdict = Verdict::diverges;
    rep.ratio_estimate = std::exp(log_ratios.back());
    std::snprintf(buf, sizeof(buf), "ratios grow like n^%.3f; terms explode", -s);
    rep.notes = buf;
    return;
  }
  const double level = std::exp(intercept + slope * std::log(static_cast<double>(n + 1)));
  rep.ratio_estimate = level;
  rep.verdict = level < 1.0 - margin  ? Verdict::converges
                : level > 1.0 + margin ? Verdict::diverges
                                       : Verdict::inconclusive;
  std::snprintf(buf, sizeof(buf), "geometric tail at ratio %.4f", level);
  rep.notes = buf;
}

inline void fill_terms(ConvergenceReport& rep, int n_max,
                       const std::vector<double>& log_terms) {
  rep.log_terms = log_terms;
  rep.terms.resize(static_cast<std::size_t>(n_max));
  for (int i = 0; i < n_max; ++i) rep.terms[static_cast<std::size_t>(i)] = std::exp(log_terms[i]);
  assign_verdict(rep);
}

}  // namespace detail

// Terms of the series controlling absolute convergence of the chaos
// expansion:
//   a_n = ( T^{(p/alpha - 1) n} K_n(t, x) )^{1/2} * ( sum_j Gamma_j^{-p/alpha} )^{n/2},
// with K_n replaced by its closed-form envelope and the arrival series by its
// tail-corrected cloud value.
inline ConvergenceReport solution_series_report(const Kernel& k, const WeightFn& w,
                                                const AtomCloud& cloud, double p, double t,
                                                std::span<const double> x, int n_max = 30) {
  if (n_max < 1) throw std::invalid_argument("solution_series_report: n_max must be >= 1");
  if (!admissible_p_range(k, cloud.params().alpha, w.delta).contains(p))
    throw std::domain_error("solution_series_report: p outside the admissible range");
  const double alpha = cloud.params().alpha;
  const double horizon = cloud.params().horizon;
  const double radius = std::sqrt(detail::squared_norm(x.data(), k.dim));
  const double log_gamma_sum = std::log(gamma_power_sum(cloud, p));
  const double log_horizon = std::log(horizon);
  std::vector<double> log_terms(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double nd = static_cast<double>(n);
    const double log_mass = detail::log_chain_pmass_bound(k, w, n, p, t, radius);
    log_terms[static_cast<std::size_t>(n - 1)] =
        0.5 * (nd * (p / alpha - 1.0) * log_horizon + log_mass) + 0.5 * nd * log_gamma_sum;
  }
  ConvergenceReport rep;
  rep.p = p;
  detail::fill_terms(rep, n_max, log_terms);
  return rep;
}

// Terms of the series controlling the kernel-integrated moments of the
// solution (the fixed-point estimate).  The order-n integral
// integral_0^t integral G^alpha(x - y) K_n(s, y) dy ds is bounded through the
// envelope's polynomial part, then raised to the subadditivity exponent
// (alpha ^ 1)/p together with the arrival series.
inline ConvergenceReport integrated_series_report(const Kernel& k, const WeightFn& w,
                                                  const AtomCloud& cloud, double p, double t,
                                                  std::span<const double> x, int n_max = 30) {
  if (n_max < 1) throw std::invalid_argument("integrated_series_report: n_max must be >= 1");
  if (!admissible_p_range(k, cloud.params().alpha, w.delta).contains(p))
    throw std::domain_error("integrated_series_report: p outside the admissible range");
  const double alpha = cloud.params().alpha;
  const double horizon = cloud.params().horizon;
  const double d = static_cast<double>(k.dim);
  const double radius = std::sqrt(detail::squared_norm(x.data(), k.dim));
  const double eta0 = w.delta * (p - alpha);
  const double log_c0 = std::log(w.c0);
  const double log_t = std::log(t);
  const double log_r =
      radius > 0.0 ? std::log(radius) : -std::numeric_limits<double>::infinity();
  const double log_horizon = std::log(horizon);
  const double log_coeff = detail::log_chain_bound_coeff(k, p, eta0);
  const double exponent = std::min(alpha, 1.0) / p;
  const double log_gamma_sum = std::log(gamma_power_sum(cloud, p));

  std::vector<double> log_terms(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    const double nd = static_cast<double>(n);
    const double eta = nd * eta0;
    double log_integral;  // envelope of integral_0^t integral G^alpha K_n
    if (k.kind == KernelKind::heat) {
      const double shape = 0.5 * d * (1.0 - p) + 1.0;
      const double alpha_exp = 0.5 * d * (1.0 - alpha) + 1.0;
      const double k_alpha = heat_lp_prefactor(alpha, k.dim) / alpha_exp;
      // Three addends: the constant part of the polynomial, the moment
      // envelope applied to |y|^{n eta}, and the extra-time part.
      const double l1 = std::log(k_alpha) + alpha_exp * log_t;
      const double moment = heat_moment_coeff(eta, alpha, k.dim);
      const double l2 = std::log(moment) + alpha_exp * log_t +
                        detail::log_sum_exp3(eta * log_r, 0.5 * eta * log_t,
                                             -std::numeric_limits<double>::infinity());
      const double l3 = std::log(k_alpha) + std::lgamma(0.5 * (1.0 + eta)) +
                        (0.5 * eta + alpha_exp) * log_t;
      log_integral = nd * ((p - alpha) * log_c0 + log_coeff) +
                     nd * (p / alpha + 0.5 * d * (1.0 - p)) * log_horizon -
                     std::lgamma(nd * shape + 1.0) + detail::log_sum_exp3(l1, l2, l3);
    } else {
      const double a = wave_time_exponent(p, k.dim);
      // |x - y|^{eta} <= (2^{eta0} + 1)^n (1 + |x|^{eta} + t^{eta}) on the cone.
      const double translate = std::log(std::pow(2.0, eta0) + 1.0);
      const double poly = detail::log_sum_exp3(0.0, eta * log_r, eta * log_t);
      const double log_alpha_mass = std::log(space_time_lp_mass(k, alpha, t));
      log_integral = nd * ((p - alpha) * log_c0 + log_coeff + translate) +
                     nd * (p / alpha - 1.0 + a) * log_horizon - std::lgamma(nd * a + 1.0) +
                     poly + log_alpha_mass;
    }
    log_terms[static_cast<std::size_t>(n - 1)] =
        exponent * log_integral + nd * exponent * log_gamma_sum;
  }
  ConvergenceReport rep;
  rep.p = p;
  detail::fill_terms(rep, n_max, log_terms);
  return rep;
}

// ------------------------------------------------------------------
// Stirling sandwich
// ------------------------------------------------------------------

struct StirlingSandwich {
  double c_lower = 1.0;
  double c_upper = 1.0;
};

// Smallest geometric constants with
//   c_lower^{-n} (n!)^a <= Gamma(a n + 1 + b) <= c_upper^n (n!)^a
// over 1 <= n <= n_max.  At (a, b) = (1, 0) both constants are exactly one.
inline StirlingSandwich stirling_sandwich(double a, double b, int n_max) {
  if (!(a > 0.0)) throw std::domain_error("stirling_sandwich: a must be positive");
  if (!(a + 1.0 + b > 0.0))
    throw std::domain_error("stirling_sandwich: a n + 1 + b must stay positive");
  if (n_max < 1) throw std::invalid_argument("stirling_sandwich: n_max must be >= 1");
  double log_lower = 0.0, log_upper = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double nd = static_cast<double>(n);
    const double log_ratio = std::lgamma(a * nd + 1.0 + b) - a * std::lgamma(nd + 1.0);
    log_upper = std::max(log_upper, log_ratio / nd);
    log_lower = std::max(log_lower, -log_ratio / nd);
  }
  return StirlingSandwich{std::exp(log_lower), std::exp(log_upper)};
}

}  // namespace stablechaos
