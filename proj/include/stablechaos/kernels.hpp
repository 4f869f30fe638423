#pragma once

// Green's functions of the heat and wave equations together with the closed
// forms for their L^p space-time mass, the heat power-rescaling identity, and
// the weighted-moment envelope used by the series bounds.  All coefficients
// are computed from their defining expressions; nothing is hard-coded.

#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablechaos/detail/numeric.hpp"

namespace stablechaos {

enum class KernelKind { heat, wave };

struct Kernel {
  KernelKind kind = KernelKind::heat;
  int dim = 1;
};

inline Kernel make_kernel(KernelKind kind, int dim) {
  if (dim < 1) throw std::domain_error("make_kernel: dim must be >= 1");
  if (kind == KernelKind::wave && dim > 2)
    throw std::domain_error("make_kernel: the wave kernel is only available for dim in {1, 2}");
  return Kernel{kind, dim};
}

inline const char* kernel_name(KernelKind kind) noexcept {
  return kind == KernelKind::heat ? "heat" : "wave";
}

// The alpha-th power of the Green's function has finite space-time mass:
// heat requires alpha < 1 + 2/d, wave requires d <= 2 (any alpha in (0,2)).
// This is the gate every solution evaluator checks before running.
inline bool green_alpha_integrable(const Kernel& k, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("green_alpha_integrable: alpha must lie in (0, 2)");
  if (k.kind == KernelKind::heat) return alpha < 1.0 + 2.0 / static_cast<double>(k.dim);
  return k.dim <= 2;
}

// ------------------------------------------------------------------
// pointwise kernels
// ------------------------------------------------------------------

// G_t evaluated from the squared distance; zero for t <= 0 and, for wave
// kernels, zero everywhere on and outside the light cone |x| >= t.
inline double green_radial2(const Kernel& k, double t, double r2) noexcept {
  if (t <= 0.0) return 0.0;
  switch (k.kind) {
    case KernelKind::heat: {
      const double base = detail::two_pi * t;
      return std::pow(base, -0.5 * k.dim) * std::exp(-0.5 * r2 / t);
    }
    case KernelKind::wave: {
      const double t2 = t * t;
      if (!(r2 < t2)) return 0.0;
      if (k.dim == 1) return 0.5;
      return 1.0 / (detail::two_pi * std::sqrt(t2 - r2));
    }
  }
  return 0.0;
}

inline double green(const Kernel& k, double t, std::span<const double> x) noexcept {
  return green_radial2(k, t, detail::squared_norm(x.data(), k.dim));
}

// ------------------------------------------------------------------
// heat power rescaling
// ------------------------------------------------------------------

// Prefactor of the identity  G_t(x)^p = scale * t^{time_power} * G_{t/p}(x).
inline double heat_lp_prefactor(double p, int dim) {
  if (!(p > 0.0)) throw std::domain_error("heat_lp_prefactor: p must be positive");
  const double d = static_cast<double>(dim);
  return std::pow(detail::two_pi, 0.5 * d * (1.0 - p)) * std::pow(p, -0.5 * d);
}

struct HeatPowerIdentity {
  double scale = 0.0;          // (2 pi)^{d(1-p)/2} p^{-d/2}
  double time_power = 0.0;     // d (1-p) / 2
  double rescaled_time = 0.0;  // t / p
};

inline HeatPowerIdentity heat_power_identity(double p, int dim, double t) {
  if (dim < 1) throw std::domain_error("heat_power_identity: dim must be >= 1");
  const double d = static_cast<double>(dim);
  return HeatPowerIdentity{heat_lp_prefactor(p, dim), 0.5 * d * (1.0 - p), t / p};
}

// ------------------------------------------------------------------
// space-time L^p mass
// ------------------------------------------------------------------

// Exponent a_p of t in the wave mass integral_0^t integral G_s(y)^p dy ds.
inline double wave_time_exponent(double p, int dim) {
  if (dim == 1) return 2.0;
  return 3.0 - p;
}

// integral_0^t integral_{R^d} G_s(y)^p dy ds in closed form.
//   heat: K_{p,d} t^{d(1-p)/2 + 1}, valid for 0 < p < 1 + 2/d
//   wave: 2^{-p} t^2 (d = 1);  (2 pi)^{1-p} / ((2-p)(3-p)) t^{3-p} (d = 2, p < 2)
inline double space_time_lp_mass(const Kernel& k, double p, double t) {
  if (!(p > 0.0)) throw std::domain_error("space_time_lp_mass: p must be positive");
  if (!(t >= 0.0)) throw std::domain_error("space_time_lp_mass: t must be nonnegative");
  if (k.kind == KernelKind::heat) {
    const double d = static_cast<double>(k.dim);
    const double exponent = 0.5 * d * (1.0 - p) + 1.0;
    if (!(exponent > 0.0))
      throw std::domain_error("space_time_lp_mass: heat kernel requires p < 1 + 2/dim");
    return heat_lp_prefactor(p, k.dim) / exponent * std::pow(t, exponent);
  }
  if (k.dim == 1) return std::pow(2.0, -p) * t * t;
  if (!(p < 2.0))
    throw std::domain_error("space_time_lp_mass: wave kernel in dim 2 requires p < 2");
  const double a = wave_time_exponent(p, 2);
  return std::pow(detail::two_pi, 1.0 - p) / ((2.0 - p) * (3.0 - p)) * std::pow(t, a);
}

// ------------------------------------------------------------------
// weighted moment envelope (heat)
// ------------------------------------------------------------------

// Coefficient C'_{gamma,p,d} of the envelope
//   integral_0^t integral G_{t-s}(x-y)^p |y|^gamma dy ds
//     <= C' t^{d(1-p)/2 + 1} (|x|^gamma + t^{gamma/2}).
inline double heat_moment_coeff(double gamma, double p, int dim) {
  if (!(gamma >= 0.0)) throw std::domain_error("heat_moment_coeff: gamma must be >= 0");
  const double d = static_cast<double>(dim);
  const double exponent = 0.5 * d * (1.0 - p) + 1.0;
  if (!(p > 0.0) || !(exponent > 0.0))
    throw std::domain_error("heat_moment_coeff: requires 0 < p < 1 + 2/dim");
  const double k_mass = heat_lp_prefactor(p, dim) / exponent;
  const double split = std::max(std::pow(2.0, gamma - 1.0), 1.0);
  const double var = std::pow(std::min(1.0, p), -0.5 * gamma);
  const double moment =
      1.0 + std::pow(2.0, 0.5 * gamma) * std::tgamma(0.5 * (gamma + d)) / std::tgamma(0.5 * d);
  return k_mass * split * var * moment;
}

inline double heat_moment_bound(double gamma, double p, int dim, double t,
                                std::span<const double> x) {
  const double d = static_cast<double>(dim);
  const double exponent = 0.5 * d * (1.0 - p) + 1.0;
  const double radius = std::sqrt(detail::squared_norm(x.data(), dim));
  return heat_moment_coeff(gamma, p, dim) * std::pow(t, exponent) *
         (std::pow(radius, gamma) + std::pow(t, 0.5 * gamma));
}

// ------------------------------------------------------------------
// coefficient table
// ------------------------------------------------------------------

// CSV dump of the mass coefficients over a list of exponents; used by the
// diagnostics surface so the numbers can be eyeballed or diffed.
inline void write_coefficient_table(std::ostream& os, const Kernel& k,
                                    const std::vector<double>& ps) {
  os << "kind,dim,p,coefficient,time_exponent\n";
  std::string line;
  for (const double p : ps) {
    line.clear();
    line += kernel_name(k.kind);
    line += ',';
    line += std::to_string(k.dim);
    line += ',';
    detail::append_double(line, p);
    line += ',';
    if (k.kind == KernelKind::heat) {
      const double d = static_cast<double>(k.dim);
      const double exponent = 0.5 * d * (1.0 - p) + 1.0;
      detail::append_double(line, heat_lp_prefactor(p, k.dim) / exponent);
      line += ',';
      detail::append_double(line, exponent);
    } else {
      detail::append_double(line, space_time_lp_mass(k, p, 1.0));
      line += ',';
      detail::append_double(line, wave_time_exponent(p, k.dim));
    }
    line += '\n';
    os << line;
  }
}

}  // namespace stablechaos
