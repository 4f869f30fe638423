#pragma once

// Test-support numerical oracles: adaptive Gauss-Kronrod quadrature, an
// oscillatory-integral evaluator, and nested quadratures for the kernel
// masses.  These deliberately integrate the *defining* integrals so the
// library's closed forms are checked against independent numerics.

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include <stablechaos/kernels.hpp>
#include <stablechaos/stable_sampling.hpp>

namespace testsupport {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk_kronrod_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk_gauss_w[4] = {0.129484966168870, 0.279705391489277,
                                         0.381830050505119, 0.417959183673469};

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
PanelResult gk15_panel(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  const double fc = f(c);
  double kron = gk_kronrod_w[7] * fc;
  double gauss = gk_gauss_w[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * gk_nodes[i];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += gk_kronrod_w[i] * (f1 + f2);
    if (i % 2 == 1) gauss += gk_gauss_w[i / 2] * (f1 + f2);
  }
  return PanelResult{kron * h, std::abs(kron - gauss) * std::abs(h)};
}

// Globally adaptive bisection: repeatedly refines the panel with the largest
// error estimate until the total estimate meets the tolerance.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-10,
                 int max_panels = 20000) {
  struct Seg {
    double a, b, value, error;
    bool operator<(const Seg& o) const { return error < o.error; }
  };
  std::priority_queue<Seg> queue;
  PanelResult first = gk15_panel(f, a, b);
  queue.push(Seg{a, b, first.value, first.error});
  double total_value = first.value;
  double total_error = first.error;
  int panels = 1;
  while (total_error > std::max(abs_tol, rel_tol * std::abs(total_value))) {
    if (panels >= max_panels)
      throw std::runtime_error("testsupport::integrate: did not converge");
    const Seg worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const PanelResult left = gk15_panel(f, worst.a, mid);
    const PanelResult right = gk15_panel(f, mid, worst.b);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(Seg{worst.a, mid, left.value, left.error});
    queue.push(Seg{mid, worst.b, right.value, right.error});
    ++panels;
  }
  return total_value;
}

// Integrates f over (0, upper] when f(x) ~ x^e near zero (e > -1).  The
// substitution x = upper * w^{1/(1+e)} turns the leading power into a
// constant, so plain adaptive quadrature converges even for e close to -1.
template <class F>
double integrate_power_graded(F&& f, double upper, double e, double abs_tol = 1e-12,
                              double rel_tol = 1e-10) {
  if (!(e > -1.0)) throw std::invalid_argument("integrate_power_graded: need e > -1");
  const double k = 1.0 / (1.0 + e);
  return integrate(
      [&](double w) {
        const double x = upper * std::pow(w, k);
        return f(x) * upper * k * std::pow(w, k - 1.0);
      },
      0.0, 1.0, abs_tol, rel_tol);
}

// Oracle for the oscillatory integral  integral_0^inf sin(x) / x^a dx,
// 0 < a < 2: half-period panels form an alternating series accelerated by
// repeated averaging of the partial sums.  (Equals pi/2 at a = 1.)
inline double sine_power_integral(double a) {
  if (!(a > 0.0) || !(a < 2.0))
    throw std::invalid_argument("sine_power_integral: need 0 < a < 2");
  const double pi = stablechaos::detail::pi;
  const int n_panels = 56;
  std::vector<double> partial(static_cast<std::size_t>(n_panels));
  double running = integrate_power_graded(
      [&](double x) { return std::sin(x) * std::pow(x, -a); }, pi, 1.0 - a, 1e-15, 1e-13);
  partial[0] = running;
  for (int kp = 1; kp < n_panels; ++kp) {
    running += integrate([&](double x) { return std::sin(x) * std::pow(x, -a); },
                         kp * pi, (kp + 1) * pi, 1e-15, 1e-13);
    partial[static_cast<std::size_t>(kp)] = running;
  }
  // Repeated averaging collapses the alternating partial sums to the limit.
  std::vector<double> table = partial;
  while (table.size() > 1) {
    for (std::size_t i = 0; i + 1 < table.size(); ++i) table[i] = 0.5 * (table[i] + table[i + 1]);
    table.pop_back();
  }
  return table[0];
}

// Quadrature of the defining double integral behind space_time_lp_mass:
// integral_0^t integral_{R^d} G_s(x)^p dx ds, via a radial inner integral
// and a graded outer integral in time.
inline double lp_mass_quadrature(const stablechaos::Kernel& k, double p, double t) {
  using stablechaos::green_radial2;
  const double d = static_cast<double>(k.dim);
  const double surface = stablechaos::detail::unit_sphere_area(k.dim);

  const auto inner = [&](double s) -> double {
    if (k.kind == stablechaos::KernelKind::heat) {
      const double rmax = std::sqrt(140.0 * s / p);
      return surface * integrate(
                           [&](double r) {
                             return std::pow(r, d - 1.0) *
                                    std::pow(green_radial2(k, s, r * r), p);
                           },
                           0.0, rmax, 1e-14, 1e-12);
    }
    if (k.dim == 1)
      return integrate([&](double y) { return std::pow(green_radial2(k, s, y * y), p); },
                       -s, s, 1e-14, 1e-12);
    // wave, d = 2: substitute u = s^2 - r^2 (so r dr = -du/2); the integrand
    // becomes a pure power u^{-p/2}.  Passing s^2 - u back through the
    // squared-radius argument quantizes u to multiples of ulp(s^2), so below
    // u ~ 3e-5 s^2 the round trip is pure rounding noise.  That shell is
    // added in closed form -- the power shape scaled by the kernel's own
    // value at the cut -- and quadrature covers the rest, where the
    // subtraction is benign.
    const double s2 = s * s;
    double u_cut = 3e-5 * s2;
    u_cut = s2 - (s2 - u_cut);  // snap to a representable difference
    const double g_cut = std::pow(green_radial2(k, s, s2 - u_cut), p);
    const double shell = g_cut * u_cut / (1.0 - 0.5 * p);
    const double bulk =
        integrate([&](double u) { return std::pow(green_radial2(k, s, s2 - u), p); },
                  u_cut, s2, 1e-14, 1e-12);
    return 0.5 * surface * (shell + bulk);
  };

  // Near s = 0 the inner integral scales like s^{time exponent - 1}.
  const double e = k.kind == stablechaos::KernelKind::heat
                       ? 0.5 * d * (1.0 - p)
                       : stablechaos::wave_time_exponent(p, k.dim) - 1.0;
  return integrate_power_graded(inner, t, e, 1e-12, 1e-9);
}

// Antiderivative  Phi(y) = integral_0^y phi(u)^e du  of a power of the
// spatial weight in one dimension (odd in y; piecewise closed form).
inline double phi_power_antiderivative(const stablechaos::WeightFn& w, double e, double y) {
  const double sign = y < 0.0 ? -1.0 : 1.0;
  const double r = std::abs(y);
  const double ce = std::pow(w.c, e);
  if (r <= 1.0) return sign * ce * r;
  const double q = w.delta * e;  // phi(u)^e = c^e u^{-q} for u > 1
  double tail;
  if (std::abs(q - 1.0) < 1e-12)
    tail = std::log(r);
  else
    tail = (std::pow(r, 1.0 - q) - 1.0) / (1.0 - q);
  return sign * ce * (1.0 + tail);
}

// Nested quadrature for the order-1 weighted chain mass
//   integral_0^t integral phi(y)^{alpha-p} G_{t-s}(x-y)^p dy ds
// (heat d=1 at any x, wave d=1 at any x, wave d=2 at the origin).
inline double k1_quadrature(const stablechaos::Kernel& k, const stablechaos::WeightFn& w,
                            double p, double t, double x) {
  using stablechaos::green_radial2;
  const double e = w.alpha - p;

  const auto inner = [&](double v) -> double {  // v = t - s
    if (k.kind == stablechaos::KernelKind::heat) {
      if (k.dim != 1) throw std::invalid_argument("k1_quadrature: heat supports d=1 only");
      const double half = std::sqrt(140.0 * v / p) + w.delta + 2.0;
      return integrate(
          [&](double y) {
            const double dy = x - y;
            return std::pow(w.value(std::abs(y)), e) * std::pow(green_radial2(k, v, dy * dy), p);
          },
          x - half, x + half, 1e-14, 1e-12);
    }
    if (k.dim == 1) {
      return std::pow(2.0, -p) *
             integrate([&](double y) { return std::pow(w.value(std::abs(y)), e); },
                       x - v, x + v, 1e-14, 1e-12);
    }
    if (x != 0.0) throw std::invalid_argument("k1_quadrature: wave d=2 needs x at the origin");
    // u = v^2 - r^2 as in lp_mass_quadrature, with the weight factor riding along.
    return 0.5 * stablechaos::detail::unit_sphere_area(2) *
           integrate_power_graded(
               [&](double u) {
                 const double r = std::sqrt(std::max(v * v - u, 0.0));
                 return std::pow(w.value(r), e) * std::pow(green_radial2(k, v, v * v - u), p);
               },
               v * v, -0.5 * p, 1e-14, 1e-12);
  };

  const double e_time = k.kind == stablechaos::KernelKind::heat
                            ? 0.5 * static_cast<double>(k.dim) * (1.0 - p)
                            : stablechaos::wave_time_exponent(p, k.dim) - 1.0;
  return integrate_power_graded(inner, t, e_time, 1e-11, 1e-8);
}

// Nested quadrature for the order-2 weighted chain mass of the wave kernel in
// one dimension.  The innermost spatial integral collapses to the closed-form
// antiderivative of phi^{alpha-p} over the light-cone window.
inline double k2_wave1_quadrature(const stablechaos::WeightFn& w, double p, double t, double x) {
  const double e = w.alpha - p;
  const auto mid = [&](double s1, double s2) -> double {
    const double gap = s2 - s1;
    return integrate(
        [&](double y2) {
          const double window = phi_power_antiderivative(w, e, y2 + gap) -
                                phi_power_antiderivative(w, e, y2 - gap);
          return std::pow(w.value(std::abs(y2)), e) * window;
        },
        x - (t - s2), x + (t - s2), 1e-13, 1e-11);
  };
  const auto outer = [&](double s2) -> double {
    return integrate([&](double s1) { return mid(s1, s2); }, 0.0, s2, 1e-12, 1e-10);
  };
  return std::pow(2.0, -2.0 * p) * integrate(outer, 0.0, t, 1e-11, 1e-8);
}

// Quadrature check of the weight normalization integral phi^alpha = 1:
// numeric bulk over [0, R] plus the elementary power tail beyond R.
inline double weight_alpha_mass_quadrature(const stablechaos::WeightFn& w) {
  const double d = static_cast<double>(w.dim);
  const double surface = stablechaos::detail::unit_sphere_area(w.dim);
  const double R = 50.0;
  const double bulk = surface * integrate(
                                    [&](double r) {
                                      return std::pow(r, d - 1.0) *
                                             std::pow(w.value(r), w.alpha);
                                    },
                                    0.0, R, 1e-13, 1e-11);
  const double q = w.delta * w.alpha;  // tail integrand: c^alpha r^{d-1-q}
  const double tail =
      surface * std::pow(w.c, w.alpha) * std::pow(R, d - q) / (q - d);
  return bulk + tail;
}

}  // namespace testsupport
