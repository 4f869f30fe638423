#pragma once

// Sampling machinery for the series representation of symmetric alpha-stable
// space-time noise.  An atom cloud carries Rademacher signs, Poisson arrival
// levels, uniform times on [0, horizon] and spatial marks drawn from the
// normalized weight density; every downstream evaluator consumes clouds.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stablechaos/detail/numeric.hpp"
#include "stablechaos/detail/rng.hpp"

namespace stablechaos {

// ------------------------------------------------------------------
// parameters
// ------------------------------------------------------------------

struct StableParams {
  double alpha = 0.0;    // stability index, in (0, 2)
  double horizon = 1.0;  // time horizon T > 0
  int dim = 1;           // spatial dimension d >= 1

  void validate() const {
    if (!(alpha > 0.0) || !(alpha < 2.0))
      throw std::domain_error("StableParams: alpha must lie in (0, 2)");
    if (!(horizon > 0.0)) throw std::domain_error("StableParams: horizon must be positive");
    if (dim < 1) throw std::domain_error("StableParams: dim must be >= 1");
  }
};

// Normalizing constant of the symmetric alpha-stable law with scale tied to
// Lebesgue control measure: C_alpha = ( integral_0^inf sin(x) x^-alpha dx )^-1.
// Evaluated through the reflection form 2 * Gamma(alpha) * sin(pi alpha / 2) / pi,
// which equals the cosine closed form on (0,1) u (1,2) and is continuous at
// alpha = 1 (value 2/pi), so no special-casing is needed.
inline double stable_constant(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("stable_constant: alpha must lie in (0, 2)");
  return 2.0 * std::tgamma(alpha) * std::sin(0.5 * detail::pi * alpha) / detail::pi;
}

// ------------------------------------------------------------------
// weight function
// ------------------------------------------------------------------

// Radial envelope phi(x) = c * (1 on |x| <= 1, |x|^-delta outside), with c
// chosen so phi^alpha integrates to one over R^d.  Requires delta > d/alpha.
struct WeightFn {
  double delta = 0.0;    // tail decay exponent
  double c = 0.0;        // normalizing constant
  double c0 = 0.0;       // envelope constant: 1/phi(x) <= c0 * (1 + |x|^delta)
  double alpha = 0.0;    // stability index the normalization was built for
  int dim = 0;           // spatial dimension
  double ball_mass = 0.0;  // probability that a phi^alpha draw lands in the unit ball

  double value(double radius) const noexcept {
    return radius <= 1.0 ? c : c * std::pow(radius, -delta);
  }

  double value(std::span<const double> x) const noexcept {
    return value(std::sqrt(detail::squared_norm(x.data(), dim)));
  }

  double inv_value(double radius) const noexcept {
    return radius <= 1.0 ? c0 : c0 * std::pow(radius, delta);
  }

  double inv_value(std::span<const double> x) const noexcept {
    return inv_value(std::sqrt(detail::squared_norm(x.data(), dim)));
  }
};

inline WeightFn make_weight(double delta, const StableParams& params) {
  params.validate();
  const double d = static_cast<double>(params.dim);
  if (!(delta > d / params.alpha))
    throw std::domain_error(
        "make_weight: delta must exceed dim/alpha, otherwise phi^alpha is not normalizable");
  const double vol = detail::unit_ball_volume(params.dim);
  const double surf = detail::unit_sphere_area(params.dim);
  const double tail = surf / (delta * params.alpha - d);
  WeightFn w;
  w.delta = delta;
  w.c = std::pow(vol + tail, -1.0 / params.alpha);
  w.c0 = 1.0 / w.c;
  w.alpha = params.alpha;
  w.dim = params.dim;
  w.ball_mass = std::pow(w.c, params.alpha) * vol;
  return w;
}

namespace detail {

// One spatial mark with density phi(|x|)^alpha: uniform over the unit ball
// with probability ball_mass, otherwise an exact inverse-CDF radial draw with
// a uniform direction.  No rejection anywhere, so the draw count per atom is
// bounded and substreams stay aligned.
inline void sample_weight_position(CounterRng& rng, const WeightFn& w, double* out) {
  const int d = w.dim;
  const bool in_ball = rng.unit() < w.ball_mass;
  double radius;
  if (in_ball) {
    if (d == 1) {
      out[0] = 2.0 * rng.unit() - 1.0;
      return;
    }
    radius = std::pow(rng.unit(), 1.0 / static_cast<double>(d));
  } else {
    const double q = w.delta * w.alpha - static_cast<double>(d);
    radius = std::pow(1.0 - rng.unit(), -1.0 / q);
  }
  if (d == 1) {
    out[0] = rng.unit() < 0.5 ? -radius : radius;
  } else if (d == 2) {
    const double angle = two_pi * rng.unit();
    out[0] = radius * std::cos(angle);
    out[1] = radius * std::sin(angle);
  } else {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int k = 0; k < d; ++k) {
        out[k] = rng.normal();
        norm2 += out[k] * out[k];
      }
    } while (norm2 <= 0.0);
    const double scale = radius / std::sqrt(norm2);
    for (int k = 0; k < d; ++k) out[k] *= scale;
  }
}

}  // namespace detail

// ------------------------------------------------------------------
// atom cloud
// ------------------------------------------------------------------

struct Atom {
  int sign = 1;              // Rademacher mark
  double gamma = 0.0;        // Poisson arrival level, strictly increasing over the cloud
  double time = 0.0;         // uniform time on [0, horizon)
  std::vector<double> pos;   // spatial mark
};

// Ordered collection of noise atoms, stored column-wise.  The primary order
// is ascending gamma; time_order() gives the permutation sorting atoms by
// time (ties keep primary order).  series_weight(i) caches the atom's series
// coefficient v_i = horizon^{1/alpha} * sign_i * gamma_i^{-1/alpha} / phi(x_i).
class AtomCloud {
 public:
  AtomCloud() = default;

  AtomCloud(const StableParams& params, const WeightFn& weight, std::uint64_t seed,
            std::size_t count)
      : params_(params), weight_(weight) {
    params_.validate();
    check_weight_matches_();
    sample_(seed, count);
  }

  // Builds a cloud from explicit columns (deserialization, hand-made tests).
  static AtomCloud from_raw(const StableParams& params, const WeightFn& weight,
                            std::vector<int> signs, std::vector<double> gammas,
                            std::vector<double> times, std::vector<double> positions,
                            std::uint64_t seed = 0) {
    params.validate();
    AtomCloud cloud;
    cloud.params_ = params;
    cloud.weight_ = weight;
    cloud.check_weight_matches_();
    const std::size_t n = gammas.size();
    if (signs.size() != n || times.size() != n ||
        positions.size() != n * static_cast<std::size_t>(params.dim))
      throw std::invalid_argument("AtomCloud::from_raw: column sizes disagree");
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (signs[i] != 1 && signs[i] != -1)
        throw std::invalid_argument("AtomCloud::from_raw: signs must be +-1");
      if (!(gammas[i] > prev))
        throw std::invalid_argument(
            "AtomCloud::from_raw: gamma column must be strictly increasing and positive");
      prev = gammas[i];
      if (!(times[i] >= 0.0) || !(times[i] <= params.horizon))
        throw std::invalid_argument("AtomCloud::from_raw: times must lie in [0, horizon]");
    }
    cloud.seed_ = seed;
    cloud.signs_ = std::move(signs);
    cloud.gammas_ = std::move(gammas);
    cloud.times_ = std::move(times);
    cloud.positions_ = std::move(positions);
    cloud.finalize_();
    return cloud;
  }

  // Regenerates in place; same seed and count give a bit-identical cloud.
  void resample(std::uint64_t seed) { sample_(seed, size()); }
  void resample(std::uint64_t seed, std::size_t count) { sample_(seed, count); }

  std::size_t size() const noexcept { return gammas_.size(); }
  const StableParams& params() const noexcept { return params_; }
  const WeightFn& weight() const noexcept { return weight_; }
  std::uint64_t seed() const noexcept { return seed_; }

  int sign(std::size_t i) const noexcept { return signs_[i]; }
  double gamma(std::size_t i) const noexcept { return gammas_[i]; }
  double time(std::size_t i) const noexcept { return times_[i]; }
  std::span<const double> position(std::size_t i) const noexcept {
    return {positions_.data() + i * static_cast<std::size_t>(params_.dim),
            static_cast<std::size_t>(params_.dim)};
  }
  double series_weight(std::size_t i) const noexcept { return series_weights_[i]; }

  const std::vector<int>& signs() const noexcept { return signs_; }
  const std::vector<double>& gammas() const noexcept { return gammas_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& positions() const noexcept { return positions_; }
  const std::vector<double>& series_weights() const noexcept { return series_weights_; }
  const std::vector<std::uint32_t>& time_order() const noexcept { return time_order_; }

  Atom atom(std::size_t i) const {
    const auto p = position(i);
    return Atom{signs_[i], gammas_[i], times_[i], {p.begin(), p.end()}};
  }

 private:
  void check_weight_matches_() const {
    if (weight_.dim != params_.dim || weight_.alpha != params_.alpha)
      throw std::invalid_argument("AtomCloud: weight function built for different parameters");
    if (!(weight_.c > 0.0))
      throw std::invalid_argument("AtomCloud: weight function is not normalized");
  }

  void sample_(std::uint64_t seed, std::size_t count) {
    seed_ = seed;
    const int d = params_.dim;
    signs_.resize(count);
    gammas_.resize(count);
    times_.resize(count);
    positions_.resize(count * static_cast<std::size_t>(d));
    double level = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      detail::CounterRng sign_rng(seed, detail::Stream::sign, i);
      detail::CounterRng gap_rng(seed, detail::Stream::gap, i);
      detail::CounterRng time_rng(seed, detail::Stream::time, i);
      detail::CounterRng pos_rng(seed, detail::Stream::position, i);
      signs_[i] = sign_rng.rademacher();
      level += gap_rng.exponential();
      gammas_[i] = level;
      times_[i] = params_.horizon * time_rng.unit();
      detail::sample_weight_position(pos_rng, weight_,
                                     positions_.data() + i * static_cast<std::size_t>(d));
    }
    finalize_();
  }

  void finalize_() {
    const std::size_t n = gammas_.size();
    const double time_scale = std::pow(params_.horizon, 1.0 / params_.alpha);
    series_weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double inv_phi = weight_.inv_value(position(i));
      series_weights_[i] = time_scale * static_cast<double>(signs_[i]) *
                           std::pow(gammas_[i], -1.0 / params_.alpha) * inv_phi;
    }
    time_order_.resize(n);
    std::iota(time_order_.begin(), time_order_.end(), 0u);
    std::stable_sort(time_order_.begin(), time_order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return times_[a] < times_[b]; });
  }

  StableParams params_;
  WeightFn weight_;
  std::uint64_t seed_ = 0;
  std::vector<int> signs_;
  std::vector<double> gammas_;
  std::vector<double> times_;
  std::vector<double> positions_;       // flat, row i at [i*dim, (i+1)*dim)
  std::vector<double> series_weights_;  // v_i
  std::vector<std::uint32_t> time_order_;
};

inline AtomCloud sample_cloud(std::size_t count, std::uint64_t seed, const StableParams& params,
                              const WeightFn& weight) {
  return AtomCloud(params, weight, seed, count);
}

// ------------------------------------------------------------------
// arrival-level series
// ------------------------------------------------------------------

// Sum over the cloud of gamma_j^{-p/alpha}, optionally completed by the
// analytic tail  integral_{gamma_last}^inf s^{-p/alpha} ds.  Finite only for
// p > alpha, which is enforced.
inline double gamma_power_sum(const AtomCloud& cloud, double p, bool tail_correction = true) {
  const double alpha = cloud.params().alpha;
  if (!(p > alpha))
    throw std::domain_error("gamma_power_sum: requires p > alpha (series diverges otherwise)");
  const double q = p / alpha;
  detail::NeumaierSum sum;
  for (std::size_t i = 0; i < cloud.size(); ++i) sum.add(std::pow(cloud.gamma(i), -q));
  double total = sum.value();
  if (tail_correction && cloud.size() > 0) {
    const double last = cloud.gamma(cloud.size() - 1);
    total += std::pow(last, 1.0 - q) / (q - 1.0);
  }
  return total;
}

// ------------------------------------------------------------------
// serialization
// ------------------------------------------------------------------

// CSV schema: header "index,sign,gamma,time,x1[,x2,...]", one row per atom in
// primary (gamma) order, 1-based index, doubles at round-trip precision.
inline void write_cloud_csv(std::ostream& os, const AtomCloud& cloud) {
  std::string line = "index,sign,gamma,time";
  for (int k = 1; k <= cloud.params().dim; ++k) {
    line += ",x";
    line += std::to_string(k);
  }
  line += '\n';
  os << line;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    line.clear();
    line += std::to_string(i + 1);
    line += ',';
    line += std::to_string(cloud.sign(i));
    line += ',';
    detail::append_double(line, cloud.gamma(i));
    line += ',';
    detail::append_double(line, cloud.time(i));
    for (const double xk : cloud.position(i)) {
      line += ',';
      detail::append_double(line, xk);
    }
    line += '\n';
    os << line;
  }
}

namespace detail {

inline double parse_csv_double(std::string_view field, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw std::invalid_argument(std::string("cloud CSV: bad ") + what + " field '" +
                                std::string(field) + "'");
  return v;
}

}  // namespace detail

inline AtomCloud read_cloud_csv(std::istream& is, const StableParams& params,
                                const WeightFn& weight) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("cloud CSV: missing header");
  std::vector<int> signs;
  std::vector<double> gammas, times, positions;
  const std::size_t fields_expected = 4 + static_cast<std::size_t>(params.dim);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != fields_expected)
      throw std::invalid_argument("cloud CSV: wrong field count in row '" + line + "'");
    const double sign = detail::parse_csv_double(fields[1], "sign");
    signs.push_back(static_cast<int>(sign));
    gammas.push_back(detail::parse_csv_double(fields[2], "gamma"));
    times.push_back(detail::parse_csv_double(fields[3], "time"));
    for (std::size_t k = 4; k < fields_expected; ++k)
      positions.push_back(detail::parse_csv_double(fields[k], "position"));
  }
  return AtomCloud::from_raw(params, weight, std::move(signs), std::move(gammas),
                             std::move(times), std::move(positions));
}

}  // namespace stablechaos
