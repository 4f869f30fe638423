#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <stablechaos/noise_field.hpp>

using namespace stablechaos;

namespace {

const StableParams params07{0.7, 1.0, 1};

AtomCloud single_atom_cloud(const WeightFn& w, int sign, double gamma, double time, double x) {
  return AtomCloud::from_raw(params07, w, {sign}, {gamma}, {time}, {x});
}

}  // namespace

TEST_CASE("box region geometry") {
  BoxRegion box{0.0, 1.0, {-0.5, -0.5}, {0.5, 1.5}};
  REQUIRE(box.dim() == 2);
  REQUIRE(box.lebesgue() == Catch::Approx(2.0).epsilon(1e-14));
  REQUIRE(box.contains(0.5, std::vector<double>{0.0, 1.0}));
  REQUIRE_FALSE(box.contains(1.5, std::vector<double>{0.0, 1.0}));
  REQUIRE_FALSE(box.contains(0.5, std::vector<double>{0.9, 1.0}));
  REQUIRE_NOTHROW(box.validate(2));
  REQUIRE_THROWS_AS(box.validate(1), std::invalid_argument);

  BoxRegion bad{1.0, 0.0, {0.0}, {1.0}};
  REQUIRE_THROWS_AS(bad.validate(1), std::invalid_argument);
}

TEST_CASE("z measure of a single atom is the series weight") {
  const WeightFn w = make_weight(1.5, params07);
  const BoxRegion box{0.0, 1.0, {-0.5}, {0.5}};

  const AtomCloud plus = single_atom_cloud(w, 1, 1.0, 0.3, 0.2);
  // v = 1^{1/alpha} * Gamma^{-1/alpha} / phi(0.2) = 1/c.
  REQUIRE(z_measure(plus, box) == Catch::Approx(1.0 / w.c).epsilon(1e-13));

  const AtomCloud minus = single_atom_cloud(w, -1, 1.0, 0.3, 0.2);
  REQUIRE(z_measure(minus, box) == Catch::Approx(-1.0 / w.c).epsilon(1e-13));

  // Atom outside the box contributes nothing.
  const AtomCloud outside = single_atom_cloud(w, 1, 1.0, 0.3, 0.7);
  REQUIRE(z_measure(outside, box) == 0.0);
}

TEST_CASE("z measure is additive over a spatial partition") {
  const WeightFn w = make_weight(1.5, params07);
  const AtomCloud cloud(params07, w, 29, 300);

  const BoxRegion whole{0.0, 1.0, {-2.0}, {2.0}};
  const BoxRegion left{0.0, 1.0, {-2.0}, {0.37}};
  const BoxRegion right{0.0, 1.0, {0.37}, {2.0}};
  const double zw = z_measure(cloud, whole);
  const double zl = z_measure(cloud, left);
  const double zr = z_measure(cloud, right);
  // No atom sits exactly on the split line for this seed, so the halves add up.
  REQUIRE(zw == Catch::Approx(zl + zr).epsilon(1e-12));
}

TEST_CASE("empirical characteristic function basics") {
  const std::vector<double> sym = {1.25, -1.25};
  const std::complex<double> at0 = empirical_cf(sym, 0.0);
  REQUIRE(at0.real() == 1.0);
  REQUIRE(at0.imag() == 0.0);

  const std::complex<double> at_u = empirical_cf(sym, 0.8);
  REQUIRE(at_u.real() == Catch::Approx(std::cos(0.8 * 1.25)).epsilon(1e-14));
  REQUIRE(at_u.imag() == Catch::Approx(0.0).margin(1e-15));

  REQUIRE_THROWS_AS(empirical_cf(std::vector<double>{}, 1.0), std::invalid_argument);
}

TEST_CASE("target characteristic function") {
  // exp(-Leb(B) |u|^alpha / C_alpha); at alpha = 1 the constant is 2/pi.
  REQUIRE(target_cf(1.0, 1.0, 1.0) == Catch::Approx(std::exp(-0.5 * detail::pi)).epsilon(1e-13));
  REQUIRE(target_cf(1.0, 2.0, 1.0) == Catch::Approx(std::exp(-detail::pi)).epsilon(1e-13));
  REQUIRE(target_cf(0.7, 1.0, 0.0) == 1.0);
  // Symmetric in u.
  REQUIRE(target_cf(1.5, 0.5, 2.0) == target_cf(1.5, 0.5, -2.0));
}

TEST_CASE("additive solution: single atom closed form") {
  const WeightFn w = make_weight(1.5, params07);
  const Kernel k = make_kernel(KernelKind::heat, 1);
  const AtomCloud cloud = single_atom_cloud(w, 1, 1.0, 0.3, 0.2);

  const double expected =
      1.0 + (1.0 / w.c) * std::exp(-0.0) / std::sqrt(detail::two_pi * 0.7);
  REQUIRE(additive_solution(cloud, k, 1.0, std::vector<double>{0.2}) ==
          Catch::Approx(expected).epsilon(1e-13));

  // Before the atom's time the field is identically one.
  REQUIRE(additive_solution(cloud, k, 0.3, std::vector<double>{0.2}) == 1.0);
  REQUIRE(additive_solution(cloud, k, 0.0, std::vector<double>{0.2}) == 1.0);

  // An atom stamped at time zero never contributes (chains start after 0).
  const AtomCloud at_zero = single_atom_cloud(w, 1, 1.0, 0.0, 0.2);
  REQUIRE(additive_solution(at_zero, k, 1.0, std::vector<double>{0.2}) == 1.0);
}

TEST_CASE("additive solution is affine in the noise atoms") {
  const WeightFn w = make_weight(1.5, params07);
  const Kernel k = make_kernel(KernelKind::heat, 1);
  const AtomCloud a = single_atom_cloud(w, 1, 1.0, 0.25, 0.1);
  const AtomCloud b = single_atom_cloud(w, -1, 2.0, 0.6, -0.4);
  const AtomCloud merged = AtomCloud::from_raw(params07, w, {1, -1}, {1.0, 2.0}, {0.25, 0.6},
                                               {0.1, -0.4});
  const std::vector<double> x{0.0};
  const double ua = additive_solution(a, k, 1.0, x) - 1.0;
  const double ub = additive_solution(b, k, 1.0, x) - 1.0;
  const double um = additive_solution(merged, k, 1.0, x) - 1.0;
  REQUIRE(um == Catch::Approx(ua + ub).epsilon(1e-13));
}

TEST_CASE("additive solution rejects mismatched or non-integrable setups") {
  const WeightFn w = make_weight(1.5, params07);
  const AtomCloud cloud(params07, w, 3, 10);
  REQUIRE_THROWS_AS(
      additive_solution(cloud, make_kernel(KernelKind::heat, 2), 1.0, std::vector<double>{0, 0}),
      std::invalid_argument);

  // heat d = 4 with alpha = 1.6 violates the integrability hypothesis.
  const StableParams p4{1.6, 1.0, 4};
  const WeightFn w4 = make_weight(3.0, p4);
  const AtomCloud cloud4(p4, w4, 3, 10);
  REQUIRE_THROWS_AS(additive_solution(cloud4, make_kernel(KernelKind::heat, 4), 1.0,
                                      std::vector<double>{0, 0, 0, 0}),
                    std::domain_error);
}

TEST_CASE("cf replication is thread-invariant and tracks the target") {
  CfHarnessConfig cfg;
  cfg.params = StableParams{1.5, 1.0, 1};
  cfg.weight = make_weight(1.5, cfg.params);
  cfg.box = BoxRegion{0.0, 1.0, {-0.5}, {0.5}};
  cfg.cloud_size = 200;
  cfg.replications = 400;
  cfg.seed = 5;

  cfg.threads = 1;
  const std::vector<CfRow> serial = cf_replication(cfg);
  cfg.threads = 3;
  const std::vector<CfRow> parallel = cf_replication(cfg);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(serial[i].empirical_re == parallel[i].empirical_re);  // bitwise
    REQUIRE(serial[i].empirical_im == parallel[i].empirical_im);
    REQUIRE(serial[i].u == parallel[i].u);
    REQUIRE(serial[i].target == parallel[i].target);
  }

  const double band = 4.0 / std::sqrt(400.0);
  for (const CfRow& row : serial) {
    REQUIRE(row.band == Catch::Approx(band).epsilon(1e-14));
    REQUIRE(std::abs(row.empirical_re - row.target) <= band);
    REQUIRE(std::abs(row.empirical_im) <= band);
  }
}

TEST_CASE("cf csv export schema") {
  std::ostringstream os;
  write_cf_csv(os, {CfRow{0.5, 0.41, 0.001, 0.4122, 0.02}});
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  REQUIRE(header == "u,empirical_re,empirical_im,target,band");
  std::string row;
  REQUIRE(std::getline(in, row).good());
  REQUIRE(row.substr(0, 4) == "0.5,");
}
