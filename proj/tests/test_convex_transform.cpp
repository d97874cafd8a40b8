#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "orlicz/convex_transform.hpp"
#include "orlicz/errors.hpp"

using namespace orlicz;

TEST_CASE("h(y) = phi(e^y) for the built-in families") {
  const PhiSpec a = PhiSpec::power_log(2.0, 0.0);
  CHECK(a.h(0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(a.phi(3.0) == doctest::Approx(9.0).epsilon(1e-14));
  const PhiSpec b = PhiSpec::power_log(1.5, 0.5);
  // z^m log^{-mr}(e^{m+|r|} + z)
  const double z = 4.0;
  CHECK(b.phi(z) == doctest::Approx(std::pow(z, 1.5) * std::pow(std::log(std::exp(2.0) + z), -0.75)).epsilon(1e-13));
  const PhiSpec c = PhiSpec::log_power(1.0);
  CHECK(c.phi(z) == doctest::Approx(std::pow(std::log1p(z), 2.0)).epsilon(1e-13));
  for (const PhiSpec* s : {&a, &b, &c})
    for (double y : {-3.0, 0.0, 2.0, 6.0}) {
      const double d = 1e-6;
      CHECK(s->h_prime(y) == doctest::Approx((s->h(y + d) - s->h(y - d)) / (2 * d)).epsilon(1e-6));
    }
  // large y stays finite in log form or reports +inf, never NaN
  CHECK_FALSE(std::isnan(a.h(400.0)));
}

TEST_CASE("conjugate of phi_{m,0} matches the closed form") {
  for (double m : {1.0, 2.0, 4.0}) {
    const PhiSpec phi = PhiSpec::power_log(m, 0.0);
    for (double p : {std::max(1.0, m / 2.0), 3.0, 10.0, 37.5, 100.0}) {
      INFO("m = " << m << ", p = " << p);
      CHECK(young_fenchel(phi, p) == doctest::Approx(oracle::h_star_power(m, p)).epsilon(1e-9));
      CHECK(psi(phi, p) == doctest::Approx(oracle::psi_power(m, p)).epsilon(1e-9));
    }
  }
  const PhiSpec phi2 = PhiSpec::power_log(2.0, 0.0);
  CHECK(psi(phi2, 1.0) == doctest::Approx(0.4288819).epsilon(1e-7));
  CHECK(psi(phi2, 4.0) == doctest::Approx(std::sqrt(2.0) * std::exp(-0.5)).epsilon(1e-10));
  CHECK(young_fenchel(phi2, 0.0) == 0.0);
  // right derivative of h* at 1: (1/m) log(p/m)
  CHECK(conjugate_right_derivative(phi2, 1.0) == doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-5));
}

TEST_CASE("psi is nondecreasing") {
  for (const PhiSpec& phi : {PhiSpec::power_log(2.0, 0.0), PhiSpec::power_log(1.0, 1.0), PhiSpec::log_power(1.0)}) {
    double prev = 0.0;
    for (double p : geometric_grid(1.0, 512.0, 8)) {
      const double v = psi(phi, p);
      CHECK(v >= prev * (1.0 - 1e-12));
      prev = v;
    }
  }
}

TEST_CASE("divergent conjugate is reported") {
  // h(y) = log(1 + e^y) grows linearly: h*(p) = +inf for p > 1
  const PhiSpec lin = PhiSpec::custom([](double z) { return std::log1p(z); }, "log1p");
  CHECK_THROWS_AS(young_fenchel(lin, 2.0), DivergenceError);
}

TEST_CASE("membership check") {
  CHECK(phi_membership_check(PhiSpec::power_log(2.0, 0.0)).passed);
  CHECK(phi_membership_check(PhiSpec::power_log(1.0, 0.0)).passed);
  CHECK(phi_membership_check(PhiSpec::log_power(1.0)).passed);
  const MembershipReport lin = phi_membership_check(PhiSpec::custom([](double z) { return std::log1p(z); }, "log1p"));
  CHECK_FALSE(lin.summable);
  CHECK_FALSE(lin.passed);
  const MembershipReport bump = phi_membership_check(PhiSpec::custom([](double z) { return (z - 2) * (z - 2); }, "bump"));
  CHECK_FALSE(bump.monotone);
  CHECK_FALSE(bump.passed);
}

TEST_CASE("Fenchel-Moreau round trip") {
  std::vector<double> ys;
  for (int i = 0; i <= 50; ++i) ys.push_back(-2.0 + 0.1 * i);
  for (const PhiSpec& phi : {PhiSpec::power_log(1.0, 0.0), PhiSpec::power_log(2.0, 0.0),
                             PhiSpec::power_log(4.0, 0.0), PhiSpec::log_power(1.0)}) {
    INFO(phi.name());
    const FenchelMoreauReport r = fenchel_moreau_check(phi, ys);
    CHECK(r.max_relative_deviation < 1e-5);
  }
}

TEST_CASE("conjugate cache") {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const ConjugateCache cache(phi, 1.0, 64.0, 16, Exec::serial);
  for (std::size_t i = 0; i < cache.grid().size(); i += 7)
    CHECK(cache.psi(cache.grid()[i]) == doctest::Approx(oracle::psi_power(2.0, cache.grid()[i])).epsilon(1e-9));
  // interpolation in log p between nodes: the error in h* is about
  // (dt)^2/8 * d^2h*/dt^2 with dt = ln(10)/16, i.e. 0.0135 at p = 5.3
  CHECK(cache.psi(5.3) == doctest::Approx(oracle::psi_power(2.0, 5.3)).epsilon(3e-3));
  CHECK(cache.psi(5.3) != doctest::Approx(oracle::psi_power(2.0, 5.3)).epsilon(1e-9));
  CHECK(cache.psi_exact(5.3) == doctest::Approx(oracle::psi_power(2.0, 5.3)).epsilon(1e-9));
  // outside the grid the value is recomputed
  CHECK(cache.psi(200.0) == doctest::Approx(oracle::psi_power(2.0, 200.0)).epsilon(1e-9));
  const ConjugateCache bigger = cache.extended(256.0);
  CHECK(bigger.p_max() == doctest::Approx(256.0));
  CHECK(cache.p_max() == doctest::Approx(64.0));
  const ConjugateCache par(phi, 1.0, 64.0, 16, Exec::parallel);
  CHECK(par.h_star() == cache.h_star());
}

TEST_CASE("tabulated phi") {
  std::vector<double> z{0.0}, v{0.0};
  for (double t = 0.25; t <= 8.0; t *= 1.25) {
    z.push_back(t);
    v.push_back(t * t);
  }
  const PhiSpec tab = PhiSpec::tabulated(z, v);
  CHECK(tab.phi(2.0) == doctest::Approx(4.0).epsilon(2e-2));
  CHECK(phi_membership_check(tab).monotone);
  CHECK(phi_membership_check(tab).convex);
  CHECK_THROWS_AS(PhiSpec::tabulated({0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}), ConstructionError);
  CHECK_THROWS_AS(PhiSpec::tabulated({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.5, 1.7}), ConstructionError);
}
