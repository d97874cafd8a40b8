#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/harness.hpp"
#include "orlicz/orlicz_norms.hpp"

using namespace orlicz;

namespace {

const Domain I = Domain::interval();

Evaluable scaled(const Evaluable& f, double c) {
  return [f, c](double x) { return c * f(x); };
}

// A few members of each family, small enough for unit-test time.
std::vector<CorpusMember> small_corpus() {
  const auto all = default_corpus();
  std::vector<CorpusMember> out;
  for (const char* name : {"poly-01", "poly-04", "poly-11", "gap-03", "rational-05", "trig-02"})
    for (const auto& m : all)
      if (m.name == name) out.push_back(m);
  return out;
}

}  // namespace

TEST_CASE("splice constants") {
  const OrliczN n2 = construct_N(PhiSpec::power_log(2.0, 0.0));
  CHECK(n2.c1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(n2.c2 == doctest::Approx(2.3316439).epsilon(1e-7));
  CHECK(n2.c2 == doctest::Approx(oracle::c2_power(2.0)).epsilon(1e-12));
  const OrliczN n1 = construct_N(PhiSpec::power_log(1.0, 0.0));
  CHECK(n1.c1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n1.c2 == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(construct_N(PhiSpec::power_log(4.0, 0.0)).c1 == doctest::Approx(oracle::c1_power(4.0)).epsilon(1e-12));

  for (const PhiSpec& phi : {PhiSpec::power_log(2.0, 0.0), PhiSpec::power_log(1.0, 0.0),
                             PhiSpec::power_log(1.5, 1.0), PhiSpec::log_power(1.0), PhiSpec::log_power(0.5)}) {
    INFO(phi.name());
    const OrliczN n = construct_N(phi);
    const SpliceDiagnostics d = splice_diagnostics(n);
    CHECK(d.continuity_residual <= 1e-12);
    CHECK(d.chord_slope <= d.tangent_slope * (1.0 + 1e-9));
    CHECK(n(0.0) == 0.0);
    CHECK(n(-0.3) == n(0.3));
    double prev = 0.0;
    for (double u = 0.01; u < 6.0; u *= 1.1) {
      CHECK(n(u) >= prev);
      prev = n(u);
    }
  }
  const PhiSpec steep = PhiSpec::custom([](double z) { return 100.0 * std::pow(z, 0.1); }, "steep");
  CHECK_THROWS_AS(construct_N(steep), ConstructionError);
}

TEST_CASE("N evaluation") {
  const OrliczN n = construct_N(PhiSpec::power_log(2.0, 0.0));
  CHECK(n_eval(n, 0.0) == 0.0);
  CHECK(n_eval(n, n.c1) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK(n_eval(n, 2.0) == doctest::Approx(std::exp(4.0)).epsilon(1e-13));
  CHECK(n.log_value(100.0) == doctest::Approx(1e4).epsilon(1e-14));
  CHECK(n.log_value(0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("Luxemburg norm") {
  const OrliczN n = construct_N(PhiSpec::power_log(2.0, 0.0));
  CHECK(luxemburg_norm([](double) { return 0.0; }, I, n) == 0.0);
  CHECK(luxemburg_norm([](double) { return 1.0; }, I, n) == doctest::Approx(2.3316439816).epsilon(1e-10));
  CHECK(luxemburg_norm([](double) { return 0.2; }, I, n) == doctest::Approx(0.2 * n.c2).epsilon(1e-10));
  for (const auto& m : small_corpus()) {
    INFO(m.name);
    const Domain dom = domain_of(m.rep);
    const Evaluable f = as_evaluable(m.rep);
    const LuxemburgResult r = luxemburg_norm_detail(f, dom, n);
    CHECK(r.tolerance_met);
    CHECK(std::abs(r.modular - 1.0) <= 1e-6);
    CHECK(luxemburg_norm(scaled(f, 2.0), dom, n) == doctest::Approx(2.0 * r.value).epsilon(1e-8));
  }
}

TEST_CASE("G norm") {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const ConjugateCache cache(phi);
  const NormResult one = g_norm([](double) { return 1.0; }, I, cache);
  CHECK(one.value == doctest::Approx(1.0 / 0.4288819425).epsilon(1e-8));
  CHECK(one.maximizer_p == doctest::Approx(1.0));
  CHECK(g_norm([](double) { return 0.0; }, I, cache).value == 0.0);
  for (const auto& m : small_corpus()) {
    INFO(m.name);
    const Domain dom = domain_of(m.rep);
    const Evaluable f = as_evaluable(m.rep);
    const double g = g_norm(f, dom, cache).value;
    for (double c : {0.1, 3.0, 100.0})
      CHECK(g_norm(scaled(f, c), dom, cache).value == doctest::Approx(c * g).epsilon(1e-8));
    CHECK(g_norm(scaled(f, -3.0), dom, cache).value == doctest::Approx(3.0 * g).epsilon(1e-8));
  }
}

TEST_CASE("sup over p extends the grid or reports divergence") {
  const SupScan s = sup_over_p([](double p) { return std::exp(-std::pow(std::log(p / 2000.0), 2)); }, 1.0,
                               1024.0, 32, Exec::serial);
  CHECK(s.extensions == 1);
  CHECK(s.argmax == doctest::Approx(2000.0).epsilon(1e-5));
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(sup_over_p([](double p) { return p; }, 1.0, 1024.0, 32, Exec::serial), DivergenceError);
}

TEST_CASE("Lorentz norms") {
  auto x = [](double t) { return t; };
  CHECK(lorentz_norm(x, I, 2.0, 2.0) == doctest::Approx(0.5773503).epsilon(1e-7));
  const LorentzTable tx(DistributionProfile(x, I));
  for (double p : {1.0, 2.0, 3.5})
    for (double b : {1.0, 2.0, 5.0, 40.0}) {
      INFO("p = " << p << ", b = " << b);
      CHECK(tx.norm(p, b) == doctest::Approx(oracle::lorentz_identity(p, b)).epsilon(1e-10));
      CHECK(lorentz_norm(x, I, p, b) == doctest::Approx(oracle::lorentz_identity(p, b)).epsilon(1e-8));
    }
  // b = inf: sup_w w (1 - w)^{1/p}, attained at w = p / (p + 1)
  for (double p : {1.0, 2.0, 6.0}) {
    const double w = p / (p + 1.0);
    const double expect = w * std::pow(1.0 - w, 1.0 / p);
    CHECK(tx.norm(p, kInfiniteIndex) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(lorentz_norm(x, I, p, kInfiniteIndex) == doctest::Approx(expect).epsilon(1e-8));
  }
  auto one = [](double) { return 1.0; };
  for (double p : {1.0, 3.0}) CHECK(lorentz_norm(one, I, p, kInfiniteIndex) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lorentz_norm([](double) { return 0.0; }, I, 2.0, 3.0) == 0.0);
  CHECK_THROWS_AS(lorentz_norm(x, I, 0.5, 2.0), RangeError);
}

TEST_CASE("layer-cake table agrees with the adaptive reference") {
  for (const auto& m : small_corpus()) {
    INFO(m.name);
    const Domain dom = domain_of(m.rep);
    const DistributionProfile prof(as_evaluable(m.rep), dom);
    const LorentzTable t(prof);
    for (double p : {1.0, 2.0, 3.0}) {
      CHECK(t.norm(p, p) == doctest::Approx(lp_quasinorm(as_evaluable(m.rep), dom, p)).epsilon(1e-8));
      CHECK(t.norm(p, 1.5) == doctest::Approx(lorentz_norm(prof, p, 1.5)).epsilon(1e-7));
    }
  }
}

TEST_CASE("weighted Lorentz G norm") {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const ConjugateCache cache(phi);
  CHECK(weighted_lorentz_g([](double) { return 0.0; }, I, cache, LorentzIndex::fixed(2.0)).value == 0.0);
  for (const auto& m : small_corpus()) {
    INFO(m.name);
    const Domain dom = domain_of(m.rep);
    const Evaluable f = as_evaluable(m.rep);
    const double g = g_norm(f, dom, cache).value;
    const double coupled = weighted_lorentz_g(f, dom, cache, LorentzIndex::coupled_to_p()).value;
    CHECK(coupled == doctest::Approx(g).epsilon(1e-6));
    for (double b : {1.0, 2.0, kInfiniteIndex}) {
      const double v = weighted_lorentz_g(f, dom, cache, LorentzIndex::fixed(b)).value;
      CHECK(v > 0.0);
      CHECK(weighted_lorentz_g(scaled(f, 3.0), dom, cache, LorentzIndex::fixed(b)).value ==
            doctest::Approx(3.0 * v).epsilon(1e-8));
    }
  }
}

TEST_CASE("V quasinorm") {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const NormResult one = v_quasinorm([](double) { return 1.0; }, I, phi, 1);
  CHECK(one.value == doctest::Approx(1.0 / (std::sqrt(2.0) * std::exp(-0.5))).epsilon(1e-9));
  CHECK(one.maximizer_p == doctest::Approx(4.0));
  CHECK(v_quasinorm([](double) { return 0.0; }, I, phi, 2).value == 0.0);
  for (const auto& m : small_corpus()) {
    INFO(m.name);
    const Domain dom = domain_of(m.rep);
    const Evaluable f = as_evaluable(m.rep);
    for (int r : {1, 3}) {
      const double v = v_quasinorm(f, dom, phi, r).value;
      CHECK(v_quasinorm(scaled(f, 100.0), dom, phi, r).value == doctest::Approx(100.0 * v).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(v_quasinorm([](double) { return 1.0; }, I, phi, 0), RangeError);
}

TEST_CASE("Jensen-Lyapunov sandwich") {
  // For p < 4: ||f||_p <= ||f||_4 and psi(p) >= psi(1), so
  // sup_{p>=4} <= G <= max(1, psi(4)/psi(1)) sup_{p>=4}.
  for (const PhiSpec& phi : {PhiSpec::power_log(2.0, 0.0), PhiSpec::log_power(1.0)}) {
    const ConjugateCache cache(phi);
    const double factor = std::max(1.0, psi(phi, 4.0) / psi(phi, 1.0));
    for (const auto& m : small_corpus()) {
      INFO(phi.name() << " " << m.name);
      const Domain dom = domain_of(m.rep);
      const Evaluable f = as_evaluable(m.rep);
      const double tail = sup_over_p([&](double p) { return lp_quasinorm(f, dom, p) / psi(phi, p); }, 4.0, 1024.0,
                                     64, Exec::serial)
                              .value;
      const double g = g_norm(f, dom, cache).value;
      CHECK(tail <= g * (1.0 + 1e-9));
      CHECK(g <= factor * tail * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("equivalence constants") {
  const EquivalenceConstants e2 = equivalence_constants(construct_N(PhiSpec::power_log(2.0, 0.0)));
  CHECK(e2.c3 == 1.0);
  CHECK(e2.log_c4 > 2.0);
  CHECK(std::isfinite(e2.log_c4));
  CHECK(std::isfinite(e2.log_c4_displayed));
  CHECK(e2.k0 == doctest::Approx(5.0));
  const EquivalenceConstants e1 = equivalence_constants(construct_N(PhiSpec::power_log(1.0, 0.0)));
  CHECK(e1.c3 == 1.0);
  CHECK(e1.c4() > std::exp(2.0));
  // k0 = 5, log N(e^3) = e^3, series terms e^{e^k - e^{k+1}} are negligible
  CHECK(e1.log_c4 == doctest::Approx(2.0 + std::exp(3.0)).epsilon(1e-12));
  const EquivalenceConstants lp = equivalence_constants(construct_N(PhiSpec::log_power(1.0)));
  const OrliczN nlp = construct_N(PhiSpec::log_power(1.0));
  CHECK(lp.c3 == std::max({1.0, nlp.c1, 1.0 / nlp.c2}));
  CHECK(lp.series > 0.0);
  CHECK(lp.series_displayed > lp.series);
  const EquivalenceConstants e4 = equivalence_constants(construct_N(PhiSpec::power_log(4.0, 0.0)));
  CHECK(std::isfinite(e4.log_c4));
  CHECK(std::isinf(e4.c4()));
}

TEST_CASE("norm dispatch") {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  auto one = [](double) { return 1.0; };
  CHECK(evaluate_norm(one, I, NormSpec::orlicz(phi)).value == doctest::Approx(2.3316439816).epsilon(1e-9));
  CHECK(evaluate_norm(one, I, NormSpec::lp(3.0)).value == doctest::Approx(1.0));
  CHECK(evaluate_norm(one, I, NormSpec::lorentz(2.0, 3.0)).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(NormSpec::weighted_lorentz(phi, LorentzIndex::coupled_to_p()).describe() == "G*_p(power-log(m=2,r=0))");
  NormSpec broken = NormSpec::g(phi);
  broken.phi.reset();
  CHECK_THROWS_AS(evaluate_norm(one, I, broken), RangeError);
}
