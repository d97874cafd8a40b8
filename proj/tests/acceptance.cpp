// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N ...] [--expect-fail N ...]
//
// Exit status is 0 when the set of failing criteria equals the expected set.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/cli/config.hpp"
#include "orlicz/cli/run.hpp"
#include "orlicz/harness.hpp"
#include "orlicz/orlicz_norms.hpp"

using namespace orlicz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Evaluable scaled(const Evaluable& f, double c) {
  return [f, c](double x) { return c * f(x); };
}

std::vector<CorpusMember> polynomial_corpus() {
  std::vector<CorpusMember> out;
  for (const auto& m : default_corpus())
    if (std::holds_alternative<Polynomial>(m.rep)) out.push_back(m);
  return out;
}

Outcome k4() {
  const double k = k_constant(4.0);
  const double closed = std::pow(49.0 * std::numbers::pi, 0.25);
  const double displayed = 3.52238228;
  const bool ok = rel(k, closed) <= 1e-8 && std::abs(k - displayed) <= 1e-8;
  return {ok, fmt("K(4) = %.12f", k) + fmt(", (49 pi)^(1/4) = %.12f", closed)};
}

Outcome bernstein_equality() {
  double worst = 0.0;
  for (int n = 1; n <= 30; ++n) {
    const double r = markov_ratio(FunctionRep(TrigPolynomial::sine(n)), NormSpec::lp(2.0));
    worst = std::max(worst, rel(r, n));
  }
  return {worst <= 1e-8, fmt("max relative deviation %.3g", worst)};
}

Outcome band() {
  const auto corpus = default_corpus();
  bool ok = corpus.size() == 60;
  std::ostringstream os;
  for (const PhiSpec& phi : {PhiSpec::power_log(1.0, 0.0), PhiSpec::power_log(2.0, 0.0), PhiSpec::log_power(1.0)}) {
    const BandReport rep = band_check(corpus, phi);
    ok = ok && rep.passed();
    os << phi.name() << ": lower " << rep.lower_violations << ", upper " << rep.upper_violations
       << (rep.e2_substitution ? " (e^2 C4 substituted)" : "") << fmt(", B/G in [%.4f", rep.min_b_over_g)
       << fmt(", %.4f]", rep.max_b_over_g) << fmt(", log C4 %.4g; ", rep.constants.log_c4);
  }
  return {ok, os.str()};
}

Outcome jacobi_sweep() {
  SweepOptions opt;
  opt.family = SweepFamily::jacobi22;
  opt.n_min = 2;
  opt.n_max = 40;
  opt.norm = NormSpec::orlicz(PhiSpec::power_log(2.0, 0.0));
  const RatioReport rep = markov_sweep(opt);
  const bool slope_ok = rep.fit.slope >= 1.8 && rep.fit.slope <= 2.2;
  const bool ok = rep.entries.size() == 39 && rep.bound_holds() && slope_ok && rep.c5_estimate > 0.0;
  std::ostringstream os;
  os << "bound violations " << rep.violations.size() << fmt(", slope %.4f", rep.fit.slope)
     << fmt(" (95%% CI %.4f", rep.fit.ci_low) << fmt("..%.4f)", rep.fit.ci_high) << " vs [1.8, 2.2]"
     << fmt(", C5 estimate %.4g", rep.c5_estimate);
  return {ok, os.str()};
}

Outcome rational_bound() {
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  int bad = 0;
  double min_log_margin = std::numeric_limits<double>::infinity();
  for (double a : {0.5, 1.0, 4.0}) {
    const Rational q(Polynomial::constant(1.0), Polynomial({a, 0.0, 1.0}));
    for (int r : {1, 2, 3}) {
      const InequalityCheck c = rational_orlicz_check(q, phi, r);
      min_log_margin = std::min(min_log_margin, c.log_rhs - c.log_lhs);
      if (!(c.log_rhs >= c.log_lhs)) ++bad;
    }
  }
  return {bad == 0, std::to_string(bad) + " of 9 cases with negative margin" +
                        fmt(", min log(RHS/LHS) %.4g", min_log_margin)};
}

Outcome conjugates() {
  double worst = 0.0;
  for (double m : {1.0, 2.0, 4.0}) {
    for (double p : geometric_grid(std::max(1.0, m / 2.0), 100.0, 64)) {
      const double expect = std::pow(p / m, 1.0 / m) * std::exp(-1.0 / m);
      worst = std::max(worst, rel(psi(PhiSpec::power_log(m, 0.0), p), expect));
    }
  }
  std::vector<double> ys;
  for (int i = 0; i <= 100; ++i) ys.push_back(-2.0 + 0.05 * i);
  double fm = 0.0;
  for (const PhiSpec& phi : {PhiSpec::power_log(1.0, 0.0), PhiSpec::power_log(2.0, 0.0),
                             PhiSpec::power_log(4.0, 0.0), PhiSpec::log_power(1.0)})
    fm = std::max(fm, fenchel_moreau_check(phi, ys).max_relative_deviation);
  return {worst <= 1e-6 && fm < 1e-5,
          fmt("psi max relative error %.3g", worst) + fmt(", Fenchel-Moreau deviation %.3g", fm)};
}

Outcome layer_cake() {
  double worst_table = 0.0, worst_adaptive = 0.0;
  const Domain I = Domain::interval();
  for (const auto& m : polynomial_corpus()) {
    const Evaluable f = as_evaluable(m.rep);
    const DistributionProfile prof(f, I);
    const LorentzTable table(prof);
    for (double p : {1.0, 2.0, 3.0}) {
      const double lp = lp_quasinorm(f, I, p);
      worst_table = std::max(worst_table, rel(table.norm(p, p), lp));
      worst_adaptive = std::max(worst_adaptive, rel(lorentz_norm(prof, p, p), lp));
    }
  }
  return {std::max(worst_table, worst_adaptive) <= 1e-6,
          fmt("max relative deviation %.3g (table)", worst_table) + fmt(", %.3g (adaptive)", worst_adaptive)};
}

Outcome tail() {
  bool ok = true;
  std::ostringstream os;
  for (double s : {0.3, 0.5})
    for (int r : {1, 2}) {
      const TailReport t = tail_check(s, r);
      const bool case_ok = std::isfinite(t.prefactor) && t.prefactor > 0.0 && t.violations == 0 &&
                           t.converse_converged;
      ok = ok && case_ok;
      os << "s=" << s << " r=" << r << fmt(": prefactor %.4g", t.prefactor) << ", violations " << t.violations
         << ", converse " << (t.converse_converged ? "converged" : "diverged") << "; ";
    }
  return {ok, os.str()};
}

Outcome properties() {
  const Domain I = Domain::interval();
  const auto corpus = default_corpus();
  const PhiSpec phi = PhiSpec::power_log(2.0, 0.0);
  const ConjugateCache cache(phi);
  const OrliczN n = construct_N(phi);
  int homogeneity = 0, lyapunov = 0, chebyshev = 0, scale = 0, determinism = 0;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& m = corpus[i];
    const Domain dom = domain_of(m.rep);
    const Evaluable f = as_evaluable(m.rep);
    // homogeneity
    const double c = i % 2 == 0 ? 1e3 : -0.02;
    auto homog = [&](const std::function<double(const Evaluable&)>& norm) {
      if (rel(norm(scaled(f, c)), std::abs(c) * norm(f)) > 1e-8) ++homogeneity;
    };
    homog([&](const Evaluable& g) { return luxemburg_norm(g, dom, n); });
    homog([&](const Evaluable& g) { return lp_quasinorm(g, dom, 3.0); });
    if (i % 3 == 0) {
      homog([&](const Evaluable& g) { return g_norm(g, dom, cache).value; });
      homog([&](const Evaluable& g) { return lorentz_norm(g, dom, 2.0, 1.5); });
    }
    if (i % 10 == 0 && dom.kind == Domain::Kind::interval)
      homog([&](const Evaluable& g) { return v_quasinorm(g, dom, phi, 2).value; });
    // Lyapunov: ||f||_p nondecreasing in p
    double prev = 0.0;
    for (double p : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0}) {
      const double v = lp_quasinorm(f, dom, p);
      if (v < prev * (1.0 - 1e-10)) ++lyapunov;
      prev = v;
    }
    // Chebyshev: w^p T(|f|, w) <= ||f||_p^p
    const DistributionProfile prof(f, dom);
    for (double p : {1.0, 2.0, 4.0})
      for (double frac : {0.1, 0.5, 0.9}) {
        const double w = frac * prof.sup();
        if (std::pow(w, p) * prof.measure_gt(w) > std::pow(lp_quasinorm(f, dom, p), p) * (1.0 + 1e-10)) ++chebyshev;
      }
    // scale invariance of Markov ratios under Q -> 10^3 Q
    if (const auto* q = std::get_if<Polynomial>(&m.rep); q && q->degree() >= 1) {
      for (const NormSpec& ns : {NormSpec::lp(2.0), NormSpec::orlicz(phi)})
        if (rel(markov_ratio(FunctionRep(q->scaled(1e3)), ns), markov_ratio(m.rep, ns)) > 1e-8) ++scale;
    }
  }
  // determinism of CLI output bytes
  for (const char* text : {"command = markov-sweep\nseed = 3\n[phi]\nfamily = power-log\nm = 2\n"
                           "[sweep]\nfamily = random-poly\nn_range = 2..12\n",
                           "command = tail\n[tail]\ns = 0.3\nr = 1\n"}) {
    const cli::ParseResult pr = cli::parse_config(text);
    if (!pr.ok()) {
      ++determinism;
      continue;
    }
    const cli::ReportEnvelope a = cli::run(*pr.config), b = cli::run(*pr.config);
    if (cli::render_json(a, false) != cli::render_json(b, false) || cli::render_csv(a.csv) != cli::render_csv(b.csv))
      ++determinism;
  }
  std::ostringstream os;
  os << "failures: homogeneity " << homogeneity << ", Lyapunov " << lyapunov << ", Chebyshev " << chebyshev
     << ", scale invariance " << scale << ", CLI determinism " << determinism;
  return {homogeneity + lyapunov + chebyshev + scale + determinism == 0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only, expect_fail;
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "K(4) = (49 pi)^(1/4)", 1.0, k4},
      {2, "Bernstein equality for sin(n x), n = 1..30", 10.0, bernstein_equality},
      {3, "B/G equivalence band on the 60-member corpus", 300.0, band},
      {4, "Markov sweep of P_n^(2,2) in B(phi_2,0), n = 2..40", 300.0, jacobi_sweep},
      {5, "rational derivative bound, 1/(x^2 + a)", 180.0, rational_bound},
      {6, "closed-form conjugates and Fenchel-Moreau", 30.0, conjugates},
      {7, "layer-cake identity ||f||_{p,p} = ||f||_p", 60.0, layer_cake},
      {8, "tail characterization of (1 - x)^(-rs)", 120.0, tail},
      {9, "property suites", 180.0, properties},
  };

  std::set<int> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) failed.insert(c.id);
    std::printf("%s  criterion %d: %s | %s | %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.title.c_str(), o.detail.c_str(), secs, c.budget_s, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }

  std::set<int> expected;
  for (int id : expect_fail)
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) expected.insert(id);
  std::printf("%zu failing", failed.size());
  if (!expected.empty()) {
    std::printf(", expected failing:");
    for (int id : expected) std::printf(" %d", id);
  }
  std::printf("\n");
  return failed == expected ? 0 : 1;
}
