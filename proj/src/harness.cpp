#include "orlicz/harness.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

QuadratureConfig serial(QuadratureConfig cfg) {
  cfg.exec = Exec::serial;
  return cfg;
}

double safe_exp(double v) { return v > 709.0 ? kInf : std::exp(v); }

InequalityCheck make_check(double log_lhs, double log_rhs) {
  InequalityCheck c;
  c.log_lhs = log_lhs;
  c.log_rhs = log_rhs;
  c.lhs = safe_exp(log_lhs);
  c.rhs = safe_exp(log_rhs);
  c.margin = c.rhs - c.lhs;
  c.holds = log_lhs <= log_rhs;
  return c;
}

void require_pole_free(const Rational& q) {
  const PoleCheck pc = check_no_poles(q);
  if (!pc.pole_free) {
    std::ostringstream os;
    os.precision(17);
    os << "rational function rejected: denominator near zero at x = " << pc.witness
       << " (|den| = " << pc.min_abs_denominator << ")";
    throw RejectedInputError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------- constants

double k_constant(double p) {
  if (!(p > 2.0)) throw RangeError("K(p) requires p > 2");
  const double pi = std::numbers::pi;
  return std::pow(4.0 * pi * (p + 3.0) * (p + 3.0) / (p * std::sin(2.0 * pi / p)), 1.0 / p);
}

double log_d_constant(int r) {
  if (r < 1) throw RangeError("D(r) requires r >= 1");
  double log_fact;
  if (r > 20) {
    log_fact = std::lgamma(r + 1.0);
  } else {
    double f = 1.0;
    for (int k = 2; k <= r; ++k) f *= k;
    log_fact = std::log(f);
  }
  const double e = r + 0.25;
  return 1.0 / std::numbers::e + log_fact + e * std::log(4.0 / 3.0) + e * std::log(e);
}

double d_constant(int r) { return std::exp(log_d_constant(r)); }

// ---------------------------------------------------------------- ratios

double markov_ratio(const FunctionRep& q, const NormSpec& norm, const QuadratureConfig& cfg) {
  const Domain dom = domain_of(q);
  const double den = evaluate_norm(as_evaluable(q), dom, norm, cfg).value;
  if (!(den > 0.0)) throw DegenerateInputError("Markov ratio of a zero function");
  if (degree(q) == 0.0) return 0.0;
  const double num = evaluate_norm(as_evaluable(derivative(q, 1)), dom, norm, cfg).value;
  return num / den;
}

SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys, double x_min) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
    if (xs[i] >= x_min && ys[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  SlopeFit fit;
  fit.points = static_cast<int>(lx.size());
  if (fit.points < 2) {
    fit.slope = fit.intercept = fit.ci_low = fit.ci_high = kNaN;
    return fit;
  }
  const double n = fit.points;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (fit.points < 3) {
    fit.ci_low = fit.ci_high = kNaN;
    return fit;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - fit.intercept - fit.slope * lx[i];
    sse += e * e;
  }
  const double se = std::sqrt(sse / (n - 2.0) / sxx);
  const boost::math::students_t dist(n - 2.0);
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.ci_low = fit.slope - t * se;
  fit.ci_high = fit.slope + t * se;
  return fit;
}

std::string sweep_family_name(SweepFamily f) {
  switch (f) {
    case SweepFamily::jacobi22: return "jacobi22";
    case SweepFamily::chebyshev: return "chebyshev";
    case SweepFamily::random_poly: return "random-poly";
  }
  return "?";
}

RatioReport markov_sweep(const SweepOptions& opt) {
  if (opt.n_min > opt.n_max || opt.n_min < 0) throw RangeError("empty degree range");
  RatioReport rep;
  rep.family = sweep_family_name(opt.family);
  rep.norm = opt.norm.describe();
  rep.k4 = k_constant(4.0);

  double log_const = kNaN;
  if (opt.norm.kind == NormSpec::Kind::orlicz && opt.norm.phi) {
    const OrliczN n = construct_N(*opt.norm.phi);
    const EquivalenceConstants ec = equivalence_constants(n);
    rep.psi4 = psi(*opt.norm.phi, 4.0);
    rep.c1 = n.c1;
    rep.c2 = n.c2;
    rep.c3 = ec.c3;
    rep.log_c4 = ec.log_c4;
    rep.k0 = ec.k0;
    rep.bound_kind = "orlicz_markov";
    log_const = std::log(rep.k4) + std::log(std::max(1.0, rep.psi4)) + ec.log_c4 + std::log(ec.c3);
  } else if (opt.norm.kind == NormSpec::Kind::lp && opt.norm.p > 2.0) {
    rep.kp = k_constant(opt.norm.p);
    rep.bound_kind = "markov_lp";
    log_const = std::log(rep.kp);
  } else {
    rep.bound_kind = "none";
  }
  if (opt.norm.phi && rep.psi4 == 0.0) rep.psi4 = psi(*opt.norm.phi, 4.0);
  if (!std::isnan(log_const)) log_const += std::log(opt.bound_scale);

  const std::size_t count = static_cast<std::size_t>(opt.n_max - opt.n_min + 1);
  const QuadratureConfig inner = serial(opt.cfg);
  rep.entries = kernels::map_indexed(
      count,
      [&](std::size_t i) {
        RatioEntry e;
        e.n = opt.n_min + static_cast<int>(i);
        Polynomial q;
        switch (opt.family) {
          case SweepFamily::jacobi22: q = jacobi22(e.n); break;
          case SweepFamily::chebyshev: q = chebyshev_t(e.n); break;
          case SweepFamily::random_poly:
            q = std::get<Polynomial>(random_family(FamilyKind::polynomial, e.n, opt.seed));
            break;
        }
        e.ratio = markov_ratio(q, opt.norm, inner);
        if (std::isnan(log_const) || e.n == 0) {
          e.log_bound = std::isnan(log_const) ? kNaN : -kInf;
          e.bound = std::isnan(log_const) ? kNaN : 0.0;
        } else {
          e.log_bound = 2.0 * std::log(static_cast<double>(e.n)) + log_const;
          e.bound = safe_exp(e.log_bound);
        }
        e.margin = e.bound - e.ratio;
        return e;
      },
      opt.cfg.exec);

  std::vector<double> ns, rs;
  double c5 = kInf;
  for (const auto& e : rep.entries) {
    ns.push_back(e.n);
    rs.push_back(e.ratio);
    if (e.n >= 1 && e.ratio > 0.0) c5 = std::min(c5, e.ratio / (static_cast<double>(e.n) * e.n));
    if (!std::isnan(e.log_bound) && e.n >= 1 && std::log(e.ratio) > e.log_bound)
      rep.violations.push_back(e.n);
  }
  rep.c5_estimate = std::isinf(c5) ? 0.0 : c5;
  rep.fit = fit_loglog(ns, rs, 2.0);
  return rep;
}

// ---------------------------------------------------------------- classical

InequalityCheck bernstein_trig_check(const TrigPolynomial& q, const NormSpec& norm,
                                     const QuadratureConfig& cfg) {
  const Domain dom = Domain::circle();
  const double nq = evaluate_norm(q, dom, norm, cfg).value;
  if (!(nq > 0.0)) throw DegenerateInputError("Bernstein check of a zero function");
  InequalityCheck c;
  const int deg = q.degree();
  c.rhs = deg * nq;
  c.lhs = deg == 0 ? 0.0 : evaluate_norm(q.derivative(), dom, norm, cfg).value;
  c.log_lhs = std::log(c.lhs);
  c.log_rhs = std::log(c.rhs);
  c.margin = c.rhs - c.lhs;
  c.holds = c.margin >= -1e-8 * c.lhs;
  return c;
}

InequalityCheck lp_rational_check(const Rational& q, double p, int r, const QuadratureConfig& cfg) {
  if (!(p >= 4.0)) throw RangeError("rational L_p check requires p >= 4");
  if (r < 1) throw RangeError("derivative order must be >= 1");
  require_pole_free(q);
  const Domain dom = Domain::interval();
  const double gamma = p / (p * r + 1.0);
  const double lhs = lp_quasinorm(q.derivative(r), dom, gamma, cfg);
  const double nq = lp_quasinorm(q, dom, p, cfg);
  const double log_rhs = log_d_constant(r) + r * std::log(static_cast<double>(q.degree())) + std::log(nq);
  return make_check(std::log(lhs), log_rhs);
}

InequalityCheck rational_orlicz_check(const Rational& q, const PhiSpec& phi, int r,
                                      const QuadratureConfig& cfg) {
  if (r < 1) throw RangeError("derivative order must be >= 1");
  require_pole_free(q);
  const Domain dom = Domain::interval();
  const OrliczN n = construct_N(phi);
  const EquivalenceConstants ec = equivalence_constants(n);
  const double lhs = v_quasinorm(q.derivative(r), dom, phi, r, cfg).value;
  const double b = luxemburg_norm(q, dom, n, cfg);
  const double log_rhs = ec.log_c4 + log_d_constant(r) +
                         r * std::log(static_cast<double>(q.degree())) + std::log(b);
  return make_check(std::log(lhs), log_rhs);
}

GapReport gap_check(const std::vector<Gap>& family, double p, const QuadratureConfig& cfg) {
  if (!(p > 0.0)) throw RangeError("GAP check requires p > 0");
  GapReport rep;
  rep.p = p;
  const QuadratureConfig inner = serial(cfg);
  const Domain dom = Domain::interval();
  rep.entries = kernels::map_indexed(
      family.size(),
      [&](std::size_t i) {
        const Gap& q = family[i];
        GapEntry e;
        e.degree = q.degree();
        if (q.factors().empty()) return e;
        const FunctionRep d = derivative(FunctionRep(q), 1);
        e.ratio = lp_quasinorm(as_evaluable(d), dom, p, inner) / lp_quasinorm(q, dom, p, inner);
        e.scaled = e.ratio / (e.degree * e.degree);
        return e;
      },
      cfg.exec);
  std::vector<double> xs, ys;
  for (const auto& e : rep.entries) {
    rep.max_scaled = std::max(rep.max_scaled, e.scaled);
    xs.push_back(e.degree);
    ys.push_back(e.scaled);
  }
  rep.scaled_fit = fit_loglog(xs, ys, 1.0);
  rep.bounded = std::isfinite(rep.max_scaled) &&
                (std::isnan(rep.scaled_fit.slope) || rep.scaled_fit.slope <= 0.1);
  return rep;
}

// ---------------------------------------------------------------- tail

namespace {

// inf over p >= 4 of beta (log psi(p) - log u), beta = p / (pr + 1).
double log_chebyshev_bound(const PhiSpec& phi, int r, double log_u) {
  auto g = [&](double log_p) {
    const double p = std::exp(log_p);
    const double beta = p / (p * r + 1.0);
    return -beta * (std::log(psi(phi, p)) - log_u);
  };
  const std::vector<double> grid = geometric_grid(4.0, 1e5, 16);
  std::size_t best = 0;
  double best_v = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = g(std::log(grid[i]));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = std::log(grid[best == 0 ? 0 : best - 1]);
  const double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  if (b > a) best_v = std::max(best_v, g(golden_section_max(g, a, b, 1e-9)));
  return -best_v;
}

}  // namespace

TailReport tail_check(double s, int r, double m, double u_max, const QuadratureConfig& cfg) {
  if (!(s > 0.0 && s < 1.0)) throw RangeError("tail check requires 0 < s < 1");
  if (r < 1) throw RangeError("tail check requires r >= 1");
  if (!(u_max > 3.0)) throw RangeError("tail check requires u_max > 3");
  TailReport rep;
  rep.s = s;
  rep.r = r;
  rep.m = m;
  QuadratureConfig qc = cfg;
  // The integrands |f|^beta have an algebraic endpoint singularity, for
  // which adaptive bisection converges slowly.
  qc.rel_tol = std::max(cfg.rel_tol, 1e-8);
  const EndpointSingularity f{r * s, 1.0};
  const Domain dom = Domain::interval();
  const PhiSpec phi = PhiSpec::power_log(m, 0.0);

  rep.v_norm = v_quasinorm(f, dom, phi, r, qc).value;
  const DistributionProfile profile(f, dom, qc);
  rep.u = geometric_grid(3.0, u_max, 32);
  for (double u : rep.u) {
    const double t = profile.measure_gt(u * rep.v_norm);
    const double model = std::pow(u, -1.0 / r) * std::pow(std::log(u), 1.0 / (m * r));
    rep.measured.push_back(t);
    rep.model.push_back(model);
    rep.chebyshev.push_back(std::exp(log_chebyshev_bound(phi, r, std::log(u))));
    rep.prefactor = std::max(rep.prefactor, t / model);
  }
  rep.max_violation = -kInf;
  for (std::size_t i = 0; i < rep.u.size(); ++i) {
    const double bound = rep.prefactor * rep.model[i];
    rep.max_violation = std::max(rep.max_violation, rep.measured[i] - bound);
    if (rep.measured[i] > bound * (1.0 + 1e-12)) ++rep.violations;
    if (rep.measured[i] > rep.chebyshev[i] * (1.0 + 1e-6)) ++rep.chebyshev_violations;
  }

  rep.converse_phi_m = m / (m * r + 1.0);
  try {
    rep.converse_v_norm =
        v_quasinorm(f, dom, PhiSpec::power_log(rep.converse_phi_m, 0.0), r, qc).value;
    rep.converse_converged = std::isfinite(rep.converse_v_norm);
  } catch (const DivergenceError&) {
    rep.converse_converged = false;
  }
  const double lo = 4.0 / (4.0 * r + 1.0), hi = 1.0 / r;
  const int k = 16;
  for (int i = 0; i < k; ++i) {
    const double beta = lo + (hi - lo) * (i + 0.5) / k;
    const double nb = lp_quasinorm(f, dom, beta, qc);
    rep.beta.push_back(beta);
    rep.beta_norm.push_back(nb);
    rep.beta_model_prefactor =
        std::max(rep.beta_model_prefactor, nb * std::pow(hi - beta, (m * r + 1.0) / m));
  }
  return rep;
}

// ---------------------------------------------------------------- extremal

ExtremalResult extremal_search(const NormSpec& norm, int n, int restarts, std::uint64_t seed,
                               int sweeps, const QuadratureConfig& cfg) {
  if (n < 1) throw RangeError("extremal search requires n >= 1");
  restarts = std::max(restarts, 1);
  const QuadratureConfig inner = serial(cfg);
  auto normalize = [](std::vector<double> c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    s = std::sqrt(s);
    for (auto& v : c) v /= s;
    return c;
  };
  auto ratio_of = [&](const std::vector<double>& c) {
    try {
      return markov_ratio(Polynomial::from_chebyshev(c), norm, inner);
    } catch (const DegenerateInputError&) {
      return -kInf;
    }
  };

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> j = jacobi22(n).chebyshev();
    j.resize(static_cast<std::size_t>(n) + 1, 0.0);
    starts.push_back(normalize(j));
    SplitMix64 rng(seed);
    for (int k = 1; k < restarts; ++k) {
      std::vector<double> c(static_cast<std::size_t>(n) + 1);
      for (auto& v : c) v = rng.uniform(-1.0, 1.0);
      starts.push_back(normalize(c));
    }
  }

  struct Run {
    std::vector<double> c;
    double ratio = 0.0;
    int evals = 0;
  };
  const std::vector<Run> runs = kernels::map_indexed(
      starts.size(),
      [&](std::size_t k) {
        Run run{starts[k], ratio_of(starts[k]), 1};
        double step = 0.5;
        for (int sw = 0; sw < sweeps; ++sw, step *= 0.5) {
          for (std::size_t i = 0; i < run.c.size(); ++i) {
            auto line = [&](double t) {
              std::vector<double> c = run.c;
              c[i] += t;
              ++run.evals;
              return ratio_of(c);
            };
            const double t = golden_section_max(line, -step, step, 1e-4 * step, 60);
            std::vector<double> cand = run.c;
            cand[i] += t;
            const double v = ratio_of(cand);
            ++run.evals;
            if (v > run.ratio) {
              run.c = normalize(cand);
              run.ratio = v;
            }
          }
        }
        return run;
      },
      cfg.exec);

  ExtremalResult out;
  std::size_t best = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out.evaluations += runs[k].evals;
    if (runs[k].ratio > runs[best].ratio) best = k;
  }
  out.best = Polynomial::from_chebyshev(runs[best].c);
  out.ratio = runs[best].ratio;
  out.jacobi_ratio = markov_ratio(jacobi22(n), norm, inner);
  return out;
}

// ---------------------------------------------------------------- B/G band

std::vector<CorpusMember> default_corpus(std::uint64_t seed) {
  std::vector<CorpusMember> out;
  auto name = [](const char* prefix, int n) {
    std::ostringstream os;
    os << prefix << '-' << (n < 10 ? "0" : "") << n;
    return os.str();
  };
  for (int n = 1; n <= 30; ++n)
    out.push_back({name("poly", n), random_family(FamilyKind::polynomial, n, seed)});
  for (int n = 1; n <= 10; ++n)
    out.push_back({name("gap", n), random_family(FamilyKind::gap, n, seed)});
  for (int n = 1; n <= 10; ++n)
    out.push_back({name("rational", n), random_family(FamilyKind::rational, n, seed)});
  for (int n = 1; n <= 10; ++n)
    out.push_back({name("trig", n), random_family(FamilyKind::trig, n, seed)});
  return out;
}

BandReport band_check(const std::vector<CorpusMember>& corpus, const PhiSpec& phi,
                          const QuadratureConfig& cfg) {
  BandReport rep;
  rep.phi = phi.name();
  rep.n = construct_N(phi);
  rep.constants = equivalence_constants(rep.n);
  const ConjugateCache cache(phi, 1.0, 1024.0, 64, cfg.exec);
  const QuadratureConfig inner = serial(cfg);
  // G = B exactly for constants, so the lower comparison carries a small
  // relative slack for quadrature and root-finding error.
  const double slack = 1e-7;

  rep.rows = kernels::map_indexed(
      corpus.size(),
      [&](std::size_t i) {
        const auto& m = corpus[i];
        const Domain dom = domain_of(m.rep);
        const Evaluable f = as_evaluable(m.rep);
        BandRow row;
        row.member = m.name;
        row.b = luxemburg_norm(f, dom, rep.n, inner);
        row.g = g_norm(f, dom, cache, inner).value;
        row.lower_ok = row.g / rep.constants.c3 <= row.b * (1.0 + slack);
        row.upper_ok = std::log(row.b) <= rep.constants.log_c4 + std::log(row.g);
        return row;
      },
      cfg.exec);

  rep.min_b_over_g = kInf;
  rep.max_b_over_g = 0.0;
  for (const auto& row : rep.rows) {
    if (!row.lower_ok) ++rep.lower_violations;
    if (!row.upper_ok) ++rep.upper_violations;
    rep.min_b_over_g = std::min(rep.min_b_over_g, row.b / row.g);
    rep.max_b_over_g = std::max(rep.max_b_over_g, row.b / row.g);
  }
  if (rep.upper_violations > 0) {
    rep.e2_substitution = true;
    for (const auto& row : rep.rows)
      if (std::log(row.b) > 2.0 + rep.constants.log_c4 + std::log(row.g))
        ++rep.violations_after_substitution;
  }
  return rep;
}

}  // namespace orlicz
