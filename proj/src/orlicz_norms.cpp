#include "orlicz/orlicz_norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- N-function

double OrliczN::log_value(double u) const {
  const double a = std::abs(u);
  if (a == 0.0) return kNegInf;
  if (a <= c1) return std::log(c2 * a);
  return phi.h(std::log(a));
}

double OrliczN::operator()(double u) const {
  const double a = std::abs(u);
  if (a <= c1) return c2 * a;
  return std::exp(phi.phi(a));
}

double n_eval(const OrliczN& n, double u) { return n(u); }

OrliczN construct_N(const PhiSpec& phi) {
  // u phi'(u) = h'(log u), so C1 = exp(y) with h'(y) = 1.
  const double y_lo = std::log(1e-3), y_hi = std::log(1e3);
  auto g = [&](double y) { return phi.h_prime(y) - 1.0; };
  const int steps = 4000;
  double a = y_lo, ga = g(a);
  if (std::isnan(ga)) throw ConstructionError("h' is not finite at the splice search start");
  if (ga >= 0.0)
    throw ConstructionError("u phi'(u) >= 1 already at u = 1e-3; no splice root in [1e-3, 1e3], "
                            "supply a custom splice");
  double b = a, gb = ga;
  bool found = false;
  for (int i = 1; i <= steps; ++i) {
    b = y_lo + (y_hi - y_lo) * i / steps;
    gb = g(b);
    if (gb >= 0.0) {
      found = true;
      break;
    }
    a = b;
    ga = gb;
  }
  if (!found)
    throw ConstructionError("u phi'(u) = 1 has no root in [1e-3, 1e3]; supply a custom splice");
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    if (g(mid) < 0.0)
      a = mid;
    else
      b = mid;
  }
  const double y = 0.5 * (a + b);
  OrliczN n;
  n.phi = phi;
  n.c1 = std::exp(y);
  n.c2 = std::exp(phi.h(y) - y);
  return n;
}

SpliceDiagnostics splice_diagnostics(const OrliczN& n) {
  SpliceDiagnostics d;
  const double y = std::log(n.c1);
  const double e = std::exp(n.phi.h(y));
  d.continuity_residual = std::abs(n.c2 * n.c1 - e) / e;
  d.chord_slope = n.c2;
  d.tangent_slope = e * n.phi.h_prime(y) / n.c1;
  return d;
}

// ---------------------------------------------------------------- Luxemburg

LuxemburgResult luxemburg_norm_detail(const Evaluable& f, const Domain& dom, const OrliczN& n,
                                      const QuadratureConfig& cfg) {
  LuxemburgResult res;
  const double l1 = lp_quasinorm(f, dom, 1.0, cfg);
  if (l1 == 0.0) return res;
  const double sup = sup_norm(f, dom, cfg);
  if (!std::isfinite(sup)) throw RejectedInputError("Luxemburg norm needs a bounded function");

  // F(t) = log I(N(|f| e^{-t})), decreasing in t.
  auto F = [&](double t) {
    return integrate_log(
        [&](double x) {
          const double v = f(x);
          if (std::isnan(v)) return v;
          return n.log_value(std::abs(v) * std::exp(-t));
        },
        dom, cfg);
  };

  double lo = std::log(n.c2 * l1), hi = std::log(n.c2 * sup * (1.0 + 1e-9));
  double f_lo = F(lo), f_hi = F(hi);
  for (int i = 0; i < 60 && f_lo < 0.0; ++i) {
    lo -= std::log(2.0);
    f_lo = F(lo);
  }
  for (int i = 0; i < 60 && f_hi > 0.0; ++i) {
    hi += std::log(2.0);
    f_hi = F(hi);
  }
  if (f_lo < 0.0 || f_hi > 0.0)
    throw Error("Luxemburg bracket failure (sup_norm underestimate?)");

  // Illinois regula falsi with a bisection safeguard.
  int side = 0;
  double t = lo, ft = f_lo;
  for (int it = 0; it < 200; ++it) {
    res.iterations = it + 1;
    if (f_lo == 0.0) {
      t = lo;
      ft = 0.0;
      break;
    }
    if (f_hi == 0.0) {
      t = hi;
      ft = 0.0;
      break;
    }
    double cand = (std::isfinite(f_lo) && std::isfinite(f_hi))
                      ? hi - f_hi * (hi - lo) / (f_hi - f_lo)
                      : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    t = cand;
    ft = F(t);
    if (std::abs(ft) < 1e-13 || hi - lo < 1e-15 * std::max(1.0, std::abs(t))) break;
    if (ft > 0.0) {
      lo = t;
      f_lo = ft;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = t;
      f_hi = ft;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  res.value = std::exp(t);
  res.modular = std::exp(ft);
  res.tolerance_met = std::abs(res.modular - 1.0) <= 1e-8;
  return res;
}

double luxemburg_norm(const Evaluable& f, const Domain& dom, const OrliczN& n,
                      const QuadratureConfig& cfg) {
  return luxemburg_norm_detail(f, dom, n, cfg).value;
}

// ---------------------------------------------------------------- sup over p

SupScan sup_over_p(const std::function<double(double)>& ratio, double p_lo, double p_hi,
                   int per_decade, Exec exec, const std::function<double(double)>& grid_ratio) {
  const auto& coarse = grid_ratio ? grid_ratio : ratio;
  std::vector<double> grid = geometric_grid(p_lo, p_hi, per_decade);
  std::vector<double> vals = kernels::map_grid(grid, coarse, exec);
  SupScan out;

  auto argmax = [&] {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
      if (vals[i] > vals[best]) best = i;
    return best;
  };
  std::size_t i = argmax();
  while (i + 1 == grid.size() && grid.size() > 1 && vals[i] > 0.0) {
    if (out.extensions == 2)
      throw DivergenceError("sup over p still rising at p = " + fmt(grid.back()) +
                            " after two grid extensions");
    ++out.extensions;
    std::vector<double> more = geometric_grid(grid.back(), 4.0 * grid.back(), per_decade);
    more.erase(more.begin());
    const std::vector<double> more_vals = kernels::map_grid(more, coarse, exec);
    grid.insert(grid.end(), more.begin(), more.end());
    vals.insert(vals.end(), more_vals.begin(), more_vals.end());
    i = argmax();
  }

  double best_p = grid[i];
  double best = ratio(best_p);
  if (best > 0.0 && grid.size() > 1) {
    const double a = std::log(grid[i == 0 ? 0 : i - 1]);
    const double b = std::log(grid[std::min(i + 1, grid.size() - 1)]);
    const double t = golden_section_max([&](double s) { return ratio(std::exp(s)); }, a, b, 1e-7);
    const double v = ratio(std::exp(t));
    if (v > best) {
      best = v;
      best_p = std::exp(t);
    }
  }
  out.value = best;
  out.argmax = best_p;
  return out;
}

NormResult g_norm(const Evaluable& f, const Domain& dom, const ConjugateCache& cache,
                  const QuadratureConfig& cfg) {
  QuadratureConfig inner = cfg;
  inner.exec = Exec::serial;
  auto ratio = [&](double p) {
    return lp_quasinorm(f, dom, p, inner) / cache.psi_exact(p);
  };
  auto grid_ratio = [&](double p) { return lp_quasinorm(f, dom, p, inner) / cache.psi(p); };
  const SupScan s =
      sup_over_p(ratio, cache.p_min(), cache.p_max(), cache.per_decade(), cfg.exec, grid_ratio);
  return {s.value, s.value > 0.0 ? s.argmax : std::numeric_limits<double>::quiet_NaN(), true};
}

NormResult g_norm(const Evaluable& f, const Domain& dom, const PhiSpec& phi,
                  const QuadratureConfig& cfg) {
  return g_norm(f, dom, ConjugateCache(phi, 1.0, 1024.0, 64, cfg.exec), cfg);
}

// ---------------------------------------------------------------- Lorentz

namespace {

// Panel breakpoints in s in [0, 1], graded geometrically towards both ends.
const std::vector<double>& graded_breaks() {
  static const std::vector<double> breaks = [] {
    std::vector<double> left{0.0};
    for (int k = 7; k >= 1; --k) left.push_back(std::pow(10.0, -k));
    for (double s : {0.2, 0.35}) left.push_back(s);
    std::vector<double> out = left;
    out.push_back(0.5);
    for (auto it = left.rbegin(); it != left.rend(); ++it) out.push_back(1.0 - *it);
    return out;
  }();
  return breaks;
}

double weak_value(double x, double t, double p) {
  if (t <= 0.0) return 0.0;
  return x * std::exp(std::log(t) / p);
}

}  // namespace

LorentzTable::LorentzTable(const DistributionProfile& profile, Exec exec)
    : profile_(std::make_shared<DistributionProfile>(profile)), sup_(profile.sup()) {
  if (!std::isfinite(sup_)) throw RejectedInputError("Lorentz norm needs a bounded function");
  if (sup_ == 0.0) return;
  std::vector<double> levels{0.0};
  for (double l : profile_->critical_levels())
    if (l > 0.0 && l < sup_) levels.push_back(l);
  levels.push_back(sup_);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const GaussRule& rule = gauss_legendre(16);
  const std::size_t nq = rule.nodes.size();
  struct Panel {
    double l0, width, s0, s1;
    int depth;
  };
  const auto& prof = *profile_;
  auto node_x = [&](const Panel& pn, std::size_t q) {
    const double s = 0.5 * (pn.s0 + pn.s1) + 0.5 * (pn.s1 - pn.s0) * rule.nodes[q];
    return std::pair{pn.l0 + pn.width * s * s * (3.0 - 2.0 * s),
                     0.5 * (pn.s1 - pn.s0) * rule.weights[q] * pn.width * 6.0 * s * (1.0 - s)};
  };
  auto eval = [&](const std::vector<Panel>& ps) {
    std::vector<double> xs(ps.size() * nq);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t q = 0; q < nq; ++q) xs[i * nq + q] = node_x(ps[i], q).first;
    return kernels::map_grid(xs, [&](double x) { return prof.measure_gt(x); }, exec);
  };
  auto panel_sum = [&](const Panel& pn, const double* t) {
    double acc = 0.0;
    for (std::size_t q = 0; q < nq; ++q) acc += node_x(pn, q).second * t[q];
    return acc;
  };

  std::vector<Panel> pending;
  const auto& br = graded_breaks();
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    for (std::size_t j = 0; j + 1 < br.size(); ++j)
      pending.push_back({levels[k], levels[k + 1] - levels[k], br[j], br[j + 1], 0});
  std::vector<double> pending_t = eval(pending);

  // A near-degenerate critical point of f gives T a sharp bend away from the
  // levels; halve panels until the integral of T settles.
  const double tol = 1e-14 * sup_;
  std::vector<double> t;
  std::vector<double> log_w;
  while (!pending.empty()) {
    std::vector<Panel> halves;
    for (const auto& pn : pending) {
      const double mid = 0.5 * (pn.s0 + pn.s1);
      halves.push_back({pn.l0, pn.width, pn.s0, mid, pn.depth + 1});
      halves.push_back({pn.l0, pn.width, mid, pn.s1, pn.depth + 1});
    }
    const std::vector<double> halves_t = eval(halves);
    std::vector<Panel> next;
    std::vector<double> next_t;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const double coarse = panel_sum(pending[i], &pending_t[i * nq]);
      const double fine = panel_sum(halves[2 * i], &halves_t[2 * i * nq]) +
                          panel_sum(halves[2 * i + 1], &halves_t[(2 * i + 1) * nq]);
      const bool settled = std::abs(fine - coarse) <= tol || pending[i].depth >= 24;
      for (std::size_t h = 2 * i; h < 2 * i + 2; ++h) {
        if (settled) {
          for (std::size_t q = 0; q < nq; ++q) {
            const auto [x, w] = node_x(halves[h], q);
            xs_.push_back(x);
            log_w.push_back(std::log(w));
            t.push_back(halves_t[h * nq + q]);
          }
        } else {
          next.push_back(halves[h]);
          next_t.insert(next_t.end(), halves_t.begin() + h * nq, halves_t.begin() + (h + 1) * nq);
        }
      }
    }
    pending = std::move(next);
    pending_t = std::move(next_t);
  }
  log_w_ = std::move(log_w);
  log_t_.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) log_t_[i] = t[i] > 0.0 ? std::log(t[i]) : kNegInf;

  // Candidates for sup_x x T^{1/p}: the nodes plus every level with T taken
  // as mu{|f| >= level}, the left limit at jumps.
  std::vector<std::pair<double, double>> weak;
  for (std::size_t i = 0; i < xs_.size(); ++i) weak.emplace_back(xs_[i], t[i]);
  for (double l : levels)
    if (l > 0.0) weak.emplace_back(l, prof.measure_ge(l));
  std::sort(weak.begin(), weak.end());
  for (const auto& [x, tv] : weak) {
    level_x_.push_back(x);
    level_t_ge_.push_back(tv);
  }
}

double LorentzTable::sup_weak(double p) const {
  if (sup_ == 0.0) return 0.0;
  std::size_t best = 0;
  double best_v = 0.0;
  for (std::size_t i = 0; i < level_x_.size(); ++i) {
    const double v = weak_value(level_x_[i], level_t_ge_[i], p);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = level_x_[best == 0 ? 0 : best - 1];
  const double b = level_x_[std::min(best + 1, level_x_.size() - 1)];
  if (b > a) {
    const auto& prof = *profile_;
    auto g = [&](double x) { return weak_value(x, prof.measure_gt(x), p); };
    best_v = std::max(best_v, g(golden_section_max(g, a, b, 1e-12 * sup_)));
  }
  return best_v;
}

double LorentzTable::norm(double p, double b) const {
  if (!(p >= 1.0)) throw RangeError("Lorentz norm requires p >= 1");
  if (!(b >= 1.0)) throw RangeError("Lorentz norm requires b >= 1 or b = inf");
  if (sup_ == 0.0) return 0.0;
  if (std::isinf(b)) return sup_weak(p);
  LogSumExp acc;
  const double log_b = std::log(b), e = p / b;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (log_t_[i] == kNegInf || xs_[i] <= 0.0) continue;
    acc.add(log_w_[i] + log_b + (b - 1.0) * std::log(xs_[i]) + e * log_t_[i]);
  }
  const double log_j = acc.value();
  return log_j == kNegInf ? 0.0 : std::exp(log_j / b);
}

double lorentz_norm(const DistributionProfile& profile, double p, double b,
                    const QuadratureConfig& cfg) {
  if (!(p >= 1.0)) throw RangeError("Lorentz norm requires p >= 1");
  if (!(b >= 1.0)) throw RangeError("Lorentz norm requires b >= 1 or b = inf");
  const double m = profile.sup();
  if (m == 0.0) return 0.0;
  if (!std::isfinite(m)) throw RejectedInputError("Lorentz norm needs a bounded function");

  if (std::isinf(b)) {
    const std::size_t n = 4096;
    double best_x = m, best = 0.0;
    auto g = [&](double x) { return weak_value(x, profile.measure_gt(x), p); };
    for (std::size_t i = 1; i <= n; ++i) {
      const double x = m * static_cast<double>(i) / n;
      const double v = g(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    for (double l : profile.critical_levels()) {
      if (l <= 0.0) continue;
      const double v = weak_value(l, profile.measure_ge(l), p);
      if (v > best) {
        best = v;
        best_x = l;
      }
    }
    const double h = m / n;
    const double x = golden_section_max(g, std::max(0.0, best_x - h), std::min(m, best_x + h),
                                        1e-12 * m);
    return std::max(best, g(x));
  }

  // x = m t:  ||f||_{p,b}^b = m^b int_0^1 b t^{b-1} T(m t)^{p/b} dt
  std::vector<double> breaks;
  for (double l : profile.critical_levels())
    if (l > 0.0 && l < m) breaks.push_back(l / m);
  const double e = p / b;
  QuadratureConfig inner = cfg;
  inner.max_panels = std::max<std::size_t>(cfg.max_panels, 200000);
  const double j = integrate_interval(
                       [&](double t) {
                         const double tv = profile.measure_gt(m * t);
                         if (tv <= 0.0 || t <= 0.0) return 0.0;
                         return b * std::pow(t, b - 1.0) * std::pow(tv, e);
                       },
                       0.0, 1.0, inner, breaks)
                       .value;
  return m * std::pow(j, 1.0 / b);
}

double lorentz_norm(const Evaluable& f, const Domain& dom, double p, double b,
                    const QuadratureConfig& cfg) {
  return lorentz_norm(DistributionProfile(f, dom, cfg), p, b, cfg);
}

NormResult weighted_lorentz_g(const Evaluable& f, const Domain& dom, const ConjugateCache& cache,
                              LorentzIndex b, const QuadratureConfig& cfg) {
  const LorentzTable table(DistributionProfile(f, dom, cfg), cfg.exec);
  if (table.sup() == 0.0) return {0.0, std::numeric_limits<double>::quiet_NaN(), true};
  auto ratio = [&](double p) { return table.norm(p, b.at(p)) / cache.psi_exact(p); };
  auto grid_ratio = [&](double p) { return table.norm(p, b.at(p)) / cache.psi(p); };
  const SupScan s =
      sup_over_p(ratio, cache.p_min(), cache.p_max(), cache.per_decade(), cfg.exec, grid_ratio);
  return {s.value, s.argmax, true};
}

NormResult v_quasinorm(const Evaluable& f, const Domain& dom, const PhiSpec& phi, int r,
                       const QuadratureConfig& cfg) {
  if (r < 1) throw RangeError("V(phi; r) requires r >= 1");
  QuadratureConfig inner = cfg;
  inner.exec = Exec::serial;
  auto ratio = [&](double p) {
    const double beta = p / (p * r + 1.0);
    return lp_quasinorm(f, dom, beta, inner) / psi(phi, p);
  };
  const SupScan s = sup_over_p(ratio, 4.0, 1024.0, 64, cfg.exec);
  return {s.value, s.value > 0.0 ? s.argmax : std::numeric_limits<double>::quiet_NaN(), true};
}

// ---------------------------------------------------------------- constants

double EquivalenceConstants::c4() const { return std::exp(log_c4); }

namespace {

struct SeriesSum {
  double log_sum = kNegInf;
  int terms = 0;
};

// log sum_{k >= k_start} exp(h(k + shift) - h(k + 1 + shift)), tail certified
// by a geometric bound on the last term ratio.
SeriesSum certified_series(const PhiSpec& phi, double k_start) {
  SeriesSum out;
  LogSumExp acc;
  double prev = kNegInf;
  for (int i = 0; i < 500; ++i) {
    const double k = k_start + i;
    const double hk = phi.h(k), hk1 = phi.h(k + 1.0);
    const double lt = std::isinf(hk1) ? kNegInf : hk - hk1;
    acc.add(lt);
    out.terms = i + 1;
    if (lt == kNegInf || lt < acc.value() - 800.0) {
      out.log_sum = acc.value();
      return out;
    }
    if (i >= 2) {
      const double log_rho = lt - prev;
      if (log_rho < 0.0) {
        // tail <= t_k rho / (1 - rho)
        const double log_tail = lt + log_rho - std::log(-std::expm1(log_rho));
        if (log_tail < acc.value() + std::log(1e-12)) {
          out.log_sum = acc.value();
          return out;
        }
      }
    }
    prev = lt;
  }
  throw SummabilityError("C4 series tail not certifiably geometric within 500 terms");
}

}  // namespace

EquivalenceConstants equivalence_constants(const OrliczN& n) {
  EquivalenceConstants ec;
  ec.c3 = std::max({1.0, n.c1, 1.0 / n.c2});
  ec.h_star_right_slope = conjugate_right_derivative(n.phi, 1.0);
  ec.k0 = std::max(4.0 + std::max(std::log(n.c1), 1.0), ec.h_star_right_slope);
  ec.log_n_term = n.log_value(std::exp(ec.k0 - 2.0));
  const double k_start = std::ceil(ec.k0);
  const SeriesSum proof = certified_series(n.phi, k_start);
  const SeriesSum shown = certified_series(n.phi, k_start - 1.0);
  ec.terms = proof.terms;
  ec.series = std::exp(proof.log_sum);
  ec.series_displayed = std::exp(shown.log_sum);
  ec.log_c4 = 2.0 + log_add_exp(ec.log_n_term, proof.log_sum);
  ec.log_c4_displayed = 2.0 + log_add_exp(ec.log_n_term, shown.log_sum);
  return ec;
}

// ---------------------------------------------------------------- dispatch

std::string NormSpec::kind_name() const {
  switch (kind) {
    case Kind::lp: return "lp";
    case Kind::orlicz: return "orlicz";
    case Kind::g: return "g";
    case Kind::lorentz: return "lorentz";
    case Kind::weighted_lorentz: return "weighted_lorentz";
    case Kind::v: return "v";
  }
  return "?";
}

namespace {
std::string b_text(const LorentzIndex& b) {
  if (b.coupled) return "p";
  return std::isinf(b.b) ? "inf" : fmt(b.b);
}
}  // namespace

std::string NormSpec::describe() const {
  const std::string ph = phi ? phi->name() : "?";
  switch (kind) {
    case Kind::lp: return "L_" + fmt(p);
    case Kind::orlicz: return "B(" + ph + ")";
    case Kind::g: return "G(" + ph + ")";
    case Kind::lorentz: return "L_{" + fmt(p) + "," + b_text(b) + "}";
    case Kind::weighted_lorentz: return "G*_" + b_text(b) + "(" + ph + ")";
    case Kind::v: return "V(" + ph + ";" + std::to_string(r) + ")";
  }
  return "?";
}

NormResult evaluate_norm(const Evaluable& f, const Domain& dom, const NormSpec& spec,
                         const QuadratureConfig& cfg) {
  auto need_phi = [&]() -> const PhiSpec& {
    if (!spec.phi) throw RangeError("norm kind '" + spec.kind_name() + "' needs a phi");
    return *spec.phi;
  };
  switch (spec.kind) {
    case NormSpec::Kind::lp:
      return {lp_quasinorm(f, dom, spec.p, cfg), spec.p, true};
    case NormSpec::Kind::orlicz: {
      const auto r = luxemburg_norm_detail(f, dom, construct_N(need_phi()), cfg);
      return {r.value, std::numeric_limits<double>::quiet_NaN(), r.tolerance_met};
    }
    case NormSpec::Kind::g:
      return g_norm(f, dom, need_phi(), cfg);
    case NormSpec::Kind::lorentz: {
      const double b = spec.b.at(spec.p);
      return {LorentzTable(DistributionProfile(f, dom, cfg), cfg.exec).norm(spec.p, b), spec.p,
              true};
    }
    case NormSpec::Kind::weighted_lorentz:
      return weighted_lorentz_g(f, dom, ConjugateCache(need_phi(), 1.0, 1024.0, 64, cfg.exec),
                                spec.b, cfg);
    case NormSpec::Kind::v:
      return v_quasinorm(f, dom, need_phi(), spec.r, cfg);
  }
  throw RangeError("unknown norm kind");
}

}  // namespace orlicz
