#include "orlicz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"

namespace orlicz {

Domain Domain::circle() { return {Kind::circle, 0.0, 2.0 * std::numbers::pi}; }

const GaussRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> rules;
  std::lock_guard lock(mutex);
  if (auto it = rules.find(order); it != rules.end()) return it->second;
  if (order < 1) throw RangeError("Gauss-Legendre order must be >= 1");

  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rules.emplace(order, std::move(rule)).first->second;
}

namespace {

[[noreturn]] void bad_value(double x, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite integrand value " << v << " at x = " << x;
  throw DomainEvaluationError(os.str(), x);
}

double gl_panel(const Evaluable& f, double a, double b, const GaussRule& rule) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  NeumaierSum s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = c + h * rule.nodes[i];
    const double v = f(x);
    if (!std::isfinite(v)) bad_value(x, v);
    s.add(rule.weights[i] * v);
  }
  return s.value() * h;
}

double gl_panel_log(const Evaluable& log_f, double a, double b, const GaussRule& rule) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  LogSumExp s;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = c + h * rule.nodes[i];
    const double v = log_f(x);
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) bad_value(x, v);
    s.add(std::log(rule.weights[i]) + v);
  }
  return s.value() + std::log(h);
}

// Panel of the adaptive scheme: GL on the whole panel ("coarse") and on its two
// halves. The halves' sum is the accepted value, |halves - coarse| the error.
struct Panel {
  double a, b;
  double coarse, left, right;
  double err;
  int depth;
};

struct ByError {
  bool operator()(const Panel& x, const Panel& y) const { return x.err < y.err; }
};

std::vector<double> initial_cuts(double a, double b, const QuadratureConfig& cfg,
                                 const std::vector<double>& breakpoints) {
  std::vector<double> cuts{a, b};
  const std::size_t n = std::max<std::size_t>(1, cfg.initial_panels);
  for (std::size_t i = 1; i < n; ++i)
    cuts.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  for (double t : breakpoints)
    if (t > a && t < b) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  // Drop cuts that would leave a sliver panel.
  const double min_width = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  std::vector<double> out{cuts.front()};
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] - out.back() > min_width) out.push_back(cuts[i]);
  out.back() = b;
  return out;
}

void check_config(const QuadratureConfig& cfg) {
  if (!(cfg.rel_tol > 0.0)) throw RangeError("quadrature tolerance must be > 0");
  if (cfg.max_depth < 1) throw RangeError("quadrature max depth must be >= 1");
}

}  // namespace

QuadratureResult integrate_interval(const Evaluable& f, double a, double b,
                                    const QuadratureConfig& cfg,
                                    const std::vector<double>& breakpoints) {
  check_config(cfg);
  if (a == b) return {};
  const GaussRule& rule = gauss_legendre(cfg.nodes_per_panel);

  auto make = [&](double lo, double hi, double coarse, int depth) {
    const double mid = 0.5 * (lo + hi);
    Panel p{lo, hi, coarse, gl_panel(f, lo, mid, rule), gl_panel(f, mid, hi, rule), 0.0, depth};
    p.err = std::abs(p.left + p.right - p.coarse);
    return p;
  };

  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  std::vector<Panel> frozen;
  const auto cuts = initial_cuts(a, b, cfg, breakpoints);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    heap.push(make(cuts[i], cuts[i + 1], gl_panel(f, cuts[i], cuts[i + 1], rule), 0));

  auto totals = [&] {
    NeumaierSum value, err, mag;
    auto visit = [&](const Panel& p) {
      value.add(p.left + p.right);
      err.add(p.err);
      mag.add(std::abs(p.left) + std::abs(p.right));
    };
    for (const auto& p : frozen) visit(p);
    auto copy = heap;
    while (!copy.empty()) {
      visit(copy.top());
      copy.pop();
    }
    return std::array<double, 3>{value.value(), err.value(), mag.value()};
  };

  std::size_t panels = heap.size();
  while (true) {
    const auto [value, err, mag] = totals();
    const double target =
        std::max(cfg.rel_tol * std::abs(value), 8.0 * std::numeric_limits<double>::epsilon() * mag);
    if (err <= target) return {value, err, panels};
    while (!heap.empty() && heap.top().depth >= cfg.max_depth) {
      frozen.push_back(heap.top());
      heap.pop();
    }
    if (heap.empty() || panels >= cfg.max_panels)
      throw ConvergenceError("adaptive quadrature did not reach tolerance", value, err);
    // Split a batch of the worst panels per pass; the totals scan is O(panels).
    const std::size_t batch = std::max<std::size_t>(1, heap.size() / 4);
    for (std::size_t k = 0; k < batch && !heap.empty(); ++k) {
      const Panel p = heap.top();
      if (p.depth >= cfg.max_depth) break;
      if (k > 0 && p.err <= target / static_cast<double>(panels + 1)) break;
      heap.pop();
      const double mid = 0.5 * (p.a + p.b);
      heap.push(make(p.a, mid, p.left, p.depth + 1));
      heap.push(make(mid, p.b, p.right, p.depth + 1));
      ++panels;
    }
  }
}

QuadratureResult integrate_log_interval(const Evaluable& log_f, double a, double b,
                                        const QuadratureConfig& cfg,
                                        const std::vector<double>& breakpoints) {
  check_config(cfg);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  if (a == b) return {neg_inf, 0.0, 0};
  const GaussRule& rule = gauss_legendre(cfg.nodes_per_panel);

  // err holds log|halves - coarse| for the heap ordering.
  auto make = [&](double lo, double hi, double coarse, int depth) {
    const double mid = 0.5 * (lo + hi);
    Panel p{lo, hi, coarse, gl_panel_log(log_f, lo, mid, rule), gl_panel_log(log_f, mid, hi, rule),
            0.0, depth};
    p.err = log_abs_diff(log_add_exp(p.left, p.right), p.coarse);
    return p;
  };

  std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
  std::vector<Panel> frozen;
  const auto cuts = initial_cuts(a, b, cfg, breakpoints);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    heap.push(make(cuts[i], cuts[i + 1], gl_panel_log(log_f, cuts[i], cuts[i + 1], rule), 0));

  auto totals = [&] {
    LogSumExp value, err;
    auto visit = [&](const Panel& p) {
      value.add(log_add_exp(p.left, p.right));
      err.add(p.err);
    };
    for (const auto& p : frozen) visit(p);
    auto copy = heap;
    while (!copy.empty()) {
      visit(copy.top());
      copy.pop();
    }
    return std::pair{value.value(), err.value()};
  };

  std::size_t panels = heap.size();
  while (true) {
    const auto [value, err] = totals();
    if (value == neg_inf) return {neg_inf, 0.0, panels};
    const double target = value + std::log(cfg.rel_tol);
    if (err <= target) return {value, std::exp(err - value), panels};
    while (!heap.empty() && heap.top().depth >= cfg.max_depth) {
      frozen.push_back(heap.top());
      heap.pop();
    }
    if (heap.empty() || panels >= cfg.max_panels)
      throw ConvergenceError("adaptive log-domain quadrature did not reach tolerance", value,
                             std::exp(err - value));
    const std::size_t batch = std::max<std::size_t>(1, heap.size() / 4);
    const double floor = target - std::log(static_cast<double>(panels + 1));
    for (std::size_t k = 0; k < batch && !heap.empty(); ++k) {
      const Panel p = heap.top();
      if (p.depth >= cfg.max_depth) break;
      if (k > 0 && p.err <= floor) break;
      heap.pop();
      const double mid = 0.5 * (p.a + p.b);
      heap.push(make(p.a, mid, p.left, p.depth + 1));
      heap.push(make(mid, p.b, p.right, p.depth + 1));
      ++panels;
    }
  }
}

double integrate(const Evaluable& f, const Domain& dom, const QuadratureConfig& cfg) {
  try {
    return dom.normalization() * integrate_interval(f, dom.lower, dom.upper, cfg).value;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what(), dom.normalization() * e.estimate(),
                           dom.normalization() * e.error_bound());
  }
}

double integrate_log(const Evaluable& log_f, const Domain& dom, const QuadratureConfig& cfg,
                     const std::vector<double>& breakpoints) {
  return integrate_log_interval(log_f, dom.lower, dom.upper, cfg, breakpoints).value +
         std::log(dom.normalization());
}

std::vector<double> sign_changes(const Evaluable& f, double a, double b, int samples) {
  std::vector<double> roots;
  const double h = (b - a) / samples;
  double x_prev = a + 0.5 * h, v_prev = f(x_prev);
  for (int i = 1; i < samples; ++i) {
    const double x = a + (i + 0.5) * h, v = f(x);
    if (std::isfinite(v_prev) && std::isfinite(v) && ((v_prev < 0.0 && v > 0.0) || (v_prev > 0.0 && v < 0.0))) {
      double lo = x_prev, hi = x;
      const bool lo_neg = v_prev < 0.0;
      for (int it = 0; it < 80 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * std::abs(hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = f(mid);
        if (vm == 0.0) {
          lo = hi = mid;
          break;
        }
        ((vm < 0.0) == lo_neg ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    if (v != 0.0 || !std::isfinite(v_prev)) {
      x_prev = x;
      v_prev = v;
    }
  }
  return roots;
}

double lp_quasinorm(const Evaluable& f, const Domain& dom, double p, const QuadratureConfig& cfg) {
  if (!(p > 0.0)) throw RangeError("lp_quasinorm requires p > 0");
  const double log_i = integrate_log(
      [&](double x) {
        const double v = f(x);
        if (std::isnan(v)) return v;
        return p * std::log(std::abs(v));
      },
      dom, cfg, sign_changes(f, dom.lower, dom.upper));
  return std::exp(log_i / p);
}

double golden_section_max(const std::function<double(double)>& g, double a, double b, double tol,
                          int max_iter) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int i = 0; i < max_iter && std::abs(b - a) > tol; ++i) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return gc >= gd ? c : d;
}

double sup_norm(const Evaluable& f, const Domain& dom, const QuadratureConfig& cfg) {
  const std::size_t n = std::max<std::size_t>(2, cfg.sup_samples);
  const auto xs = kernels::uniform_grid(dom.lower, dom.upper, n);
  const auto vs = kernels::map_grid(
      xs,
      [&](double x) {
        const double v = std::abs(f(x));
        if (!std::isfinite(v)) bad_value(x, v);
        return v;
      },
      cfg.exec);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool left_ok = i == 0 || vs[i] >= vs[i - 1];
    const bool right_ok = i == n || vs[i] >= vs[i + 1];
    if (left_ok && right_ok) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t i, std::size_t j) { return vs[i] > vs[j] || (vs[i] == vs[j] && i < j); });
  if (candidates.size() > 16) candidates.resize(16);

  double best = *std::max_element(vs.begin(), vs.end());
  const auto abs_f = [&](double x) { return std::abs(f(x)); };
  for (std::size_t i : candidates) {
    const double lo = xs[i == 0 ? 0 : i - 1], hi = xs[i == n ? n : i + 1];
    const double x = golden_section_max(abs_f, lo, hi, 1e-13 * (1.0 + std::abs(hi)));
    const double v = abs_f(x);
    if (std::isfinite(v)) best = std::max(best, v);
  }
  return best;
}

// ---------------------------------------------------------------------------

DistributionProfile::DistributionProfile(const Evaluable& f, const Domain& dom,
                                         const QuadratureConfig& cfg)
    : abs_f_([f](double x) { return std::abs(f(x)); }), dom_(dom), root_tol_(cfg.root_tol) {
  const std::size_t n = std::max<std::size_t>(2, cfg.distribution_panels);
  const auto xs = kernels::uniform_grid(dom.lower, dom.upper, n);
  const auto vs = kernels::map_grid(
      xs,
      [&](double x) {
        const double v = abs_f_(x);
        // +inf marks an endpoint singularity, which lies above every level.
        if (std::isnan(v)) bad_value(x, v);
        return v;
      },
      cfg.exec);

  // Indices where the sampled direction of |f| changes.
  struct Break {
    double x, v;
  };
  std::vector<std::size_t> ext{0};
  std::vector<int> kind{0};
  int prev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int d = (vs[i + 1] > vs[i]) - (vs[i + 1] < vs[i]);
    if (d == 0) continue;
    if (prev != 0 && d != prev) {
      ext.push_back(i);
      kind.push_back(prev);  // +1: local max, -1: local min
    }
    prev = d;
  }
  ext.push_back(n);
  kind.push_back(0);

  std::vector<Break> breaks;
  for (std::size_t k = 0; k < ext.size(); ++k) {
    const std::size_t i = ext[k];
    Break br{xs[i], vs[i]};
    if (kind[k] != 0 && std::isfinite(vs[i])) {
      const double lo = std::max(xs[i - 1], breaks.empty() ? xs[i - 1] : breaks.back().x);
      const double hi = xs[i + 1];
      const double sign = kind[k] > 0 ? 1.0 : -1.0;
      const double x = golden_section_max([&](double t) { return sign * abs_f_(t); }, lo, hi,
                                          1e-14 * (1.0 + std::abs(hi)));
      const double v = abs_f_(x);
      if (std::isfinite(v) && sign * v > sign * br.v) br = {x, v};
    }
    if (!breaks.empty() && br.x <= breaks.back().x) continue;
    breaks.push_back(br);
  }
  if (breaks.size() == 1) breaks.push_back({xs[n], vs[n]});

  std::size_t j = 0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    Piece piece;
    piece.xs.push_back(breaks[k].x);
    piece.vs.push_back(breaks[k].v);
    while (j <= n && xs[j] <= breaks[k].x) ++j;
    for (; j <= n && xs[j] < breaks[k + 1].x; ++j) {
      piece.xs.push_back(xs[j]);
      piece.vs.push_back(vs[j]);
    }
    piece.xs.push_back(breaks[k + 1].x);
    piece.vs.push_back(breaks[k + 1].v);

    const double va = piece.vs.front(), vb = piece.vs.back();
    piece.constant = std::all_of(piece.vs.begin(), piece.vs.end(), [&](double v) { return v == va; });
    piece.increasing = vb >= va;
    for (std::size_t m = 1; m < piece.vs.size(); ++m)
      piece.vs[m] = piece.increasing ? std::max(piece.vs[m], piece.vs[m - 1])
                                     : std::min(piece.vs[m], piece.vs[m - 1]);
    pieces_.push_back(std::move(piece));
  }

  for (const auto& br : breaks) levels_.push_back(br.v);
  std::sort(levels_.begin(), levels_.end());
  levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
  sup_ = levels_.back();
}

double DistributionProfile::crossing(const Piece& piece, double w) const {
  const auto& vs = piece.vs;
  std::size_t j;
  if (piece.increasing) {
    j = static_cast<std::size_t>(std::upper_bound(vs.begin(), vs.end(), w) - vs.begin()) - 1;
  } else {
    j = static_cast<std::size_t>(
            std::upper_bound(vs.begin(), vs.end(), w, std::greater<double>()) - vs.begin()) - 1;
  }
  double lo = piece.xs[j], hi = piece.xs[j + 1];
  auto g = [&](double x) { return abs_f_(x) - w; };
  double glo = g(lo), ghi = g(hi);
  // Envelope clamping can leave a bracket without a sign change; the level
  // then crosses within rounding of the sampled values.
  if (!(glo <= 0.0 ? ghi > 0.0 : ghi <= 0.0)) {
    if (std::isfinite(glo) && std::isfinite(ghi) && ghi != glo)
      return std::clamp(lo - glo * (hi - lo) / (ghi - glo), lo, hi);
    return 0.5 * (lo + hi);
  }
  // Illinois regula falsi, falling back to bisection near infinities.
  int side = 0;
  for (int iter = 0; iter < 200 && hi - lo > root_tol_; ++iter) {
    double c;
    if (std::isfinite(glo) && std::isfinite(ghi))
      c = (lo * ghi - hi * glo) / (ghi - glo);
    else
      c = 0.5 * (lo + hi);
    if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
    const double gc = g(c);
    if (gc == 0.0) return c;
    if ((gc > 0.0) == (ghi > 0.0)) {
      hi = c;
      ghi = gc;
      if (side == -1) glo *= 0.5;
      side = -1;
    } else {
      lo = c;
      glo = gc;
      if (side == 1) ghi *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

// Length of the part of a monotone piece where |f| >= w = max of the piece.
double DistributionProfile::plateau_length(const Piece& piece, double w) const {
  const auto& vs = piece.vs;
  const std::size_t n = vs.size();
  // Nodes at the maximum, counted from the high end of the piece.
  std::size_t k = 0;
  while (k < n && vs[piece.increasing ? n - 1 - k : k] >= w) ++k;
  if (k <= 1) return 0.0;
  if (k == n) return piece.xs.back() - piece.xs.front();
  const std::size_t in = piece.increasing ? n - k : k - 1;    // first node on the plateau
  const std::size_t out = piece.increasing ? n - k - 1 : k;  // last node below it
  double a = piece.xs[out], b = piece.xs[in];
  for (int iter = 0; iter < 200 && std::abs(b - a) > root_tol_; ++iter) {
    const double c = 0.5 * (a + b);
    (abs_f_(c) >= w ? b : a) = c;
  }
  return piece.increasing ? piece.xs.back() - b : b - piece.xs.front();
}

double DistributionProfile::measure(double w, bool strict) const {
  NeumaierSum total;
  for (const auto& piece : pieces_) {
    const double len = piece.xs.back() - piece.xs.front();
    const double lo_v = piece.increasing ? piece.vs.front() : piece.vs.back();
    const double hi_v = piece.increasing ? piece.vs.back() : piece.vs.front();
    if (piece.constant) {
      if (strict ? w < lo_v : w <= lo_v) total.add(len);
      continue;
    }
    if (w < lo_v || (!strict && w == lo_v)) {
      total.add(len);
      continue;
    }
    if (w > hi_v) continue;
    if (w == hi_v) {
      if (!strict) total.add(plateau_length(piece, w));
      continue;
    }
    const double xc = crossing(piece, w);
    total.add(piece.increasing ? piece.xs.back() - xc : xc - piece.xs.front());
  }
  return std::clamp(total.value() * dom_.normalization(), 0.0, 1.0);
}

double DistributionProfile::measure_gt(double w) const { return measure(w, true); }
double DistributionProfile::measure_ge(double w) const { return measure(w, false); }

double distribution(const Evaluable& f, const Domain& dom, double w, const QuadratureConfig& cfg) {
  if (!(w >= 0.0)) throw RangeError("distribution level must be >= 0");
  return DistributionProfile(f, dom, cfg).measure_gt(w);
}

}  // namespace orlicz
