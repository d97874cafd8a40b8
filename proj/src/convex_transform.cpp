#include "orlicz/convex_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "orlicz/errors.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }
double logistic(double y) {
  return y >= 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
}

std::string format_param(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Table {
  std::vector<double> z, phi;
  std::vector<double> y, h;  // nodes with z > 0
  double growth = 0.0;       // exp continuation rate past the last node

  double eval_h(double yy) const {
    if (yy >= y.back()) return h.back() * std::exp(growth * (yy - y.back()));
    if (yy <= y.front()) return phi[1] * std::exp(yy) / z[1];
    const auto it = std::upper_bound(y.begin(), y.end(), yy);
    const std::size_t j = static_cast<std::size_t>(it - y.begin());
    const double t = (yy - y[j - 1]) / (y[j] - y[j - 1]);
    return h[j - 1] + t * (h[j] - h[j - 1]);
  }
};

}  // namespace

PhiSpec PhiSpec::power_log(double m, double r) {
  if (!(m > 0.0)) throw RangeError("power-log family requires m > 0");
  PhiSpec s;
  s.family_ = Family::power_log;
  s.m_ = m;
  s.r_ = r;
  s.name_ = "power-log(m=" + format_param(m) + ",r=" + format_param(r) + ")";
  return s;
}

PhiSpec PhiSpec::log_power(double nu) {
  if (!(nu > 0.0)) throw RangeError("log-power family requires nu > 0");
  PhiSpec s;
  s.family_ = Family::log_power;
  s.nu_ = nu;
  s.name_ = "log-power(nu=" + format_param(nu) + ")";
  return s;
}

PhiSpec PhiSpec::custom(std::function<double(double)> phi, std::string name) {
  PhiSpec s;
  s.family_ = Family::custom;
  s.custom_ = std::make_shared<const std::function<double(double)>>(std::move(phi));
  s.name_ = "custom(" + name + ")";
  return s;
}

PhiSpec PhiSpec::tabulated(std::vector<double> z, std::vector<double> phi) {
  std::vector<std::string> issues;
  if (z.size() != phi.size() || z.size() < 3) issues.push_back("need at least 3 (z, phi) pairs of equal length");
  else {
    if (z[0] != 0.0 || phi[0] != 0.0) issues.push_back("table must start at (0, 0)");
    for (std::size_t i = 1; i < z.size(); ++i) {
      if (!(z[i] > z[i - 1])) issues.push_back("z must be strictly increasing at row " + std::to_string(i));
      if (!(phi[i] > phi[i - 1])) issues.push_back("phi must be strictly increasing at row " + std::to_string(i));
    }
  }
  auto table = std::make_shared<Table>();
  if (issues.empty()) {
    table->z = z;
    table->phi = phi;
    for (std::size_t i = 1; i < z.size(); ++i) {
      table->y.push_back(std::log(z[i]));
      table->h.push_back(phi[i]);
    }
    const auto& y = table->y;
    const auto& h = table->h;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
      const double s0 = (h[i] - h[i - 1]) / (y[i] - y[i - 1]);
      const double s1 = (h[i + 1] - h[i]) / (y[i + 1] - y[i]);
      if (s1 < s0 - 1e-9 * std::max(1.0, std::abs(s0)))
        issues.push_back("h(y) = phi(e^y) is not convex at z = " + format_param(z[i + 1]));
    }
    const double first_slope = h[0];  // slope of phi(z[1]) e^{y - y_1} at y_1
    const double s_first = (h[1] - h[0]) / (y[1] - y[0]);
    if (s_first < first_slope - 1e-9 * std::max(1.0, first_slope))
      issues.push_back("h(y) = phi(e^y) is not convex at the first table node");
    table->growth = ((h.back() - h[h.size() - 2]) / (y.back() - y[y.size() - 2])) / h.back();
  }
  if (!issues.empty()) {
    std::string msg = "invalid tabulated phi:";
    for (const auto& s : issues) msg += "\n  " + s;
    throw ConstructionError(msg);
  }
  PhiSpec s = custom(
      [table](double zz) {
        if (zz <= 0.0) return 0.0;
        return table->eval_h(std::log(zz));
      },
      "tabulated");
  s.name_ = "tabulated(" + std::to_string(z.size()) + " nodes)";
  s.table_z_ = std::move(z);
  s.table_phi_ = std::move(phi);
  return s;
}

double PhiSpec::phi(double z) const {
  if (z <= 0.0) return 0.0;
  if (family_ == Family::custom) return (*custom_)(z);
  return h(std::log(z));
}

double PhiSpec::h(double y) const {
  switch (family_) {
    case Family::power_log: {
      if (y == -kInf) return 0.0;
      double log_h = m_ * y;
      if (r_ != 0.0) {
        const double c = m_ + std::abs(r_);
        const double log_term = log_add_exp(c, y);  // log(e^c + e^y) > 0
        log_h -= m_ * r_ * std::log(log_term);
      }
      return std::exp(log_h);
    }
    case Family::log_power:
      return std::pow(softplus(y), 1.0 + nu_);
    case Family::custom: {
      const double v = (*custom_)(std::exp(y));
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "custom phi returned " << v << " at z = exp(" << y << ")";
        throw DomainEvaluationError(os.str(), y);
      }
      return v;
    }
  }
  return 0.0;
}

double PhiSpec::h_prime(double y) const {
  switch (family_) {
    case Family::power_log: {
      const double hv = h(y);
      if (r_ == 0.0) return m_ * hv;
      const double c = m_ + std::abs(r_);
      const double log_term = log_add_exp(c, y);
      return hv * m_ * (1.0 - r_ * logistic(y - c) / log_term);
    }
    case Family::log_power: {
      const double s = softplus(y);
      return (1.0 + nu_) * std::pow(s, nu_) * logistic(y);
    }
    case Family::custom: {
      const double d = 1e-5 * std::max(1.0, std::abs(y));
      return (h(y + d) - h(y - d)) / (2.0 * d);
    }
  }
  return 0.0;
}

double h_eval(const PhiSpec& phi, double y) { return phi.h(y); }

MembershipReport phi_membership_check(const PhiSpec& phi) {
  MembershipReport rep;
  std::vector<double> ys, hs;
  for (int i = -400; i <= 400; ++i) {
    const double y = 0.05 * i;
    ys.push_back(y);
    hs.push_back(phi.h(y));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < hs.size(); ++i) {
    if (std::isinf(hs[i]) && std::isinf(hs[i - 1])) continue;
    if (!(hs[i] > hs[i - 1])) {
      rep.monotone = false;
      rep.notes.push_back("h not strictly increasing near y = " + format_param(ys[i]));
      break;
    }
  }
  rep.convex = true;
  for (std::size_t i = 1; i + 1 < hs.size(); ++i) {
    if (!std::isfinite(hs[i + 1])) break;
    const double d2 = hs[i - 1] - 2.0 * hs[i] + hs[i + 1];
    if (d2 < -1e-9 * std::max(1.0, std::abs(hs[i]))) {
      rep.convex = false;
      rep.notes.push_back("negative second difference of h near y = " + format_param(ys[i]));
      break;
    }
  }

  std::vector<double> terms;
  for (int k = 3; k <= 200; ++k) {
    const double a = phi.h(k), b = phi.h(k + 1.0);
    terms.push_back(std::isinf(b) ? 0.0 : std::exp(a - b));
  }
  NeumaierSum sum;
  for (double t : terms) sum.add(t);
  rep.partial_sum = sum.value();
  rep.summable = true;
  for (std::size_t i = terms.size() - 20; i + 1 < terms.size(); ++i) {
    if (terms[i] == 0.0) continue;
    const double ratio = terms[i + 1] / terms[i];
    rep.worst_tail_ratio = std::max(rep.worst_tail_ratio, ratio);
    if (ratio > 0.5) rep.summable = false;
  }
  if (!rep.summable)
    rep.notes.push_back("terms exp(h(k) - h(k+1)) do not decay geometrically (ratio " +
                        format_param(rep.worst_tail_ratio) + " > 1/2)");
  rep.passed = rep.monotone && rep.convex && rep.summable;
  return rep;
}

ConjugatePoint young_fenchel_point(const PhiSpec& phi, double p, double tol, double initial_y,
                                   double initial_step) {
  if (p < 0.0 || std::isnan(p)) throw RangeError("young_fenchel requires p >= 0");
  if (p == 0.0) return {0.0, -kInf};
  auto slope_gap = [&](double y) {
    const double d = p - phi.h_prime(y);
    if (std::isnan(d)) throw DomainEvaluationError("h'(y) is NaN", y);
    // Slopes within rounding of p count as stationary (affine pieces of h).
    return std::abs(d) <= 1e-10 * std::max(1.0, p) ? 0.0 : d;
  };
  constexpr double kLimit = 1e4;
  double lo = initial_y - initial_step, hi = initial_y + initial_step;
  double step = initial_step;
  // A custom phi cannot be evaluated past z = e^709; if h' is still below p
  // there, the growth is too slow for any representable maximizer.
  auto still_rising = [&](double y) {
    try {
      return slope_gap(y) > 0.0;
    } catch (const DomainEvaluationError&) {
      if (phi.family() != PhiSpec::Family::custom || y < 700.0) throw;
      throw DivergenceError("conjugate of " + phi.name() + " diverges at p = " + format_param(p) +
                            ": h' stays below p up to the overflow of exp(y)");
    }
  };
  while (still_rising(hi)) {
    lo = hi;
    hi += step;
    step *= 2.0;
    if (hi > kLimit)
      throw DivergenceError("conjugate of " + phi.name() + " diverges at p = " + format_param(p) +
                            ": h grows too slowly");
  }
  step = initial_step;
  while (slope_gap(lo) < 0.0) {
    hi = std::min(hi, lo);
    lo -= step;
    step *= 2.0;
    if (lo < -kLimit)
      throw DivergenceError("conjugate of " + phi.name() + " diverges at p = " + format_param(p) +
                            ": supremum at y -> -infinity");
  }
  auto g = [&](double y) { return p * y - phi.h(y); };
  const double y = golden_section_max(g, lo, hi, tol * (1.0 + std::abs(lo) + std::abs(hi)), 400);
  // The golden iterate is the best of its last bracket; compare with the ends.
  double best_y = y, best = g(y);
  for (double cand : {lo, hi})
    if (const double v = g(cand); v > best) best = v, best_y = cand;
  return {best, best_y};
}

double young_fenchel(const PhiSpec& phi, double p, double tol) {
  return young_fenchel_point(phi, p, tol).value;
}

double psi(const PhiSpec& phi, double p) {
  if (!(p > 0.0)) throw RangeError("psi requires p > 0");
  return std::exp(young_fenchel(phi, p) / p);
}

double conjugate_right_derivative(const PhiSpec& phi, double p, double step) {
  return (young_fenchel(phi, p + step) - young_fenchel(phi, p)) / step;
}

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double decades = std::log10(hi / lo);
  const int n = static_cast<int>(std::ceil(decades * per_decade - 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(std::min(hi, lo * std::pow(10.0, static_cast<double>(i) / per_decade)));
  g.back() = hi;
  return g;
}

ConjugateCache::ConjugateCache(PhiSpec phi, double p_min, double p_max, int per_decade, Exec exec)
    : phi_(std::move(phi)), per_decade_(per_decade), exec_(exec) {
  if (!(p_min > 0.0) || !(p_max > p_min)) throw RangeError("invalid conjugate cache range");
  grid_ = geometric_grid(p_min, p_max, per_decade);
  h_star_ = kernels::map_grid(grid_, [&](double p) { return young_fenchel(phi_, p); }, exec);
  psi_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) psi_[i] = std::exp(h_star_[i] / grid_[i]);
}

double ConjugateCache::psi_exact(double p) const { return orlicz::psi(phi_, p); }

double ConjugateCache::psi(double p) const {
  if (p < grid_.front() || p > grid_.back()) return psi_exact(p);
  const auto it = std::lower_bound(grid_.begin(), grid_.end(), p);
  const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
  if (grid_[j] == p) return psi_[j];
  const double t = std::log(p / grid_[j - 1]) / std::log(grid_[j] / grid_[j - 1]);
  const double hs = h_star_[j - 1] + t * (h_star_[j] - h_star_[j - 1]);
  return std::exp(hs / p);
}

ConjugateCache ConjugateCache::extended(double new_p_max) const {
  return ConjugateCache(phi_, grid_.front(), std::max(new_p_max, grid_.back()), per_decade_, exec_);
}

FenchelMoreauReport fenchel_moreau_check(const PhiSpec& phi, const std::vector<double>& y_grid) {
  FenchelMoreauReport rep;
  if (y_grid.empty()) return rep;
  const double y_min = *std::min_element(y_grid.begin(), y_grid.end());
  const double y_max = *std::max_element(y_grid.begin(), y_grid.end());
  const double d = 1e-3;
  const double s_lo = (phi.h(y_min + d) - phi.h(y_min)) / d;
  const double s_hi = (phi.h(y_max) - phi.h(y_max - d)) / d;
  const double p_lo = std::max(1e-12, 0.25 * s_lo), p_hi = std::max(4.0 * s_hi, 2.0 * p_lo);

  std::vector<double> cands = geometric_grid(p_lo, p_hi, 64);
  std::vector<double> sorted_y = y_grid;
  std::sort(sorted_y.begin(), sorted_y.end());
  for (std::size_t i = 1; i < sorted_y.size(); ++i) {
    const double dy = sorted_y[i] - sorted_y[i - 1];
    if (dy > 0.0) cands.push_back((phi.h(sorted_y[i]) - phi.h(sorted_y[i - 1])) / dy);
  }
  std::erase_if(cands, [](double p) { return !(p > 0.0) || !std::isfinite(p); });
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  auto conj = [&](double p) {
    try {
      return young_fenchel(phi, p);
    } catch (const DivergenceError&) {
      return kInf;
    }
  };
  const auto hs = kernels::map_grid(cands, conj);

  for (double y : y_grid) {
    // p = 0 contributes the line 0 since h*(0) = 0.
    double best = 0.0;
    std::size_t best_i = cands.size();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const double v = cands[i] * y - hs[i];
      if (v > best) best = v, best_i = i;
    }
    if (best_i < cands.size()) {
      const double lo = std::log(cands[best_i == 0 ? 0 : best_i - 1]);
      const double hi = std::log(cands[std::min(best_i + 1, cands.size() - 1)]);
      auto g = [&](double t) {
        const double p = std::exp(t);
        return p * y - conj(p);
      };
      if (hi > lo) {
        const double t = golden_section_max(g, lo, hi, 1e-12 * (1.0 + std::abs(hi)));
        best = std::max(best, g(t));
      }
    }
    const double hy = phi.h(y);
    const double dev = std::abs(best - hy) / std::max(std::abs(hy), 1e-300);
    rep.ys.push_back(y);
    rep.h_values.push_back(hy);
    rep.biconjugate.push_back(best);
    if (dev > rep.max_relative_deviation) {
      rep.max_relative_deviation = dev;
      rep.worst_y = y;
    }
  }
  return rep;
}

}  // namespace orlicz
