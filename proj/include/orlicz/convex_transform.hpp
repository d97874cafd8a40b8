#pragma once

// Orlicz generators phi, the log-composition h(y) = phi(e^y), its numerical
// Young-Fenchel conjugate h*(p) = sup_y (p y - h(y)) and the weight
// psi(p) = exp(h*(p) / p).

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "orlicz/parallel.hpp"

namespace orlicz {

class PhiSpec {
 public:
  enum class Family { power_log, log_power, custom };

  // phi(z) = z^m log^{-m r}(e^{m+|r|} + z)
  static PhiSpec power_log(double m, double r = 0.0);
  // phi(z) = log^{1+nu}(1 + z)
  static PhiSpec log_power(double nu);
  // Arbitrary phi evaluator; h is formed as phi(exp(y)).
  static PhiSpec custom(std::function<double(double)> phi, std::string name);
  // Tabulated (z, phi(z)) curve starting at (0, 0). Interpolated linearly in z
  // on the first cell and linearly in log z beyond; past the last node h is
  // continued by exp growth matching the last slope, so that h stays convex.
  // Throws ConstructionError unless phi is increasing and h convex on the nodes.
  static PhiSpec tabulated(std::vector<double> z, std::vector<double> phi);

  Family family() const { return family_; }
  double m() const { return m_; }
  double r() const { return r_; }
  double nu() const { return nu_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& table_z() const { return table_z_; }
  const std::vector<double>& table_phi() const { return table_phi_; }

  double phi(double z) const;
  // h(y) = phi(e^y), in the log domain for the built-in families (may be +inf).
  double h(double y) const;
  double h_prime(double y) const;

 private:
  Family family_ = Family::power_log;
  double m_ = 1.0, r_ = 0.0, nu_ = 0.0;
  std::string name_;
  std::shared_ptr<const std::function<double(double)>> custom_;
  std::vector<double> table_z_, table_phi_;
};

double h_eval(const PhiSpec& phi, double y);

struct MembershipReport {
  bool monotone = false;
  bool convex = false;
  bool summable = false;
  bool passed = false;
  double partial_sum = 0.0;        // sum_{k=3}^{200} exp(h(k) - h(k+1))
  double worst_tail_ratio = 0.0;   // max term ratio over the last 20 terms
  std::vector<std::string> notes;
};

// Monotonicity and convexity of h on a y-grid, summability of
// sum_{k>=3} exp(h(k) - h(k+1)) with a geometric tail test.
MembershipReport phi_membership_check(const PhiSpec& phi);

struct ConjugatePoint {
  double value = 0.0;   // h*(p)
  double argmax = 0.0;  // maximizing y
};

// sup_y (p y - h(y)) by bracket expansion on the sign of p - h'(y) followed by
// golden-section search. p = 0 returns the limit value 0. Throws
// DivergenceError when the supremum is at infinity.
ConjugatePoint young_fenchel_point(const PhiSpec& phi, double p, double tol = 1e-11,
                                   double initial_y = 0.0, double initial_step = 1.0);
double young_fenchel(const PhiSpec& phi, double p, double tol = 1e-11);

// psi(p) = exp(h*(p) / p)
double psi(const PhiSpec& phi, double p);

// Right derivative of h* at p, by forward difference.
double conjugate_right_derivative(const PhiSpec& phi, double p, double step = 1e-6);

// h* and psi tabulated on a geometric p-grid. Immutable once built, so it can
// be shared across threads; extended() returns a new, larger cache.
class ConjugateCache {
 public:
  ConjugateCache(PhiSpec phi, double p_min = 1.0, double p_max = 1024.0, int per_decade = 64,
                 Exec exec = Exec::parallel);

  const PhiSpec& phi() const { return phi_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& h_star() const { return h_star_; }
  const std::vector<double>& psi_values() const { return psi_; }
  double p_min() const { return grid_.front(); }
  double p_max() const { return grid_.back(); }
  int per_decade() const { return per_decade_; }

  // Linear interpolation of h* in log p, then psi = exp(h*/p). Outside the
  // grid, or when exact is requested, the conjugate is recomputed.
  double psi(double p) const;
  double psi_exact(double p) const;

  ConjugateCache extended(double new_p_max) const;

 private:
  PhiSpec phi_;
  int per_decade_;
  Exec exec_;
  std::vector<double> grid_, h_star_, psi_;
};

std::vector<double> geometric_grid(double lo, double hi, int per_decade);

struct FenchelMoreauReport {
  double max_relative_deviation = 0.0;
  double worst_y = 0.0;
  std::vector<double> ys, h_values, biconjugate;
};

// h**(y) = sup_p (p y - h*(p)) evaluated numerically and compared to h on the
// grid. Candidate slopes are a geometric p-grid spanning the slopes of h over
// the y-range plus the chord slopes of h between grid points; the best
// candidate is refined by golden-section search in log p.
FenchelMoreauReport fenchel_moreau_check(const PhiSpec& phi, const std::vector<double>& y_grid);

}  // namespace orlicz
