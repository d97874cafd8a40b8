#pragma once

// Integration against the normalized Lebesgue measure, distribution functions
// and L_p quasi-norms on [-1,1] or the circle [0, 2*pi].

#include <cstddef>
#include <string>
#include <vector>

#include "orlicz/parallel.hpp"

namespace orlicz {

struct Domain {
  enum class Kind { interval, circle };

  Kind kind = Kind::interval;
  double lower = -1.0;
  double upper = 1.0;

  static Domain interval() { return {Kind::interval, -1.0, 1.0}; }
  static Domain circle();

  double length() const { return upper - lower; }
  // Density of mu with respect to dx, so that mu(domain) = 1.
  double normalization() const { return 1.0 / length(); }
  std::string name() const { return kind == Kind::interval ? "interval" : "circle"; }
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  int max_depth = 50;
  int nodes_per_panel = 16;
  std::size_t max_panels = 20000;
  std::size_t initial_panels = 4;
  // Super-level set resolution for distribution(): panels of the dense grid
  // and the absolute tolerance for locating level crossings.
  std::size_t distribution_panels = std::size_t{1} << 16;
  double root_tol = 1e-12;
  std::size_t sup_samples = std::size_t{1} << 14;
  Exec exec = Exec::parallel;
};

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

// Plain (unnormalized) adaptive integral of f over [a, b]; breakpoints inside
// (a, b) seed the initial partition.
QuadratureResult integrate_interval(const Evaluable& f, double a, double b,
                                    const QuadratureConfig& cfg = {},
                                    const std::vector<double>& breakpoints = {});

// log of the unnormalized integral of exp(log_f) over [a, b]. Panel sums are
// accumulated with log-sum-exp, so integrands of size 1e300 and beyond are fine.
QuadratureResult integrate_log_interval(const Evaluable& log_f, double a, double b,
                                        const QuadratureConfig& cfg = {},
                                        const std::vector<double>& breakpoints = {});

// I(f) = integral of f d(mu) over the domain.
double integrate(const Evaluable& f, const Domain& dom, const QuadratureConfig& cfg = {});

// log I(exp(log_f)).
double integrate_log(const Evaluable& log_f, const Domain& dom,
                     const QuadratureConfig& cfg = {},
                     const std::vector<double>& breakpoints = {});

// Sign changes of f found on `samples` equispaced cells and bisected to
// machine precision. Kinks of |f| sit there; a panel straddling one can fool
// the halving error estimate.
std::vector<double> sign_changes(const Evaluable& f, double a, double b, int samples = 256);

// I(|f|^p)^(1/p), p > 0. Evaluated in log form: no overflow for large p.
double lp_quasinorm(const Evaluable& f, const Domain& dom, double p,
                    const QuadratureConfig& cfg = {});

// Lower-biased estimate of sup |f|: max over cfg.sup_samples samples, the
// largest sampled local maxima polished by golden-section search.
double sup_norm(const Evaluable& f, const Domain& dom, const QuadratureConfig& cfg = {});

// Precomputed monotone decomposition of |f| used to answer many T(|f|, w)
// queries for the same f. Built from a dense sample grid with every interior
// extremum polished; each query locates the level crossing inside each
// monotone piece and refines it on f itself.
class DistributionProfile {
 public:
  DistributionProfile(const Evaluable& f, const Domain& dom, const QuadratureConfig& cfg = {});

  // T(|f|, w) = mu{ |f| > w }.
  double measure_gt(double w) const;
  // mu{ |f| >= w }; differs from measure_gt only on level sets of positive measure.
  double measure_ge(double w) const;

  double sup() const { return sup_; }
  // Values of |f| at its polished extrema and domain endpoints, sorted, unique.
  const std::vector<double>& critical_levels() const { return levels_; }
  std::size_t piece_count() const { return pieces_.size(); }

 private:
  struct Piece {
    std::vector<double> xs;
    std::vector<double> vs;  // monotone envelope of |f| at xs
    bool increasing = true;
    bool constant = false;
  };

  double crossing(const Piece& piece, double w) const;
  double plateau_length(const Piece& piece, double w) const;
  double measure(double w, bool strict) const;

  Evaluable abs_f_;
  Domain dom_;
  double root_tol_;
  std::vector<Piece> pieces_;
  std::vector<double> levels_;
  double sup_ = 0.0;
};

// T(|f|, w). Builds a DistributionProfile for a single query.
double distribution(const Evaluable& f, const Domain& dom, double w,
                    const QuadratureConfig& cfg = {});

// Golden-section search for the maximum of a function on [a, b]; returns the
// abscissa. Shared by sup_norm, the sup-over-p scans and the conjugate.
double golden_section_max(const std::function<double(double)>& g, double a, double b,
                          double tol, int max_iter = 200);

}  // namespace orlicz
