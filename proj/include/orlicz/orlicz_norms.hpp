#pragma once

// The spliced N-function N(phi; u), the Luxemburg norm B(phi), the sup-over-p
// norm G(phi), Lorentz norms, the weighted Lorentz norm G*_b and the
// V(phi; r) quasinorm.

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "orlicz/convex_transform.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

// N(u) = C2 |u| for |u| <= C1, exp(phi(|u|)) beyond.
struct OrliczN {
  PhiSpec phi;
  double c1 = 1.0;
  double c2 = 1.0;

  double operator()(double u) const;
  double log_value(double u) const;
};

// C1 is the smallest root in [1e-3, 1e3] of u phi'(u) = 1, where the tangent
// of exp(phi) passes through the origin; C2 = exp(phi(C1)) / C1.
OrliczN construct_N(const PhiSpec& phi);

double n_eval(const OrliczN& n, double u);

struct SpliceDiagnostics {
  double continuity_residual = 0.0;  // |C2 C1 - exp(phi(C1))| / exp(phi(C1))
  double chord_slope = 0.0;          // C2
  double tangent_slope = 0.0;        // right derivative of exp(phi) at C1
};
SpliceDiagnostics splice_diagnostics(const OrliczN& n);

struct NormResult {
  double value = 0.0;
  double maximizer_p = std::numeric_limits<double>::quiet_NaN();
  bool tolerance_met = true;
};

struct LuxemburgResult {
  double value = 0.0;
  double modular = 0.0;  // I(N(|f| / value)), 1 at the solution
  int iterations = 0;
  bool tolerance_met = true;
};

LuxemburgResult luxemburg_norm_detail(const Evaluable& f, const Domain& dom, const OrliczN& n,
                                      const QuadratureConfig& cfg = {});
double luxemburg_norm(const Evaluable& f, const Domain& dom, const OrliczN& n,
                      const QuadratureConfig& cfg = {});

// Maximum of ratio(p) over p >= p_lo: scanned on a geometric grid, extended
// x4 (at most twice) while the maximizer sits at the upper end, refined by
// golden-section search in log p around the best grid point.
struct SupScan {
  double value = 0.0;
  double argmax = 0.0;
  int extensions = 0;
};
SupScan sup_over_p(const std::function<double(double)>& ratio, double p_lo, double p_hi,
                   int per_decade = 64, Exec exec = Exec::parallel,
                   const std::function<double(double)>& grid_ratio = {});

// sup_{p >= 1} ||f||_p / psi(p)
NormResult g_norm(const Evaluable& f, const Domain& dom, const ConjugateCache& cache,
                  const QuadratureConfig& cfg = {});
NormResult g_norm(const Evaluable& f, const Domain& dom, const PhiSpec& phi,
                  const QuadratureConfig& cfg = {});

inline constexpr double kInfiniteIndex = std::numeric_limits<double>::infinity();

// ||f||_{p,b} = [ int_0^inf T^{p/b}(|f|, x) d(x^b) ]^{1/b};  b = inf gives
// sup_x x T^{1/p}(|f|, x).
double lorentz_norm(const DistributionProfile& profile, double p, double b,
                    const QuadratureConfig& cfg = {});
double lorentz_norm(const Evaluable& f, const Domain& dom, double p, double b,
                    const QuadratureConfig& cfg = {});

// Layer-cake table of T(|f|, x) for repeated ||f||_{p,b} queries on one f.
// Between consecutive critical levels x is mapped through the smoothstep
// 3s^2 - 2s^3, which removes the square-root behaviour of T next to extrema,
// and integrated with Gauss-Legendre panels graded towards both ends.
class LorentzTable {
 public:
  explicit LorentzTable(const DistributionProfile& profile, Exec exec = Exec::parallel);

  double norm(double p, double b) const;
  double sup() const { return sup_; }
  std::size_t node_count() const { return xs_.size(); }

 private:
  double sup_weak(double p) const;

  std::shared_ptr<const DistributionProfile> profile_;
  double sup_ = 0.0;
  std::vector<double> xs_, log_w_, log_t_;
  std::vector<double> level_x_, level_t_ge_;  // for b = inf
};

// Second index of the weighted Lorentz norm: a fixed b (possibly infinite) or
// b tied to p.
struct LorentzIndex {
  double b = 2.0;
  bool coupled = false;
  static LorentzIndex fixed(double b) { return {b, false}; }
  static LorentzIndex coupled_to_p() { return {0.0, true}; }
  double at(double p) const { return coupled ? p : b; }
};

// sup_{p >= 1} ||f||_{p,b} / psi(p)
NormResult weighted_lorentz_g(const Evaluable& f, const Domain& dom, const ConjugateCache& cache,
                              LorentzIndex b, const QuadratureConfig& cfg = {});

// sup over beta in (4/(4r+1), 1/r) of ||f||_beta / psi(beta / (1 - r beta)),
// parametrized by p = beta / (1 - r beta) in [4, inf).
NormResult v_quasinorm(const Evaluable& f, const Domain& dom, const PhiSpec& phi, int r,
                       const QuadratureConfig& cfg = {});

struct EquivalenceConstants {
  double c3 = 1.0;
  double k0 = 0.0;
  double h_star_right_slope = 0.0;  // right derivative of h* at p = 1
  double log_c4 = 0.0;              // proof form: sum_{k >= k0} exp(h(k) - h(k+1))
  double log_c4_displayed = 0.0;    // displayed form: sum_{k >= k0} exp(h(k-1) - h(k))
  double log_n_term = 0.0;          // log N(exp(k0 - 2))
  double series = 0.0;
  double series_displayed = 0.0;
  int terms = 0;
  // May overflow to +inf for fast-growing phi; compare in log form.
  double c4() const;
};

EquivalenceConstants equivalence_constants(const OrliczN& n);

// Norm selector used by the Markov ratio and the CLI.
struct NormSpec {
  enum class Kind { lp, orlicz, g, lorentz, weighted_lorentz, v };
  Kind kind = Kind::lp;
  double p = 2.0;
  LorentzIndex b{};
  int r = 1;
  std::optional<PhiSpec> phi;

  static NormSpec lp(double p) { return {Kind::lp, p, {}, 1, std::nullopt}; }
  static NormSpec orlicz(PhiSpec phi) { return {Kind::orlicz, 2.0, {}, 1, std::move(phi)}; }
  static NormSpec g(PhiSpec phi) { return {Kind::g, 2.0, {}, 1, std::move(phi)}; }
  static NormSpec lorentz(double p, double b) { return {Kind::lorentz, p, LorentzIndex::fixed(b), 1, std::nullopt}; }
  static NormSpec weighted_lorentz(PhiSpec phi, LorentzIndex b) {
    return {Kind::weighted_lorentz, 2.0, b, 1, std::move(phi)};
  }
  static NormSpec v(PhiSpec phi, int r) { return {Kind::v, 2.0, {}, r, std::move(phi)}; }

  std::string kind_name() const;
  std::string describe() const;
};

NormResult evaluate_norm(const Evaluable& f, const Domain& dom, const NormSpec& spec,
                         const QuadratureConfig& cfg = {});

}  // namespace orlicz
