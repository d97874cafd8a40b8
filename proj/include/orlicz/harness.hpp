#pragma once

// Markov/Bernstein ratio sweeps, the classical inequalities for rational and
// GAP functions, the B/G equivalence band, the tail characterization and a
// numerical extremal-polynomial search.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orlicz/function_model.hpp"
#include "orlicz/orlicz_norms.hpp"

namespace orlicz {

// K(p) = [4 pi (p+3)^2 / (p sin(2 pi / p))]^{1/p}, p > 2.
double k_constant(double p);
// D(r) = exp(1/e) r! (4/3)^{r+1/4} (r+1/4)^{r+1/4}, r >= 1.
double d_constant(int r);
double log_d_constant(int r);

// ||Q'|| / ||Q|| in the given norm, on the domain of Q.
double markov_ratio(const FunctionRep& q, const NormSpec& norm, const QuadratureConfig& cfg = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;   // 95% t-interval
  double ci_high = 0.0;
  int points = 0;
};

// Least squares of log y on log x over the points with x >= x_min and y > 0.
SlopeFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys, double x_min = 2.0);

struct RatioEntry {
  int n = 0;
  double ratio = 0.0;
  double bound = 0.0;      // NaN when the norm has no bound attached
  double log_bound = 0.0;
  double margin = 0.0;     // bound - ratio
};

enum class SweepFamily { jacobi22, chebyshev, random_poly };
std::string sweep_family_name(SweepFamily f);

struct SweepOptions {
  SweepFamily family = SweepFamily::jacobi22;
  int n_min = 2;
  int n_max = 40;
  NormSpec norm = NormSpec::lp(2.0);
  std::uint64_t seed = 1;
  // Multiplies the asserted bound; values below 1 produce synthetic violations.
  double bound_scale = 1.0;
  QuadratureConfig cfg{};
};

struct RatioReport {
  std::string family;
  std::string norm;
  std::string bound_kind;  // "orlicz_markov", "markov_lp" or "none"
  std::vector<RatioEntry> entries;
  SlopeFit fit;
  double c5_estimate = 0.0;  // min over n >= 1 of ratio / n^2
  // Constants entering the bound.
  double k4 = 0.0;
  double kp = 0.0;
  double psi4 = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, log_c4 = 0.0, k0 = 0.0;
  std::vector<int> violations;  // degrees with negative margin
  bool bound_holds() const { return violations.empty(); }
};

// Markov bound for the B(phi) norm: n^2 K(4) max(1, psi(4)) C4 C3; for
// L_p with p > 2 the classical bound K(p) n^2.
RatioReport markov_sweep(const SweepOptions& opt);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  double margin = 0.0;  // rhs - lhs (may be +inf when rhs overflows)
  bool holds = false;
};

// deg Q ||Q|| - ||Q'||; holds when margin >= -1e-8 ||Q'||.
InequalityCheck bernstein_trig_check(const TrigPolynomial& q, const NormSpec& norm,
                                     const QuadratureConfig& cfg = {});

// ||Q^{(r)}||_gamma <= D(r) (deg Q)^r ||Q||_p with gamma = p/(pr+1), p >= 4.
InequalityCheck lp_rational_check(const Rational& q, double p, int r,
                                  const QuadratureConfig& cfg = {});

// ||Q^{(r)}||V(phi; r) <= C4 D(r) (deg Q)^r ||Q||B(phi).
InequalityCheck rational_orlicz_check(const Rational& q, const PhiSpec& phi, int r,
                                      const QuadratureConfig& cfg = {});

struct GapEntry {
  double degree = 0.0;
  double ratio = 0.0;
  double scaled = 0.0;  // ratio / degree^2
};

struct GapReport {
  double p = 2.0;
  std::vector<GapEntry> entries;
  double max_scaled = 0.0;
  SlopeFit scaled_fit;  // log(ratio / n^2) against log n
  bool bounded = false;  // no growth: scaled_fit.slope <= 0.1
};

// L_p Markov ratios of a GAP family; since the absolute constant is
// unknown only the n^2 scaling is asserted.
GapReport gap_check(const std::vector<Gap>& family, double p, const QuadratureConfig& cfg = {});

struct TailReport {
  double s = 0.0;
  int r = 1;
  double m = 1.0;
  double v_norm = 0.0;         // V(phi_{m,0}; r) of the raw function
  std::vector<double> u;
  std::vector<double> measured;   // T(|f|/V, u)
  std::vector<double> model;      // u^{-1/r} (log u)^{1/(mr)}
  std::vector<double> chebyshev;  // inf_beta u^{-beta} psi(p(beta))^beta
  double prefactor = 0.0;         // smallest C9 on the grid
  double max_violation = 0.0;     // max(measured - prefactor * model)
  int violations = 0;             // against the prefactor model
  int chebyshev_violations = 0;   // against the Chebyshev bound
  // Converse direction.
  double converse_phi_m = 0.0;    // m / (mr + 1)
  double converse_v_norm = 0.0;
  bool converse_converged = false;
  std::vector<double> beta;
  std::vector<double> beta_norm;      // ||f||_beta
  double beta_model_prefactor = 0.0;  // max ||f||_beta (1/r - beta)^{(mr+1)/m}
};

// f(x) = (1 - x)^{-r s} on [-1, 1], u on a geometric grid over [3, u_max].
TailReport tail_check(double s, int r, double m = 1.0, double u_max = 1e3,
                      const QuadratureConfig& cfg = {});

struct ExtremalResult {
  Polynomial best;
  double ratio = 0.0;
  double jacobi_ratio = 0.0;
  int evaluations = 0;
};

// Maximizes markov_ratio over degree-n polynomials: restarts on the unit
// sphere of Chebyshev coefficients (the first restart is P_n^{(2,2)}),
// coordinate-wise golden-section ascent.
ExtremalResult extremal_search(const NormSpec& norm, int n, int restarts, std::uint64_t seed,
                               int sweeps = 2, const QuadratureConfig& cfg = {});

struct CorpusMember {
  std::string name;
  FunctionRep rep;
};

// 30 polynomials of degree 1..30, 10 GAP products, 10 pole-free rationals and
// 10 trigonometric polynomials, all from one seed.
std::vector<CorpusMember> default_corpus(std::uint64_t seed = 20240601);

struct BandRow {
  std::string member;
  double b = 0.0;
  double g = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
};

struct BandReport {
  std::string phi;
  OrliczN n;
  EquivalenceConstants constants;
  std::vector<BandRow> rows;
  int lower_violations = 0;
  int upper_violations = 0;
  // Set when the proof-form C4 fails somewhere and e^2 C4 is used instead.
  bool e2_substitution = false;
  int violations_after_substitution = 0;
  double min_b_over_g = 0.0;
  double max_b_over_g = 0.0;
  bool passed() const { return lower_violations + violations_after_substitution == 0; }
};

// C3^{-1} ||f||G <= ||f||B <= C4 ||f||G over the corpus.
BandReport band_check(const std::vector<CorpusMember>& corpus, const PhiSpec& phi,
                          const QuadratureConfig& cfg = {});

}  // namespace orlicz
