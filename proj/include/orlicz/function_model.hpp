#pragma once

// Function classes quantified over by the inequalities: algebraic polynomials,
// trigonometric polynomials, pole-free rational functions, generalized
// algebraic polynomials (GAP) and a few auxiliary representations.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "orlicz/quadrature.hpp"

namespace orlicz {

inline constexpr int kZeroDegree = -1;

// Polynomial in the monomial basis, trailing zeros trimmed. Evaluation uses
// compensated Horner. Polynomials built from exact arithmetic (Jacobi,
// Chebyshev) additionally carry their Chebyshev expansion, which is then
// used for evaluation since the rounded monomial coefficients of high-degree
// orthogonal polynomials lose the cancellation the exact ones have.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);
  static Polynomial with_chebyshev(std::vector<double> monomial, std::vector<double> chebyshev);
  static Polynomial from_chebyshev(std::vector<double> chebyshev);
  static Polynomial constant(double c) { return Polynomial(std::vector<double>{c}); }
  static Polynomial monomial(int k, double c = 1.0);

  const std::vector<double>& coefficients() const { return c_; }
  const std::vector<double>& chebyshev() const { return cheb_; }
  bool has_chebyshev() const { return !cheb_.empty(); }
  int degree() const { return c_.empty() ? kZeroDegree : static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  double max_abs_coefficient() const;

  double operator()(double x) const;
  double horner(double x) const;  // compensated Horner on the monomial coefficients

  Polynomial derivative(int r = 1) const;
  Polynomial pow(int k) const;
  // c * P, keeping the Chebyshev representation when present.
  Polynomial scaled(double c) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  std::vector<double> c_;
  std::vector<double> cheb_;
};

// T_n as a Polynomial with its (exact) Chebyshev expansion attached.
Polynomial chebyshev_t(int n);

// sum_k a_k cos(kx) + b_k sin(kx) on [0, 2*pi]; b_0 is ignored and stored as 0.
class TrigPolynomial {
 public:
  TrigPolynomial() : a_{0.0}, b_{0.0} {}
  TrigPolynomial(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
  static TrigPolynomial sine(int n, double amplitude = 1.0);

  const std::vector<double>& cos_coefficients() const { return a_; }
  // Index 0 is a placeholder; sin_coefficients()[k] multiplies sin(kx).
  const std::vector<double>& sin_coefficients() const { return b_; }
  int degree() const;
  double operator()(double x) const;
  TrigPolynomial derivative(int r = 1) const;
  friend bool operator==(const TrigPolynomial& a, const TrigPolynomial& b) {
    return a.a_ == b.a_ && a.b_ == b.b_;
  }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

// numerator / base^power. Built from (numerator, denominator) with power 1;
// repeated differentiation raises the power instead of squaring the
// denominator, which is the quotient rule applied to N / B^k.
class Rational {
 public:
  Rational() = default;
  Rational(Polynomial numerator, Polynomial denominator, int power = 1);

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator_base() const { return base_; }
  int denominator_power() const { return power_; }
  Polynomial denominator() const { return base_.pow(power_); }
  // max(deg numerator, deg denominator)
  int degree() const;
  double operator()(double x) const;
  Rational derivative(int r = 1) const;
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.base_ == b.base_ && a.power_ == b.power_;
  }

 private:
  Polynomial num_;
  Polynomial base_ = Polynomial::constant(1.0);
  int power_ = 1;
};

struct GapFactor {
  std::complex<double> root;
  double exponent = 1.0;
  friend bool operator==(const GapFactor&, const GapFactor&) = default;
};

// prod_j |x - z_j|^{r_j}, r_j >= 1, degree = sum_j r_j.
class Gap {
 public:
  Gap() = default;
  explicit Gap(std::vector<GapFactor> factors);

  const std::vector<GapFactor>& factors() const { return factors_; }
  double degree() const;
  double operator()(double x) const;
  // d/dx log Q = sum_j r_j (x - a_j) / |x - z_j|^2
  double log_derivative(double x) const;
  Gap concatenate(const Gap& other) const;
  friend bool operator==(const Gap&, const Gap&) = default;

 private:
  std::vector<GapFactor> factors_;
};

// First derivative of a GAP via logarithmic differentiation.
struct GapDerivative {
  Gap base;
  double operator()(double x) const {
    const double q = base(x);
    return q == 0.0 ? 0.0 : q * base.log_derivative(x);
  }
  friend bool operator==(const GapDerivative&, const GapDerivative&) = default;
};

// Piecewise-linear function through samples (x_i, v_i), x strictly increasing.
struct Sampled {
  Domain domain = Domain::interval();
  std::vector<double> xs;
  std::vector<double> vs;
  double operator()(double x) const;
  friend bool operator==(const Sampled& a, const Sampled& b) {
    return a.domain.kind == b.domain.kind && a.xs == b.xs && a.vs == b.vs;
  }
};

// scale * (1 - x)^(-exponent) on [-1, 1]: the unbounded family for tail checks.
struct EndpointSingularity {
  double exponent = 0.5;
  double scale = 1.0;
  double operator()(double x) const;
  EndpointSingularity derivative(int r = 1) const;
  friend bool operator==(const EndpointSingularity&, const EndpointSingularity&) = default;
};

using FunctionRep =
    std::variant<Polynomial, TrigPolynomial, Rational, Gap, GapDerivative, Sampled, EndpointSingularity>;

double eval(const FunctionRep& rep, double x);
FunctionRep derivative(const FunctionRep& rep, int r = 1);
// Degree in the sense of the inequalities; GAP degrees are real.
double degree(const FunctionRep& rep);
Domain domain_of(const FunctionRep& rep);
Evaluable as_evaluable(const FunctionRep& rep);
std::string family_name(const FunctionRep& rep);

// P_n^{(2,2)} from the Rodrigues formula, expanded in exact rational
// arithmetic; 0 <= n <= 200.
Polynomial jacobi22(int n);

struct PoleCheck {
  bool pole_free = false;
  double witness = 0.0;                  // location of min |denominator|
  double min_abs_denominator = 0.0;
  double certified_lower_bound = 0.0;    // lower bound of |denominator| over the grid cells
  double threshold = 0.0;
};

// Certifies that the denominator stays away from zero on [-1, 1].
PoleCheck check_no_poles(const Rational& q, std::size_t samples = std::size_t{1} << 14);

enum class FamilyKind { polynomial, trig, rational, gap };

FunctionRep random_family(FamilyKind kind, int n, std::uint64_t seed);

// Deterministic uniform doubles from a 64-bit seed, identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace orlicz
