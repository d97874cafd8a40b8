#include "orlicz/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

constexpr double kOverflowLimit = 1e300;

std::vector<double> trimmed(std::vector<double> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  return c;
}

void check_overflow(const std::vector<double>& c) {
  for (double v : c)
    if (!std::isfinite(v) || std::abs(v) > kOverflowLimit)
      throw OverflowError("polynomial coefficient magnitude exceeds 1e300");
}

double clenshaw(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

std::vector<double> chebyshev_derivative(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  if (n == 0) return {};
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t k = n; k >= 1; --k) d[k - 1] = (k + 1 <= n ? d[k + 1] : 0.0) + 2.0 * k * c[k];
  d[0] *= 0.5;
  d.pop_back();
  return trimmed(std::move(d));
}

std::vector<double> chebyshev_product(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double v = 0.5 * a[i] * b[j];
      out[i + j] += v;
      out[i > j ? i - j : j - i] += v;
    }
  return trimmed(std::move(out));
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b, double sb) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sb * b[i];
  return trimmed(std::move(out));
}

// Monomial coefficients of sum_k c_k T_k.
std::vector<double> monomial_from_chebyshev(const std::vector<double>& cheb) {
  const std::size_t n = cheb.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> t_prev{1.0}, t_cur{0.0, 1.0};
  for (std::size_t k = 0; k < n; ++k) {
    const auto& t = k == 0 ? t_prev : t_cur;
    for (std::size_t i = 0; i < t.size() && i < n; ++i) out[i] += cheb[k] * t[i];
    if (k >= 1) {
      std::vector<double> next(t_cur.size() + 1, 0.0);
      for (std::size_t i = 0; i < t_cur.size(); ++i) next[i + 1] += 2.0 * t_cur[i];
      for (std::size_t i = 0; i < t_prev.size(); ++i) next[i] -= t_prev[i];
      t_prev = std::move(t_cur);
      t_cur = std::move(next);
    }
  }
  return trimmed(std::move(out));
}

}  // namespace

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<double> coefficients) : c_(trimmed(std::move(coefficients))) {
  check_overflow(c_);
}

Polynomial Polynomial::with_chebyshev(std::vector<double> monomial, std::vector<double> chebyshev) {
  Polynomial p(std::move(monomial));
  p.cheb_ = trimmed(std::move(chebyshev));
  return p;
}

Polynomial Polynomial::monomial(int k, double c) {
  std::vector<double> v(static_cast<std::size_t>(k) + 1, 0.0);
  v.back() = c;
  return Polynomial(std::move(v));
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

double Polynomial::horner(double x) const {
  if (c_.empty()) return 0.0;
  double s = c_.back(), e = 0.0;
  for (std::size_t i = c_.size() - 1; i-- > 0;) {
    const double p = s * x;
    const double pe = std::fma(s, x, -p);
    const double t = p + c_[i];
    const double z = t - p;
    const double se = (p - (t - z)) + (c_[i] - z);
    s = t;
    e = e * x + (pe + se);
  }
  return s + e;
}

double Polynomial::operator()(double x) const {
  if (!cheb_.empty() && x >= -1.0 && x <= 1.0) return clenshaw(cheb_, x);
  return horner(x);
}

Polynomial Polynomial::derivative(int r) const {
  if (r < 1) throw RangeError("derivative order must be >= 1");
  Polynomial out = *this;
  for (int step = 0; step < r; ++step) {
    if (out.c_.size() <= 1) return Polynomial();
    std::vector<double> d(out.c_.size() - 1);
    for (std::size_t k = 1; k < out.c_.size(); ++k) d[k - 1] = static_cast<double>(k) * out.c_[k];
    std::vector<double> cheb = out.cheb_.empty() ? std::vector<double>{} : chebyshev_derivative(out.cheb_);
    out = Polynomial(std::move(d));
    out.cheb_ = std::move(cheb);
  }
  return out;
}

Polynomial Polynomial::scaled(double c) const {
  std::vector<double> m = c_, t = cheb_;
  for (double& v : m) v *= c;
  for (double& v : t) v *= c;
  Polynomial out(std::move(m));
  if (!out.c_.empty()) out.cheb_ = std::move(t);
  return out;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw RangeError("negative polynomial power");
  Polynomial out = Polynomial::constant(1.0);
  if (has_chebyshev()) out.cheb_ = {1.0};
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial out(add(a.c_, b.c_, 1.0));
  if (a.has_chebyshev() && b.has_chebyshev()) out.cheb_ = add(a.cheb_, b.cheb_, 1.0);
  return out;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  Polynomial out(add(a.c_, b.c_, -1.0));
  if (a.has_chebyshev() && b.has_chebyshev()) out.cheb_ = add(a.cheb_, b.cheb_, -1.0);
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  Polynomial p(std::move(out));
  if (a.has_chebyshev() && b.has_chebyshev()) p.cheb_ = chebyshev_product(a.cheb_, b.cheb_);
  return p;
}

Polynomial operator*(double s, const Polynomial& a) {
  std::vector<double> c = a.c_;
  for (auto& v : c) v *= s;
  Polynomial p(std::move(c));
  if (a.has_chebyshev()) {
    p.cheb_ = a.cheb_;
    for (auto& v : p.cheb_) v *= s;
    p.cheb_ = trimmed(std::move(p.cheb_));
  }
  return p;
}

Polynomial Polynomial::from_chebyshev(std::vector<double> chebyshev) {
  auto mono = monomial_from_chebyshev(chebyshev);
  return with_chebyshev(std::move(mono), std::move(chebyshev));
}

Polynomial chebyshev_t(int n) {
  if (n < 0) throw RangeError("Chebyshev degree must be >= 0");
  std::vector<double> cheb(static_cast<std::size_t>(n) + 1, 0.0);
  cheb.back() = 1.0;
  return Polynomial::with_chebyshev(monomial_from_chebyshev(cheb), cheb);
}

// ------------------------------------------------------------ TrigPolynomial

TrigPolynomial::TrigPolynomial(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : a_(std::move(cos_coeffs)), b_(std::move(sin_coeffs)) {
  const std::size_t n = std::max(a_.size(), b_.size());
  a_.resize(std::max<std::size_t>(n, 1), 0.0);
  b_.resize(std::max<std::size_t>(n, 1), 0.0);
  b_[0] = 0.0;
  const std::size_t deg = static_cast<std::size_t>(std::max(degree(), 0));
  a_.resize(deg + 1);
  b_.resize(deg + 1);
}

TrigPolynomial TrigPolynomial::sine(int n, double amplitude) {
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  b.back() = amplitude;
  return TrigPolynomial({0.0}, std::move(b));
}

int TrigPolynomial::degree() const {
  for (std::size_t k = a_.size(); k-- > 0;)
    if (a_[k] != 0.0 || b_[k] != 0.0) return static_cast<int>(k);
  return 0;
}

double TrigPolynomial::operator()(double x) const {
  double s = a_[0];
  for (std::size_t k = 1; k < a_.size(); ++k) {
    const double kx = static_cast<double>(k) * x;
    if (a_[k] != 0.0) s += a_[k] * std::cos(kx);
    if (b_[k] != 0.0) s += b_[k] * std::sin(kx);
  }
  return s;
}

TrigPolynomial TrigPolynomial::derivative(int r) const {
  if (r < 1) throw RangeError("derivative order must be >= 1");
  TrigPolynomial out = *this;
  for (int step = 0; step < r; ++step) {
    std::vector<double> a(out.a_.size(), 0.0), b(out.b_.size(), 0.0);
    for (std::size_t k = 1; k < a.size(); ++k) {
      a[k] = static_cast<double>(k) * out.b_[k];
      b[k] = -static_cast<double>(k) * out.a_[k];
    }
    out = TrigPolynomial(std::move(a), std::move(b));
  }
  return out;
}

// ------------------------------------------------------------------ Rational

Rational::Rational(Polynomial numerator, Polynomial denominator, int power)
    : num_(std::move(numerator)), base_(std::move(denominator)), power_(power) {
  if (base_.is_zero()) throw DegenerateInputError("rational function with zero denominator");
  if (power_ < 1) throw RangeError("denominator power must be >= 1");
}

int Rational::degree() const {
  return std::max(num_.degree(), power_ * base_.degree());
}

double Rational::operator()(double x) const {
  const double b = base_(x);
  const double den = std::pow(b, power_);
  if (!(std::abs(den) >= 1e-14)) {
    std::ostringstream os;
    os.precision(17);
    os << "rational denominator |" << den << "| below 1e-14 at x = " << x;
    throw PoleProximityError(os.str(), x);
  }
  return num_(x) / den;
}

Rational Rational::derivative(int r) const {
  if (r < 1) throw RangeError("derivative order must be >= 1");
  Rational out = *this;
  for (int step = 0; step < r; ++step) {
    const int k = out.power_;
    Polynomial num = out.num_.derivative() * out.base_ -
                     static_cast<double>(k) * (out.num_ * out.base_.derivative());
    out = Rational(std::move(num), out.base_, k + 1);
  }
  return out;
}

// ----------------------------------------------------------------------- Gap

Gap::Gap(std::vector<GapFactor> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_)
    if (!(f.exponent >= 1.0)) throw RangeError("GAP exponents must be >= 1");
}

double Gap::degree() const {
  double d = 0.0;
  for (const auto& f : factors_) d += f.exponent;
  return d;
}

double Gap::operator()(double x) const {
  double s = 0.0;
  for (const auto& f : factors_) s += f.exponent * std::log(std::abs(x - f.root));
  return std::exp(s);
}

double Gap::log_derivative(double x) const {
  double s = 0.0;
  for (const auto& f : factors_) {
    const double dx = x - f.root.real();
    s += f.exponent * dx / std::norm(x - f.root);
  }
  return s;
}

Gap Gap::concatenate(const Gap& other) const {
  auto f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return Gap(std::move(f));
}

// ------------------------------------------------------- Sampled / singular

double Sampled::operator()(double x) const {
  if (xs.empty()) return 0.0;
  if (x <= xs.front()) return vs.front();
  if (x >= xs.back()) return vs.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return vs[j - 1] + t * (vs[j] - vs[j - 1]);
}

double EndpointSingularity::operator()(double x) const {
  return scale * std::pow(1.0 - x, -exponent);
}

EndpointSingularity EndpointSingularity::derivative(int r) const {
  EndpointSingularity out = *this;
  for (int i = 0; i < r; ++i) {
    out.scale *= out.exponent;
    out.exponent += 1.0;
  }
  return out;
}

// -------------------------------------------------------------- FunctionRep

double eval(const FunctionRep& rep, double x) {
  return std::visit([x](const auto& r) { return r(x); }, rep);
}

FunctionRep derivative(const FunctionRep& rep, int r) {
  if (r < 1) throw RangeError("derivative order must be >= 1");
  return std::visit(
      [r](const auto& f) -> FunctionRep {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gap>) {
          if (r != 1) throw RejectedInputError("GAP derivatives are supported for r = 1 only");
          for (const auto& fac : f.factors())
            if (fac.root.imag() == 0.0 && std::abs(fac.root.real()) <= 1.0 && fac.exponent == 1.0)
              throw RejectedInputError(
                  "GAP factor |x - a| with a in [-1,1] and exponent 1 has a "
                  "discontinuous derivative");
          return GapDerivative{f};
        } else if constexpr (std::is_same_v<T, GapDerivative> || std::is_same_v<T, Sampled>) {
          throw RejectedInputError("derivative not supported for " + family_name(FunctionRep(f)));
        } else {
          return f.derivative(r);
        }
      },
      rep);
}

double degree(const FunctionRep& rep) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial> || std::is_same_v<T, TrigPolynomial> ||
                      std::is_same_v<T, Rational> || std::is_same_v<T, Gap>)
          return static_cast<double>(f.degree());
        else
          return std::numeric_limits<double>::quiet_NaN();
      },
      rep);
}

Domain domain_of(const FunctionRep& rep) {
  if (std::holds_alternative<TrigPolynomial>(rep)) return Domain::circle();
  if (const auto* s = std::get_if<Sampled>(&rep)) return s->domain;
  return Domain::interval();
}

Evaluable as_evaluable(const FunctionRep& rep) {
  return std::visit(
      [](const auto& f) -> Evaluable {
        using T = std::decay_t<decltype(f)>;
        auto p = std::make_shared<const T>(f);
        return [p](double x) { return (*p)(x); };
      },
      rep);
}

std::string family_name(const FunctionRep& rep) {
  static const char* names[] = {"polynomial", "trig",    "rational", "gap",
                                "gap-derivative", "sampled", "singular"};
  return names[rep.index()];
}

// ------------------------------------------------------------ check_no_poles

PoleCheck check_no_poles(const Rational& q, std::size_t samples) {
  const Polynomial& d = q.denominator_base();
  PoleCheck out;
  out.threshold = 1e-9 * (1.0 + d.max_abs_coefficient());
  const std::size_t n = std::max<std::size_t>(samples, 16);
  const auto xs = kernels::uniform_grid(-1.0, 1.0, n);
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i <= n; ++i) vs[i] = d(xs[i]);

  // Sign change: a real root of the denominator inside the domain.
  for (std::size_t i = 0; i < n; ++i) {
    if (vs[i] == 0.0 || (vs[i] < 0.0) != (vs[i + 1] < 0.0)) {
      double lo = xs[i], hi = xs[i + 1], glo = vs[i];
      if (glo != 0.0) {
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = d(mid);
          if ((gm < 0.0) == (glo < 0.0)) lo = mid, glo = gm;
          else hi = mid;
        }
      }
      out.witness = glo == 0.0 ? lo : 0.5 * (lo + hi);
      out.min_abs_denominator = 0.0;
      out.certified_lower_bound = 0.0;
      return out;
    }
  }

  std::size_t imin = 0;
  double vmax = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (std::abs(vs[i]) < std::abs(vs[imin])) imin = i;
    vmax = std::max(vmax, std::abs(vs[i]));
  }
  const double lo = xs[imin == 0 ? 0 : imin - 1], hi = xs[imin == n ? n : imin + 1];
  const double xmin = golden_section_max([&](double x) { return -std::abs(d(x)); }, lo, hi, 1e-15);
  out.witness = std::abs(d(xmin)) < std::abs(vs[imin]) ? xmin : xs[imin];
  out.min_abs_denominator = std::min(std::abs(d(xmin)), std::abs(vs[imin]));

  // |d| >= linear interpolant - M2 h^2 / 8 on each cell, M2 >= max |d''| on [-1,1].
  double m2 = 0.0;
  const auto& c = d.coefficients();
  for (std::size_t k = 2; k < c.size(); ++k) m2 += static_cast<double>(k * (k - 1)) * std::abs(c[k]);
  const double h = 2.0 / static_cast<double>(n);
  double lb = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) lb = std::min(lb, std::min(std::abs(vs[i]), std::abs(vs[i + 1])));
  out.certified_lower_bound = lb - m2 * h * h / 8.0;

  // A denominator whose minimum is a millionth of its maximum is a pole
  // closer to the domain than the fixed quadrature grids resolve.
  out.pole_free = out.certified_lower_bound > out.threshold && out.min_abs_denominator > 1e-6 * vmax;
  return out;
}

// ------------------------------------------------------------ random_family

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

namespace {

double signed_magnitude(SplitMix64& rng, double lo, double hi) {
  const double m = rng.uniform(lo, hi);
  return rng.uniform() < 0.5 ? -m : m;
}

// Random Chebyshev coefficients of exact degree n, |c_n| >= 1/2.
std::vector<double> random_chebyshev(SplitMix64& rng, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  c.back() = signed_magnitude(rng, 0.5, 1.0);
  return c;
}

}  // namespace

FunctionRep random_family(FamilyKind kind, int n, std::uint64_t seed) {
  if (n < 0) throw RangeError("random_family degree must be >= 0");
  SplitMix64 rng(seed ^ (0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(static_cast<int>(kind) + 1)) ^
                 (static_cast<std::uint64_t>(n) << 32));
  switch (kind) {
    case FamilyKind::polynomial: {
      auto c = random_chebyshev(rng, n);
      return Polynomial::with_chebyshev(monomial_from_chebyshev(c), c);
    }
    case FamilyKind::trig: {
      std::vector<double> a(static_cast<std::size_t>(n) + 1), b(static_cast<std::size_t>(n) + 1, 0.0);
      for (auto& v : a) v = rng.uniform(-1.0, 1.0);
      for (std::size_t k = 1; k < b.size(); ++k) b[k] = rng.uniform(-1.0, 1.0);
      if (n == 0) a[0] = signed_magnitude(rng, 0.5, 1.0);
      else a.back() = signed_magnitude(rng, 0.5, 1.0);
      return TrigPolynomial(std::move(a), std::move(b));
    }
    case FamilyKind::rational: {
      Polynomial num(monomial_from_chebyshev(random_chebyshev(rng, n)));
      if (n == 0) return Rational(std::move(num), Polynomial::constant(1.0));
      const int m = 1 + static_cast<int>(rng.uniform() * n);
      auto dc = random_chebyshev(rng, m);
      dc[0] = 0.0;
      double l1 = 0.0;
      for (double v : dc) l1 += std::abs(v);
      // 1 + 0.5 * sum c_k T_k / sum |c_k| stays within [0.5, 1.5] on [-1, 1].
      for (auto& v : dc) v *= 0.5 / l1;
      dc[0] = 1.0;
      return Rational(std::move(num), Polynomial(monomial_from_chebyshev(dc)));
    }
    case FamilyKind::gap: {
      if (n == 0) return Gap();
      const int m = 1 + static_cast<int>(rng.uniform() * n);
      std::vector<double> w(static_cast<std::size_t>(m));
      double total = 0.0;
      for (auto& v : w) total += (v = rng.uniform(0.1, 1.0));
      std::vector<GapFactor> factors;
      for (int j = 0; j < m; ++j) {
        const double a = rng.uniform(-1.5, 1.5), b = rng.uniform(0.1, 1.5);
        factors.push_back({{a, b}, 1.0 + (n - m) * w[static_cast<std::size_t>(j)] / total});
      }
      return Gap(std::move(factors));
    }
  }
  throw RangeError("unknown family kind");
}

}  // namespace orlicz
