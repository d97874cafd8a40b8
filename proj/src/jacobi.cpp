#include <boost/multiprecision/cpp_int.hpp>

#include "orlicz/errors.hpp"
#include "orlicz/function_model.hpp"

namespace orlicz {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Exact Chebyshev coefficients of sum_k m_k x^k, from
// x^k = 2^(1-k) sum_{j < k/2} C(k,j) T_{k-2j} + [k even] 2^(-k) C(k,k/2).
std::vector<cpp_rational> chebyshev_from_monomial(const std::vector<cpp_rational>& m) {
  std::vector<cpp_rational> out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] == 0) continue;
    cpp_int binom = 1;
    const cpp_int scale = cpp_int(1) << k;
    for (std::size_t j = 0; 2 * j <= k; ++j) {
      if (2 * j == k)
        out[0] += m[k] * cpp_rational(binom, scale);
      else
        out[k - 2 * j] += m[k] * cpp_rational(2 * binom, scale);
      binom = binom * (k - j) / (j + 1);
    }
  }
  return out;
}

}  // namespace

Polynomial jacobi22(int n) {
  if (n < 0 || n > 200) throw RangeError("jacobi22 degree must lie in [0, 200]");
  const std::size_t nn = static_cast<std::size_t>(n);

  // (1 - x^2)^(n+2)
  std::vector<cpp_int> base(2 * nn + 5, 0);
  cpp_int binom = 1;
  for (std::size_t k = 0; k <= nn + 2; ++k) {
    base[2 * k] = (k % 2 == 0) ? binom : cpp_int(-binom);
    binom = binom * (nn + 2 - k) / (k + 1);
  }
  // n-th derivative: coefficient of x^j is base[j+n] (j+n)!/j!
  std::vector<cpp_int> deriv(nn + 5, 0);
  for (std::size_t j = 0; j + nn < base.size(); ++j) {
    cpp_int f = base[j + nn];
    for (std::size_t t = j + 1; t <= j + nn; ++t) f *= t;
    deriv[j] = f;
  }
  // Exact division by (1 - x^2)^2 = x^4 - 2x^2 + 1, from the top degree down.
  std::vector<cpp_int> rem = deriv;
  std::vector<cpp_int> quot(nn + 1, 0);
  for (std::size_t d = nn + 4; d >= 4; --d) {
    const cpp_int q = rem[d];
    quot[d - 4] = q;
    rem[d] -= q;
    rem[d - 2] += 2 * q;
    rem[d - 4] -= q;
  }
  cpp_int denom = cpp_int(1) << nn;
  for (std::size_t t = 2; t <= nn; ++t) denom *= t;

  std::vector<cpp_rational> exact(nn + 1);
  for (std::size_t k = 0; k <= nn; ++k)
    exact[k] = cpp_rational(n % 2 == 1 ? cpp_int(-quot[k]) : quot[k], denom);
  const auto cheb_exact = chebyshev_from_monomial(exact);

  std::vector<double> mono(nn + 1), cheb(nn + 1);
  for (std::size_t k = 0; k <= nn; ++k) {
    mono[k] = exact[k].convert_to<double>();
    cheb[k] = cheb_exact[k].convert_to<double>();
  }
  return Polynomial::with_chebyshev(std::move(mono), std::move(cheb));
}

}  // namespace orlicz
