#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/function_model.hpp"
#include "orlicz/serialize.hpp"

using namespace orlicz;

TEST_CASE("Jacobi P_n^(2,2) matches the three-term recurrence") {
  for (int n : {0, 1, 2, 5, 10, 25, 40, 60, 100, 200}) {
    const Polynomial p = jacobi22(n);
    CHECK(p.degree() == n);
    CHECK(p(1.0) == doctest::Approx(oracle::jacobi22_at_one(n)).epsilon(1e-12));
    const double scale = oracle::jacobi22_at_one(n);
    for (double x : {-0.97, -0.5, 0.0, 0.31, 0.77, 0.999}) {
      INFO("n = " << n << ", x = " << x);
      CHECK(std::abs(p(x) - oracle::jacobi22(n, x)) <= 1e-12 * scale);
    }
  }
  CHECK_THROWS_AS(jacobi22(201), RangeError);
}

TEST_CASE("Chebyshev polynomials") {
  for (int n : {0, 1, 3, 12, 30}) {
    const Polynomial t = chebyshev_t(n);
    for (double x : {-0.9, -0.2, 0.4, 0.95}) CHECK(t(x) == doctest::Approx(oracle::chebyshev(n, x)).epsilon(1e-12));
  }
  // T_n'(1) = n^2
  CHECK(chebyshev_t(7).derivative()(1.0) == doctest::Approx(49.0).epsilon(1e-13));
}

TEST_CASE("polynomial arithmetic") {
  const Polynomial a({1.0, 2.0}), b({-1.0, 0.0, 3.0});
  CHECK((a * b).coefficients() == std::vector<double>{-1.0, -2.0, 3.0, 6.0});
  CHECK((a + b).coefficients() == std::vector<double>{0.0, 2.0, 3.0});
  CHECK((a - a).is_zero());
  CHECK(b.derivative().coefficients() == std::vector<double>{0.0, 6.0});
  CHECK(b.derivative(3).is_zero());
  CHECK(a.pow(3)(2.0) == doctest::Approx(125.0));
}

TEST_CASE("trigonometric polynomials") {
  const TrigPolynomial s = TrigPolynomial::sine(4, 2.0);
  CHECK(s.degree() == 4);
  CHECK(s(0.3) == doctest::Approx(2.0 * std::sin(1.2)));
  CHECK(s.derivative()(0.3) == doctest::Approx(8.0 * std::cos(1.2)));
  const TrigPolynomial t({1.0, 0.5}, {0.0, -2.0});
  CHECK(t.derivative(2)(0.7) == doctest::Approx(-0.5 * std::cos(0.7) + 2.0 * std::sin(0.7)));
}

TEST_CASE("rational derivative against finite differences") {
  const Rational q(Polynomial({1.0, -0.5, 0.25}), Polynomial({2.0, 0.3, 1.0}));
  CHECK(q.degree() == 2);
  for (int r = 1; r <= 3; ++r) {
    const Rational d = q.derivative(r);
    CHECK(d.denominator_power() == r + 1);
    const Rational lower = r == 1 ? q : q.derivative(r - 1);
    for (double x : {-0.8, 0.1, 0.6}) {
      const double h = 1e-5;
      const double fd = (lower(x + h) - lower(x - h)) / (2 * h);
      CHECK(d(x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("GAP evaluation and logarithmic derivative") {
  const Gap g({{{0.2, 0.5}, 1.5}, {{-2.0, 0.0}, 2.0}});
  CHECK(g.degree() == doctest::Approx(3.5));
  auto direct = [](double x) {
    return std::pow(std::hypot(x - 0.2, 0.5), 1.5) * std::pow(std::abs(x + 2.0), 2.0);
  };
  const GapDerivative d{g};
  for (double x : {-0.9, 0.0, 0.7}) {
    CHECK(g(x) == doctest::Approx(direct(x)).epsilon(1e-13));
    const double h = 1e-6;
    CHECK(d(x) == doctest::Approx((direct(x + h) - direct(x - h)) / (2 * h)).epsilon(1e-7));
  }
  CHECK(Gap()(0.3) == 1.0);
  // |x - 0.5| has a kink inside [-1, 1]
  auto gap1 = [](double a, double b, double r) { return Gap({GapFactor{{a, b}, r}}); };
  CHECK_THROWS_AS(derivative(FunctionRep(gap1(0.5, 0.0, 1.0))), RejectedInputError);
  CHECK_NOTHROW(derivative(FunctionRep(gap1(0.5, 0.0, 2.0))));
  CHECK_NOTHROW(derivative(FunctionRep(gap1(1.5, 0.0, 1.0))));
  CHECK_THROWS_AS(gap1(0.0, 1.0, 0.5), RangeError);
}

TEST_CASE("pole detection") {
  const Rational good(Polynomial::constant(1.0), Polynomial({1.0, 0.0, 1.0}));
  const PoleCheck ok = check_no_poles(good);
  CHECK(ok.pole_free);
  CHECK(ok.certified_lower_bound > 0.9);
  const Rational bad(Polynomial::constant(1.0), Polynomial({1e-8, 0.0, 1.0}));
  const PoleCheck no = check_no_poles(bad);
  CHECK_FALSE(no.pole_free);
  CHECK(std::abs(no.witness) < 1e-3);
  const Rational crossing(Polynomial::constant(1.0), Polynomial({-0.3, 1.0}));
  const PoleCheck cr = check_no_poles(crossing);
  CHECK_FALSE(cr.pole_free);
  CHECK(cr.witness == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("random families are deterministic and well formed") {
  for (auto kind : {FamilyKind::polynomial, FamilyKind::trig, FamilyKind::rational, FamilyKind::gap}) {
    for (int n : {1, 4, 9}) {
      const FunctionRep a = random_family(kind, n, 42), b = random_family(kind, n, 42);
      CHECK(serialize(a) == serialize(b));
      CHECK(degree(a) >= n - 1e-12);
      if (kind == FamilyKind::rational) CHECK(check_no_poles(std::get<Rational>(a)).pole_free);
    }
  }
  CHECK(serialize(random_family(FamilyKind::polynomial, 5, 1)) !=
        serialize(random_family(FamilyKind::polynomial, 5, 2)));
  SplitMix64 r(7);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("text serialization round trips") {
  const std::vector<FunctionRep> reps{
      Polynomial({-1.0, 0.0, 2.0}),
      chebyshev_t(5),
      TrigPolynomial({0.1, 0.2}, {0.0, 1.0 / 3.0}),
      Rational(Polynomial({1.0, 2.0}), Polynomial({3.0, 0.0, 1.0}), 2),
      Gap({{{0.1, 0.7}, 1.25}, {{-0.4, 0.2}, 2.0}}),
      Sampled{Domain::interval(), {-1.0, 0.0, 1.0}, {0.0, 1.0, 0.5}},
      EndpointSingularity{0.35, 2.0},
  };
  for (const auto& r : reps) {
    const std::string s = serialize(r);
    INFO(s);
    const FunctionRep back = parse_function(s);
    CHECK(serialize(back) == s);
    CHECK(eval(back, 0.3) == eval(r, 0.3));
  }
  CHECK_THROWS_AS(parse_function("poly[1, x]"), RangeError);
  CHECK_THROWS_AS(parse_function("spline[1]"), RangeError);
  CHECK_THROWS_AS(parse_function("rational[den: 1, 2]"), RangeError);
}

TEST_CASE("scaling keeps both representations") {
  const Polynomial p = Polynomial::from_chebyshev({0.5, -1.0, 0.25});
  const Polynomial q = p.scaled(-4.0);
  CHECK(q.has_chebyshev());
  for (double x : {-1.0, -0.3, 0.8}) CHECK(q(x) == doctest::Approx(-4.0 * p(x)).epsilon(1e-15));
  CHECK(p.scaled(0.0).is_zero());
}
