#include <doctest.h>

#include <random>

#include "morin/expr.hpp"
#include "morin/random.hpp"
#include "support.hpp"

using morin::Expr;
using morin::Rational;

namespace {

double eval(const Expr& e, const std::vector<double>& x) { return e.evaluate(std::span<const double>(x)); }

}  // namespace

TEST_CASE("parse and print round trip") {
  const char* src = "(+ (* 2 (^ x0 2)) (* -1/3 x1 x2) 5)";
  Expr e = Expr::parse(src, 3);
  Expr back = Expr::parse(e.to_prefix(), 3);
  CHECK(e == back);
  CHECK(e.degree() == 2);
  CHECK(eval(e, {1.0, 3.0, 2.0}) == doctest::Approx(2.0 - 2.0 + 5.0));
}

TEST_CASE("normal form makes equal polynomials compare equal") {
  Expr a = Expr::parse("(^ (+ x0 x1) 2)", 2);
  Expr b = Expr::parse("(+ (^ x0 2) (* 2 x0 x1) (^ x1 2))", 2);
  CHECK(a == b);
  CHECK((a - b).is_zero());
}

TEST_CASE("parse errors are reported") {
  CHECK_THROWS_AS(Expr::parse("(+ x0", 2), morin::ParseError);
  CHECK_THROWS_AS(Expr::parse("(+ x5 1)", 2), morin::ParseError);
  CHECK_THROWS_AS(Expr::parse("(foo x0)", 2), morin::ParseError);
}

TEST_CASE("exact rational evaluation") {
  Expr e = Expr::parse("(+ (* 1/3 (^ x0 3)) (* -2/7 x0 x1))", 2);
  std::vector<Rational> x = {Rational(3, 2), Rational(-5, 4)};
  // 1/3 * 27/8 - 2/7 * 3/2 * (-5/4) = 9/8 + 15/28
  Rational expected = Rational(9, 8) + Rational(15, 28);
  CHECK(e.evaluate(std::span<const Rational>(x)) == expected);
}

TEST_CASE("symbolic gradient agrees with central differences") {
  Expr e = Expr::parse("(+ (* x0 (^ x1 3)) (* 1/10 (^ x2 4)) (* -3 x0 x2) (^ x1 2))", 3);
  auto grad = e.gradient();
  morin::Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    morin::Vec x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform(-2, 2);
    morin::Vec fd = testing::fd_gradient([&](const morin::Vec& z) { return e.evaluate(morin::as_span(z)); }, x);
    for (int i = 0; i < 3; ++i) {
      double g = grad[static_cast<std::size_t>(i)].evaluate(morin::as_span(x));
      CHECK(std::abs(g - fd[i]) <= 1e-6 * std::max(1.0, std::abs(g)));
    }
  }
}

TEST_CASE("directional derivative equals the iterated symbolic one") {
  Expr e = Expr::parse("(+ (* x0 (^ x1 3)) (^ x0 4) (* 2 x1))", 2);
  std::vector<Rational> x = {Rational(1, 2), Rational(-1, 3)};
  std::vector<Rational> v = {Rational(2), Rational(1, 5)};
  for (unsigned order = 1; order <= 5; ++order) {
    Expr d = morin::directional(e, std::span<const Rational>(v), order);
    Rational want = d.evaluate(std::span<const Rational>(x));
    Rational got = e.directional_derivative<Rational>(std::span<const Rational>(x), std::span<const Rational>(v), order);
    CHECK(got == want);
  }
}

TEST_CASE("embedding shifts variables") {
  Expr e = Expr::parse("(* x0 x1)", 2);
  Expr f = e.embedded(5, 2);
  CHECK(eval(f, {9, 9, 3, 4, 9}) == doctest::Approx(12.0));
}
