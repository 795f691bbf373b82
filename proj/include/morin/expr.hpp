#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "morin/error.hpp"

namespace morin {

using Rational = boost::multiprecision::cpp_rational;

/// Exact multivariate polynomial over the ambient coordinates x0..x{N-1}.
///
/// Values are always held in expanded normal form: a list of monomials with
/// nonzero rational coefficients, sorted by exponent vector. Two expressions
/// are equal iff their normal forms are identical, so structural comparison
/// is also mathematical equality. Instances are immutable once built and can
/// be shared freely between threads.
class Expr {
 public:
  using Exponents = std::vector<std::uint16_t>;

  struct Term {
    Exponents exps;
    Rational coef;
  };

  Expr() = default;
  explicit Expr(std::size_t nvars) : nvars_(nvars) {}

  static Expr constant(std::size_t nvars, const Rational& c);
  static Expr variable(std::size_t nvars, std::size_t index);
  static Expr from_terms(std::size_t nvars, std::vector<Term> terms);

  std::size_t ambient_dim() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(const Rational& c, const Expr& a);
  Expr pow(unsigned k) const;

  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend bool operator==(const Expr& a, const Expr& b);

  Expr differentiate(std::size_t index) const;
  std::vector<Expr> gradient() const;

  /// Same polynomial viewed in a larger variable space: variable i becomes
  /// variable offset + i of an nvars-dimensional space.
  Expr embedded(std::size_t nvars, std::size_t offset = 0) const;

  double evaluate(std::span<const double> x) const;
  Rational evaluate(std::span<const Rational> x) const;

  /// d^order/dt^order e(x + t v) at t = 0. Exact when instantiated with
  /// Rational; the Taylor coefficient of t^order is extracted term by term.
  template <class T>
  T directional_derivative(std::span<const T> x, std::span<const T> v, unsigned order) const;

  /// Prefix form, e.g. "(+ (* 2 (^ x0 2)) x1)".
  std::string to_prefix() const;
  static Expr parse(std::string_view text, std::size_t nvars);

 private:
  void normalize();
  void cache_doubles();

  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
  std::vector<double> dcoef_;
};

/// Symbolic directional derivative sum_i v_i d/dx_i applied `order` times.
Expr directional(const Expr& e, std::span<const Rational> v, unsigned order = 1);

std::vector<std::vector<Expr>> jacobian(std::span<const Expr> fs);
std::vector<std::vector<Expr>> hessian(const Expr& e);

}  // namespace morin
