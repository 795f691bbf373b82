#include "morin/expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace morin {
namespace {

Expr::Exponents zero_exps(std::size_t n) { return Expr::Exponents(n, 0); }

void check_same_dim(const Expr& a, const Expr& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw DimensionError("expression dimension mismatch: " + std::to_string(a.ambient_dim()) +
                         " vs " + std::to_string(b.ambient_dim()));
}

std::string rational_to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

// Binomial coefficient as a rational; small arguments only.
Rational binomial(unsigned n, unsigned k) {
  Rational r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <class T>
T int_pow(const T& base, unsigned e) {
  T r = T(1);
  T b = base;
  while (e) {
    if (e & 1u) r *= b;
    e >>= 1u;
    if (e) b *= b;
  }
  return r;
}

}  // namespace

Expr Expr::constant(std::size_t nvars, const Rational& c) {
  Expr e(nvars);
  if (c != 0) e.terms_.push_back({zero_exps(nvars), c});
  e.cache_doubles();
  return e;
}

Expr Expr::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars)
    throw DimensionError("variable x" + std::to_string(index) + " outside ambient dimension " +
                         std::to_string(nvars));
  Expr e(nvars);
  auto exps = zero_exps(nvars);
  exps[index] = 1;
  e.terms_.push_back({std::move(exps), Rational(1)});
  e.cache_doubles();
  return e;
}

Expr Expr::from_terms(std::size_t nvars, std::vector<Term> terms) {
  Expr e(nvars);
  for (const auto& t : terms)
    if (t.exps.size() != nvars) throw DimensionError("term exponent vector has wrong length");
  e.terms_ = std::move(terms);
  e.normalize();
  return e;
}

void Expr::normalize() {
  std::map<Exponents, Rational> acc;
  for (auto& t : terms_) acc[t.exps] += t.coef;
  terms_.clear();
  for (auto& [exps, coef] : acc)
    if (coef != 0) terms_.push_back({exps, coef});
  cache_doubles();
}

void Expr::cache_doubles() {
  dcoef_.clear();
  dcoef_.reserve(terms_.size());
  for (const auto& t : terms_) dcoef_.push_back(t.coef.convert_to<double>());
}

bool Expr::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  return std::all_of(terms_[0].exps.begin(), terms_[0].exps.end(), [](auto e) { return e == 0; });
}

int Expr::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (auto e : t.exps) s += e;
    d = std::max(d, s);
  }
  return d;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& t : r.terms_) t.coef = -t.coef;
  r.cache_doubles();
  return r;
}

Expr operator+(const Expr& a, const Expr& b) {
  check_same_dim(a, b);
  Expr r(a.nvars_);
  r.terms_ = a.terms_;
  r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
  r.normalize();
  return r;
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  check_same_dim(a, b);
  Expr r(a.nvars_);
  r.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      Expr::Exponents e(a.nvars_);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ta.exps[i] + tb.exps[i];
      r.terms_.push_back({std::move(e), ta.coef * tb.coef});
    }
  }
  r.normalize();
  return r;
}

Expr operator*(const Rational& c, const Expr& a) {
  if (c == 0) return Expr(a.nvars_);
  Expr r = a;
  for (auto& t : r.terms_) t.coef *= c;
  r.cache_doubles();
  return r;
}

Expr Expr::pow(unsigned k) const {
  Expr r = Expr::constant(nvars_, 1);
  Expr b = *this;
  while (k) {
    if (k & 1u) r = r * b;
    k >>= 1u;
    if (k) b = b * b;
  }
  return r;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].exps != b.terms_[i].exps || a.terms_[i].coef != b.terms_[i].coef) return false;
  return true;
}

Expr Expr::differentiate(std::size_t index) const {
  if (index >= nvars_)
    throw DimensionError("cannot differentiate by x" + std::to_string(index) +
                         " in dimension " + std::to_string(nvars_));
  Expr r(nvars_);
  for (const auto& t : terms_) {
    if (t.exps[index] == 0) continue;
    Term d = t;
    d.coef *= t.exps[index];
    d.exps[index] -= 1;
    r.terms_.push_back(std::move(d));
  }
  // Differentiation preserves the sort order and never merges monomials.
  r.cache_doubles();
  return r;
}

std::vector<Expr> Expr::gradient() const {
  std::vector<Expr> g;
  g.reserve(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) g.push_back(differentiate(i));
  return g;
}

Expr Expr::embedded(std::size_t nvars, std::size_t offset) const {
  if (offset + nvars_ > nvars) throw DimensionError("embedding does not fit target dimension");
  Expr r(nvars);
  for (const auto& t : terms_) {
    Exponents e(nvars, 0);
    std::copy(t.exps.begin(), t.exps.end(), e.begin() + static_cast<std::ptrdiff_t>(offset));
    r.terms_.push_back({std::move(e), t.coef});
  }
  r.normalize();
  return r;
}

double Expr::evaluate(std::span<const double> x) const {
  if (x.size() != nvars_)
    throw DimensionError("point has dimension " + std::to_string(x.size()) + ", expression " +
                         std::to_string(nvars_));
  double sum = 0.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    double v = dcoef_[k];
    const auto& e = terms_[k].exps;
    for (std::size_t i = 0; i < nvars_; ++i) {
      switch (e[i]) {
        case 0: break;
        case 1: v *= x[i]; break;
        case 2: v *= x[i] * x[i]; break;
        default: v *= int_pow(x[i], e[i]);
      }
    }
    sum += v;
  }
  return sum;
}

Rational Expr::evaluate(std::span<const Rational> x) const {
  if (x.size() != nvars_)
    throw DimensionError("point has dimension " + std::to_string(x.size()) + ", expression " +
                         std::to_string(nvars_));
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational v = t.coef;
    for (std::size_t i = 0; i < nvars_; ++i)
      if (t.exps[i]) v *= int_pow(x[i], t.exps[i]);
    sum += v;
  }
  return sum;
}

template <class T>
T Expr::directional_derivative(std::span<const T> x, std::span<const T> v, unsigned order) const {
  if (order == 0) throw Error("directional derivative order must be positive");
  if (x.size() != nvars_ || v.size() != nvars_)
    throw DimensionError("directional derivative: point/direction dimension mismatch");
  // Each monomial prod (x_i + t v_i)^{e_i} is expanded as a polynomial in t
  // truncated at degree `order`; the answer is order! times the t^order
  // coefficient of the sum.
  T total = T(0);
  std::vector<T> poly, factor, next;
  for (const auto& term : terms_) {
    poly.assign(order + 1, T(0));
    poly[0] = T(1);
    for (std::size_t i = 0; i < nvars_; ++i) {
      unsigned e = term.exps[i];
      if (e == 0) continue;
      factor.assign(order + 1, T(0));
      for (unsigned j = 0; j <= std::min(e, order); ++j) {
        T c;
        if constexpr (std::is_same_v<T, Rational>) c = binomial(e, j);
        else c = binomial(e, j).template convert_to<double>();
        factor[j] = c * int_pow(x[i], e - j) * int_pow(v[i], j);
      }
      next.assign(order + 1, T(0));
      for (unsigned a = 0; a <= order; ++a) {
        if (poly[a] == T(0)) continue;
        for (unsigned b = 0; a + b <= order; ++b) next[a + b] += poly[a] * factor[b];
      }
      poly.swap(next);
    }
    T coef;
    if constexpr (std::is_same_v<T, Rational>) coef = term.coef;
    else coef = term.coef.template convert_to<double>();
    total += coef * poly[order];
  }
  T fact = T(1);
  for (unsigned i = 2; i <= order; ++i) fact *= T(i);
  return total * fact;
}

template double Expr::directional_derivative<double>(std::span<const double>,
                                                     std::span<const double>, unsigned) const;
template Rational Expr::directional_derivative<Rational>(std::span<const Rational>,
                                                         std::span<const Rational>,
                                                         unsigned) const;

std::string Expr::to_prefix() const {
  auto monomial = [&](const Term& t) {
    std::vector<std::string> factors;
    bool unit = (t.coef == 1);
    bool neg_unit = (t.coef == -1);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (t.exps[i] == 0) continue;
      std::string var = "x" + std::to_string(i);
      factors.push_back(t.exps[i] == 1 ? var
                                       : "(^ " + var + " " + std::to_string(t.exps[i]) + ")");
    }
    if (factors.empty()) return rational_to_string(t.coef);
    if (!unit) factors.insert(factors.begin(), neg_unit ? "-1" : rational_to_string(t.coef));
    if (factors.size() == 1) return factors[0];
    std::string s = "(*";
    for (const auto& f : factors) s += " " + f;
    return s + ")";
  };
  if (terms_.empty()) return "0";
  if (terms_.size() == 1) return monomial(terms_[0]);
  // Highest total degree first reads more naturally.
  std::vector<const Term*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const Term* a, const Term* b) {
    int da = 0, db = 0;
    for (auto e : a->exps) da += e;
    for (auto e : b->exps) db += e;
    if (da != db) return da > db;
    return a->exps > b->exps;
  });
  std::string s = "(+";
  for (const Term* t : order) s += " " + monomial(*t);
  return s + ")";
}

Expr directional(const Expr& e, std::span<const Rational> v, unsigned order) {
  if (v.size() != e.ambient_dim()) throw DimensionError("direction dimension mismatch");
  Expr cur = e;
  for (unsigned k = 0; k < order; ++k) {
    Expr next(e.ambient_dim());
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) next += v[i] * cur.differentiate(i);
    cur = next;
  }
  return cur;
}

std::vector<std::vector<Expr>> jacobian(std::span<const Expr> fs) {
  std::vector<std::vector<Expr>> j;
  j.reserve(fs.size());
  for (const auto& f : fs) j.push_back(f.gradient());
  return j;
}

std::vector<std::vector<Expr>> hessian(const Expr& e) {
  std::vector<std::vector<Expr>> h(e.ambient_dim());
  auto g = e.gradient();
  for (std::size_t i = 0; i < g.size(); ++i) h[i] = g[i].gradient();
  return h;
}

}  // namespace morin
