// Prefix-notation reader for scenario files.
//
//   expr   := number | var | "(" op expr+ ")"
//   op     := "+" | "-" | "*" | "^"
//   var    := "x" digits
//   number := ["-"] digits ["." digits] ["/" digits]
//
// "(- a)" negates, "(- a b c)" is a - b - c, "(^ a k)" needs a literal
// non-negative integer exponent. Decimals are read exactly (0.1 == 1/10).

#include <cctype>

#include "morin/expr.hpp"

namespace morin {
namespace {

class Reader {
 public:
  Reader(std::string_view text, std::size_t nvars) : s_(text), nvars_(nvars) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression parse error at offset " + std::to_string(pos_) + ": " + what +
                     " in \"" + std::string(s_) + "\"");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view token() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected token");
    return s_.substr(start, pos_ - start);
  }

  static bool is_number(std::string_view t) {
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    return i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) || t[i] == '.');
  }

  Rational parse_number(std::string_view t) {
    bool neg = false;
    std::size_t i = 0;
    if (t[0] == '-' || t[0] == '+') {
      neg = t[0] == '-';
      ++i;
    }
    boost::multiprecision::cpp_int num = 0, den = 1;
    bool digits = false;
    for (; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i) {
      num = num * 10 + (t[i] - '0');
      digits = true;
    }
    if (i < t.size() && t[i] == '.') {
      ++i;
      for (; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i) {
        num = num * 10 + (t[i] - '0');
        den *= 10;
        digits = true;
      }
    }
    if (!digits) fail("malformed number '" + std::string(t) + "'");
    if (i < t.size() && t[i] == '/') {
      ++i;
      boost::multiprecision::cpp_int d = 0;
      bool any = false;
      for (; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i) {
        d = d * 10 + (t[i] - '0');
        any = true;
      }
      if (!any || d == 0) fail("malformed denominator in '" + std::string(t) + "'");
      den *= d;
    }
    if (i != t.size()) fail("malformed number '" + std::string(t) + "'");
    Rational r(num, den);
    return neg ? Rational(-r) : r;
  }

  Expr parse_atom(std::string_view t) {
    if (is_number(t)) return Expr::constant(nvars_, parse_number(t));
    if (t.size() >= 2 && t[0] == 'x') {
      std::size_t idx = 0;
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(t[i]))) fail("bad variable '" + std::string(t) + "'");
        idx = idx * 10 + static_cast<std::size_t>(t[i] - '0');
      }
      if (idx >= nvars_)
        fail("variable '" + std::string(t) + "' outside ambient dimension " + std::to_string(nvars_));
      return Expr::variable(nvars_, idx);
    }
    fail("unknown atom '" + std::string(t) + "'");
  }

  Expr parse_expr() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] == ')') fail("unexpected ')'");
    if (s_[pos_] != '(') return parse_atom(token());
    ++pos_;
    std::string op(token());
    std::vector<Expr> args;
    std::string_view exponent_literal;
    for (;;) {
      skip_ws();
      if (pos_ >= s_.size()) fail("missing ')'");
      if (s_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (op == "^" && args.size() == 1) {
        exponent_literal = token();
        args.emplace_back(nvars_);
        continue;
      }
      args.push_back(parse_expr());
    }
    if (args.empty()) fail("operator '" + op + "' without operands");
    if (op == "+") {
      Expr r = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) r += args[i];
      return r;
    }
    if (op == "-") {
      if (args.size() == 1) return -args[0];
      Expr r = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) r -= args[i];
      return r;
    }
    if (op == "*") {
      Expr r = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) r *= args[i];
      return r;
    }
    if (op == "^") {
      if (args.size() != 2) fail("'^' takes exactly two operands");
      Rational k = parse_number(exponent_literal);
      if (k < 0 || denominator(k) != 1 || k > 64) fail("exponent must be an integer in [0, 64]");
      return args[0].pow(static_cast<unsigned>(numerator(k)));
    }
    fail("unknown operator '" + op + "'");
  }

  std::string_view s_;
  std::size_t nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text, std::size_t nvars) { return Reader(text, nvars).parse_all(); }

}  // namespace morin
