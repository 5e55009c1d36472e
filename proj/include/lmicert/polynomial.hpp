#ifndef LMICERT__POLYNOMIAL_HPP_
#define LMICERT__POLYNOMIAL_HPP_

/**
 * @file
 * @brief Sparse multivariate polynomials over double or Rational.
 */

#include "lmicert/monomial.hpp"
#include "lmicert/scalar.hpp"

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lmicert {

/**
 * @brief Finite map Monomial -> coefficient with no stored zeros.
 */
template<Scalar S>
class Polynomial
{
public:
  using scalar_type = S;
  using Terms       = std::map<Monomial, S>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars)
  {
    if (nvars < 0) { throw std::invalid_argument("negative variable count"); }
  }

  static Polynomial constant(int nvars, const S & c)
  {
    Polynomial p(nvars);
    p.add_term(Monomial::one(nvars), c);
    return p;
  }
  static Polynomial variable(int nvars, int i)
  {
    Polynomial p(nvars);
    p.add_term(Monomial::variable(nvars, i), S(1));
    return p;
  }
  static Polynomial monomial(const Monomial & m, const S & c = S(1))
  {
    Polynomial p(m.nvars());
    p.add_term(m, c);
    return p;
  }
  /// c0 + sum_i coeffs[i] * x_{i+1}
  static Polynomial linear(const S & c0, const Vec<S> & coeffs)
  {
    const int n = static_cast<int>(coeffs.size());
    Polynomial p = constant(n, c0);
    for (int i = 0; i < n; ++i) { p.add_term(Monomial::variable(n, i), coeffs(i)); }
    return p;
  }

  int nvars() const { return nvars_; }
  const Terms & terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  S coeff(const Monomial & m) const
  {
    const auto it = terms_.find(m);
    return it == terms_.end() ? S(0) : it->second;
  }

  /// Adds c*m, dropping the term if it cancels.
  void add_term(const Monomial & m, const S & c)
  {
    if (m.nvars() != nvars_) { throw std::invalid_argument("monomial variable count mismatch"); }
    if (is_zero_scalar(c)) { return; }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (is_zero_scalar(it->second)) { terms_.erase(it); }
    }
  }

  /// Largest absolute coefficient.
  double max_abs_coeff() const
  {
    double best = 0;
    for (const auto & [m, c] : terms_) { best = std::max(best, magnitude(c)); }
    return best;
  }

  template<typename T>
  T evaluate(const Eigen::Matrix<T, Eigen::Dynamic, 1> & x) const
  {
    if (x.size() != nvars_) { throw std::invalid_argument("evaluation point has wrong dimension"); }
    T acc(0);
    for (const auto & [m, c] : terms_) {
      T t = convert_eval<T>(c);
      for (int i = 0; i < nvars_; ++i) {
        for (int e = 0; e < m[i]; ++e) { t *= x(i); }
      }
      acc += t;
    }
    return acc;
  }

  Polynomial & operator+=(const Polynomial & o)
  {
    check_compatible(o);
    for (const auto & [m, c] : o.terms_) { add_term(m, c); }
    return *this;
  }
  Polynomial & operator-=(const Polynomial & o)
  {
    check_compatible(o);
    for (const auto & [m, c] : o.terms_) { add_term(m, -c); }
    return *this;
  }
  Polynomial & operator*=(const S & s)
  {
    if (is_zero_scalar(s)) {
      terms_.clear();
      return *this;
    }
    for (auto & [m, c] : terms_) { c *= s; }
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial & b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial & b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= S(-1); }
  friend Polynomial operator*(Polynomial a, const S & s) { return a *= s; }
  friend Polynomial operator*(const S & s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial & a, const Polynomial & b)
  {
    a.check_compatible(b);
    Polynomial r(a.nvars_);
    for (const auto & [ma, ca] : a.terms_) {
      for (const auto & [mb, cb] : b.terms_) { r.add_term(ma * mb, ca * cb); }
    }
    return r;
  }

  friend bool operator==(const Polynomial & a, const Polynomial & b)
  {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// Text form, highest degree first, e.g. "-1/2*x1^2 + x2".
  std::string str() const;

private:
  static bool is_zero_scalar(const S & c) { return lmicert::is_zero(c); }

  template<typename T>
  static T convert_eval(const S & c)
  {
    if constexpr (std::same_as<T, S>) {
      return c;
    } else if constexpr (std::same_as<T, double>) {
      return to_double(c);
    } else {
      return T(c);
    }
  }

  void check_compatible(const Polynomial & o) const
  {
    if (o.nvars_ != nvars_) { throw std::invalid_argument("polynomial variable count mismatch"); }
  }

  int nvars_ = 0;
  Terms terms_;
};

/// Explicit mode promotion; the only way to combine exact and float data.
template<Scalar To, Scalar From>
Polynomial<To> convert_polynomial(const Polynomial<From> & p)
{
  Polynomial<To> r(p.nvars());
  for (const auto & [m, c] : p.terms()) { r.add_term(m, convert_scalar<To>(c)); }
  return r;
}

template<Scalar S>
std::string Polynomial<S>::str() const
{
  if (terms_.empty()) { return "0"; }
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto & [m, c] = *it;
    const bool neg      = magnitude(c) > 0 && to_double(c) < 0;
    const S absval      = neg ? S(-c) : c;
    if (out.empty()) {
      if (neg) { out += '-'; }
    } else {
      out += neg ? " - " : " + ";
    }
    const bool unit = absval == S(1);
    if (m.degree() == 0) {
      out += format_scalar(absval);
    } else if (unit) {
      out += m.str();
    } else {
      out += format_scalar(absval) + "*" + m.str();
    }
  }
  return out;
}

namespace detail {

template<Scalar S>
class PolynomialParser
{
public:
  PolynomialParser(std::string_view text, int nvars) : s_(text), n_(nvars) {}

  Polynomial<S> parse()
  {
    Polynomial<S> acc(n_);
    skip();
    if (pos_ == s_.size()) { fail("empty polynomial"); }
    bool first = true;
    while (pos_ < s_.size()) {
      S sign(1);
      if (s_[pos_] == '+' || s_[pos_] == '-') {
        if (s_[pos_] == '-') { sign = S(-1); }
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      acc += term() * sign;
      first = false;
      skip();
    }
    return acc;
  }

private:
  Polynomial<S> term()
  {
    Polynomial<S> t = Polynomial<S>::constant(n_, S(1));
    t               = t * factor();
    skip();
    while (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      skip();
      t = t * factor();
      skip();
    }
    return t;
  }

  Polynomial<S> factor()
  {
    if (pos_ >= s_.size()) { fail("unexpected end of input"); }
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      std::size_t depth = 1, start = pos_;
      while (pos_ < s_.size() && depth > 0) {
        if (s_[pos_] == '(') { ++depth; }
        if (s_[pos_] == ')') { --depth; }
        ++pos_;
      }
      if (depth != 0) { fail("unbalanced parenthesis"); }
      PolynomialParser inner(s_.substr(start, pos_ - 1 - start), n_);
      return inner.parse();
    }
    if (c == 'x') {
      ++pos_;
      int idx = 0;
      std::size_t digits = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        idx = idx * 10 + (s_[pos_] - '0');
        ++pos_;
        ++digits;
      }
      if (digits == 0) {
        if (n_ != 1) { fail("bare 'x' is only allowed for univariate input"); }
        idx = 1;
      }
      if (idx < 1 || idx > n_) { fail("variable index out of range"); }
      skip();
      int e = 1;
      if (pos_ < s_.size() && s_[pos_] == '^') {
        ++pos_;
        skip();
        e = 0;
        std::size_t ed = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          e = e * 10 + (s_[pos_] - '0');
          ++pos_;
          ++ed;
        }
        if (ed == 0) { fail("expected exponent"); }
      }
      std::vector<int> exps(static_cast<std::size_t>(n_), 0);
      exps[static_cast<std::size_t>(idx - 1)] = e;
      return Polynomial<S>::monomial(Monomial(exps));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      auto number_char        = [&](char ch, std::size_t at) {
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '/' || ch == 'e' || ch == 'E') {
          return true;
        }
        // sign inside an exponent
        return (ch == '+' || ch == '-') && at > start && (s_[at - 1] == 'e' || s_[at - 1] == 'E');
      };
      while (pos_ < s_.size() && number_char(s_[pos_], pos_)) { ++pos_; }
      try {
        return Polynomial<S>::constant(n_, parse_scalar<S>(s_.substr(start, pos_ - start)));
      } catch (const std::exception & e) {
        pos_ = start;
        fail(e.what());
      }
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void skip()
  {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) { ++pos_; }
  }

  [[noreturn]] void fail(const std::string & what) const
  {
    throw std::invalid_argument("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/**
 * @brief Parses "c * x1^a1 ... xn^an" sums, e.g. "-1/2*x1^2 + x2".
 *
 * Whitespace-insensitive; coefficients may be integers, decimals or p/q.
 */
template<Scalar S>
Polynomial<S> parse_polynomial(std::string_view text, int nvars)
{
  return detail::PolynomialParser<S>(text, nvars).parse();
}

}  // namespace lmicert

#endif  // LMICERT__POLYNOMIAL_HPP_
