#include "lmicert/rational.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace lmicert {

Rational::Rational(long num, long den)
{
  if (den == 0) { throw std::domain_error("rational with zero denominator"); }
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational & Rational::operator/=(const Rational & o)
{
  if (o.is_zero()) { throw std::domain_error("rational division by zero"); }
  v_ /= o.v_;
  return *this;
}

Rational Rational::from_double(double d)
{
  if (!std::isfinite(d)) { throw std::domain_error("non-finite value has no rational form"); }
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), d);
  return Rational(q);
}

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) { s.remove_prefix(1); }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) { s.remove_suffix(1); }
  return s;
}

// decimal literal [+-]digits[.digits][e[+-]digits]
Rational parse_decimal(std::string_view s)
{
  std::size_t pos = 0;
  bool neg        = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    neg = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot    = false;
  bool any         = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any = true;
      if (seen_dot) { ++frac_digits; }
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any) { throw std::invalid_argument("malformed number '" + std::string(s) + "'"); }
  long exponent = 0;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    const std::string rest(s.substr(pos));
    std::size_t used = 0;
    try {
      exponent = std::stol(rest, &used);
    } catch (const std::exception &) {
      throw std::invalid_argument("malformed exponent in '" + std::string(s) + "'");
    }
    pos += used;
  }
  if (pos != s.size()) { throw std::invalid_argument("trailing characters in number '" + std::string(s) + "'"); }

  mpz_class num(digits, 10);
  const long shift = exponent - frac_digits;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  mpq_class q = shift >= 0 ? mpq_class(num * pow10) : mpq_class(num, pow10);
  if (neg) { q = -q; }
  return Rational(q);
}

}  // namespace

Rational Rational::parse(std::string_view text)
{
  const std::string_view s = trim(text);
  if (s.empty()) { throw std::invalid_argument("empty number"); }
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) { return parse_decimal(s); }
  const Rational num = parse_decimal(trim(s.substr(0, slash)));
  const Rational den = parse_decimal(trim(s.substr(slash + 1)));
  if (den.is_zero()) { throw std::invalid_argument("zero denominator in '" + std::string(s) + "'"); }
  return num / den;
}

Rational Rational::approximate(double d, std::int64_t max_den)
{
  if (!std::isfinite(d)) { throw std::domain_error("non-finite value has no rational form"); }
  if (max_den < 1) { throw std::invalid_argument("denominator bound must be positive"); }
  // convergents h/k of the continued fraction of the exact binary value
  const mpq_class x = from_double(d).raw();
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  mpq_class rem = x;
  mpq_class best(0);
  const mpz_class bound(std::to_string(max_den));
  for (int it = 0; it < 64; ++it) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
    const mpz_class h2 = a * h1 + h0;
    const mpz_class k2 = a * k1 + k0;
    if (k2 > bound) {
      // best semiconvergent within the bound
      const mpz_class t = (bound - k0) / k1;
      const mpq_class semi(mpz_class(t * h1 + h0), mpz_class(t * k1 + k0));
      const mpq_class conv(h1, k1);
      best = abs(mpq_class(semi - x)) < abs(mpq_class(conv - x)) ? semi : conv;
      best.canonicalize();
      return Rational(best);
    }
    h0 = h1; h1 = h2;
    k0 = k1; k1 = k2;
    const mpq_class frac = rem - a;
    if (sgn(frac) == 0) { break; }
    rem = 1 / frac;
  }
  best = mpq_class(h1, k1);
  best.canonicalize();
  return Rational(best);
}

std::ostream & operator<<(std::ostream & os, const Rational & r) { return os << r.str(); }

}  // namespace lmicert
