#ifndef LMICERT__RATIONAL_HPP_
#define LMICERT__RATIONAL_HPP_

/**
 * @file
 * @brief Exact rational scalar usable inside Eigen dense matrices.
 */

#include <gmpxx.h>

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace lmicert {

/**
 * @brief Arbitrary precision rational number.
 *
 * Thin value wrapper around mpq_class. Every operator returns a plain Rational,
 * which keeps gmpxx expression templates away from Eigen's own expressions.
 */
class Rational
{
public:
  Rational() = default;
  Rational(int v) : v_(v) {}                       // NOLINT
  Rational(long v) : v_(v) {}                      // NOLINT
  Rational(long long v) : v_(std::to_string(v)) {}  // NOLINT
  Rational(long num, long den);
  explicit Rational(const mpq_class & v) : v_(v) { v_.canonicalize(); }

  /// Exact binary value of a double (0.1 becomes a dyadic fraction).
  static Rational from_double(double d);

  /// Parses "p/q", an integer or a decimal literal such as "-1.25e-3" exactly.
  static Rational parse(std::string_view text);

  /// Best approximation with denominator at most @p max_den (continued fractions).
  static Rational approximate(double d, std::int64_t max_den);

  std::string str() const { return v_.get_str(); }
  double to_double() const { return v_.get_d(); }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  const mpq_class & raw() const { return v_; }

  Rational & operator+=(const Rational & o) { v_ += o.v_; return *this; }
  Rational & operator-=(const Rational & o) { v_ -= o.v_; return *this; }
  Rational & operator*=(const Rational & o) { v_ *= o.v_; return *this; }
  Rational & operator/=(const Rational & o);

  friend Rational operator+(Rational a, const Rational & b) { return a += b; }
  friend Rational operator-(Rational a, const Rational & b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational & b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational & b) { return a /= b; }
  friend Rational operator-(const Rational & a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational & a, const Rational & b) { return cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const Rational & a, const Rational & b) { return cmp(a.v_, b.v_) != 0; }
  friend bool operator<(const Rational & a, const Rational & b) { return cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Rational & a, const Rational & b) { return cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const Rational & a, const Rational & b) { return cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const Rational & a, const Rational & b) { return cmp(a.v_, b.v_) >= 0; }

  friend std::ostream & operator<<(std::ostream & os, const Rational & r);

private:
  mpq_class v_;
};

inline Rational abs(const Rational & r) { return r.sign() < 0 ? -r : r; }

}  // namespace lmicert

namespace Eigen {

template<>
struct NumTraits<lmicert::Rational> : GenericNumTraits<lmicert::Rational>
{
  typedef lmicert::Rational Real;
  typedef lmicert::Rational NonInteger;
  typedef lmicert::Rational Literal;
  typedef lmicert::Rational Nested;

  enum {
    IsComplex             = 0,
    IsInteger             = 0,
    IsSigned              = 1,
    RequireInitialization = 1,
    ReadCost              = 6,
    AddCost               = 150,
    MulCost               = 100
  };

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

#endif  // LMICERT__RATIONAL_HPP_
