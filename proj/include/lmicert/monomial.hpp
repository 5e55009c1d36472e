#ifndef LMICERT__MONOMIAL_HPP_
#define LMICERT__MONOMIAL_HPP_

/**
 * @file
 * @brief Monomials, the graded lexicographic order, and monomial bases.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lmicert {

/**
 * @brief Exponent vector x1^e1 ... xn^en.
 *
 * Ordered first by total degree, then lexicographically with x1 > x2 > ... so
 * that sorting reproduces [1, x1, ..., xn, x1^2, x1 x2, ..., xn^d].
 */
class Monomial
{
public:
  Monomial() = default;
  explicit Monomial(int nvars) : exps_(static_cast<std::size_t>(nvars), 0) {}
  explicit Monomial(std::vector<int> exps);

  static Monomial one(int nvars) { return Monomial(nvars); }
  /// The variable x_{i+1} (zero based index).
  static Monomial variable(int nvars, int i);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<int> & exponents() const { return exps_; }

  friend Monomial operator*(const Monomial & a, const Monomial & b);
  /// a / b when b divides a.
  std::optional<Monomial> divide(const Monomial & b) const;

  friend bool operator==(const Monomial & a, const Monomial & b) { return a.exps_ == b.exps_; }
  friend bool operator!=(const Monomial & a, const Monomial & b) { return !(a == b); }
  /// True when @p a comes before @p b in the basis order.
  friend bool operator<(const Monomial & a, const Monomial & b);

  /// "1", "x1", "x1^2*x3", ...
  std::string str() const;

private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Number of monomials of degree at most d in n variables, C(n+d, n).
std::int64_t basis_size(int nvars, int degree);

/**
 * @brief The ordered vector of all monomials of degree <= d.
 */
class MonomialBasis
{
public:
  MonomialBasis() = default;
  MonomialBasis(int nvars, int degree);

  int nvars() const { return nvars_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const Monomial & operator[](int i) const { return monomials_[static_cast<std::size_t>(i)]; }
  const std::vector<Monomial> & monomials() const { return monomials_; }
  auto begin() const { return monomials_.begin(); }
  auto end() const { return monomials_.end(); }

  /// Position of @p m, or -1 when it is not in the basis.
  int index_of(const Monomial & m) const;

  friend bool operator==(const MonomialBasis & a, const MonomialBasis & b)
  {
    return a.nvars_ == b.nvars_ && a.degree_ == b.degree_;
  }

private:
  int nvars_  = 0;
  int degree_ = 0;
  std::vector<Monomial> monomials_;
  std::map<Monomial, int> index_;
};

/// vec_d for n variables.
inline MonomialBasis basis_vector(int nvars, int degree) { return MonomialBasis(nvars, degree); }

}  // namespace lmicert

#endif  // LMICERT__MONOMIAL_HPP_
