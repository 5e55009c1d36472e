#ifndef LMICERT__PENCIL_HPP_
#define LMICERT__PENCIL_HPP_

/**
 * @file
 * @brief Linear pencils A(x) = A0 + x1 A1 + ... + xn An and symmetric matrix polynomials.
 */

#include "lmicert/linalg.hpp"
#include "lmicert/polynomial.hpp"

#include <stdexcept>
#include <vector>

namespace lmicert {

/**
 * @brief Symmetric linear pencil of size alpha in n variables.
 *
 * Coefficients are symmetrized as (M + M^T)/2 on construction; the largest
 * correction applied is kept in symmetrization_correction().
 */
template<Scalar S>
class LinearPencil
{
public:
  using scalar_type = S;

  LinearPencil() = default;

  /// @p coeffs holds [A0, A1, ..., An], all alpha x alpha.
  explicit LinearPencil(std::vector<Mat<S>> coeffs) : coeffs_(std::move(coeffs))
  {
    if (coeffs_.empty()) { throw std::invalid_argument("pencil needs at least the constant matrix"); }
    const auto a = coeffs_.front().rows();
    if (a < 1) { throw std::invalid_argument("pencil size must be >= 1"); }
    for (auto & m : coeffs_) {
      if (m.rows() != a || m.cols() != a) { throw std::invalid_argument("pencil matrices must share one square size"); }
      const Mat<S> sym = (m + m.transpose()) * half();
      correction_      = std::max(correction_, max_abs<S>(Mat<S>(sym - m)));
      m                = sym;
    }
  }

  int size() const { return static_cast<int>(coeffs_.front().rows()); }
  int nvars() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// A0 for i = 0, otherwise the coefficient of x_i.
  const Mat<S> & coeff(int i) const { return coeffs_.at(static_cast<std::size_t>(i)); }
  const std::vector<Mat<S>> & coeffs() const { return coeffs_; }

  double symmetrization_correction() const { return correction_; }

  /// Entry (i, j) as a polynomial of degree <= 1.
  Polynomial<S> entry(int i, int j) const
  {
    const int n     = nvars();
    Polynomial<S> p = Polynomial<S>::constant(n, coeffs_[0](i, j));
    for (int t = 1; t <= n; ++t) { p.add_term(Monomial::variable(n, t - 1), coeffs_[static_cast<std::size_t>(t)](i, j)); }
    return p;
  }

  Mat<S> evaluate(const Vec<S> & x) const
  {
    if (x.size() != nvars()) { throw std::invalid_argument("evaluation point has wrong dimension"); }
    Mat<S> r = coeffs_[0];
    for (int t = 1; t <= nvars(); ++t) { r += coeffs_[static_cast<std::size_t>(t)] * x(t - 1); }
    return r;
  }

  /// Float evaluation regardless of mode.
  Mat<double> evaluate_float(const Vec<double> & x) const
  {
    if (x.size() != nvars()) { throw std::invalid_argument("evaluation point has wrong dimension"); }
    Mat<double> r = convert_matrix<double, S>(coeffs_[0]);
    for (int t = 1; t <= nvars(); ++t) { r += convert_matrix<double, S>(coeffs_[static_cast<std::size_t>(t)]) * x(t - 1); }
    return r;
  }

private:
  static S half()
  {
    if constexpr (is_exact_v<S>) {
      return Rational(1, 2);
    } else {
      return 0.5;
    }
  }

  std::vector<Mat<S>> coeffs_;
  double correction_ = 0;
};

template<Scalar To, Scalar From>
LinearPencil<To> convert_pencil(const LinearPencil<From> & a)
{
  std::vector<Mat<To>> c;
  for (const auto & m : a.coeffs()) { c.push_back(convert_matrix<To, From>(m)); }
  return LinearPencil<To>(std::move(c));
}

/**
 * @brief Symmetric alpha x alpha matrix whose entries are polynomials.
 */
template<Scalar S>
class MatrixPolynomial
{
public:
  MatrixPolynomial() = default;
  MatrixPolynomial(int size, int nvars)
      : size_(size), nvars_(nvars), entries_(static_cast<std::size_t>(size * size), Polynomial<S>(nvars))
  {}

  /// Row-major entries; must be symmetric.
  MatrixPolynomial(int size, std::vector<Polynomial<S>> entries) : size_(size), entries_(std::move(entries))
  {
    if (entries_.size() != static_cast<std::size_t>(size * size)) { throw std::invalid_argument("entry count mismatch"); }
    nvars_ = entries_.empty() ? 0 : entries_.front().nvars();
    for (int i = 0; i < size_; ++i) {
      for (int j = i + 1; j < size_; ++j) {
        if (!(at(i, j) == at(j, i))) { throw std::invalid_argument("matrix polynomial is not symmetric"); }
      }
    }
  }

  /// u u^T for a column of polynomials.
  static MatrixPolynomial outer(const std::vector<Polynomial<S>> & u)
  {
    const int a = static_cast<int>(u.size());
    MatrixPolynomial r(a, a ? u.front().nvars() : 0);
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < a; ++j) {
        r.entries_[static_cast<std::size_t>(i * a + j)] = u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
      }
    }
    return r;
  }

  int size() const { return size_; }
  int nvars() const { return nvars_; }
  const Polynomial<S> & at(int i, int j) const { return entries_[static_cast<std::size_t>(i * size_ + j)]; }
  Polynomial<S> & at(int i, int j) { return entries_[static_cast<std::size_t>(i * size_ + j)]; }

  int degree() const
  {
    int d = -1;
    for (const auto & e : entries_) { d = std::max(d, e.degree()); }
    return d;
  }

  MatrixPolynomial & operator+=(const MatrixPolynomial & o)
  {
    if (o.size_ != size_) { throw std::invalid_argument("matrix polynomial size mismatch"); }
    for (std::size_t k = 0; k < entries_.size(); ++k) { entries_[k] += o.entries_[k]; }
    return *this;
  }
  friend MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial & b) { return a += b; }

  Mat<double> evaluate_float(const Vec<double> & x) const
  {
    Mat<double> r(size_, size_);
    for (int i = 0; i < size_; ++i) {
      for (int j = 0; j < size_; ++j) { r(i, j) = at(i, j).template evaluate<double>(x); }
    }
    return r;
  }

private:
  int size_  = 0;
  int nvars_ = 0;
  std::vector<Polynomial<S>> entries_;
};

/**
 * @brief The polynomial tr(A(x) S(x)) = sum_{i,j} A_ij(x) S_ji(x).
 */
template<Scalar S>
Polynomial<S> trace_pair(const LinearPencil<S> & a, const MatrixPolynomial<S> & s)
{
  if (s.size() != a.size()) { throw std::invalid_argument("trace_pair size mismatch"); }
  if (s.nvars() != a.nvars()) { throw std::invalid_argument("trace_pair variable count mismatch"); }
  const int n = a.nvars();
  Polynomial<S> out(n);
  for (int t = 0; t <= n; ++t) {
    const Mat<S> & at = a.coeff(t);
    Polynomial<S> inner(n);
    for (int i = 0; i < a.size(); ++i) {
      for (int j = 0; j < a.size(); ++j) {
        if (!is_zero(at(i, j))) { inner += s.at(j, i) * at(i, j); }
      }
    }
    if (inner.is_zero()) { continue; }
    out += t == 0 ? inner : inner * Polynomial<S>::variable(n, t - 1);
  }
  return out;
}

namespace detail {

template<Scalar S>
void require_invertible(const Mat<S> & q, const char * what)
{
  if (q.rows() != q.cols()) { throw std::invalid_argument(std::string(what) + " must be square"); }
  const S det = determinant<S>(q);
  if constexpr (is_exact_v<S>) {
    if (det.is_zero()) { throw std::invalid_argument(std::string(what) + " is singular"); }
  } else {
    if (std::abs(det) < 1e-10) { throw std::invalid_argument(std::string(what) + " is singular (|det| < 1e-10)"); }
  }
}

}  // namespace detail

/// Pencil with coefficients Q^T A_i Q.
template<Scalar S>
LinearPencil<S> congruence(const LinearPencil<S> & a, const Mat<S> & q)
{
  if (q.rows() != a.size()) { throw std::invalid_argument("congruence size mismatch"); }
  detail::require_invertible(q, "congruence matrix");
  std::vector<Mat<S>> c;
  for (const auto & m : a.coeffs()) { c.push_back(q.transpose() * m * q); }
  return LinearPencil<S>(std::move(c));
}

/// Pencil B with B(y) = A(T y + b).
template<Scalar S>
LinearPencil<S> affine_change(const LinearPencil<S> & a, const Mat<S> & t, const Vec<S> & b)
{
  const int n = a.nvars();
  if (t.rows() != n || t.cols() != n || b.size() != n) { throw std::invalid_argument("affine change dimension mismatch"); }
  if (n > 0) { detail::require_invertible(t, "affine change matrix"); }
  std::vector<Mat<S>> c(static_cast<std::size_t>(n + 1), Mat<S>::Constant(a.size(), a.size(), S(0)));
  c[0] = a.coeff(0);
  for (int i = 1; i <= n; ++i) {
    c[0] += a.coeff(i) * b(i - 1);
    for (int j = 1; j <= n; ++j) { c[static_cast<std::size_t>(j)] += a.coeff(i) * t(i - 1, j - 1); }
  }
  return LinearPencil<S>(std::move(c));
}

}  // namespace lmicert

#endif  // LMICERT__PENCIL_HPP_
