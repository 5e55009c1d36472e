#ifndef LMICERT__LINALG_HPP_
#define LMICERT__LINALG_HPP_

/**
 * @file
 * @brief Elimination routines valid in both scalar modes.
 *
 * Pivoting rule: largest magnitude in float mode, first nonzero in exact mode.
 */

#include "lmicert/scalar.hpp"

#include <Eigen/Eigenvalues>

#include <optional>
#include <vector>

namespace lmicert {

namespace detail {

template<Scalar S>
bool negligible(const S & v, double tol)
{
  if constexpr (is_exact_v<S>) {
    (void)tol;
    return v.is_zero();
  } else {
    return std::abs(v) <= tol;
  }
}

}  // namespace detail

/// Default elimination tolerance for a matrix (0 in exact mode).
template<Scalar S>
double elimination_tol(const Mat<S> & m)
{
  if constexpr (is_exact_v<S>) {
    return 0.0;
  } else {
    return 1e-12 * std::max(1.0, max_abs(m));
  }
}

/**
 * @brief In-place reduced row echelon form.
 *
 * Only the first @p ncols_eliminate columns are used for pivots (pass cols() for all).
 * Returns the pivot column of each nonzero row, in row order.
 */
template<Scalar S>
std::vector<int> rref(Mat<S> & m, double tol, Eigen::Index ncols_eliminate)
{
  std::vector<int> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < ncols_eliminate && row < m.rows(); ++col) {
    Eigen::Index piv = -1;
    if constexpr (is_exact_v<S>) {
      for (Eigen::Index r = row; r < m.rows(); ++r) {
        if (!m(r, col).is_zero()) {
          piv = r;
          break;
        }
      }
    } else {
      double best = tol;
      for (Eigen::Index r = row; r < m.rows(); ++r) {
        if (std::abs(m(r, col)) > best) {
          best = std::abs(m(r, col));
          piv  = r;
        }
      }
    }
    if (piv < 0) { continue; }
    m.row(row).swap(m.row(piv));
    const S inv = S(1) / m(row, col);
    for (Eigen::Index c = 0; c < m.cols(); ++c) { m(row, c) *= inv; }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || detail::negligible(m(r, col), 0.0)) { continue; }
      const S factor = m(r, col);
      for (Eigen::Index c = 0; c < m.cols(); ++c) { m(r, c) -= factor * m(row, c); }
      m(r, col) = S(0);
    }
    pivots.push_back(static_cast<int>(col));
    ++row;
  }
  if constexpr (!is_exact_v<S>) {
    for (Eigen::Index r = row; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (std::abs(m(r, c)) <= tol) { m(r, c) = 0; }
      }
    }
  }
  return pivots;
}

template<Scalar S>
int matrix_rank(Mat<S> m, double tol = -1)
{
  if (tol < 0) { tol = elimination_tol(m); }
  return static_cast<int>(rref(m, tol, m.cols()).size());
}

/**
 * @brief Some solution of A v = b, or nullopt when inconsistent.
 *
 * Free variables are set to zero.
 */
template<Scalar S>
std::optional<Vec<S>> solve_linear(const Mat<S> & a, const Vec<S> & b, double tol = -1)
{
  Mat<S> aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols())      = b;
  if (tol < 0) { tol = elimination_tol(aug); }
  const auto pivots = rref(aug, tol, a.cols());
  for (Eigen::Index r = static_cast<Eigen::Index>(pivots.size()); r < aug.rows(); ++r) {
    if (!detail::negligible(aug(r, a.cols()), std::max(tol, 1e-9))) { return std::nullopt; }
  }
  Vec<S> v = Vec<S>::Constant(a.cols(), S(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    v(pivots[r]) = aug(static_cast<Eigen::Index>(r), a.cols());
  }
  return v;
}

/// Exact determinant test for small matrices (elimination, no pivot tolerance in exact mode).
template<Scalar S>
S determinant(Mat<S> m)
{
  if (m.rows() != m.cols()) { throw std::invalid_argument("determinant of non-square matrix"); }
  S det(1);
  const Eigen::Index n = m.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = -1;
    double best      = 0;
    for (Eigen::Index r = c; r < n; ++r) {
      if constexpr (is_exact_v<S>) {
        if (!m(r, c).is_zero()) {
          piv = r;
          break;
        }
      } else {
        if (std::abs(m(r, c)) > best) {
          best = std::abs(m(r, c));
          piv  = r;
        }
      }
    }
    if (piv < 0) { return S(0); }
    if (piv != c) {
      m.row(c).swap(m.row(piv));
      det = -det;
    }
    det *= m(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const S f = m(r, c) / m(c, c);
      for (Eigen::Index k = c; k < n; ++k) { m(r, k) -= f * m(c, k); }
    }
  }
  return det;
}

/**
 * @brief Exact positive semidefiniteness by symmetric elimination.
 *
 * Pivots on a positive diagonal entry; a zero diagonal entry requires its whole
 * row to vanish; a negative one rejects. PSD iff elimination completes.
 */
inline bool is_psd_exact(Mat<Rational> m)
{
  const Eigen::Index n = m.rows();
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) { continue; }
      const int sg = m(i, i).sign();
      if (sg < 0) { return false; }
      if (sg > 0 && piv < 0) { piv = i; }
    }
    if (piv < 0) {
      // all remaining diagonal entries are zero: remaining block must be zero
      for (Eigen::Index i = 0; i < n; ++i) {
        if (done[static_cast<std::size_t>(i)]) { continue; }
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!done[static_cast<std::size_t>(j)] && !m(i, j).is_zero()) { return false; }
        }
      }
      return true;
    }
    done[static_cast<std::size_t>(piv)] = true;
    const Rational d                    = m(piv, piv);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)] || m(i, piv).is_zero()) { continue; }
      const Rational f = m(i, piv) / d;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (done[static_cast<std::size_t>(j)]) { continue; }
        m(i, j) -= f * m(piv, j);
      }
    }
  }
  return true;
}

/// Smallest eigenvalue of the symmetric part (float mode PSD margin).
inline double min_eigenvalue(const Mat<double> & m)
{
  if (m.size() == 0) { return 0.0; }
  const Mat<double> sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace lmicert

#endif  // LMICERT__LINALG_HPP_
