#ifndef LMICERT_TESTS_SUPPORT_HPP_
#define LMICERT_TESTS_SUPPORT_HPP_

#include "lmicert/io.hpp"

#include <random>
#include <string>
#include <vector>

namespace lmicert::testing {

using Rng = std::mt19937_64;
using Q   = Rational;

inline std::string data_path(const std::string & rel) { return std::string(LMICERT_DATA_DIR) + "/" + rel; }

inline int uniform_int(Rng & rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng & rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Q small_rational(Rng & rng, int range = 3, int max_den = 2)
{
  return Q(uniform_int(rng, -range, range), uniform_int(rng, 1, max_den));
}

inline Mat<Q> random_matrix(Rng & rng, int rows, int cols, int range = 3)
{
  Mat<Q> m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) { m(i, j) = Q(uniform_int(rng, -range, range)); }
  }
  return m;
}

inline Mat<Q> random_symmetric(Rng & rng, int n, int range = 3)
{
  Mat<Q> m = random_matrix(rng, n, n, range);
  return Mat<Q>(m + m.transpose());
}

/// Integer matrix with determinant +-1: unit lower triangular times signed unit upper triangular.
inline Mat<Q> random_unimodular(Rng & rng, int n)
{
  Mat<Q> l = Mat<Q>::Identity(n, n);
  Mat<Q> u = Mat<Q>::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    u(i, i) = Q(uniform_int(rng, 0, 1) ? 1 : -1);
    for (int j = 0; j < i; ++j) {
      l(i, j) = Q(uniform_int(rng, -1, 1));
      u(j, i) = Q(uniform_int(rng, -1, 1));
    }
  }
  return Mat<Q>(l * u);
}

template<Scalar S>
Polynomial<S> random_polynomial(Rng & rng, int nvars, int degree, int terms)
{
  const MonomialBasis b(nvars, degree);
  Polynomial<S> p(nvars);
  for (int t = 0; t < terms; ++t) {
    const Q c = small_rational(rng);
    if constexpr (is_exact_v<S>) {
      p.add_term(b[uniform_int(rng, 0, b.size() - 1)], c);
    } else {
      p.add_term(b[uniform_int(rng, 0, b.size() - 1)], c.to_double());
    }
  }
  return p;
}

inline Vec<double> random_point(Rng & rng, int n, double radius)
{
  Vec<double> x(n);
  for (int i = 0; i < n; ++i) { x(i) = uniform_real(rng, -radius, radius); }
  return x;
}

/**
 * Strongly infeasible pencil built backwards from a separating PSD matrix B:
 * tr(A_i B) = 0 for i >= 1 and tr(A_0 B) = -1, so -1 = tr(A(x) B) everywhere.
 */
inline LinearPencil<Q> random_strongly_infeasible(Rng & rng, int alpha, int nvars)
{
  const Mat<Q> g = random_matrix(rng, alpha, uniform_int(rng, 1, alpha), 2);
  Mat<Q> b       = g * g.transpose();
  if (b.isZero()) { b(0, 0) = Q(1); }
  const Q bb = (b * b).trace();
  std::vector<Mat<Q>> c;
  for (int i = 0; i <= nvars; ++i) {
    Mat<Q> m      = random_symmetric(rng, alpha);
    const Q want  = i == 0 ? Q(-1) : Q(0);
    m            -= b * ((Mat<Q>(m * b).trace() - want) / bb);
    c.push_back(m);
  }
  return LinearPencil<Q>(std::move(c));
}

/// Random congruence followed by a random affine change of variables.
inline LinearPencil<Q> random_transform(Rng & rng, const LinearPencil<Q> & a)
{
  const int n = a.nvars();
  Vec<Q> shift(n);
  for (int i = 0; i < n; ++i) { shift(i) = Q(uniform_int(rng, -2, 2)); }
  return affine_change(congruence(a, random_unimodular(rng, a.size())), random_unimodular(rng, n), shift);
}

inline LinearPencil<Q> pencil_from_rows(int nvars, const std::vector<std::vector<std::string>> & rows)
{
  const int alpha = static_cast<int>(rows.size());
  std::vector<Mat<Q>> c(static_cast<std::size_t>(nvars + 1), Mat<Q>::Constant(alpha, alpha, Q(0)));
  for (int i = 0; i < alpha; ++i) {
    for (int j = 0; j < alpha; ++j) {
      const auto e = parse_polynomial<Q>(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], nvars);
      c[0](i, j)   = e.coeff(Monomial::one(nvars));
      for (int t = 0; t < nvars; ++t) { c[static_cast<std::size_t>(t + 1)](i, j) = e.coeff(Monomial::variable(nvars, t)); }
    }
  }
  return LinearPencil<Q>(std::move(c));
}

inline LinearPencil<Q> single_point_pencil() { return pencil_from_rows(1, {{"1", "x1"}, {"x1", "0"}}); }
inline LinearPencil<Q> weak_2x2() { return pencil_from_rows(1, {{"x1", "1"}, {"1", "0"}}); }
inline LinearPencil<Q> weak_3x3()
{
  return pencil_from_rows(2, {{"0", "x1", "0"}, {"x1", "x2", "1"}, {"0", "1", "x1"}});
}
inline LinearPencil<Q> ray_3x3()
{
  return pencil_from_rows(3, {{"0", "x1", "0"}, {"x1", "x2", "x3"}, {"0", "x3", "x1"}});
}
inline LinearPencil<Q> gap_pencil(const Q & alpha)
{
  return pencil_from_rows(2, {{alpha.str() + " + x2", "0", "0"}, {"0", "x1", "x2"}, {"0", "x2", "0"}});
}
inline LinearPencil<Q> cube_pencil()
{
  return pencil_from_rows(2, {{"1 - x1", "0", "0", "0"}, {"0", "1 + x1", "0", "0"}, {"0", "0", "1 - x2", "0"}, {"0", "0", "0", "1 + x2"}});
}

/// -1 = tr(A S) with S = u u^T / 2 for a polynomial vector u with u^T A u = -2.
inline InfeasibilityCertificate<Q> certificate_from_vector(const LinearPencil<Q> & a, const std::vector<std::string> & u,
                                                           int level)
{
  std::vector<Polynomial<Q>> v;
  for (const auto & s : u) { v.push_back(parse_polynomial<Q>(s, a.nvars())); }
  auto big = gram_of_vectors<Q>({v}, a.size(), a.nvars(), level);
  big.g *= Q(1, 2);
  return {level, GramSos<Q>::zero(a.nvars(), level), big, 0.0};
}

inline const std::vector<std::string> & weak_2x2_vector()
{
  static const std::vector<std::string> u{"1", "-1 - 1/2*x1"};
  return u;
}

inline const std::vector<std::string> & weak_3x3_vector()
{
  static const std::vector<std::string> u{"1/2 + 1/2*x2 + 1/8*x2^2", "-1", "1 + 1/2*x2"};
  return u;
}

/// Every point of a grid with @p per_axis points per coordinate on [-radius, radius]^n.
inline std::vector<Vec<double>> grid(int n, int per_axis, double radius)
{
  std::vector<Vec<double>> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vec<double> x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = per_axis == 1 ? 0.0 : -radius + 2 * radius * idx[static_cast<std::size_t>(i)] / (per_axis - 1);
    }
    out.push_back(x);
    int i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == per_axis) { idx[static_cast<std::size_t>(i++)] = 0; }
    if (i == n) { break; }
  }
  return out;
}

inline Mat<double> random_sym(Rng & rng, int n)
{
  Mat<double> m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) { m.data()[i] = uniform_real(rng, -1, 1); }
  return 0.5 * (m + m.transpose());
}

inline Mat<double> random_pd(Rng & rng, int n)
{
  Mat<double> g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) { g.data()[i] = uniform_real(rng, -1, 1); }
  return g * g.transpose() + 0.5 * Mat<double>::Identity(n, n);
}

inline double inner(const SparseSym & a, const Mat<double> & x) { return Mat<double>(a).cwiseProduct(x).sum(); }

/// Primal and dual strictly feasible by construction: b = A(X0), C = A^*(y0) + Z0.
inline SdpProblem random_feasible(Rng & rng)
{
  SdpProblem p;
  const int nb = uniform_int(rng, 1, 3);
  std::vector<Mat<double>> x0, z0;
  for (int k = 0; k < nb; ++k) {
    const int n = uniform_int(rng, 1, 4);
    p.add_block(n);
    x0.push_back(random_pd(rng, n));
    z0.push_back(random_pd(rng, n));
  }
  const int m = uniform_int(rng, 1, 6);
  Vec<double> y0(m);
  std::vector<Mat<double>> c = z0;
  for (int i = 0; i < m; ++i) {
    y0(i) = uniform_real(rng, -1, 1);
    SdpConstraint con;
    for (int k = 0; k < nb; ++k) {
      const Mat<double> a = random_sym(rng, p.block_sizes[static_cast<std::size_t>(k)]);
      con.rhs += a.cwiseProduct(x0[static_cast<std::size_t>(k)]).sum();
      c[static_cast<std::size_t>(k)] += y0(i) * a;
      con.terms.emplace_back(k, SparseSym(a.sparseView()));
    }
    p.constraints.push_back(std::move(con));
  }
  for (int k = 0; k < nb; ++k) { p.objective[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)].sparseView(); }
  return p;
}

/// Random data with no feasibility guarantee in either direction.
inline SdpProblem random_any(Rng & rng)
{
  SdpProblem p;
  const int n = uniform_int(rng, 1, 4);
  p.add_block(n);
  p.add_block(1);
  p.objective[0] = random_sym(rng, n).sparseView();
  p.objective[1] = Mat<double>::Constant(1, 1, uniform_real(rng, -1, 1)).sparseView();
  for (int i = 0, m = uniform_int(rng, 1, 4); i < m; ++i) {
    SdpConstraint c;
    c.terms.emplace_back(0, SparseSym(random_sym(rng, n).sparseView()));
    c.terms.emplace_back(1, SparseSym(Mat<double>::Constant(1, 1, uniform_real(rng, -1, 1)).sparseView()));
    c.rhs = uniform_real(rng, -1, 1);
    p.constraints.push_back(std::move(c));
  }
  return p;
}

/// Adds @p delta to a symmetric pair of entries of the matrix Gram.
template<Scalar S>
InfeasibilityCertificate<S> perturbed(InfeasibilityCertificate<S> c, Rng & rng, const S & delta)
{
  const int d = static_cast<int>(c.big_s.g.rows());
  const int i = uniform_int(rng, 0, d - 1), j = uniform_int(rng, 0, d - 1);
  c.big_s.g(i, j) += delta;
  if (i != j) { c.big_s.g(j, i) += delta; }
  return c;
}

}  // namespace lmicert::testing

#endif  // LMICERT_TESTS_SUPPORT_HPP_
