#include "support.hpp"

#include <gtest/gtest.h>

using namespace lmicert;
using namespace lmicert::testing;

namespace {

MatrixPolynomial<Q> random_sos_matrix(Rng & rng, int alpha, int nvars, int degree)
{
  std::vector<Polynomial<Q>> u;
  for (int i = 0; i < alpha; ++i) { u.push_back(random_polynomial<Q>(rng, nvars, degree, 3)); }
  return MatrixPolynomial<Q>::outer(u);
}

}  // namespace

TEST(LinearPencil, Shape)
{
  const auto a = weak_3x3();
  EXPECT_EQ(a.size(), 3);
  EXPECT_EQ(a.nvars(), 2);
  EXPECT_EQ(a.entry(1, 1), parse_polynomial<Q>("x2", 2));
  EXPECT_EQ(a.entry(2, 2), parse_polynomial<Q>("x1", 2));
}

TEST(LinearPencil, Validation)
{
  EXPECT_THROW(LinearPencil<Q>(std::vector<Mat<Q>>{}), std::invalid_argument);
  EXPECT_THROW(LinearPencil<Q>({Mat<Q>::Identity(2, 2), Mat<Q>::Identity(3, 3)}), std::invalid_argument);
  EXPECT_THROW(weak_2x2().evaluate(Vec<Q>(2)), std::invalid_argument);
}

TEST(LinearPencil, SymmetrizesInput)
{
  Mat<double> m(2, 2);
  m << 1, 2, 0, 1;
  const LinearPencil<double> a({m});
  EXPECT_DOUBLE_EQ(a.coeff(0)(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(a.coeff(0)(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(a.symmetrization_correction(), 1.0);
  EXPECT_EQ(weak_3x3().symmetrization_correction(), 0.0);
}

TEST(AffineChange, Identity)
{
  const auto a = weak_3x3();
  const auto b = affine_change<Q>(a, Mat<Q>::Identity(2, 2), Vec<Q>::Constant(2, Q(0)));
  EXPECT_EQ(b.coeffs(), a.coeffs());
}

TEST(AffineChange, ScalingWeak2x2)
{
  const auto b = affine_change<Q>(weak_2x2(), Mat<Q>::Constant(1, 1, Q(2)), Vec<Q>::Constant(1, Q(0)));
  EXPECT_EQ(b.entry(0, 0), parse_polynomial<Q>("2*x1", 1));
  EXPECT_EQ(b.entry(0, 1), Polynomial<Q>::constant(1, Q(1)));
  EXPECT_EQ(b.entry(1, 1), Polynomial<Q>(1));
}

TEST(AffineChange, RejectsSingular)
{
  EXPECT_THROW(affine_change<Q>(weak_3x3(), Mat<Q>::Constant(2, 2, Q(1)), Vec<Q>::Constant(2, Q(0))),
               std::invalid_argument);
  EXPECT_THROW(congruence<Q>(weak_3x3(), Mat<Q>::Constant(3, 3, Q(1))), std::invalid_argument);
}

TEST(AffineChange, MapsSpectrahedronPoints)
{
  // y is in S_B exactly when T y + b is in S_A
  Rng rng(4);
  const auto a = cube_pencil();
  for (int t = 0; t < 10; ++t) {
    const Mat<Q> tm = random_unimodular(rng, 2);
    Vec<Q> b(2);
    b << small_rational(rng), small_rational(rng);
    const auto bp = affine_change<Q>(a, tm, b);
    for (int k = 0; k < 20; ++k) {
      Vec<Q> y(2);
      y << small_rational(rng, 3, 4), small_rational(rng, 3, 4);
      const Vec<Q> x = tm * y + b;
      EXPECT_EQ(bp.evaluate(y), a.evaluate(x));
      EXPECT_EQ(is_psd_exact(bp.evaluate(y)), is_psd_exact(a.evaluate(x)));
    }
  }
}

TEST(Congruence, EvaluatesAsConjugation)
{
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto a  = random_strongly_infeasible(rng, 3, 2);
    const Mat<Q> q = random_unimodular(rng, 3);
    const auto b  = congruence<Q>(a, q);
    Vec<Q> x(2);
    x << small_rational(rng), small_rational(rng);
    EXPECT_EQ(b.evaluate(x), Mat<Q>(q.transpose() * a.evaluate(x) * q));
  }
}

TEST(TracePair, Additive)
{
  Rng rng(6);
  const auto a  = weak_3x3();
  const auto s1 = random_sos_matrix(rng, 3, 2, 1);
  const auto s2 = random_sos_matrix(rng, 3, 2, 2);
  EXPECT_EQ(trace_pair(a, s1 + s2), trace_pair(a, s1) + trace_pair(a, s2));
}

TEST(TracePair, MatchesQuadraticForm)
{
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_strongly_infeasible(rng, 3, 2);
    std::vector<Polynomial<Q>> u;
    for (int i = 0; i < 3; ++i) { u.push_back(random_polynomial<Q>(rng, 2, 2, 3)); }
    const auto tp = trace_pair(a, MatrixPolynomial<Q>::outer(u));
    for (int k = 0; k < 5; ++k) {
      Vec<Q> x(2);
      x << small_rational(rng), small_rational(rng);
      Vec<Q> ux(3);
      for (int i = 0; i < 3; ++i) { ux(i) = u[static_cast<std::size_t>(i)].evaluate<Q>(x); }
      EXPECT_EQ(tp.evaluate<Q>(x), Q((ux.transpose() * a.evaluate(x) * ux)(0, 0)));
    }
  }
}

TEST(TracePair, Weak2x2QuadraticForm)
{
  std::vector<Polynomial<Q>> u;
  for (const auto & s : weak_2x2_vector()) { u.push_back(parse_polynomial<Q>(s, 1)); }
  EXPECT_EQ(trace_pair(weak_2x2(), MatrixPolynomial<Q>::outer(u)), Polynomial<Q>::constant(1, Q(-2)));
}

TEST(TracePair, Weak3x3QuadraticForm)
{
  std::vector<Polynomial<Q>> u;
  for (const auto & s : weak_3x3_vector()) { u.push_back(parse_polynomial<Q>(s, 2)); }
  EXPECT_EQ(trace_pair(weak_3x3(), MatrixPolynomial<Q>::outer(u)), Polynomial<Q>::constant(2, Q(-2)));
}
