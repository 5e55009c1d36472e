#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lmicert;
using namespace lmicert::testing;

namespace {

SdpInstance<Q> instance(const LinearPencil<Q> & a, const std::string & objective)
{
  return {a, parse_polynomial<Q>(objective, a.nvars())};
}

}  // namespace

TEST(SosDual, Layout)
{
  for (const auto & [alpha, n] : std::vector<std::pair<int, int>>{{3, 2}, {2, 1}, {4, 3}, {2, 0}}) {
    const auto a   = LinearPencil<Q>(std::vector<Mat<Q>>(static_cast<std::size_t>(n + 1), Mat<Q>::Identity(alpha, alpha)));
    const auto p   = build_sos_dual(SdpInstance<Q>{a, Polynomial<Q>(n)});
    const auto lay = sos_dual_layout(alpha, n);
    const int s1 = basis_vector(n, 1).size(), s2 = basis_vector(n, 2).size(), s3 = basis_vector(n, 3).size();
    ASSERT_EQ(p.num_blocks(), 2 + 2 * n);
    EXPECT_EQ(lay.num_blocks(), 2 + 2 * n);
    EXPECT_EQ(p.block_sizes[static_cast<std::size_t>(lay.block_s())], alpha);
    EXPECT_EQ(p.block_sizes[static_cast<std::size_t>(lay.block_c())], 1);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(p.block_sizes[static_cast<std::size_t>(lay.block_si(i))], alpha * s1);
      EXPECT_EQ(p.block_sizes[static_cast<std::size_t>(lay.block_schur(i))], s2 + s1);
    }
    // n step groups and the objective group over monomials of degree <= 3, plus the unit blocks
    const auto ids = sos_dual_identities(SdpInstance<Q>{a, Polynomial<Q>(n)}, Q(0));
    const int unit = n * s2 * (s2 + 1) / 2;
    if (n > 0) {
      EXPECT_EQ(static_cast<int>(ids.size()), (n + 1) * s3 + unit);
      EXPECT_EQ(p.num_constraints(), (n + 1) * s3 + unit - 1);
    } else {
      EXPECT_EQ(static_cast<int>(ids.size()), 1);
      EXPECT_EQ(p.num_constraints(), 0);
    }
  }
}

TEST(SosDual, RejectsNonlinearObjective)
{
  EXPECT_THROW(build_sos_dual(instance(weak_2x2(), "x1^2")), std::invalid_argument);
  EXPECT_THROW(build_primal(SdpInstance<Q>{weak_2x2(), Polynomial<Q>(2)}), std::invalid_argument);
}

TEST(GapReport, ClosesAPositiveGap)
{
  const auto r = gap_report(instance(gap_pencil(Q(1)), "x2"));
  ASSERT_TRUE(r.primal.finite);
  EXPECT_NEAR(r.primal.value, 0.0, 1e-6);
  ASSERT_TRUE(r.standard_dual.finite);
  EXPECT_NEAR(r.standard_dual.value, -1.0, 1e-6);
  ASSERT_TRUE(r.sos_dual.finite);
  EXPECT_NEAR(r.sos_dual.value, 0.0, 1e-5);
  EXPECT_TRUE(r.attained());
  ASSERT_TRUE(r.exact_sos_dual);
  EXPECT_TRUE(verify_certificate(gap_pencil(Q(1)), Certificate<Q>(*r.exact_sos_dual)).pass);
}

TEST(GapReport, FloatModeAgrees)
{
  const auto r = gap_report(SdpInstance<double>{convert_pencil<double, Q>(gap_pencil(Q(2))), parse_polynomial<double>("x2", 2)});
  EXPECT_NEAR(r.primal.value, 0.0, 1e-6);
  EXPECT_NEAR(r.standard_dual.value, -2.0, 1e-6);
  EXPECT_NEAR(r.sos_dual.value, 0.0, 1e-5);
  EXPECT_TRUE(r.attained());
}

TEST(GapReport, NoGapOnStrictlyFeasibleProblems)
{
  // min x1 on [-1, 1]
  const auto seg = pencil_from_rows(1, {{"1 + x1", "0"}, {"0", "1 - x1"}});
  const auto r = gap_report(instance(seg, "x1"));
  EXPECT_NEAR(r.primal.value, -1.0, 1e-6);
  EXPECT_NEAR(r.standard_dual.value, -1.0, 1e-6);
  EXPECT_NEAR(r.sos_dual.value, -1.0, 1e-5);
  EXPECT_TRUE(r.attained());
  ASSERT_EQ(r.x.size(), 1);
  EXPECT_NEAR(r.x(0), -1.0, 1e-5);
}

TEST(GapReport, ConstantPencilDegeneratesToStandardDual)
{
  const LinearPencil<Q> a({Mat<Q>::Identity(2, 2)});
  const auto r = gap_report(SdpInstance<Q>{a, Polynomial<Q>::constant(0, Q(3))});
  EXPECT_NEAR(r.primal.value, 3.0, 1e-6);
  EXPECT_NEAR(r.standard_dual.value, 3.0, 1e-6);
  EXPECT_NEAR(r.sos_dual.value, 3.0, 1e-5);
}

TEST(GapReport, InfeasiblePrimal)
{
  const auto r = gap_report(instance(weak_2x2(), "0"));
  EXPECT_FALSE(r.primal.finite);
  EXPECT_TRUE(std::isinf(r.primal.value) && r.primal.value > 0);
  EXPECT_TRUE(std::isinf(r.sos_dual.value) && r.sos_dual.value > 0);
}

TEST(SosDual, WeakDualityOnFeasiblePoints)
{
  // a <= l(x) for every x in S_A
  for (const Q alpha : {Q(1, 2), Q(1), Q(2)}) {
    const auto a = gap_pencil(alpha);
    const auto r = gap_report(instance(a, "x2"));
    ASSERT_TRUE(r.exact_sos_dual);
    const double value = r.exact_sos_dual->a.to_double();
    const auto l       = parse_polynomial<double>("x2", 2);
    int hits           = 0;
    for (const auto & x : grid(2, 21, 5.0)) {
      if (min_eigenvalue(a.evaluate_float(x)) < -1e-12) { continue; }
      ++hits;
      EXPECT_LE(value, l.evaluate<double>(x) + 1e-6);
    }
    EXPECT_GT(hits, 0);
  }
}

TEST(SosDual, ExtractionSurvivesJsonRoundTrip)
{
  const auto a = gap_pencil(Q(1));
  const auto r = gap_report(instance(a, "x2"));
  ASSERT_TRUE(r.exact_sos_dual);
  const Certificate<Q> cert(*r.exact_sos_dual);
  const auto j      = certificate_to_json(cert, a);
  const auto back   = certificate_from_json<Q>(parse_json(j.dump()), a);
  const auto before = verify_certificate(a, cert);
  const auto after  = verify_certificate(a, back);
  EXPECT_TRUE(after.pass);
  EXPECT_EQ(before.identity_residuals, after.identity_residuals);
  EXPECT_EQ(before.psd_margins, after.psd_margins);
}

TEST(Functional, Examples)
{
  const Mat<Q> id = Mat<Q>::Identity(2, 2);
  EXPECT_TRUE(functional_positivity<Q>({id}, {Q(1)}).positive);

  const auto neg = functional_positivity<Q>({id}, {Q(-1)});
  EXPECT_FALSE(neg.positive);
  EXPECT_LE(max_abs<double>(Mat<double>(neg.witness - Mat<double>::Identity(2, 2))), 1e-6);

  Mat<Q> e1 = Mat<Q>::Constant(2, 2, Q(0)), e2 = e1;
  e1(0, 0)  = Q(1);
  e2(1, 1)  = Q(1);
  const auto split = functional_positivity<Q>({e1, e2}, {Q(1), Q(-1)});
  EXPECT_FALSE(split.positive);
  Mat<double> want = Mat<double>::Zero(2, 2);
  want(1, 1)       = 1;
  EXPECT_LE(max_abs<double>(Mat<double>(split.witness - want)), 1e-6);
}

TEST(Functional, RejectsDependentBasis)
{
  const Mat<Q> id = Mat<Q>::Identity(2, 2);
  EXPECT_THROW(functional_positivity<Q>({id, Mat<Q>(id * Q(2))}, {Q(1), Q(2)}), std::invalid_argument);
}
