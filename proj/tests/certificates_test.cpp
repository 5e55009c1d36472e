#include "support.hpp"

#include <gtest/gtest.h>

using namespace lmicert;
using namespace lmicert::testing;

namespace {

bool in_spectrahedron(const LinearPencil<Q> & a, const Vec<double> & x)
{
  return min_eigenvalue(a.evaluate_float(x)) >= -1e-9;
}

}  // namespace

TEST(LevelBound, Formula)
{
  EXPECT_EQ(infeasibility_level_bound(2, 1), 1);
  EXPECT_EQ(infeasibility_level_bound(3, 2), 3);
  EXPECT_EQ(infeasibility_level_bound(4, 3), 7);
  EXPECT_EQ(infeasibility_level_bound(2, 5), 1);
  EXPECT_EQ(infeasibility_level_bound(1, 3), 0);
  EXPECT_EQ(infeasibility_level_bound(5, 0), 0);
}

TEST(FindMembership, ConstantPencil)
{
  // -1 = s - S for any s >= 0 with S = 1 + s
  const LinearPencil<Q> a({Mat<Q>::Constant(1, 1, Q(-1))});
  const auto r = find_membership(a, Polynomial<Q>::constant(0, Q(-1)), 0);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_EQ(r.certificate->big_s.g(0, 0) - r.certificate->s.g(0, 0), Q(1));
  EXPECT_GE(r.certificate->s.g(0, 0), Q(0));
}

TEST(FindMembership, Weak2x2AtLevelOne)
{
  const auto r = find_membership(weak_2x2(), Polynomial<Q>::constant(1, Q(-1)), 1);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_EQ(r.certificate->verified_residual, 0.0);
}

TEST(FindMembership, Weak3x3NotAtLevelOne)
{
  EXPECT_EQ(find_membership(weak_3x3(), Polynomial<Q>::constant(2, Q(-1)), 1).status, SearchStatus::NotFound);
  EXPECT_EQ(find_membership(convert_pencil<double, Q>(weak_3x3()), Polynomial<double>::constant(2, -1.0), 1).status,
            SearchStatus::NotFound);
}

TEST(InfeasibilityLevel, Examples)
{
  const auto r_2x2 = infeasibility_level(weak_2x2());
  ASSERT_EQ(r_2x2.status, SearchStatus::Found);
  EXPECT_EQ(r_2x2.certificate->level, 1);
  const auto r_3x3 = infeasibility_level(weak_3x3());
  ASSERT_EQ(r_3x3.status, SearchStatus::Found);
  EXPECT_EQ(r_3x3.certificate->level, 2);
}

TEST(InfeasibilityLevel, FloatModeAgrees)
{
  const auto r = infeasibility_level(convert_pencil<double, Q>(weak_3x3()));
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_EQ(r.certificate->level, 2);
}

TEST(InfeasibilityLevel, Monotone)
{
  for (int k = 1; k <= 2; ++k) {
    EXPECT_EQ(infeasibility_level(weak_2x2(), k, {}, k).status, SearchStatus::Found) << "level " << k;
  }
  for (int k = 2; k <= 3; ++k) {
    EXPECT_EQ(infeasibility_level(weak_3x3(), k, {}, k).status, SearchStatus::Found) << "level " << k;
  }
}

TEST(InfeasibilityLevel, FeasiblePencilsHaveNone)
{
  EXPECT_EQ(infeasibility_level(cube_pencil(), 1).status, SearchStatus::NotFound);
  EXPECT_EQ(infeasibility_level(single_point_pencil(), 1).status, SearchStatus::NotFound);
}

TEST(StrongInfeasibility, RandomPencilsCertifiedAtLevelZero)
{
  Rng rng(30);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_strongly_infeasible(rng, uniform_int(rng, 1, 4), uniform_int(rng, 1, 3));
    const auto r = check_strong_infeasibility(a);
    ASSERT_EQ(r.status, SearchStatus::Found) << "trial " << t;
    EXPECT_EQ(r.certificate->level, 0);
  }
}

TEST(StrongInfeasibility, CertificatesAreSoundOnGrids)
{
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    const int n  = uniform_int(rng, 1, 3);
    const auto a = random_strongly_infeasible(rng, uniform_int(rng, 2, 4), n);
    const auto r = check_strong_infeasibility(a);
    ASSERT_EQ(r.status, SearchStatus::Found);
    for (const auto & x : grid(n, 5, 10.0)) { EXPECT_LT(min_eigenvalue(a.evaluate_float(x)), 0.0); }
  }
}

TEST(Classify, Examples)
{
  const auto c_point = classify(single_point_pencil());
  EXPECT_EQ(c_point.tag, FeasibilityTag::WeaklyFeasible);
  const auto c_2x2 = classify(weak_2x2());
  EXPECT_EQ(c_2x2.tag, FeasibilityTag::WeaklyInfeasible);
  EXPECT_EQ(c_2x2.level, 1);
  ASSERT_TRUE(c_2x2.certificate);
  const auto c_3x3 = classify(weak_3x3());
  EXPECT_EQ(c_3x3.tag, FeasibilityTag::WeaklyInfeasible);
  EXPECT_EQ(c_3x3.level, 2);
  const auto cube = classify(cube_pencil());
  EXPECT_EQ(cube.tag, FeasibilityTag::StronglyFeasible);
  EXPECT_GT(min_eigenvalue(cube_pencil().evaluate_float(cube.witness)), 0.0);
}

TEST(Classify, StronglyInfeasible)
{
  Rng rng(32);
  const auto c = classify(random_strongly_infeasible(rng, 3, 2));
  EXPECT_EQ(c.tag, FeasibilityTag::StronglyInfeasible);
  EXPECT_EQ(c.level, 0);
}

TEST(Classify, InvariantUnderTransforms)
{
  Rng rng(33);
  const std::vector<std::pair<LinearPencil<Q>, FeasibilityTag>> cases{
      {single_point_pencil(), FeasibilityTag::WeaklyFeasible},
      {weak_2x2(), FeasibilityTag::WeaklyInfeasible},
      {weak_3x3(), FeasibilityTag::WeaklyInfeasible}};
  for (const auto & [a, tag] : cases) {
    for (int t = 0; t < 10; ++t) {
      const auto b = random_transform(rng, a);
      EXPECT_EQ(classify(convert_pencil<double, Q>(b)).tag, tag) << "transform " << t;
    }
  }
}

TEST(InfeasibilityLevel, InvariantUnderTransforms)
{
  Rng rng(34);
  for (const auto & [a, level] : std::vector<std::pair<LinearPencil<Q>, int>>{{weak_2x2(), 1}, {weak_3x3(), 2}}) {
    for (int t = 0; t < 10; ++t) {
      const auto r = infeasibility_level(random_transform(rng, a));
      ASSERT_EQ(r.status, SearchStatus::Found) << "transform " << t;
      EXPECT_EQ(r.certificate->level, level) << "transform " << t;
    }
  }
}

TEST(MaxMinEigenvalue, BoxedValues)
{
  const auto eb = max_min_eigenvalue(cube_pencil(), 1.0);
  EXPECT_TRUE(eb.solved);
  EXPECT_NEAR(eb.lambda, 1.0, 1e-6);
  EXPECT_LE(eb.x.norm(), 1e-5);
  const auto e41 = max_min_eigenvalue(single_point_pencil(), 1.0);
  EXPECT_NEAR(e41.lambda, 0.0, 1e-5);
}

TEST(LowDim, RayOnlyAdmitsOneHyperplane)
{
  const auto r = lowdim_certificate(ray_3x3());
  ASSERT_EQ(r.status, SearchStatus::Found);
  const auto & f = r.certificate->f;
  const double c1 = magnitude(f.coeff(Monomial::variable(3, 0)));
  ASSERT_GT(c1, 0);
  for (const auto & m : {Monomial::one(3), Monomial::variable(3, 1), Monomial::variable(3, 2)}) {
    EXPECT_LE(magnitude(f.coeff(m)), 1e-5 * c1);
  }
}

TEST(LowDim, FloatModeAgrees)
{
  const auto r = lowdim_certificate(convert_pencil<double, Q>(ray_3x3()));
  ASSERT_EQ(r.status, SearchStatus::Found);
  const auto & f = r.certificate->f;
  const double c1 = std::abs(f.coeff(Monomial::variable(3, 0)));
  for (const auto & m : {Monomial::one(3), Monomial::variable(3, 1), Monomial::variable(3, 2)}) {
    EXPECT_LE(std::abs(f.coeff(m)), 1e-5 * c1);
  }
}

TEST(LowDim, FunctionalVanishesOnSpectrahedron)
{
  for (const auto & a : {ray_3x3(), single_point_pencil()}) {
    const auto r = lowdim_certificate(a);
    ASSERT_EQ(r.status, SearchStatus::Found);
    const auto f = convert_polynomial<double, Q>(r.certificate->f);
    int hits     = 0;
    for (const auto & x : grid(a.nvars(), 9, 2.0)) {
      if (!in_spectrahedron(a, x)) { continue; }
      ++hits;
      EXPECT_NEAR(f.evaluate<double>(x), 0.0, 1e-9);
    }
    EXPECT_GT(hits, 0);
  }
}

TEST(LowDim, FullDimensionalHasNone)
{
  EXPECT_NE(lowdim_certificate(cube_pencil()).status, SearchStatus::Found);
}

TEST(Boundedness, Cube)
{
  const auto r = boundedness_certificate(cube_pencil(), 0);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_EQ(r.certificate->bound, Q(1));
  EXPECT_EQ(r.certificate->level, 0);
  EXPECT_EQ(r.certificate->members.size(), 4u);
}

TEST(Boundedness, HalfLineUnbounded)
{
  const LinearPencil<Q> line({Mat<Q>::Constant(1, 1, Q(0)), Mat<Q>::Constant(1, 1, Q(1))});
  EXPECT_EQ(boundedness_certificate(line, 2).status, SearchStatus::NotFound);
}

TEST(EpsMembership, SinglePointPencil)
{
  const auto a = single_point_pencil();
  const auto f = Polynomial<Q>::variable(1, 0);
  for (int k = 0; k <= 2; ++k) {
    EXPECT_EQ(check_eps_membership(a, f, Q(0), k).status, SearchStatus::NotFound) << "level " << k;
  }
  const auto r = check_eps_membership(a, f, Q(1, 10), 1);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_TRUE(verify_certificate(a, Certificate<Q>(*r.certificate)).pass);
}

TEST(EpsMembership, OnePlusOneAtLevelZero)
{
  const auto r = check_eps_membership(weak_3x3(), Polynomial<Q>::constant(2, Q(1)), Q(1), 0);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_EQ(expand_sos(r.certificate->s) + trace_pair(weak_3x3(), expand_sos_matrix(r.certificate->big_s)),
            Polynomial<Q>::constant(2, Q(2)));
}

TEST(PdInSpan, Examples)
{
  const auto x = pd_in_span({Mat<double>::Identity(2, 2)});
  ASSERT_TRUE(x);
  EXPECT_NEAR((*x)(0), 1.0, 1e-5);
  Mat<double> d = Mat<double>::Identity(2, 2);
  d(1, 1)       = -1;
  EXPECT_FALSE(pd_in_span({d}));
  Mat<double> e1 = Mat<double>::Zero(2, 2), e2 = Mat<double>::Zero(2, 2);
  e1(0, 0)       = 1;
  e2(1, 1)       = 1;
  const auto y   = pd_in_span({e1, e2});
  ASSERT_TRUE(y);
  EXPECT_NEAR((*y)(0), 1.0, 1e-5);
  EXPECT_NEAR((*y)(1), 1.0, 1e-5);
}
