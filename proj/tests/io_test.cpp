#include "support.hpp"

#include <gtest/gtest.h>

using namespace lmicert;
using namespace lmicert::testing;

namespace {

int error_line(const std::function<void()> & f)
{
  try {
    f();
  } catch (const ParseError & e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(PencilJson, RoundTrip)
{
  Rng rng(50);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_strongly_infeasible(rng, uniform_int(rng, 1, 4), uniform_int(rng, 0, 3));
    EXPECT_EQ(pencil_from_json<Q>(parse_json(pencil_to_json(a).dump())).coeffs(), a.coeffs());
    const auto af = convert_pencil<double, Q>(a);
    EXPECT_EQ(pencil_from_json<double>(parse_json(pencil_to_json(af).dump())).coeffs(), af.coeffs());
  }
}

TEST(PencilJson, ExactScalars)
{
  const auto a = pencil_from_json<Q>(parse_json(R"({"nvars": 0, "size": 1, "matrices": [[["1/3"]]]})"));
  EXPECT_EQ(a.coeff(0)(0, 0), Q(1, 3));
  const auto b = pencil_from_json<Q>(parse_json(R"({"nvars": 0, "size": 1, "matrices": [[[0.1]]]})"));
  EXPECT_EQ(b.coeff(0)(0, 0), Q(1, 10));
}

TEST(PencilJson, SchemaErrors)
{
  EXPECT_THROW(pencil_from_json<Q>(parse_json(R"({"size": 1, "matrices": [[[1]]]})")), ParseError);
  EXPECT_THROW(pencil_from_json<Q>(parse_json(R"({"nvars": 1, "size": 1, "matrices": [[[1]]]})")), ParseError);
  EXPECT_THROW(pencil_from_json<Q>(parse_json(R"({"nvars": 0, "size": 2, "matrices": [[[1, 0]]]})")), ParseError);
  EXPECT_THROW(pencil_from_json<Q>(parse_json(R"({"nvars": 0, "size": 1, "matrices": [[["one"]]]})")), ParseError);
  EXPECT_THROW(pencil_from_json<Q>(parse_json(R"({"nvars": "0", "size": 1, "matrices": [[[1]]]})")), ParseError);
}

TEST(PencilJson, SyntaxErrorsCarryPosition)
{
  EXPECT_EQ(error_line([] { parse_json("{\n  \"nvars\": 1,\n  \"size\": ]\n}"); }), 3);
}

TEST(Sdpa, SmallFile)
{
  const auto d = parse_sdpa<Q>(read_file(data_path("sdpa/small.dat-s")));
  EXPECT_EQ(d.pencil.nvars(), 2);
  EXPECT_EQ(d.pencil.size(), 4);
  EXPECT_EQ(d.objective, parse_polynomial<Q>("x1 + x2", 2));
  // diag(x1 - 1, x2 - 2) (+) [[x1, 1], [1, x2]]
  const auto want = pencil_from_rows(2, {{"x1 - 1", "0", "0", "0"}, {"0", "x2 - 2", "0", "0"}, {"0", "0", "x1", "1"}, {"0", "0", "1", "x2"}});
  EXPECT_EQ(d.pencil.coeffs(), want.coeffs());
}

TEST(Sdpa, CommentsAndPunctuation)
{
  const auto d = parse_sdpa<double>("* a comment\n1\n1\n{2}\n(3.5)\n0 1 1 2 1\n1 1 1 1 1\n1 1 2 2 1\n");
  EXPECT_EQ(d.pencil.size(), 2);
  EXPECT_DOUBLE_EQ(d.pencil.coeff(0)(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(d.objective.coeff(Monomial::variable(1, 0)), 3.5);
}

TEST(Sdpa, Errors)
{
  EXPECT_THROW(parse_sdpa<Q>(""), ParseError);
  EXPECT_EQ(error_line([] { parse_sdpa<Q>("1\n1\n2\n1\n0 1 3 1 1.0\n"); }), 5);
  EXPECT_EQ(error_line([] { parse_sdpa<Q>("1\n1\n-2\n1\n0 1 1 2 1.0\n"); }), 5);
  EXPECT_EQ(error_line([] { parse_sdpa<Q>("1\n1\n2\n1\n0 1 1 1\n"); }), 5);
  EXPECT_EQ(error_line([] { parse_sdpa<Q>("1\nx\n"); }), 2);
}

TEST(CertificateJson, RoundTripsEveryKind)
{
  std::vector<std::pair<LinearPencil<Q>, Certificate<Q>>> certs;
  certs.emplace_back(weak_2x2(), certificate_from_vector(weak_2x2(), weak_2x2_vector(), 1));
  certs.emplace_back(weak_3x3(), certificate_from_vector(weak_3x3(), weak_3x3_vector(), 2));
  certs.emplace_back(ray_3x3(), *lowdim_certificate(ray_3x3()).certificate);
  certs.emplace_back(cube_pencil(), *boundedness_certificate(cube_pencil(), 0).certificate);
  certs.emplace_back(single_point_pencil(),
                     *check_eps_membership(single_point_pencil(), Polynomial<Q>::variable(1, 0), Q(1, 10), 1).certificate);
  for (const auto & [a, c] : certs) {
    const auto j    = certificate_to_json(c, a);
    const auto back = certificate_from_json<Q>(parse_json(j.dump()), a);
    EXPECT_EQ(back.index(), c.index());
    EXPECT_EQ(certificate_to_json(back, a), j) << j.at("type");
    EXPECT_TRUE(verify_certificate(a, back).pass) << j.at("type");
  }
}

TEST(CertificateJson, RandomFloatCertificatesRoundTrip)
{
  Rng rng(51);
  for (int t = 0; t < 20; ++t) {
    const auto a = convert_pencil<double, Q>(random_strongly_infeasible(rng, uniform_int(rng, 2, 3), uniform_int(rng, 1, 2)));
    const auto r = check_strong_infeasibility(a);
    ASSERT_EQ(r.status, SearchStatus::Found);
    const Certificate<double> c(*r.certificate);
    const auto back = certificate_from_json<double>(parse_json(certificate_to_json(c, a).dump()), a);
    EXPECT_EQ(verify_certificate(a, back).identity_residuals, verify_certificate(a, c).identity_residuals);
  }
}

TEST(CertificateJson, SchemaViolations)
{
  const auto a = weak_2x2();
  const auto j = certificate_to_json(Certificate<Q>(certificate_from_vector(a, weak_2x2_vector(), 1)), a);
  auto wrong_type = j;
  wrong_type["type"] = "mystery";
  EXPECT_THROW(certificate_from_json<Q>(wrong_type, a), ParseError);
  auto no_grams = j;
  no_grams.erase("grams");
  EXPECT_THROW(certificate_from_json<Q>(no_grams, a), ParseError);
  auto bad_basis = j;
  bad_basis["basis"]["monomials"] = Json::array({"x1", "1"});
  EXPECT_THROW(certificate_from_json<Q>(bad_basis, a), ParseError);
  auto bad_level = j;
  bad_level["level"] = 2;
  EXPECT_THROW(certificate_from_json<Q>(bad_level, a), ParseError);
  EXPECT_THROW(certificate_from_json<Q>(j, weak_3x3()), ParseError);
}

TEST(ReportJson, Fields)
{
  const auto a   = weak_2x2();
  const auto rep = verify_certificate(a, Certificate<Q>(certificate_from_vector(a, weak_2x2_vector(), 1)));
  const auto j   = report_to_json(rep);
  EXPECT_EQ(j.at("type"), "infeasibility");
  EXPECT_EQ(j.at("mode"), "exact");
  EXPECT_EQ(j.at("pass"), true);
  EXPECT_EQ(j.at("max_residual"), 0.0);
}
