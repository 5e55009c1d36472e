#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace lmicert;
using namespace lmicert::testing;

namespace {

struct Run
{
  int code = -1;
  std::string out;
};

Run lmicert_run(const std::string & args)
{
  const std::string cmd = std::string(LMICERT_CLI) + " " + args + " 2>&1";
  Run r;
  FILE * p = popen(cmd.c_str(), "r");
  if (!p) { return r; }
  char buf[4096];
  while (const std::size_t got = fread(buf, 1, sizeof(buf), p)) { r.out.append(buf, got); }
  const int status = pclose(p);
  r.code           = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string pencil(const std::string & name) { return data_path("pencils/" + name + ".json"); }

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = std::filesystem::temp_directory_path() / ("lmicert_cli_" + std::to_string(getpid()) + "_" +
                                                     ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string tmp(const std::string & name) const { return (dir_ / name).string(); }

private:
  std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, VerifyShippedCertificate)
{
  const auto r = lmicert_run("verify " + pencil("weak_2x2") + " " + data_path("certificates/weak_2x2_infeasibility.json"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST_F(Cli, VerifyPerturbedCertificate)
{
  auto j = parse_json(read_file(data_path("certificates/weak_2x2_infeasibility.json")));
  j["grams"]["S"][0][0] = "1001/2000";
  std::ofstream(tmp("bad.json")) << j.dump(2);
  const auto r = lmicert_run("verify " + pencil("weak_2x2") + " " + tmp("bad.json"));
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("residual"), std::string::npos);
}

TEST_F(Cli, VerifyWrongPencil)
{
  const auto r = lmicert_run("verify " + pencil("weak_3x3") + " " + data_path("certificates/weak_2x2_infeasibility.json"));
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);

  // same shape, different pencil: the identity residual is what fails
  std::ofstream(tmp("scaled.json")) << pencil_to_json(affine_change<Q>(weak_2x2(), Mat<Q>::Constant(1, 1, Q(2)), Vec<Q>::Constant(1, Q(0)))).dump();
  const auto s = lmicert_run("--json verify " + tmp("scaled.json") + " " + data_path("certificates/weak_2x2_infeasibility.json"));
  EXPECT_EQ(s.code, 1) << s.out;
  const auto j = parse_json(s.out);
  EXPECT_GT(j.at("result").at("report").at("max_residual").get<double>(), 0.0);
}

TEST_F(Cli, Classify)
{
  const auto r = lmicert_run("classify " + pencil("weak_2x2"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("class: weakly infeasible, level 1"), std::string::npos) << r.out;
  EXPECT_NE(lmicert_run("classify " + pencil("single_point")).out.find("class: weakly feasible"), std::string::npos);
  EXPECT_NE(lmicert_run("--mode float classify " + pencil("cube")).out.find("class: strongly feasible"), std::string::npos);
}

TEST_F(Cli, CertifyInfeasibleWritesAVerifiedCertificate)
{
  const auto r = lmicert_run("certify-infeasible " + pencil("weak_3x3") + " -o " + tmp("c.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("M_A^(2)"), std::string::npos) << r.out;
  EXPECT_EQ(lmicert_run("verify " + pencil("weak_3x3") + " " + tmp("c.json")).code, 0);
  EXPECT_EQ(lmicert_run("certify-infeasible --max-level 1 " + pencil("weak_3x3")).code, 1);
}

TEST_F(Cli, CertifyLowdimAndBounded)
{
  const auto ld = lmicert_run("certify-lowdim " + pencil("ray_3x3") + " -o " + tmp("ld.json"));
  ASSERT_EQ(ld.code, 0) << ld.out;
  EXPECT_NE(ld.out.find("hyperplane x1 = 0"), std::string::npos) << ld.out;
  EXPECT_EQ(lmicert_run("verify " + pencil("ray_3x3") + " " + tmp("ld.json")).code, 0);

  const auto b = lmicert_run("certify-bounded --max-level 0 " + pencil("cube"));
  EXPECT_EQ(b.code, 0) << b.out;
  EXPECT_NE(b.out.find("|x_i| <= 1 "), std::string::npos) << b.out;
  EXPECT_EQ(lmicert_run("certify-bounded " + pencil("line")).code, 1);
}

TEST_F(Cli, DualSos)
{
  const auto r = lmicert_run("dual-sos " + pencil("gap_alpha_1") + " --objective x2 -o " + tmp("d.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("P*=0 D*=-1 Dsos*=0"), std::string::npos) << r.out;
  EXPECT_EQ(lmicert_run("verify " + pencil("gap_alpha_1") + " " + tmp("d.json")).code, 0);
}

TEST_F(Cli, Functional)
{
  const auto r = lmicert_run("functional --basis " + pencil("functional_diag") + " --values 1,-1");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("not positive"), std::string::npos);
  EXPECT_NE(lmicert_run("functional --basis " + pencil("functional_diag") + " --values 1,2").out.find("positive"),
            std::string::npos);
}

TEST_F(Cli, ImportSdpa)
{
  const auto r = lmicert_run("import-sdpa " + data_path("sdpa/small.dat-s") + " -o " + tmp("p.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = parse_json(read_file(tmp("p.json")));
  EXPECT_EQ(j.at("objective"), "x2 + x1");
  const auto d = lmicert_run("--mode float dual-sos " + tmp("p.json") + " --objective \"x1 + x2\"");
  EXPECT_NE(d.out.find("P*=3 D*=3 Dsos*=3"), std::string::npos) << d.out;
}

TEST_F(Cli, InputErrors)
{
  std::ofstream(tmp("broken.json")) << "{\n  \"nvars\": 1,\n  \"size\": ]\n}\n";
  const auto r = lmicert_run("classify " + tmp("broken.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
  EXPECT_EQ(lmicert_run("classify " + tmp("missing.json")).code, 2);
  EXPECT_NE(lmicert_run("no-such-command").code, 0);
}

TEST_F(Cli, ReportsAreStable)
{
  for (const std::string args : {"--json classify " + pencil("weak_2x2"), "--json certify-infeasible " + pencil("weak_3x3"),
                                 "--json dual-sos " + pencil("gap_alpha_half") + " --objective x2"}) {
    const auto a = lmicert_run(args);
    const auto b = lmicert_run(args);
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_NO_THROW(parse_json(a.out)) << a.out;
  }
}

TEST_F(Cli, TimingsOnlyOnRequest)
{
  EXPECT_EQ(lmicert_run("--json classify " + pencil("weak_2x2")).out.find("timings_ms"), std::string::npos);
  EXPECT_NE(lmicert_run("--json --timings classify " + pencil("weak_2x2")).out.find("timings_ms"), std::string::npos);
}
