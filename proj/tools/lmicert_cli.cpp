#include "lmicert/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace lmicert;

namespace {

struct Options
{
  double tol       = kFloatTol;
  std::string mode = "exact";
  std::uint64_t seed = 0;
  bool json          = false;
  bool timings       = false;
};

std::string digest(const std::string & path)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : read_file(path)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Display value: values within 1e-6 of an integer are shown as that integer.
std::string shown(double v)
{
  if (std::isinf(v)) { return v > 0 ? "+inf" : "-inf"; }
  if (std::abs(v - std::round(v)) < 1e-6) { v = std::round(v); }
  if (v == 0) { v = 0; }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

class Report
{
public:
  Report(std::string command, const Options & o) : opts_(o)
  {
    j_["command"] = std::move(command);
    j_["mode"]    = o.mode;
    j_["seed"]    = o.seed;
    j_["inputs"]  = Json::object();
    j_["outputs"] = Json::array();
  }

  void input(const std::string & path) { j_["inputs"][path] = "fnv1a64:" + digest(path); }
  void output(const std::string & path) { j_["outputs"].push_back(path); }
  void set(const std::string & key, Json v) { j_["result"][key] = std::move(v); }
  void status(const std::string & s) { j_["status"] = s; }

  template<class F>
  auto phase(const std::string & name, F && f)
  {
    const auto t0 = std::chrono::steady_clock::now();
    auto r        = f();
    timings_[name] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

  void line(const std::string & s) { text_.push_back(s); }

  void print() const
  {
    if (opts_.json) {
      Json out = j_;
      if (opts_.timings) { out["timings_ms"] = timings_; }
      std::cout << out.dump(2) << "\n";
      return;
    }
    for (const auto & s : text_) { std::cout << s << "\n"; }
    if (opts_.timings) {
      for (const auto & [k, v] : timings_.items()) { std::cout << "time " << k << ": " << v.get<double>() << " ms\n"; }
    }
  }

private:
  const Options & opts_;
  Json j_;
  Json timings_ = Json::object();
  std::vector<std::string> text_;
};

template<Scalar S>
SearchSettings settings(const Options & o)
{
  SearchSettings st;
  st.tol = o.tol;
  return st;
}

/// Serializes, reloads and re-verifies before anything reaches the disk.
template<Scalar S>
bool write_certificate(const std::string & path, const Certificate<S> & cert, const LinearPencil<S> & a, const Options & o,
                       Report & rep)
{
  const Json j        = certificate_to_json(cert, a);
  const auto reloaded = certificate_from_json<S>(parse_json(j.dump()), a);
  const auto check    = verify_certificate(a, reloaded, o.tol);
  if (!check.pass) {
    rep.line("certificate failed re-verification; not written");
    return false;
  }
  if (path.empty()) { return true; }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) { throw std::runtime_error("cannot write " + path); }
  rep.output(path);
  rep.line("certificate written to " + path);
  return true;
}

template<Scalar S>
Json vector_json(const Vec<S> & v)
{
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) { out.push_back(scalar_to_json(v(i))); }
  return out;
}

template<Scalar S>
int cmd_classify(const std::string & file, const std::string & out, const Options & o)
{
  Report rep("classify", o);
  rep.input(file);
  const auto a  = read_pencil<S>(file);
  const auto fc = rep.phase("classify", [&] { return classify(a, settings<S>(o)); });
  std::string tag = to_string(fc.tag);
  if (fc.level >= 0) { tag += ", level " + std::to_string(fc.level); }
  rep.line("class: " + tag);
  rep.status(to_string(fc.tag));
  rep.set("class", to_string(fc.tag));
  rep.set("level", fc.level);
  rep.set("lambda", fc.lambda);
  Json probes = Json::array();
  for (const auto & [eps, ok] : fc.eps_probes) {
    probes.push_back(Json{{"eps", eps}, {"feasible", ok}});
    rep.line("A + " + shown(eps) + " I: " + (ok ? "feasible" : "infeasible"));
  }
  rep.set("eps_probes", probes);
  if (fc.witness.size() > 0) {
    rep.set("witness", vector_json<double>(fc.witness));
    std::string w;
    for (Eigen::Index i = 0; i < fc.witness.size(); ++i) { w += (i ? " " : "") + shown(fc.witness(i)); }
    rep.line("witness x: [" + w + "]  min eigenvalue " + shown(fc.lambda));
  }
  if (!fc.note.empty()) {
    rep.line("note: " + fc.note);
    rep.set("note", fc.note);
  }
  if (fc.certificate && !write_certificate<S>(out, Certificate<S>(*fc.certificate), a, o, rep)) { return 2; }
  rep.print();
  return 0;
}

template<Scalar S>
int cmd_infeasible(const std::string & file, int max_level, const std::string & out, const Options & o)
{
  Report rep("certify-infeasible", o);
  rep.input(file);
  const auto a = read_pencil<S>(file);
  const int bound = max_level < 0 ? infeasibility_level_bound(a.size(), a.nvars()) : max_level;
  rep.line("searching levels 0.." + std::to_string(bound));
  const auto r = rep.phase("search", [&] { return infeasibility_level(a, bound, settings<S>(o)); });
  rep.status(to_string(r.status));
  rep.set("searched_up_to", r.searched_up_to);
  if (r.status != SearchStatus::Found) {
    rep.line("no infeasibility certificate found up to level " + std::to_string(r.searched_up_to));
    rep.print();
    return 1;
  }
  rep.line("infeasible: -1 in M_A^(" + std::to_string(r.certificate->level) + "), residual " +
           shown(r.certificate->verified_residual));
  rep.set("level", r.certificate->level);
  if (!write_certificate<S>(out, Certificate<S>(*r.certificate), a, o, rep)) { return 2; }
  rep.print();
  return 0;
}

template<Scalar S>
int cmd_lowdim(const std::string & file, const std::string & out, const Options & o)
{
  Report rep("certify-lowdim", o);
  rep.input(file);
  const auto a = read_pencil<S>(file);
  const auto r = rep.phase("search", [&] { return lowdim_certificate(a, settings<S>(o)); });
  rep.status(to_string(r.status));
  if (r.status != SearchStatus::Found) {
    rep.line("no low-dimensionality certificate found");
    rep.print();
    return 1;
  }
  const auto & c = *r.certificate;
  rep.line(std::string("S_A lies in the hyperplane ") + c.f.str() + " = 0" + (c.strict() ? " (strict: s = 0)" : ""));
  rep.set("f", c.f.str());
  rep.set("strict", c.strict());
  if (!write_certificate<S>(out, Certificate<S>(c), a, o, rep)) { return 2; }
  rep.print();
  return 0;
}

template<Scalar S>
int cmd_bounded(const std::string & file, int max_level, const std::string & out, const Options & o)
{
  Report rep("certify-bounded", o);
  rep.input(file);
  const auto a = read_pencil<S>(file);
  const auto r = rep.phase("search", [&] { return boundedness_certificate(a, max_level, settings<S>(o)); });
  rep.status(to_string(r.status));
  if (r.status != SearchStatus::Found) {
    rep.line("no boundedness certificate found up to level " + std::to_string(max_level));
    rep.print();
    return 1;
  }
  const auto & c = *r.certificate;
  rep.line("bounded: |x_i| <= " + format_scalar(c.bound) + " on S_A, level " + std::to_string(c.level));
  rep.set("bound", scalar_to_json(c.bound));
  rep.set("level", c.level);
  if (!write_certificate<S>(out, Certificate<S>(c), a, o, rep)) { return 2; }
  rep.print();
  return 0;
}

template<Scalar S>
int cmd_dual_sos(const std::string & file, const std::string & objective, const std::string & out, const Options & o)
{
  Report rep("dual-sos", o);
  rep.input(file);
  const auto a = read_pencil<S>(file);
  const SdpInstance<S> inst{a, parse_polynomial<S>(objective, a.nvars())};
  inst.validate();
  const auto g = rep.phase("solve", [&] { return gap_report(inst); });
  rep.line("P*=" + shown(g.primal.value) + " D*=" + shown(g.standard_dual.value) + " Dsos*=" + shown(g.sos_dual.value));
  rep.line(std::string("status: P ") + to_string(g.primal.status) + ", D " + to_string(g.standard_dual.status) + ", Dsos " +
           to_string(g.sos_dual.status));
  rep.line(std::string("Dsos attained: ") + (g.attained() ? "yes" : "no") + (g.exact_sos_dual ? " (exact point)" : ""));
  if (g.box_active) { rep.line("note: (P) minimizer touches the box |x_i| <= " + shown(kDefaultBox)); }
  rep.set("P", g.primal.value);
  rep.set("D", g.standard_dual.value);
  rep.set("Dsos", g.sos_dual.value);
  rep.set("attained", g.attained());
  rep.status(g.attained() ? "attained" : "not-attained");
  bool ok = true;
  if constexpr (is_exact_v<S>) {
    if (g.exact_sos_dual) { ok = write_certificate<S>(out, Certificate<S>(*g.exact_sos_dual), a, o, rep); }
  } else {
    if (g.extracted && g.extracted_verified) { ok = write_certificate<S>(out, Certificate<S>(*g.extracted), a, o, rep); }
  }
  rep.print();
  return ok ? 0 : 2;
}

template<Scalar S>
int cmd_verify(const std::string & file, const std::string & cert_file, const Options & o)
{
  Report rep("verify", o);
  rep.input(file);
  rep.input(cert_file);
  const auto a          = read_pencil<S>(file);
  const Json j          = parse_json(read_file(cert_file));
  if constexpr (!is_exact_v<S>) {
    if (j.contains("mode") && j.at("mode") == "exact") { rep.line("note: exact certificate checked in float mode"); }
  }
  VerificationReport r;
  try {
    r = verify_certificate(a, certificate_from_json<S>(j, a), o.tol);
  } catch (const ParseError & e) {
    r.cert_type = j.contains("type") && j.at("type").is_string() ? j.at("type").get<std::string>() : "unknown";
    r.mode      = mode_of<S>();
    r.tol       = o.tol;
    r.error     = e.what();
  }
  rep.set("report", report_to_json(r));
  rep.status(r.pass ? "pass" : "fail");
  rep.line(std::string(r.pass ? "PASS" : "FAIL") + " " + r.cert_type + " (" + (r.mode == Mode::Exact ? "exact" : "float") +
           "): max identity residual " + shown(r.max_residual()) + ", min PSD margin " + shown(r.min_margin()));
  if (!r.error.empty()) { rep.line("error: " + r.error); }
  if (!r.pass) {
    for (const auto & [k, v] : r.identity_residuals) {
      if (v > (r.mode == Mode::Exact ? 0.0 : o.tol)) { rep.line("  identity " + k + ": residual " + shown(v)); }
    }
    for (const auto & [k, v] : r.psd_margins) {
      if (v < (r.mode == Mode::Exact ? 0.0 : -o.tol)) { rep.line("  block " + k + ": min eigenvalue " + shown(v)); }
    }
  }
  rep.print();
  return r.pass ? 0 : 1;
}

template<Scalar S>
int cmd_functional(const std::string & basis_file, const std::string & values, const Options & o)
{
  Report rep("functional", o);
  rep.input(basis_file);
  const Json j = parse_json(read_file(basis_file));
  const int alpha = j.at("size").get<int>();
  std::vector<Mat<S>> basis;
  for (const auto & m : j.at("matrices")) { basis.push_back(matrix_from_json<S>(m, alpha, alpha)); }
  std::vector<S> vals;
  std::stringstream ss(values);
  for (std::string t; std::getline(ss, t, ',');) { vals.push_back(parse_scalar<S>(t)); }
  const auto r = rep.phase("solve", [&] { return functional_positivity(basis, vals); });
  rep.status(r.positive ? "positive" : "not-positive");
  rep.set("positive", r.positive);
  rep.set("Dsos", r.report.sos_dual.value);
  if (r.positive) {
    rep.line("positive: Dsos*=" + shown(r.report.sos_dual.value));
  } else {
    rep.line("not positive: witness R in the cone with f(R) < 0");
    rep.set("witness", matrix_to_json<double>(r.witness));
    for (Eigen::Index i = 0; i < r.witness.rows(); ++i) {
      std::string row;
      for (Eigen::Index c = 0; c < r.witness.cols(); ++c) { row += (c ? " " : "") + shown(r.witness(i, c)); }
      rep.line("  [" + row + "]");
    }
  }
  rep.print();
  return 0;
}

template<Scalar S>
int cmd_import(const std::string & file, const std::string & out, const Options & o)
{
  Report rep("import-sdpa", o);
  rep.input(file);
  const auto d = parse_sdpa<S>(read_file(file));
  Json j       = pencil_to_json(d.pencil);
  j["objective"] = d.objective.str();
  rep.line("pencil of size " + std::to_string(d.pencil.size()) + " in " + std::to_string(d.pencil.nvars()) +
           " variables, objective " + d.objective.str());
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::ofstream f(out);
  f << j.dump(2) << "\n";
  rep.output(out);
  rep.line("written to " + out);
  rep.print();
  return 0;
}

template<class F>
int dispatch(const Options & o, F && f)
{
  return o.mode == "exact" ? f(Rational{}) : f(0.0);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Certificates for linear matrix inequalities: infeasibility, low dimensionality, boundedness, sos duals"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--tol", o.tol, "float verification tolerance")->capture_default_str();
  app.add_option("--mode", o.mode, "arithmetic of certificates")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  app.add_option("--seed", o.seed, "seed recorded in reports")->capture_default_str();
  app.add_flag("--json", o.json, "print the report as JSON");
  app.add_flag("--timings", o.timings, "include per-phase timings");

  std::string pencil, out, cert, objective, basis, values;
  int max_level = -1;

  auto * classify_cmd = app.add_subcommand("classify", "feasibility type of A(x) >= 0");
  classify_cmd->add_option("pencil", pencil, "pencil JSON")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("-o,--out", out, "certificate output");

  auto * inf = app.add_subcommand("certify-infeasible", "smallest k with -1 in M_A^(k)");
  inf->add_option("pencil", pencil, "pencil JSON")->required()->check(CLI::ExistingFile);
  auto * ml = inf->add_option("--max-level", max_level, "highest level to try");
  inf->add_flag("--auto-bound", "use 2^min(alpha-1, n) - 1 (default)")->excludes(ml);
  inf->add_option("-o,--out", out, "certificate output");

  auto * low = app.add_subcommand("certify-lowdim", "linear f with -f^2 in M_A^(1)");
  low->add_option("pencil", pencil, "pencil JSON")->required()->check(CLI::ExistingFile);
  low->add_option("-o,--out", out, "certificate output");

  int bounded_level = 2;
  auto * bnd = app.add_subcommand("certify-bounded", "N -+ x_i in M_A^(k) for all i");
  bnd->add_option("pencil", pencil, "pencil JSON")->required()->check(CLI::ExistingFile);
  bnd->add_option("--max-level", bounded_level, "highest level to try")->capture_default_str();
  bnd->add_option("-o,--out", out, "certificate output");

  auto * dual = app.add_subcommand("dual-sos", "P*, D* and the sums of squares dual for min l(x)");
  dual->add_option("pencil", pencil, "pencil JSON")->required()->check(CLI::ExistingFile);
  dual->add_option("--objective", objective, "linear objective, e.g. x2")->required();
  dual->add_option("-o,--out", out, "sos-dual certificate output");

  auto * ver = app.add_subcommand("verify", "check a certificate against a pencil; exit 0 iff it passes");
  ver->add_option("pencil", pencil, "pencil JSON")->required()->check(CLI::ExistingFile);
  ver->add_option("certificate", cert, "certificate JSON")->required()->check(CLI::ExistingFile);

  auto * fun = app.add_subcommand("functional", "positivity of f on the PSD matrices in span(A_i)");
  fun->add_option("--basis", basis, "JSON {\"size\": a, \"matrices\": [A1, ...]}")->required()->check(CLI::ExistingFile);
  fun->add_option("--values", values, "f(A_i), comma separated")->required();

  auto * imp = app.add_subcommand("import-sdpa", "convert SDPA sparse data to pencil JSON");
  imp->add_option("file", pencil, ".dat-s file")->required()->check(CLI::ExistingFile);
  imp->add_option("-o,--out", out, "pencil JSON output (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(o, [&](auto tag) {
      using S = decltype(tag);
      if (*classify_cmd) { return cmd_classify<S>(pencil, out, o); }
      if (*inf) { return cmd_infeasible<S>(pencil, max_level, out, o); }
      if (*low) { return cmd_lowdim<S>(pencil, out, o); }
      if (*bnd) { return cmd_bounded<S>(pencil, bounded_level, out, o); }
      if (*dual) { return cmd_dual_sos<S>(pencil, objective, out, o); }
      if (*ver) { return cmd_verify<S>(pencil, cert, o); }
      if (*fun) { return cmd_functional<S>(basis, values, o); }
      return cmd_import<S>(pencil, out, o);
    });
  } catch (const ParseError & e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
