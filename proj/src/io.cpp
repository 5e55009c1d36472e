#include "lmicert/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace lmicert {

ParseError::ParseError(const std::string & what, int line, int column)
    : std::runtime_error(line > 0 ? what + " at line " + std::to_string(line) + ", column " + std::to_string(column)
                                  : what),
      line_(line), column_(column)
{
}

namespace {

std::pair<int, int> position(std::string_view text, std::size_t byte)
{
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const Json & field(const Json & j, const char * key)
{
  if (!j.is_object() || !j.contains(key)) { throw ParseError(std::string("missing field \"") + key + "\""); }
  return j.at(key);
}

int int_field(const Json & j, const char * key)
{
  const Json & v = field(j, key);
  if (!v.is_number_integer()) { throw ParseError(std::string("field \"") + key + "\" must be an integer"); }
  return v.get<int>();
}

std::string string_field(const Json & j, const char * key)
{
  const Json & v = field(j, key);
  if (!v.is_string()) { throw ParseError(std::string("field \"") + key + "\" must be a string"); }
  return v.get<std::string>();
}

Json basis_to_json(const MonomialBasis & b)
{
  Json mons = Json::array();
  for (const auto & m : b) { mons.push_back(m.str()); }
  return Json{{"degree", b.degree()}, {"monomials", mons}};
}

void check_basis(const Json & j, const MonomialBasis & want)
{
  if (!j.contains("basis")) { return; }
  const Json & b = j.at("basis");
  if (!b.is_object() || !b.contains("degree") || b.at("degree") != want.degree()) {
    throw ParseError("basis degree does not match level " + std::to_string(want.degree()));
  }
  if (b.contains("monomials") && b.at("monomials") != basis_to_json(want).at("monomials")) {
    throw ParseError("basis monomials are not vec_" + std::to_string(want.degree()) + " in degree-lex order");
  }
}

template<Scalar S>
Polynomial<S> polynomial_field(const Json & j, const char * key, int nvars)
{
  try {
    return parse_polynomial<S>(string_field(j, key), nvars);
  } catch (const ParseError &) {
    throw;
  } catch (const std::exception & e) {
    throw ParseError(std::string("field \"") + key + "\": " + e.what());
  }
}

template<Scalar S>
Json grams_to_json(const GramSos<S> & s, const GramSosMatrix<S> & big)
{
  return Json{{"s", matrix_to_json(s.g)}, {"S", matrix_to_json(big.g)}};
}

template<Scalar S>
std::pair<GramSos<S>, GramSosMatrix<S>> grams_from_json(const Json & g, int alpha, int nvars, int level)
{
  auto s   = GramSos<S>::zero(nvars, level);
  auto big = GramSosMatrix<S>::zero(alpha, nvars, level);
  s.g      = matrix_from_json<S>(field(g, "s"), s.g.rows(), s.g.cols());
  big.g    = matrix_from_json<S>(field(g, "S"), big.g.rows(), big.g.cols());
  return {std::move(s), std::move(big)};
}

template<Scalar S>
Json matrices_to_json(const std::vector<Mat<S>> & ms)
{
  Json out = Json::array();
  for (const auto & m : ms) { out.push_back(matrix_to_json(m)); }
  return out;
}

template<Scalar S>
std::vector<Mat<S>> matrices_from_json(const Json & j, std::size_t count, Eigen::Index rows, Eigen::Index cols)
{
  if (!j.is_array() || j.size() != count) { throw ParseError("expected a list of " + std::to_string(count) + " matrices"); }
  std::vector<Mat<S>> out;
  for (const auto & m : j) { out.push_back(matrix_from_json<S>(m, rows, cols)); }
  return out;
}

int level_field(const Json & j)
{
  const int k = int_field(j, "level");
  if (k < 0 || k > 64) { throw ParseError("level out of range"); }
  return k;
}

}  // namespace

Json parse_json(std::string_view text)
{
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error & e) {
    const auto [line, col] = position(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg        = e.what();
    const auto cut         = msg.find("parse error");
    throw ParseError("invalid JSON: " + (cut == std::string::npos ? msg : msg.substr(cut)), line, col);
  }
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw std::runtime_error("cannot open " + path); }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template<Scalar S>
S scalar_from_json(const Json & j)
{
  try {
    if (j.is_string()) { return parse_scalar<S>(j.get<std::string>()); }
    if (j.is_number_integer()) { return S(j.get<long>()); }
    if (j.is_number()) {
      if constexpr (is_exact_v<S>) {
        return Rational::parse(j.dump());
      } else {
        return j.get<double>();
      }
    }
  } catch (const std::invalid_argument & e) {
    throw ParseError(std::string("bad number: ") + e.what());
  }
  throw ParseError("expected a number or \"p/q\" string, got " + j.dump());
}

template<Scalar S>
Json scalar_to_json(const S & v)
{
  if constexpr (is_exact_v<S>) {
    return v.str();
  } else {
    return v;
  }
}

template<Scalar S>
Mat<S> matrix_from_json(const Json & j, Eigen::Index rows, Eigen::Index cols)
{
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ParseError("expected a matrix with " + std::to_string(rows) + " rows");
  }
  Mat<S> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json & row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("matrix row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) { m(i, c) = scalar_from_json<S>(row[static_cast<std::size_t>(c)]); }
  }
  return m;
}

template<Scalar S>
Json matrix_to_json(const Mat<S> & m)
{
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) { row.push_back(scalar_to_json(m(i, c))); }
    out.push_back(std::move(row));
  }
  return out;
}

template<Scalar S>
LinearPencil<S> pencil_from_json(const Json & j)
{
  const int n     = int_field(j, "nvars");
  const int alpha = int_field(j, "size");
  if (n < 0 || alpha < 1) { throw ParseError("need nvars >= 0 and size >= 1"); }
  const Json & ms = field(j, "matrices");
  if (!ms.is_array() || static_cast<int>(ms.size()) != n + 1) {
    throw ParseError("\"matrices\" must hold nvars + 1 = " + std::to_string(n + 1) + " matrices");
  }
  std::vector<Mat<S>> c;
  for (const auto & m : ms) { c.push_back(matrix_from_json<S>(m, alpha, alpha)); }
  return LinearPencil<S>(std::move(c));
}

template<Scalar S>
Json pencil_to_json(const LinearPencil<S> & a)
{
  Json ms = Json::array();
  for (const auto & m : a.coeffs()) { ms.push_back(matrix_to_json(m)); }
  return Json{{"nvars", a.nvars()}, {"size", a.size()}, {"matrices", ms}};
}

template<Scalar S>
SdpaData<S> parse_sdpa(std::string_view text)
{
  struct Line
  {
    std::vector<std::string> toks;
    int number;
  };
  // header lines may carry trailing comments ("2 = mDIM"); only leading numeric tokens count there
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) { continue; }
      if (lines.empty() && (line[first] == '"' || line[first] == '*')) { continue; }
      for (char & ch : line) {
        if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') { ch = ' '; }
      }
      std::istringstream ls(line);
      Line l{{}, ln};
      for (std::string t; ls >> t;) { l.toks.push_back(t); }
      lines.push_back(std::move(l));
    }
  }
  auto numeric = [](const std::string & t) {
    return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' || t[0] == '+' || t[0] == '.');
  };
  std::size_t li = 0;
  std::vector<std::pair<std::string, int>> header;
  auto need = [&](std::size_t count, const char * what) {
    header.clear();
    while (header.size() < count) {
      if (li >= lines.size()) { throw ParseError(std::string("unexpected end of SDPA data, expected ") + what); }
      const Line & l = lines[li++];
      std::size_t taken = 0;
      for (const auto & t : l.toks) {
        if (!numeric(t) || header.size() == count) { break; }
        header.emplace_back(t, l.number);
        ++taken;
      }
      if (taken == 0) { throw ParseError(std::string("expected ") + what, l.number, 1); }
    }
  };
  auto to_long = [](const std::pair<std::string, int> & t, const char * what) {
    try {
      std::size_t used = 0;
      const long v     = std::stol(t.first, &used);
      if (used != t.first.size()) { throw std::invalid_argument(t.first); }
      return v;
    } catch (const std::exception &) {
      throw ParseError(std::string("expected integer ") + what + ", got '" + t.first + "'", t.second, 1);
    }
  };
  auto to_scalar = [](const std::pair<std::string, int> & t, const char * what) {
    try {
      return parse_scalar<S>(t.first);
    } catch (const std::exception &) {
      throw ParseError(std::string("expected number ") + what + ", got '" + t.first + "'", t.second, 1);
    }
  };

  need(1, "m (number of variables)");
  const long m = to_long(header[0], "m");
  need(1, "number of blocks");
  const long nblocks = to_long(header[0], "number of blocks");
  if (m < 0 || nblocks < 1) { throw ParseError("need m >= 0 and at least one block"); }
  need(static_cast<std::size_t>(nblocks), "block sizes");
  std::vector<long> sizes;
  std::vector<int> offset;
  int total = 0;
  for (const auto & t : header) {
    const long sz = to_long(t, "block size");
    if (sz == 0) { throw ParseError("block size 0", t.second, 1); }
    sizes.push_back(sz);
    offset.push_back(total);
    total += static_cast<int>(std::abs(sz));
  }
  const int n = static_cast<int>(m);
  Polynomial<S> objective(n);
  if (n > 0) {
    need(static_cast<std::size_t>(n), "objective vector");
    for (int i = 0; i < n; ++i) { objective.add_term(Monomial::variable(n, i), to_scalar(header[static_cast<std::size_t>(i)], "objective entry")); }
  }
  std::vector<Mat<S>> f(static_cast<std::size_t>(n + 1), Mat<S>::Constant(total, total, S(0)));
  for (; li < lines.size(); ++li) {
    const Line & l = lines[li];
    if (l.toks.size() < 5) { throw ParseError("entry lines need: matrix block row column value", l.number, 1); }
    auto tok      = [&](std::size_t k) { return std::pair<std::string, int>{l.toks[k], l.number}; };
    const long mt = to_long(tok(0), "matrix number");
    const long bk = to_long(tok(1), "block number");
    const long i  = to_long(tok(2), "row");
    const long j  = to_long(tok(3), "column");
    const S v     = to_scalar(tok(4), "entry value");
    if (mt < 0 || mt > m) { throw ParseError("matrix number out of range", l.number, 1); }
    if (bk < 1 || bk > nblocks) { throw ParseError("block number out of range", l.number, 1); }
    const long sz = std::abs(sizes[static_cast<std::size_t>(bk - 1)]);
    if (i < 1 || j < 1 || i > sz || j > sz) { throw ParseError("entry index out of block range", l.number, 1); }
    if (sizes[static_cast<std::size_t>(bk - 1)] < 0 && i != j) { throw ParseError("off-diagonal entry in a diagonal block", l.number, 1); }
    const int r = offset[static_cast<std::size_t>(bk - 1)] + static_cast<int>(i) - 1;
    const int c = offset[static_cast<std::size_t>(bk - 1)] + static_cast<int>(j) - 1;
    auto & mat  = f[static_cast<std::size_t>(mt)];
    mat(r, c)   = v;
    mat(c, r)   = v;
  }
  f[0] = -f[0];
  return {LinearPencil<S>(std::move(f)), std::move(objective)};
}

template<Scalar S>
Json certificate_to_json(const Certificate<S> & cert, const LinearPencil<S> & a)
{
  Json j{{"type", certificate_type(cert)},
         {"mode", is_exact_v<S> ? "exact" : "float"},
         {"nvars", a.nvars()},
         {"size", a.size()}};
  const int n = a.nvars();
  if (const auto * c = std::get_if<InfeasibilityCertificate<S>>(&cert)) {
    j["level"]    = c->level;
    j["basis"]    = basis_to_json(c->s.basis);
    j["grams"]    = grams_to_json(c->s, c->big_s);
    j["residual"] = c->verified_residual;
  } else if (const auto * c = std::get_if<MembershipCertificate<S>>(&cert)) {
    j["level"]    = c->level;
    j["target"]   = c->target.str();
    j["basis"]    = basis_to_json(c->s.basis);
    j["grams"]    = grams_to_json(c->s, c->big_s);
    j["residual"] = c->verified_residual;
  } else if (const auto * c = std::get_if<LowDimCertificate<S>>(&cert)) {
    j["level"]    = 1;
    j["f"]        = c->f.str();
    j["strict"]   = c->strict();
    j["basis"]    = basis_to_json(c->s.basis);
    j["grams"]    = grams_to_json(c->s, c->big_s);
    j["residual"] = c->verified_residual;
  } else if (const auto * c = std::get_if<BoundednessCertificate<S>>(&cert)) {
    j["level"]   = c->level;
    j["bound"]   = scalar_to_json(c->bound);
    j["basis"]   = basis_to_json(MonomialBasis(n, c->level));
    Json members = Json::array();
    double worst = 0;
    for (const auto & m : c->members) {
      members.push_back(Json{{"target", m.target.str()}, {"grams", grams_to_json(m.s, m.big_s)}});
      worst = std::max(worst, m.verified_residual);
    }
    j["members"]  = members;
    j["residual"] = worst;
  } else if (const auto * c = std::get_if<SosDualSolution<S>>(&cert)) {
    std::vector<Mat<S>> si;
    for (const auto & g : c->si) { si.push_back(g.g); }
    j["level"]     = 1;
    j["objective"] = c->objective.str();
    j["a"]         = scalar_to_json(c->a);
    j["c"]         = scalar_to_json(c->c);
    j["basis"]     = basis_to_json(MonomialBasis(n, 1));
    j["grams"]     = Json{{"S", matrix_to_json(c->s)},
                          {"S_i", matrices_to_json(si)},
                          {"U", matrices_to_json(c->u)},
                          {"W", matrices_to_json(c->w)}};
  }
  return j;
}

template<Scalar S>
Certificate<S> certificate_from_json(const Json & j, const LinearPencil<S> & a)
{
  const int n     = a.nvars();
  const int alpha = a.size();
  if (int_field(j, "nvars") != n || int_field(j, "size") != alpha) {
    throw ParseError("certificate is for a pencil with nvars " + field(j, "nvars").dump() + " and size " +
                     field(j, "size").dump() + ", not " + std::to_string(n) + " and " + std::to_string(alpha));
  }
  const std::string type = string_field(j, "type");
  const double residual  = j.contains("residual") && j.at("residual").is_number() ? j.at("residual").get<double>() : 0.0;
  if (type == "infeasibility" || type == "membership") {
    const int k = level_field(j);
    check_basis(j, MonomialBasis(n, k));
    auto [s, big] = grams_from_json<S>(field(j, "grams"), alpha, n, k);
    if (type == "infeasibility") { return InfeasibilityCertificate<S>{k, std::move(s), std::move(big), residual}; }
    return MembershipCertificate<S>{polynomial_field<S>(j, "target", n), k, std::move(s), std::move(big), residual};
  }
  if (type == "lowdim") {
    check_basis(j, MonomialBasis(n, 1));
    auto [s, big] = grams_from_json<S>(field(j, "grams"), alpha, n, 1);
    return LowDimCertificate<S>{polynomial_field<S>(j, "f", n), std::move(s), std::move(big), residual};
  }
  if (type == "boundedness") {
    const int k = level_field(j);
    check_basis(j, MonomialBasis(n, k));
    BoundednessCertificate<S> b{scalar_from_json<S>(field(j, "bound")), k, {}};
    const Json & ms = field(j, "members");
    if (!ms.is_array()) { throw ParseError("\"members\" must be a list"); }
    for (const auto & m : ms) {
      auto [s, big] = grams_from_json<S>(field(m, "grams"), alpha, n, k);
      b.members.push_back({polynomial_field<S>(m, "target", n), k, std::move(s), std::move(big), residual});
    }
    return b;
  }
  if (type == "sos-dual") {
    check_basis(j, MonomialBasis(n, 1));
    const auto lay  = sos_dual_layout(alpha, n);
    const Json & g  = field(j, "grams");
    const auto nn   = static_cast<std::size_t>(n);
    SosDualSolution<S> d{polynomial_field<S>(j, "objective", n), scalar_from_json<S>(field(j, "a")),
                         scalar_from_json<S>(field(j, "c")), matrix_from_json<S>(field(g, "S"), alpha, alpha), {}, {}, {}};
    for (auto & m : matrices_from_json<S>(field(g, "S_i"), nn, alpha * lay.s1, alpha * lay.s1)) {
      d.si.push_back({alpha, MonomialBasis(n, 1), std::move(m)});
    }
    d.u = matrices_from_json<S>(field(g, "U"), nn, lay.s1, lay.s1);
    d.w = matrices_from_json<S>(field(g, "W"), nn, lay.s2, lay.s1);
    return d;
  }
  throw ParseError("unknown certificate type \"" + type + "\"");
}

Json report_to_json(const VerificationReport & r)
{
  Json ids = Json::object();
  for (const auto & [k, v] : r.identity_residuals) { ids[k] = v; }
  Json psd = Json::object();
  for (const auto & [k, v] : r.psd_margins) { psd[k] = v; }
  Json j{{"type", r.cert_type},     {"mode", r.mode == Mode::Exact ? "exact" : "float"},
         {"tol", r.tol},            {"pass", r.pass},
         {"max_residual", r.max_residual()}, {"min_psd_margin", r.min_margin()},
         {"identity_residuals", ids}, {"psd_margins", psd}};
  if (!r.error.empty()) { j["error"] = r.error; }
  return j;
}

#define LMICERT_INSTANTIATE(S)                                                                                           \
  template S scalar_from_json<S>(const Json &);                                                                        \
  template Json scalar_to_json(const S &);                                                                             \
  template Mat<S> matrix_from_json<S>(const Json &, Eigen::Index, Eigen::Index);                                       \
  template Json matrix_to_json(const Mat<S> &);                                                                        \
  template LinearPencil<S> pencil_from_json<S>(const Json &);                                                          \
  template Json pencil_to_json(const LinearPencil<S> &);                                                               \
  template SdpaData<S> parse_sdpa<S>(std::string_view);                                                                \
  template Json certificate_to_json(const Certificate<S> &, const LinearPencil<S> &);                                  \
  template Certificate<S> certificate_from_json(const Json &, const LinearPencil<S> &);

LMICERT_INSTANTIATE(double)
LMICERT_INSTANTIATE(Rational)

#undef LMICERT_INSTANTIATE

}  // namespace lmicert
