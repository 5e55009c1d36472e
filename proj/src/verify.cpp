#include "lmicert/verify.hpp"

#include <limits>

namespace lmicert {

namespace {

template<Scalar S>
struct Checker
{
  VerificationReport & r;
  double tol;

  void identity(const std::string & label, const Polynomial<S> & residual)
  {
    double v = residual.max_abs_coeff();
    if constexpr (is_exact_v<S>) {
      if (!residual.is_zero()) {
        v = std::max(v, std::numeric_limits<double>::denorm_min());
        r.pass = false;
      }
    } else {
      if (!(v <= tol)) { r.pass = false; }
    }
    r.identity_residuals.emplace_back(label, v);
  }

  void psd(const std::string & label, const Mat<S> & m)
  {
    if (m.rows() != m.cols()) {
      fail(label + " is not square");
      return;
    }
    double margin = min_eigenvalue(convert_matrix<double, S>(m));
    if constexpr (is_exact_v<S>) {
      const bool ok = m == m.transpose() && is_psd_exact(m);
      margin        = ok ? std::max(margin, 0.0) : std::min(margin, -std::numeric_limits<double>::denorm_min());
      if (!ok) { r.pass = false; }
    } else {
      if (max_abs<double>(Mat<double>(m - m.transpose())) > tol) { fail(label + " is not symmetric"); }
      if (!(margin >= -tol)) { r.pass = false; }
    }
    r.psd_margins.emplace_back(label, margin);
  }

  void fail(const std::string & why)
  {
    r.pass = false;
    if (!r.error.empty()) { r.error += "; "; }
    r.error += why;
  }
};

template<Scalar S>
bool gram_fits(const GramSos<S> & g, int nvars)
{
  return g.basis.nvars() == nvars && g.g.rows() == g.basis.size() && g.g.cols() == g.basis.size();
}

template<Scalar S>
bool gram_fits(const GramSosMatrix<S> & g, int alpha, int nvars)
{
  const int d = alpha * g.basis.size();
  return g.size == alpha && g.basis.nvars() == nvars && g.g.rows() == d && g.g.cols() == d;
}

template<Scalar S>
void check_membership(Checker<S> & ck, const LinearPencil<S> & a, const Polynomial<S> & f, const GramSos<S> & s,
                      const GramSosMatrix<S> & big_s, const std::string & label, const std::string & suffix = {})
{
  if (!gram_fits(s, a.nvars()) || !gram_fits(big_s, a.size(), a.nvars()) || f.nvars() != a.nvars()) {
    ck.fail("dimension mismatch in " + label);
    return;
  }
  ck.identity(label, membership_residual(a, f, s, big_s));
  ck.psd("s" + suffix, s.g);
  ck.psd("S" + suffix, big_s.g);
}

template<Scalar S>
Polynomial<S> bilinear(const Mat<S> & w, const MonomialBasis & left, const MonomialBasis & right)
{
  Polynomial<S> p(left.nvars());
  for (int i = 0; i < left.size(); ++i) {
    for (int j = 0; j < right.size(); ++j) { p.add_term(left[i] * right[j], w(i, j)); }
  }
  return p;
}

template<Scalar S>
void check_sos_dual(Checker<S> & ck, const LinearPencil<S> & a, const SosDualSolution<S> & d)
{
  const int n     = a.nvars();
  const int alpha = a.size();
  const MonomialBasis b1(n, 1), b2(n, 2);
  bool ok = d.objective.nvars() == n && d.s.rows() == alpha && d.s.cols() == alpha && static_cast<int>(d.si.size()) == n &&
            static_cast<int>(d.u.size()) == n && static_cast<int>(d.w.size()) == n;
  for (int i = 0; ok && i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    ok           = gram_fits(d.si[k], alpha, n) && d.si[k].basis.degree() == 1 && d.u[k].rows() == b1.size() &&
         d.u[k].cols() == b1.size() && d.w[k].rows() == b2.size() && d.w[k].cols() == b1.size();
  }
  if (!ok) {
    ck.fail("sos-dual data does not match the pencil dimensions");
    return;
  }
  if (d.objective.degree() > 1) { ck.fail("objective is not linear"); }
  for (int i = 0; i < n; ++i) {
    const auto k    = static_cast<std::size_t>(i);
    Polynomial<S> r = expand_sos(GramSos<S>{b1, d.u[k]}) + trace_pair(a, expand_sos_matrix(d.si[k]));
    if (i > 0) { r += bilinear(d.w[k - 1], b2, b1); }
    ck.identity("step " + std::to_string(i + 1), r);
  }
  const GramSosMatrix<S> constant{alpha, MonomialBasis(n, 0), d.s};
  Polynomial<S> last = d.objective - Polynomial<S>::constant(n, d.a + d.c) - trace_pair(a, expand_sos_matrix(constant));
  if (n > 0) { last += bilinear(d.w[static_cast<std::size_t>(n - 1)], b2, b1); }
  ck.identity("objective", last);
  ck.psd("S", d.s);
  ck.psd("c", Mat<S>::Constant(1, 1, d.c));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    ck.psd("S_" + std::to_string(i + 1), d.si[k].g);
    const int s2 = b2.size(), s1 = b1.size();
    Mat<S> schur(s2 + s1, s2 + s1);
    schur.topLeftCorner(s2, s2)     = Mat<S>::Identity(s2, s2);
    schur.topRightCorner(s2, s1)    = d.w[k];
    schur.bottomLeftCorner(s1, s2)  = d.w[k].transpose();
    schur.bottomRightCorner(s1, s1) = d.u[k];
    ck.psd("U_" + std::to_string(i + 1) + " - W^T W", schur);
  }
}

template<Scalar S>
Polynomial<S> bound_target(const S & n0, int nvars, int i, int sign)
{
  Polynomial<S> t = Polynomial<S>::constant(nvars, n0);
  t.add_term(Monomial::variable(nvars, i), S(sign));
  return t;
}

template<Scalar S>
std::optional<std::vector<Mat<Rational>>> round_membership(const LinearPencil<Rational> & a, const Polynomial<Rational> & f,
                                                           int level, const GramSos<S> & s, const GramSosMatrix<S> & big_s,
                                                           std::int64_t den)
{
  const MembershipProblem<Rational> mp{a, f, level};
  const auto ids = membership_identities(mp);
  const int sk   = basis_vector(a.nvars(), level).size();
  if (s.g.rows() != sk || big_s.g.rows() != a.size() * sk) { return std::nullopt; }
  const std::vector<int> sizes{sk, a.size() * sk};
  if (auto g = round_onto_identities(sizes, ids, {convert_matrix<double, S>(s.g), convert_matrix<double, S>(big_s.g)}, den)) {
    return g;
  }
  // singular Grams sit on a face that plain rounding leaves
  return exact_point(sizes, ids);
}

Polynomial<Rational> approximate_polynomial(const Polynomial<double> & p, std::int64_t den)
{
  Polynomial<Rational> r(p.nvars());
  for (const auto & [m, c] : p.terms()) { r.add_term(m, Rational::approximate(c, den)); }
  return r;
}

}  // namespace

const char * certificate_type(std::size_t variant_index)
{
  static const char * names[] = {"infeasibility", "lowdim", "boundedness", "sos-dual", "membership"};
  return variant_index < 5 ? names[variant_index] : "unknown";
}

double VerificationReport::max_residual() const
{
  double v = 0;
  for (const auto & [l, r] : identity_residuals) { v = std::max(v, r); }
  return v;
}

double VerificationReport::min_margin() const
{
  double v = std::numeric_limits<double>::infinity();
  for (const auto & [l, m] : psd_margins) { v = std::min(v, m); }
  return v;
}

template<Scalar S>
Polynomial<S> membership_residual(const LinearPencil<S> & a, const Polynomial<S> & f, const GramSos<S> & s,
                                  const GramSosMatrix<S> & big_s)
{
  return expand_sos(s) + trace_pair(a, expand_sos_matrix(big_s)) - f;
}

template<Scalar S>
VerificationReport verify_certificate(const LinearPencil<S> & a, const Certificate<S> & cert, double tol)
{
  VerificationReport r;
  r.cert_type = certificate_type(cert);
  r.mode      = mode_of<S>();
  r.tol       = is_exact_v<S> ? 0.0 : tol;
  r.pass      = true;
  Checker<S> ck{r, r.tol};
  const int n = a.nvars();
  try {
    if (const auto * c = std::get_if<InfeasibilityCertificate<S>>(&cert)) {
      check_membership(ck, a, Polynomial<S>::constant(n, S(-1)), c->s, c->big_s, "-1 = s + tr(AS)");
    } else if (const auto * c = std::get_if<MembershipCertificate<S>>(&cert)) {
      check_membership(ck, a, c->target, c->s, c->big_s, c->target.str() + " = s + tr(AS)");
    } else if (const auto * c = std::get_if<LowDimCertificate<S>>(&cert)) {
      if (c->f.nvars() != n || c->f.degree() > 1) {
        ck.fail("f must be a linear polynomial in the pencil's variables");
      } else {
        if constexpr (is_exact_v<S>) {
          if (c->f.is_zero()) { ck.fail("f is zero"); }
        } else {
          if (c->f.max_abs_coeff() < 1e-6) { ck.fail("f is numerically zero"); }
        }
        check_membership(ck, a, Polynomial<S>(-(c->f * c->f)), c->s, c->big_s, "-f^2 = s + tr(AS)");
      }
    } else if (const auto * c = std::get_if<BoundednessCertificate<S>>(&cert)) {
      if (c->members.size() != static_cast<std::size_t>(2 * n)) {
        ck.fail("expected " + std::to_string(2 * n) + " memberships");
      } else {
        if (c->bound < S(0)) { ck.fail("bound is negative"); }
        for (int i = 0; i < n; ++i) {
          for (int sg = 0; sg < 2; ++sg) {
            const auto & m       = c->members[static_cast<std::size_t>(2 * i + sg)];
            const auto target    = bound_target(c->bound, n, i, sg == 0 ? 1 : -1);
            const std::string nm = std::string("N") + (sg == 0 ? "+" : "-") + "x" + std::to_string(i + 1);
            if (!(m.target == target)) { ck.fail(nm + " target does not match the bound"); }
            check_membership(ck, a, target, m.s, m.big_s, nm, " " + nm);
          }
        }
      }
    } else if (const auto * c = std::get_if<SosDualSolution<S>>(&cert)) {
      check_sos_dual(ck, a, *c);
    }
  } catch (const std::exception & e) {
    ck.fail(e.what());
  }
  return r;
}

std::optional<Certificate<Rational>> rationalize(const LinearPencil<Rational> & a, const Certificate<double> & cert,
                                                 std::int64_t den)
{
  const int n = a.nvars();
  std::optional<Certificate<Rational>> out;
  if (const auto * c = std::get_if<InfeasibilityCertificate<double>>(&cert)) {
    if (auto g = round_membership(a, Polynomial<Rational>::constant(n, Rational(-1)), c->level, c->s, c->big_s, den)) {
      out = InfeasibilityCertificate<Rational>{c->level, {c->s.basis, (*g)[0]}, {a.size(), c->big_s.basis, (*g)[1]}, 0.0};
    }
  } else if (const auto * c = std::get_if<MembershipCertificate<double>>(&cert)) {
    const auto f = approximate_polynomial(c->target, den);
    if (auto g = round_membership(a, f, c->level, c->s, c->big_s, den)) {
      out = MembershipCertificate<Rational>{f, c->level, {c->s.basis, (*g)[0]}, {a.size(), c->big_s.basis, (*g)[1]}, 0.0};
    }
  } else if (const auto * c = std::get_if<LowDimCertificate<double>>(&cert)) {
    const auto f = approximate_polynomial(c->f, den);
    if (!f.is_zero()) {
      if (auto g = round_membership(a, Polynomial<Rational>(-(f * f)), 1, c->s, c->big_s, den)) {
        out = LowDimCertificate<Rational>{f, {c->s.basis, (*g)[0]}, {a.size(), c->big_s.basis, (*g)[1]}, 0.0};
      }
    }
  } else if (const auto * c = std::get_if<BoundednessCertificate<double>>(&cert)) {
    BoundednessCertificate<Rational> b{Rational::approximate(c->bound, den), c->level, {}};
    for (std::size_t j = 0; j < c->members.size(); ++j) {
      const auto & m = c->members[j];
      const auto t   = bound_target(b.bound, n, static_cast<int>(j / 2), j % 2 == 0 ? 1 : -1);
      auto g         = round_membership(a, t, m.level, m.s, m.big_s, den);
      if (!g) { return std::nullopt; }
      b.members.push_back({t, m.level, {m.s.basis, (*g)[0]}, {a.size(), m.big_s.basis, (*g)[1]}, 0.0});
    }
    out = std::move(b);
  } else if (const auto * c = std::get_if<SosDualSolution<double>>(&cert)) {
    const SdpInstance<Rational> inst{a, approximate_polynomial(c->objective, den)};
    const Rational av = Rational::approximate(c->a, den);
    const auto ids    = sos_dual_identities(inst, av);
    const auto lay    = sos_dual_layout(a.size(), n);
    std::vector<int> sizes(static_cast<std::size_t>(lay.num_blocks()));
    std::vector<Mat<double>> x(sizes.size());
    x[0] = c->s;
    x[1] = Mat<double>::Constant(1, 1, c->c);
    for (int i = 0; i < n; ++i) {
      const auto k                                    = static_cast<std::size_t>(i);
      x[static_cast<std::size_t>(lay.block_si(i))]    = c->si[k].g;
      Mat<double> b(lay.s2 + lay.s1, lay.s2 + lay.s1);
      b << Mat<double>::Identity(lay.s2, lay.s2), c->w[k], c->w[k].transpose(), c->u[k];
      x[static_cast<std::size_t>(lay.block_schur(i))] = b;
    }
    for (std::size_t k = 0; k < x.size(); ++k) { sizes[k] = static_cast<int>(x[k].rows()); }
    auto g = round_onto_identities(sizes, ids, x, den);
    if (!g) { g = exact_point(sizes, ids); }
    if (!g) { return std::nullopt; }
    SosDualSolution<Rational> d{inst.objective, av, (*g)[1](0, 0), (*g)[0], {}, {}, {}};
    for (int i = 0; i < n; ++i) {
      const auto & b = (*g)[static_cast<std::size_t>(lay.block_schur(i))];
      d.si.push_back({a.size(), MonomialBasis(n, 1), (*g)[static_cast<std::size_t>(lay.block_si(i))]});
      d.w.push_back(b.topRightCorner(lay.s2, lay.s1));
      d.u.push_back(b.bottomRightCorner(lay.s1, lay.s1));
    }
    out = std::move(d);
  }
  if (out && !verify_certificate(a, *out).pass) { return std::nullopt; }
  return out;
}

template<Scalar S>
MembershipResult<S> check_eps_membership(const LinearPencil<S> & a, const Polynomial<S> & f, const S & eps, int level,
                                         const SearchSettings & st)
{
  if (!(eps >= S(0))) { throw std::invalid_argument("eps must be >= 0"); }
  if (f.degree() > 1) { throw std::invalid_argument("f must be linear"); }
  return find_membership(a, Polynomial<S>(f + Polynomial<S>::constant(f.nvars(), eps)), level, st);
}

#define LMICERT_INSTANTIATE(S)                                                                                            \
  template Polynomial<S> membership_residual(const LinearPencil<S> &, const Polynomial<S> &, const GramSos<S> &,        \
                                             const GramSosMatrix<S> &);                                                 \
  template VerificationReport verify_certificate(const LinearPencil<S> &, const Certificate<S> &, double);              \
  template MembershipResult<S> check_eps_membership(const LinearPencil<S> &, const Polynomial<S> &, const S &, int,     \
                                                    const SearchSettings &);

LMICERT_INSTANTIATE(double)
LMICERT_INSTANTIATE(Rational)

#undef LMICERT_INSTANTIATE

}  // namespace lmicert
