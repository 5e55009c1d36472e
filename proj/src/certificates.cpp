#include "lmicert/certificates.hpp"

#include "lmicert/verify.hpp"

#include <cmath>

namespace lmicert {

namespace {

// the solver found a point with this relative residual or better: the query is worth an exact attempt
constexpr double kNearFeasible = 1e-4;

bool near_feasible(const SdpSolution & sol, std::size_t blocks)
{
  return sol.primal.size() == blocks && sol.status != SdpStatus::PrimalInfeasible &&
         sol.status != SdpStatus::DualInfeasible && sol.primal_residual <= kNearFeasible;
}

SparseSym sparse_identity(int n) { return Mat<double>::Identity(n, n).sparseView(); }

template<Scalar S>
double spectral_norm(const Mat<S> & m)
{
  const Mat<double> f = convert_matrix<double, S>(m);
  if (f.size() == 0) { return 0.0; }
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(f, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

template<Scalar S>
Polynomial<S> bound_target(const S & n0, int nvars, int i, int sign)
{
  Polynomial<S> t = Polynomial<S>::constant(nvars, n0);
  t.add_term(Monomial::variable(nvars, i), S(sign));
  return t;
}

}  // namespace

const char * to_string(SearchStatus s)
{
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::NotFound: return "not-found";
    case SearchStatus::Unknown: return "unknown";
  }
  return "?";
}

const char * to_string(FeasibilityTag t)
{
  switch (t) {
    case FeasibilityTag::StronglyFeasible: return "strongly feasible";
    case FeasibilityTag::WeaklyFeasible: return "weakly feasible";
    case FeasibilityTag::WeaklyInfeasible: return "weakly infeasible";
    case FeasibilityTag::StronglyInfeasible: return "strongly infeasible";
    case FeasibilityTag::Unknown: return "unknown";
  }
  return "?";
}

template<Scalar S>
MembershipResult<S> find_membership(const LinearPencil<S> & a, const Polynomial<S> & f, int level, const SearchSettings & st)
{
  const MembershipProblem<S> mp{a, f, level};
  const SdpProblem p    = assemble_membership_sdp(mp);
  const SdpSolution sol = solve(p, st.sdp);
  MembershipResult<S> r;
  r.solver = sol.status;
  if (!near_feasible(sol, 2)) {
    r.status = sol.status == SdpStatus::IterationLimit ? SearchStatus::Unknown : SearchStatus::NotFound;
    return r;
  }
  const int n  = a.nvars();
  const int sk = basis_vector(n, level).size();
  MembershipCertificate<S> cert{f, level, GramSos<S>::zero(n, level), GramSosMatrix<S>::zero(a.size(), n, level), 0.0};
  if constexpr (is_exact_v<S>) {
    const auto x = exact_point({sk, a.size() * sk}, membership_identities(mp), st.rounding);
    if (!x) {
      r.status = SearchStatus::Unknown;
      return r;
    }
    cert.s.g     = (*x)[0];
    cert.big_s.g = (*x)[1];
  } else {
    cert.s.g     = sol.primal[kSosBlock];
    cert.big_s.g = sol.primal[kMatrixBlock];
  }
  const auto rep = verify_certificate<S>(a, Certificate<S>(cert), st.tol);
  if (!rep.pass) {
    r.status = SearchStatus::Unknown;
    return r;
  }
  cert.verified_residual = rep.max_residual();
  r.status               = SearchStatus::Found;
  r.certificate          = std::move(cert);
  return r;
}

template<Scalar S>
InfeasibilityResult<S> check_strong_infeasibility(const LinearPencil<S> & a, const SearchSettings & st)
{
  return infeasibility_level(a, 0, st, 0);
}

int infeasibility_level_bound(int alpha, int nvars)
{
  const int e = std::max(0, std::min(alpha - 1, nvars));
  return (1 << e) - 1;
}

template<Scalar S>
InfeasibilityResult<S> infeasibility_level(const LinearPencil<S> & a, int max_level, const SearchSettings & st, int min_level)
{
  const int bound = max_level < 0 ? infeasibility_level_bound(a.size(), a.nvars()) : max_level;
  InfeasibilityResult<S> r;
  bool unknown = false;
  for (int k = std::max(0, min_level); k <= bound; ++k) {
    auto m           = find_membership(a, Polynomial<S>::constant(a.nvars(), S(-1)), k, st);
    r.searched_up_to = k;
    if (m.status == SearchStatus::Found) {
      auto & c      = *m.certificate;
      r.status      = SearchStatus::Found;
      r.certificate = InfeasibilityCertificate<S>{k, std::move(c.s), std::move(c.big_s), c.verified_residual};
      return r;
    }
    unknown = unknown || m.status == SearchStatus::Unknown;
  }
  r.status = unknown && bound == 0 ? SearchStatus::Unknown : SearchStatus::NotFound;
  return r;
}

// Stated over the dual variables y = (x, lambda): Z = A(x) - lambda I and the box slacks R -+ x_i.
template<Scalar S>
EigenvalueBound max_min_eigenvalue(const LinearPencil<S> & a, double radius, const SdpSettings & st)
{
  const int n     = a.nvars();
  const int alpha = a.size();
  SdpProblem p;
  const int bx = p.add_block(alpha, "A(x) - lambda I");
  p.objective[static_cast<std::size_t>(bx)] = convert_matrix<double, S>(a.coeff(0)).sparseView();
  for (int i = 0; i < n; ++i) {
    const int up = p.add_block(1, "R - x" + std::to_string(i + 1));
    const int dn = p.add_block(1, "R + x" + std::to_string(i + 1));
    p.objective[static_cast<std::size_t>(up)] = Mat<double>::Constant(1, 1, radius).sparseView();
    p.objective[static_cast<std::size_t>(dn)] = Mat<double>::Constant(1, 1, radius).sparseView();
    SdpConstraint c;
    c.label = "x" + std::to_string(i + 1);
    c.terms.emplace_back(bx, SparseSym((-convert_matrix<double, S>(a.coeff(i + 1))).sparseView()));
    c.terms.emplace_back(up, sparse_identity(1));
    c.terms.emplace_back(dn, SparseSym(-sparse_identity(1)));
    p.constraints.push_back(std::move(c));
  }
  SdpConstraint lam;
  lam.label = "lambda";
  lam.rhs   = 1;
  lam.terms.emplace_back(bx, sparse_identity(alpha));
  p.constraints.push_back(std::move(lam));

  const SdpSolution sol = solve(p, st);
  EigenvalueBound r;
  r.status = sol.status;
  if (sol.dual.size() != n + 1 || sol.status == SdpStatus::PrimalInfeasible || sol.status == SdpStatus::DualInfeasible) {
    return r;
  }
  r.solved = sol.status == SdpStatus::Optimal || (sol.primal_residual < 1e-6 && sol.dual_residual < 1e-6);
  r.x      = sol.dual.head(n);
  // lambda re-measured at the returned point rather than read from the solver
  r.lambda     = n >= 0 ? min_eigenvalue(a.evaluate_float(r.x)) : 0.0;
  r.box_active = n > 0 && r.x.cwiseAbs().maxCoeff() >= 0.99 * radius;
  return r;
}

template<Scalar S>
FeasibilityClass<S> classify(const LinearPencil<S> & a, const SearchSettings & st)
{
  FeasibilityClass<S> fc;
  EigenvalueBound best;
  for (double radius = 1; radius <= 1e6; radius *= 10) {
    const auto eb = max_min_eigenvalue(a, radius, st.sdp);
    if (eb.x.size() == a.nvars() && (best.x.size() != a.nvars() || eb.lambda > best.lambda)) { best = eb; }
    if (eb.lambda > 1e-7 || !eb.box_active) { break; }
  }
  fc.lambda  = best.lambda;
  fc.witness = best.x;
  for (double eps : {1e-2, 1e-4, 1e-6}) { fc.eps_probes.emplace_back(eps, best.x.size() == a.nvars() && best.lambda >= -eps); }
  if (best.x.size() == a.nvars() && best.lambda > 1e-7) {
    fc.tag = FeasibilityTag::StronglyFeasible;
    return fc;
  }
  auto strong = check_strong_infeasibility(a, st);
  if (strong.status == SearchStatus::Found) {
    fc.tag         = FeasibilityTag::StronglyInfeasible;
    fc.level       = 0;
    fc.certificate = std::move(strong.certificate);
    fc.witness     = Vec<double>();
    return fc;
  }
  auto weak = infeasibility_level(a, -1, st, 1);
  if (weak.status == SearchStatus::Found) {
    fc.tag         = FeasibilityTag::WeaklyInfeasible;
    fc.level       = weak.certificate->level;
    fc.certificate = std::move(weak.certificate);
    fc.witness     = Vec<double>();
    return fc;
  }
  if (fc.eps_probes.back().second) {
    fc.tag  = FeasibilityTag::WeaklyFeasible;
    fc.note = "no infeasibility certificate up to level " + std::to_string(weak.searched_up_to) +
              "; boundary witness found";
    return fc;
  }
  fc.tag  = FeasibilityTag::Unknown;
  fc.note = "A + 1e-6 I looks infeasible but no certificate was found up to level " +
            std::to_string(weak.searched_up_to);
  return fc;
}

template<Scalar S>
LowDimResult<S> lowdim_certificate(const LinearPencil<S> & a, const SearchSettings & st)
{
  const int n     = a.nvars();
  const int alpha = a.size();
  LowDimResult<S> r;
  if (n == 0) { return r; }
  const MonomialBasis b1(n, 1);
  const int s1 = b1.size();
  // blocks: U, s, S with vec1^T U vec1 + s + tr(A S) = 0 and tr U = 1
  IdentityBuilder<S> id(n, "lowdim");
  id.add_sos(0, 0, b1);
  id.add_sos(1, 0, b1);
  id.add_trace(2, 0, a, b1);
  auto ids = id.identities(3);
  LinearIdentity<S> tr{{}, S(1), "trace U"};
  for (int i = 0; i < s1; ++i) { tr.entries.push_back({0, i, i, S(1)}); }
  ids.push_back(tr);
  const std::vector<int> sizes{s1, s1, alpha * s1};

  SdpProblem p;
  p.add_block(s1, "U");
  p.add_block(s1, "s");
  p.add_block(alpha * s1, "S");
  p.objective[1] = sparse_identity(s1);
  p.objective[2] = sparse_identity(alpha * s1);
  append_identities(p, ids);
  const SdpSolution sol = solve(p, st.sdp);
  if (!near_feasible(sol, 3)) { return r; }

  Polynomial<S> f(n);
  Mat<S> s, big_s;
  if constexpr (is_exact_v<S>) {
    const auto x = exact_point(sizes, ids, st.rounding);
    if (!x) {
      r.status = SearchStatus::Unknown;
      return r;
    }
    // U = d l l^T + rest with d the largest diagonal pivot; rest is the PSD Schur complement
    const Mat<Rational> & u = (*x)[0];
    Eigen::Index piv        = 0;
    for (Eigen::Index i = 1; i < u.rows(); ++i) {
      if (u(i, i) > u(piv, piv)) { piv = i; }
    }
    const Rational d      = u(piv, piv);
    const Vec<Rational> l = u.col(piv) / d;
    const Mat<Rational> rest = u - d * l * l.transpose();
    for (int j = 0; j < s1; ++j) { f.add_term(b1[j], l(j)); }
    s     = (rest + (*x)[1]) / d;
    big_s = (*x)[2] / d;
  } else {
    const Mat<double> & u = sol.primal[0];
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(0.5 * (u + u.transpose()));
    const double top    = es.eigenvalues()(s1 - 1);
    const Vec<double> v = es.eigenvectors().col(s1 - 1);
    if (top <= 0) { return r; }
    // scale so that the largest coefficient of f is 1
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const double scale  = std::sqrt(top) * v(imax);
    const double factor = scale * scale;
    for (int j = 0; j < s1; ++j) { f.add_term(b1[j], v(j) / v(imax)); }
    const Mat<double> rest = u - top * v * v.transpose();
    s     = (rest + sol.primal[1]) / factor;
    big_s = sol.primal[2] / factor;
  }
  LowDimCertificate<S> cert{f, {b1, s}, {alpha, b1, big_s}, 0.0};
  const auto rep = verify_certificate<S>(a, Certificate<S>(cert), st.tol);
  if (!rep.pass) {
    r.status = SearchStatus::Unknown;
    return r;
  }
  cert.verified_residual = rep.max_residual();
  r.status               = SearchStatus::Found;
  r.certificate          = std::move(cert);
  return r;
}

template<Scalar S>
BoundednessResult<S> boundedness_certificate(const LinearPencil<S> & a, int max_level, const SearchSettings & st)
{
  if (max_level < 0) { throw std::invalid_argument("max_level must be >= 0"); }
  const int n = a.nvars();
  BoundednessResult<S> r;
  if (n == 0) {
    r.status      = SearchStatus::Found;
    r.certificate = BoundednessCertificate<S>{S(0), 0, {}};
    return r;
  }
  for (int k = 0; k <= max_level; ++k) {
    for (long bound : {1L, 10L, 100L, 1000L, 10000L}) {
      BoundednessCertificate<S> cert{S(bound), k, {}};
      bool all = true;
      for (int i = 0; i < n && all; ++i) {
        for (int sg : {1, -1}) {
          auto m = find_membership(a, bound_target(cert.bound, n, i, sg), k, st);
          if (m.status != SearchStatus::Found) {
            all = false;
            break;
          }
          cert.members.push_back(std::move(*m.certificate));
        }
      }
      if (all) {
        r.status      = SearchStatus::Found;
        r.certificate = std::move(cert);
        return r;
      }
    }
  }
  return r;
}

std::optional<Vec<double>> pd_in_span(const std::vector<Mat<double>> & mats, const SdpSettings & st)
{
  if (mats.empty()) { throw std::invalid_argument("pd_in_span needs at least one matrix"); }
  const auto alpha = mats.front().rows();
  std::vector<Mat<double>> c{Mat<double>::Zero(alpha, alpha)};
  for (const auto & m : mats) {
    if (m.rows() != alpha || m.cols() != alpha) { throw std::invalid_argument("matrices must share one square size"); }
    c.push_back(m);
  }
  const auto eb = max_min_eigenvalue(LinearPencil<double>(std::move(c)), 1.0, st);
  if (eb.x.size() != static_cast<Eigen::Index>(mats.size()) || eb.lambda <= 1e-7) { return std::nullopt; }
  return eb.x;
}

#define LMICERT_INSTANTIATE(S)                                                                                           \
  template MembershipResult<S> find_membership(const LinearPencil<S> &, const Polynomial<S> &, int,                   \
                                               const SearchSettings &);                                                \
  template InfeasibilityResult<S> check_strong_infeasibility(const LinearPencil<S> &, const SearchSettings &);         \
  template InfeasibilityResult<S> infeasibility_level(const LinearPencil<S> &, int, const SearchSettings &, int);       \
  template EigenvalueBound max_min_eigenvalue(const LinearPencil<S> &, double, const SdpSettings &);                    \
  template FeasibilityClass<S> classify(const LinearPencil<S> &, const SearchSettings &);                              \
  template LowDimResult<S> lowdim_certificate(const LinearPencil<S> &, const SearchSettings &);                         \
  template BoundednessResult<S> boundedness_certificate(const LinearPencil<S> &, int, const SearchSettings &);

LMICERT_INSTANTIATE(double)
LMICERT_INSTANTIATE(Rational)

#undef LMICERT_INSTANTIATE

}  // namespace lmicert
