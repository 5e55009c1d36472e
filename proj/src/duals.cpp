#include "lmicert/duals.hpp"

#include "lmicert/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lmicert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SparseSym sparse(const Mat<double> & m) { return m.sparseView(); }

template<Scalar S>
Mat<double> coeff_d(const LinearPencil<S> & a, int i)
{
  return convert_matrix<double, S>(a.coeff(i));
}

template<Scalar S>
double linear_coeff(const Polynomial<S> & p, int i)
{
  const int n = p.nvars();
  return to_double(i == 0 ? p.coeff(Monomial::one(n)) : p.coeff(Monomial::variable(n, i - 1)));
}

template<Scalar S>
struct SosDualParts
{
  std::vector<LinearIdentity<S>> steps;
  std::vector<LinearIdentity<S>> objective;  ///< constant monomial first
  std::vector<LinearIdentity<S>> unit;       ///< top-left identity blocks of the Schur blocks
};

template<Scalar S>
SosDualParts<S> sos_dual_parts(const SdpInstance<S> & inst, const S & a)
{
  inst.validate();
  const auto & pen = inst.pencil;
  const int n      = pen.nvars();
  const auto lay   = sos_dual_layout(pen.size(), n);
  const MonomialBasis b0(n, 0), b1(n, 1), b2(n, 2);
  SosDualParts<S> out;
  for (int i = 0; i < n; ++i) {
    IdentityBuilder<S> step(n, "step " + std::to_string(i + 1));
    step.add_sos(lay.block_schur(i), lay.s2, b1);
    if (i > 0) { step.add_bilinear(lay.block_schur(i - 1), 0, b2, lay.s2, b1); }
    step.add_trace(lay.block_si(i), 0, pen, b1);
    for (auto & id : step.identities(3)) { out.steps.push_back(std::move(id)); }
    for (int p = 0; p < lay.s2; ++p) {
      for (int q = p; q < lay.s2; ++q) {
        LinearIdentity<S> u{{}, S(p == q ? 1 : 0), "unit " + std::to_string(i + 1)};
        if (p == q) {
          u.entries.push_back({lay.block_schur(i), p, p, S(1)});
        } else {
          u.entries.push_back({lay.block_schur(i), p, q, S(1) / S(2)});
          u.entries.push_back({lay.block_schur(i), q, p, S(1) / S(2)});
        }
        out.unit.push_back(std::move(u));
      }
    }
  }
  // vec2^T W_n vec1 - tr(A S) - c = a - l
  IdentityBuilder<S> fin(n, "objective");
  if (n > 0) { fin.add_bilinear(lay.block_schur(n - 1), 0, b2, lay.s2, b1); }
  fin.add_trace(lay.block_s(), 0, pen, b0, S(-1));
  fin.add_entry(lay.block_c(), 0, 0, Monomial::one(n), S(-1));
  fin.set_target(Polynomial<S>::constant(n, a) - inst.objective);
  out.objective = fin.identities(n > 0 ? 3 : 0);
  return out;
}

SolveSummary summarize(const SdpSolution & sol, double value)
{
  SolveSummary s;
  s.status     = sol.status;
  s.iterations = sol.iterations;
  s.value      = value;
  s.finite     = std::isfinite(value) &&
             (sol.status == SdpStatus::Optimal ||
              (sol.status == SdpStatus::Inaccurate && sol.primal_residual < 1e-6 && sol.dual_residual < 1e-6));
  return s;
}

template<Scalar S>
SdpInstance<Rational> exact_instance(const SdpInstance<S> & inst)
{
  if constexpr (is_exact_v<S>) {
    return inst;
  } else {
    return {convert_pencil<Rational, double>(inst.pencil), convert_polynomial<Rational, double>(inst.objective)};
  }
}

template<Scalar S>
void refine_sos_dual(const SdpInstance<S> & inst, GapReport<S> & r)
{
  const auto ex  = exact_instance(inst);
  const int n    = inst.pencil.nvars();
  const auto lay = sos_dual_layout(inst.pencil.size(), n);
  std::vector<int> sizes{lay.alpha, 1};
  for (int i = 0; i < n; ++i) { sizes.push_back(lay.alpha * lay.s1); }
  for (int i = 0; i < n; ++i) { sizes.push_back(lay.s2 + lay.s1); }
  std::vector<Rational> tried;
  for (std::int64_t den : {1, 2, 12, 100}) {
    const Rational a = Rational::approximate(r.primal.value, den);
    if (std::abs(a.to_double() - r.primal.value) > 1e-6 || std::find(tried.begin(), tried.end(), a) != tried.end()) { continue; }
    tried.push_back(a);
    const auto x = exact_point(sizes, sos_dual_identities(ex, a));
    if (!x) { continue; }
    SosDualSolution<Rational> d{ex.objective, a, (*x)[1](0, 0), (*x)[0], {}, {}, {}};
    for (int i = 0; i < n; ++i) {
      const auto & b = (*x)[static_cast<std::size_t>(lay.block_schur(i))];
      d.si.push_back({lay.alpha, MonomialBasis(n, 1), (*x)[static_cast<std::size_t>(lay.block_si(i))]});
      d.w.push_back(b.topRightCorner(lay.s2, lay.s1));
      d.u.push_back(b.bottomRightCorner(lay.s1, lay.s1));
    }
    if (!verify_certificate(ex.pencil, Certificate<Rational>(d)).pass) { continue; }
    SosDualSolution<double> f{convert_polynomial<double, Rational>(d.objective), a.to_double(), d.c.to_double(),
                              convert_matrix<double, Rational>(d.s), {}, {}, {}};
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      f.si.push_back(convert_gram<double, Rational>(d.si[k]));
      f.u.push_back(convert_matrix<double, Rational>(d.u[k]));
      f.w.push_back(convert_matrix<double, Rational>(d.w[k]));
    }
    r.extracted          = std::move(f);
    r.extracted_verified = true;
    r.extracted_residual = 0;
    r.exact_sos_dual     = std::move(d);
    r.sos_dual.status    = SdpStatus::Optimal;
    r.sos_dual.value     = a.to_double();
    r.sos_dual.finite    = true;
    return;
  }
}

}  // namespace

SosDualLayout sos_dual_layout(int alpha, int nvars)
{
  return {nvars, alpha, static_cast<int>(basis_size(nvars, 1)), static_cast<int>(basis_size(nvars, 2))};
}

template<Scalar S>
SdpProblem build_primal(const SdpInstance<S> & inst, double box)
{
  inst.validate();
  const auto & pen = inst.pencil;
  const int n      = pen.nvars();
  SdpProblem p;
  const int bx = p.add_block(pen.size(), "A(x)");
  p.objective[static_cast<std::size_t>(bx)] = sparse(coeff_d(pen, 0));
  for (int i = 0; i < n; ++i) {
    const int up = p.add_block(1, "box - x" + std::to_string(i + 1));
    const int dn = p.add_block(1, "box + x" + std::to_string(i + 1));
    p.objective[static_cast<std::size_t>(up)] = sparse(Mat<double>::Constant(1, 1, box));
    p.objective[static_cast<std::size_t>(dn)] = sparse(Mat<double>::Constant(1, 1, box));
    SdpConstraint c;
    c.label = "x" + std::to_string(i + 1);
    c.rhs   = -linear_coeff(inst.objective, i + 1);
    c.terms.emplace_back(bx, sparse(-coeff_d(pen, i + 1)));
    c.terms.emplace_back(up, sparse(Mat<double>::Identity(1, 1)));
    c.terms.emplace_back(dn, sparse(-Mat<double>::Identity(1, 1)));
    p.constraints.push_back(std::move(c));
  }
  return p;
}

template<Scalar S>
SdpProblem build_standard_dual(const SdpInstance<S> & inst, double trace_bound)
{
  inst.validate();
  const auto & pen = inst.pencil;
  const int alpha  = pen.size();
  SdpProblem p;
  p.sense              = Sense::Maximize;
  p.objective_constant = linear_coeff(inst.objective, 0);
  const int bs = p.add_block(alpha, "S");
  const int bt = p.add_block(1, "trace slack");
  p.objective[static_cast<std::size_t>(bs)] = sparse(-coeff_d(pen, 0));
  for (int i = 1; i <= pen.nvars(); ++i) {
    SdpConstraint c;
    c.label = "x" + std::to_string(i);
    c.rhs   = linear_coeff(inst.objective, i);
    c.terms.emplace_back(bs, sparse(coeff_d(pen, i)));
    p.constraints.push_back(std::move(c));
  }
  SdpConstraint tr;
  tr.label = "trace bound";
  tr.rhs   = trace_bound;
  tr.terms.emplace_back(bs, sparse(Mat<double>::Identity(alpha, alpha)));
  tr.terms.emplace_back(bt, sparse(Mat<double>::Identity(1, 1)));
  p.constraints.push_back(std::move(tr));
  return p;
}

template<Scalar S>
std::vector<LinearIdentity<S>> sos_dual_identities(const SdpInstance<S> & inst, const S & a)
{
  auto parts = sos_dual_parts(inst, a);
  auto out   = std::move(parts.steps);
  for (auto & id : parts.objective) { out.push_back(std::move(id)); }
  for (auto & id : parts.unit) { out.push_back(std::move(id)); }
  return out;
}

template<Scalar S>
SdpProblem build_sos_dual(const SdpInstance<S> & inst)
{
  const auto parts = sos_dual_parts(inst, S(0));
  const auto & pen = inst.pencil;
  const int n      = pen.nvars();
  const auto lay   = sos_dual_layout(pen.size(), n);
  SdpProblem p;
  p.sense              = Sense::Maximize;
  p.objective_constant = linear_coeff(inst.objective, 0);
  p.add_block(pen.size(), "S");
  p.add_block(1, "c");
  for (int i = 0; i < n; ++i) { p.add_block(pen.size() * lay.s1, "S_" + std::to_string(i + 1)); }
  for (int i = 0; i < n; ++i) { p.add_block(lay.s2 + lay.s1, "[I W; W^T U]_" + std::to_string(i + 1)); }
  // a = l0 + W_n(0, 0) - tr(A0 S) - c, read off the dropped constant identity
  p.objective[static_cast<std::size_t>(lay.block_s())] = sparse(-coeff_d(pen, 0));
  p.objective[static_cast<std::size_t>(lay.block_c())] = sparse(-Mat<double>::Identity(1, 1));
  if (n > 0) {
    const int d  = lay.s2 + lay.s1;
    Mat<double> w = Mat<double>::Zero(d, d);
    w(0, lay.s2) = w(lay.s2, 0) = 0.5;
    p.objective[static_cast<std::size_t>(lay.block_schur(n - 1))] = sparse(w);
  }
  append_identities(p, parts.steps);
  append_identities(p, std::vector<LinearIdentity<S>>(parts.objective.begin() + 1, parts.objective.end()));
  append_identities(p, parts.unit);
  return p;
}

Vec<double> primal_point(const SdpSolution & sol, int nvars, double box)
{
  if (sol.dual.size() < nvars) { return {}; }
  return sol.dual.head(nvars).cwiseMax(-box).cwiseMin(box);
}

SosDualSolution<double> extract_sos_dual(const SdpSolution & sol, const Polynomial<double> & objective, int alpha)
{
  const int n    = objective.nvars();
  const auto lay = sos_dual_layout(alpha, n);
  if (static_cast<int>(sol.primal.size()) != lay.num_blocks()) { throw std::invalid_argument("solution does not match the sos dual layout"); }
  SosDualSolution<double> d{objective, sol.objective_value, sol.primal[1](0, 0), sol.primal[0], {}, {}, {}};
  for (int i = 0; i < n; ++i) {
    const Mat<double> & b = sol.primal[static_cast<std::size_t>(lay.block_schur(i))];
    d.si.push_back({alpha, MonomialBasis(n, 1), sol.primal[static_cast<std::size_t>(lay.block_si(i))]});
    d.w.push_back(b.topRightCorner(lay.s2, lay.s1));
    d.u.push_back(b.bottomRightCorner(lay.s1, lay.s1));
  }
  return d;
}

template<Scalar S>
GapReport<S> gap_report(const SdpInstance<S> & inst, const SdpSettings & st)
{
  inst.validate();
  const int n = inst.pencil.nvars();
  const auto objective = convert_polynomial<double, S>(inst.objective);
  GapReport<S> r;

  const SdpSolution ps = solve(build_primal(inst), st);
  double pv            = ps.status == SdpStatus::DualInfeasible ? kInf : -kInf;
  if (ps.dual.size() == n && ps.status != SdpStatus::PrimalInfeasible && ps.status != SdpStatus::DualInfeasible) {
    r.x          = primal_point(ps, n);
    pv           = objective.evaluate(r.x);
    r.box_active = n > 0 && r.x.cwiseAbs().maxCoeff() >= 0.99 * kDefaultBox;
  }
  r.primal = summarize(ps, pv);
  // statuses in (P)'s own terms
  if (ps.status == SdpStatus::PrimalInfeasible) { r.primal.status = SdpStatus::DualInfeasible; }
  if (ps.status == SdpStatus::DualInfeasible) { r.primal.status = SdpStatus::PrimalInfeasible; }

  const SdpSolution ds = solve(build_standard_dual(inst), st);
  r.standard_dual      = summarize(ds, ds.status == SdpStatus::PrimalInfeasible ? -kInf : ds.objective_value);

  const SdpSolution ss = solve(build_sos_dual(inst), st);
  double sv            = ss.objective_value;
  if (ss.status == SdpStatus::PrimalInfeasible) { sv = -kInf; }
  if (ss.status == SdpStatus::DualInfeasible) { sv = kInf; }
  r.sos_dual = summarize(ss, sv);
  if (!ss.primal.empty()) {
    r.extracted            = extract_sos_dual(ss, objective, inst.pencil.size());
    const auto rep         = verify_certificate<double>(convert_pencil<double, S>(inst.pencil),
                                                        Certificate<double>(*r.extracted), kFloatTol);
    r.extracted_verified   = rep.pass;
    r.extracted_residual   = rep.max_residual();
  }
  if (!r.attained() && r.primal.finite) { refine_sos_dual(inst, r); }
  return r;
}

template<Scalar S>
FunctionalResult<S> functional_positivity(const std::vector<Mat<S>> & basis, const std::vector<S> & values,
                                          const SdpSettings & st)
{
  if (basis.empty() || basis.size() != values.size()) { throw std::invalid_argument("basis and values must be nonempty and of equal length"); }
  const auto alpha = basis.front().rows();
  Mat<double> stacked(alpha * alpha, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].rows() != alpha || basis[i].cols() != alpha) { throw std::invalid_argument("basis matrices must share one square size"); }
    const Mat<double> m = convert_matrix<double, S>(basis[i]);
    stacked.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vec<double>>(m.data(), m.size());
  }
  if (matrix_rank(stacked, 1e-9) < static_cast<int>(basis.size())) { throw std::invalid_argument("basis is linearly dependent"); }

  const int n = static_cast<int>(basis.size());
  std::vector<Mat<S>> coeffs{Mat<S>::Constant(alpha, alpha, S(0))};
  Polynomial<S> f(n);
  for (int i = 0; i < n; ++i) {
    coeffs.push_back(basis[static_cast<std::size_t>(i)]);
    f.add_term(Monomial::variable(n, i), values[static_cast<std::size_t>(i)]);
  }
  const SdpInstance<S> inst{LinearPencil<S>(std::move(coeffs)), f};
  FunctionalResult<S> r;
  r.report   = gap_report(inst, st);
  r.positive = r.report.sos_dual.finite && r.report.sos_dual.value >= -1e-7;
  if (!r.positive && r.report.x.size() == n) {
    r.witness         = inst.pencil.evaluate_float(r.report.x);
    const double peak = r.witness.cwiseAbs().maxCoeff();
    if (peak > 0) { r.witness /= peak; }
  }
  return r;
}

#define LMICERT_INSTANTIATE(S)                                                                                           \
  template SdpProblem build_primal(const SdpInstance<S> &, double);                                                    \
  template SdpProblem build_standard_dual(const SdpInstance<S> &, double);                                             \
  template SdpProblem build_sos_dual(const SdpInstance<S> &);                                                          \
  template std::vector<LinearIdentity<S>> sos_dual_identities(const SdpInstance<S> &, const S &);                      \
  template GapReport<S> gap_report(const SdpInstance<S> &, const SdpSettings &);                                       \
  template FunctionalResult<S> functional_positivity(const std::vector<Mat<S>> &, const std::vector<S> &,             \
                                                     const SdpSettings &);

LMICERT_INSTANTIATE(double)
LMICERT_INSTANTIATE(Rational)

#undef LMICERT_INSTANTIATE

}  // namespace lmicert
