#ifndef LMICERT__DUALS_HPP_
#define LMICERT__DUALS_HPP_

/**
 * @file
 * @brief The primal (P) min l(x) s.t. A(x) PSD, its standard dual (D), and the sums of squares dual.
 *
 * The sums of squares dual has blocks
 *   [S, c, S_1..S_n, B_1..B_n],  B_i = [[I, W_i], [W_i^T, U_i]] of size s(2) + s(1),
 * and identities, for i = 1..n (W_0 = 0),
 *   vec1^T U_i vec1 + vec2^T W_{i-1} vec1 + tr(A S_i) = 0,
 *   l - a - c + vec2^T W_n vec1 - tr(A S) = 0,
 * where a is read off the constant coefficient of the last identity and maximized.
 */

#include "lmicert/certificates.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lmicert {

template<Scalar S>
struct SdpInstance
{
  LinearPencil<S> pencil;
  Polynomial<S> objective;  ///< degree <= 1

  void validate() const
  {
    if (objective.nvars() != pencil.nvars()) { throw std::invalid_argument("objective and pencil variable counts differ"); }
    if (objective.degree() > 1) { throw std::invalid_argument("objective must be linear, got " + objective.str()); }
  }
};

template<Scalar S>
struct SosDualSolution
{
  Polynomial<S> objective;
  S a;
  S c;
  Mat<S> s;                         ///< constant alpha x alpha PSD matrix
  std::vector<GramSosMatrix<S>> si;  ///< quadratic sos-matrices
  std::vector<Mat<S>> u;             ///< s(1) x s(1)
  std::vector<Mat<S>> w;             ///< s(2) x s(1)
};

/// Box |x_i| <= radius keeps (P) a bounded problem over free variables.
inline constexpr double kDefaultBox = 1e3;
/// tr S <= bound on (D); its dual is then (P) with an exact penalty and always strictly feasible.
inline constexpr double kDefaultTrace = 1e4;

/**
 * @brief (P) stated over the dual multipliers y = x of the returned problem.
 *
 * The returned problem is min <A0, X> + box sum (u_i + v_i) s.t. -<A_i, X> + u_i - v_i = -l_i,
 * whose dual slack is A(x) together with box -+ x_i; read x with primal_point and
 * P* = l(x). Statuses of solve() refer to the returned problem, so PrimalInfeasible
 * there means (P) unbounded and DualInfeasible means (P) infeasible.
 */
template<Scalar S>
SdpProblem build_primal(const SdpInstance<S> & inst, double box = kDefaultBox);

template<Scalar S>
SdpProblem build_standard_dual(const SdpInstance<S> & inst, double trace_bound = kDefaultTrace);

template<Scalar S>
SdpProblem build_sos_dual(const SdpInstance<S> & inst);

/// Block layout of build_sos_dual.
struct SosDualLayout
{
  int nvars = 0;
  int alpha = 0;
  int s1    = 0;
  int s2    = 0;
  int block_s() const { return 0; }
  int block_c() const { return 1; }
  int block_si(int i) const { return 2 + i; }
  int block_schur(int i) const { return 2 + nvars + i; }
  int num_blocks() const { return 2 + 2 * nvars; }
};

SosDualLayout sos_dual_layout(int alpha, int nvars);

/// Identities of the sums of squares dual with a fixed value of a (exact rounding of a dual point).
template<Scalar S>
std::vector<LinearIdentity<S>> sos_dual_identities(const SdpInstance<S> & inst, const S & a);

/// Reads x back from a build_primal solution.
Vec<double> primal_point(const SdpSolution & sol, int nvars, double box = kDefaultBox);

SosDualSolution<double> extract_sos_dual(const SdpSolution & sol, const Polynomial<double> & objective, int alpha);

struct SolveSummary
{
  SdpStatus status = SdpStatus::Inaccurate;
  double value     = 0;
  bool finite      = false;
  int iterations   = 0;
};

template<Scalar S>
struct GapReport
{
  SolveSummary primal;
  SolveSummary standard_dual;
  SolveSummary sos_dual;
  Vec<double> x;  ///< (P) minimizer
  bool box_active = false;
  std::optional<SosDualSolution<double>> extracted;
  bool extracted_verified = false;
  double extracted_residual = 0;
  /// Exact point with a = P* found by face reduction when the float solve stalled.
  std::optional<SosDualSolution<Rational>> exact_sos_dual;
  /// sup of (D^sos) is attained: solver Optimal (or exact refinement) and the extracted point verifies.
  bool attained() const { return sos_dual.status == SdpStatus::Optimal && extracted_verified; }
};

/**
 * @brief Solves (P), (D) and the sums of squares dual.
 *
 * When the sums of squares solve stops short of Optimal and P* is finite, a = P*
 * (rounded to small denominators) is tried through exact face reduction; an exactly
 * verified point at that a is optimal by weak duality and replaces the float one.
 */
template<Scalar S>
GapReport<S> gap_report(const SdpInstance<S> & inst, const SdpSettings & st = {});

template<Scalar S>
struct FunctionalResult
{
  bool positive = false;
  GapReport<S> report;
  Mat<double> witness;  ///< R = A(x) when not positive, scaled to max entry 1
};

/// Positivity of the functional f(A_i) = values_i on the cone of PSD matrices in span(A_i).
template<Scalar S>
FunctionalResult<S> functional_positivity(const std::vector<Mat<S>> & basis, const std::vector<S> & values,
                                          const SdpSettings & st = {});

}  // namespace lmicert

#endif  // LMICERT__DUALS_HPP_
