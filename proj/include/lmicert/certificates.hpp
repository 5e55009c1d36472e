#ifndef LMICERT__CERTIFICATES_HPP_
#define LMICERT__CERTIFICATES_HPP_

/**
 * @file
 * @brief Feasibility classification and certificate searches for linear pencils.
 *
 * Every search returns data that has already passed verify_certificate. In exact
 * mode (Rational pencils) a level counts as reached only when an exact rational
 * certificate was found; float solutions are never trusted on their own there.
 */

#include "lmicert/rounding.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lmicert {

struct SearchSettings
{
  SdpSettings sdp{};
  RoundingSettings rounding{};
  double tol = 1e-6;  ///< float verification tolerance
};

/// f = s + tr(A S) at level k.
template<Scalar S>
struct MembershipCertificate
{
  Polynomial<S> target;
  int level = 0;
  GramSos<S> s;
  GramSosMatrix<S> big_s;
  double verified_residual = 0;
};

/// -1 = s + tr(A S) at level k.
template<Scalar S>
struct InfeasibilityCertificate
{
  int level = 0;
  GramSos<S> s;
  GramSosMatrix<S> big_s;
  double verified_residual = 0;
};

/// -f^2 = s + tr(A S) with f linear and nonzero; strict when s == 0.
template<Scalar S>
struct LowDimCertificate
{
  Polynomial<S> f;
  GramSos<S> s;
  GramSosMatrix<S> big_s;
  double verified_residual = 0;
  bool strict() const { return s.g.isZero(); }
};

/// N + delta x_i in M_A^(k) for every i and delta = +-1 (targets ordered x1+, x1-, x2+, ...).
template<Scalar S>
struct BoundednessCertificate
{
  S bound;
  int level = 0;
  std::vector<MembershipCertificate<S>> members;
};

enum class SearchStatus { Found, NotFound, Unknown };

const char * to_string(SearchStatus s);

template<Scalar S>
struct MembershipResult
{
  SearchStatus status = SearchStatus::NotFound;
  std::optional<MembershipCertificate<S>> certificate;
  SdpStatus solver = SdpStatus::Inaccurate;
};

/// Membership query f in M_A^(k), verified before return.
template<Scalar S>
MembershipResult<S> find_membership(const LinearPencil<S> & a, const Polynomial<S> & f, int level,
                                    const SearchSettings & st = {});

template<Scalar S>
struct InfeasibilityResult
{
  SearchStatus status = SearchStatus::NotFound;
  std::optional<InfeasibilityCertificate<S>> certificate;
  int searched_up_to = -1;
};

/// -1 in C_A = M_A^(0).
template<Scalar S>
InfeasibilityResult<S> check_strong_infeasibility(const LinearPencil<S> & a, const SearchSettings & st = {});

/// 2^min(alpha - 1, n) - 1.
int infeasibility_level_bound(int alpha, int nvars);

/// Smallest k <= max_level with -1 in M_A^(k); max_level < 0 means the automatic bound.
template<Scalar S>
InfeasibilityResult<S> infeasibility_level(const LinearPencil<S> & a, int max_level = -1, const SearchSettings & st = {},
                                           int min_level = 0);

/// sup { lambda : A(x) - lambda I PSD, |x_i| <= radius } and its maximizer.
struct EigenvalueBound
{
  bool solved = false;
  double lambda = 0;
  Vec<double> x;
  bool box_active = false;
  SdpStatus status = SdpStatus::Inaccurate;
};

template<Scalar S>
EigenvalueBound max_min_eigenvalue(const LinearPencil<S> & a, double radius, const SdpSettings & st = {});

enum class FeasibilityTag { StronglyFeasible, WeaklyFeasible, WeaklyInfeasible, StronglyInfeasible, Unknown };

const char * to_string(FeasibilityTag t);

template<Scalar S>
struct FeasibilityClass
{
  FeasibilityTag tag = FeasibilityTag::Unknown;
  int level          = -1;  ///< infeasibility level for the infeasible tags
  Vec<double> witness;      ///< strict or boundary point for the feasible tags
  double lambda = 0;        ///< best min eigenvalue found within the trust region
  std::optional<InfeasibilityCertificate<S>> certificate;
  std::vector<std::pair<double, bool>> eps_probes;  ///< (eps, A + eps I feasible)
  std::string note;
};

template<Scalar S>
FeasibilityClass<S> classify(const LinearPencil<S> & a, const SearchSettings & st = {});

template<Scalar S>
struct LowDimResult
{
  SearchStatus status = SearchStatus::NotFound;
  std::optional<LowDimCertificate<S>> certificate;
};

template<Scalar S>
LowDimResult<S> lowdim_certificate(const LinearPencil<S> & a, const SearchSettings & st = {});

template<Scalar S>
struct BoundednessResult
{
  SearchStatus status = SearchStatus::NotFound;
  std::optional<BoundednessCertificate<S>> certificate;
};

/// Tries levels 0..max_level and, per level, N in {1, 10, 100, 1e3, 1e4}.
template<Scalar S>
BoundednessResult<S> boundedness_certificate(const LinearPencil<S> & a, int max_level, const SearchSettings & st = {});

/// x with sum x_i A_i having min eigenvalue > 1e-7 and |x_i| <= 1, if one exists.
std::optional<Vec<double>> pd_in_span(const std::vector<Mat<double>> & mats, const SdpSettings & st = {});

}  // namespace lmicert

#endif  // LMICERT__CERTIFICATES_HPP_
