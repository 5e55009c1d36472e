#ifndef LMICERT__VERIFY_HPP_
#define LMICERT__VERIFY_HPP_

/**
 * @file
 * @brief Independent checks of certificates by polynomial expansion and PSD tests.
 *
 * Nothing here calls the SDP solver. Exact mode checks identities with zero
 * tolerance and PSD by rational elimination; float mode uses 1e-6 on both.
 */

#include "lmicert/duals.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lmicert {

template<Scalar S>
using Certificate = std::variant<InfeasibilityCertificate<S>, LowDimCertificate<S>, BoundednessCertificate<S>,
                                 SosDualSolution<S>, MembershipCertificate<S>>;

const char * certificate_type(std::size_t variant_index);

template<Scalar S>
const char * certificate_type(const Certificate<S> & c)
{
  return certificate_type(c.index());
}

struct VerificationReport
{
  std::string cert_type;
  std::vector<std::pair<std::string, double>> identity_residuals;
  std::vector<std::pair<std::string, double>> psd_margins;
  bool pass = false;
  Mode mode = Mode::Float;
  double tol = 0;
  std::string error;  ///< malformed input, if any

  double max_residual() const;
  double min_margin() const;
};

inline constexpr double kFloatTol = 1e-6;

template<Scalar S>
VerificationReport verify_certificate(const LinearPencil<S> & a, const Certificate<S> & cert, double tol = kFloatTol);

/// Residual polynomial s + tr(A S) - f.
template<Scalar S>
Polynomial<S> membership_residual(const LinearPencil<S> & a, const Polynomial<S> & f, const GramSos<S> & s,
                                  const GramSosMatrix<S> & big_s);

/// Exact certificate from a float one: round to denominators <= denom_bound, project exactly, check PSD exactly.
/// Falls back to an exact face-reduced point on the same identities when plain rounding leaves the cone.
std::optional<Certificate<Rational>> rationalize(const LinearPencil<Rational> & a, const Certificate<double> & cert,
                                                 std::int64_t denom_bound);

/// f + eps in M_A^(k); membership proves f >= -eps on S_A.
template<Scalar S>
MembershipResult<S> check_eps_membership(const LinearPencil<S> & a, const Polynomial<S> & f, const S & eps, int level,
                                         const SearchSettings & st = {});

}  // namespace lmicert

#endif  // LMICERT__VERIFY_HPP_
