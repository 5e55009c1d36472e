#ifndef LMICERT__ROUNDING_HPP_
#define LMICERT__ROUNDING_HPP_

/**
 * @file
 * @brief Turning a float solution of block identities into an exact rational PSD one.
 *
 * Each block is written as P M P^T over an exact face basis P. Faces shrink in
 * rounds: solve a centered SDP in M, round M and move it onto the identities by
 * an exact minimum norm correction; if exact PSD fails, read a kernel off a clear
 * eigenvalue gap, rationalize it with small denominators and restrict further.
 */

#include "lmicert/gram.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lmicert {

struct RoundingSettings
{
  int max_rounds                 = 10;
  std::vector<std::int64_t> value_denominators{64, 1000000};
  std::vector<std::int64_t> face_denominators{1, 2, 12, 100, 10000};
  double face_tolerance = 0.1;  ///< kernel entries must sit within face_tolerance / den^2 of the rational
  double kernel_gap = 100;   ///< eigenvalue ratio that separates a kernel
  double kernel_cut = 1e-3;  ///< kernel eigenvalues lie below this times the largest
  SdpSettings sdp{1e-12};
};

/// Exact PSD blocks satisfying every identity, or nullopt.
std::optional<std::vector<Mat<Rational>>> exact_point(const std::vector<int> & block_sizes,
                                                      const std::vector<LinearIdentity<Rational>> & ids,
                                                      const RoundingSettings & settings = {});

/// Rounds @p x once (no face search) and projects exactly.
std::optional<std::vector<Mat<Rational>>> round_onto_identities(const std::vector<int> & block_sizes,
                                                                const std::vector<LinearIdentity<Rational>> & ids,
                                                                const std::vector<Mat<double>> & x,
                                                                std::int64_t value_denominator);

/// Exact check of every identity for rational blocks.
bool identities_hold(const std::vector<LinearIdentity<Rational>> & ids, const std::vector<Mat<Rational>> & x);

/// Nearest rational with denominator at most @p max_den, entrywise.
Mat<Rational> approximate_matrix(const Mat<double> & m, std::int64_t max_den);

}  // namespace lmicert

#endif  // LMICERT__ROUNDING_HPP_
