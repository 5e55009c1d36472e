#ifndef LMICERT__IO_HPP_
#define LMICERT__IO_HPP_

/**
 * @file
 * @brief Pencil JSON, SDPA sparse import and the certificate JSON schema.
 *
 * Pencil: {"nvars": n, "size": alpha, "matrices": [M0, ..., Mn]}, row-major,
 * entries as JSON numbers or "p/q" strings.
 *
 * Certificate: {"type", "mode", "nvars", "size", "level", "basis", "grams", "f", "residual", ...}
 * where "basis" lists the monomials of vec_k and "grams" maps block names to row-major
 * matrices. Exact certificates write every scalar as a "p/q" string.
 */

#include "lmicert/verify.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace lmicert {

using Json = nlohmann::ordered_json;

/// Input error with a 1-based position in the source text (0 when unknown).
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string & what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Parses JSON text, reporting syntax errors with line and column.
Json parse_json(std::string_view text);

std::string read_file(const std::string & path);

template<Scalar S>
S scalar_from_json(const Json & j);

template<Scalar S>
Json scalar_to_json(const S & v);

template<Scalar S>
Mat<S> matrix_from_json(const Json & j, Eigen::Index rows, Eigen::Index cols);

template<Scalar S>
Json matrix_to_json(const Mat<S> & m);

template<Scalar S>
LinearPencil<S> pencil_from_json(const Json & j);

template<Scalar S>
Json pencil_to_json(const LinearPencil<S> & a);

template<Scalar S>
LinearPencil<S> read_pencil(const std::string & path)
{
  return pencil_from_json<S>(parse_json(read_file(path)));
}

/// SDPA sparse data: the dual slack pencil -F0 + sum y_i F_i over all blocks, and objective c^T y.
template<Scalar S>
struct SdpaData
{
  LinearPencil<S> pencil;
  Polynomial<S> objective;
};

/// Parses the .dat-s format; diagonal (negative size) blocks become diagonal parts of the pencil.
template<Scalar S>
SdpaData<S> parse_sdpa(std::string_view text);

template<Scalar S>
Json certificate_to_json(const Certificate<S> & cert, const LinearPencil<S> & a);

/// Reads a certificate for pencil @p a; throws ParseError on schema violations.
template<Scalar S>
Certificate<S> certificate_from_json(const Json & j, const LinearPencil<S> & a);

Json report_to_json(const VerificationReport & r);

}  // namespace lmicert

#endif  // LMICERT__IO_HPP_
