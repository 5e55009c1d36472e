#ifndef LMICERT__SCALAR_HPP_
#define LMICERT__SCALAR_HPP_

/**
 * @file
 * @brief Scalar modes: binary floating point and exact rationals.
 *
 * Every dense type in the library is templated on one of the two scalars.
 * Mixing modes inside one expression does not compile; conversions go through
 * the explicit promote helpers below.
 */

#include "lmicert/rational.hpp"

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <cstdio>
#include <string>
#include <string_view>

namespace lmicert {

template<typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template<typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template<typename S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Rational>;

template<Scalar S>
constexpr bool is_exact_v = std::same_as<S, Rational>;

enum class Mode { Float, Exact };

inline const char * to_string(Mode m) { return m == Mode::Exact ? "exact" : "float"; }

template<Scalar S>
constexpr Mode mode_of()
{
  return is_exact_v<S> ? Mode::Exact : Mode::Float;
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational & v) { return v.to_double(); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational & v) { return v.is_zero(); }

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Rational & v) { return std::abs(v.to_double()); }

/// Parses a numeric literal (integer, decimal or "p/q") into scalar mode @p S.
template<Scalar S>
S parse_scalar(std::string_view text)
{
  if constexpr (is_exact_v<S>) {
    return Rational::parse(text);
  } else {
    return Rational::parse(text).to_double();
  }
}

inline std::string format_scalar(const Rational & v) { return v.str(); }

inline std::string format_scalar(double v)
{
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template<Scalar To, Scalar From>
To convert_scalar(const From & v)
{
  if constexpr (std::same_as<To, From>) {
    return v;
  } else if constexpr (is_exact_v<To>) {
    return Rational::from_double(v);
  } else {
    return v.to_double();
  }
}

template<Scalar To, Scalar From>
Mat<To> convert_matrix(const Mat<From> & m)
{
  Mat<To> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) { out(i, j) = convert_scalar<To>(m(i, j)); }
  }
  return out;
}

template<Scalar S>
double max_abs(const Mat<S> & m)
{
  double best = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) { best = std::max(best, magnitude(m(i, j))); }
  }
  return best;
}

}  // namespace lmicert

#endif  // LMICERT__SCALAR_HPP_
