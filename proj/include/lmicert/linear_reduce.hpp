#ifndef LMICERT__LINEAR_REDUCE_HPP_
#define LMICERT__LINEAR_REDUCE_HPP_

/**
 * @file
 * @brief Division of a polynomial modulo an ideal generated by linear polynomials.
 */

#include "lmicert/linalg.hpp"
#include "lmicert/polynomial.hpp"

#include <vector>

namespace lmicert {

template<Scalar S>
struct LinearReduction
{
  enum class Kind { Combination, Unit };

  Kind kind = Kind::Combination;
  /// f = sum_i cofactors[i] * L[i] + remainder (Combination case).
  std::vector<Polynomial<S>> cofactors;
  /// Lives in the ring of the non-eliminated variables; zero iff f is in the ideal.
  Polynomial<S> remainder;
  /// sum_i unit_multipliers[i] * L[i] = 1 (Unit case).
  std::vector<S> unit_multipliers;
  /// Variables eliminated by Gaussian elimination, in elimination order (zero based).
  std::vector<int> pivot_variables;
};

namespace detail {

// current = q * (x_v - sub) + rem with rem free of x_v; sub must not contain x_v.
template<Scalar S>
std::pair<Polynomial<S>, Polynomial<S>> divide_by_linear(const Polynomial<S> & current, int v,
                                                         const Polynomial<S> & sub)
{
  const int n = current.nvars();
  // group terms by the power of x_v
  std::map<int, Polynomial<S>> by_power;
  for (const auto & [m, c] : current.terms()) {
    std::vector<int> e = m.exponents();
    const int p        = e[static_cast<std::size_t>(v)];
    e[static_cast<std::size_t>(v)] = 0;
    auto [it, ins]                 = by_power.try_emplace(p, Polynomial<S>(n));
    it->second.add_term(Monomial(e), c);
  }
  const Polynomial<S> xv = Polynomial<S>::variable(n, v);
  Polynomial<S> q(n), rem(n);
  int max_power = by_power.empty() ? 0 : by_power.rbegin()->first;
  // powers of sub and x_v
  std::vector<Polynomial<S>> sub_pow{Polynomial<S>::constant(n, S(1))};
  std::vector<Polynomial<S>> xv_pow{Polynomial<S>::constant(n, S(1))};
  for (int i = 1; i <= max_power; ++i) {
    sub_pow.push_back(sub_pow.back() * sub);
    xv_pow.push_back(xv_pow.back() * xv);
  }
  for (const auto & [e, ce] : by_power) {
    rem += ce * sub_pow[static_cast<std::size_t>(e)];
    if (e == 0) { continue; }
    Polynomial<S> geo(n);
    for (int i = 0; i < e; ++i) {
      geo += xv_pow[static_cast<std::size_t>(i)] * sub_pow[static_cast<std::size_t>(e - 1 - i)];
    }
    q += ce * geo;
  }
  return {q, rem};
}

}  // namespace detail

/**
 * @brief Writes f = sum p_i l_i + r, or finds sum lambda_i l_i = 1.
 *
 * The unit case is detected first from the homogenized system. Otherwise the linear
 * parts are brought to reduced echelon form x_{v_i} - l'_i (l'_i free of all pivot
 * variables) and f is divided by each in turn, which gives deg p_i <= deg f - 1.
 */
template<Scalar S>
LinearReduction<S> reduce_mod_linear(const Polynomial<S> & f, const std::vector<Polynomial<S>> & gens)
{
  const int n = f.nvars();
  const int t = static_cast<int>(gens.size());
  LinearReduction<S> out;
  out.remainder = f;
  if (t == 0) { return out; }
  for (const auto & g : gens) {
    if (g.nvars() != n) { throw std::invalid_argument("generator variable count mismatch"); }
    if (g.degree() > 1) { throw std::invalid_argument("reduce_mod_linear needs generators of degree <= 1"); }
  }

  // [ linear coefficients | constant | identity tracking the combination ]
  Mat<S> m = Mat<S>::Constant(t, n + 1 + t, S(0));
  for (int j = 0; j < t; ++j) {
    for (const auto & [mono, c] : gens[static_cast<std::size_t>(j)].terms()) {
      if (mono.degree() == 0) {
        m(j, n) = c;
      } else {
        for (int v = 0; v < n; ++v) {
          if (mono[v] == 1) { m(j, v) = c; }
        }
      }
    }
    m(j, n + 1 + j) = S(1);
  }
  const double tol  = elimination_tol<S>(m.leftCols(n + 1));
  const auto pivots = rref<S>(m, tol, n);
  const int rank    = static_cast<int>(pivots.size());

  for (int r = rank; r < t; ++r) {
    if (!detail::negligible(m(r, n), tol)) {
      out.kind = LinearReduction<S>::Kind::Unit;
      out.unit_multipliers.resize(static_cast<std::size_t>(t));
      const S inv = S(1) / m(r, n);
      for (int j = 0; j < t; ++j) { out.unit_multipliers[static_cast<std::size_t>(j)] = m(r, n + 1 + j) * inv; }
      out.remainder = Polynomial<S>(n);
      return out;
    }
  }

  out.pivot_variables = pivots;
  Polynomial<S> current = f;
  std::vector<Polynomial<S>> q_rows;
  for (int i = 0; i < rank; ++i) {
    const int v = pivots[static_cast<std::size_t>(i)];
    // row i reads x_v + sum_{free w} a_w x_w + c = g_i, so x_v == sub modulo g_i
    Polynomial<S> sub = Polynomial<S>::constant(n, S(-m(i, n)));
    for (int w = 0; w < n; ++w) {
      if (w != v && !detail::negligible(m(i, w), 0.0)) { sub.add_term(Monomial::variable(n, w), S(-m(i, w))); }
    }
    auto [q, rem] = detail::divide_by_linear(current, v, sub);
    q_rows.push_back(std::move(q));
    current = std::move(rem);
  }
  out.remainder = current;
  out.cofactors.assign(static_cast<std::size_t>(t), Polynomial<S>(n));
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < t; ++j) {
      const S w = m(i, n + 1 + j);
      if (!detail::negligible(w, 0.0)) {
        out.cofactors[static_cast<std::size_t>(j)] += q_rows[static_cast<std::size_t>(i)] * w;
      }
    }
  }
  return out;
}

}  // namespace lmicert

#endif  // LMICERT__LINEAR_REDUCE_HPP_
