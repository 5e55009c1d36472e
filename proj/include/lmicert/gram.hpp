#ifndef LMICERT__GRAM_HPP_
#define LMICERT__GRAM_HPP_

/**
 * @file
 * @brief Gram encodings of sos polynomials and sos-matrices, and the SDPs that search for them.
 *
 * An sos-matrix of size alpha over vec_k is stored as one (alpha s(k)) x (alpha s(k))
 * matrix whose row/column index is monomial * alpha + matrix row, so that
 * S(x)_{rc} = sum_{a,b} G(a alpha + r, b alpha + c) m_a(x) m_b(x).
 */

#include "lmicert/pencil.hpp"
#include "lmicert/sdp.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmicert {

template<Scalar S>
struct GramSos
{
  MonomialBasis basis;
  Mat<S> g;

  static GramSos zero(int nvars, int degree)
  {
    GramSos r{MonomialBasis(nvars, degree), {}};
    r.g = Mat<S>::Constant(r.basis.size(), r.basis.size(), S(0));
    return r;
  }
};

template<Scalar S>
struct GramSosMatrix
{
  int size = 0;
  MonomialBasis basis;
  Mat<S> g;

  static GramSosMatrix zero(int size, int nvars, int degree)
  {
    GramSosMatrix r{size, MonomialBasis(nvars, degree), {}};
    const int d = size * r.basis.size();
    r.g         = Mat<S>::Constant(d, d, S(0));
    return r;
  }
};

template<Scalar S>
Polynomial<S> expand_sos(const GramSos<S> & s)
{
  const int n = s.basis.nvars();
  const int m = s.basis.size();
  if (s.g.rows() != m || s.g.cols() != m) { throw std::invalid_argument("Gram matrix does not match its basis"); }
  std::map<Monomial, S> acc;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (is_zero(s.g(a, b))) { continue; }
      auto [it, ins] = acc.try_emplace(s.basis[a] * s.basis[b], S(0));
      it->second += s.g(a, b);
    }
  }
  Polynomial<S> p(n);
  for (const auto & [mono, c] : acc) { p.add_term(mono, c); }
  return p;
}

template<Scalar S>
MatrixPolynomial<S> expand_sos_matrix(const GramSosMatrix<S> & s)
{
  const int n     = s.basis.nvars();
  const int m     = s.basis.size();
  const int alpha = s.size;
  if (s.g.rows() != alpha * m || s.g.cols() != alpha * m) { throw std::invalid_argument("Gram matrix does not match its basis"); }
  std::vector<std::map<Monomial, S>> acc(static_cast<std::size_t>(alpha * alpha));
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      const Monomial mono = s.basis[a] * s.basis[b];
      for (int r = 0; r < alpha; ++r) {
        for (int c = 0; c < alpha; ++c) {
          const S & v = s.g(a * alpha + r, b * alpha + c);
          if (is_zero(v)) { continue; }
          auto [it, ins] = acc[static_cast<std::size_t>(r * alpha + c)].try_emplace(mono, S(0));
          it->second += v;
        }
      }
    }
  }
  MatrixPolynomial<S> out(alpha, n);
  for (int r = 0; r < alpha; ++r) {
    for (int c = 0; c < alpha; ++c) {
      for (const auto & [mono, v] : acc[static_cast<std::size_t>(r * alpha + c)]) { out.at(r, c).add_term(mono, v); }
    }
  }
  return out;
}

/// Coefficient vector of p over @p basis; throws if p has a monomial outside the basis.
template<Scalar S>
Vec<S> coefficients_in(const Polynomial<S> & p, const MonomialBasis & basis)
{
  Vec<S> v = Vec<S>::Constant(basis.size(), S(0));
  for (const auto & [m, c] : p.terms()) {
    const int i = basis.index_of(m);
    if (i < 0) { throw std::invalid_argument("polynomial " + p.str() + " does not fit the basis"); }
    v(i) = c;
  }
  return v;
}

/// Gram matrix of sum_i p_i^2 over vec_k.
template<Scalar S>
GramSos<S> gram_of_squares(const std::vector<Polynomial<S>> & ps, int nvars, int degree)
{
  auto r = GramSos<S>::zero(nvars, degree);
  for (const auto & p : ps) {
    const Vec<S> v = coefficients_in(p, r.basis);
    r.g += v * v.transpose();
  }
  return r;
}

/// Gram matrix of sum_j v_j v_j^T for polynomial vectors v_j of length alpha.
template<Scalar S>
GramSosMatrix<S> gram_of_vectors(const std::vector<std::vector<Polynomial<S>>> & vs, int alpha, int nvars, int degree)
{
  auto r = GramSosMatrix<S>::zero(alpha, nvars, degree);
  for (const auto & v : vs) {
    if (static_cast<int>(v.size()) != alpha) { throw std::invalid_argument("polynomial vector has the wrong length"); }
    Vec<S> w = Vec<S>::Constant(alpha * r.basis.size(), S(0));
    for (int row = 0; row < alpha; ++row) {
      const Vec<S> c = coefficients_in(v[static_cast<std::size_t>(row)], r.basis);
      for (int a = 0; a < r.basis.size(); ++a) { w(a * alpha + row) = c(a); }
    }
    r.g += w * w.transpose();
  }
  return r;
}

template<Scalar To, Scalar From>
GramSos<To> convert_gram(const GramSos<From> & g)
{
  return {g.basis, convert_matrix<To, From>(g.g)};
}

template<Scalar To, Scalar From>
GramSosMatrix<To> convert_gram(const GramSosMatrix<From> & g)
{
  return {g.size, g.basis, convert_matrix<To, From>(g.g)};
}

/// One coefficient equation over block entries: sum coeff * X_block(row, col) == rhs.
template<Scalar S>
struct BlockEntry
{
  int block = 0;
  int row   = 0;
  int col   = 0;
  S coeff;
};

template<Scalar S>
struct LinearIdentity
{
  std::vector<BlockEntry<S>> entries;
  S rhs;
  std::string label;
};

/// Appends the identities as float equality constraints of @p p.
template<Scalar S>
void append_identities(SdpProblem & p, const std::vector<LinearIdentity<S>> & ids)
{
  for (const auto & id : ids) {
    SdpConstraint con;
    con.rhs   = to_double(id.rhs);
    con.label = id.label;
    std::map<int, std::vector<Eigen::Triplet<double>>> by_block;
    for (const auto & e : id.entries) { by_block[e.block].emplace_back(e.row, e.col, to_double(e.coeff)); }
    for (auto & [blk, trips] : by_block) {
      const int b = p.block_sizes.at(static_cast<std::size_t>(blk));
      SparseSym m(b, b);
      m.setFromTriplets(trips.begin(), trips.end());
      con.terms.emplace_back(blk, std::move(m));
    }
    p.constraints.push_back(std::move(con));
  }
}

/// max_i |sum coeff X - rhs| for float blocks.
template<Scalar S>
double identity_violation(const std::vector<LinearIdentity<S>> & ids, const std::vector<Mat<double>> & x)
{
  double worst = 0;
  for (const auto & id : ids) {
    double v = -to_double(id.rhs);
    for (const auto & e : id.entries) { v += to_double(e.coeff) * x[static_cast<std::size_t>(e.block)](e.row, e.col); }
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

/**
 * @brief Collects linear constraints "coefficient of each monomial matches" over SDP block entries.
 *
 * Each add_* call contributes a polynomial whose coefficients are linear in the
 * entries of one block; identities() yields one equation per monomial of the support.
 */
template<Scalar S>
class IdentityBuilder
{
public:
  IdentityBuilder(int nvars, std::string label) : nvars_(nvars), label_(std::move(label)) {}

  /// + vec^T X[off.., off..] vec with vec = basis, times @p scale.
  void add_sos(int block, int offset, const MonomialBasis & basis, const S & scale = S(1))
  {
    const int m = basis.size();
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) { add(basis[a] * basis[b], block, offset + a, offset + b, scale); }
    }
  }

  /// + tr(A(x) S(x)) for the sos-matrix Gram X[off.., off..] over basis.
  void add_trace(int block, int offset, const LinearPencil<S> & a, const MonomialBasis & basis, const S & scale = S(1))
  {
    if (a.nvars() != nvars_) { throw std::invalid_argument("pencil variable count mismatch"); }
    const int alpha = a.size();
    const int m     = basis.size();
    for (int t = 0; t <= a.nvars(); ++t) {
      const Mat<S> & at = a.coeff(t);
      const Monomial xt = t == 0 ? Monomial::one(nvars_) : Monomial::variable(nvars_, t - 1);
      for (int r = 0; r < alpha; ++r) {
        for (int c = 0; c < alpha; ++c) {
          if (is_zero(at(r, c))) { continue; }
          // A_t(r, c) S(c, r), and S(c, r) = sum G(p alpha + c, q alpha + r) m_p m_q
          for (int p = 0; p < m; ++p) {
            for (int q = 0; q < m; ++q) {
              add(xt * basis[p] * basis[q], block, offset + p * alpha + c, offset + q * alpha + r, scale * at(r, c));
            }
          }
        }
      }
    }
  }

  /// + left^T W right where W = X[row_off.., col_off..] is an off-diagonal part of a symmetric block.
  void add_bilinear(int block, int row_off, const MonomialBasis & left, int col_off, const MonomialBasis & right,
                    const S & scale = S(1))
  {
    const S h = scale * S(1) / S(2);
    for (int p = 0; p < left.size(); ++p) {
      for (int q = 0; q < right.size(); ++q) {
        add(left[p] * right[q], block, row_off + p, col_off + q, h);
        add(left[p] * right[q], block, col_off + q, row_off + p, h);
      }
    }
  }

  /// + scale * X(i, j) * mono (X(i, j) and X(j, i) are the same variable).
  void add_entry(int block, int i, int j, const Monomial & mono, const S & scale = S(1))
  {
    if (i == j) {
      add(mono, block, i, i, scale);
    } else {
      const S h = scale * S(1) / S(2);
      add(mono, block, i, j, h);
      add(mono, block, j, i, h);
    }
  }

  /// Right-hand side: the identity reads sum of contributions == target.
  void set_target(const Polynomial<S> & f)
  {
    if (f.nvars() != nvars_) { throw std::invalid_argument("target variable count mismatch"); }
    target_ = f;
  }

  /// Highest monomial degree touched so far (including the target).
  int degree() const
  {
    int d = target_ ? target_->degree() : -1;
    for (const auto & [m, row] : coeffs_) { d = std::max(d, m.degree()); }
    return d;
  }

  /// One equation per monomial of degree <= max_degree, in basis order.
  std::vector<LinearIdentity<S>> identities(int max_degree) const
  {
    if (degree() > max_degree) { throw std::logic_error("identity has terms beyond its declared degree"); }
    std::vector<LinearIdentity<S>> out;
    for (const auto & mono : MonomialBasis(nvars_, std::max(max_degree, 0))) {
      LinearIdentity<S> id{{}, target_ ? target_->coeff(mono) : S(0), label_ + ":" + mono.str()};
      const auto it = coeffs_.find(mono);
      if (it != coeffs_.end()) {
        for (const auto & [key, v] : it->second) {
          if (!is_zero(v)) { id.entries.push_back({key.first, key.second.first, key.second.second, v}); }
        }
      }
      out.push_back(std::move(id));
    }
    return out;
  }

  /// Appends identities(max_degree) to @p p; returns how many.
  int emit(SdpProblem & p, int max_degree) const
  {
    const auto ids = identities(max_degree);
    append_identities(p, ids);
    return static_cast<int>(ids.size());
  }

private:
  void add(const Monomial & mono, int block, int i, int j, const S & v)
  {
    if (mono.nvars() != nvars_) { throw std::invalid_argument("monomial variable count mismatch"); }
    if (is_zero(v)) { return; }
    auto [it, ins] = coeffs_[mono].try_emplace({block, {i, j}}, S(0));
    it->second += v;
  }

  int nvars_;
  std::string label_;
  std::map<Monomial, std::map<std::pair<int, std::pair<int, int>>, S>> coeffs_;
  std::optional<Polynomial<S>> target_;
};

/**
 * @brief The query f in M_A^(k): f = s + tr(A S) with s sos of degree 2k and S an sos-matrix over vec_k.
 */
template<Scalar S>
struct MembershipProblem
{
  LinearPencil<S> pencil;
  Polynomial<S> target;
  int level = 0;
};

/// Block indices used by assemble_membership_sdp.
inline constexpr int kSosBlock    = 0;
inline constexpr int kMatrixBlock = 1;

/// Coefficient equations of f = s + tr(A S) over the blocks [G_s, G_S].
template<Scalar S>
std::vector<LinearIdentity<S>> membership_identities(const MembershipProblem<S> & m)
{
  if (m.level < 0) { throw std::invalid_argument("membership level must be >= 0"); }
  if (m.target.nvars() != m.pencil.nvars()) { throw std::invalid_argument("target and pencil have different variable counts"); }
  if (m.target.degree() > 2 * m.level + 1) {
    throw std::invalid_argument("target degree " + std::to_string(m.target.degree()) + " exceeds 2k+1 = " +
                                std::to_string(2 * m.level + 1));
  }
  const MonomialBasis basis(m.pencil.nvars(), m.level);
  IdentityBuilder<S> id(m.pencil.nvars(), "f");
  id.add_sos(kSosBlock, 0, basis);
  id.add_trace(kMatrixBlock, 0, m.pencil, basis);
  id.set_target(m.target);
  return id.identities(2 * m.level + 1);
}

/**
 * @brief Feasibility SDP for f in M_A^(k), objective minimize tr(G_s) + tr(G_S).
 *
 * Throws std::invalid_argument when deg f > 2k + 1.
 */
template<Scalar S>
SdpProblem assemble_membership_sdp(const MembershipProblem<S> & m)
{
  const auto ids = membership_identities(m);
  const int sk   = basis_vector(m.pencil.nvars(), m.level).size();
  SdpProblem p;
  p.add_block(sk, "s");
  p.add_block(m.pencil.size() * sk, "S");
  for (int k = 0; k < 2; ++k) {
    const int b                              = p.block_sizes[static_cast<std::size_t>(k)];
    p.objective[static_cast<std::size_t>(k)] = Mat<double>::Identity(b, b).sparseView();
  }
  append_identities(p, ids);
  return p;
}

/// Gram pair (s, S) answering a membership query.
template<Scalar S>
struct MembershipGrams
{
  GramSos<S> s;
  GramSosMatrix<S> big_s;
};

/// Gram data read back from a membership SDP solution.
MembershipGrams<double> membership_grams(const SdpSolution & sol, int alpha, int nvars, int level);

}  // namespace lmicert

#endif  // LMICERT__GRAM_HPP_
