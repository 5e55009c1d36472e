#include "lmicert/rounding.hpp"

#include "lmicert/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace lmicert {

namespace {

using Faces = std::vector<Mat<Rational>>;

// identities in the coordinates M_k with X_k = P_k M_k P_k^T
std::vector<LinearIdentity<Rational>> restrict_identities(const std::vector<LinearIdentity<Rational>> & ids,
                                                          const Faces & faces)
{
  const std::size_t nb = faces.size();
  std::vector<std::vector<std::vector<std::pair<Eigen::Index, Rational>>>> rows(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const Mat<Rational> & p = faces[k];
    rows[k].resize(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index a = 0; a < p.cols(); ++a) {
        if (!p(i, a).is_zero()) { rows[k][static_cast<std::size_t>(i)].emplace_back(a, p(i, a)); }
      }
    }
  }
  std::vector<LinearIdentity<Rational>> out;
  out.reserve(ids.size());
  for (const auto & id : ids) {
    std::map<std::tuple<int, Eigen::Index, Eigen::Index>, Rational> acc;
    for (const auto & en : id.entries) {
      const auto k = static_cast<std::size_t>(en.block);
      for (const auto & [a, pa] : rows[k][static_cast<std::size_t>(en.row)]) {
        for (const auto & [b, pb] : rows[k][static_cast<std::size_t>(en.col)]) {
          acc[{en.block, a, b}] += en.coeff * pa * pb;
        }
      }
    }
    LinearIdentity<Rational> r{{}, id.rhs, id.label};
    for (const auto & [key, v] : acc) {
      if (!v.is_zero()) {
        r.entries.push_back({std::get<0>(key), static_cast<int>(std::get<1>(key)), static_cast<int>(std::get<2>(key)), v});
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// SDP over the nonempty blocks; entries are re-indexed accordingly
SdpProblem block_sdp(const std::vector<int> & sizes, const std::vector<LinearIdentity<Rational>> & ids,
                     std::vector<int> & index, bool trace_objective)
{
  SdpProblem p;
  index.assign(sizes.size(), -1);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) { continue; }
    index[k] = p.add_block(sizes[k]);
    if (trace_objective) { p.objective.back() = Mat<double>::Identity(sizes[k], sizes[k]).sparseView(); }
  }
  auto moved = ids;
  for (auto & id : moved) {
    for (auto & e : id.entries) { e.block = index[static_cast<std::size_t>(e.block)]; }
  }
  append_identities(p, moved);
  return p;
}

std::vector<Mat<double>> unpack(const std::vector<int> & sizes, const std::vector<int> & index, const SdpSolution & sol)
{
  std::vector<Mat<double>> x(sizes.size());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    x[k] = index[k] < 0 ? Mat<double>(0, 0) : sol.primal[static_cast<std::size_t>(index[k])];
  }
  return x;
}

bool usable(const SdpProblem & p, const SdpSolution & sol)
{
  return sol.primal.size() == p.block_sizes.size() && sol.status != SdpStatus::PrimalInfeasible &&
         sol.status != SdpStatus::DualInfeasible && sol.primal_residual <= 1e-6;
}

// centered point: zero objective inside the trace ball sum tr <= radius
std::optional<std::vector<Mat<double>>> centered_solve(const std::vector<int> & sizes,
                                                       const std::vector<LinearIdentity<Rational>> & ids, double radius,
                                                       const SdpSettings & st)
{
  std::vector<int> index;
  SdpProblem p = block_sdp(sizes, ids, index, false);
  const int t  = p.add_block(1, "slack");
  SdpConstraint ball;
  ball.rhs = radius;
  for (int k = 0; k <= t; ++k) {
    const int b = p.block_sizes[static_cast<std::size_t>(k)];
    ball.terms.emplace_back(k, SparseSym(Mat<double>::Identity(b, b).sparseView()));
  }
  p.constraints.push_back(std::move(ball));
  const SdpSolution sol = solve(p, st);
  if (!usable(p, sol)) { return std::nullopt; }
  return unpack(sizes, index, sol);
}

double min_trace(const std::vector<int> & sizes, const std::vector<LinearIdentity<Rational>> & ids, const SdpSettings & st)
{
  std::vector<int> index;
  const SdpProblem p    = block_sdp(sizes, ids, index, true);
  const SdpSolution sol = solve(p, st);
  return usable(p, sol) ? sol.objective_value : -1;
}

// exact basis of the complement of the kernel at a clear eigenvalue gap, as columns in the current coordinates
// one candidate per accepted denominator, smallest first; empty when no clear kernel
std::vector<Mat<Rational>> shrink_block(const Mat<double> & m, double scale, const RoundingSettings & st)
{
  const Eigen::Index r = m.rows();
  if (r == 0) { return {}; }
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(0.5 * (m + m.transpose()));
  // the largest eigenvalue over all blocks closes the spectrum as a sentinel
  Vec<double> ev(r + 1);
  ev << es.eigenvalues().cwiseMax(0.0), scale;
  Eigen::Index q = 0;
  double best    = st.kernel_gap;
  for (Eigen::Index i = 0; i < r; ++i) {
    if (ev(i) > st.kernel_cut * scale) { break; }
    const double ratio = ev(i + 1) / std::max(ev(i), 1e-300);
    if (ratio >= best) {
      best = ratio;
      q    = i + 1;
    }
  }
  if (q == 0) { return {}; }
  if (q == r) { return {Mat<Rational>(r, 0)}; }
  // complete pivoting keeps every entry of the reduced kernel rows within [-1, 1]
  Mat<double> kt = es.eigenvectors().leftCols(q).transpose();
  std::vector<int> piv;
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  for (Eigen::Index row = 0; row < q; ++row) {
    Eigen::Index br = row, bc = -1;
    double big = 0;
    for (Eigen::Index i = row; i < q; ++i) {
      for (Eigen::Index j = 0; j < r; ++j) {
        if (!used[static_cast<std::size_t>(j)] && std::abs(kt(i, j)) > big) {
          big = std::abs(kt(i, j));
          br  = i;
          bc  = j;
        }
      }
    }
    if (bc < 0 || big < 1e-8) { return {}; }
    kt.row(row).swap(kt.row(br));
    kt.row(row) /= kt(row, bc);
    for (Eigen::Index i = 0; i < q; ++i) {
      if (i != row) { kt.row(i) -= kt(i, bc) * kt.row(row); }
    }
    used[static_cast<std::size_t>(bc)] = true;
    piv.push_back(static_cast<int>(bc));
  }
  std::vector<Mat<Rational>> out;
  for (std::int64_t den : st.face_denominators) {
    const double slack = st.face_tolerance / static_cast<double>(den * den);
    Mat<Rational> ke(q, r);
    bool ok = true;
    for (Eigen::Index i = 0; i < q && ok; ++i) {
      for (Eigen::Index j = 0; j < r && ok; ++j) {
        ke(i, j) = Rational::approximate(kt(i, j), den);
        ok       = std::abs(ke(i, j).to_double() - kt(i, j)) <= slack;
      }
    }
    if (!ok) { continue; }
    Mat<Rational> p  = Mat<Rational>::Constant(r, r - q, Rational(0));
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < r; ++j) {
      if (used[static_cast<std::size_t>(j)]) { continue; }
      p(j, col) = Rational(1);
      for (Eigen::Index i = 0; i < q; ++i) { p(piv[static_cast<std::size_t>(i)], col) = -ke(i, j); }
      ++col;
    }
    if (out.empty() || out.back() != p) { out.push_back(std::move(p)); }
  }
  return out;
}

}  // namespace

Mat<Rational> approximate_matrix(const Mat<double> & m, std::int64_t max_den)
{
  Mat<Rational> r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) { r(i, j) = Rational::approximate(m(i, j), max_den); }
  }
  return r;
}

bool identities_hold(const std::vector<LinearIdentity<Rational>> & ids, const std::vector<Mat<Rational>> & x)
{
  for (const auto & id : ids) {
    Rational v = -id.rhs;
    for (const auto & e : id.entries) { v += e.coeff * x.at(static_cast<std::size_t>(e.block))(e.row, e.col); }
    if (!v.is_zero()) { return false; }
  }
  return true;
}

std::optional<std::vector<Mat<Rational>>> round_onto_identities(const std::vector<int> & sizes,
                                                                const std::vector<LinearIdentity<Rational>> & ids,
                                                                const std::vector<Mat<double>> & x, std::int64_t den)
{
  const std::size_t nb = sizes.size();
  if (x.size() != nb) { throw std::invalid_argument("block count mismatch"); }
  std::vector<Eigen::Index> offset(nb + 1, 0);
  for (std::size_t k = 0; k < nb; ++k) {
    const Eigen::Index r = sizes[k];
    offset[k + 1]        = offset[k] + r * (r + 1) / 2;
  }
  const Eigen::Index nparam = offset[nb];
  auto param                = [&](std::size_t k, Eigen::Index a, Eigen::Index b) {
    if (a > b) { std::swap(a, b); }
    const Eigen::Index r = sizes[k];
    return offset[k] + a * r - a * (a - 1) / 2 + (b - a);
  };

  Vec<Rational> m0(nparam);
  for (std::size_t k = 0; k < nb; ++k) {
    for (Eigen::Index a = 0; a < sizes[k]; ++a) {
      for (Eigen::Index b = a; b < sizes[k]; ++b) {
        m0(param(k, a, b)) = Rational::approximate(0.5 * (x[k](a, b) + x[k](b, a)), den);
      }
    }
  }

  // E delta = rhs - E m0 with minimum norm delta
  const auto m    = static_cast<Eigen::Index>(ids.size());
  Mat<Rational> e = Mat<Rational>::Constant(m, nparam + 1, Rational(0));
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto & id = ids[static_cast<std::size_t>(i)];
    Rational v      = id.rhs;
    for (const auto & en : id.entries) {
      const Eigen::Index j = param(static_cast<std::size_t>(en.block), en.row, en.col);
      e(i, j) += en.coeff;
      v -= en.coeff * m0(j);
    }
    e(i, nparam) = v;
  }
  const auto piv = rref(e, 0.0, nparam);
  const auto rk  = static_cast<Eigen::Index>(piv.size());
  for (Eigen::Index i = rk; i < m; ++i) {
    if (!e(i, nparam).is_zero()) { return std::nullopt; }
  }
  Vec<Rational> mx = m0;
  if (rk > 0) {
    const Mat<Rational> e2 = e.topLeftCorner(rk, nparam);
    const Vec<Rational> r2 = e.block(0, nparam, rk, 1);
    const auto y           = solve_linear<Rational>(Mat<Rational>(e2 * e2.transpose()), r2);
    if (!y) { return std::nullopt; }
    mx += e2.transpose() * *y;
  }

  std::vector<Mat<Rational>> out(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const Eigen::Index r = sizes[k];
    out[k].resize(r, r);
    for (Eigen::Index a = 0; a < r; ++a) {
      for (Eigen::Index b = 0; b < r; ++b) { out[k](a, b) = mx(param(k, a, b)); }
    }
    if (!is_psd_exact(out[k])) { return std::nullopt; }
  }
  return out;
}

std::optional<std::vector<Mat<Rational>>> exact_point(const std::vector<int> & sizes,
                                                      const std::vector<LinearIdentity<Rational>> & ids,
                                                      const RoundingSettings & st)
{
  const std::size_t nb = sizes.size();
  Faces faces(nb);
  for (std::size_t k = 0; k < nb; ++k) { faces[k] = Mat<Rational>::Identity(sizes[k], sizes[k]); }
  std::vector<LinearIdentity<Rational>> cur = ids;
  std::vector<int> cur_sizes                = sizes;

  // min trace can stall on faces of high depth where the centered problem is still solvable
  const double tr = min_trace(cur_sizes, cur, st.sdp);
  double radius   = 2 * tr + 1;
  std::optional<std::vector<Mat<double>>> x;
  if (tr >= 0) {
    x = centered_solve(cur_sizes, cur, radius, st.sdp);
  } else {
    for (double r : {1e1, 1e2, 1e3}) {
      if ((x = centered_solve(cur_sizes, cur, r, st.sdp))) {
        radius = r;
        break;
      }
    }
  }
  for (int round = 0; round < st.max_rounds && x; ++round) {
    for (std::int64_t den : st.value_denominators) {
      if (auto m = round_onto_identities(cur_sizes, cur, *x, den)) {
        std::vector<Mat<Rational>> out(nb);
        for (std::size_t k = 0; k < nb; ++k) { out[k] = faces[k] * (*m)[k] * faces[k].transpose(); }
        if (identities_hold(ids, out)) { return out; }
      }
    }
    double scale = 0;
    for (const auto & b : *x) {
      if (b.size()) { scale = std::max(scale, Eigen::SelfAdjointEigenSolver<Mat<double>>(b).eigenvalues().maxCoeff()); }
    }
    std::vector<std::vector<Mat<Rational>>> cand(nb);
    std::size_t depth = 0;
    for (std::size_t k = 0; k < nb; ++k) {
      cand[k] = shrink_block((*x)[k], scale, st);
      depth   = std::max(depth, cand[k].size());
    }
    if (depth == 0) { return std::nullopt; }
    // smallest denominators first; a wrong face shows up as an infeasible restriction
    std::optional<std::vector<Mat<double>>> next;
    for (std::size_t level = 0; level < depth && !next; ++level) {
      Faces trial = faces;
      std::vector<int> sizes_trial = cur_sizes;
      for (std::size_t k = 0; k < nb; ++k) {
        if (cand[k].empty()) { continue; }
        trial[k]       = faces[k] * cand[k][std::min(level, cand[k].size() - 1)];
        sizes_trial[k] = static_cast<int>(trial[k].cols());
      }
      auto ids_trial = restrict_identities(ids, trial);
      next           = centered_solve(sizes_trial, ids_trial, radius, st.sdp);
      if (next) {
        faces     = std::move(trial);
        cur_sizes = std::move(sizes_trial);
        cur       = std::move(ids_trial);
      }
    }
    x = std::move(next);
  }
  return std::nullopt;
}

}  // namespace lmicert
