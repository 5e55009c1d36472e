#include "lmicert/sdp.hpp"

#include "lmicert/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace lmicert {

int SdpProblem::add_block(int size, std::string label)
{
  if (size < 1) { throw std::invalid_argument("block size must be >= 1"); }
  block_sizes.push_back(size);
  block_labels.push_back(std::move(label));
  objective.emplace_back(size, size);
  return num_blocks() - 1;
}

void SdpProblem::validate() const
{
  const auto nb = block_sizes.size();
  if (objective.size() != nb) { throw std::invalid_argument("objective needs one matrix per block"); }
  auto check = [&](int k, const SparseSym & m, const char * what) {
    if (k < 0 || k >= num_blocks()) { throw std::invalid_argument(std::string(what) + ": block index out of range"); }
    const int b = block_sizes[static_cast<std::size_t>(k)];
    if (m.rows() == 0 && m.cols() == 0) { return; }
    if (m.rows() != b || m.cols() != b) { throw std::invalid_argument(std::string(what) + ": block size mismatch"); }
    const SparseSym asym = m - SparseSym(m.transpose());
    if (asym.norm() > 1e-12 * (1.0 + m.norm())) { throw std::invalid_argument(std::string(what) + ": matrix not symmetric"); }
  };
  for (int k = 0; k < num_blocks(); ++k) { check(k, objective[static_cast<std::size_t>(k)], "objective"); }
  for (const auto & c : constraints) {
    for (const auto & [k, m] : c.terms) { check(k, m, "constraint"); }
  }
}

const char * to_string(SdpStatus s)
{
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::PrimalInfeasible: return "primal-infeasible";
    case SdpStatus::DualInfeasible: return "dual-infeasible";
    case SdpStatus::Inaccurate: return "inaccurate";
    case SdpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

using Blocks = std::vector<Mat<double>>;

double dot(const Blocks & a, const Blocks & b)
{
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) { s += (a[k].array() * b[k].array()).sum(); }
  return s;
}

double norm(const Blocks & a) { return std::sqrt(dot(a, a)); }

Mat<double> sym(const Mat<double> & m) { return 0.5 * (m + m.transpose()); }

// Constraint data after scaling and removal of dependent rows.
struct Prepared
{
  std::vector<int> sizes;
  std::vector<std::vector<std::pair<int, SparseSym>>> a;
  std::vector<Mat<double>> avec;  // per block, column i = vec(A_i)
  Vec<double> b;
  Blocks c;
  std::vector<int> kept;
  std::vector<double> scale;  // scaled A_i = A_i / scale_i

  int m() const { return static_cast<int>(a.size()); }
  int nblocks() const { return static_cast<int>(sizes.size()); }
};

struct Outcome
{
  SdpStatus status = SdpStatus::Inaccurate;
  Vec<double> x;  // multipliers (scaled rows)
  Blocks s, z;    // dual slack, primal matrix
  double pres = 0, dres = 0, gap = 0, kappa_over_tau = 0;
  int iterations = 0;
  double ray_residual = 0;
};

class HsdSolver
{
public:
  HsdSolver(const Prepared & d, const SdpSettings & st) : d_(d), st_(st) {}

  Outcome run();

private:
  struct Scaling
  {
    Mat<double> r, rinv;
    Vec<double> lam;
  };

  Blocks apply_g(const Vec<double> & x) const
  {
    Blocks out(static_cast<std::size_t>(d_.nblocks()));
    for (int k = 0; k < d_.nblocks(); ++k) {
      const int b = d_.sizes[static_cast<std::size_t>(k)];
      Vec<double> v = d_.m() ? Vec<double>(d_.avec[static_cast<std::size_t>(k)] * x) : Vec<double>::Zero(b * b);
      out[static_cast<std::size_t>(k)] = Eigen::Map<Mat<double>>(v.data(), b, b);
    }
    return out;
  }

  Vec<double> apply_gt(const Blocks & z) const
  {
    Vec<double> out = Vec<double>::Zero(d_.m());
    for (int k = 0; k < d_.nblocks(); ++k) {
      const auto & zk = z[static_cast<std::size_t>(k)];
      out += d_.avec[static_cast<std::size_t>(k)].transpose() * Eigen::Map<const Vec<double>>(zk.data(), zk.size());
    }
    return out;
  }

  Blocks scaled(const Blocks & v) const
  {
    Blocks out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) { out[k] = sym(w_[k].rinv * v[k] * w_[k].rinv.transpose()); }
    return out;
  }

  bool factor_normal_equations();

  // Stacked svec of a block list (off-diagonal entries weighted by sqrt 2).
  Vec<double> svec(const Blocks & v) const
  {
    Vec<double> out(svec_len_);
    Eigen::Index p = 0;
    for (const auto & m : v) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out(p++) = m(j, j);
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) { out(p++) = std::sqrt(2.0) * m(i, j); }
      }
    }
    return out;
  }

  Blocks smat(const Vec<double> & v) const
  {
    Blocks out;
    Eigen::Index p = 0;
    for (int b : d_.sizes) {
      Mat<double> m(b, b);
      for (int j = 0; j < b; ++j) {
        m(j, j) = v(p++);
        for (int i = j + 1; i < b; ++i) { m(i, j) = m(j, i) = v(p++) / std::sqrt(2.0); }
      }
      out.push_back(std::move(m));
    }
    return out;
  }

  // Solves the scaled KKT system  V^T uz = bx,  V ux - uz = bz; refinement steps are kept only when they help.
  std::pair<Vec<double>, Vec<double>> solve_kkt_vec(const Vec<double> & bx, const Vec<double> & q) const
  {
    auto sol      = solve_kkt_once(bx, q);
    auto residual = [&](const Vec<double> & ux, const Vec<double> & uz, Vec<double> & e1, Vec<double> & e2) {
      e1 = bx - v_.transpose() * uz;
      e2 = q - (v_ * ux - uz);
      return std::sqrt(e1.squaredNorm() + e2.squaredNorm());
    };
    Vec<double> e1, e2;
    double err = residual(sol.first, sol.second, e1, e2);
    for (int step = 0; step < 3 && err > 0; ++step) {
      auto corr          = solve_kkt_once(e1, e2);
      const Vec<double> ux = sol.first + corr.first;
      const Vec<double> uz = sol.second + corr.second;
      Vec<double> f1, f2;
      const double e = residual(ux, uz, f1, f2);
      if (!(e < 0.5 * err)) { break; }
      sol = {ux, uz};
      err = e;
      e1  = std::move(f1);
      e2  = std::move(f2);
    }
    return sol;
  }

  std::pair<Vec<double>, Blocks> solve_kkt(const Vec<double> & bx, const Blocks & bz_scaled) const
  {
    auto [ux, uz] = solve_kkt_vec(bx, svec(bz_scaled));
    return {ux, smat(uz)};
  }

  // V^T V ux = bx + V^T q through V = QR, then uz = V ux - q.
  std::pair<Vec<double>, Vec<double>> solve_kkt_once(const Vec<double> & bx, const Vec<double> & q) const
  {
    const int m = d_.m();
    if (m == 0) { return {Vec<double>(), -q}; }
    Vec<double> ux;
    if (use_qr_) {
      const auto r   = qr_.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
      Vec<double> t  = r.transpose().solve(bx);
      Vec<double> qq = qr_.householderQ().transpose() * q;
      t += qq.head(m);
      ux = r.solve(t);
    } else {
      ux = llt_.solve(bx + v_.transpose() * q);
    }
    return {ux, v_ * ux - q};
  }

  // Nesterov-Todd scaling of the current (s, z): R^T z R = R^{-1} s R^{-T} = diag(lambda).
  static bool compute_scaling(std::vector<Scaling> & w, const Blocks & s, const Blocks & z)
  {
    w.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto b = s[k].rows();
      w[k].r       = Mat<double>::Identity(b, b);
      w[k].rinv    = Mat<double>::Identity(b, b);
      if (!rescale(w[k], s[k], z[k])) { return false; }
    }
    return true;
  }

  double max_step(const Blocks & ds, const Blocks & dz, double dtau, double dkappa) const;
  static bool rescale(Scaling & w, const Mat<double> & snew, const Mat<double> & znew);

  const Prepared & d_;
  const SdpSettings & st_;
  std::vector<Scaling> w_;
  Mat<double> v_;  // column i = svec(Rinv A_i Rinv^T) over all blocks
  Eigen::HouseholderQR<Mat<double>> qr_;
  Eigen::LLT<Mat<double>> llt_;
  Eigen::LDLT<Mat<double>> gtg_;
  bool use_qr_           = true;
  Eigen::Index svec_len_ = 0;
  Vec<double> x_;
  Blocks s_, z_;
  double tau_ = 1, kappa_ = 1;
};

bool HsdSolver::factor_normal_equations()
{
  const int m = d_.m();
  v_          = Mat<double>::Zero(svec_len_, m);
  for (int i = 0; i < m; ++i) {
    Blocks bi;
    for (int k = 0; k < d_.nblocks(); ++k) {
      bi.push_back(Mat<double>::Zero(d_.sizes[static_cast<std::size_t>(k)], d_.sizes[static_cast<std::size_t>(k)]));
    }
    for (const auto & [blk, ai] : d_.a[static_cast<std::size_t>(i)]) {
      const auto & rinv = w_[static_cast<std::size_t>(blk)].rinv;
      bi[static_cast<std::size_t>(blk)] += rinv * ai * rinv.transpose();
    }
    for (auto & b : bi) { b = sym(b); }
    v_.col(i) = svec(bi);
  }
  if (m == 0) { return true; }
  if (v_.rows() >= m) {
    qr_.compute(v_);
    const Vec<double> diag = qr_.matrixQR().diagonal().head(m).cwiseAbs();
    use_qr_                = diag.minCoeff() > 1e-13 * diag.maxCoeff();
    if (use_qr_) { return true; }
  }
  use_qr_             = false;
  const Mat<double> h = v_.transpose() * v_;
  const double scale  = std::max(1.0, h.diagonal().maxCoeff());
  for (double reg = st_.regularization; reg <= 1e-6; reg *= 1e3) {
    llt_.compute(h + Mat<double>::Identity(m, m) * (reg * scale));
    if (llt_.info() == Eigen::Success) { return true; }
  }
  return false;
}

double HsdSolver::max_step(const Blocks & ds, const Blocks & dz, double dtau, double dkappa) const
{
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w_.size(); ++k) {
    const Vec<double> isq = w_[k].lam.cwiseSqrt().cwiseInverse();
    for (const Mat<double> * dm : {&ds[k], &dz[k]}) {
      const Mat<double> t = isq.asDiagonal() * (*dm) * isq.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Mat<double>> es(sym(t), Eigen::EigenvaluesOnly);
      const double mn = es.eigenvalues()(0);
      if (mn < 0) { alpha = std::min(alpha, -1.0 / mn); }
    }
  }
  if (dtau < 0) { alpha = std::min(alpha, -tau_ / dtau); }
  if (dkappa < 0) { alpha = std::min(alpha, -kappa_ / dkappa); }
  return alpha;
}

// Updates R, R^{-1}, lambda from the scaled iterates Lambda + alpha*dS, Lambda + alpha*dZ.
bool HsdSolver::rescale(Scaling & w, const Mat<double> & snew, const Mat<double> & znew)
{
  Eigen::LLT<Mat<double>> l1(sym(snew)), l2(sym(znew));
  if (l1.info() != Eigen::Success || l2.info() != Eigen::Success) { return false; }
  const Mat<double> L1 = l1.matrixL();
  const Mat<double> L2 = l2.matrixL();
  Eigen::JacobiSVD<Mat<double>> svd(L2.transpose() * L1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec<double> lam = svd.singularValues();
  if (lam.minCoeff() <= 0 || !lam.allFinite()) { return false; }
  const Vec<double> isq = lam.cwiseSqrt().cwiseInverse();
  w.r    = w.r * L1 * svd.matrixV() * isq.asDiagonal();
  w.rinv = isq.asDiagonal() * svd.matrixU().transpose() * L2.transpose() * w.rinv;
  w.lam  = lam;
  return true;
}

Outcome HsdSolver::run()
{
  const int m  = d_.m();
  const int nb = d_.nblocks();
  Outcome out;
  int nu = 0;
  for (int b : d_.sizes) { nu += b; }

  Blocks h = d_.c;
  const Vec<double> c = -d_.b;
  const double resx0  = std::max(1.0, c.norm());
  const double resz0  = std::max(1.0, norm(h));

  // initial point: least-squares x, minimum-norm z, shifted into the interior
  Vec<double> x0 = Vec<double>::Zero(m);
  Blocks s0 = h, z0;
  {
    Mat<double> gtg = Mat<double>::Zero(m, m);
    for (const auto & a : d_.avec) { gtg.noalias() += a.transpose() * a; }
    Vec<double> w = Vec<double>::Zero(m);
    if (m > 0) {
      gtg_.compute(gtg);
      x0 = gtg_.solve(apply_gt(h));
      w  = gtg_.solve(-c);
    }
    const Blocks gx = apply_g(x0);
    for (int k = 0; k < nb; ++k) { s0[static_cast<std::size_t>(k)] = sym(h[static_cast<std::size_t>(k)] - gx[static_cast<std::size_t>(k)]); }
    z0 = apply_g(w);
  }
  auto shift = [&](Blocks & v) {
    double ts = -std::numeric_limits<double>::infinity();
    for (const auto & vk : v) { ts = std::max(ts, -min_eigenvalue(vk)); }
    const double nrm = norm(v);
    if (ts >= -1e-8 * std::max(nrm, 1.0)) {
      for (auto & vk : v) { vk += Mat<double>::Identity(vk.rows(), vk.cols()) * (1.0 + ts); }
    }
  };
  shift(s0);
  shift(z0);

  svec_len_ = 0;
  for (int b : d_.sizes) { svec_len_ += b * (b + 1) / 2; }
  if (!compute_scaling(w_, s0, z0)) {
    out.status = SdpStatus::Inaccurate;
    return out;
  }
  s_     = s0;
  z_     = z0;
  x_     = x0;
  tau_   = 1;
  kappa_ = 1;

  double best_merit = std::numeric_limits<double>::infinity();
  int best_iter     = 0;
  Outcome best;

  for (int iter = 0;; ++iter) {
    const Blocks & s = s_;
    const Blocks & z = z_;
    const double gap = dot(s, z);
    const double mu = (gap + tau_ * kappa_) / (nu + 1);

    const Vec<double> gtz = apply_gt(z);
    const Blocks gx       = apply_g(x_);
    const Vec<double> r1  = gtz + c * tau_;
    Blocks r2(static_cast<std::size_t>(nb)), gxs(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      gxs[kk]       = gx[kk] + s[kk];
      r2[kk]        = gxs[kk] - h[kk] * tau_;
    }
    const double cx = c.dot(x_);
    const double hz = dot(h, z);
    const double r3 = cx + hz + kappa_;

    const double pres = r1.norm() / tau_ / resx0;
    const double dres = norm(r2) / tau_ / resz0;
    const double pobj = hz / tau_;
    const double dobj = -cx / tau_;
    const double relgap = (gap / (tau_ * tau_)) / std::max({1.0, std::abs(pobj), std::abs(dobj)});
    const double pinf = hz < 0 ? gtz.norm() / resx0 / (-hz) : std::numeric_limits<double>::infinity();
    const double dinf = cx < 0 ? norm(gxs) / resz0 / (-cx) : std::numeric_limits<double>::infinity();

    if (st_.verbose) {
      std::fprintf(stderr, "%3d  pobj % .8e  dobj % .8e  pres %.2e  dres %.2e  gap %.2e  k/t %.2e\n", iter, pobj, dobj,
                   pres, dres, relgap, kappa_ / tau_);
    }

    auto snapshot = [&](SdpStatus stat) {
      Outcome o;
      o.status         = stat;
      o.x              = x_ / tau_;
      o.s              = s;
      o.z              = z;
      for (auto & v : o.s) { v /= tau_; }
      for (auto & v : o.z) { v /= tau_; }
      o.pres           = pres;
      o.dres           = dres;
      o.gap            = relgap;
      o.kappa_over_tau = kappa_ / tau_;
      o.iterations     = iter;
      return o;
    };

    if (pres <= st_.tol && dres <= st_.tol && relgap <= st_.tol) { return snapshot(SdpStatus::Optimal); }
    if (kappa_ / tau_ >= st_.infeas_ratio) {
      if (dinf <= st_.tol) {
        Outcome o      = snapshot(SdpStatus::PrimalInfeasible);
        o.x            = x_ / (-cx);
        o.ray_residual = dinf;
        return o;
      }
      if (pinf <= st_.tol) {
        Outcome o = snapshot(SdpStatus::DualInfeasible);
        o.z       = z;
        for (auto & v : o.z) { v /= -hz; }
        o.ray_residual = pinf;
        return o;
      }
    }

    const double merit = std::max({pres, dres, relgap});
    if (merit < 0.5 * best_merit || iter == 0) {
      best_merit = std::min(best_merit, merit);
      best_iter  = iter;
      best       = snapshot(SdpStatus::Inaccurate);
    }
    if (iter >= st_.max_iters) {
      best.status     = SdpStatus::IterationLimit;
      best.iterations = iter;
      return best;
    }
    auto give_up = [&]() {
      best.iterations = iter;
      best.status     = SdpStatus::Inaccurate;
      return best;
    };
    if (iter - best_iter > 30 || !std::isfinite(merit)) { return give_up(); }

    if (!factor_normal_equations()) { return give_up(); }

    const Blocks ht  = scaled(h);
    const Blocks r2t = scaled(r2);
    const auto [x1, z1] = solve_kkt(-c, ht);
    const double den_base = c.dot(x1) + dot(ht, z1);

    // one predictor (sigma = 0) and one corrector pass
    Blocks dsa, dza;
    double dtau_a = 0, dkappa_a = 0, sigma = 0;
    Vec<double> dx;
    Blocks ds, dz;
    double dtau = 0, dkappa = 0;
    for (int pass = 0; pass < 2; ++pass) {
      const double g = pass == 0 ? 0.0 : sigma;
      // lambda^{-1} o d_s
      Blocks ld(static_cast<std::size_t>(nb));
      double dk = -tau_ * kappa_;
      for (int k = 0; k < nb; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Vec<double> & lam = w_[kk].lam;
        Mat<double> d = Mat<double>(Vec<double>(-lam.array().square()).asDiagonal());
        if (pass == 1) {
          d -= 0.5 * (dsa[kk] * dza[kk] + dza[kk] * dsa[kk]);
          d += Mat<double>::Identity(lam.size(), lam.size()) * (sigma * mu);
        }
        Mat<double> u(lam.size(), lam.size());
        for (int i = 0; i < lam.size(); ++i) {
          for (int j = 0; j < lam.size(); ++j) { u(i, j) = 2.0 * d(i, j) / (lam(i) + lam(j)); }
        }
        ld[kk] = u;
      }
      if (pass == 1) { dk += -dtau_a * dkappa_a + sigma * mu; }

      Blocks bz(static_cast<std::size_t>(nb));
      for (int k = 0; k < nb; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        bz[kk]        = -(1.0 - g) * r2t[kk] - ld[kk];
      }
      const auto [x2, z2] = solve_kkt(-(1.0 - g) * r1, bz);
      dtau = (-(1.0 - g) * r3 - dk / tau_ - c.dot(x2) - dot(ht, z2)) / (den_base - kappa_ / tau_);
      dx   = x2 + dtau * x1;
      dz.assign(static_cast<std::size_t>(nb), Mat<double>());
      ds.assign(static_cast<std::size_t>(nb), Mat<double>());
      for (int k = 0; k < nb; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        dz[kk]        = z2[kk] + dtau * z1[kk];
        ds[kk]        = ld[kk] - dz[kk];
      }
      dkappa = (dk - kappa_ * dtau) / tau_;
      if (pass == 0) {
        const double amax = std::min(1.0, max_step(ds, dz, dtau, dkappa));
        sigma             = std::pow(1.0 - amax, 3);
        dsa               = ds;
        dza               = dz;
        dtau_a            = dtau;
        dkappa_a          = dkappa;
      }
    }

    const double amax = max_step(ds, dz, dtau, dkappa);
    double alpha      = std::min(1.0, st_.step_fraction * amax);
    Blocks dsu(static_cast<std::size_t>(nb)), dzu(static_cast<std::size_t>(nb));
    const Blocks gdx = apply_g(dx);
    for (int k = 0; k < nb; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      // G dx + ds - h dtau = -(1 - sigma) r2 imposed in unscaled space
      dsu[kk]       = sym(-(1.0 - sigma) * r2[kk] - gdx[kk] + h[kk] * dtau);
      dzu[kk]       = sym(w_[kk].rinv.transpose() * dz[kk] * w_[kk].rinv);
    }
    if (m > 0) {
      // least-squares touch-up so that G^T dz + c dtau = -(1 - sigma) r1 holds in unscaled space
      const Vec<double> e   = -(1.0 - sigma) * r1 - c * dtau - apply_gt(dzu);
      const Blocks fix      = apply_g(gtg_.solve(e));
      for (int k = 0; k < nb; ++k) { dzu[static_cast<std::size_t>(k)] += sym(fix[static_cast<std::size_t>(k)]); }
    }
    // rounding in the unscaled update can cost definiteness; then update in scaled (product) form
    Blocks sn(static_cast<std::size_t>(nb)), zn(static_cast<std::size_t>(nb));
    std::vector<Scaling> next;
    for (int k = 0; k < nb; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      sn[kk]        = s_[kk] + alpha * dsu[kk];
      zn[kk]        = z_[kk] + alpha * dzu[kk];
    }
    if (!compute_scaling(next, sn, zn)) {
      next    = w_;
      bool ok = true;
      for (int k = 0; k < nb && ok; ++k) {
        const auto kk         = static_cast<std::size_t>(k);
        const Mat<double> lam = w_[kk].lam.asDiagonal();
        ok                    = rescale(next[kk], lam + alpha * ds[kk], lam + alpha * dz[kk]);
        if (!ok) { break; }
        sn[kk] = sym(next[kk].r * next[kk].lam.asDiagonal() * next[kk].r.transpose());
        zn[kk] = sym(next[kk].rinv.transpose() * next[kk].lam.asDiagonal() * next[kk].rinv);
      }
      if (!ok) { return give_up(); }
    }
    if (st_.verbose) { std::fprintf(stderr, "      step %.3e (max %.3e) sigma %.2e\n", alpha, amax, sigma); }
    w_ = std::move(next);
    s_ = std::move(sn);
    z_ = std::move(zn);
    x_ += alpha * dx;
    tau_ += alpha * dtau;
    kappa_ += alpha * dkappa;
  }
}

Prepared prepare(const SdpProblem & p, std::vector<int> & zero_rows, Vec<double> & inconsistent_ray)
{
  Prepared d;
  d.sizes = p.block_sizes;
  const double sign = p.sense == Sense::Maximize ? -1.0 : 1.0;
  for (int k = 0; k < p.num_blocks(); ++k) {
    const auto & o = p.objective[static_cast<std::size_t>(k)];
    const int b    = p.block_sizes[static_cast<std::size_t>(k)];
    d.c.push_back(o.rows() == 0 ? Mat<double>::Zero(b, b) : Mat<double>(sign * Mat<double>(o)));
  }

  const int m0 = p.num_constraints();
  std::vector<double> scale(static_cast<std::size_t>(m0), 0.0);
  std::vector<int> candidates;
  for (int i = 0; i < m0; ++i) {
    const auto & con = p.constraints[static_cast<std::size_t>(i)];
    double sq        = 0;
    for (const auto & [k, a] : con.terms) { sq += a.squaredNorm(); }
    scale[static_cast<std::size_t>(i)] = std::sqrt(sq);
    if (scale[static_cast<std::size_t>(i)] <= 1e-14) {
      if (std::abs(con.rhs) > 1e-12) {
        inconsistent_ray      = Vec<double>::Zero(m0);
        inconsistent_ray(i)   = 1.0 / con.rhs;
        return d;
      }
      zero_rows.push_back(i);
      continue;
    }
    candidates.push_back(i);
  }

  // dense vec form of all nonzero rows, for rank detection
  std::size_t total = 0;
  for (int b : d.sizes) { total += static_cast<std::size_t>(b) * static_cast<std::size_t>(b); }
  std::vector<std::size_t> offset;
  {
    std::size_t o = 0;
    for (int b : d.sizes) {
      offset.push_back(o);
      o += static_cast<std::size_t>(b) * static_cast<std::size_t>(b);
    }
  }
  const int mc  = static_cast<int>(candidates.size());
  Mat<double> g = Mat<double>::Zero(static_cast<Eigen::Index>(total), mc);
  Vec<double> bc(mc);
  for (int j = 0; j < mc; ++j) {
    const int i      = candidates[static_cast<std::size_t>(j)];
    const auto & con = p.constraints[static_cast<std::size_t>(i)];
    const double sc  = scale[static_cast<std::size_t>(i)];
    for (const auto & [k, a] : con.terms) {
      const int b = d.sizes[static_cast<std::size_t>(k)];
      for (int outer = 0; outer < a.outerSize(); ++outer) {
        for (SparseSym::InnerIterator it(a, outer); it; ++it) {
          g(static_cast<Eigen::Index>(offset[static_cast<std::size_t>(k)]) + it.col() * b + it.row(), j) += it.value() / sc;
        }
      }
    }
    bc(j) = con.rhs / sc;
  }

  std::vector<int> keep_cols;
  if (mc > 0) {
    Eigen::ColPivHouseholderQR<Mat<double>> qr(g);
    qr.setThreshold(1e-10);
    const int r = static_cast<int>(qr.rank());
    for (int t = 0; t < r; ++t) { keep_cols.push_back(qr.colsPermutation().indices()(t)); }
    std::sort(keep_cols.begin(), keep_cols.end());
    if (r < mc) {
      Mat<double> gk(g.rows(), r);
      Vec<double> bk(r);
      for (int t = 0; t < r; ++t) {
        gk.col(t) = g.col(keep_cols[static_cast<std::size_t>(t)]);
        bk(t)     = bc(keep_cols[static_cast<std::size_t>(t)]);
      }
      Eigen::ColPivHouseholderQR<Mat<double>> qk(gk);
      std::vector<bool> is_kept(static_cast<std::size_t>(mc), false);
      for (int t : keep_cols) { is_kept[static_cast<std::size_t>(t)] = true; }
      for (int j = 0; j < mc; ++j) {
        if (is_kept[static_cast<std::size_t>(j)]) { continue; }
        const Vec<double> coef = r > 0 ? Vec<double>(qk.solve(g.col(j))) : Vec<double>();
        const double pred      = r > 0 ? coef.dot(bk) : 0.0;
        const double mis       = bc(j) - pred;
        const double lim       = 1e-8 * (1.0 + std::abs(bc(j)) + (r > 0 ? coef.cwiseAbs().sum() * bk.cwiseAbs().maxCoeff() : 0.0));
        if (std::abs(mis) > lim) {
          // y_j = t, y_kept = -t coef gives sum y_i A_i ~ 0 and b^T y = 1
          inconsistent_ray = Vec<double>::Zero(m0);
          const double t   = 1.0 / mis;
          const int ij     = candidates[static_cast<std::size_t>(j)];
          inconsistent_ray(ij) = t / scale[static_cast<std::size_t>(ij)];
          for (int q = 0; q < r; ++q) {
            const int iq = candidates[static_cast<std::size_t>(keep_cols[static_cast<std::size_t>(q)])];
            inconsistent_ray(iq) = -t * coef(q) / scale[static_cast<std::size_t>(iq)];
          }
          return d;
        }
      }
    }
  }

  const int m = static_cast<int>(keep_cols.size());
  d.b.resize(m);
  for (int k = 0; k < p.num_blocks(); ++k) {
    const int b = d.sizes[static_cast<std::size_t>(k)];
    d.avec.push_back(g.block(static_cast<Eigen::Index>(offset[static_cast<std::size_t>(k)]), 0, b * b, mc)(Eigen::all, keep_cols));
  }
  for (int t = 0; t < m; ++t) {
    const int j  = keep_cols[static_cast<std::size_t>(t)];
    const int i  = candidates[static_cast<std::size_t>(j)];
    const double sc = scale[static_cast<std::size_t>(i)];
    d.kept.push_back(i);
    d.scale.push_back(sc);
    d.b(t) = bc(j);
    std::vector<std::pair<int, SparseSym>> terms;
    for (const auto & [k, a] : p.constraints[static_cast<std::size_t>(i)].terms) { terms.emplace_back(k, a / sc); }
    d.a.push_back(std::move(terms));
  }
  return d;
}

}  // namespace

SdpSolution solve(const SdpProblem & problem, const SdpSettings & settings)
{
  problem.validate();
  std::vector<int> zero_rows;
  Vec<double> ray;
  const Prepared d = prepare(problem, zero_rows, ray);
  SdpSolution sol;
  const int m0 = problem.num_constraints();
  if (ray.size() > 0) {
    sol.status      = SdpStatus::PrimalInfeasible;
    sol.farkas_dual = ray;
    sol.dual        = Vec<double>::Zero(m0);
    std::vector<Mat<double>> comb;
    for (int b : problem.block_sizes) { comb.push_back(Mat<double>::Zero(b, b)); }
    for (int i = 0; i < m0; ++i) {
      if (ray(i) == 0) { continue; }
      for (const auto & [k, a] : problem.constraints[static_cast<std::size_t>(i)].terms) {
        comb[static_cast<std::size_t>(k)] += ray(i) * Mat<double>(a);
      }
    }
    double worst = 0;
    for (const auto & cm : comb) { worst = std::max(worst, cm.cwiseAbs().maxCoeff()); }
    sol.ray_residual = worst;
    return sol;
  }

  HsdSolver solver(d, settings);
  const Outcome o = solver.run();
  sol.status         = o.status;
  sol.primal_residual = o.pres;
  sol.dual_residual   = o.dres;
  sol.gap             = o.gap;
  sol.kappa_over_tau  = o.kappa_over_tau;
  sol.iterations      = o.iterations;
  sol.ray_residual    = o.ray_residual;

  const double sign = problem.sense == Sense::Maximize ? -1.0 : 1.0;
  Vec<double> y = Vec<double>::Zero(m0);
  for (int t = 0; t < d.m() && t < o.x.size(); ++t) {
    y(d.kept[static_cast<std::size_t>(t)]) = o.x(t) / d.scale[static_cast<std::size_t>(t)];
  }

  if (o.status == SdpStatus::PrimalInfeasible) {
    sol.farkas_dual = y;
    return sol;
  }
  if (o.status == SdpStatus::DualInfeasible) {
    sol.farkas_primal = o.z;
    return sol;
  }
  sol.primal         = o.z;
  sol.dual           = sign * y;
  sol.dual_slack     = o.s;
  sol.objective_value = primal_objective(problem, sol.primal);
  double by           = 0;
  for (int i = 0; i < m0; ++i) { by += problem.constraints[static_cast<std::size_t>(i)].rhs * sol.dual(i); }
  sol.dual_objective = by + problem.objective_constant;
  return sol;
}

double primal_infeasibility(const SdpProblem & problem, const std::vector<Mat<double>> & x)
{
  double worst = 0;
  for (const auto & con : problem.constraints) {
    double v = 0;
    for (const auto & [k, a] : con.terms) {
      const auto & xk = x.at(static_cast<std::size_t>(k));
      for (int outer = 0; outer < a.outerSize(); ++outer) {
        for (SparseSym::InnerIterator it(a, outer); it; ++it) { v += it.value() * xk(it.row(), it.col()); }
      }
    }
    worst = std::max(worst, std::abs(v - con.rhs));
  }
  return worst;
}

double primal_objective(const SdpProblem & problem, const std::vector<Mat<double>> & x)
{
  double v = problem.objective_constant;
  for (int k = 0; k < problem.num_blocks(); ++k) {
    const auto & a = problem.objective[static_cast<std::size_t>(k)];
    if (a.rows() == 0) { continue; }
    const auto & xk = x.at(static_cast<std::size_t>(k));
    for (int outer = 0; outer < a.outerSize(); ++outer) {
      for (SparseSym::InnerIterator it(a, outer); it; ++it) { v += it.value() * xk(it.row(), it.col()); }
    }
  }
  return v;
}

Mat<double> psd_factor(const Mat<double> & u, double tol)
{
  if (u.rows() != u.cols()) { throw std::invalid_argument("psd_factor needs a square matrix"); }
  if (u.size() == 0) { return Mat<double>(0, 0); }
  Eigen::SelfAdjointEigenSolver<Mat<double>> es(sym(u));
  const Vec<double> & ev = es.eigenvalues();
  if (ev(0) < -tol) { throw std::domain_error("psd_factor: matrix is not positive semidefinite"); }
  std::vector<int> keep;
  for (int i = static_cast<int>(ev.size()) - 1; i >= 0; --i) {
    if (ev(i) > tol) { keep.push_back(i); }
  }
  Mat<double> w(static_cast<Eigen::Index>(keep.size()), u.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    w.row(static_cast<Eigen::Index>(r)) = std::sqrt(ev(keep[r])) * es.eigenvectors().col(keep[r]).transpose();
  }
  return w;
}

}  // namespace lmicert
