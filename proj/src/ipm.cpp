// Dense homogeneous self-dual interior-point method for
//   min c'x  s.t.  Ax = b,  x in free x nonneg x PSD.
//
// Presolve eliminates the free block with a column-pivoted QR of A_free and
// drops linearly dependent rows; the remaining pure-cone problem is solved on
// the self-dual embedding with NT scaling and Mehrotra predictor-corrector
// steps. Each Newton system is solved as a least-squares problem on a QR of
// the scaled constraint matrix, which keeps late iterations accurate on the
// degenerate programs moment relaxations produce.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "momentfp/conic.hpp"

namespace mfp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct ConeBlock {
  bool psd = false;
  int offset = 0;  // within the cone part of x
  int dim = 0;
  int side = 0;
};

// ---------------------------------------------------------------------------
// NT scaling over a product of nonnegative orthants and PSD cones. Scaled
// iterates satisfy xs = zs = lambda.

class Scaling {
 public:
  explicit Scaling(const std::vector<ConeBlock>& blocks) : blocks_(blocks), data_(blocks.size()) {}

  bool compute(const VectorXd& x, const VectorXd& z) {
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      auto& d = data_[k];
      if (!b.psd) {
        const VectorXd xs = x.segment(b.offset, b.dim), zs = z.segment(b.offset, b.dim);
        if ((xs.array() <= 0).any() || (zs.array() <= 0).any()) return false;
        d.w = (xs.array() / zs.array()).sqrt();
        d.lambda = (xs.array() * zs.array()).sqrt();
        continue;
      }
      const MatrixXd X = smat(x.segment(b.offset, b.dim), b.side);
      const MatrixXd Z = smat(z.segment(b.offset, b.dim), b.side);
      Eigen::LLT<MatrixXd> lx(X), lz(Z);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const MatrixXd Lx = lx.matrixL(), Lz = lz.matrixL();
      Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
      d.lambda = svd.singularValues();
      if ((d.lambda.array() <= 0).any()) return false;
      const VectorXd isq = d.lambda.array().rsqrt();
      d.R = Lx * svd.matrixV() * isq.asDiagonal();
      d.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    }
    return true;
  }

  // z-like -> scaled: R' Z R, or w z.
  VectorXd scale_dual(const VectorXd& v) const {
    return map(v, [](const auto& d, const MatrixXd& M) -> MatrixXd { return d.R.transpose() * M * d.R; },
               [](const auto& d, const VectorXd& s) -> VectorXd { return d.w.cwiseProduct(s); });
  }
  // x-like -> scaled: R^-1 X R^-T, or x / w.
  VectorXd scale_primal(const VectorXd& v) const {
    return map(v, [](const auto& d, const MatrixXd& M) -> MatrixXd { return d.Rinv * M * d.Rinv.transpose(); },
               [](const auto& d, const VectorXd& s) -> VectorXd { return s.cwiseQuotient(d.w); });
  }
  // scaled -> x-like: R X R', or w x.
  VectorXd unscale_primal(const VectorXd& v) const {
    return map(v, [](const auto& d, const MatrixXd& M) -> MatrixXd { return d.R * M * d.R.transpose(); },
               [](const auto& d, const VectorXd& s) -> VectorXd { return d.w.cwiseProduct(s); });
  }
  // W v W: maps a dual-space direction into primal space.
  VectorXd hinv(const VectorXd& v) const { return unscale_primal(scale_dual(v)); }

  // Row-wise scale_dual of a dense matrix whose rows live in the cone space.
  MatrixXd scale_dual_rows(const MatrixXd& A) const {
    MatrixXd out(A.rows(), A.cols());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      const auto& d = data_[k];
      if (!b.psd) {
        out.middleCols(b.offset, b.dim) = A.middleCols(b.offset, b.dim) * d.w.asDiagonal();
        continue;
      }
      MatrixXd tmp(b.side, b.side);
      for (Index i = 0; i < A.rows(); ++i) {
        const VectorXd row = A.row(i).segment(b.offset, b.dim).transpose();
        tmp.noalias() = smat(row, b.side) * d.R;
        out.row(i).segment(b.offset, b.dim) = svec(d.R.transpose() * tmp).transpose();
      }
    }
    return out;
  }

  // lambda o u (Jordan product with the diagonal scaled point).
  VectorXd lambda_prod(const VectorXd& u) const {
    return diag_apply(u, [](double li, double lj) { return 0.5 * (li + lj); });
  }
  // Solves lambda o d = r for d.
  VectorXd lambda_solve(const VectorXd& r) const {
    return diag_apply(r, [](double li, double lj) { return 2.0 / (li + lj); });
  }
  VectorXd lambda_sq() const {
    VectorXd out(total());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      const auto& l = data_[k].lambda;
      if (!b.psd)
        out.segment(b.offset, b.dim) = l.cwiseProduct(l);
      else
        out.segment(b.offset, b.dim) = svec(MatrixXd(l.cwiseProduct(l).asDiagonal()));
    }
    return out;
  }

  // Largest alpha with lambda + alpha * d in the cone (infinity if unbounded).
  double max_step(const VectorXd& d) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      const auto& l = data_[k].lambda;
      if (!b.psd) {
        for (int i = 0; i < b.dim; ++i) {
          const double di = d(b.offset + i);
          if (di < 0) alpha = std::min(alpha, -l(i) / di);
        }
        continue;
      }
      const VectorXd isq = l.array().rsqrt();
      const MatrixXd M = isq.asDiagonal() * smat(d.segment(b.offset, b.dim), b.side) * isq.asDiagonal();
      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(M, Eigen::EigenvaluesOnly);
      const double mn = eig.eigenvalues()(0);
      if (mn < 0) alpha = std::min(alpha, -1.0 / mn);
    }
    return alpha;
  }

 private:
  struct Data {
    VectorXd w, lambda;
    MatrixXd R, Rinv;
  };

  int total() const { return blocks_.empty() ? 0 : blocks_.back().offset + blocks_.back().dim; }

  template <class FPsd, class FLin>
  VectorXd map(const VectorXd& v, FPsd psd, FLin lin) const {
    VectorXd out(v.size());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      if (!b.psd)
        out.segment(b.offset, b.dim) = lin(data_[k], VectorXd(v.segment(b.offset, b.dim)));
      else
        out.segment(b.offset, b.dim) = svec(psd(data_[k], smat(v.segment(b.offset, b.dim), b.side)));
    }
    return out;
  }

  template <class F>
  VectorXd diag_apply(const VectorXd& u, F f) const {
    VectorXd out(u.size());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      const auto& l = data_[k].lambda;
      if (!b.psd) {
        for (int i = 0; i < b.dim; ++i) out(b.offset + i) = f(l(i), l(i)) * u(b.offset + i);
        continue;
      }
      Index q = b.offset;
      for (int j = 0; j < b.side; ++j)
        for (int i = j; i < b.side; ++i, ++q) out(q) = f(l(i), l(j)) * u(q);
    }
    return out;
  }

  const std::vector<ConeBlock>& blocks_;
  std::vector<Data> data_;
};

VectorXd cone_identity(const std::vector<ConeBlock>& blocks, int n) {
  VectorXd e = VectorXd::Zero(n);
  for (const auto& b : blocks) {
    if (!b.psd) {
      e.segment(b.offset, b.dim).setOnes();
      continue;
    }
    Index q = b.offset;
    for (int j = 0; j < b.side; ++j) {
      e(q) = 1.0;
      q += b.side - j;
    }
  }
  return e;
}

VectorXd jordan(const std::vector<ConeBlock>& blocks, const VectorXd& u, const VectorXd& v) {
  VectorXd out(u.size());
  for (const auto& b : blocks) {
    if (!b.psd) {
      out.segment(b.offset, b.dim) = u.segment(b.offset, b.dim).cwiseProduct(v.segment(b.offset, b.dim));
      continue;
    }
    const MatrixXd U = smat(u.segment(b.offset, b.dim), b.side);
    const MatrixXd V = smat(v.segment(b.offset, b.dim), b.side);
    out.segment(b.offset, b.dim) = svec(0.5 * (U * V + V * U));
  }
  return out;
}

int cone_degree(const std::vector<ConeBlock>& blocks) {
  int nu = 0;
  for (const auto& b : blocks) nu += b.psd ? b.side : b.dim;
  return nu;
}

// ---------------------------------------------------------------------------

enum class HsdOutcome { optimal, primal_infeasible, dual_infeasible, stalled, iteration_limit };

struct HsdResult {
  HsdOutcome outcome = HsdOutcome::stalled;
  VectorXd x, y, z;
  double tau = 1.0, kappa = 1.0;
  int iterations = 0;
};

struct Direction {
  VectorXd dx, dy, dz, dxs, dzs;
  double dtau = 0.0, dkappa = 0.0;
};

HsdResult run_hsd(const MatrixXd& A, const VectorXd& b, const VectorXd& c, double offset,
                  const std::vector<ConeBlock>& blocks, const SolverSettings& st) {
  const Index m = A.rows(), n = A.cols();
  const int nu = cone_degree(blocks);
  const double tol = st.tol;
  const double nb = 1.0 + inf_norm(b), nc = 1.0 + inf_norm(c);

  HsdResult res;
  res.x = cone_identity(blocks, static_cast<int>(n));
  res.z = res.x;
  res.y = VectorXd::Zero(m);
  VectorXd &x = res.x, &y = res.y, &z = res.z;
  double &tau = res.tau, &kappa = res.kappa;
  const VectorXd e = res.x;

  Scaling scal(blocks);
  Eigen::HouseholderQR<MatrixXd> qr;

  for (int iter = 0;; ++iter) {
    res.iterations = iter;
    const VectorXd rp = A * x - b * tau;
    const VectorXd aty = A.transpose() * y;
    const VectorXd rd = aty + z - c * tau;
    const double cx = c.dot(x), by = b.dot(y);
    const double rg = kappa + cx - by;
    const double mu = (x.dot(z) + tau * kappa) / (nu + 1);

    const double pres = inf_norm(rp) / tau / nb;
    const double dres = inf_norm(rd) / tau / nc;
    const double pobj = cx / tau + offset, dobj = by / tau + offset;
    const double gap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));
    if (st.verbosity > 0)
      std::fprintf(stderr, "%3d  pobj % .9e  dobj % .9e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kap %.2e\n", iter,
                   pobj, dobj, pres, dres, gap, tau, kappa);

    if (pres <= tol && dres <= tol && gap <= tol) {
      res.outcome = HsdOutcome::optimal;
      return res;
    }
    if (by > 0 && tau < kappa && inf_norm(aty + z) / by <= tol) {
      res.outcome = HsdOutcome::primal_infeasible;
      return res;
    }
    if (cx < 0 && tau < kappa && inf_norm(A * x) / -cx <= tol) {
      res.outcome = HsdOutcome::dual_infeasible;
      return res;
    }
    if (iter >= st.max_iters) {
      res.outcome = HsdOutcome::iteration_limit;
      return res;
    }

    if (!scal.compute(x, z)) {
      res.outcome = HsdOutcome::stalled;
      return res;
    }
    // In scaled space the Newton system reduces to least-squares problems in
    // As' (As = A with rows mapped by the NT scaling). With As' = Q1 R,
    //   N dy = r - As g,  dxs = g + As' dy
    // is solved as dy = R^-1 (R^-T r - Q1'g), dxs = g + Q1 (R^-T r - Q1'g),
    // never forming A W A' or the large cancelling product As g.
    const MatrixXd As = scal.scale_dual_rows(A);
    qr.compute(As.transpose());
    if (m) {
      const VectorXd rdiag = qr.matrixQR().diagonal().head(m).cwiseAbs();
      if (!(rdiag.minCoeff() > 1e-15 * rdiag.maxCoeff())) {
        res.outcome = HsdOutcome::stalled;
        return res;
      }
    }
    const auto R = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
    auto least_squares = [&](const VectorXd& g, const VectorXd& r, VectorXd& dy, VectorXd& dxs) {
      VectorXd w = qr.householderQ().transpose() * g;
      VectorXd q = R.transpose().solve(r) - w.head(m);
      dy = R.solve(q);
      w.head(m) = q;
      w.tail(n - m).setZero();
      dxs = g + qr.householderQ() * w;
    };

    const VectorXd cs = scal.scale_dual(c);
    const VectorXd rds = scal.scale_dual(rd);
    VectorXd dy2, dxs2;
    least_squares(-cs, b, dy2, dxs2);
    const double denom = cs.dot(dxs2) - b.dot(dy2) - kappa / tau;

    auto direction = [&](double eta, const VectorXd& rc, double rtau) {
      Direction d;
      const VectorXd g = scal.lambda_solve(rc) + eta * rds;
      VectorXd dy1, dxs1;
      least_squares(g, -eta * rp, dy1, dxs1);
      d.dtau = (-eta * rg - rtau / tau - cs.dot(dxs1) + b.dot(dy1)) / denom;
      d.dxs = dxs1 + d.dtau * dxs2;
      d.dy = dy1 + d.dtau * dy2;
      d.dx = scal.unscale_primal(d.dxs);
      d.dz = -eta * rd - A.transpose() * d.dy + c * d.dtau;
      d.dzs = scal.scale_dual(d.dz);
      d.dkappa = (rtau - kappa * d.dtau) / tau;
      return d;
    };
    auto step_to_boundary = [&](const Direction& d) {
      double a = std::min(scal.max_step(d.dxs), scal.max_step(d.dzs));
      if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const VectorXd lsq = scal.lambda_sq();
    const Direction aff = direction(1.0, -lsq, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    const VectorXd rc = sigma * mu * e - lsq - jordan(blocks, aff.dxs, aff.dzs);
    const double rtau = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const Direction d = direction(1.0 - sigma, rc, rtau);
    const double alpha = std::min(1.0, 0.99 * step_to_boundary(d));
    if (!(alpha > 1e-10)) {
      res.outcome = HsdOutcome::stalled;
      return res;
    }
    x += alpha * d.dx;
    y += alpha * d.dy;
    z += alpha * d.dz;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
  }
}

// ---------------------------------------------------------------------------

// Pivoted Cholesky of a PSD Gram matrix. Returns the pivot order and rank;
// L holds the factor of the leading rank x rank pivoted block.
struct PivotedCholesky {
  std::vector<Index> perm;
  Index rank = 0;
  MatrixXd L;

  PivotedCholesky(MatrixXd G, double rel_tol) {
    const Index m = G.rows();
    perm.resize(static_cast<size_t>(m));
    for (Index i = 0; i < m; ++i) perm[static_cast<size_t>(i)] = i;
    L = MatrixXd::Zero(m, m);
    VectorXd diag = G.diagonal();
    const double scale = m ? std::max(1.0, diag.maxCoeff()) : 1.0;
    for (Index k = 0; k < m; ++k) {
      Index piv;
      const double best = diag.tail(m - k).maxCoeff(&piv);
      piv += k;
      if (best <= rel_tol * scale) break;
      if (piv != k) {
        std::swap(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(piv)]);
        std::swap(diag(k), diag(piv));
        G.row(k).swap(G.row(piv));
        G.col(k).swap(G.col(piv));
        L.row(k).swap(L.row(piv));
      }
      const double lkk = std::sqrt(diag(k));
      L(k, k) = lkk;
      const Index rest = m - k - 1;
      if (rest > 0) {
        VectorXd col = G.col(k).tail(rest);
        if (k > 0) col.noalias() -= L.block(k + 1, 0, rest, k) * L.row(k).head(k).transpose();
        L.col(k).tail(rest) = col / lkk;
        diag.tail(rest) -= L.col(k).tail(rest).cwiseAbs2();
      }
      rank = k + 1;
    }
  }
};

class Presolved {
 public:
  Presolved(const ConicProgram& p, const SolverSettings& st) : p_(p), st_(st) { build(); }

  std::optional<ConicSolution> early;  // set when presolve decides the status

  ConicSolution finish() {
    if (early) return *early;
    HsdResult r;
    if (blocks_.empty() || Ared_.cols() == 0) {
      r.outcome = HsdOutcome::optimal;
      r.x = VectorXd::Zero(Ared_.cols());
      r.z = r.x;
      r.y = VectorXd::Zero(Ared_.rows());
      r.tau = 1.0;
      r.kappa = 0.0;
      if (cred_.size() && (cred_.array() < 0).any()) r.outcome = HsdOutcome::dual_infeasible;
    } else {
      r = run_hsd(Ared_, bred_, cred_, offset_, blocks_, st_);
    }
    return recover(r);
  }

 private:
  void build() {
    p_.validate();
    m_ = p_.num_rows();
    int col = 0;
    int cone_off = 0;
    for (const auto& k : p_.cones) {
      for (int i = 0; i < k.dim(); ++i)
        (k.kind == Cone::Kind::free ? free_cols_ : cone_cols_).push_back(col + i);
      if (k.kind != Cone::Kind::free && k.dim() > 0) {
        ConeBlock b;
        b.psd = k.kind == Cone::Kind::psd;
        b.offset = cone_off;
        b.dim = k.dim();
        b.side = b.psd ? k.size : 0;
        blocks_.push_back(b);
        cone_off += k.dim();
      }
      col += k.dim();
    }
    const MatrixXd Ad = MatrixXd(p_.A);
    MatrixXd Af(m_, static_cast<Index>(free_cols_.size()));
    MatrixXd Ak(m_, static_cast<Index>(cone_cols_.size()));
    VectorXd cf(static_cast<Index>(free_cols_.size())), ck(static_cast<Index>(cone_cols_.size()));
    for (size_t j = 0; j < free_cols_.size(); ++j) {
      Af.col(static_cast<Index>(j)) = Ad.col(free_cols_[j]);
      cf(static_cast<Index>(j)) = p_.c(free_cols_[j]);
    }
    for (size_t j = 0; j < cone_cols_.size(); ++j) {
      Ak.col(static_cast<Index>(j)) = Ad.col(cone_cols_[j]);
      ck(static_cast<Index>(j)) = p_.c(cone_cols_[j]);
    }

    offset_ = p_.objective_offset;
    const Index nf = Af.cols();
    if (nf > 0 && m_ > 0) {
      qr_.compute(Af);
      qr_.setThreshold(1e-11);
      rank_ = qr_.rank();
    } else {
      rank_ = 0;
    }
    has_qr_ = nf > 0 && m_ > 0;
    if (has_qr_) {
      QtAk_ = qr_.householderQ().transpose() * Ak;
      Qtb_ = qr_.householderQ().transpose() * p_.b;
    } else {
      QtAk_ = Ak;
      Qtb_ = p_.b;
    }
    const VectorXd cperm = has_qr_ ? VectorXd(qr_.colsPermutation().transpose() * cf) : cf;
    w_ = VectorXd::Zero(rank_);
    if (rank_ > 0) {
      const auto R11 = qr_.matrixR().topLeftCorner(rank_, rank_).template triangularView<Eigen::Upper>();
      w_ = R11.transpose().solve(cperm.head(rank_));
    }
    // Free directions not seen by any row must not carry cost.
    if (rank_ < nf) {
      VectorXd resid = cperm.tail(nf - rank_);
      if (rank_ > 0) resid -= qr_.matrixR().topRightCorner(rank_, nf - rank_).transpose() * w_;
      if (inf_norm(resid) > 1e-9 * (1.0 + inf_norm(cf))) {
        early = unbounded_free_ray(resid);
        return;
      }
    }
    VectorXd lambda0 = VectorXd::Zero(m_);
    if (rank_ > 0) {
      VectorXd head = VectorXd::Zero(m_);
      head.head(rank_) = w_;
      lambda0 = qr_.householderQ() * head;
    }
    offset_ += lambda0.dot(p_.b);
    cred_ = ck - Ak.transpose() * lambda0;

    // Rows left after eliminating the free block; drop dependent ones.
    const Index mr = m_ - rank_;
    const MatrixXd Ar = QtAk_.bottomRows(mr);
    const VectorXd br = Qtb_.tail(mr);
    VectorXd rn(mr);
    for (Index i = 0; i < mr; ++i) rn(i) = Ar.row(i).norm();
    const double rmax = mr ? std::max(1.0, rn.maxCoeff()) : 1.0;
    const double cons_tol = 1e-7 * (1.0 + inf_norm(p_.b));
    std::vector<Index> live;
    for (Index i = 0; i < mr; ++i) {
      if (rn(i) > 1e-10 * rmax) {
        live.push_back(i);
        continue;
      }
      if (std::abs(br(i)) > cons_tol) {
        VectorXd yr = VectorXd::Zero(mr);
        yr(i) = br(i) > 0 ? 1.0 : -1.0;
        early = infeasible_from_rows(yr);
        return;
      }
    }
    MatrixXd An(static_cast<Index>(live.size()), Ar.cols());
    VectorXd bn(static_cast<Index>(live.size()));
    for (size_t i = 0; i < live.size(); ++i) {
      An.row(static_cast<Index>(i)) = Ar.row(live[i]) / rn(live[i]);
      bn(static_cast<Index>(i)) = br(live[i]) / rn(live[i]);
    }
    MatrixXd G = MatrixXd::Zero(An.rows(), An.rows());
    G.selfadjointView<Eigen::Lower>().rankUpdate(An);
    G = G.selfadjointView<Eigen::Lower>();
    PivotedCholesky pc(G, 1e-12);
    const Index r = pc.rank;
    if (r < An.rows()) {
      const auto L11 = pc.L.topLeftCorner(r, r).triangularView<Eigen::Lower>();
      VectorXd bk(r);
      for (Index i = 0; i < r; ++i) bk(i) = bn(pc.perm[static_cast<size_t>(i)]);
      for (Index q = r; q < An.rows(); ++q) {
        const Index dropped = pc.perm[static_cast<size_t>(q)];
        VectorXd g(r);
        for (Index i = 0; i < r; ++i) g(i) = G(pc.perm[static_cast<size_t>(i)], dropped);
        const VectorXd wts = L11.transpose().solve(L11.solve(g));
        const double mismatch = bn(dropped) - wts.dot(bk);
        if (std::abs(mismatch) > cons_tol) {
          VectorXd yr = VectorXd::Zero(mr);
          const double sgn = mismatch > 0 ? 1.0 : -1.0;
          yr(live[static_cast<size_t>(dropped)]) = sgn / rn(live[static_cast<size_t>(dropped)]);
          for (Index i = 0; i < r; ++i) {
            const Index li = live[static_cast<size_t>(pc.perm[static_cast<size_t>(i)])];
            yr(li) -= sgn * wts(i) / rn(li);
          }
          early = infeasible_from_rows(yr);
          return;
        }
      }
    }
    std::vector<Index> kept;
    for (Index i = 0; i < r; ++i) kept.push_back(pc.perm[static_cast<size_t>(i)]);
    std::sort(kept.begin(), kept.end());
    Ared_.resize(static_cast<Index>(kept.size()), Ar.cols());
    bred_.resize(static_cast<Index>(kept.size()));
    for (size_t i = 0; i < kept.size(); ++i) {
      Ared_.row(static_cast<Index>(i)) = An.row(kept[i]);
      bred_(static_cast<Index>(i)) = bn(kept[i]);
      kept_rows_.push_back(live[static_cast<size_t>(kept[i])]);
      kept_scale_.push_back(rn(live[static_cast<size_t>(kept[i])]));
    }
  }

  // Multipliers for the original rows from multipliers on the reduced rows
  // (indexed over the m - rank rows after QR), plus the objective part.
  VectorXd lift_multipliers(const VectorXd& tail, bool with_objective) const {
    VectorXd v = VectorXd::Zero(m_);
    if (with_objective && rank_ > 0) v.head(rank_) = w_;
    v.tail(m_ - rank_) = tail;
    if (!has_qr_) return v;
    return qr_.householderQ() * v;
  }

  // Free-variable values for given cone values and right-hand side scale.
  VectorXd free_values(const VectorXd& xk, double rhs_scale) const {
    const Index nf = static_cast<Index>(free_cols_.size());
    VectorXd xf = VectorXd::Zero(nf);
    if (rank_ == 0) return xf;
    VectorXd rhs = rhs_scale * Qtb_.head(rank_);
    if (xk.size()) rhs -= QtAk_.topRows(rank_) * xk;
    VectorXd head = VectorXd::Zero(nf);
    head.head(rank_) = qr_.matrixR().topLeftCorner(rank_, rank_).triangularView<Eigen::Upper>().solve(rhs);
    return qr_.colsPermutation() * head;
  }

  ConicSolution assemble(SolveStatus status, const VectorXd& xf, const VectorXd& xk, const VectorXd& lambda,
                         const VectorXd& zk, int iters) const {
    ConicSolution s;
    s.status = status;
    s.iterations = iters;
    s.primal = VectorXd::Zero(p_.num_vars);
    s.cone_duals = VectorXd::Zero(p_.num_vars);
    for (size_t j = 0; j < free_cols_.size(); ++j) s.primal(free_cols_[j]) = xf(static_cast<Index>(j));
    for (size_t j = 0; j < cone_cols_.size(); ++j) {
      s.primal(cone_cols_[j]) = xk(static_cast<Index>(j));
      s.cone_duals(cone_cols_[j]) = zk(static_cast<Index>(j));
    }
    s.equality_multipliers = lambda;
    const bool ray = status == SolveStatus::primal_infeasible || status == SolveStatus::dual_infeasible;
    const double off = ray ? 0.0 : p_.objective_offset;
    s.primal_objective = p_.c.dot(s.primal) + off;
    s.dual_objective = p_.b.dot(lambda) + off;
    const VectorXd rpv = p_.A * s.primal - p_.b;
    const VectorXd rdv = p_.A.transpose() * lambda + s.cone_duals - p_.c;
    s.residuals.primal = inf_norm(rpv) / (1.0 + inf_norm(p_.b));
    s.residuals.dual = inf_norm(rdv) / (1.0 + inf_norm(p_.c));
    s.residuals.gap = std::abs(s.primal_objective - s.dual_objective) / std::max(1.0, std::abs(s.primal_objective));
    return s;
  }

  ConicSolution infeasible_from_rows(const VectorXd& tail) const {
    VectorXd lambda = lift_multipliers(tail, false);
    const double by = p_.b.dot(lambda);
    if (by != 0.0) lambda /= by;
    VectorXd zk = VectorXd::Zero(static_cast<Index>(cone_cols_.size()));
    const VectorXd atl = p_.A.transpose() * lambda;
    for (size_t j = 0; j < cone_cols_.size(); ++j) zk(static_cast<Index>(j)) = -atl(cone_cols_[j]);
    return assemble(SolveStatus::primal_infeasible, VectorXd::Zero(static_cast<Index>(free_cols_.size())),
                    VectorXd::Zero(static_cast<Index>(cone_cols_.size())), lambda, zk, 0);
  }

  ConicSolution unbounded_free_ray(const VectorXd& resid) const {
    const Index nf = static_cast<Index>(free_cols_.size());
    VectorXd head = VectorXd::Zero(nf);
    head.tail(nf - rank_) = -resid;
    if (rank_ > 0)
      head.head(rank_) = qr_.matrixR().topLeftCorner(rank_, rank_).triangularView<Eigen::Upper>().solve(
          -(qr_.matrixR().topRightCorner(rank_, nf - rank_) * head.tail(nf - rank_)));
    VectorXd xf = has_qr_ ? VectorXd(qr_.colsPermutation() * head) : head;
    VectorXd cf(nf);
    for (Index j = 0; j < nf; ++j) cf(j) = p_.c(free_cols_[static_cast<size_t>(j)]);
    const double cx = cf.dot(xf);
    if (cx != 0.0) xf /= -cx;
    const Index nk = static_cast<Index>(cone_cols_.size());
    return assemble(SolveStatus::dual_infeasible, xf, VectorXd::Zero(nk), VectorXd::Zero(m_), VectorXd::Zero(nk), 0);
  }

  ConicSolution recover(const HsdResult& r) const {
    const Index mr = m_ - rank_;
    auto tail_from = [&](const VectorXd& yred) {
      VectorXd tail = VectorXd::Zero(mr);
      for (size_t i = 0; i < kept_rows_.size(); ++i)
        tail(kept_rows_[i]) = yred(static_cast<Index>(i)) / kept_scale_[i];
      return tail;
    };
    switch (r.outcome) {
      case HsdOutcome::primal_infeasible: {
        ConicSolution s = infeasible_from_rows(tail_from(r.y));
        s.iterations = r.iterations;
        return s;
      }
      case HsdOutcome::dual_infeasible: {
        VectorXd xk = r.x;
        VectorXd xf = free_values(xk, 0.0);
        ConicSolution s = assemble(SolveStatus::dual_infeasible, xf, xk, VectorXd::Zero(m_),
                                   VectorXd::Zero(xk.size()), r.iterations);
        const double cx = s.primal_objective;
        if (cx < 0) s = assemble(SolveStatus::dual_infeasible, xf / -cx, xk / -cx, VectorXd::Zero(m_),
                                 VectorXd::Zero(xk.size()), r.iterations);
        return s;
      }
      default:
        break;
    }
    const VectorXd xk = r.x / r.tau;
    const VectorXd zk = r.z / r.tau;
    const VectorXd lambda = lift_multipliers(tail_from(r.y / r.tau), true);
    SolveStatus status = SolveStatus::numerical_trouble;
    if (r.outcome == HsdOutcome::optimal) status = SolveStatus::optimal;
    if (r.outcome == HsdOutcome::iteration_limit) status = SolveStatus::iteration_limit;
    return assemble(status, free_values(xk, 1.0), xk, lambda, zk, r.iterations);
  }

  const ConicProgram& p_;
  SolverSettings st_;
  Index m_ = 0;
  std::vector<int> free_cols_, cone_cols_;
  std::vector<ConeBlock> blocks_;
  Eigen::ColPivHouseholderQR<MatrixXd> qr_;
  bool has_qr_ = false;
  Index rank_ = 0;
  MatrixXd QtAk_;
  VectorXd Qtb_, w_;
  double offset_ = 0.0;
  MatrixXd Ared_;
  VectorXd bred_, cred_;
  std::vector<Index> kept_rows_;
  std::vector<double> kept_scale_;
};

}  // namespace

ConicSolution InteriorPointBackend::solve(const ConicProgram& p, const SolverSettings& settings) const {
  if (!(settings.tol > 0.0) || settings.max_iters < 1) throw std::invalid_argument("solver settings out of range");
  Presolved pre(p, settings);
  return pre.finish();
}

}  // namespace mfp
