#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "floer_internal.hpp"
#include "nlsfloer/floer.hpp"

namespace nlsfloer {

namespace {

using detail::to_field;
using detail::to_vec;
using detail::VecC;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const cplx I{0.0, 1.0};

// Affine chart of CP^{2k} around b0: z in C^{2k} -> [b0 + B z], with the
// representative normalized and coefficient g real positive.
class Chart {
 public:
  Chart(const SpectralField& base, int gauge) : g_(gauge) {
    k_ = base.bandwidth();
    K_ = 2 * k_ + 1;
    c_ = K_ - 1;
    b0_ = to_vec(gauge_fixed(ProjectivePoint(base).rep(), gauge));
    // Householder reflection sending e_g to b0; b0_g > 0 makes it exact.
    VecC v = -b0_;
    v[g_ + k_] += 1.0;
    MatrixXcd H = MatrixXcd::Identity(K_, K_);
    double vv = v.squaredNorm();
    if (vv > 1e-28) H -= (2.0 / vv) * v * v.adjoint();
    B_.resize(K_, c_);
    for (int m = 0, q = 0; m < K_; ++m)
      if (m != g_ + k_) B_.col(q++) = H.col(m);
  }

  int complex_dim() const { return c_; }
  int real_dim() const { return 2 * c_; }
  int modes() const { return K_; }
  const MatrixXcd& B() const { return B_; }

  VecC point(const double* z) const {
    VecC y = b0_ + B_ * complex_coords(z);
    VecC w0 = y / y.norm();
    return w0 * std::polar(1.0, -std::arg(w0[g_ + k_]));
  }

  // Value and real-direction derivatives (K x 2c).
  void derivative(const double* z, VecC& w, MatrixXcd& dW) const {
    VecC y = b0_ + B_ * complex_coords(z);
    const double rho = y.norm();
    VecC w0 = y / rho;
    const cplx wg = w0[g_ + k_];
    const cplx rot = std::polar(1.0, -std::arg(wg));
    w = w0 * rot;
    dW.resize(K_, 2 * c_);
    for (int a = 0; a < 2 * c_; ++a) {
      VecC dy = a < c_ ? VecC(B_.col(a)) : VecC(I * B_.col(a - c_));
      VecC dw0 = (dy - w0 * w0.dot(dy).real()) / rho;
      double dth = (dw0[g_ + k_] / wg).imag();
      dW.col(a) = (dw0 - I * dth * w0) * rot;
    }
  }

  void coords(const SpectralField& u, double* z) const {
    VecC w = to_vec(u.resized(k_));
    cplx alpha = b0_.dot(w);
    if (std::abs(alpha) < 1e-8 * w.norm()) throw FloerError("state leaves the chart around the left seed");
    VecC zc = B_.adjoint() * w / alpha;
    for (int q = 0; q < c_; ++q) {
      z[q] = zc[q].real();
      z[c_ + q] = zc[q].imag();
    }
  }

 private:
  VecC complex_coords(const double* z) const {
    VecC zc(c_);
    for (int q = 0; q < c_; ++q) zc[q] = {z[q], z[c_ + q]};
    return zc;
  }

  int k_ = 0, K_ = 1, c_ = 0, g_ = 0;
  VecC b0_;
  MatrixXcd B_;
};

struct Context {
  const ModelSpec* model = nullptr;
  const Chart* chart = nullptr;
  std::vector<double> D;
  int Nt = 0;
  int r = 0;  // real unknowns per t-node
  int d = 0;  // real unknowns per s-slice
  double h = 1.0;
  double fd = 1e-7;
};

struct Assembly {
  MatrixXd Jl, Jr;
  VectorXd E;
  double r2 = 0.0;  // sum |R_j|^2 over the row
};

// Residual rows E_j = B^* R_j at one row of midpoints and, optionally, the
// Jacobian blocks with respect to the two adjacent slices.
void assemble(const Context& cx, const VectorXd& zl, const VectorXd& zr, double phi, bool jac, Assembly& out) {
  const Chart& ch = *cx.chart;
  const int Nt = cx.Nt, r = cx.r, c = ch.complex_dim(), K = ch.modes();
  const int k = (K - 1) / 2;
  std::vector<VecC> W[2];
  std::vector<MatrixXcd> dW[2];
  for (int side = 0; side < 2; ++side) {
    const VectorXd& z = side == 0 ? zl : zr;
    W[side].resize(Nt);
    if (jac) {
      dW[side].resize(Nt);
      for (int j = 0; j < Nt; ++j) ch.derivative(z.data() + j * r, W[side][j], dW[side][j]);
    } else {
      for (int j = 0; j < Nt; ++j) W[side][j] = ch.point(z.data() + j * r);
    }
  }
  auto mid = detail::midpoint_row(*cx.model, W[0], W[1], phi, cx.h, cx.D, Nt);
  out.E.resize(cx.d);
  out.r2 = 0.0;
  const MatrixXcd Bh = ch.B().adjoint();
  for (int j = 0; j < Nt; ++j) {
    VecC e = Bh * mid.R[j];
    out.E.segment(j * r, c) = e.real();
    out.E.segment(j * r + c, c) = e.imag();
    out.r2 += mid.R[j].squaredNorm();
  }
  if (!jac) return;

  const bool nonlinear = phi != 0.0 && cx.model->nonlinearity().kind != NonlinearitySpec::Kind::Constant;
  // Real-linearized Hessian of grad F at each midpoint, by forward differences.
  std::vector<MatrixXcd> HF(static_cast<size_t>(Nt));
  if (nonlinear) {
    for (int j = 0; j < Nt; ++j) {
      const double t = double(j) / Nt;
      VecC g0 = to_vec(grad_F(*cx.model, to_field(mid.mhat[j]), t));
      HF[j].resize(K, 2 * K);
      for (int a = 0; a < 2 * K; ++a) {
        VecC p = mid.mhat[j];
        p[a % K] += a < K ? cplx(cx.fd) : cplx(0.0, cx.fd);
        HF[j].col(a) = (to_vec(grad_F(*cx.model, to_field(p), t)) - g0) / cx.fd;
      }
    }
  }
  std::vector<VecC> bj(static_cast<size_t>(Nt));
  for (int j = 0; j < Nt; ++j) bj[j] = Bh * mid.mhat[j];
  VectorXd n2(K);
  for (int n = -k; n <= k; ++n) n2[n + k] = -double(n) * n;

  for (int side = 0; side < 2; ++side) {
    MatrixXd& J = side == 0 ? out.Jl : out.Jr;
    J.setZero(cx.d, cx.d);
    const double sg = side == 0 ? -1.0 : 1.0;
    for (int l = 0; l < Nt; ++l) {
      const VecC& m = mid.mhat[l];
      const double mn = mid.mnorm[l];
      const MatrixXcd& dw = dW[side][l];
      MatrixXcd dm = 0.5 * dw;
      Eigen::RowVectorXd re = (m.adjoint() * dm).real();
      MatrixXcd dmh = (dm - m * re.cast<cplx>()) / mn;
      MatrixXcd dX = (sg / cx.h) * dw + n2.cast<cplx>().asDiagonal() * dmh;
      if (nonlinear) {
        MatrixXcd stacked(2 * K, r);
        stacked.topRows(K) = dmh.real().cast<cplx>();
        stacked.bottomRows(K) = dmh.imag().cast<cplx>();
        dX += phi * (HF[l] * stacked);
      }
      const VecC& X = mid.X[l];
      const cplx mx = m.dot(X);
      MatrixXcd dR = dX - m * (m.adjoint() * dX) - dmh * mx - m * (dmh.adjoint() * X).conjugate().transpose();
      MatrixXcd dE = Bh * dR;
      J.block(l * r, l * r, c, r) = dE.real();
      J.block(l * r + c, l * r, c, r) = dE.imag();

      // Other t-nodes see this node only through i D_t mhat.
      MatrixXcd Y = Bh * dmh;
      for (int j = 0; j < Nt; ++j) {
        if (j == l) continue;
        const double Djl = cx.D[static_cast<size_t>(j) * Nt + l];
        if (Djl == 0.0) continue;
        Eigen::RowVectorXcd zj = mid.mhat[j].adjoint() * dmh;
        MatrixXcd blk = (I * Djl) * (Y - bj[j] * zj);
        J.block(j * r, l * r, c, r) = blk.real();
        J.block(j * r + c, l * r, c, r) = blk.imag();
      }
    }
  }
}

struct EndCondition {
  MatrixXd rows;
  std::vector<double> beta;
};

// Splits the linearization at a stationary t-orbit into growing and decaying
// modes. The operator A^{-1} L is self-adjoint for the Fubini-Study metric in
// chart coordinates, so a symmetric generalized eigenproblem applies.
EndCondition end_condition(const Context& cx, const VectorXd& zref, double phi, int side, double threshold) {
  Assembly as;
  assemble(cx, zref, zref, phi, true, as);
  MatrixXd L = as.Jl + as.Jr;
  MatrixXd A = 0.5 * cx.h * (as.Jr - as.Jl);
  MatrixXd M = A.partialPivLu().solve(L);

  MatrixXd G = MatrixXd::Zero(cx.d, cx.d);
  for (int j = 0; j < cx.Nt; ++j) {
    VecC w;
    MatrixXcd dW;
    cx.chart->derivative(zref.data() + j * cx.r, w, dW);
    MatrixXcd C = dW - w * (w.adjoint() * dW);
    G.block(j * cx.r, j * cx.r, cx.r, cx.r) = (C.adjoint() * C).real();
  }
  MatrixXd S = G * M;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(S, G);
  EndCondition ec;
  const auto& ev = es.eigenvalues();
  std::vector<int> picked;
  for (int q = 0; q < ev.size(); ++q) {
    ec.beta.push_back(ev[q]);
    // Left end: keep modes decaying towards -inf (beta < 0) and the neutral
    // ones free. Right end: keep beta > 0 free, pin everything else.
    bool prescribe = side < 0 ? ev[q] > threshold : ev[q] < threshold;
    if (prescribe) picked.push_back(q);
  }
  ec.rows.resize(static_cast<int>(picked.size()), cx.d);
  MatrixXd GV = G * es.eigenvectors();
  for (size_t q = 0; q < picked.size(); ++q) ec.rows.row(static_cast<int>(q)) = GV.col(picked[q]).transpose();
  return ec;
}

VectorXd orbit_coords(const Context& cx, const std::vector<SpectralField>& orbit) {
  VectorXd z(cx.d);
  for (int j = 0; j < cx.Nt; ++j) cx.chart->coords(orbit[j], z.data() + j * cx.r);
  return z;
}

}  // namespace

std::vector<double> end_spectrum(const ModelSpec& model, const std::vector<SpectralField>& orbit,
                                 const SpectralField& chart_base, int gauge, double phi, int Nt) {
  if (orbit.size() != static_cast<size_t>(Nt)) throw FloerError("orbit length differs from Nt");
  Chart chart(chart_base.resized(model.bandwidth()), gauge);
  Context cx;
  cx.model = &model;
  cx.chart = &chart;
  cx.D = periodic_derivative_matrix(Nt);
  cx.Nt = Nt;
  cx.r = chart.real_dim();
  cx.d = Nt * cx.r;
  cx.h = 1.0;
  auto ec = end_condition(cx, orbit_coords(cx, orbit), phi, -1, 0.0);
  return ec.beta;
}

FloerSolveResult solve_floer(const ModelSpec& model, const CylinderGrid& grid, const CutoffProfile& cutoff,
                             const FloerBoundary& boundary, const FloerState& guess, const FloerOptions& opts) {
  grid.validate();
  guess.validate();
  if (grid.k != model.bandwidth()) throw FloerError("grid bandwidth differs from model bandwidth");
  if (guess.grid.Ns != grid.Ns || guess.grid.Nt != grid.Nt || guess.grid.k != grid.k)
    throw FloerError("guess grid differs from solve grid");
  if (boundary.left.size() != static_cast<size_t>(grid.Nt) || boundary.right.size() != static_cast<size_t>(grid.Nt))
    throw FloerError("boundary orbits must have Nt samples");

  const int gauge = gauge_index(boundary.left[0]);
  Chart chart(boundary.left[0].resized(grid.k), gauge);
  Context cx;
  cx.model = &model;
  cx.chart = &chart;
  cx.D = periodic_derivative_matrix(grid.Nt);
  cx.Nt = grid.Nt;
  cx.r = chart.real_dim();
  cx.d = grid.Nt * cx.r;
  cx.h = grid.h();
  cx.fd = opts.fd_step;
  const int Ns = grid.Ns, d = cx.d;
  const double h = grid.h();

  std::vector<VectorXd> Z(static_cast<size_t>(Ns), VectorXd(d));
  for (int i = 0; i < Ns; ++i)
    for (int j = 0; j < grid.Nt; ++j) chart.coords(guess.at(i, j), Z[i].data() + j * cx.r);
  const VectorXd zL = orbit_coords(cx, boundary.left);
  const VectorXd zR = orbit_coords(cx, boundary.right);
  auto bcl = end_condition(cx, zL, cutoff(-grid.S), -1, opts.bc_threshold);
  auto bcr = end_condition(cx, zR, cutoff(grid.S), +1, opts.bc_threshold);
  const double wbc = 1.0 / h;

  FloerSolveResult res;
  res.prescribed_left = static_cast<int>(bcl.rows.rows());
  res.prescribed_right = static_cast<int>(bcr.rows.rows());
  if (res.prescribed_left + res.prescribed_right != d)
    res.diagnostic = "end-mode count mismatch: " + std::to_string(res.prescribed_left) + " + " +
                     std::to_string(res.prescribed_right) + " != " + std::to_string(d);

  auto to_state = [&](const std::vector<VectorXd>& z) {
    FloerState st;
    st.grid = grid;
    st.gauge = gauge;
    st.nodes.reserve(static_cast<size_t>(Ns) * grid.Nt);
    for (int i = 0; i < Ns; ++i)
      for (int j = 0; j < grid.Nt; ++j) st.nodes.push_back(to_field(chart.point(z[i].data() + j * cx.r)));
    return st;
  };

  struct Eval {
    double cost = 0.0, rnorm = 0.0, bc = 0.0;
  };
  auto evaluate = [&](const std::vector<VectorXd>& z) {
    Eval ev;
    double r2 = 0.0;
    Assembly as;
    for (int i = 0; i + 1 < Ns; ++i) {
      assemble(cx, z[i], z[i + 1], cutoff(grid.s(i) + 0.5 * h), false, as);
      ev.cost += as.E.squaredNorm();
      r2 += as.r2;
    }
    VectorXd el = bcl.rows * (z.front() - zL), er = bcr.rows * (z.back() - zR);
    ev.cost += wbc * wbc * (el.squaredNorm() + er.squaredNorm());
    ev.rnorm = std::sqrt(r2 * h / grid.Nt);
    ev.bc = std::max(el.size() ? el.cwiseAbs().maxCoeff() : 0.0, er.size() ? er.cwiseAbs().maxCoeff() : 0.0);
    return ev;
  };

  // One damped Gauss-Newton step: J^T J is block tridiagonal over s-slices
  // and is factored by block Cholesky while the Jacobian is streamed.
  std::vector<MatrixXd> Lf(static_cast<size_t>(Ns)), Wf(static_cast<size_t>(std::max(Ns - 1, 0)));
  auto lm_step = [&](const std::vector<VectorXd>& z, double mu, std::vector<VectorXd>& dz) -> bool {
    std::vector<VectorXd> y(static_cast<size_t>(Ns));
    MatrixXd prevJr, Nii(d, d), off(d, d);
    VectorXd prevE, gi(d);
    Assembly cur;
    for (int i = 0; i < Ns; ++i) {
      if (i + 1 < Ns) assemble(cx, z[i], z[i + 1], cutoff(grid.s(i) + 0.5 * h), true, cur);
      Nii.setZero();
      gi.setZero();
      if (i > 0) {
        Nii.noalias() += prevJr.transpose() * prevJr;
        gi.noalias() += prevJr.transpose() * prevE;
      }
      if (i + 1 < Ns) {
        Nii.noalias() += cur.Jl.transpose() * cur.Jl;
        gi.noalias() += cur.Jl.transpose() * cur.E;
      }
      if (i == 0) {
        Nii.noalias() += wbc * wbc * bcl.rows.transpose() * bcl.rows;
        gi.noalias() += wbc * wbc * bcl.rows.transpose() * (bcl.rows * (z[0] - zL));
      }
      if (i == Ns - 1) {
        Nii.noalias() += wbc * wbc * bcr.rows.transpose() * bcr.rows;
        gi.noalias() += wbc * wbc * bcr.rows.transpose() * (bcr.rows * (z[i] - zR));
      }
      const double floor = 1e-10 * Nii.diagonal().mean();
      for (int q = 0; q < d; ++q) Nii(q, q) += mu * std::max(Nii(q, q), floor);
      VectorXd rhs = -gi;
      if (i > 0) {
        Nii.noalias() -= Wf[i - 1].transpose() * Wf[i - 1];
        rhs.noalias() -= Wf[i - 1].transpose() * y[i - 1];
      }
      Eigen::LLT<MatrixXd> llt(Nii);
      if (llt.info() != Eigen::Success) return false;
      Lf[i] = llt.matrixL();
      y[i] = Lf[i].triangularView<Eigen::Lower>().solve(rhs);
      if (i + 1 < Ns) {
        off.noalias() = cur.Jl.transpose() * cur.Jr;
        Wf[i] = Lf[i].triangularView<Eigen::Lower>().solve(off);
        prevJr.swap(cur.Jr);
        prevE.swap(cur.E);
      }
    }
    dz.assign(static_cast<size_t>(Ns), VectorXd());
    for (int i = Ns - 1; i >= 0; --i) {
      VectorXd v = y[i];
      if (i + 1 < Ns) v.noalias() -= Wf[i] * dz[i + 1];
      dz[i] = Lf[i].transpose().triangularView<Eigen::Upper>().solve(v);
    }
    return dz.back().allFinite();
  };

  Eval ev = evaluate(Z);
  double mu = opts.mu0;
  auto record = [&](int it) {
    FloerHistoryRow row;
    row.iteration = it;
    row.residual_norm = ev.rnorm;
    row.energy = floer_energy(model, to_state(Z), cutoff);
    row.damping = mu;
    res.history.push_back(row);
  };
  record(0);
  while (!(ev.rnorm < opts.tol && ev.bc < opts.tol)) {
    if (res.iterations >= opts.max_iter) {
      res.diagnostic = "max_iter reached";
      break;
    }
    ++res.iterations;
    std::vector<VectorXd> dz;
    bool ok = lm_step(Z, mu, dz);
    bool accepted = false;
    if (ok) {
      std::vector<VectorXd> Zn(Z.size());
      for (size_t i = 0; i < Z.size(); ++i) Zn[i] = Z[i] + dz[i];
      Eval en = evaluate(Zn);
      if (en.cost < ev.cost) {
        Z.swap(Zn);
        ev = en;
        accepted = true;
        mu = std::max(mu / 10.0, 1e-12);
        record(res.iterations);
      }
    }
    if (!accepted) {
      mu *= 10.0;
      if (mu > opts.mu_max) {
        res.diagnostic = "damping exhausted";
        break;
      }
    }
  }
  res.state = to_state(Z);
  res.residual = ev.rnorm;
  res.bc_residual = ev.bc;
  res.converged = ev.rnorm < opts.tol && ev.bc < opts.tol;
  res.energy = floer_energy(model, res.state, cutoff);
  if (res.converged && res.diagnostic.rfind("end-mode", 0) != 0) res.diagnostic.clear();
  return res;
}

}  // namespace nlsfloer
