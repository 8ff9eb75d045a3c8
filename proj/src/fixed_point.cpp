#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "nlsfloer/dynamics.hpp"

namespace nlsfloer {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const cplx I{0.0, 1.0};

SpectralField time_one(const ModelSpec& model, const SpectralField& u, int steps) {
  return evolve(model, u, 0.0, 1.0, steps).state;
}

VectorXd to_real(const SpectralField& u) {
  const int m = u.size();
  VectorXd x(2 * m);
  for (int i = 0; i < m; ++i) {
    x[i] = u.coeffs()[i].real();
    x[m + i] = u.coeffs()[i].imag();
  }
  return x;
}

SpectralField from_real(const VectorXd& x, int k) {
  const int m = 2 * k + 1;
  SpectralField u(k);
  for (int i = 0; i < m; ++i) u.coeffs()[i] = {x[i], x[m + i]};
  return u;
}

struct Iterate {
  SpectralField u;
  double a = 0.0;
  SpectralField image;  // phi_1(u)
  VectorXd r;
  double fs = 0.0;
};

// Residual: [phi_1(u) - e^{ia} u ; |u|^2 - 1 ; Im u^(g)].
void evaluate(const ModelSpec& model, Iterate& it, int g, int steps) {
  it.image = time_one(model, it.u, steps);
  SpectralField d = it.image - std::polar(1.0, it.a) * it.u;
  const int m = it.u.size();
  it.r.resize(2 * m + 2);
  it.r.head(2 * m) = to_real(d);
  it.r[2 * m] = std::pow(l2_norm(it.u), 2) - 1.0;
  it.r[2 * m + 1] = it.u[g].imag();
  it.fs = fs_distance(it.image, it.u);
}

// Real Jacobian of phi_1 at u by forward differences.
MatrixXd flow_jacobian(const ModelSpec& model, const Iterate& it, int steps, double h) {
  const int m = it.u.size();
  const int k = it.u.bandwidth();
  MatrixXd M(2 * m, 2 * m);
  VectorXd base = to_real(it.image);
  VectorXd x = to_real(it.u);
  for (int c = 0; c < 2 * m; ++c) {
    VectorXd xp = x;
    xp[c] += h;
    M.col(c) = (to_real(time_one(model, from_real(xp, k), steps)) - base) / h;
  }
  return M;
}

MatrixXd full_jacobian(const MatrixXd& M, const Iterate& it, int g) {
  const int m = it.u.size();
  const int k = it.u.bandwidth();
  MatrixXd J = MatrixXd::Zero(2 * m + 2, 2 * m + 1);
  J.topLeftCorner(2 * m, 2 * m) = M;
  const cplx e = std::polar(1.0, it.a);
  // -e^{ia} * (real-linear identity on u).
  for (int i = 0; i < m; ++i) {
    J(i, i) -= e.real();
    J(i, m + i) += e.imag();
    J(m + i, i) -= e.imag();
    J(m + i, m + i) -= e.real();
  }
  SpectralField da = (-I * e) * it.u;
  J.col(2 * m).head(2 * m) = to_real(da);
  J.row(2 * m).head(2 * m) = 2.0 * to_real(it.u).transpose();
  J(2 * m + 1, m + (g + k)) = 1.0;
  return J;
}

// Eigenvector of the complex-linear part of D phi_1 closest to u. Splits
// near-degenerate +-n clusters that plain Gauss-Newton cannot resolve.
Iterate eigen_restart(const MatrixXd& M, const SpectralField& u) {
  const int m = u.size();
  const int k = u.bandwidth();
  Eigen::MatrixXcd C(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double A = 0.5 * (M(i, j) + M(m + i, m + j));
      double B = 0.5 * (M(m + i, j) - M(i, m + j));
      C(i, j) = {A, B};
    }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C);
  int best = 0;
  double best_ov = -1.0, best_sum = -1e300;
  for (int c = 0; c < m; ++c) {
    SpectralField v(k);
    for (int i = 0; i < m; ++i) v.coeffs()[i] = es.eigenvectors()(i, c);
    double ov = std::abs(inner(v, u)) / l2_norm(v);
    ProjectivePoint pv(v);
    double sum = 0.0;
    for (auto z : pv.rep().coeffs()) sum += z.real();
    if (ov > best_ov + 1e-6 || (std::abs(ov - best_ov) <= 1e-6 && sum > best_sum)) {
      best = c;
      best_ov = ov;
      best_sum = sum;
    }
  }
  SpectralField v(k);
  for (int i = 0; i < m; ++i) v.coeffs()[i] = es.eigenvectors()(i, best);
  Iterate it;
  it.u = ProjectivePoint(v).rep();
  it.a = std::arg(es.eigenvalues()[best]);
  return it;
}

// u(x) -> u(-x) commutes with the flow when V is even (psi always is).
bool parity_invariant(const ModelSpec& model) {
  const auto& nl = model.nonlinearity();
  if (nl.kind != NonlinearitySpec::Kind::Potential) return true;
  const auto& v = nl.v_hat;
  for (int n = 1; n <= v.bandwidth(); ++n)
    if (v[n] != v[-n]) return false;
  return true;
}

// +1 / -1 when u is close to even / odd, 0 otherwise.
int parity_of(const SpectralField& u, double tol) {
  double even = 0.0, odd = 0.0;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) {
    even += std::norm(u[n] - u[-n]);
    odd += std::norm(u[n] + u[-n]);
  }
  const double scale = tol * tol * std::pow(l2_norm(u), 2);
  if (even <= scale) return 1;
  if (odd <= scale) return -1;
  return 0;
}

void symmetrize(SpectralField& u, int parity) {
  if (parity == 0) return;
  for (int n = 1; n <= u.bandwidth(); ++n) {
    const cplx a = u[n], b = u[-n];
    u[n] = 0.5 * (a + double(parity) * b);
    u[-n] = 0.5 * (b + double(parity) * a);
  }
  if (parity < 0) u[0] = 0.0;
}

}  // namespace

FixedPointResult newton_fixed_point(const ModelSpec& model, const ProjectivePoint& guess, const NewtonOptions& opts) {
  const int k = model.bandwidth();
  FixedPointResult res;
  Iterate it;
  it.u = guess.rep().resized(k);
  it.u *= 1.0 / l2_norm(it.u);
  // Near a degenerate +-n pair the splitting directions are soft (singular
  // values ~ eps^2); staying in one parity class removes them.
  const bool symmetric = parity_invariant(model);
  const double parity_tol = 1e-2;
  int parity = symmetric ? parity_of(it.u, parity_tol) : 0;
  symmetrize(it.u, parity);
  int g = gauge_index(it.u);
  it.u = gauge_fixed(it.u, g);
  it.image = time_one(model, it.u, opts.steps);
  it.a = std::arg(inner(it.u, it.image));
  evaluate(model, it, g, opts.steps);

  const int m = 2 * k + 1;
  int stalled = 0;
  while (it.fs >= opts.tol) {
    if (res.iterations >= opts.max_iter) break;
    ++res.iterations;
    MatrixXd M = flow_jacobian(model, it, opts.steps, opts.fd_step);

    if (stalled >= 3 && res.restarts < opts.max_restarts) {
      ++res.restarts;
      Iterate next = eigen_restart(M, it.u);
      if (symmetric) parity = parity_of(next.u, parity_tol);
      symmetrize(next.u, parity);
      g = gauge_index(next.u);
      evaluate(model, next, g, opts.steps);
      it = std::move(next);
      stalled = 0;
      continue;
    }

    MatrixXd J = full_jacobian(M, it, g);
    Eigen::JacobiSVD<MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    if (svd.rank() < 2 * m) {
      res.diagnostic = "singular corrector system (rank " + std::to_string(svd.rank()) + ")";
      ++stalled;
    }
    VectorXd dx = -svd.solve(it.r);

    VectorXd x = to_real(it.u);
    double lambda = 1.0;
    bool accepted = false;
    const double r0 = it.r.norm();
    for (int ls = 0; ls < 12; ++ls) {
      Iterate trial;
      trial.u = from_real(x + lambda * dx.head(2 * m), k);
      symmetrize(trial.u, parity);
      trial.a = it.a + lambda * dx[2 * m];
      evaluate(model, trial, g, opts.steps);
      if (trial.r.norm() < r0) {
        stalled = trial.fs > 0.5 * it.fs ? stalled + 1 : 0;
        it = std::move(trial);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) stalled = 3;
  }

  // Normalize once more; the corrector holds |u| = 1 only to tolerance.
  res.point = ProjectivePoint(it.u);
  res.phase = wrap_phase(it.a);
  res.residual = fixed_point_residual(model, res.point, opts.steps);
  res.converged = res.residual < opts.tol;
  if (!res.converged && res.diagnostic.empty())
    res.diagnostic = "max_iter exceeded, residual " + std::to_string(res.residual);
  if (res.converged) res.diagnostic.clear();
  return res;
}

ContinuationResult continue_fixed_point(const ModelSpec& model, int n, const std::vector<double>& eps_schedule,
                                        const ContinuationOptions& opts) {
  const int k = model.bandwidth();
  if (std::abs(n) > k) throw DynamicsError("seed mode outside model bandwidth");
  if (eps_schedule.empty() || eps_schedule.front() != 0.0)
    throw DynamicsError("eps schedule must start at 0");
  ContinuationResult cr;
  cr.n = n;
  ContinuationStep start;
  start.eps = 0.0;
  start.point = ProjectivePoint(SpectralField::mode(k, n));
  start.phase = wrap_phase(-double(n) * n);
  start.residual = 0.0;
  cr.path.push_back(start);
  cr.branch_seed = start.point;
  bool seeded = false;

  std::function<bool(double, int)> advance = [&](double target, int depth) -> bool {
    const ContinuationStep& prev = cr.path.back();
    auto fp = newton_fixed_point(model.with_strength(target), prev.point, opts.newton);
    if (fp.converged) {
      cr.path.push_back({target, fp.point, fp.phase, fp.residual});
      if (!seeded && target != 0.0) {
        SpectralField s(k);
        s[n] = fp.point.rep()[n];
        s[-n] = fp.point.rep()[-n];
        cr.branch_seed = ProjectivePoint(s);
        seeded = true;
      }
      return true;
    }
    if (depth >= opts.bisection_depth) {
      cr.diagnostic = "bisection depth exhausted at eps = " + std::to_string(target) + ": " + fp.diagnostic;
      return false;
    }
    double mid = 0.5 * (prev.eps + target);
    return advance(mid, depth + 1) && advance(target, depth + 1);
  };

  cr.converged = true;
  for (size_t i = 1; i < eps_schedule.size(); ++i) {
    if (!advance(eps_schedule[i], 0)) {
      cr.converged = false;
      break;
    }
  }
  return cr;
}

}  // namespace nlsfloer
