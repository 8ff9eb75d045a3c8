#include "nlsfloer/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nlsfloer {

namespace {

constexpr double kPi = std::numbers::pi;

const cplx I{0.0, 1.0};

// Integral of the time modulation over [a, b].
double modulation_integral(const NonlinearitySpec& nl, double a, double b) {
  if (!nl.time_modulated) return b - a;
  return (b - a) + (std::sin(2 * kPi * b) - std::sin(2 * kPi * a)) / (2 * kPi);
}

// d/dt u = X^F(u) = i grad F_t(u).
SpectralField vector_field(const ModelSpec& model, const SpectralField& u, double t) {
  SpectralField g = grad_F(model, u, t);
  g *= I;
  return g;
}

void nonlinear_substep(const ModelSpec& model, SpectralField& u, double t, double h) {
  const auto& nl = model.nonlinearity();
  switch (nl.kind) {
    case NonlinearitySpec::Kind::Constant: return;
    case NonlinearitySpec::Kind::Hartree: {
      const int k = u.bandwidth();
      const int K = model.bandwidth();
      const double m = nl.strength * modulation_integral(nl, t, t + h);
      for (int n = -k; n <= k; ++n) {
        double p = model.psi()[n + K];
        u[n] *= std::polar(1.0, -m * p * p);
      }
      return;
    }
    default: break;
  }
  SpectralField k1 = vector_field(model, u, t);
  SpectralField k2 = vector_field(model, u + (0.5 * h) * k1, t + 0.5 * h);
  SpectralField k3 = vector_field(model, u + (0.5 * h) * k2, t + 0.5 * h);
  SpectralField k4 = vector_field(model, u + h * k3, t + h);
  k2 *= 2.0;
  k3 *= 2.0;
  k1 += k2;
  k1 += k3;
  k1 += k4;
  u += (h / 6.0) * k1;
}

}  // namespace

SpectralField free_flow(const SpectralField& u, double t) {
  SpectralField out = u;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) out[n] *= std::polar(1.0, -double(n) * n * t);
  return out;
}

SpectralField potential_flow(const SpectralField& u, const GridField& V, double t) {
  const int N = V.size();
  auto g = synthesize(u, N);
  for (int j = 0; j < N; ++j) g.values[j] *= std::polar(1.0, t * V.values[j].real());
  return analyze(g, (N - 1) / 2);
}

EvolveResult evolve(const ModelSpec& model, const SpectralField& u, double t0, double t1, int steps) {
  if (steps < 1) throw DynamicsError("evolve needs at least one step");
  if (u.bandwidth() > model.bandwidth()) throw DynamicsError("field bandwidth exceeds model bandwidth");
  const double h = (t1 - t0) / steps;
  const double n0 = l2_norm(u);
  SpectralField v = u;
  for (int s = 0; s < steps; ++s) {
    double t = t0 + s * h;
    v = free_flow(v, 0.5 * h);
    nonlinear_substep(model, v, t, h);
    v = free_flow(v, 0.5 * h);
    if (!v.all_finite())
      throw DynamicsError("non-finite state at step " + std::to_string(s) + ", t = " + std::to_string(t));
  }
  EvolveResult r;
  r.l2_drift = std::abs(l2_norm(v) - n0);
  r.state = std::move(v);
  return r;
}

int gauge_index(const SpectralField& u) {
  const int k = u.bandwidth();
  double mx = 0.0;
  for (auto z : u.coeffs()) mx = std::max(mx, std::abs(z));
  const double tie = mx * (1.0 - 1e-9);
  // Scan |n| = 0, 1, 2, ... taking n >= 0 before -n.
  for (int a = 0; a <= k; ++a) {
    if (std::abs(u[a]) >= tie) return a;
    if (a > 0 && std::abs(u[-a]) >= tie) return -a;
  }
  return 0;
}

SpectralField gauge_fixed(const SpectralField& u, int gauge) {
  cplx c = u[gauge];
  double a = std::abs(c);
  if (a == 0.0) throw DynamicsError("gauge coefficient vanishes");
  SpectralField out = u;
  out *= std::conj(c) / a;
  out[gauge] = a;
  return out;
}

ProjectivePoint::ProjectivePoint(const SpectralField& u) {
  double nrm = l2_norm(u);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DynamicsError("cannot projectivize a zero or non-finite field");
  // Canonical input is kept bit for bit so that reloading a stored point is exact.
  SpectralField v = u;
  if (std::abs(nrm - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) v *= 1.0 / nrm;
  gauge_ = gauge_index(v);
  const cplx c = v[gauge_];
  rep_ = c.imag() == 0.0 && c.real() > 0.0 ? v : gauge_fixed(v, gauge_);
}

double fs_distance(const SpectralField& a, const SpectralField& b) {
  double na = l2_norm(a), nb = l2_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw DynamicsError("fs_distance of a zero field");
  cplx c = inner(a, b) / (na * nb);
  // |b - a<a,b>| via Pythagoras would lose the small angle; form it directly.
  SpectralField r = b.resized(std::max(a.bandwidth(), b.bandwidth()));
  r *= 1.0 / nb;
  SpectralField ap = a.resized(r.bandwidth());
  ap *= c / na;
  r -= ap;
  return std::atan2(l2_norm(r), std::abs(c));
}

double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q) { return fs_distance(p.rep(), q.rep()); }

double fixed_point_residual(const ModelSpec& model, const ProjectivePoint& p, int steps) {
  auto r = evolve(model, p.rep(), 0.0, 1.0, steps);
  return fs_distance(ProjectivePoint(r.state), p);
}

double wrap_phase(double a) {
  double w = std::remainder(a, 2 * kPi);
  if (w <= -kPi) w += 2 * kPi;
  return w;
}

std::vector<double> uniform_schedule(double eps, int steps) {
  if (steps < 1) throw DynamicsError("schedule needs at least one step");
  std::vector<double> s;
  for (int i = 0; i <= steps; ++i) s.push_back(eps * i / steps);
  return s;
}

}  // namespace nlsfloer
