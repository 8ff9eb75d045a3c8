#include "nlsfloer/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nlsfloer/dynamics.hpp"

namespace nlsfloer {

namespace {

constexpr double kPi = std::numbers::pi;

void check_half(const std::vector<double>& half) {
  if (half.empty()) throw ModelError("kernel needs at least psi^(0)");
  for (double v : half)
    if (!std::isfinite(v)) throw ModelError("non-finite kernel coefficient");
}

}  // namespace

KernelSpec::KernelSpec(std::vector<double> half, DecayLaw law, double rate)
    : half_(std::move(half)), law_(law), rate_(rate) {
  check_half(half_);
}

KernelSpec KernelSpec::exponential(double rate, int k_max) {
  if (k_max < 0) throw ModelError("negative kernel bandwidth");
  if (!(rate > 0)) throw ModelError("exponential kernel needs a positive rate");
  std::vector<double> h(static_cast<size_t>(k_max + 1));
  for (int n = 0; n <= k_max; ++n) h[n] = std::exp(-rate * n);
  return KernelSpec(std::move(h), DecayLaw::Exponential, rate);
}

KernelSpec KernelSpec::band_limited(std::vector<double> half) {
  return KernelSpec(std::move(half), DecayLaw::BandLimited, 0.0);
}

KernelSpec KernelSpec::custom(std::vector<double> half) {
  return KernelSpec(std::move(half), DecayLaw::Custom, 0.0);
}

double KernelSpec::operator()(int n) const {
  int a = std::abs(n);
  return a > k_max() ? 0.0 : half_[a];
}

int KernelSpec::support() const {
  for (int n = k_max(); n > 0; --n)
    if (half_[n] != 0.0) return n;
  return 0;
}

double KernelSpec::l2() const { return tail_l2(-1); }

double KernelSpec::tail_l2(int k) const {
  double s = 0.0;
  for (int n = std::max(k + 1, 0); n <= k_max(); ++n) s += (n == 0 ? 1.0 : 2.0) * half_[n] * half_[n];
  return std::sqrt(s);
}

KernelSpec truncate_kernel(const KernelSpec& kernel, int k) {
  if (k < 0) throw ModelError("truncation bandwidth out of range");
  std::vector<double> h = kernel.half();
  if (k >= kernel.k_max()) return KernelSpec::custom(std::move(h));
  std::fill(h.begin() + k + 1, h.end(), 0.0);
  return KernelSpec::custom(std::move(h));
}

NonlinearitySpec NonlinearitySpec::constant(double c) {
  NonlinearitySpec s;
  s.kind = Kind::Constant;
  s.strength = c;
  return s;
}

NonlinearitySpec NonlinearitySpec::hartree(double eps) {
  NonlinearitySpec s;
  s.kind = Kind::Hartree;
  s.strength = eps;
  return s;
}

NonlinearitySpec NonlinearitySpec::quadratic(double eps) {
  NonlinearitySpec s;
  s.kind = Kind::Quadratic;
  s.strength = eps;
  return s;
}

NonlinearitySpec NonlinearitySpec::potential(double eps, SpectralField v_hat) {
  const int kv = v_hat.bandwidth();
  for (int n = 0; n <= kv; ++n)
    if (std::abs(v_hat[n] - std::conj(v_hat[-n])) > 1e-12 * (1.0 + std::abs(v_hat[n])))
      throw ModelError("potential coefficients must satisfy V^(-n) = conj V^(n)");
  NonlinearitySpec s;
  s.kind = Kind::Potential;
  s.strength = eps;
  s.v_hat = std::move(v_hat);
  return s;
}

NonlinearitySpec NonlinearitySpec::modulated(NonlinearitySpec base) {
  base.time_modulated = true;
  return base;
}

double NonlinearitySpec::modulation(double t) const {
  return time_modulated ? 1.0 + std::cos(2.0 * kPi * t) : 1.0;
}

double NonlinearitySpec::potential_sup_bound() const {
  if (kind != Kind::Potential) return 0.0;
  double s = 0.0;
  for (auto z : v_hat.coeffs()) s += std::abs(z);
  return s / std::sqrt(2.0 * kPi);
}

double NonlinearitySpec::sup_bound(double w_max) const {
  const double a = std::abs(strength);
  double b = 0.0;
  switch (kind) {
    case Kind::Constant: b = a; break;
    case Kind::Hartree: b = a * w_max; break;
    case Kind::Quadratic: b = a * w_max * w_max; break;
    case Kind::Potential: b = a * potential_sup_bound() * w_max; break;
  }
  return time_modulated ? 2.0 * b : b;
}

const char* kind_name(NonlinearitySpec::Kind kind) {
  switch (kind) {
    case NonlinearitySpec::Kind::Constant: return "constant";
    case NonlinearitySpec::Kind::Hartree: return "hartree";
    case NonlinearitySpec::Kind::Quadratic: return "quadratic";
    case NonlinearitySpec::Kind::Potential: return "potential";
  }
  return "?";
}

ModelSpec::ModelSpec(KernelSpec kernel, NonlinearitySpec nonlinearity, int k)
    : kernel_(std::move(kernel)), nl_(std::move(nonlinearity)), k_(k) {
  if (k < 0) throw ModelError("negative model bandwidth");
  grid_ = oversampled_grid(k);
  psi_.resize(static_cast<size_t>(2 * k + 1));
  for (int n = -k; n <= k; ++n) psi_[n + k] = kernel_(n);
  if (nl_.kind == NonlinearitySpec::Kind::Potential) {
    if (nl_.v_hat.bandwidth() > 6 * k + 2)
      throw ModelError("potential bandwidth too large for the quadrature grid");
    auto g = synthesize(nl_.v_hat, grid_);
    v_grid_.resize(g.values.size());
    for (size_t j = 0; j < g.values.size(); ++j) v_grid_[j] = g.values[j].real();
  }
}

ModelSpec ModelSpec::with_strength(double strength) const {
  NonlinearitySpec nl = nl_;
  nl.strength = strength;
  return ModelSpec(kernel_, std::move(nl), k_);
}

ModelSpec ModelSpec::with_kernel(KernelSpec kernel) const { return ModelSpec(std::move(kernel), nl_, k_); }

ModelSpec ModelSpec::with_bandwidth(int k) const { return ModelSpec(kernel_, nl_, k); }

double ModelSpec::f(double w, int j, double t) const {
  const double e = nl_.strength * nl_.modulation(t);
  switch (nl_.kind) {
    case NonlinearitySpec::Kind::Constant: return e;
    case NonlinearitySpec::Kind::Hartree: return e * w;
    case NonlinearitySpec::Kind::Quadratic: return e * w * w;
    case NonlinearitySpec::Kind::Potential: return e * v_grid_[j] * w;
  }
  return 0.0;
}

double ModelSpec::df(double w, int j, double t) const {
  const double e = nl_.strength * nl_.modulation(t);
  switch (nl_.kind) {
    case NonlinearitySpec::Kind::Constant: return 0.0;
    case NonlinearitySpec::Kind::Hartree: return e;
    case NonlinearitySpec::Kind::Quadratic: return 2.0 * e * w;
    case NonlinearitySpec::Kind::Potential: return e * v_grid_[j];
  }
  return 0.0;
}

bool ModelSpec::is_diagonal() const {
  return nl_.kind == NonlinearitySpec::Kind::Constant || nl_.kind == NonlinearitySpec::Kind::Hartree;
}

namespace {

void check_bandwidth(const ModelSpec& model, const SpectralField& u) {
  if (u.bandwidth() > model.bandwidth()) throw ModelError("field bandwidth exceeds model bandwidth");
}

GridField smoothed_grid(const ModelSpec& model, const SpectralField& u) {
  const int k = model.bandwidth();
  SpectralField v(k);
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) v[n] = u[n] * model.psi()[n + k];
  return synthesize(v, model.grid_size());
}

}  // namespace

double eval_F(const ModelSpec& model, const SpectralField& u, double t) {
  check_bandwidth(model, u);
  auto v = smoothed_grid(model, u);
  const int N = model.grid_size();
  double s = 0.0;
  for (int j = 0; j < N; ++j) s += model.f(std::norm(v.values[j]), j, t);
  return -0.5 * (2.0 * kPi / N) * s;
}

SpectralField grad_F(const ModelSpec& model, const SpectralField& u, double t) {
  check_bandwidth(model, u);
  const int k = model.bandwidth();
  if (model.nonlinearity().kind == NonlinearitySpec::Kind::Constant) return SpectralField(u.bandwidth());
  auto g = smoothed_grid(model, u);
  for (int j = 0; j < model.grid_size(); ++j) g.values[j] *= model.df(std::norm(g.values[j]), j, t);
  auto gh = analyze(g, k);
  SpectralField out(u.bandwidth());
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) out[n] = -model.psi()[n + k] * gh[n];
  return out;
}

SpectralField grad_G(const ModelSpec& model, const SpectralField& u, double t) {
  return free_flow(grad_F(model, free_flow(u, t), t), -t);
}

SpectralField grad_H0(const SpectralField& u) {
  SpectralField out = u;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) out[n] *= -double(n) * n;
  return out;
}

GapReport galerkin_gap(const ModelSpec& model, int k, double radius, int samples, std::uint64_t seed,
                       double t) {
  const int K = model.bandwidth();
  if (k < 0 || k >= K) throw ModelError("galerkin_gap needs 0 <= k < model bandwidth");
  if (radius < 0) throw ModelError("negative radius");
  ModelSpec trunc = model.with_kernel(truncate_kernel(model.kernel(), std::min(k, model.kernel().k_max())));

  GapReport rep;
  rep.k = k;
  rep.radius = radius;
  rep.t = t;
  rep.analytic_bound = radius * model.kernel().tail_l2(k);

  const auto& nl = model.nonlinearity();
  const double e = std::abs(nl.strength) * nl.modulation(t);
  const double r = radius * model.kernel().l2() / std::sqrt(2.0 * kPi);
  switch (nl.kind) {
    case NonlinearitySpec::Kind::Constant: rep.lipschitz = 0.0; break;
    case NonlinearitySpec::Kind::Hartree: rep.lipschitz = e; break;
    case NonlinearitySpec::Kind::Quadratic: rep.lipschitz = 6.0 * e * r * r; break;
    case NonlinearitySpec::Kind::Potential: rep.lipschitz = e * nl.potential_sup_bound(); break;
  }

  std::vector<SpectralField> probes;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < samples; ++s) {
    SpectralField u(K);
    for (auto& z : u.coeffs()) z = {gauss(rng), gauss(rng)};
    probes.push_back(u);
  }
  // Mass just beyond the truncation band is where the gap is largest.
  if (k + 1 <= K) {
    probes.push_back(SpectralField::mode(K, k + 1));
    probes.push_back(SpectralField::mode(K, -(k + 1)));
    for (int i = 1; i < 8; ++i) {
      double th = 0.5 * kPi * i / 8.0;
      SpectralField u(K);
      u[0] = std::cos(th);
      u[k + 1] = u[-(k + 1)] = std::sin(th) / std::sqrt(2.0);
      probes.push_back(u);
    }
  }

  const int N = model.grid_size();
  for (auto& u : probes) {
    double n0 = l2_norm(u);
    if (n0 == 0.0) continue;
    u *= radius / n0;
    rep.f_gap = std::max(rep.f_gap, std::abs(eval_F(model, u, t) - eval_F(trunc, u, t)));
    rep.grad_gap = std::max(rep.grad_gap, l2_norm(grad_F(model, u, t) - grad_F(trunc, u, t)));
    auto v = smoothed_grid(model, u);
    auto vk = smoothed_grid(trunc, u);
    for (int j = 0; j < N; ++j) {
      cplx a = model.df(std::norm(v.values[j]), j, t) * v.values[j];
      cplx b = model.df(std::norm(vk.values[j]), j, t) * vk.values[j];
      rep.density_gap = std::max(rep.density_gap, std::abs(a - b));
    }
    ++rep.samples;
  }
  return rep;
}

}  // namespace nlsfloer
