#include "nlsfloer/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace nlsfloer {

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

int wrap(int n, int N) { return ((n % N) + N) % N; }

}  // namespace

SpectralField::SpectralField(int k) {
  if (k < 0) throw SpectralError("negative bandwidth");
  k_ = k;
  c_.assign(static_cast<size_t>(2 * k + 1), cplx{});
}

SpectralField::SpectralField(int k, std::vector<cplx> coeffs) {
  if (k < 0) throw SpectralError("negative bandwidth");
  if (coeffs.size() != static_cast<size_t>(2 * k + 1))
    throw SpectralError("expected " + std::to_string(2 * k + 1) + " coefficients, got " +
                        std::to_string(coeffs.size()));
  k_ = k;
  c_ = std::move(coeffs);
  if (!all_finite()) throw SpectralError("non-finite coefficient");
}

SpectralField SpectralField::mode(int k, int n, cplx amp) {
  if (n < -k || n > k) throw SpectralError("mode outside bandwidth");
  SpectralField u(k);
  u[n] = amp;
  return u;
}

SpectralField SpectralField::resized(int k) const {
  SpectralField out(k);
  int m = std::min(k, k_);
  for (int n = -m; n <= m; ++n) out[n] = (*this)[n];
  return out;
}

bool SpectralField::all_finite() const {
  return std::all_of(c_.begin(), c_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (o.k_ != k_) throw SpectralError("bandwidth mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (o.k_ != k_) throw SpectralError("bandwidth mismatch");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (auto& z : c_) z *= a;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx a, SpectralField u) { return u *= a; }

SpectralField analyze(const GridField& g, int k) {
  const int N = g.size();
  if (k < 0) throw SpectralError("negative bandwidth");
  if (N < 2 * k + 1)
    throw SpectralError("aliasing: bandwidth " + std::to_string(k) + " exceeds grid of " +
                        std::to_string(N) + " samples");
  std::vector<cplx> buf = g.values;
  detail::dft_forward(buf.data(), N);
  SpectralField u(k);
  const double scale = kSqrt2Pi / N;
  for (int n = -k; n <= k; ++n) u[n] = scale * buf[wrap(n, N)];
  return u;
}

GridField synthesize(const SpectralField& u, int N) {
  const int k = u.bandwidth();
  if (N < 2 * k + 1)
    throw SpectralError("grid of " + std::to_string(N) + " samples cannot hold bandwidth " +
                        std::to_string(k));
  GridField g;
  g.values.assign(static_cast<size_t>(N), cplx{});
  for (int n = -k; n <= k; ++n) g.values[wrap(n, N)] = u[n];
  detail::dft_backward(g.values.data(), N);
  for (auto& z : g.values) z /= kSqrt2Pi;
  return g;
}

SpectralField convolve(const SpectralField& u, const SpectralField& psi) {
  const int k = std::min(u.bandwidth(), psi.bandwidth());
  SpectralField out(k);
  for (int n = -k; n <= k; ++n) out[n] = u[n] * psi[n];
  if (!out.all_finite()) throw SpectralError("non-finite convolution");
  return out;
}

SpectralField project(const SpectralField& u, int ell) {
  if (ell < 0 || ell > u.bandwidth()) throw SpectralError("projection bandwidth out of range");
  SpectralField out = u;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n)
    if (std::abs(n) > ell) out[n] = 0.0;
  return out;
}

cplx inner(const SpectralField& a, const SpectralField& b) {
  const int k = std::min(a.bandwidth(), b.bandwidth());
  cplx s{};
  for (int n = -k; n <= k; ++n) s += std::conj(a[n]) * b[n];
  return s;
}

double real_inner(const SpectralField& a, const SpectralField& b) { return inner(a, b).real(); }

double l2_norm(const SpectralField& u) { return sobolev_norm(u, 0.0); }

double sobolev_norm(const SpectralField& u, double delta) {
  if (delta < 0) throw SpectralError("negative Sobolev index");
  double s = 0.0;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) {
    double w = delta == 0.0 ? 1.0 : std::pow(1.0 + double(n) * n, delta);
    s += std::norm(u[n]) * w;
  }
  return std::sqrt(s);
}

double sup_norm(const SpectralField& u) {
  auto g = synthesize(u, oversampled_grid(u.bandwidth()));
  double m = 0.0;
  for (auto z : g.values) m = std::max(m, std::abs(z));
  return m;
}

double norm(const SpectralField& u, NormKind kind) {
  switch (kind.tag) {
    case NormKind::L2: return l2_norm(u);
    case NormKind::Sobolev: return sobolev_norm(u, kind.delta);
    case NormKind::Sup: return sup_norm(u);
  }
  return 0.0;
}

}  // namespace nlsfloer
