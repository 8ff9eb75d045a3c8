#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsfloer {

using cplx = std::complex<double>;

class SpectralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fourier coefficients u^(n), |n| <= k, with u(x) = (2pi)^{-1/2} sum u^(n) e^{inx}.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int k);
  SpectralField(int k, std::vector<cplx> coeffs);

  static SpectralField mode(int k, int n, cplx amp = 1.0);

  int bandwidth() const { return k_; }
  int size() const { return 2 * k_ + 1; }

  // Out-of-band reads return 0.
  cplx at(int n) const { return (n < -k_ || n > k_) ? cplx{} : c_[n + k_]; }
  cplx& operator[](int n) { return c_[n + k_]; }
  const cplx& operator[](int n) const { return c_[n + k_]; }

  std::span<cplx> coeffs() { return c_; }
  std::span<const cplx> coeffs() const { return c_; }

  // Zero-pads or truncates to bandwidth k.
  SpectralField resized(int k) const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);

 private:
  int k_ = 0;
  std::vector<cplx> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx a, SpectralField u);

// Samples u(x_j), x_j = 2 pi j / N.
struct GridField {
  std::vector<cplx> values;
  int size() const { return static_cast<int>(values.size()); }
};

SpectralField analyze(const GridField& g, int k);
GridField synthesize(const SpectralField& u, int N);

SpectralField convolve(const SpectralField& u, const SpectralField& psi);
SpectralField project(const SpectralField& u, int ell);

// Complex inner product, conjugate-linear in the first slot.
cplx inner(const SpectralField& a, const SpectralField& b);
double real_inner(const SpectralField& a, const SpectralField& b);

double l2_norm(const SpectralField& u);
double sobolev_norm(const SpectralField& u, double delta);
double sup_norm(const SpectralField& u);

struct NormKind {
  enum Tag { L2, Sobolev, Sup } tag = L2;
  double delta = 0.0;
};
double norm(const SpectralField& u, NormKind kind);

// Grid size used for pointwise work on bandwidth-k fields.
inline int oversampled_grid(int k) { return 4 * (2 * k + 1); }

}  // namespace nlsfloer
