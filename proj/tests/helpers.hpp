#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nlsfloer/model.hpp"
#include "nlsfloer/spectral.hpp"

namespace testutil {

using nlsfloer::cplx;
using nlsfloer::SpectralField;

inline SpectralField random_field(int k, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField u(k);
  for (auto& z : u.coeffs()) z = scale * cplx(g(rng), g(rng));
  return u;
}

inline SpectralField unit_random(int k, std::mt19937_64& rng) {
  auto u = random_field(k, rng);
  u *= 1.0 / nlsfloer::l2_norm(u);
  return u;
}

// V = cos x.
inline SpectralField cos_potential() {
  SpectralField v(1);
  v[1] = v[-1] = std::sqrt(2.0 * std::numbers::pi) / 2.0;
  return v;
}

inline nlsfloer::ModelSpec potential_model(int k, double eps = 0.05) {
  using namespace nlsfloer;
  return ModelSpec(KernelSpec::exponential(1.0, 64), NonlinearitySpec::potential(eps, cos_potential()), k);
}

inline double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  const int k = std::max(a.bandwidth(), b.bandwidth());
  for (int n = -k; n <= k; ++n) m = std::max(m, std::abs(a.at(n) - b.at(n)));
  return m;
}

}  // namespace testutil
