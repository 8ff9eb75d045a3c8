#include <doctest.h>

#include "helpers.hpp"
#include "nlsfloer/spectral.hpp"

using namespace nlsfloer;
using testutil::max_diff;

namespace {
const double kPi = std::numbers::pi;
const double kNorm = 1.0 / std::sqrt(2.0 * kPi);
}  // namespace

TEST_CASE("analyze inverts the expansion convention") {
  GridField g{std::vector<cplx>(8, kNorm)};
  auto u = analyze(g, 3);
  CHECK(std::abs(u[0] - 1.0) < 1e-14);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(u[n]) + std::abs(u[-n]) < 1e-14);

  GridField h;
  for (int j = 0; j < 16; ++j) h.values.push_back(kNorm * std::polar(1.0, 3.0 * 2.0 * kPi * j / 16));
  auto v = analyze(h, 4);
  for (int n = -4; n <= 4; ++n) CHECK(std::abs(v[n] - (n == 3 ? 1.0 : 0.0)) < 1e-14);
}

TEST_CASE("synthesize then analyze is the identity") {
  std::mt19937_64 rng(7);
  auto u = testutil::random_field(8, rng);
  CHECK(max_diff(analyze(synthesize(u, 32), 8), u) < 1e-12);
}

TEST_CASE("synthesize single modes") {
  auto g = synthesize(SpectralField::mode(2, 0), 8);
  for (auto z : g.values) CHECK(std::abs(z - kNorm) < 1e-15);
  auto h = synthesize(SpectralField::mode(2, 1), 8);
  for (int j = 0; j < 8; ++j) CHECK(std::abs(h.values[j] - kNorm * std::polar(1.0, 2.0 * kPi * j / 8)) < 1e-15);
}

TEST_CASE("Parseval on band-limited fields") {
  std::mt19937_64 rng(11);
  for (int k : {0, 3, 17, 64}) {
    auto u = testutil::random_field(k, rng);
    auto g = synthesize(u, 2 * k + 5);
    double s = 0.0;
    for (auto z : g.values) s += std::norm(z);
    s *= 2.0 * kPi / g.size();
    CHECK(std::abs(s - l2_norm(u) * l2_norm(u)) < 1e-12 * (1.0 + s));
  }
}

TEST_CASE("grids too small to hold the band are rejected") {
  CHECK_THROWS_AS(synthesize(SpectralField(4), 8), SpectralError);
  CHECK_THROWS_AS(analyze(GridField{std::vector<cplx>(8)}, 4), SpectralError);
}

TEST_CASE("convolve multiplies coefficients") {
  std::mt19937_64 rng(3);
  auto u = testutil::random_field(4, rng);
  SpectralField one(4);
  for (auto& z : one.coeffs()) z = 1.0;
  CHECK(max_diff(convolve(u, one), u) == 0.0);
  CHECK(l2_norm(convolve(u, SpectralField(4))) == 0.0);
  SpectralField a(2), b(2);
  a[1] = 2.0;
  b[1] = 0.5;
  CHECK(convolve(a, b)[1] == cplx(1.0));
  CHECK(convolve(u, SpectralField(2)).bandwidth() == 2);
}

TEST_CASE("project zeroes the tail") {
  std::mt19937_64 rng(5);
  auto u = testutil::random_field(6, rng);
  CHECK(max_diff(project(u, 6), u) == 0.0);
  SpectralField ones(4);
  for (auto& z : ones.coeffs()) z = 1.0;
  auto p = project(ones, 2);
  CHECK(std::abs(l2_norm(p) - std::sqrt(5.0)) < 1e-15);
  CHECK(p[3] == cplx(0.0));
  double tail = 0.0;
  for (int n = 3; n <= 6; ++n) tail += std::norm(u[n]) + std::norm(u[-n]);
  double d = l2_norm(u - project(u, 2));
  CHECK(std::abs(d * d - tail) < 1e-13);
  CHECK(max_diff(project(project(u, 3), 3), project(u, 3)) == 0.0);
}

TEST_CASE("norm conventions") {
  auto e0 = SpectralField::mode(3, 0);
  CHECK(norm(e0, {NormKind::L2}) == doctest::Approx(1.0));
  CHECK(norm(e0, {NormKind::Sobolev, 2.5}) == doctest::Approx(1.0));
  CHECK(norm(SpectralField::mode(3, 2), {NormKind::Sobolev, 1.0}) == doctest::Approx(std::sqrt(5.0)));
  auto c = SpectralField::mode(3, 0, std::sqrt(2.0 * kPi));
  CHECK(std::abs(sup_norm(c) - 1.0) < 1e-14);
}
