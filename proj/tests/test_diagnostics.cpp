#include <doctest.h>

#include "helpers.hpp"
#include "nlsfloer/diagnostics.hpp"

using namespace nlsfloer;

TEST_CASE("normal_profile of fields") {
  auto e2 = SpectralField::mode(6, 2);
  auto p = normal_profile(e2, {2, 3, 4}, 0);
  for (double v : p.norms) CHECK(v == 0.0);
  auto q = normal_profile(e2, {0, 1}, 1);
  CHECK(q.norms[0] == doctest::Approx(std::sqrt(5.0)));

  std::mt19937_64 rng(1);
  auto u = testutil::random_field(8, rng);
  auto r = normal_profile(u, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 0);
  for (size_t i = 1; i < r.norms.size(); ++i) CHECK(r.norms[i] <= r.norms[i - 1]);
  CHECK(r.norms.back() == 0.0);
  CHECK(r.weighted[2][1] == doctest::Approx(r.norms[2] * 4.0));
  CHECK_THROWS(normal_profile(u, {9}, 0));
  CHECK_THROWS(normal_profile(u, {2, 1}, 0));
  CHECK_THROWS(normal_profile(u, {1}, 3));
}

TEST_CASE("weighted_decreasing") {
  SpectralField u(10);
  for (int n = -10; n <= 10; ++n) u[n] = std::exp(-3.0 * std::abs(n));
  auto p = normal_profile(u, {1, 2, 3, 4, 5}, 0);
  for (size_t d = 0; d < 3; ++d) CHECK(weighted_decreasing(p, d));
  SpectralField slow(10);
  for (int n = -10; n <= 10; ++n) slow[n] = 1.0 / (1.0 + n * n);
  CHECK_FALSE(weighted_decreasing(normal_profile(slow, {1, 2, 3, 4, 5}, 0), 2));
}

TEST_CASE("normal_profile of states takes the sup over nodes") {
  CylinderGrid g{4.0, 16, 8, 4};
  auto u = SpectralField::mode(4, 1);
  auto st = constant_state(g, free_orbit(u, 8, gauge_index(u)), gauge_index(u));
  auto p = normal_profile(st, {1, 2}, 0);
  CHECK(p.norms[0] == 0.0);
  st.at(3, 2)[3] = 0.5;
  auto q = normal_profile(st, {1, 2, 3}, 0);
  CHECK(q.norms[0] == doctest::Approx(0.5));
  CHECK(q.norms[2] == 0.0);
  // A stationary orbit in the transformed picture is constant in t.
  auto st2 = constant_state(g, free_orbit(u, 8, gauge_index(u)), gauge_index(u));
  CHECK(normal_profile(st2, {0}, 1).norms[0] < 1e-12);
}

TEST_CASE("gradient_monitor") {
  CylinderGrid g{4.0, 20, 16, 3};
  auto m = testutil::potential_model(3);
  auto u = SpectralField::mode(3, 2);
  auto st = constant_state(g, free_orbit(u, 16, gauge_index(u)), gauge_index(u));
  auto mon = gradient_monitor(m, st, build_cutoff(0.0));
  CHECK(mon.sup_ds == 0.0);
  CHECK(mon.density.size() == static_cast<size_t>(g.Ns * g.Nt));

  auto mon1 = gradient_monitor(m, st, build_cutoff(1.0));
  double sum = 0.0;
  for (int i = 0; i < g.Ns; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.Nt; ++j) row += mon1.density[static_cast<size_t>(i) * g.Nt + j];
    sum += (i == 0 || i == g.Ns - 1 ? 0.5 : 1.0) * g.h() * row / g.Nt;
  }
  CHECK(std::abs(sum - floer_energy(m, st, build_cutoff(1.0))) < 1e-8);
}

TEST_CASE("distinctness_report") {
  std::vector<ProjectivePoint> modes;
  for (int n = 0; n < 3; ++n) modes.emplace_back(SpectralField::mode(3, n));
  auto r = distinctness_report(modes);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(r.distance[a][b] == doctest::Approx(a == b ? 0.0 : std::numbers::pi / 2));
  CHECK(r.flagged.empty());

  std::mt19937_64 rng(3);
  auto u = testutil::unit_random(3, rng);
  auto v = testutil::unit_random(3, rng);
  auto d = distinctness_report({ProjectivePoint(u), ProjectivePoint(v), ProjectivePoint(u)});
  REQUIRE(d.flagged.size() == 1);
  CHECK(d.flagged[0] == std::pair<int, int>(0, 2));
  CHECK(d.distance[0][2] < 1e-7);
  auto rot = distinctness_report({ProjectivePoint(std::polar(1.0, 1.1) * u), ProjectivePoint(v)});
  CHECK(rot.distance[0][1] == doctest::Approx(d.distance[0][1]).epsilon(1e-12));
  CHECK(rot.distance[1][0] == rot.distance[0][1]);
  CHECK_THROWS(distinctness_report({ProjectivePoint(u)}));
}
