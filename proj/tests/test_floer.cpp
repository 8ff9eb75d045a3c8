#include <doctest.h>

#include "helpers.hpp"
#include "nlsfloer/floer.hpp"

using namespace nlsfloer;

namespace {

const double kPi = std::numbers::pi;

ModelSpec constant_model(int k) {
  return ModelSpec(KernelSpec::exponential(1.0, 64), NonlinearitySpec::constant(0.0), k);
}

FloerBoundary free_ends(int k, int n, int Nt) {
  auto u = SpectralField::mode(k, n);
  auto o = free_orbit(u, Nt, gauge_index(u));
  return {o, o};
}

}  // namespace

TEST_CASE("cutoff profile") {
  auto z = build_cutoff(0.0);
  for (double s = -3; s <= 5; s += 0.125) CHECK(z(s) == 0.0);
  auto c = build_cutoff(1.0);
  CHECK(c(-1.0) == 0.0);
  CHECK(c(0.0) == 1.0);
  CHECK(c(2.0) == 1.0);
  CHECK(c(3.0) == 0.0);
  CHECK(c(-2.0) == 0.0);
  CHECK(c(4.0) == 0.0);
  double best = 0.0, at = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    double s = -1.0 + i * 1e-5;
    if (c.derivative(s) > best) {
      best = c.derivative(s);
      at = s;
    }
    CHECK(c.derivative(s) >= 0.0);
  }
  CHECK(std::abs(best - 2.0) < 1e-6);
  CHECK(std::abs(at + 0.5) < 1e-4);
  for (double s = 2.0; s <= 3.0; s += 0.01) {
    CHECK(c.derivative(s) <= 0.0);
    CHECK(c.derivative(s) >= -2.0 - 1e-12);
  }
  CHECK(std::abs((c(-0.5 + 1e-6) - c(-0.5 - 1e-6)) / 2e-6 - c.derivative(-0.5)) < 1e-6);
  CHECK_THROWS(build_cutoff(-0.1));
  auto k = CutoffProfile::connecting(1.0);
  CHECK(k(10.0) == 1.0);
  CHECK(k(-1.0) == 0.0);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((CylinderGrid{4.0, 8, 16, 2}).validate(), FloerError);
  CHECK_THROWS_AS((CylinderGrid{4.0, 32, 4, 2}).validate(), FloerError);
  CHECK_NOTHROW((CylinderGrid{4.0, 16, 8, 2}).validate());
}

TEST_CASE("periodic derivative is exact on resolved modes") {
  const int N = 16;
  auto D = periodic_derivative_matrix(N);
  for (int p = 1; p < N / 2; ++p) {
    double err = 0.0;
    for (int j = 0; j < N; ++j) {
      double d = 0.0;
      for (int l = 0; l < N; ++l) d += D[j * N + l] * std::sin(2 * kPi * p * l / N);
      err = std::max(err, std::abs(d - 2 * kPi * p * std::cos(2 * kPi * p * j / N)));
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("stationary free orbit has zero residual and energy") {
  CylinderGrid g{4.0, 20, 32, 3};
  auto m = testutil::potential_model(3);
  auto b = free_ends(3, 2, 32);
  auto st = constant_state(g, b.left, gauge_index(b.left[0]));
  auto cut0 = build_cutoff(0.0);
  CHECK(floer_residual(m, st, cut0).norm < 1e-10);
  CHECK(floer_energy(m, st, cut0) < 1e-10);
  CHECK(floer_residual(constant_model(3), st, build_cutoff(1.0)).norm < 1e-10);
  auto rows = extract_slices(m, st, cut0, b, 2);
  for (const auto& r : rows) {
    CHECK(r.found);
    CHECK(r.criterion < 1e-20);
  }
}

TEST_CASE("frozen orbit residual is localized where the cutoff is on") {
  CylinderGrid g{4.0, 81, 16, 3};
  auto m = testutil::potential_model(3, 0.05);
  auto b = free_ends(3, 1, 16);
  auto st = constant_state(g, b.left, gauge_index(b.left[0]));
  auto cut = build_cutoff(1.0);
  auto r = floer_residual(m, st, cut);
  CHECK(r.norm > 1e-3);
  const double h = g.h();
  for (int i = 0; i + 1 < g.Ns; ++i) {
    double s = g.s(i) + 0.5 * h;
    double mx = 0.0;
    for (int j = 0; j < g.Nt; ++j) mx = std::max(mx, l2_norm(r.field[static_cast<size_t>(i) * g.Nt + j]));
    if (s < -1.0 || s > 3.0) CHECK(mx < 1e-10);
    if (s > 0.0 && s < 2.0) CHECK(mx > 1e-4);
  }
}

TEST_CASE("transformed and twisted residuals agree") {
  std::mt19937_64 rng(5);
  CylinderGrid g{3.0, 16, 16, 3};
  auto m = testutil::potential_model(3, 0.1);
  FloerState st;
  st.grid = g;
  st.gauge = 0;
  for (int i = 0; i < g.Ns * g.Nt; ++i) st.nodes.push_back(testutil::unit_random(3, rng));
  auto cut = build_cutoff(0.5);
  auto a = floer_residual(m, st, cut);
  auto b = floer_residual_untransformed(m, st, cut);
  CHECK(std::abs(a.norm - b.norm) < 1e-12 * (1.0 + a.norm));
}

TEST_CASE("solve_floer with the free model terminates immediately") {
  CylinderGrid g{4.0, 24, 16, 3};
  auto b = free_ends(3, 1, 16);
  auto st = constant_state(g, b.left, gauge_index(b.left[0]));
  auto r = solve_floer(constant_model(3), g, build_cutoff(0.0), b, st);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  CHECK(r.residual < 1e-12);
  auto r2 = solve_floer(testutil::potential_model(3), g, build_cutoff(0.0), b, initial_guess(g, b, build_cutoff(0.0)));
  CHECK(r2.converged);
  CHECK(r2.iterations == 0);
}

TEST_CASE("hartree cylinders are projectively constant") {
  CylinderGrid g{4.0, 24, 16, 3};
  auto m = ModelSpec(KernelSpec::exponential(1.0, 64), NonlinearitySpec::hartree(0.1), 3);
  auto b = free_ends(3, 1, 16);
  auto cut = build_cutoff(1.0);
  auto r = solve_floer(m, g, cut, b, initial_guess(g, b, cut));
  CHECK(r.converged);
  CHECK(r.residual < 1e-8);
  CHECK(r.energy < 1e-3);
}

TEST_CASE("end spectrum at a free orbit") {
  const int k = 3, n = 1, Nt = 8;
  auto m = testutil::potential_model(k);
  auto u = SpectralField::mode(k, n);
  const int g = gauge_index(u);
  auto beta = end_spectrum(m, free_orbit(u, Nt, g), u, g, 0.0, Nt);
  std::vector<double> expect;
  for (int mm = -k; mm <= k; ++mm) {
    if (mm == n) continue;
    for (int p = -(Nt - 1) / 2; p <= (Nt - 1) / 2; ++p) {
      expect.push_back(n * n - mm * mm - 2 * kPi * p);
      expect.push_back(n * n - mm * mm - 2 * kPi * p);
    }
    // The dropped Nyquist mode of even Nt behaves like p = 0.
    if (Nt % 2 == 0) {
      expect.push_back(n * n - mm * mm);
      expect.push_back(n * n - mm * mm);
    }
  }
  std::sort(expect.begin(), expect.end());
  REQUIRE(beta.size() == expect.size());
  for (size_t i = 0; i < beta.size(); ++i) CHECK(beta[i] == doctest::Approx(expect[i]).epsilon(1e-8));
}

TEST_CASE("potential-kind cylinder to the continued fixed point") {
  const int k = 3, n = 1, Nt = 8;
  auto m = testutil::potential_model(k, 0.05);
  auto c = continue_fixed_point(m, n, uniform_schedule(0.05, 5));
  REQUIRE(c.converged);
  auto seed = c.branch_seed.rep();
  const int g = gauge_index(seed);
  FloerBoundary b{free_orbit(seed, Nt, g), flow_orbit(m, c.path.back().point.rep(), Nt, g)};
  CylinderGrid grid{4.0, 40, Nt, k};
  auto cut = CutoffProfile::connecting(1.0);
  auto r = solve_floer(m, grid, cut, b, initial_guess(grid, b, cut));
  REQUIRE(r.converged);
  CHECK(r.prescribed_left + r.prescribed_right == Nt * 4 * k);
  CHECK(r.residual < 1e-8);
  double hofer = hofer_norm(m).estimate;
  CHECK(r.energy <= 2 * hofer + 1e-3);
  CHECK(fs_distance(r.state.at(grid.Ns - 1, 0), c.path.back().point.rep()) < 1e-6);
  REQUIRE(!r.history.empty());
  CHECK(r.history.front().iteration == 0);
  auto e = energy_density(m, r.state, cut);
  double sum = 0.0;
  for (int i = 0; i < grid.Ns; ++i) {
    double row = 0.0;
    for (int j = 0; j < Nt; ++j) row += e.density[static_cast<size_t>(i) * Nt + j];
    sum += (i == 0 || i == grid.Ns - 1 ? 0.5 : 1.0) * grid.h() * row / Nt;
  }
  CHECK(std::abs(sum - r.energy) < 1e-12);
}
