#include <doctest.h>

#include "helpers.hpp"
#include "nlsfloer/dynamics.hpp"
#include "nlsfloer/model.hpp"

using namespace nlsfloer;

namespace {

const double kPi = std::numbers::pi;

ModelSpec hartree(int k, double eps) { return ModelSpec(KernelSpec::exponential(1.0, 64), NonlinearitySpec::hartree(eps), k); }

std::vector<ModelSpec> catalog(int k) {
  auto ker = KernelSpec::exponential(1.0, 64);
  return {ModelSpec(ker, NonlinearitySpec::constant(0.1), k), ModelSpec(ker, NonlinearitySpec::hartree(0.1), k),
          ModelSpec(ker, NonlinearitySpec::quadratic(0.1), k),
          ModelSpec(ker, NonlinearitySpec::potential(0.1, testutil::cos_potential()), k),
          ModelSpec(ker, NonlinearitySpec::modulated(NonlinearitySpec::quadratic(0.1)), k)};
}

}  // namespace

TEST_CASE("truncate_kernel") {
  auto bl = KernelSpec::band_limited({1.0, 0.6, 0.25});
  auto t = truncate_kernel(bl, 5);
  for (int n = -5; n <= 5; ++n) CHECK(t(n) == bl(n));
  CHECK(bl.tail_l2(2) == 0.0);

  auto ex = KernelSpec::exponential(1.0, 64);
  double expect = 2.0 * std::exp(-8.0) / (1.0 - std::exp(-2.0));
  CHECK(ex.tail_l2(3) * ex.tail_l2(3) == doctest::Approx(expect).epsilon(1e-12));
  auto full = truncate_kernel(ex, 64);
  for (int n = 0; n <= 64; ++n) CHECK(full(n) == ex(n));
  double prev = INFINITY;
  for (int k = 0; k < 20; ++k) {
    CHECK(ex.tail_l2(k) <= prev);
    prev = ex.tail_l2(k);
  }
}

TEST_CASE("eval_F closed forms") {
  auto ker = KernelSpec::exponential(1.0, 64);
  std::mt19937_64 rng(1);
  ModelSpec c(ker, NonlinearitySpec::constant(0.1), 4);
  CHECK(eval_F(c, testutil::random_field(4, rng), 0.3) == doctest::Approx(-kPi / 10));
  auto h = hartree(4, 0.1);
  CHECK(eval_F(h, SpectralField::mode(4, 0), 0.0) == doctest::Approx(-0.05).epsilon(1e-13));
  CHECK(eval_F(h, SpectralField(4), 0.0) == 0.0);
  auto u = testutil::random_field(4, rng);
  double expect = 0.0;
  for (int n = -4; n <= 4; ++n) expect += std::exp(-2.0 * std::abs(n)) * std::norm(u[n]);
  CHECK(eval_F(h, u, 0.0) == doctest::Approx(-0.05 * expect).epsilon(1e-12));
}

TEST_CASE("grad_F closed forms") {
  std::mt19937_64 rng(2);
  ModelSpec c(KernelSpec::exponential(1.0, 64), NonlinearitySpec::constant(0.1), 4);
  CHECK(l2_norm(grad_F(c, testutil::random_field(4, rng), 0.0)) == 0.0);
  auto g = grad_F(hartree(4, 0.1), SpectralField::mode(4, 0), 0.0);
  CHECK(std::abs(g[0] + 0.1) < 1e-14);
  for (int n = 1; n <= 4; ++n) CHECK(std::abs(g[n]) + std::abs(g[-n]) < 1e-14);
}

TEST_CASE("gradients match central differences for every catalog member") {
  std::mt19937_64 rng(42);
  const double tau = 1e-5;
  for (const auto& m : catalog(16)) {
    for (int trial = 0; trial < 10; ++trial) {
      auto u = testutil::random_field(16, rng, 0.3);
      auto h = testutil::random_field(16, rng, 0.3);
      const double t = 0.37;
      double fd = (eval_F(m, u + tau * h, t) - eval_F(m, u - tau * h, t)) / (2 * tau);
      double an = real_inner(grad_F(m, u, t), h);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-8));
      auto G = [&](const SpectralField& v) { return eval_F(m, free_flow(v, t), t); };
      double fdg = (G(u + tau * h) - G(u - tau * h)) / (2 * tau);
      double ang = real_inner(grad_G(m, u, t), h);
      CHECK(std::abs(fdg - ang) <= 1e-6 * std::max(std::abs(ang), 1e-8));
    }
  }
}

TEST_CASE("grad_G identities") {
  std::mt19937_64 rng(9);
  auto m = testutil::potential_model(6);
  auto u = testutil::random_field(6, rng);
  CHECK(testutil::max_diff(grad_G(m, u, 0.0), grad_F(m, u, 0.0)) < 1e-15);
  auto h = hartree(6, 0.2);
  CHECK(testutil::max_diff(grad_G(h, u, 0.4), grad_F(h, u, 0.4)) < 1e-13);
}

TEST_CASE("Hamiltonian vector field is tangent to the sphere") {
  std::mt19937_64 rng(4);
  for (const auto& m : catalog(8)) {
    auto u = testutil::random_field(8, rng);
    auto x = grad_F(m, u, 0.2);
    x *= cplx(0.0, 1.0);
    CHECK(std::abs(real_inner(u, x)) < 1e-13 * (1.0 + l2_norm(x)));
  }
}

TEST_CASE("F is 1-periodic in t") {
  std::mt19937_64 rng(8);
  for (const auto& m : catalog(6)) {
    auto u = testutil::random_field(6, rng);
    CHECK(eval_F(m, u, 0.3) == doctest::Approx(eval_F(m, u, 1.3)).epsilon(1e-13));
  }
}

TEST_CASE("galerkin_gap") {
  auto bl = ModelSpec(KernelSpec::band_limited({1.0, 0.6, 0.25}),
                      NonlinearitySpec::potential(0.1, testutil::cos_potential()), 10);
  auto r = galerkin_gap(bl, 3, 1.0, 16, 1);
  CHECK(r.f_gap == 0.0);
  CHECK(r.grad_gap == 0.0);
  CHECK(r.analytic_bound == 0.0);

  auto m = testutil::potential_model(16, 0.1);
  auto z = galerkin_gap(m, 4, 0.0, 8, 1);
  CHECK(z.f_gap == 0.0);
  CHECK(z.grad_gap == 0.0);

  for (int k = 2; k < 8; ++k) {
    auto g = galerkin_gap(m, k, 1.0, 16, 3);
    double expect = std::sqrt(2.0 * std::exp(-2.0 * (k + 1)) / (1.0 - std::exp(-2.0)));
    CHECK(g.analytic_bound == doctest::Approx(expect).epsilon(1e-10));
    CHECK(g.density_gap <= g.lipschitz * g.analytic_bound * (1.0 + 1e-9));
  }
}

TEST_CASE("hofer_norm") {
  ModelSpec c(KernelSpec::exponential(1.0, 64), NonlinearitySpec::constant(0.1), 4);
  CHECK(hofer_norm(c).estimate == 0.0);
  for (int k : {2, 4}) {
    auto r = hofer_norm(hartree(k, 0.1));
    double expect = 0.05 * (1.0 - std::exp(-2.0 * k));
    CHECK(std::abs(r.estimate - expect) < 0.01 * expect);
  }
  // eps * L2(psi)^2 = 0.12.
  auto ker = KernelSpec::exponential(1.0, 64);
  double eps = 0.12 / (ker.l2() * ker.l2());
  CHECK(hofer_norm(ModelSpec(ker, NonlinearitySpec::hartree(eps), 4)).sufficient_gate);
  CHECK_FALSE(hofer_norm(ModelSpec(ker, NonlinearitySpec::hartree(0.13 / (ker.l2() * ker.l2())), 4)).sufficient_gate);
}
