#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "nlsfloer/smalldiv.hpp"

using namespace nlsfloer;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

double brute(std::int64_t m, std::int64_t n) {
  const double q = double(m * m - n * n);
  double best = INFINITY;
  const std::int64_t hi = std::int64_t(std::ceil(std::abs(q) / kTwoPi)) + 1;
  for (std::int64_t p = -hi; p <= hi; ++p) best = std::min(best, std::abs(q - kTwoPi * p));
  return best;
}

}  // namespace

TEST_CASE("divisor examples") {
  auto a = divisor(1, 1);
  CHECK(a.value == 0.0);
  CHECK(a.p_star == 0);
  auto b = divisor(5, 0);
  CHECK(b.p_star == 4);
  CHECK(b.value == doctest::Approx(std::abs(25 - 8 * std::numbers::pi)).epsilon(1e-14));
  CHECK(std::abs(b.value - 0.132741) < 1e-6);
  auto c = divisor(3, 1);
  CHECK(c.p_star == 1);
  CHECK(std::abs(c.value - 1.716815) < 1e-6);
}

TEST_CASE("divisor symmetries and brute force") {
  for (std::int64_t m = 0; m < 60; ++m)
    for (std::int64_t n = 0; n < 8; ++n) {
      double v = divisor(m, n).value;
      CHECK(v == doctest::Approx(brute(m, n)).epsilon(1e-12));
      CHECK(v == divisor(-m, n).value);
      CHECK(v == divisor(m, -n).value);
      CHECK(v <= std::numbers::pi);
      CHECK(v == doctest::Approx(divisor(n, m).value).epsilon(1e-12));
    }
}

TEST_CASE("large m uses the extended-precision path") {
  const std::int64_t m = 10001;
  auto r = divisor(m, 0);
  HighPrec q(m * m);
  HighPrec p = boost::multiprecision::round(q * inverse_two_pi());
  HighPrec exact = boost::multiprecision::abs(q - p / inverse_two_pi());
  CHECK(r.value == doctest::Approx(exact.convert_to<double>()).epsilon(1e-12));
}

TEST_CASE("divisor_scan") {
  auto one = divisor_scan(1, 0);
  CHECK(one.records.size() == 1);
  auto s = divisor_scan(100, 0);
  bool found = false;
  for (const auto& r : s.records)
    if (r.m == 5) found = std::abs(r.value - 0.132741) < 1e-6;
  CHECK(found);
  auto t0 = std::chrono::steady_clock::now();
  auto big = divisor_scan(2000, 0);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
  CHECK(big.fitted_c > 0.0);
  // Consecutive record minima at m = 443 and 484 give the steepest slope.
  double steepest = 0.0;
  for (size_t i = 1; i < big.records.size(); ++i) {
    const auto& a = big.records[i - 1];
    const auto& b = big.records[i];
    steepest = std::min(steepest, std::log(b.value / a.value) / std::log(double(b.m) / double(a.m)));
  }
  CHECK(big.worst_exponent == doctest::Approx(steepest).epsilon(1e-12));
  CHECK(big.worst_exponent == doctest::Approx(-17.0135).epsilon(1e-4));
  for (const auto& row : big.rows) CHECK(row.rec.value >= big.fitted_c * std::pow(double(row.rec.m), -14.0) * (1 - 1e-12));
  CHECK_THROWS_AS(divisor_scan(3, 3), SmallDivError);
}

TEST_CASE("convergents") {
  auto r = convergents(HighPrec(3) / 7, 3);
  REQUIRE(r.items.size() == 3);
  CHECK(r.items[0].p == 0);
  CHECK(r.items[0].q == 1);
  CHECK(r.items[1].p == 1);
  CHECK(r.items[1].q == 2);
  CHECK(r.items[2].p == 3);
  CHECK(r.items[2].q == 7);
  CHECK(r.exact);
  auto r10 = convergents(HighPrec(3) / 7, 10);
  CHECK(r10.items.size() == 3);
  CHECK(r10.exact);

  auto g = convergents(golden_ratio(), 30);
  std::int64_t f0 = 1, f1 = 1;
  for (size_t i = 0; i < g.items.size(); ++i) {
    CHECK(g.items[i].p == f1);
    CHECK(g.items[i].q == f0);
    std::int64_t f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
  }

  auto c = convergents(inverse_two_pi(), 25);
  REQUIRE(c.items.size() >= 2);
  CHECK(c.items[1].p == 1);
  CHECK(c.items[1].q == 6);
  for (const auto& it : c.items) CHECK(it.error < 1.0 / (double(it.q) * double(it.q)));
  CHECK_THROWS_AS(convergents(HighPrec(-1), 3), SmallDivError);
}

TEST_CASE("ode_bound_check") {
  Forcing zero{0.0, 1.0, [](double) { return 0.0; }};
  auto z = ode_bound_check(1.0, 1.0, zero);
  CHECK(z.sup_w == 0.0);
  CHECK(z.pass);

  Forcing bump{-1.0, 1.0, [](double s) { return std::abs(s) < 1 ? 0.9 * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }};
  auto b = ode_bound_check(-1.0, 1.0, bump);
  CHECK(b.pass);
  CHECK(b.sup_w <= 0.9);

  CHECK_THROWS_AS(ode_bound_check(0.0, 1.0, bump), SmallDivError);
  Forcing big{0.0, 1.0, [](double) { return 2.0; }};
  CHECK_THROWS_AS(ode_bound_check(1.0, 1.0, big), SmallDivError);
}

TEST_CASE("ode_bound_check on random forcings stays below c/|lambda|") {
  for (double lambda : {-2.0, -0.5, 0.5, 2.0})
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto f = random_bump_forcing(seed, 1.0);
      auto r = ode_bound_check(lambda, 1.0, f);
      CHECK(r.pass);
      CHECK(r.sup_w <= 1.0 / std::abs(lambda) + 1e-9);
    }
}
