#include "nlsfloer/smalldiv.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nlsfloer {

namespace {

const HighPrec& two_pi_hp() {
  static const HighPrec v = 2 * boost::math::constants::pi<HighPrec>();
  return v;
}

}  // namespace

HighPrec inverse_two_pi() { return 1 / two_pi_hp(); }

HighPrec golden_ratio() { return (1 + boost::multiprecision::sqrt(HighPrec(5))) / 2; }

DivisorRecord divisor(std::int64_t m, std::int64_t n) {
  DivisorRecord r;
  r.m = m;
  r.n = n;
  const std::int64_t q = m * m - n * n;
  if (static_cast<double>(m) * static_cast<double>(m) > 1e8) {
    HighPrec qh(q);
    HighPrec p = boost::multiprecision::round(qh / two_pi_hp());
    r.p_star = p.convert_to<std::int64_t>();
    r.value = boost::multiprecision::abs(qh - two_pi_hp() * p).convert_to<double>();
  } else {
    const double tp = 2.0 * std::numbers::pi;
    r.p_star = std::llround(double(q) / tp);
    r.value = std::abs(double(q) - tp * double(r.p_star));
  }
  return r;
}

ScanReport divisor_scan(std::int64_t m_max, std::int64_t n) {
  const std::int64_t m0 = std::abs(n) + 1;
  if (m_max < m0) throw SmallDivError("divisor_scan needs m_max > |n|");
  ScanReport rep;
  rep.n = n;
  rep.m_max = m_max;
  rep.rows.reserve(static_cast<size_t>(m_max - m0 + 1));
  double best = std::numeric_limits<double>::infinity();
  rep.fitted_c = std::numeric_limits<double>::infinity();
  for (std::int64_t m = m0; m <= m_max; ++m) {
    auto d = divisor(m, n);
    bool rec = d.value < best;
    if (rec) {
      best = d.value;
      rep.records.push_back(d);
    }
    rep.fitted_c = std::min(rep.fitted_c, d.value * std::pow(double(m), 14.0));
    rep.rows.push_back({d, rec});
  }
  rep.worst_exponent = 0.0;
  for (size_t i = 1; i < rep.records.size(); ++i) {
    const auto& a = rep.records[i - 1];
    const auto& b = rep.records[i];
    double slope = (std::log(b.value) - std::log(a.value)) / (std::log(double(b.m)) - std::log(double(a.m)));
    rep.worst_exponent = std::min(rep.worst_exponent, slope);
  }
  return rep;
}

ConvergentList convergents(const HighPrec& x, int count) {
  if (!(x > 0)) throw SmallDivError("convergents needs x > 0");
  if (count < 1) throw SmallDivError("convergents needs count >= 1");
  // Remainders this close to an integer are taken as exact; 50 digits leave
  // ample room above the working epsilon.
  const HighPrec snap("1e-35");
  const double q_cap = 1e18;

  ConvergentList out;
  std::int64_t p_prev = 0, q_prev = 1, p_cur = 1, q_cur = 0;
  HighPrec y = x;
  for (int i = 0; i < count; ++i) {
    HighPrec a_hp = boost::multiprecision::floor(y);
    HighPrec frac = y - a_hp;
    bool last = false;
    if (1 - frac < snap) {
      a_hp += 1;
      last = true;
    } else if (frac < snap) {
      last = true;
    }
    HighPrec pn_hp = a_hp * p_cur + p_prev;
    HighPrec qn_hp = a_hp * q_cur + q_prev;
    if (qn_hp > q_cap || pn_hp > q_cap) {
      out.truncated = true;
      break;
    }
    std::int64_t a = a_hp.convert_to<std::int64_t>();
    std::int64_t pn = a * p_cur + p_prev, qn = a * q_cur + q_prev;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = pn;
    q_cur = qn;
    Convergent c;
    c.p = pn;
    c.q = qn;
    c.error = boost::multiprecision::abs(x - HighPrec(pn) / HighPrec(qn)).convert_to<double>();
    out.items.push_back(c);
    if (last) {
      out.exact = true;
      break;
    }
    y = 1 / frac;
    // 1/q^2 must stay well above the working precision for the bound to mean anything.
    if (HighPrec(qn) * HighPrec(qn) > HighPrec("1e40")) {
      if (i + 1 < count) out.truncated = true;
      break;
    }
  }
  return out;
}

OdeBound ode_bound_check(double lambda, double c, const Forcing& forcing, int nodes) {
  if (std::abs(lambda) < 1e-12) throw SmallDivError("|lambda| below 1e-12: the bound is vacuous");
  if (!(c > 0)) throw SmallDivError("ode_bound_check needs c > 0");
  if (!(forcing.b > forcing.a) || !forcing.f) throw SmallDivError("forcing needs a window a < b");
  if (nodes < 2) throw SmallDivError("ode_bound_check needs at least 2 nodes");
  const int M = nodes;
  const double h = (forcing.b - forcing.a) / M;
  std::vector<double> mid(M);
  double fmax = 0.0;
  for (int i = 0; i < M; ++i) {
    mid[i] = forcing.f(forcing.a + (i + 0.5) * h);
    fmax = std::max(fmax, std::abs(mid[i]));
  }
  if (fmax > c * (1.0 + 1e-12)) throw SmallDivError("forcing exceeds the bound c");

  OdeBound r;
  r.s.resize(M + 1);
  r.w.assign(M + 1, 0.0);
  for (int i = 0; i <= M; ++i) r.s[i] = forcing.a + i * h;
  const double decay = std::exp(-std::abs(lambda) * h);
  const double half = std::exp(-0.5 * std::abs(lambda) * h);
  if (lambda > 0) {
    // w = 0 beyond the window; integrate the future backwards.
    for (int i = M - 1; i >= 0; --i) r.w[i] = decay * r.w[i + 1] - h * half * mid[i];
  } else {
    for (int i = 0; i < M; ++i) r.w[i + 1] = decay * r.w[i] + h * half * mid[i];
  }
  // Outside [a, b] the solution is a pure exponential tail of the end value,
  // so the sup is attained on the grid.
  for (double v : r.w) r.sup_w = std::max(r.sup_w, std::abs(v));
  r.bound = std::sqrt(2.0) * c / std::abs(lambda);
  r.pass = r.sup_w <= r.bound + 1e-10;
  return r;
}

Forcing random_bump_forcing(std::uint64_t seed, double c) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> center(-5.0, 5.0), width(0.3, 3.0), amp(-1.0, 1.0), scale(0.3, 0.95);
  struct Bump {
    double c, w, a;
  };
  std::vector<Bump> bumps(static_cast<size_t>(count(rng)));
  double lo = 1e300, hi = -1e300;
  for (auto& b : bumps) {
    b = {center(rng), width(rng), amp(rng)};
    lo = std::min(lo, b.c - b.w);
    hi = std::max(hi, b.c + b.w);
  }
  auto raw = [bumps](double s) {
    double v = 0.0;
    for (const auto& b : bumps) {
      double x = (s - b.c) / b.w;
      if (std::abs(x) < 1.0) v += b.a * std::exp(1.0 - 1.0 / (1.0 - x * x));
    }
    return v;
  };
  double mx = 0.0;
  const int probe = 20000;
  for (int i = 0; i <= probe; ++i) mx = std::max(mx, std::abs(raw(lo + (hi - lo) * i / probe)));
  // Sampled sup can undershoot the true one slightly; keep a margin below c.
  double k = mx > 0 ? c * scale(rng) / (mx * 1.001) : 0.0;
  Forcing f;
  f.a = lo;
  f.b = hi;
  f.f = [raw, k](double s) { return k * raw(s); };
  return f;
}

}  // namespace nlsfloer
