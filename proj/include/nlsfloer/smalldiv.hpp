#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nlsfloer {

using HighPrec = boost::multiprecision::cpp_bin_float_50;

class SmallDivError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DivisorRecord {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::int64_t p_star = 0;
  double value = 0.0;  // |m^2 - n^2 - 2 pi p_star|
};

DivisorRecord divisor(std::int64_t m, std::int64_t n);

struct ScanRow {
  DivisorRecord rec;
  bool is_record = false;
};

struct ScanReport {
  std::int64_t n = 0;
  std::int64_t m_max = 0;
  std::vector<DivisorRecord> records;
  std::vector<ScanRow> rows;  // every scanned m, kept for CSV export
  double fitted_c = 0.0;
  double worst_exponent = 0.0;
};

ScanReport divisor_scan(std::int64_t m_max, std::int64_t n);

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
  double error = 0.0;  // |x - p/q|
};

struct ConvergentList {
  std::vector<Convergent> items;
  bool exact = false;      // x was rational and the expansion terminated
  bool truncated = false;  // precision ran out before count terms
};

ConvergentList convergents(const HighPrec& x, int count);

HighPrec inverse_two_pi();
HighPrec golden_ratio();

// Compactly supported forcing on [a, b].
struct Forcing {
  double a = 0.0;
  double b = 0.0;
  std::function<double(double)> f;
};

struct OdeBound {
  double sup_w = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::vector<double> s;  // nodes s_0 = a, ..., s_M = b
  std::vector<double> w;
};

// Bounded solution of w' = lambda w + f by exact-exponential midpoint quadrature.
OdeBound ode_bound_check(double lambda, double c, const Forcing& forcing, int nodes = 10000);

// Sum of a few smooth bumps with sup|f| = c * (drawn factor in [0.3, 0.95]).
Forcing random_bump_forcing(std::uint64_t seed, double c);

}  // namespace nlsfloer
