#pragma once

#include <cstdint>
#include <vector>

#include "nlsfloer/spectral.hpp"

namespace nlsfloer {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DecayLaw { BandLimited, Exponential, Custom };

// Real even smoothing kernel; stored as psi^(0..k_max), psi^(-n) = psi^(n).
class KernelSpec {
 public:
  static KernelSpec exponential(double rate, int k_max);
  static KernelSpec band_limited(std::vector<double> half);
  static KernelSpec custom(std::vector<double> half);

  int k_max() const { return static_cast<int>(half_.size()) - 1; }
  double operator()(int n) const;
  const std::vector<double>& half() const { return half_; }
  DecayLaw law() const { return law_; }
  double rate() const { return rate_; }
  // Largest |n| with nonzero coefficient.
  int support() const;
  double l2() const;
  // L2 norm of the modes |n| > k.
  double tail_l2(int k) const;

 private:
  KernelSpec(std::vector<double> half, DecayLaw law, double rate);
  std::vector<double> half_;
  DecayLaw law_ = DecayLaw::Custom;
  double rate_ = 0.0;
};

KernelSpec truncate_kernel(const KernelSpec& kernel, int k);

struct NonlinearitySpec {
  enum class Kind { Constant, Hartree, Quadratic, Potential };
  Kind kind = Kind::Constant;
  // c for the constant kind, eps otherwise.
  double strength = 0.0;
  // Potential kind only: coefficients of the real potential V.
  SpectralField v_hat;
  bool time_modulated = false;

  static NonlinearitySpec constant(double c);
  static NonlinearitySpec hartree(double eps);
  static NonlinearitySpec quadratic(double eps);
  static NonlinearitySpec potential(double eps, SpectralField v_hat);
  static NonlinearitySpec modulated(NonlinearitySpec base);

  double modulation(double t) const;
  // Certified bound on sup|f| over w in [0, w_max], x in S^1, t in [0,1].
  double sup_bound(double w_max) const;
  // Certified bound on sup|V|; zero for non-potential kinds.
  double potential_sup_bound() const;
};

const char* kind_name(NonlinearitySpec::Kind kind);

class ModelSpec {
 public:
  ModelSpec(KernelSpec kernel, NonlinearitySpec nonlinearity, int k);

  int bandwidth() const { return k_; }
  int grid_size() const { return grid_; }
  const KernelSpec& kernel() const { return kernel_; }
  const NonlinearitySpec& nonlinearity() const { return nl_; }
  // psi^(n) for |n| <= k, index n + k.
  const std::vector<double>& psi() const { return psi_; }
  // V(x_j) on the quadrature grid; empty unless potential kind.
  const std::vector<double>& potential_grid() const { return v_grid_; }

  ModelSpec with_strength(double strength) const;
  ModelSpec with_kernel(KernelSpec kernel) const;
  ModelSpec with_bandwidth(int k) const;

  // f and d/dw f at (w, x_j, t).
  double f(double w, int j, double t) const;
  double df(double w, int j, double t) const;
  bool is_diagonal() const;

 private:
  KernelSpec kernel_;
  NonlinearitySpec nl_;
  int k_ = 0;
  int grid_ = 0;
  std::vector<double> psi_;
  std::vector<double> v_grid_;
};

double eval_F(const ModelSpec& model, const SpectralField& u, double t);
SpectralField grad_F(const ModelSpec& model, const SpectralField& u, double t);
SpectralField grad_G(const ModelSpec& model, const SpectralField& u, double t);

// grad H0 = -n^2 u^(n).
SpectralField grad_H0(const SpectralField& u);

struct GapReport {
  int k = 0;
  double radius = 0.0;
  double t = 0.0;
  double f_gap = 0.0;
  double grad_gap = 0.0;
  // sup_x |d1f(|v|^2) v - d1f(|v^k|^2) v^k|, v = u * psi, v^k = u * psi^k.
  double density_gap = 0.0;
  // R * L2(psi - psi^k).
  double analytic_bound = 0.0;
  // Lipschitz constant of w -> d1f(|w|^2) w on the reachable disc.
  double lipschitz = 0.0;
  int samples = 0;
};

GapReport galerkin_gap(const ModelSpec& model, int k, double radius, int samples,
                       std::uint64_t seed, double t = 0.0);

struct HoferOptions {
  int t_nodes = 16;
  int starts = 8;
  int max_iter = 2000;
  double tol = 1e-10;
  std::uint64_t seed = 1;
};

struct HoferReport {
  double estimate = 0.0;
  bool sufficient_gate = false;
  double certified_sup_f = 0.0;
  bool converged = true;
  std::vector<double> t;
  std::vector<double> max_f;
  std::vector<double> min_f;
};

HoferReport hofer_norm(const ModelSpec& model, const HoferOptions& opts = {});

}  // namespace nlsfloer
