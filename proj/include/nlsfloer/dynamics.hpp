#pragma once

#include <string>
#include <vector>

#include "nlsfloer/model.hpp"
#include "nlsfloer/spectral.hpp"

namespace nlsfloer {

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// u^(n) -> e^{-i n^2 t} u^(n).
SpectralField free_flow(const SpectralField& u, double t);

// Pointwise u(x) -> e^{i t V(x)} u(x) on a grid of V.size() samples; the
// output keeps the largest bandwidth the grid resolves.
SpectralField potential_flow(const SpectralField& u, const GridField& V, double t);

struct EvolveResult {
  SpectralField state;
  double l2_drift = 0.0;
};

// Strang splitting: half free flow, nonlinear substep, half free flow.
EvolveResult evolve(const ModelSpec& model, const SpectralField& u, double t0, double t1, int steps);

// Unit-norm representative with the largest coefficient real positive
// (ties: lowest |n|, then n >= 0).
class ProjectivePoint {
 public:
  ProjectivePoint() = default;
  explicit ProjectivePoint(const SpectralField& u);

  const SpectralField& rep() const { return rep_; }
  int gauge() const { return gauge_; }

 private:
  SpectralField rep_;
  int gauge_ = 0;
};

int gauge_index(const SpectralField& u);
// Rotates so that u^(gauge) is real positive; norm untouched.
SpectralField gauge_fixed(const SpectralField& u, int gauge);

double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q);
double fs_distance(const SpectralField& a, const SpectralField& b);

double fixed_point_residual(const ModelSpec& model, const ProjectivePoint& p, int steps);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 30;
  int steps = 400;
  double fd_step = 1e-6;
  int max_restarts = 2;
};

struct FixedPointResult {
  ProjectivePoint point;
  double phase = 0.0;  // in (-pi, pi]
  double residual = 0.0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  std::string diagnostic;
};

FixedPointResult newton_fixed_point(const ModelSpec& model, const ProjectivePoint& guess,
                                    const NewtonOptions& opts = {});

struct ContinuationStep {
  double eps = 0.0;
  ProjectivePoint point;
  double phase = 0.0;
  double residual = 0.0;
};

struct ContinuationOptions {
  NewtonOptions newton;
  int bisection_depth = 8;
};

struct ContinuationResult {
  int n = 0;
  std::vector<ContinuationStep> path;
  bool converged = false;
  // First converged point projected onto span{e_n, e_-n}: the free fixed
  // point the branch leaves from.
  ProjectivePoint branch_seed;
  std::string diagnostic;
};

// model.nonlinearity().strength is replaced by each schedule value.
ContinuationResult continue_fixed_point(const ModelSpec& model, int n, const std::vector<double>& eps_schedule,
                                        const ContinuationOptions& opts = {});

std::vector<double> uniform_schedule(double eps, int steps);

double wrap_phase(double a);

}  // namespace nlsfloer
