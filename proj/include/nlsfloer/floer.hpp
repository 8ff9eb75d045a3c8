#pragma once

#include <string>
#include <vector>

#include "nlsfloer/dynamics.hpp"
#include "nlsfloer/model.hpp"
#include "nlsfloer/spectral.hpp"

namespace nlsfloer {

class FloerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Symmetric exponential smoothstep e(x)/(e(x)+e(1-x)), e(x) = exp(-1/x).
double smoothstep(double x);
double smoothstep_derivative(double x);

class CutoffProfile {
 public:
  // phi_T: up-ramp on [-1,0], plateau [0,2T], down-ramp on [2T,2T+1]; for
  // T < 1 the profile is additionally scaled by smoothstep(T), so phi_0 = 0.
  static CutoffProfile family(double T);
  // Up-ramp on [-1,0] and then constant, scaled by smoothstep(min(T,1)).
  // Used for curves whose right end sits on a fixed point of the full flow.
  static CutoffProfile connecting(double T);

  double T() const { return T_; }
  bool is_connecting() const { return connecting_; }
  double amplitude() const { return amp_; }
  double operator()(double s) const;
  double derivative(double s) const;

 private:
  CutoffProfile(double T, bool connecting);
  double T_ = 0.0;
  bool connecting_ = false;
  double amp_ = 0.0;
};

CutoffProfile build_cutoff(double T);

struct CylinderGrid {
  double S = 4.0;
  int Ns = 200;
  int Nt = 32;
  int k = 4;

  double h() const { return 2.0 * S / (Ns - 1); }
  double s(int i) const { return -S + i * h(); }
  double t(int j) const { return double(j) / Nt; }
  void validate() const;
};

// Cylinder map in the transformed 1-periodic picture. Nodes are unit-norm
// representatives with coefficient `gauge` real positive.
struct FloerState {
  CylinderGrid grid;
  int gauge = 0;
  std::vector<SpectralField> nodes;  // index i * Nt + j

  SpectralField& at(int i, int j) { return nodes[static_cast<size_t>(i) * grid.Nt + j]; }
  const SpectralField& at(int i, int j) const { return nodes[static_cast<size_t>(i) * grid.Nt + j]; }
  void validate() const;
};

// Boundary orbits sampled at t_j, in the transformed picture.
struct FloerBoundary {
  std::vector<SpectralField> left;
  std::vector<SpectralField> right;
};

// t -> free_flow(u, t) for a projective fixed point u of the free flow.
std::vector<SpectralField> free_orbit(const SpectralField& u, int Nt, int gauge);
// t -> phi_t(u) under the full model.
std::vector<SpectralField> flow_orbit(const ModelSpec& model, const SpectralField& u, int Nt, int gauge,
                                      int steps_per_unit = 1000);

FloerState constant_state(const CylinderGrid& grid, const std::vector<SpectralField>& orbit, int gauge);

struct FloerResidual {
  // Midpoint values (s_i + h/2, t_j), index i * Nt + j, i < Ns - 1.
  std::vector<SpectralField> field;
  double norm = 0.0;
};

FloerResidual floer_residual(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff);
// Same residual written in the twisted picture u~ = phi0_{-t}(state), with
// grad G in place of grad H0 + grad F.
FloerResidual floer_residual_untransformed(const ModelSpec& model, const FloerState& state,
                                           const CutoffProfile& cutoff);

struct EnergyDensity {
  std::vector<double> density;  // 1/2 (|d_s w|^2 + |d_t w - X(w)|^2) per node
  std::vector<double> ds;       // |d_s w| horizontal
  std::vector<double> dt;       // |d_t w| horizontal
  std::vector<double> slice;    // int_0^1 |d_t w - X(w)|^2 dt per s-node
  double energy = 0.0;
};

EnergyDensity energy_density(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff);
double floer_energy(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff);

struct FloerOptions {
  double tol = 1e-8;
  int max_iter = 30;
  double mu0 = 1e-6;
  double mu_max = 1e8;
  // Spectral gap used to split end modes into prescribed and free.
  double bc_threshold = 1e-2;
  double fd_step = 1e-7;
};

struct FloerHistoryRow {
  int iteration = 0;
  double residual_norm = 0.0;
  double energy = 0.0;
  double damping = 0.0;
};

struct FloerSolveResult {
  FloerState state;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double bc_residual = 0.0;
  double energy = 0.0;
  int prescribed_left = 0;
  int prescribed_right = 0;
  std::vector<FloerHistoryRow> history;
  std::string diagnostic;
};

// End-mode exponents beta (solutions ~ e^{-beta s}) of the linearized
// equation at a t-orbit, ascending.
std::vector<double> end_spectrum(const ModelSpec& model, const std::vector<SpectralField>& orbit,
                                 const SpectralField& chart_base, int gauge, double phi, int Nt);

FloerState initial_guess(const CylinderGrid& grid, const FloerBoundary& boundary, const CutoffProfile& cutoff);

FloerSolveResult solve_floer(const ModelSpec& model, const CylinderGrid& grid, const CutoffProfile& cutoff,
                             const FloerBoundary& boundary, const FloerState& guess, const FloerOptions& opts = {});

struct SliceRow {
  int gamma = 0;
  int side = 0;  // -1 left, +1 right
  bool found = false;
  double s = 0.0;
  double criterion = 0.0;
  double threshold = 0.0;
  double distance = 0.0;  // to the boundary orbit at t = 0
};

std::vector<SliceRow> extract_slices(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff,
                                     const FloerBoundary& boundary, int gamma_max);

// Spectral d/dt on Nt uniform nodes of [0,1), Nyquist mode dropped.
std::vector<double> periodic_derivative_matrix(int Nt);

}  // namespace nlsfloer
