#pragma once

#include <utility>
#include <vector>

#include "nlsfloer/dynamics.hpp"
#include "nlsfloer/floer.hpp"
#include "nlsfloer/spectral.hpp"

namespace nlsfloer {

struct DecayProfile {
  int alpha = 0;
  std::vector<int> ell_values;
  std::vector<double> deltas;
  std::vector<double> norms;
  // weighted[i][d] = norms[i] * ell_values[i]^deltas[d]
  std::vector<std::vector<double>> weighted;
};

// Tail norms (sum_{|n|>ell} |u^(n)|^2 (1+n^2)^alpha)^{1/2}.
DecayProfile normal_profile(const SpectralField& u, const std::vector<int>& ells, int alpha,
                            const std::vector<double>& deltas = {1.0, 2.0, 3.0});
// Sup over nodes, after alpha spectral t-derivatives along each s-slice.
DecayProfile normal_profile(const FloerState& state, const std::vector<int>& ells, int alpha,
                            const std::vector<double>& deltas = {1.0, 2.0, 3.0});

// True if weighted[.][d] is strictly decreasing over the entries whose norm
// exceeds `floor`; entries at or below the floor are ignored.
bool weighted_decreasing(const DecayProfile& p, size_t d, double floor = 1e-13);

struct GradientMonitor {
  double sup_ds = 0.0;
  double sup_dt = 0.0;
  double energy = 0.0;
  std::vector<double> density;  // per node, index i * Nt + j
};

GradientMonitor gradient_monitor(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff);

struct DistinctnessReport {
  double threshold = 1e-3;
  std::vector<std::vector<double>> distance;
  std::vector<std::pair<int, int>> flagged;
};

DistinctnessReport distinctness_report(const std::vector<ProjectivePoint>& points, double threshold = 1e-3);

}  // namespace nlsfloer
