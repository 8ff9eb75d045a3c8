#include "nlsfloer/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsfloer {

namespace {

double tail(const SpectralField& u, int ell, int alpha) {
  double s = 0.0;
  for (int n = -u.bandwidth(); n <= u.bandwidth(); ++n) {
    if (std::abs(n) <= ell) continue;
    s += std::norm(u[n]) * std::pow(1.0 + double(n) * n, alpha);
  }
  return std::sqrt(s);
}

void check(const std::vector<int>& ells, int alpha, int k) {
  if (alpha < 0 || alpha > 2) throw std::invalid_argument("deriv order must be 0, 1 or 2");
  for (size_t i = 0; i < ells.size(); ++i) {
    if (ells[i] < 0 || ells[i] > k) throw std::invalid_argument("ell outside the bandwidth");
    if (i > 0 && ells[i] <= ells[i - 1]) throw std::invalid_argument("ell values must increase");
  }
}

void fill_weighted(DecayProfile& p) {
  p.weighted.assign(p.norms.size(), std::vector<double>(p.deltas.size()));
  for (size_t i = 0; i < p.norms.size(); ++i)
    for (size_t d = 0; d < p.deltas.size(); ++d)
      p.weighted[i][d] = p.norms[i] * std::pow(double(p.ell_values[i]), p.deltas[d]);
}

}  // namespace

DecayProfile normal_profile(const SpectralField& u, const std::vector<int>& ells, int alpha,
                            const std::vector<double>& deltas) {
  check(ells, alpha, u.bandwidth());
  DecayProfile p;
  p.alpha = alpha;
  p.ell_values = ells;
  p.deltas = deltas;
  for (int ell : ells) p.norms.push_back(tail(u, ell, alpha));
  fill_weighted(p);
  return p;
}

DecayProfile normal_profile(const FloerState& state, const std::vector<int>& ells, int alpha,
                            const std::vector<double>& deltas) {
  state.validate();
  const auto& g = state.grid;
  check(ells, alpha, g.k);
  const auto D = periodic_derivative_matrix(g.Nt);
  DecayProfile p;
  p.alpha = alpha;
  p.ell_values = ells;
  p.deltas = deltas;
  p.norms.assign(ells.size(), 0.0);
  for (int i = 0; i < g.Ns; ++i) {
    std::vector<SpectralField> row(g.Nt);
    for (int j = 0; j < g.Nt; ++j) row[j] = state.at(i, j);
    for (int a = 0; a < alpha; ++a) {
      std::vector<SpectralField> next(g.Nt, SpectralField(g.k));
      for (int j = 0; j < g.Nt; ++j)
        for (int l = 0; l < g.Nt; ++l) {
          const double d = D[static_cast<size_t>(j) * g.Nt + l];
          if (d != 0.0) next[j] += d * row[l];
        }
      row.swap(next);
    }
    for (const auto& u : row)
      for (size_t e = 0; e < ells.size(); ++e) p.norms[e] = std::max(p.norms[e], tail(u, ells[e], alpha));
  }
  fill_weighted(p);
  return p;
}

bool weighted_decreasing(const DecayProfile& p, size_t d, double floor) {
  double prev = INFINITY;
  for (size_t i = 0; i < p.norms.size(); ++i) {
    if (p.norms[i] <= floor) continue;
    if (!(p.weighted[i][d] < prev)) return false;
    prev = p.weighted[i][d];
  }
  return true;
}

GradientMonitor gradient_monitor(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff) {
  auto e = energy_density(model, state, cutoff);
  GradientMonitor m;
  m.sup_ds = e.ds.empty() ? 0.0 : *std::max_element(e.ds.begin(), e.ds.end());
  m.sup_dt = e.dt.empty() ? 0.0 : *std::max_element(e.dt.begin(), e.dt.end());
  m.energy = e.energy;
  m.density = std::move(e.density);
  return m;
}

DistinctnessReport distinctness_report(const std::vector<ProjectivePoint>& points, double threshold) {
  if (points.size() < 2) throw std::invalid_argument("distinctness_report needs at least 2 points");
  DistinctnessReport r;
  r.threshold = threshold;
  const size_t n = points.size();
  r.distance.assign(n, std::vector<double>(n, 0.0));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a + 1; b < n; ++b) {
      double d = fs_distance(points[a], points[b]);
      r.distance[a][b] = r.distance[b][a] = d;
      if (d < threshold) r.flagged.emplace_back(int(a), int(b));
    }
  return r;
}

}  // namespace nlsfloer
