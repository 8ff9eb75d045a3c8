#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nlsfloer/model.hpp"

namespace nlsfloer {

namespace {

void normalize(SpectralField& u) { u *= 1.0 / l2_norm(u); }

// Projected gradient ascent of sign*F_t on the unit sphere with a backtracking step.
double climb(const ModelSpec& model, double t, double sign, SpectralField u, const HoferOptions& opts,
             bool& converged) {
  normalize(u);
  double val = sign * eval_F(model, u, t);
  double step = 1.0;
  converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    SpectralField g = grad_F(model, u, t);
    g *= sign;
    g -= real_inner(u, g) * u;
    double gn = l2_norm(g);
    if (gn < opts.tol) {
      converged = true;
      break;
    }
    bool moved = false;
    while (step > 1e-14) {
      SpectralField trial = u + step * g;
      normalize(trial);
      double tv = sign * eval_F(model, trial, t);
      if (tv >= val + 1e-4 * step * gn * gn) {
        u = std::move(trial);
        val = tv;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      // No representable ascent left: stationary to working precision.
      converged = gn < 1e-6;
      break;
    }
  }
  return sign * val;
}

}  // namespace

HoferReport hofer_norm(const ModelSpec& model, const HoferOptions& opts) {
  if (model.bandwidth() < 1) throw ModelError("hofer_norm needs bandwidth >= 1");
  if (opts.t_nodes < 1 || opts.starts < 1) throw ModelError("hofer_norm needs t_nodes, starts >= 1");
  HoferReport rep;
  const double w_max = std::pow(model.kernel().l2(), 2);
  rep.certified_sup_f = model.nonlinearity().sup_bound(w_max);
  rep.sufficient_gate = rep.certified_sup_f < 0.125;

  const int K = model.bandwidth();
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  std::vector<SpectralField> starts;
  for (int s = 0; s < opts.starts; ++s) {
    SpectralField u(K);
    for (auto& z : u.coeffs()) z = {gauss(rng), gauss(rng)};
    starts.push_back(u);
  }

  double sum = 0.0;
  for (int j = 0; j < opts.t_nodes; ++j) {
    double t = double(j) / opts.t_nodes;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& u0 : starts) {
      bool c1 = false, c2 = false;
      hi = std::max(hi, climb(model, t, 1.0, u0, opts, c1));
      lo = std::min(lo, climb(model, t, -1.0, u0, opts, c2));
      rep.converged = rep.converged && c1 && c2;
    }
    rep.t.push_back(t);
    rep.max_f.push_back(hi);
    rep.min_f.push_back(lo);
    sum += hi - lo;
  }
  // Periodic trapezoid rule on uniform nodes.
  rep.estimate = sum / opts.t_nodes;
  return rep;
}

}  // namespace nlsfloer
