#include "nlsfloer/floer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "floer_internal.hpp"

namespace nlsfloer {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

using detail::to_field;
using detail::to_vec;
using detail::VecC;

VecC horizontal(const VecC& w, const VecC& v) { return v - w * w.dot(v); }

std::vector<VecC> row_vectors(const FloerState& st, int i) {
  std::vector<VecC> r(static_cast<size_t>(st.grid.Nt));
  for (int j = 0; j < st.grid.Nt; ++j) r[j] = to_vec(st.at(i, j));
  return r;
}

}  // namespace

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / x - 1.0 / (1.0 - x)));
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double s = smoothstep(x);
  return s * (1.0 - s) * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)));
}

CutoffProfile::CutoffProfile(double T, bool connecting) : T_(T), connecting_(connecting) {
  if (!(T >= 0.0)) throw FloerError("cutoff needs T >= 0");
  amp_ = T >= 1.0 ? 1.0 : smoothstep(T);
}

CutoffProfile CutoffProfile::family(double T) { return CutoffProfile(T, false); }
CutoffProfile CutoffProfile::connecting(double T) { return CutoffProfile(T, true); }
CutoffProfile build_cutoff(double T) { return CutoffProfile::family(T); }

double CutoffProfile::operator()(double s) const {
  if (amp_ == 0.0) return 0.0;
  double up = smoothstep(s + 1.0);
  if (connecting_) return amp_ * up;
  return amp_ * up * smoothstep(2.0 * T_ + 1.0 - s);
}

double CutoffProfile::derivative(double s) const {
  if (amp_ == 0.0) return 0.0;
  double up = smoothstep(s + 1.0), dup = smoothstep_derivative(s + 1.0);
  if (connecting_) return amp_ * dup;
  double dn = smoothstep(2.0 * T_ + 1.0 - s), ddn = smoothstep_derivative(2.0 * T_ + 1.0 - s);
  return amp_ * (dup * dn - up * ddn);
}

void CylinderGrid::validate() const {
  if (Ns < 16) throw FloerError("CylinderGrid needs Ns >= 16");
  if (Nt < 8) throw FloerError("CylinderGrid needs Nt >= 8");
  if (k < 0) throw FloerError("CylinderGrid needs k >= 0");
  if (!(S >= 1.0)) throw FloerError("window [-S, S] must contain the up-ramp [-1, 0]");
}

void FloerState::validate() const {
  grid.validate();
  if (nodes.size() != static_cast<size_t>(grid.Ns) * grid.Nt) throw FloerError("state/grid size mismatch");
  for (const auto& u : nodes)
    if (u.bandwidth() != grid.k) throw FloerError("node bandwidth differs from grid bandwidth");
}

std::vector<double> periodic_derivative_matrix(int Nt) {
  std::vector<double> D(static_cast<size_t>(Nt) * Nt, 0.0);
  const int pmax = (Nt - 1) / 2;  // drops the Nyquist mode for even Nt
  for (int j = 0; j < Nt; ++j)
    for (int l = 0; l < Nt; ++l) {
      double s = 0.0;
      for (int p = 1; p <= pmax; ++p) s -= 2.0 * p * std::sin(2.0 * kPi * p * (j - l) / Nt);
      D[static_cast<size_t>(j) * Nt + l] = 2.0 * kPi * s / Nt;
    }
  return D;
}

std::vector<SpectralField> free_orbit(const SpectralField& u, int Nt, int gauge) {
  std::vector<SpectralField> o;
  SpectralField v = u;
  v *= 1.0 / l2_norm(v);
  for (int j = 0; j < Nt; ++j) o.push_back(gauge_fixed(free_flow(v, double(j) / Nt), gauge));
  return o;
}

std::vector<SpectralField> flow_orbit(const ModelSpec& model, const SpectralField& u, int Nt, int gauge,
                                      int steps_per_unit) {
  std::vector<SpectralField> o;
  SpectralField v = u.resized(model.bandwidth());
  v *= 1.0 / l2_norm(v);
  const int seg = std::max(1, (steps_per_unit + Nt - 1) / Nt);
  for (int j = 0; j < Nt; ++j) {
    SpectralField r = v;
    r *= 1.0 / l2_norm(r);
    o.push_back(gauge_fixed(r, gauge));
    v = evolve(model, v, double(j) / Nt, double(j + 1) / Nt, seg).state;
  }
  return o;
}

FloerState constant_state(const CylinderGrid& grid, const std::vector<SpectralField>& orbit, int gauge) {
  grid.validate();
  if (orbit.size() != static_cast<size_t>(grid.Nt)) throw FloerError("orbit length differs from Nt");
  FloerState st;
  st.grid = grid;
  st.gauge = gauge;
  st.nodes.reserve(static_cast<size_t>(grid.Ns) * grid.Nt);
  for (int i = 0; i < grid.Ns; ++i)
    for (int j = 0; j < grid.Nt; ++j) st.nodes.push_back(orbit[j].resized(grid.k));
  return st;
}

namespace detail {

VecC grad_h0(const VecC& v) {
  const int k = (static_cast<int>(v.size()) - 1) / 2;
  VecC out(v.size());
  for (int n = -k; n <= k; ++n) out[n + k] = -double(n) * n * v[n + k];
  return out;
}

MidRow midpoint_row(const ModelSpec& model, const std::vector<VecC>& wl, const std::vector<VecC>& wr, double phi,
                    double h, const std::vector<double>& D, int Nt) {
  MidRow m;
  m.mhat.resize(Nt);
  m.mnorm.resize(Nt);
  m.X.resize(Nt);
  m.R.resize(Nt);
  for (int j = 0; j < Nt; ++j) {
    VecC a = 0.5 * (wl[j] + wr[j]);
    m.mnorm[j] = a.norm();
    m.mhat[j] = a / m.mnorm[j];
  }
  const bool nonlinear = phi != 0.0 && model.nonlinearity().kind != NonlinearitySpec::Kind::Constant;
  for (int j = 0; j < Nt; ++j) {
    VecC dt = VecC::Zero(m.mhat[j].size());
    for (int l = 0; l < Nt; ++l) {
      double d = D[static_cast<size_t>(j) * Nt + l];
      if (d != 0.0) dt += d * m.mhat[l];
    }
    VecC X = (wr[j] - wl[j]) / h + I * dt + grad_h0(m.mhat[j]);
    if (nonlinear) X += phi * to_vec(grad_F(model, to_field(m.mhat[j]), double(j) / Nt));
    m.R[j] = horizontal(m.mhat[j], X);
    m.X[j] = std::move(X);
  }
  return m;
}

}  // namespace detail

FloerResidual floer_residual(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff) {
  state.validate();
  if (state.grid.k != model.bandwidth()) throw FloerError("state bandwidth differs from model bandwidth");
  const auto& g = state.grid;
  const auto D = periodic_derivative_matrix(g.Nt);
  const double h = g.h();
  FloerResidual out;
  out.field.reserve(static_cast<size_t>(g.Ns - 1) * g.Nt);
  double sum = 0.0;
  auto left = row_vectors(state, 0);
  for (int i = 0; i + 1 < g.Ns; ++i) {
    auto right = row_vectors(state, i + 1);
    auto row = detail::midpoint_row(model, left, right, cutoff(g.s(i) + 0.5 * h), h, D, g.Nt);
    for (int j = 0; j < g.Nt; ++j) {
      sum += row.R[j].squaredNorm();
      out.field.push_back(to_field(row.R[j]));
    }
    left = std::move(right);
  }
  out.norm = std::sqrt(sum * h / g.Nt);
  return out;
}

FloerResidual floer_residual_untransformed(const ModelSpec& model, const FloerState& state,
                                           const CutoffProfile& cutoff) {
  state.validate();
  const auto& g = state.grid;
  const auto D = periodic_derivative_matrix(g.Nt);
  const double h = g.h();
  FloerResidual out;
  double sum = 0.0;
  for (int i = 0; i + 1 < g.Ns; ++i) {
    auto wl = row_vectors(state, i), wr = row_vectors(state, i + 1);
    const double phi = cutoff(g.s(i) + 0.5 * h);
    std::vector<VecC> mhat(g.Nt);
    for (int j = 0; j < g.Nt; ++j) mhat[j] = (0.5 * (wl[j] + wr[j])).normalized();
    for (int j = 0; j < g.Nt; ++j) {
      const double t = g.t(j);
      // u~ = phi0_{-t} w is only twisted-periodic; its t-derivative comes
      // from the periodic part by the product rule.
      VecC dt = VecC::Zero(mhat[j].size());
      for (int l = 0; l < g.Nt; ++l) dt += D[static_cast<size_t>(j) * g.Nt + l] * mhat[l];
      VecC xh0 = I * detail::grad_h0(mhat[j]);
      auto back = [t](const VecC& v) { return to_vec(free_flow(to_field(v), -t)); };
      VecC m = back(mhat[j]);
      VecC X = (back(wr[j]) - back(wl[j])) / h + I * back(dt - xh0);
      if (phi != 0.0) X += phi * to_vec(grad_G(model, to_field(m), t));
      VecC R = horizontal(m, X);
      sum += R.squaredNorm();
      out.field.push_back(to_field(R));
    }
  }
  out.norm = std::sqrt(sum * h / g.Nt);
  return out;
}

EnergyDensity energy_density(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff) {
  state.validate();
  const auto& g = state.grid;
  const auto D = periodic_derivative_matrix(g.Nt);
  const double h = g.h();
  EnergyDensity e;
  const size_t total = static_cast<size_t>(g.Ns) * g.Nt;
  e.density.assign(total, 0.0);
  e.ds.assign(total, 0.0);
  e.dt.assign(total, 0.0);
  e.slice.assign(g.Ns, 0.0);
  const bool nonlinear = model.nonlinearity().kind != NonlinearitySpec::Kind::Constant;
  for (int i = 0; i < g.Ns; ++i) {
    auto w = row_vectors(state, i);
    int ia = std::max(i - 1, 0), ib = std::min(i + 1, g.Ns - 1);
    auto wa = row_vectors(state, ia), wb = row_vectors(state, ib);
    const double phi = cutoff(g.s(i));
    double row_sum = 0.0, slice = 0.0;
    for (int j = 0; j < g.Nt; ++j) {
      VecC ds = horizontal(w[j], (wb[j] - wa[j]) / ((ib - ia) * h));
      VecC dt = VecC::Zero(w[j].size());
      for (int l = 0; l < g.Nt; ++l) dt += D[static_cast<size_t>(j) * g.Nt + l] * w[l];
      VecC grad = detail::grad_h0(w[j]);
      if (nonlinear && phi != 0.0) grad += phi * to_vec(grad_F(model, to_field(w[j]), g.t(j)));
      VecC at = horizontal(w[j], dt - I * grad);
      const size_t idx = static_cast<size_t>(i) * g.Nt + j;
      e.ds[idx] = ds.norm();
      e.dt[idx] = horizontal(w[j], dt).norm();
      e.density[idx] = 0.5 * (ds.squaredNorm() + at.squaredNorm());
      row_sum += e.density[idx];
      slice += at.squaredNorm();
    }
    e.slice[i] = slice / g.Nt;
    double wt = (i == 0 || i == g.Ns - 1) ? 0.5 : 1.0;
    e.energy += wt * h * row_sum / g.Nt;
  }
  return e;
}

double floer_energy(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff) {
  return energy_density(model, state, cutoff).energy;
}

FloerState initial_guess(const CylinderGrid& grid, const FloerBoundary& boundary, const CutoffProfile& cutoff) {
  grid.validate();
  if (boundary.left.size() != static_cast<size_t>(grid.Nt) || boundary.right.size() != static_cast<size_t>(grid.Nt))
    throw FloerError("boundary orbits must have Nt samples");
  const int gauge = gauge_index(boundary.left[0]);
  FloerState st;
  st.grid = grid;
  st.gauge = gauge;
  for (int i = 0; i < grid.Ns; ++i) {
    const double s = grid.s(i);
    const double wgt = cutoff.is_connecting() ? smoothstep(s + 1.0) : smoothstep((s + grid.S) / (2.0 * grid.S));
    for (int j = 0; j < grid.Nt; ++j) {
      // Straight line between the end orbits, renormalized.
      VecC a = to_vec(boundary.left[j].resized(grid.k));
      VecC b = to_vec(boundary.right[j].resized(grid.k));
      b *= std::polar(1.0, -std::arg(a.dot(b)));
      VecC m = (1.0 - wgt) * a + wgt * b;
      st.nodes.push_back(gauge_fixed(to_field(m.normalized()), gauge));
    }
  }
  return st;
}

std::vector<SliceRow> extract_slices(const ModelSpec& model, const FloerState& state, const CutoffProfile& cutoff,
                                     const FloerBoundary& boundary, int gamma_max) {
  auto e = energy_density(model, state, cutoff);
  const auto& g = state.grid;
  std::vector<SliceRow> rows;
  for (int gamma = 1; gamma <= gamma_max; ++gamma) {
    for (int side : {-1, 1}) {
      SliceRow r;
      r.gamma = gamma;
      r.side = side;
      r.threshold = kPi / gamma;
      double best = 1e300;
      int best_i = -1;
      for (int i = 0; i < g.Ns; ++i) {
        double a = side * g.s(i);
        if (a < gamma - 1e-12 || a > 2.0 * gamma + 1e-12) continue;
        if (e.slice[i] < best) {
          best = e.slice[i];
          best_i = i;
        }
      }
      if (best_i >= 0) {
        r.s = g.s(best_i);
        r.criterion = best;
        r.found = best < r.threshold;
        const auto& ref = side < 0 ? boundary.left[0] : boundary.right[0];
        r.distance = fs_distance(state.at(best_i, 0), ref);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace nlsfloer
