#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nlsfloer/floer.hpp"

namespace nlsfloer::detail {

using VecC = Eigen::VectorXcd;

inline VecC to_vec(const SpectralField& u) {
  VecC v(u.size());
  for (int i = 0; i < u.size(); ++i) v[i] = u.coeffs()[i];
  return v;
}

inline SpectralField to_field(const VecC& v) {
  const int k = (static_cast<int>(v.size()) - 1) / 2;
  SpectralField u(k);
  for (int i = 0; i < v.size(); ++i) u.coeffs()[i] = v[i];
  return u;
}

// Box-scheme quantities on one row of cell midpoints (s_i + h/2, t_j).
struct MidRow {
  std::vector<VecC> mhat;
  std::vector<double> mnorm;
  std::vector<VecC> X;  // raw operator before projection
  std::vector<VecC> R;  // horizontal residual
};

// X_j = (wr_j - wl_j)/h + i (D mhat)_j + grad H0(mhat_j) + phi grad F_tj(mhat_j).
MidRow midpoint_row(const ModelSpec& model, const std::vector<VecC>& wl, const std::vector<VecC>& wr, double phi,
                    double h, const std::vector<double>& D, int Nt);

// -n^2 per coefficient.
VecC grad_h0(const VecC& v);

}  // namespace nlsfloer::detail
