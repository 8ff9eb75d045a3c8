#pragma once

#include <complex>

namespace nlsfloer::detail {

// Unnormalized in-place DFT of length n.
//   forward: X_p = sum_j x_j e^{-2 pi i jp/n}
//   backward: x_j = sum_p X_p e^{+2 pi i jp/n}
void dft_forward(std::complex<double>* data, int n);
void dft_backward(std::complex<double>* data, int n);

}  // namespace nlsfloer::detail
