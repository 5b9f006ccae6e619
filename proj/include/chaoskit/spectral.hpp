#pragma once

#include <complex>
#include <vector>

namespace chaoskit {

/// Unnormalized forward DFT in place: X_k = sum_j x_j exp(-2*pi*i*j*k/n).
/// Radix-2 Cooley-Tukey when n is a power of two, direct evaluation otherwise.
void dft(std::vector<std::complex<double>>& x, bool inverse);

/// d-dimensional transform of a row-major M^d array, applied axis by axis.
/// The inverse includes the 1/M^d normalization.
void dft_nd(std::vector<std::complex<double>>& x, int dim, int m, bool inverse);

/// Signed integer frequency of a DFT index (k <= M/2 maps to k, else k - M).
inline int signed_freq(int k, int m) { return 2 * k <= m ? k : k - m; }

}  // namespace chaoskit
