#pragma once

#include <vector>

namespace levyma::fft {

// Full linear convolution: out[d] = sum_j a[j] b[d-j], d = 0 .. |a|+|b|-2.
// FFT-based (real-to-complex), O(N log N); exact up to rounding.
std::vector<double> convolve_full(const std::vector<double>& a, const std::vector<double>& b);

} // namespace levyma::fft
