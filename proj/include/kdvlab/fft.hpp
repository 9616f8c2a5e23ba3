#pragma once

#include <complex>
#include <vector>

namespace kdvlab::fft {

// Unnormalized DFTs, FFTW sign convention:
//   forward:  out[k] = sum_m in[m] exp(-2*pi*i*k*m/n)
//   backward: out[m] = sum_k in[k] exp(+2*pi*i*k*m/n)
// Plans are cached per size; execution is thread safe.
std::vector<std::complex<double>> forward(
    const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> backward(
    const std::vector<std::complex<double>>& in);

}  // namespace kdvlab::fft
