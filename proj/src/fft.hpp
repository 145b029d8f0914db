#pragma once

// Thin FFTW wrapper. Plans are created once per size under a lock and then
// executed through the new-array interface, which is thread-safe.

#include <complex>
#include <span>
#include <vector>

namespace neuroloop::fft {

/// n/2 + 1 bins, unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// Inverse of rfft for a real signal of length n, normalized by 1/n.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

}  // namespace neuroloop::fft
