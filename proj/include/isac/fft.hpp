// SPDX-License-Identifier: Apache-2.0
//
// Thin FFTW wrapper. Planning is serialized internally (FFTW planners are not
// re-entrant); execution runs concurrently.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace isac::fft {

// X[m] = sum_n x[n] exp(-j 2 pi m n / N), unnormalized.
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x);

// x[n] = (1/N) sum_m X[m] exp(j 2 pi m n / N).
std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> spectrum);

// Frequency of bin m in FFT order: m for m < (N+1)/2, else m - N, times fs/N.
double bin_frequency(std::size_t m, std::size_t n, double fs);

// Smallest odd 3-5-7-smooth length >= n. Odd lengths give a bin grid symmetric about 0 Hz
// with no unpaired Nyquist bin.
std::size_t odd_length(std::size_t n);

} // namespace isac::fft
