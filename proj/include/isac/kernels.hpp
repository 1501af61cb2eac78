// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops. Every kernel has a plain serial reference used by
// the tests and the benchmark; the OpenMP variants split work into fixed
// blocks and reduce block partials in order, so their results do not depend
// on the thread count.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "isac/waveform.hpp"

namespace isac::kernels {

inline constexpr std::size_t kBlock = 4096;

// G(i, j) += sum_n conj(v_i[n]) v_j[n]. All vectors share one length.
void gram_serial(std::span<const std::span<const cplx>> vectors, Eigen::MatrixXcd& acc);
void gram_parallel(std::span<const std::span<const cplx>> vectors, Eigen::MatrixXcd& acc);

// sum_n (t0 + n dt)^power |s[n]|^2
double time_moment_serial(std::span<const cplx> s, double t0, double dt, int power);
double time_moment_parallel(std::span<const cplx> s, double t0, double dt, int power);

// Chip train: out[n] = sum_c amplitude[c] g((n - first_center) / samples_per_chip - c),
// restricted to |argument| <= half_span (0.5 for rect).
struct ChipTrain {
    std::span<const double> amplitude;
    double samples_per_chip = 1.0;
    double first_center = 0.0;   // fractional sample index of chip 0's center
    double half_span = 0.5;
};
void chip_train_serial(const ChipTrain& train, const PulseShape& pulse, std::span<cplx> out);
void chip_train_parallel(const ChipTrain& train, const PulseShape& pulse, std::span<cplx> out);

// Cyclic-prefixed multicarrier frame. Sample n (n >= first_sample) lies at
// frame time t = (n - first_sample + 0.5)/fs; within symbol k the value is
// exp(-j 2 pi f0 t) sum_l X(l,k) exp(j 2 pi l df u), u the time since the
// useful part started, wrapped by one useful period inside the cyclic prefix.
// Centering on frame time keeps each symbol continuous across its prefix.
struct MulticarrierFrame {
    const Eigen::MatrixXcd* grid = nullptr;  // L x K
    double df = 0.0;
    double f0 = 0.0;
    double useful_s = 0.0;
    double cp_s = 0.0;
    double fs = 1.0;
    std::size_t first_sample = 0;
    std::size_t frame_samples = 0;
};
void multicarrier_serial(const MulticarrierFrame& frame, std::span<cplx> out);
void multicarrier_parallel(const MulticarrierFrame& frame, std::span<cplx> out);

} // namespace isac::kernels
