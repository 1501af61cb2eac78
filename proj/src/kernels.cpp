// SPDX-License-Identifier: Apache-2.0
#include "isac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <omp.h>

namespace isac::kernels {

namespace {

std::size_t block_count(std::size_t n) { return (n + kBlock - 1) / kBlock; }

void gram_range(std::span<const std::span<const cplx>> v, std::size_t lo, std::size_t hi, Eigen::MatrixXcd& acc) {
    const auto m = static_cast<Eigen::Index>(v.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            const cplx* a = v[i].data();
            const cplx* b = v[j].data();
            cplx s{};
            for (std::size_t n = lo; n < hi; ++n) s += std::conj(a[n]) * b[n];
            acc(i, j) += s;
        }
    }
}

void symmetrize_upper(Eigen::MatrixXcd& g) {
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) g(i, j) = std::conj(g(j, i));
}

double moment_range(std::span<const cplx> s, double t0, double dt, int power, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t n = lo; n < hi; ++n) {
        const double t = t0 + static_cast<double>(n) * dt;
        double w = 1.0;
        for (int p = 0; p < power; ++p) w *= t;
        acc += w * std::norm(s[n]);
    }
    return acc;
}

cplx chip_sample(const ChipTrain& tr, const PulseShape& g, std::size_t n) {
    const double x = (static_cast<double>(n) - tr.first_center) / tr.samples_per_chip;
    const auto count = static_cast<std::ptrdiff_t>(tr.amplitude.size());
    auto c_lo = static_cast<std::ptrdiff_t>(std::ceil(x - tr.half_span));
    auto c_hi = static_cast<std::ptrdiff_t>(std::floor(x + tr.half_span));
    c_lo = std::max<std::ptrdiff_t>(c_lo, 0);
    c_hi = std::min<std::ptrdiff_t>(c_hi, count - 1);
    double acc = 0.0;
    for (auto c = c_lo; c <= c_hi; ++c) acc += tr.amplitude[static_cast<std::size_t>(c)] * g.value(x - static_cast<double>(c));
    return {acc, 0.0};
}

cplx multicarrier_sample(const MulticarrierFrame& f, std::size_t n) {
    if (n < f.first_sample) return {};
    const std::size_t rel = n - f.first_sample;
    if (rel >= f.frame_samples) return {};
    const double ts = f.useful_s + f.cp_s;
    const double tf = (static_cast<double>(rel) + 0.5) / f.fs;
    const auto k = static_cast<Eigen::Index>(std::floor(tf / ts));
    const Eigen::MatrixXcd& x = *f.grid;
    if (k >= x.cols()) return {};
    double u = tf - static_cast<double>(k) * ts - f.cp_s;
    if (u < 0.0) u += f.useful_s;
    const double w = 2.0 * std::numbers::pi * u;
    const cplx z = std::polar(1.0, w * f.df);
    cplx acc{};
    for (Eigen::Index l = x.rows() - 1; l >= 0; --l) acc = acc * z + x(l, k);
    return acc * std::polar(1.0, -2.0 * std::numbers::pi * f.f0 * tf);
}

} // namespace

void gram_serial(std::span<const std::span<const cplx>> vectors, Eigen::MatrixXcd& acc) {
    if (vectors.empty()) return;
    Eigen::MatrixXcd part = Eigen::MatrixXcd::Zero(acc.rows(), acc.cols());
    gram_range(vectors, 0, vectors[0].size(), part);
    symmetrize_upper(part);
    acc += part;
}

void gram_parallel(std::span<const std::span<const cplx>> vectors, Eigen::MatrixXcd& acc) {
    if (vectors.empty()) return;
    const std::size_t n = vectors[0].size();
    const std::size_t nb = block_count(n);
    std::vector<Eigen::MatrixXcd> parts(nb, Eigen::MatrixXcd::Zero(acc.rows(), acc.cols()));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        gram_range(vectors, lo, std::min(n, lo + kBlock), parts[static_cast<std::size_t>(b)]);
    }
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(acc.rows(), acc.cols());
    for (const auto& p : parts) total += p;
    symmetrize_upper(total);
    acc += total;
}

double time_moment_serial(std::span<const cplx> s, double t0, double dt, int power) {
    return moment_range(s, t0, dt, power, 0, s.size());
}

double time_moment_parallel(std::span<const cplx> s, double t0, double dt, int power) {
    const std::size_t nb = block_count(s.size());
    std::vector<double> parts(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        parts[static_cast<std::size_t>(b)] = moment_range(s, t0, dt, power, lo, std::min(s.size(), lo + kBlock));
    }
    double acc = 0.0;
    for (double p : parts) acc += p;
    return acc;
}

void chip_train_serial(const ChipTrain& train, const PulseShape& pulse, std::span<cplx> out) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = chip_sample(train, pulse, n);
}

void chip_train_parallel(const ChipTrain& train, const PulseShape& pulse, std::span<cplx> out) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(out.size()); ++n)
        out[static_cast<std::size_t>(n)] = chip_sample(train, pulse, static_cast<std::size_t>(n));
}

void multicarrier_serial(const MulticarrierFrame& frame, std::span<cplx> out) {
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = multicarrier_sample(frame, n);
}

void multicarrier_parallel(const MulticarrierFrame& frame, std::span<cplx> out) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(out.size()); ++n)
        out[static_cast<std::size_t>(n)] = multicarrier_sample(frame, static_cast<std::size_t>(n));
}

} // namespace isac::kernels
