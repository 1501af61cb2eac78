// SPDX-License-Identifier: Apache-2.0
//
// Serial vs OpenMP timing of the inner kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "isac/kernels.hpp"
#include "isac/rng.hpp"

using namespace isac;

template <class F>
double best_ms(F&& f, int reps = 5) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

int main() {
    const std::size_t n = 1 << 20;
    CounterRng rng(7);
    std::vector<std::vector<cplx>> v(5, std::vector<cplx>(n));
    for (auto& x : v)
        for (auto& s : x) s = rng.complex_normal(1.0);
    std::vector<std::span<const cplx>> spans(v.begin(), v.end());

    std::printf("threads %d, n = %zu\n", omp_get_max_threads(), n);
    std::printf("%-16s %10s %10s %8s\n", "kernel", "serial ms", "omp ms", "speedup");

    Eigen::MatrixXcd g(5, 5);
    const double gs = best_ms([&] { g.setZero(); kernels::gram_serial(spans, g); });
    const double gp = best_ms([&] { g.setZero(); kernels::gram_parallel(spans, g); });
    std::printf("%-16s %10.2f %10.2f %8.2f\n", "gram", gs, gp, gs / gp);

    volatile double sink = 0.0;
    const double ms = best_ms([&] { sink = kernels::time_moment_serial(v[0], -0.5, 1e-6, 2); });
    const double mp = best_ms([&] { sink = kernels::time_moment_parallel(v[0], -0.5, 1e-6, 2); });
    std::printf("%-16s %10.2f %10.2f %8.2f\n", "time_moment", ms, mp, ms / mp);

    std::vector<double> amp(4096);
    for (auto& a : amp) a = rng.sign();
    std::vector<cplx> out(static_cast<std::size_t>(amp.size() * 8 + 600));
    kernels::ChipTrain tr{amp, 8.0, 300.0, 32.0};
    const PulseShape rrc = PulseShape::rrc(0.5);
    const double cs = best_ms([&] { kernels::chip_train_serial(tr, rrc, out); }, 3);
    const double cp = best_ms([&] { kernels::chip_train_parallel(tr, rrc, out); }, 3);
    std::printf("%-16s %10.2f %10.2f %8.2f\n", "chip_train", cs, cp, cs / cp);

    Eigen::MatrixXcd grid(256, 64);
    for (Eigen::Index i = 0; i < grid.size(); ++i) grid(i) = rng.qpsk();
    std::vector<cplx> frame(256 * 4 * 72);
    kernels::MulticarrierFrame mf{&grid, 1.0, 127.5, 1.0, 0.125, 1024.0, 0, frame.size()};
    const double os = best_ms([&] { kernels::multicarrier_serial(mf, frame); }, 3);
    const double op = best_ms([&] { kernels::multicarrier_parallel(mf, frame); }, 3);
    std::printf("%-16s %10.2f %10.2f %8.2f\n", "multicarrier", os, op, os / op);
    (void)sink;
    return 0;
}
