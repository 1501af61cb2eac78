// SPDX-License-Identifier: Apache-2.0
#include "isac/fft.hpp"

#include <cstring>
#include <mutex>

#include <fftw3.h>

namespace isac::fft {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> run(std::span<const std::complex<double>> in, int sign) {
    const std::size_t n = in.size();
    std::vector<std::complex<double>> out(n);
    if (n == 0) return out;
    auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE);
    }
    std::memcpy(buf, in.data(), sizeof(fftw_complex) * n);
    fftw_execute(plan);
    std::memcpy(out.data(), buf, sizeof(fftw_complex) * n);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

} // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
    return run(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> spectrum) {
    auto out = run(spectrum, FFTW_BACKWARD);
    const double s = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= s;
    return out;
}

double bin_frequency(std::size_t m, std::size_t n, double fs) {
    const auto half = (n + 1) / 2;
    const double idx = m < half ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
    return idx * fs / static_cast<double>(n);
}

std::size_t odd_length(std::size_t n) {
    // smallest odd 3-5-7-smooth length >= n
    for (std::size_t m = n | 1u;; m += 2) {
        std::size_t r = m;
        for (std::size_t p : {3u, 5u, 7u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

} // namespace isac::fft
