// SPDX-License-Identifier: Apache-2.0
#include "isac/rng.hpp"

#include <cmath>
#include <numbers>

namespace isac {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_ + 0x632be59bd9b4e019ULL));
    return splitmix64(key + splitmix64(counter_++));
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
    // Box-Muller, one output per pair
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int CounterRng::sign() { return (next_u64() >> 63) ? 1 : -1; }

std::complex<double> CounterRng::qpsk() {
    const std::uint64_t b = next_u64() >> 62;
    const double h = std::numbers::sqrt2 / 2.0;
    return {(b & 1u) ? h : -h, (b & 2u) ? h : -h};
}

std::complex<double> CounterRng::complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

} // namespace isac
