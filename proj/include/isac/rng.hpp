// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>

namespace isac {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order
// across threads.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64();
    double uniform();              // [0, 1)
    double normal();               // N(0, 1)
    int sign();                    // +-1 with equal probability
    std::complex<double> qpsk();   // unit power
    std::complex<double> complex_normal(double variance);

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace isac
