// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "isac/errors.hpp"
#include "isac/waveform.hpp"

namespace isac {

static_assert(std::endian::native == std::endian::little, "signal files assume a little-endian host");

namespace {

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("signal file truncated");
    return v;
}

} // namespace

void write_signal(const std::string& path, const SampledSignal& sig) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    put<double>(os, sig.fs());
    put<std::uint64_t>(os, sig.size());
    put<double>(os, sig.t0_offset());
    for (const auto& v : sig.samples()) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
    if (!os) throw ConfigError("write failed: " + path);
}

SampledSignal read_signal(const std::string& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw ConfigError("cannot open " + path);
    const auto bytes = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0);
    const auto fs = get<double>(is);
    const auto n = get<std::uint64_t>(is);
    const auto t0 = get<double>(is);
    if (!(fs > 0.0)) throw ConfigError("signal file: non-positive sample rate");
    if (bytes != 24 + 16 * n) throw ConfigError("signal file: size does not match header");
    std::vector<cplx> s(n);
    for (auto& v : s) {
        const auto re = get<double>(is);
        const auto im = get<double>(is);
        v = {re, im};
    }
    return SampledSignal(std::move(s), fs, t0);
}

} // namespace isac
