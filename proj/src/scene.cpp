// SPDX-License-Identifier: Apache-2.0
#include "isac/scene.hpp"

#include <cmath>
#include <numbers>

#include "isac/errors.hpp"
#include "isac/spectral.hpp"

namespace isac {

void ArrayConfig::validate() const {
    if (n_t < 1 || n_r < 1) throw ConfigError("array needs at least one Tx and one Rx element");
    if (!(d_t > 0.0) || !(d_r > 0.0)) throw ConfigError("element spacing must be positive");
    if (!(lambda_m > 0.0)) throw ConfigError("wavelength must be positive");
}

void SceneParams::validate() const {
    if (!(sigma2 > 0.0)) throw ConfigError("noise power must be positive");
    if (!(std::abs(theta_rad) < std::numbers::pi / 2)) throw ConfigError("|theta_R| must be below pi/2");
    if (!std::isfinite(amplitude) || !std::isfinite(delay_s) || !std::isfinite(doppler_hz) || !std::isfinite(phase_rad))
        throw ConfigError("scene parameters must be finite");
    array.validate();
}

std::vector<double> rx_positions(const ArrayConfig& array) {
    std::vector<double> p(array.n_r);
    for (std::size_t n = 0; n < array.n_r; ++n) p[n] = static_cast<double>(n) * array.d_r;
    return p;
}

SceneParams with_esnr(SceneParams scene, double signal_energy, double gamma) {
    if (!(gamma > 0.0) || !(signal_energy > 0.0)) throw ConfigError("ESNR and signal energy must be positive");
    scene.sigma2 = scene.amplitude * scene.amplitude * signal_energy / gamma;
    return scene;
}

std::vector<SampledSignal> apply_scene(const SampledSignal& sig, const SceneParams& scene) {
    scene.validate();
    if (std::abs(scene.delay_s) > sig.guard())
        throw TruncationError("delay exceeds the guard interval of the signal");

    std::vector<cplx> base(sig.samples().begin(), sig.samples().end());
    if (scene.delay_s != 0.0) base = delayed_with_derivative(sig, scene.delay_s).value;
    if (scene.doppler_hz != 0.0) {
        const double w = 2.0 * std::numbers::pi * scene.doppler_hz;
        for (std::size_t n = 0; n < base.size(); ++n) base[n] *= std::polar(1.0, w * (sig.time(n) + sig.centroid()));
    }

    const auto pos = rx_positions(scene.array);
    std::vector<SampledSignal> out;
    out.reserve(pos.size());
    for (double p : pos) {
        const double phase = scene.phase_rad - 2.0 * std::numbers::pi * p * std::sin(scene.theta_rad);
        if (scene.amplitude == 1.0 && phase == 0.0) {
            out.push_back(sig.with_samples(base));
            continue;
        }
        const cplx g = std::polar(scene.amplitude, phase);
        std::vector<cplx> b(base.size());
        for (std::size_t n = 0; n < b.size(); ++n) b[n] = g * base[n];
        out.push_back(sig.with_samples(std::move(b)));
    }
    return out;
}

void add_noise(std::vector<SampledSignal>& branches, double sigma2, CounterRng& rng) {
    for (auto& br : branches) {
        std::vector<cplx> s(br.samples().begin(), br.samples().end());
        for (auto& v : s) v += rng.complex_normal(sigma2);
        br = br.with_samples(std::move(s));
    }
}

} // namespace isac
