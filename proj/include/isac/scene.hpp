// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "isac/rng.hpp"
#include "isac/units.hpp"
#include "isac/waveform.hpp"

namespace isac {

// Uniform linear arrays; spacings are in wavelengths.
struct ArrayConfig {
    std::size_t n_t = 1;
    std::size_t n_r = 1;
    double d_t = 0.5;
    double d_r = 0.5;
    double lambda_m = kSpeedOfLight / 28e9;

    void validate() const;
};

// True signal-level parameters (A, phi, tau, f_D, theta_R), the per-element
// noise power and the array. A includes the transmit beamforming gain N_T a.
struct SceneParams {
    double amplitude = 1.0;
    double phase_rad = 0.0;
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    double theta_rad = 0.0;
    double sigma2 = 1.0;
    ArrayConfig array;

    void validate() const;
};

// Receive element positions (wavelengths) of the physical Rx ULA.
std::vector<double> rx_positions(const ArrayConfig& array);

// Sets sigma2 so that A^2 E_s / sigma2 = gamma.
SceneParams with_esnr(SceneParams scene, double signal_energy, double gamma);

// Noiseless per-element branches
// mu_n(t) = A e^{j phi} conj(a_n(theta)) s(t - tau) e^{j 2 pi f_D (t + T0)}.
std::vector<SampledSignal> apply_scene(const SampledSignal& sig, const SceneParams& scene);

// Adds CN(0, sigma2) noise to every branch.
void add_noise(std::vector<SampledSignal>& branches, double sigma2, CounterRng& rng);

} // namespace isac
