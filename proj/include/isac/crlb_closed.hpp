// SPDX-License-Identifier: Apache-2.0
//
// Closed-form delay, Doppler and angle bounds for FMCW, PMCW, OFDM and OTFS.
#pragma once

#include <cstddef>

#include "isac/fisher.hpp"
#include "isac/units.hpp"
#include "isac/waveform.hpp"

namespace isac {

struct ClosedFormRequest {
    Family family = Family::Ofdm;
    double bandwidth_hz = 0.0;
    double frame_s = 0.0;
    std::size_t k = 1;
    std::size_t l = 1;
    PulseShape pulse = PulseShape::sinc();
    double subcarrier_spacing_hz = 0.0;  // OFDM/OTFS
    double symbol_s = 0.0;               // OFDM/OTFS T_s = T + T_cp
    std::size_t n_r = 1;
    EsnrLinear gamma{1.0};
    double theta_rad = 0.0;
    bool approx_large_k = false;         // FMCW: drop the 1 - 1/K^2 factor

    void validate() const;
};

ClosedFormRequest request_for(const WaveformSpec& spec, std::size_t n_r, EsnrLinear gamma, double theta_rad);

// 3 / (2 pi^2 N_R gamma B^2 (1 - 1/K^2)), Doppler with T_F; K = 1 is unbounded.
CrlbResult crlb_fmcw(const ClosedFormRequest& req);
// Exact over approximate FMCW bound: 1 / (1 - 1/K^2).
Bound fmcw_exact_over_approx(std::size_t k);

// Sinc base bound times the pulse factor; Doppler is pulse independent.
CrlbResult crlb_pmcw(const ClosedFormRequest& req);

CrlbResult crlb_ofdm_continuous(const ClosedFormRequest& req);

// Discrete-grid bounds built from gamma_X = gamma/(KL), delta-f and T_s.
struct DiscreteOfdmResult {
    CrlbResult bounds;
    double ratio_tau = 0.0;  // C_tau / C_tau' = (L^2 - 1) / L^2
    double ratio_fd = 0.0;   // C_fD / C_fD' = (K^2 - 1) / K^2
};
DiscreteOfdmResult crlb_ofdm_discrete(const ClosedFormRequest& req);

// OTFS shares the OFDM expressions.
CrlbResult crlb_otfs(const ClosedFormRequest& req);

// 6 / (pi^2 cos^2(theta) N_R (N_R^2 - 1) gamma).
Bound crlb_aoa(std::size_t n_r, EsnrLinear gamma, double theta_rad);

// Dispatch on req.family.
CrlbResult crlb_closed(const ClosedFormRequest& req);

// Roll-off where the RC delay factor overtakes the rect factor (bisection).
double rc_rect_crossing_alpha(double tol = 1e-12);

} // namespace isac
