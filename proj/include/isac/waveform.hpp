// SPDX-License-Identifier: Apache-2.0
//
// Sampled complex-baseband realizations of FMCW, PMCW, OFDM and OTFS frames.
//
// All signals are stored on an energy-centroid time axis: sample n sits at
// t_n = t0_offset + n / fs and sum_n t_n |s[n]|^2 = 0. The pre-shift centroid
// (measured from the start of the frame) is kept as centroid(); it is the T0
// that appears in the Doppler phase reference exp(j 2 pi f_D (t + T0)).
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace isac {

using cplx = std::complex<double>;

class PulseShape {
public:
    enum class Kind { Rect, Sinc, Rrc, Rc };

    static PulseShape rect() { return PulseShape(Kind::Rect, 0.0); }
    static PulseShape sinc() { return PulseShape(Kind::Sinc, 0.0); }
    static PulseShape rrc(double alpha);
    static PulseShape rc(double alpha);

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::string name() const;

    // Occupied bandwidth for a given chip period: 2/Tc (rect main lobe),
    // 1/Tc (sinc), (1+alpha)/Tc (RRC, RC).
    double bandwidth(double chip_period) const;
    double chip_period_for_bandwidth(double bandwidth) const;

    // Pulse amplitude at x = t / Tc, scaled so every shape carries energy Tc
    // (unit average power for a chip train).
    double value(double x) const;

    // True for shapes with infinite time support (truncated during synthesis).
    bool unbounded_support() const { return kind_ != Kind::Rect; }

private:
    PulseShape(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {}
    Kind kind_;
    double alpha_;
};

struct FmcwSpec {
    double bandwidth_hz = 0.0;
    double pri_s = 0.0;
    std::vector<cplx> data;   // one unit-modulus symbol per chirp; size is K
};

struct PmcwSpec {
    PulseShape pulse = PulseShape::rect();
    double chip_period_s = 0.0;
    std::vector<double> code;  // L chips, +-1
    std::vector<double> data;  // K symbols, +-1
};

struct OfdmSpec {
    double subcarrier_spacing_hz = 0.0;
    std::size_t cp_length = 0;   // L_cp, in units of the L-point symbol grid
    Eigen::MatrixXcd symbols;    // X(l, k): L subcarriers x K symbols
};

struct OtfsSpec {
    double subcarrier_spacing_hz = 0.0;
    std::size_t cp_length = 0;
    Eigen::MatrixXcd dd_symbols; // x(mu, nu): L delay bins x K Doppler bins
};

enum class Family { Fmcw, Pmcw, Ofdm, Otfs };
std::string to_string(Family f);

struct WaveformSpec {
    std::variant<FmcwSpec, PmcwSpec, OfdmSpec, OtfsSpec> body;

    Family family() const;
    void validate() const;
};

// Frame geometry shared by all families.
struct FrameGeometry {
    double bandwidth_hz = 0.0;
    double pri_s = 0.0;    // T (chirp, code period, or OFDM symbol incl. CP)
    double frame_s = 0.0;  // T_F = K * T
    std::size_t k = 0;     // PRIs / symbols
    std::size_t l = 0;     // chips / subcarriers (1 for FMCW)
};
FrameGeometry geometry(const WaveformSpec& spec);

struct SynthesisOptions {
    // Largest |tau| the signal must tolerate without wrapping.
    double max_delay_s = 0.0;
    // Infinite-support pulses are truncated to +- this many chip periods.
    double pulse_half_span_chips = 32.0;
    // Brick-wall filter to +-B/2 after synthesis (rect main-lobe convention).
    bool filter_sidelobes = false;
    // Use this frame centroid instead of measuring it. Multiplexed branches
    // share the time axis of the signal they are carved from.
    std::optional<double> centroid_reference;
    // Per-PRI real gains (size K); empty means all ones.
    std::vector<double> pri_gain;
    // Per-subcarrier gains for OFDM/OTFS (size L); empty means all ones.
    std::vector<double> subcarrier_gain;
};

class SampledSignal {
public:
    SampledSignal() = default;
    SampledSignal(std::vector<cplx> samples, double fs, double t0_offset,
                  double centroid = 0.0, double guard_s = 0.0);

    // Builds a signal from raw samples whose first sample sits at t_first on
    // an arbitrary axis; the energy centroid is measured and moved to zero.
    static SampledSignal centered(std::vector<cplx> samples, double fs, double t_first = 0.0,
                                  double guard_s = 0.0);

    std::span<const cplx> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double fs() const { return fs_; }
    double dt() const { return 1.0 / fs_; }
    double t0_offset() const { return t0_offset_; }
    double time(std::size_t n) const { return t0_offset_ + static_cast<double>(n) / fs_; }
    double energy() const { return energy_; }
    double centroid() const { return centroid_; }
    double guard() const { return guard_; }

    // Same axis and metadata, new samples.
    SampledSignal with_samples(std::vector<cplx> samples) const;

private:
    std::vector<cplx> samples_;
    double fs_ = 1.0;
    double t0_offset_ = 0.0;
    double centroid_ = 0.0;
    double guard_ = 0.0;
    double energy_ = 0.0;
};

// Guard interval used on each side of a frame: max(2 tau_max, 8/B).
double default_guard(double bandwidth_hz, double max_delay_s);

// fs = oversample * B.
double default_sample_rate(const WaveformSpec& spec, double oversample = 4.0);

SampledSignal synthesize(const WaveformSpec& spec, double fs, const SynthesisOptions& opts = {});

// ISFFT: X(l,k) = 1/sqrt(KL) sum_nu sum_mu x(mu,nu) exp(j 2 pi (k nu/K - l mu/L)).
Eigen::MatrixXcd otfs_to_tf(const Eigen::MatrixXcd& dd_symbols);

// OTFS is an OFDM frame carrying the ISFFT of its delay-Doppler grid.
OfdmSpec as_ofdm(const OtfsSpec& otfs);

// +-1 m-sequence from a Fibonacci LFSR. taps are 1-based register positions,
// e.g. {3, 2} for x^3 + x^2 + 1 (length 7).
std::vector<double> lfsr_msequence(unsigned degree, std::span<const unsigned> taps);

// Binary signal file: little-endian {fs: f64, n: u64, t0_offset: f64}
// followed by n interleaved (re, im) f64 pairs.
void write_signal(const std::string& path, const SampledSignal& sig);
SampledSignal read_signal(const std::string& path);

} // namespace isac
