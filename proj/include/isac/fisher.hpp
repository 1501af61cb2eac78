// SPDX-License-Identifier: Apache-2.0
//
// Numerical Fisher information for the received-signal model
//   mu_n(t) = A e^{j phi} conj(a_n(theta)) s(t - tau) e^{j 2 pi f_D (t + T0)},
// F_ij = (2 / sigma^2) Re sum_n int conj(d mu_n / d Theta_i) d mu_n / d Theta_j dt,
// evaluated by direct summation over the sampled derivative signals.
#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Core>

#include "isac/scene.hpp"
#include "isac/waveform.hpp"

namespace isac {

enum class Param { Amplitude = 0, Phase = 1, Delay = 2, Doppler = 3, Angle = 4 };
inline constexpr std::array<const char*, 5> kParamNames{"A", "phi", "tau", "f_D", "theta_R"};

struct FisherMatrix {
    Eigen::Matrix<double, 5, 5> entries = Eigen::Matrix<double, 5, 5>::Zero();

    double operator()(Param i, Param j) const {
        return entries(static_cast<int>(i), static_cast<int>(j));
    }
    FisherMatrix& operator+=(const FisherMatrix& other) {
        entries += other.entries;
        return *this;
    }
};

// A bound that is either a finite variance or structurally unbounded
// (singular EFIM direction, K = 1 FMCW, theta = +-pi/2, N_R = 1).
class Bound {
public:
    static Bound finite(double v) { return Bound(v, true); }
    static Bound unbounded() { return Bound(0.0, false); }

    bool is_finite() const { return finite_; }
    double value() const;
    std::string str() const;

private:
    Bound(double v, bool finite) : value_(v), finite_(finite) {}
    double value_;
    bool finite_;
};

struct CouplingReport {
    std::complex<double> c0{};
    double im_c1 = 0.0;
    double re_c0_defect = 0.0;
};

struct CrlbResult {
    Bound c_tau = Bound::unbounded();
    Bound c_fd = Bound::unbounded();
    Bound c_theta = Bound::unbounded();
    CouplingReport coupling;
};

// C0 = int conj(s(t - tau)) ds/dt(t - tau) dt. Shift invariant, so tau only
// documents the call site.
std::complex<double> compute_c0(const SampledSignal& sig, double tau);

// Im{C1}, C1 = int t conj(ds/dt(t - tau)) s(t - tau) dt on the centroid axis.
double compute_im_c1(const SampledSignal& sig, double tau);

CouplingReport coupling_report(const SampledSignal& sig, double tau);

// FIM of an already synthesized signal. element_positions are in wavelengths
// (empty: the scene's Rx ULA).
FisherMatrix fim_from_signal(const SampledSignal& sig, const SceneParams& scene,
                             std::span<const double> element_positions = {});

// Synthesizes `spec` (rect PMCW is main-lobe filtered) and evaluates the FIM.
FisherMatrix fim_numeric(const WaveformSpec& spec, const SceneParams& scene, double fs,
                         SynthesisOptions opts = {});

// Symmetry and PSD check on the diagonally normalized matrix; throws
// NumericalError naming the worst entry.
void check_fim(const FisherMatrix& f);

// Schur complement over phi of the (phi, tau, f_D, theta) block.
Eigen::Matrix3d efim(const FisherMatrix& f);

// Inverts E; structurally singular directions become unbounded.
CrlbResult crlb_from_efim(const Eigen::Matrix3d& e);

// Convenience: synthesize, FIM, EFIM, bounds and coupling report.
CrlbResult numeric_crlb(const SampledSignal& sig, const SceneParams& scene);

// `param_i,param_j,value` rows followed by a `# crlb` block.
void write_fim_csv(std::ostream& os, const FisherMatrix& f, const CrlbResult& crlb);

} // namespace isac
