#pragma once

// Ancilla interferometry of the work characteristic function
//
//   chi(u) = tr[(U e^{-i u H_i}) rho_i (e^{-i u H_f} U)^dagger]
//          = sum_{m,n} p_n p_{m|n} e^{i u (e_f(m) - e_i(n))},
//
// its inverse DFT onto a work-frequency grid, and least-squares peak fitting.
// u is in seconds; energies enter phases as 2*pi*1e3 * E[kHz].

#include <array>
#include <cstdint>
#include <vector>

#include "qarrow/qcore.hpp"
#include "qarrow/quench.hpp"
#include "qarrow/workstats.hpp"

namespace qarrow {

/// Scalar-coupling constant of the reference hardware (Hz). Only relates the
/// dimensionless s to a physical delay; unused by the simulation.
inline constexpr double kScalarCouplingHz = 215.1;

struct InterferometerSettings {
    int n_samples = 360;
    /// Total u span N*du. 2.5 ms gives a 0.4 kHz bin width, which puts the
    /// reference peaks {+-0.8, +-2.8} kHz exactly on bins.
    double u_span_s = 2.5e-3;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

struct CharFuncSeries {
    std::vector<double> u_grid;  ///< seconds, u_k = k * du
    std::vector<Complex> samples;
    std::vector<double> s_parameter;  ///< 2*pi*nu0[Hz] * u
    QuenchProtocol protocol;
    double noise_sigma = 0.0;

    [[nodiscard]] double du() const;
};

struct SpectrumBin {
    double work_hkhz;
    Complex amplitude;
};

struct PeakBin {
    double expected_hkhz;
    std::size_t bin;  ///< index into Spectrum::bins
    double amplitude;  ///< real part of the bin amplitude
};

struct Spectrum {
    std::vector<SpectrumBin> bins;  ///< ascending work values
    double bin_width_hkhz;
    std::array<PeakBin, 4> peaks;
    /// sum of |amplitude| over bins that are not peak bins
    double off_peak_mass;
};

struct PeakFitResult {
    std::array<double, 4> locations;  ///< h*kHz
    std::array<double, 4> amplitudes;
    std::array<double, 4> standard_errors;
    double residual_norm;
    /// Residual RMS per real component.
    double noise_floor;
};

/// The four TPM work values e_f(m) - e_i(n) of p, ascending.
[[nodiscard]] std::array<double, 4> expected_peak_locations(const QuenchProtocol& p);

/// Trace formula evaluated with the simulated full-duration propagator.
[[nodiscard]] Complex char_function_direct(const QuenchProtocol& p, InverseTemperature beta,
                                           double u, const PropagationSettings& s = {});

/// Simulated ancilla read-out of chi(u) on the uniform grid of `cfg`.
/// Throws ConfigError if cfg.n_samples < 16 or noise_sigma < 0.
[[nodiscard]] CharFuncSeries simulate_ramsey(const QuenchProtocol& p, InverseTemperature beta,
                                             const InterferometerSettings& cfg = {},
                                             const PropagationSettings& s = {});

/// amplitude_k = (1/N) sum_j chi(u_j) e^{-2 pi i f_k u_j} on bins of width
/// 1/(N du). Throws GridError if an expected peak is more than half a bin
/// from every bin.
[[nodiscard]] Spectrum inverse_dft(const CharFuncSeries& series);

/// Real amplitudes a_k minimising sum_j |chi(u_j) - sum_k a_k e^{i w_k u_j}|^2.
/// Throws SingularFitError when the design matrix is rank deficient.
[[nodiscard]] PeakFitResult fit_peaks(const CharFuncSeries& series,
                                      const std::array<double, 4>& expected_locations);

/// WorkDistribution carrying fitted amplitudes and their standard errors.
[[nodiscard]] WorkDistribution to_work_distribution(const PeakFitResult& fit,
                                                    const QuenchProtocol& p);

}  // namespace qarrow
