#pragma once

// Two-point-measurement (TPM) work statistics of a quench, the entropy
// production Sigma = beta (W - dF), fluctuation-theorem machinery and the
// cumulant / linear-response expansions of <Sigma>.
//
// Work values are in h*kHz; entropy production is dimensionless.

#include <optional>
#include <vector>

#include "qarrow/qcore.hpp"
#include "qarrow/quench.hpp"

namespace qarrow {

struct WorkPeak {
    double work_hkhz;
    double probability;
    /// One-sigma uncertainty of `probability`; empty for exact values.
    std::optional<double> uncertainty;
};

struct WorkDistribution {
    std::vector<WorkPeak> peaks;  ///< sorted by work value
    QuenchProtocol protocol;

    [[nodiscard]] Direction direction() const noexcept { return protocol.direction(); }
    [[nodiscard]] double total_probability() const noexcept;
    /// Peaks whose work values agree to `tol` merged into one, probabilities
    /// summed and uncertainties added in quadrature.
    [[nodiscard]] std::vector<WorkPeak> merged(double tol = 1e-6) const;
};

struct SigmaPoint {
    double sigma;
    double probability;
};

struct EntropyProductionDistribution {
    std::vector<SigmaPoint> points;
    InverseTemperature beta;
    double delta_f_hkhz;

    /// Points with probability above `min_probability`, merging sigma values
    /// equal to `tol`.
    [[nodiscard]] std::vector<SigmaPoint> support(double min_probability = 1e-12,
                                                  double tol = 1e-9) const;
};

/// T(m, n) = |<m_final| U |n_initial>|^2 between the ascending-energy
/// eigenbases of the endpoint Hamiltonians (U = U_tau forward, V_tau backward).
[[nodiscard]] Eigen::Matrix2d transition_matrix(const QuenchProtocol& p,
                                                const PropagationSettings& s = {});

/// Four-peak TPM distribution at W = e_final(m) - e_initial(n).
[[nodiscard]] WorkDistribution tpm_work_distribution(const QuenchProtocol& p,
                                                     InverseTemperature beta,
                                                     const PropagationSettings& s = {});

/// Closed form beta^-1 ln[cosh(beta nu0) / cosh(beta nu_tau)]; 0 at beta = 0.
[[nodiscard]] double free_energy_difference(InverseTemperature beta, double nu0_khz,
                                            double nu_tau_khz);

/// -beta^-1 ln <e^{-beta W}>; the mean work at beta = 0.
[[nodiscard]] double jarzynski_delta_f(const WorkDistribution& wd, InverseTemperature beta);

/// <e^{-beta W}> e^{beta dF}, which equals 1 for unitary protocols.
[[nodiscard]] double jarzynski_ratio(const WorkDistribution& wd, InverseTemperature beta,
                                     double delta_f_hkhz);

[[nodiscard]] EntropyProductionDistribution entropy_distribution(const WorkDistribution& wd,
                                                                 InverseTemperature beta,
                                                                 double delta_f_hkhz);

[[nodiscard]] double mean_sigma(const EntropyProductionDistribution& ed);

[[nodiscard]] double mean_work(const WorkDistribution& wd);

/// kappa_1 .. kappa_{n_max}; element k holds kappa_{k+1}. Throws DomainError
/// for n_max < 2.
[[nodiscard]] std::vector<double> work_cumulants(const WorkDistribution& wd, int n_max);

/// sum_{n=2}^{n_max} (-1)^n / n! kappa_n beta^n for kappa from work_cumulants.
[[nodiscard]] double cumulant_expansion_sigma(const std::vector<double>& cumulants,
                                              InverseTemperature beta);

/// beta^2 kappa_2 / 2
[[nodiscard]] double linear_response_sigma(const WorkDistribution& wd, InverseTemperature beta);

struct SigmaKlReport {
    double sigma_from_work;             ///< beta <W> - beta dF from the TPM distribution
    std::vector<double> times;          ///< seconds
    std::vector<double> kl_forward_backward;  ///< S(rho^F_t || rho^B_{tau-t}) per time
    double kl_final_vs_equilibrium;     ///< S(rho^F_tau || rho^eq_tau)
    double max_deviation;               ///< largest pairwise difference of all the above
};

/// Evaluates <Sigma> three independent ways for a forward protocol.
[[nodiscard]] SigmaKlReport sigma_equals_kl_check(const QuenchProtocol& p, InverseTemperature beta,
                                                  const PropagationSettings& s,
                                                  const std::vector<double>& t_grid);

}  // namespace qarrow
