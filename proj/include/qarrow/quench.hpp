#pragma once

// Linear-ramp transverse-field quench of a qubit and its time reverse.
//
// Forward Hamiltonian (E/h, kHz):
//   H^F(t) = nu(t) [sigma_x cos phi(t) + sigma_y sin phi(t)]
//   nu(t)  = nu0 (1 - t/tau) + nu_tau t/tau,   phi(t) = phase_sweep * t/tau
// with phase_sweep = pi/2 for the reference protocol. The backward process
// is generated by d_t V_t = +i H^F(tau - t) V_t, V_0 = 1, i.e. the
// time-reversed Hamiltonian H^B(t) = -H^F(tau - t).

#include <numbers>
#include <vector>

#include "qarrow/qcore.hpp"

namespace qarrow {

enum class Direction { forward, backward };

[[nodiscard]] const char* to_string(Direction d) noexcept;

/// 2*pi*1e3: converts E/h in kHz times seconds into a phase in radians.
inline constexpr double kRadPerKHzSecond = 2.0 * std::numbers::pi * 1e3;

class QuenchProtocol {
public:
    static constexpr double kDefaultPhaseSweep = std::numbers::pi / 2.0;

    /// Throws DomainError unless nu0, nu_tau, tau are positive and finite.
    QuenchProtocol(double nu0_khz, double nu_tau_khz, double tau_s,
                   Direction direction = Direction::forward,
                   double phase_sweep_rad = kDefaultPhaseSweep);

    [[nodiscard]] double nu0_khz() const noexcept { return nu0_; }
    [[nodiscard]] double nu_tau_khz() const noexcept { return nu_tau_; }
    [[nodiscard]] double tau_s() const noexcept { return tau_; }
    [[nodiscard]] Direction direction() const noexcept { return direction_; }
    [[nodiscard]] double phase_sweep_rad() const noexcept { return phase_sweep_; }

    [[nodiscard]] QuenchProtocol with_direction(Direction d) const;
    [[nodiscard]] QuenchProtocol with_tau(double tau_s) const;

    /// Field amplitude nu(t) of the forward ramp, kHz.
    [[nodiscard]] double field_khz(double t) const noexcept;
    /// Field azimuth phi(t) of the forward ramp, radians.
    [[nodiscard]] double field_phase(double t) const noexcept;
    /// Forward Hamiltonian H^F(t) without range checks.
    [[nodiscard]] HermitianOperator2 forward_hamiltonian(double t) const;

private:
    double nu0_;
    double nu_tau_;
    double tau_;
    Direction direction_;
    double phase_sweep_;
};

struct PropagationSettings {
    /// Midpoint steps per full duration tau. A partial interval [0, t] uses
    /// ceil(n_steps * t / tau) steps so grid points of the full run coincide.
    int n_steps = 2000;
    double unitarity_tol = Unitary2::kDefaultTolerance;
};

struct BlochTrajectory {
    std::vector<double> times;  ///< seconds, strictly increasing over [0, tau]
    std::vector<BlochVector> vectors;
    QuenchProtocol protocol;
};

/// H^F(t) for forward protocols, H^B(t) = -H^F(tau - t) for backward ones.
/// Throws DomainError if t is outside [0, tau].
[[nodiscard]] HermitianOperator2 hamiltonian_at(const QuenchProtocol& p, double t);

/// Endpoint Hamiltonians that define the energy measurements of a protocol:
/// (H^F(0), H^F(tau)) forward and (H^F(tau), H^F(0)) backward.
struct EndpointHamiltonians {
    HermitianOperator2 initial;
    HermitianOperator2 final;
};
[[nodiscard]] EndpointHamiltonians endpoint_hamiltonians(const QuenchProtocol& p);

/// U_t for a forward protocol: ordered product of exact exponentials of the
/// midpoint Hamiltonian on each sub-interval.
[[nodiscard]] Unitary2 propagator(const QuenchProtocol& p, double t,
                                  const PropagationSettings& s = {});

/// V_t for a backward protocol, integrated directly from its own generator.
[[nodiscard]] Unitary2 backward_propagator(const QuenchProtocol& p, double t,
                                           const PropagationSettings& s = {});

/// Full-duration propagator of either direction (U_tau or V_tau).
[[nodiscard]] Unitary2 protocol_propagator(const QuenchProtocol& p,
                                           const PropagationSettings& s = {});

/// rho^F_t = U_t rho^eq_0 U_t^dagger (direction of p is ignored).
[[nodiscard]] DensityMatrix forward_state(const QuenchProtocol& p, InverseTemperature beta,
                                          double t, const PropagationSettings& s = {});
/// rho^B_t = V_t rho^eq_tau V_t^dagger (direction of p is ignored).
[[nodiscard]] DensityMatrix backward_state(const QuenchProtocol& p, InverseTemperature beta,
                                           double t, const PropagationSettings& s = {});

/// Bloch vectors of the state selected by p.direction() on a uniform grid.
[[nodiscard]] BlochTrajectory trajectory(const QuenchProtocol& p, InverseTemperature beta,
                                         int n_samples = 21, const PropagationSettings& s = {});

/// Adiabatic reference: initial Gibbs populations carried along the
/// instantaneous eigenbasis.
[[nodiscard]] BlochTrajectory quasistatic_trajectory(const QuenchProtocol& p,
                                                     InverseTemperature beta,
                                                     int n_samples = 21);

/// Uniform grid of n points over [0, tau], endpoints exact.
[[nodiscard]] std::vector<double> uniform_time_grid(double tau, int n);

}  // namespace qarrow
