#include "qarrow/quench.hpp"

#include <cmath>
#include <string>

#include "qarrow/errors.hpp"

namespace qarrow {

namespace {

void require_positive_finite(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0))
        throw DomainError(std::string(name) + " must be positive and finite");
}

void require_in_range(const QuenchProtocol& p, double t) {
    if (!(t >= 0.0 && t <= p.tau_s()))
        throw DomainError("time " + std::to_string(t) + " s outside [0, tau]");
}

int steps_for(const QuenchProtocol& p, double t, const PropagationSettings& s) {
    if (s.n_steps < 1) throw ConfigError("n_steps must be >= 1");
    const double exact = s.n_steps * (t / p.tau_s());
    // The small slack keeps grid points t = k*tau/n_steps on exactly k steps.
    return std::max(1, static_cast<int>(std::ceil(exact - 1e-9)));
}

/// Phase vector 2*pi*1e3 * dt * nu(t) * (cos phi, sin phi, 0) of H^F(t).
std::array<double, 3> phase_vector(const QuenchProtocol& p, double t, double dt) {
    const double a = kRadPerKHzSecond * dt * p.field_khz(t);
    const double phi = p.field_phase(t);
    return {a * std::cos(phi), a * std::sin(phi), 0.0};
}

// Forward: d_t X = -i H^F(t) X. Reversed: d_t X = +i H^F(tau - t) X.
Unitary2 integrate(const QuenchProtocol& p, double t, const PropagationSettings& s, bool reversed) {
    if (t == 0.0) return Unitary2::identity();
    const int n = steps_for(p, t, s);
    const double dt = t / n;
    Mat2 acc = Mat2::Identity();
    for (int k = 0; k < n; ++k) {
        const double mid = (k + 0.5) * dt;
        std::array<double, 3> theta;
        if (reversed) {
            theta = phase_vector(p, p.tau_s() - mid, dt);
            for (auto& c : theta) c = -c;
        } else {
            theta = phase_vector(p, mid, dt);
        }
        acc = su2_exponential(theta).matrix() * acc;
    }
    return Unitary2(acc, s.unitarity_tol);
}

}  // namespace

const char* to_string(Direction d) noexcept {
    return d == Direction::forward ? "forward" : "backward";
}

QuenchProtocol::QuenchProtocol(double nu0_khz, double nu_tau_khz, double tau_s,
                               Direction direction, double phase_sweep_rad)
    : nu0_(nu0_khz), nu_tau_(nu_tau_khz), tau_(tau_s), direction_(direction),
      phase_sweep_(phase_sweep_rad) {
    require_positive_finite(nu0_khz, "nu0");
    require_positive_finite(nu_tau_khz, "nu_tau");
    require_positive_finite(tau_s, "tau");
    if (!std::isfinite(phase_sweep_rad)) throw DomainError("phase sweep must be finite");
}

QuenchProtocol QuenchProtocol::with_direction(Direction d) const {
    return QuenchProtocol(nu0_, nu_tau_, tau_, d, phase_sweep_);
}

QuenchProtocol QuenchProtocol::with_tau(double tau_s) const {
    return QuenchProtocol(nu0_, nu_tau_, tau_s, direction_, phase_sweep_);
}

double QuenchProtocol::field_khz(double t) const noexcept {
    const double x = t / tau_;
    return nu0_ * (1.0 - x) + nu_tau_ * x;
}

double QuenchProtocol::field_phase(double t) const noexcept { return phase_sweep_ * (t / tau_); }

HermitianOperator2 QuenchProtocol::forward_hamiltonian(double t) const {
    const double phi = field_phase(t);
    return field_khz(t) * (std::cos(phi) * pauli(Axis::x) + std::sin(phi) * pauli(Axis::y));
}

// ---------------------------------------------------------------------------

HermitianOperator2 hamiltonian_at(const QuenchProtocol& p, double t) {
    require_in_range(p, t);
    if (p.direction() == Direction::forward) return p.forward_hamiltonian(t);
    return -p.forward_hamiltonian(p.tau_s() - t);
}

EndpointHamiltonians endpoint_hamiltonians(const QuenchProtocol& p) {
    auto h0 = p.forward_hamiltonian(0.0);
    auto ht = p.forward_hamiltonian(p.tau_s());
    if (p.direction() == Direction::forward) return {h0, ht};
    return {ht, h0};
}

Unitary2 propagator(const QuenchProtocol& p, double t, const PropagationSettings& s) {
    if (p.direction() != Direction::forward)
        throw DomainError("propagator requires a forward protocol");
    require_in_range(p, t);
    return integrate(p, t, s, false);
}

Unitary2 backward_propagator(const QuenchProtocol& p, double t, const PropagationSettings& s) {
    if (p.direction() != Direction::backward)
        throw DomainError("backward_propagator requires a backward protocol");
    require_in_range(p, t);
    return integrate(p, t, s, true);
}

Unitary2 protocol_propagator(const QuenchProtocol& p, const PropagationSettings& s) {
    return p.direction() == Direction::forward ? propagator(p, p.tau_s(), s)
                                               : backward_propagator(p, p.tau_s(), s);
}

DensityMatrix forward_state(const QuenchProtocol& p, InverseTemperature beta, double t,
                            const PropagationSettings& s) {
    const auto fwd = p.with_direction(Direction::forward);
    return gibbs_state(fwd.forward_hamiltonian(0.0), beta).conjugated(propagator(fwd, t, s));
}

DensityMatrix backward_state(const QuenchProtocol& p, InverseTemperature beta, double t,
                             const PropagationSettings& s) {
    const auto bwd = p.with_direction(Direction::backward);
    return gibbs_state(bwd.forward_hamiltonian(bwd.tau_s()), beta)
        .conjugated(backward_propagator(bwd, t, s));
}

std::vector<double> uniform_time_grid(double tau, int n) {
    if (n < 2) throw ConfigError("a time grid needs at least 2 samples");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) grid[k] = tau * (static_cast<double>(k) / (n - 1));
    grid.back() = tau;
    return grid;
}

BlochTrajectory trajectory(const QuenchProtocol& p, InverseTemperature beta, int n_samples,
                           const PropagationSettings& s) {
    BlochTrajectory out{uniform_time_grid(p.tau_s(), n_samples), {}, p};
    out.vectors.reserve(out.times.size());
    for (double t : out.times) {
        const auto rho = p.direction() == Direction::forward ? forward_state(p, beta, t, s)
                                                             : backward_state(p, beta, t, s);
        out.vectors.push_back(bloch_vector(rho));
    }
    return out;
}

BlochTrajectory quasistatic_trajectory(const QuenchProtocol& p, InverseTemperature beta,
                                       int n_samples) {
    const bool fwd = p.direction() == Direction::forward;
    const double nu_start = fwd ? p.nu0_khz() : p.nu_tau_khz();
    // Gibbs state of nu n.sigma has Bloch vector -tanh(beta nu) n.
    const double magnitude = std::tanh(beta.value() * nu_start);

    BlochTrajectory out{uniform_time_grid(p.tau_s(), n_samples), {}, p};
    out.vectors.reserve(out.times.size());
    for (double t : out.times) {
        const double phi = p.field_phase(fwd ? t : p.tau_s() - t);
        out.vectors.push_back({-magnitude * std::cos(phi), -magnitude * std::sin(phi), 0.0});
    }
    return out;
}

}  // namespace qarrow
