#include "qarrow/workstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qarrow/errors.hpp"

namespace qarrow {

namespace {

/// ln cosh(x) without overflow or cancellation near zero.
double log_cosh(double x) {
    const double a = std::abs(x);
    if (a < 1.0) {
        const double s = std::sinh(0.5 * a);
        return std::log1p(2.0 * s * s);
    }
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

/// Gibbs populations of an endpoint Hamiltonian in its ascending eigenbasis.
Eigen::Vector2d boltzmann_weights(const Eigen::Vector2d& energies, double beta) {
    Eigen::Vector2d w;
    for (int k = 0; k < 2; ++k) w(k) = std::exp(-beta * (energies(k) - energies(0)));
    return w / w.sum();
}

}  // namespace

double WorkDistribution::total_probability() const noexcept {
    double s = 0.0;
    for (const auto& pk : peaks) s += pk.probability;
    return s;
}

std::vector<WorkPeak> WorkDistribution::merged(double tol) const {
    std::vector<WorkPeak> out;
    for (const auto& pk : peaks) {
        auto it = std::find_if(out.begin(), out.end(), [&](const WorkPeak& q) {
            return std::abs(q.work_hkhz - pk.work_hkhz) <= tol;
        });
        if (it == out.end()) {
            out.push_back(pk);
            continue;
        }
        it->probability += pk.probability;
        if (it->uncertainty && pk.uncertainty)
            it->uncertainty = std::hypot(*it->uncertainty, *pk.uncertainty);
        else
            it->uncertainty.reset();
    }
    return out;
}

std::vector<SigmaPoint> EntropyProductionDistribution::support(double min_probability,
                                                               double tol) const {
    std::vector<SigmaPoint> out;
    for (const auto& pt : points) {
        auto it = std::find_if(out.begin(), out.end(), [&](const SigmaPoint& q) {
            return std::abs(q.sigma - pt.sigma) <= tol;
        });
        if (it == out.end())
            out.push_back(pt);
        else
            it->probability += pt.probability;
    }
    std::erase_if(out, [&](const SigmaPoint& q) { return q.probability <= min_probability; });
    return out;
}

// ---------------------------------------------------------------------------

Eigen::Matrix2d transition_matrix(const QuenchProtocol& p, const PropagationSettings& s) {
    const auto ends = endpoint_hamiltonians(p);
    const auto initial = ends.initial.eigensystem();
    const auto final = ends.final.eigensystem();
    const Mat2 amplitudes = final.vectors.adjoint() * protocol_propagator(p, s).matrix() *
                            initial.vectors;
    return amplitudes.cwiseAbs2();
}

WorkDistribution tpm_work_distribution(const QuenchProtocol& p, InverseTemperature beta,
                                       const PropagationSettings& s) {
    const auto ends = endpoint_hamiltonians(p);
    const auto e_initial = ends.initial.eigensystem().values;
    const auto e_final = ends.final.eigensystem().values;
    const auto weights = boltzmann_weights(e_initial, beta.value());
    const auto t = transition_matrix(p, s);

    WorkDistribution wd{{}, p};
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
            wd.peaks.push_back({e_final(m) - e_initial(n), weights(n) * t(m, n), std::nullopt});
    std::stable_sort(wd.peaks.begin(), wd.peaks.end(),
                     [](const WorkPeak& a, const WorkPeak& b) { return a.work_hkhz < b.work_hkhz; });
    return wd;
}

double free_energy_difference(InverseTemperature beta, double nu0_khz, double nu_tau_khz) {
    const double b = beta.value();
    if (b == 0.0) return 0.0;
    return (log_cosh(b * nu0_khz) - log_cosh(b * nu_tau_khz)) / b;
}

double jarzynski_delta_f(const WorkDistribution& wd, InverseTemperature beta) {
    const double b = beta.value();
    if (b == 0.0) return mean_work(wd);
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& pk : wd.peaks)
        if (pk.probability > 0.0) shift = std::max(shift, -b * pk.work_hkhz);
    double acc = 0.0;
    for (const auto& pk : wd.peaks)
        if (pk.probability > 0.0) acc += pk.probability * std::exp(-b * pk.work_hkhz - shift);
    return -(shift + std::log(acc)) / b;
}

double jarzynski_ratio(const WorkDistribution& wd, InverseTemperature beta, double delta_f_hkhz) {
    const double b = beta.value();
    double acc = 0.0;
    for (const auto& pk : wd.peaks)
        acc += pk.probability * std::exp(-b * (pk.work_hkhz - delta_f_hkhz));
    return acc;
}

EntropyProductionDistribution entropy_distribution(const WorkDistribution& wd,
                                                   InverseTemperature beta, double delta_f_hkhz) {
    EntropyProductionDistribution ed{{}, beta, delta_f_hkhz};
    ed.points.reserve(wd.peaks.size());
    for (const auto& pk : wd.peaks)
        ed.points.push_back({beta.value() * (pk.work_hkhz - delta_f_hkhz), pk.probability});
    return ed;
}

double mean_sigma(const EntropyProductionDistribution& ed) {
    double s = 0.0;
    for (const auto& pt : ed.points) s += pt.probability * pt.sigma;
    return s;
}

double mean_work(const WorkDistribution& wd) {
    double s = 0.0;
    for (const auto& pk : wd.peaks) s += pk.probability * pk.work_hkhz;
    return s;
}

std::vector<double> work_cumulants(const WorkDistribution& wd, int n_max) {
    if (n_max < 2) throw DomainError("work_cumulants needs n_max >= 2");
    // Cumulants of order >= 2 are shift invariant, so the moment recursion is
    // run on W - <W> to limit cancellation.
    const double mean = mean_work(wd);
    std::vector<double> moments(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (const auto& pk : wd.peaks) {
        const double d = pk.work_hkhz - mean;
        double power = 1.0;
        for (int k = 0; k <= n_max; ++k) {
            moments[k] += pk.probability * power;
            power *= d;
        }
    }
    std::vector<double> kappa(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 1; n <= n_max; ++n) {
        double acc = moments[n];
        for (int m = 1; m < n; ++m) acc -= binomial(n - 1, m - 1) * kappa[m] * moments[n - m];
        kappa[n] = acc;
    }
    kappa[1] = mean;
    return {kappa.begin() + 1, kappa.end()};
}

double cumulant_expansion_sigma(const std::vector<double>& cumulants, InverseTemperature beta) {
    const double b = beta.value();
    double sum = 0.0;
    double coeff = -b;  // (-b)^n / n!, starting at n = 1
    for (std::size_t k = 1; k < cumulants.size(); ++k) {
        const int n = static_cast<int>(k) + 1;
        coeff *= -b / n;
        sum += coeff * cumulants[k];
    }
    return sum;
}

double linear_response_sigma(const WorkDistribution& wd, InverseTemperature beta) {
    const double b = beta.value();
    return 0.5 * b * b * work_cumulants(wd, 2)[1];
}

SigmaKlReport sigma_equals_kl_check(const QuenchProtocol& p, InverseTemperature beta,
                                    const PropagationSettings& s,
                                    const std::vector<double>& t_grid) {
    const auto fwd = p.with_direction(Direction::forward);
    const double tau = fwd.tau_s();
    const double b = beta.value();

    SigmaKlReport r{};
    const auto wd = tpm_work_distribution(fwd, beta, s);
    const double df = free_energy_difference(beta, fwd.nu0_khz(), fwd.nu_tau_khz());
    r.sigma_from_work = b * mean_work(wd) - b * df;

    r.times = t_grid;
    r.kl_forward_backward.reserve(t_grid.size());
    for (double t : t_grid) {
        const double reversed = std::clamp(tau - t, 0.0, tau);
        r.kl_forward_backward.push_back(
            kl_divergence(forward_state(fwd, beta, t, s), backward_state(fwd, beta, reversed, s)));
    }
    r.kl_final_vs_equilibrium = kl_divergence(forward_state(fwd, beta, tau, s),
                                              gibbs_state(fwd.forward_hamiltonian(tau), beta));

    double lo = std::min(r.sigma_from_work, r.kl_final_vs_equilibrium);
    double hi = std::max(r.sigma_from_work, r.kl_final_vs_equilibrium);
    for (double v : r.kl_forward_backward) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    r.max_deviation = hi - lo;
    return r;
}

}  // namespace qarrow
