#include "qarrow/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include <fftw3.h>

#include "qarrow/errors.hpp"

namespace qarrow {

namespace {

/// e^{-i u H} with H in E/h kHz and u in seconds.
Mat2 evolution(const Eigensystem2& h, double u) {
    Eigen::Vector2cd phases;
    for (int k = 0; k < 2; ++k)
        phases(k) = std::polar(1.0, -kRadPerKHzSecond * u * h.values(k));
    return h.vectors * phases.asDiagonal() * h.vectors.adjoint();
}

/// Everything chi(u) needs, computed once per protocol.
struct ChiContext {
    Mat2 propagator;
    Eigensystem2 initial;
    Eigensystem2 final;
    Mat2 rho;

    ChiContext(const QuenchProtocol& p, InverseTemperature beta, const PropagationSettings& s)
        : propagator(protocol_propagator(p, s).matrix()) {
        const auto ends = endpoint_hamiltonians(p);
        initial = ends.initial.eigensystem();
        final = ends.final.eigensystem();
        rho = gibbs_state(ends.initial, beta).matrix();
    }

    [[nodiscard]] Mat2 left(double u) const { return propagator * evolution(initial, u); }
    [[nodiscard]] Mat2 right(double u) const { return evolution(final, u) * propagator; }
};

/// Controlled evolution |0><0| (x) A + |1><1| (x) B on ancilla (x) system,
/// starting from |+><+| (x) rho. Returns <sigma_x> - i <sigma_y> of the ancilla.
Complex ancilla_readout(const ChiContext& ctx, double u) {
    using Mat4 = Eigen::Matrix4cd;
    Mat4 gate = Mat4::Zero();
    gate.topLeftCorner<2, 2>() = ctx.left(u);
    gate.bottomRightCorner<2, 2>() = ctx.right(u);

    Mat4 joint;
    joint << ctx.rho, ctx.rho, ctx.rho, ctx.rho;
    joint *= 0.5;
    const Mat4 out = gate * joint * gate.adjoint();

    Mat4 sx = Mat4::Zero();
    Mat4 sy = Mat4::Zero();
    sx.topRightCorner<2, 2>() = Mat2::Identity();
    sx.bottomLeftCorner<2, 2>() = Mat2::Identity();
    sy.topRightCorner<2, 2>() = Complex(0.0, -1.0) * Mat2::Identity();
    sy.bottomLeftCorner<2, 2>() = Complex(0.0, 1.0) * Mat2::Identity();
    const double mx = (out * sx).trace().real();
    const double my = (out * sy).trace().real();
    return {mx, -my};
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

std::vector<Complex> forward_dft(const std::vector<Complex>& in) {
    const int n = static_cast<int>(in.size());
    std::vector<Complex> src = in;
    std::vector<Complex> dst(in.size());
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan.reset(fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(src.data()),
                                    reinterpret_cast<fftw_complex*>(dst.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE));
    }
    if (!plan) throw Error("FFTW failed to create a plan");
    fftw_execute(plan.get());
    return dst;
}

void require_uniform(const std::vector<double>& grid) {
    if (grid.size() < 2) throw GridError("u grid needs at least two points");
    const double du = grid[1] - grid[0];
    if (!(du > 0.0)) throw GridError("u grid must be strictly increasing");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (std::abs((grid[k] - grid[k - 1]) - du) > 1e-9 * du)
            throw GridError("u grid is not uniform");
}

}  // namespace

double CharFuncSeries::du() const {
    require_uniform(u_grid);
    return u_grid[1] - u_grid[0];
}

std::array<double, 4> expected_peak_locations(const QuenchProtocol& p) {
    const auto ends = endpoint_hamiltonians(p);
    const auto ei = ends.initial.eigensystem().values;
    const auto ef = ends.final.eigensystem().values;
    std::array<double, 4> w{ef(0) - ei(0), ef(0) - ei(1), ef(1) - ei(0), ef(1) - ei(1)};
    std::sort(w.begin(), w.end());
    return w;
}

Complex char_function_direct(const QuenchProtocol& p, InverseTemperature beta, double u,
                             const PropagationSettings& s) {
    const ChiContext ctx(p, beta, s);
    return (ctx.left(u) * ctx.rho * ctx.right(u).adjoint()).trace();
}

CharFuncSeries simulate_ramsey(const QuenchProtocol& p, InverseTemperature beta,
                               const InterferometerSettings& cfg, const PropagationSettings& s) {
    if (cfg.n_samples < 16) throw ConfigError("interferometer needs at least 16 samples");
    if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma))
        throw ConfigError("noise_sigma must be finite and non-negative");
    if (!(cfg.u_span_s > 0.0) || !std::isfinite(cfg.u_span_s))
        throw ConfigError("u span must be positive");

    const ChiContext ctx(p, beta, s);
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    const double du = cfg.u_span_s / cfg.n_samples;
    const double s_scale = 2.0 * std::numbers::pi * p.nu0_khz() * 1e3;

    CharFuncSeries out{{}, {}, {}, p, cfg.noise_sigma};
    out.u_grid.resize(n);
    out.samples.resize(n);
    out.s_parameter.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = static_cast<double>(k) * du;
        out.u_grid[k] = u;
        out.s_parameter[k] = s_scale * u;
        out.samples[k] = ancilla_readout(ctx, u);
    }
    if (cfg.noise_sigma > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (auto& z : out.samples) {
            const double re = noise(rng);
            const double im = noise(rng);
            z += Complex(re, im);
        }
    }
    return out;
}

Spectrum inverse_dft(const CharFuncSeries& series) {
    const double du = series.du();
    const auto n = series.samples.size();
    if (n != series.u_grid.size()) throw GridError("sample count differs from grid length");
    const double bin_width = 1.0 / (static_cast<double>(n) * du) / 1e3;  // kHz

    const auto raw = forward_dft(series.samples);
    const long half = static_cast<long>(n) / 2;
    const long lowest = -half;
    const long highest = static_cast<long>(n) - 1 - half;

    Spectrum sp{};
    sp.bin_width_hkhz = bin_width;
    sp.bins.reserve(n);
    for (long k = lowest; k <= highest; ++k) {
        const auto idx = static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n));
        sp.bins.push_back({static_cast<double>(k) * bin_width, raw[idx] / static_cast<double>(n)});
    }

    const auto expected = expected_peak_locations(series.protocol);
    std::vector<bool> is_peak(n, false);
    for (std::size_t j = 0; j < expected.size(); ++j) {
        const long k = std::lround(expected[j] / bin_width);
        if (k < lowest || k > highest ||
            std::abs(expected[j] - static_cast<double>(k) * bin_width) > 0.5 * bin_width)
            throw GridError("expected peak at " + std::to_string(expected[j]) +
                            " kHz is not resolvable on the frequency grid");
        const auto pos = static_cast<std::size_t>(k - lowest);
        sp.peaks[j] = {expected[j], pos, sp.bins[pos].amplitude.real()};
        is_peak[pos] = true;
    }
    sp.off_peak_mass = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (!is_peak[k]) sp.off_peak_mass += std::abs(sp.bins[k].amplitude);
    return sp;
}

PeakFitResult fit_peaks(const CharFuncSeries& series,
                        const std::array<double, 4>& expected_locations) {
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            if (expected_locations[i] == expected_locations[j])
                throw SingularFitError("expected peak locations must be distinct");

    const auto n = static_cast<Eigen::Index>(series.samples.size());
    Eigen::MatrixXd design(2 * n, 4);
    Eigen::VectorXd rhs(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double u = series.u_grid[static_cast<std::size_t>(j)];
        for (int k = 0; k < 4; ++k) {
            const double phase = kRadPerKHzSecond * expected_locations[k] * u;
            design(2 * j, k) = std::cos(phase);
            design(2 * j + 1, k) = std::sin(phase);
        }
        rhs(2 * j) = series.samples[static_cast<std::size_t>(j)].real();
        rhs(2 * j + 1) = series.samples[static_cast<std::size_t>(j)].imag();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(3) > 1e-10 * sv(0)))
        throw SingularFitError("design matrix is rank deficient: frequencies alias on this grid");
    const Eigen::VectorXd x = svd.solve(rhs);
    const Eigen::VectorXd residual = design * x - rhs;
    const double rss = residual.squaredNorm();

    // (A^T A)^-1 = V S^-2 V^T
    const Eigen::MatrixXd v = svd.matrixV();
    const Eigen::MatrixXd inv_normal =
        v * sv.array().square().inverse().matrix().asDiagonal() * v.transpose();
    const double dof = static_cast<double>(2 * n - 4);
    const double s2 = dof > 0 ? rss / dof : 0.0;

    PeakFitResult r{};
    for (int k = 0; k < 4; ++k) {
        r.locations[k] = expected_locations[k];
        r.amplitudes[k] = x(k);
        r.standard_errors[k] = std::sqrt(s2 * inv_normal(k, k));
    }
    r.residual_norm = std::sqrt(rss);
    r.noise_floor = std::sqrt(rss / static_cast<double>(2 * n));
    return r;
}

WorkDistribution to_work_distribution(const PeakFitResult& fit, const QuenchProtocol& p) {
    WorkDistribution wd{{}, p};
    for (int k = 0; k < 4; ++k)
        wd.peaks.push_back({fit.locations[k], fit.amplitudes[k], fit.standard_errors[k]});
    std::stable_sort(wd.peaks.begin(), wd.peaks.end(),
                     [](const WorkPeak& a, const WorkPeak& b) { return a.work_hkhz < b.work_hkhz; });
    return wd;
}

}  // namespace qarrow
