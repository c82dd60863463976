#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qarrow/crooksfit.hpp"
#include "qarrow/errors.hpp"
#include "qarrow/experiment.hpp"
#include "qarrow/interferometer.hpp"

using namespace qarrow;

namespace {

const InverseTemperature kBeta(1.0 / 1.56);
constexpr double kBetaTrue = 1.0 / 1.56;
constexpr double kBetaDeltaF = -0.3627878334838078;
constexpr double kDeltaF = -0.5659490202347401;
constexpr double kReferenceTausUs[] = {100, 200, 260, 320, 420, 500, 700};

QuenchProtocol reference(double tau_us, Direction d = Direction::forward) {
    return QuenchProtocol(1.0, 1.8, tau_us * 1e-6, d);
}

std::vector<LogRatioPoint> tpm_points(double tau_us, bool inner_only = true) {
    return log_ratio_points(tpm_work_distribution(reference(tau_us), kBeta),
                            tpm_work_distribution(reference(tau_us, Direction::backward), kBeta),
                            inner_only);
}

WorkDistribution fitted(const ExperimentConfig& cfg, std::size_t i, Direction d) {
    const auto p = cfg.protocol(cfg.tau_list_us[i], d);
    const auto series = simulate_ramsey(p, cfg.beta(), cfg.interferometer(i, d), cfg.propagation());
    return to_work_distribution(fit_peaks(series, expected_peak_locations(p)), p);
}

}  // namespace

TEST(LogRatio, InnerPeaksAt100us) {
    const auto pts = tpm_points(100);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_NEAR(pts[0].work_hkhz, -0.8, 1e-14);
    EXPECT_NEAR(pts[1].work_hkhz, 0.8, 1e-14);
    EXPECT_NEAR(pts[0].log_ratio, -0.150032679336705, 1e-8);
    EXPECT_NEAR(pts[1].log_ratio, 0.8756083463043205, 1e-8);
    for (const auto& p : pts) {
        EXPECT_EQ(p.weight, 1.0);
        EXPECT_FALSE(p.inverse_variance);
    }
}

TEST(LogRatio, AllPeaksAreCollinear) {
    const auto pts = tpm_points(260, false);
    ASSERT_EQ(pts.size(), 4u);
    for (const auto& p : pts)
        EXPECT_NEAR(p.log_ratio, kBetaTrue * p.work_hkhz - kBetaDeltaF, 1e-8);
}

TEST(LogRatio, IdentityProtocolIsFlat) {
    const QuenchProtocol f(1.0, 1.0, 1e-4, Direction::forward, 0.0);
    // Constant H: only W = 0 survives, and both directions give the same distribution.
    const auto pts = log_ratio_points(tpm_work_distribution(f, kBeta),
                                      tpm_work_distribution(f.with_direction(Direction::backward), kBeta));
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_NEAR(pts[0].work_hkhz, 0.0, 1e-14);
    EXPECT_NEAR(pts[0].log_ratio, 0.0, 1e-12);
}

TEST(LogRatio, DefaultPhaseSweepWithEqualFieldsIsFlatToo) {
    // nu0 = nu_tau: dF = 0 and the inner peaks sit at W = 0.
    const QuenchProtocol f(1.2, 1.2, 3e-4);
    const auto pts = log_ratio_points(tpm_work_distribution(f, kBeta),
                                      tpm_work_distribution(f.with_direction(Direction::backward), kBeta));
    for (const auto& p : pts) EXPECT_NEAR(p.log_ratio, kBetaTrue * p.work_hkhz, 1e-8);
}

TEST(LogRatio, Errors) {
    const auto f = tpm_work_distribution(reference(100), kBeta);
    const auto b = tpm_work_distribution(reference(100, Direction::backward), kBeta);
    EXPECT_THROW((void)log_ratio_points(b, f), DomainError);

    auto shifted = b;
    for (auto& pk : shifted.peaks) pk.work_hkhz += 0.1;
    EXPECT_THROW((void)log_ratio_points(f, shifted), SupportError);

    auto zeroed = b;
    for (auto& pk : zeroed.peaks)
        if (std::abs(pk.work_hkhz) < 1.0) pk.probability = 0.0;
    EXPECT_THROW((void)log_ratio_points(f, zeroed), DomainError);
}

TEST(LogRatio, UncertaintiesBecomeInverseVarianceWeights) {
    auto f = tpm_work_distribution(reference(100), kBeta);
    auto b = tpm_work_distribution(reference(100, Direction::backward), kBeta);
    for (auto& pk : f.peaks) pk.uncertainty = 0.01;
    for (auto& pk : b.peaks) pk.uncertainty = 0.02;
    for (const auto& pt : log_ratio_points(f, b)) {
        ASSERT_TRUE(pt.inverse_variance);
        const auto& pf = *std::find_if(f.peaks.begin(), f.peaks.end(),
                                       [&](const WorkPeak& q) { return q.work_hkhz == pt.work_hkhz; });
        const auto& pb = *std::find_if(b.peaks.begin(), b.peaks.end(),
                                       [&](const WorkPeak& q) { return q.work_hkhz == -pt.work_hkhz; });
        const double var = std::pow(0.01 / pf.probability, 2) + std::pow(0.02 / pb.probability, 2);
        EXPECT_NEAR(pt.weight, 1.0 / var, 1e-9 / var);
    }
}

TEST(FitLine, ExactRecoveryPerTau) {
    for (double tau : kReferenceTausUs) {
        const auto pts = tpm_points(tau);
        const auto r = fit_line(std::span<const LogRatioPoint>(pts));
        EXPECT_NEAR(r.beta_est, kBetaTrue, 1e-9);
        EXPECT_NEAR(r.beta_delta_f_est, kBetaDeltaF, 1e-9);
        EXPECT_NEAR(r.delta_f_est, kDeltaF, 1e-8);
        EXPECT_NEAR(r.delta_f_est, r.beta_delta_f_est / r.beta_est, 1e-15);
        EXPECT_LT(r.max_abs_residual, 1e-9);
        EXPECT_GE(r.stderr_slope, 0.0);
        EXPECT_GE(r.stderr_intercept, 0.0);
        EXPECT_EQ(r.slope(), r.beta_est);
        EXPECT_EQ(r.intercept(), -r.beta_delta_f_est);
    }
}

TEST(FitLine, ProtocolIndependenceAndConsistency) {
    std::vector<std::vector<LogRatioPoint>> groups;
    for (double tau : kReferenceTausUs) groups.push_back(tpm_points(tau, false));
    const auto per_tau = fit_line(std::span<const std::vector<LogRatioPoint>>(groups), FitMode::per_tau);
    ASSERT_EQ(per_tau.size(), 7u);
    for (const auto& r : per_tau) {
        EXPECT_NEAR(r.beta_est, per_tau.front().beta_est, 1e-8);
        EXPECT_NEAR(r.delta_f_est, per_tau.front().delta_f_est, 1e-8);
        EXPECT_EQ(r.points_used.size(), 4u);
    }
    const auto pooled = fit_line(std::span<const std::vector<LogRatioPoint>>(groups), FitMode::pooled);
    ASSERT_EQ(pooled.size(), 1u);
    EXPECT_EQ(pooled[0].points_used.size(), 28u);
    EXPECT_NEAR(pooled[0].beta_est / kBetaTrue, 1.0, 1e-8);
    EXPECT_NEAR(pooled[0].delta_f_est / kDeltaF, 1.0, 1e-8);
    EXPECT_NEAR(pooled[0].delta_f_est, free_energy_difference(kBeta, 1.0, 1.8), 1e-8);
    EXPECT_NEAR(pooled[0].delta_f_est,
                jarzynski_delta_f(tpm_work_distribution(reference(100), kBeta), kBeta), 1e-8);
}

TEST(FitLine, OrdinaryLeastSquaresOnKnownData) {
    // y = 2x + 1 with residuals (+0.1, -0.2, +0.1): slope and errors by hand.
    const std::vector<LogRatioPoint> pts{{-1.0, -0.9}, {0.0, 0.8}, {1.0, 3.1}};
    const auto r = fit_line(std::span<const LogRatioPoint>(pts));
    EXPECT_NEAR(r.slope(), 2.0, 1e-14);
    EXPECT_NEAR(r.intercept(), 1.0, 1e-14);
    // s^2 = 0.06 / 1, Sxx = 2, n = 3
    EXPECT_NEAR(r.stderr_slope, std::sqrt(0.06 / 2.0), 1e-14);
    EXPECT_NEAR(r.stderr_intercept, std::sqrt(0.06 / 3.0), 1e-14);
    EXPECT_NEAR(r.max_abs_residual, 0.2, 1e-14);
}

TEST(FitLine, InverseVarianceWeighting) {
    // A heavily weighted point pulls the line; absolute errors use 1/sum(w) scale.
    std::vector<LogRatioPoint> pts{{-1.0, -1.0, 1e6, true}, {0.0, 0.5, 1.0, true}, {1.0, 1.0, 1e6, true}};
    const auto r = fit_line(std::span<const LogRatioPoint>(pts));
    EXPECT_NEAR(r.slope(), 1.0, 1e-6);
    EXPECT_NEAR(r.intercept(), 0.0, 1e-6);
    EXPECT_NEAR(r.stderr_slope, std::sqrt(1.0 / 2e6), 1e-9);
}

TEST(FitLine, DegenerateInputs) {
    const std::vector<LogRatioPoint> one{{0.8, 0.1}};
    EXPECT_THROW((void)fit_line(std::span<const LogRatioPoint>(one)), DegenerateFitError);
    const std::vector<LogRatioPoint> same_w{{0.8, 0.1}, {0.8, 0.3}};
    EXPECT_THROW((void)fit_line(std::span<const LogRatioPoint>(same_w)), DegenerateFitError);
}

TEST(FitLine, NoisyInterferometerPerTau) {
    ExperimentConfig cfg;
    cfg.noise_sigma = 0.02;
    cfg.tau_list_us = {100};
    int within = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        cfg.seed = seed;
        const auto pts =
            log_ratio_points(fitted(cfg, 0, Direction::forward), fitted(cfg, 0, Direction::backward));
        ASSERT_TRUE(pts[0].inverse_variance);
        const auto r = fit_line(std::span<const LogRatioPoint>(pts));
        if (std::abs(r.beta_est / kBetaTrue - 1.0) < 0.05) ++within;
    }
    EXPECT_GE(within, 95);
}
