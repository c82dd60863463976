#pragma once

// Estimation of beta and dF from the detailed fluctuation relation
//
//   ln[P^F(+W) / P^B(-W)] = beta W - beta dF
//
// by (weighted) linear least squares over mirrored forward/backward peaks.

#include <span>
#include <vector>

#include "qarrow/workstats.hpp"

namespace qarrow {

/// Absolute tolerance used to pair a forward peak at +W with a backward one at -W.
inline constexpr double kPeakMatchTolerance = 1e-6;

struct LogRatioPoint {
    double work_hkhz;
    double log_ratio;
    double weight = 1.0;
    /// True when the weight is an inverse variance from supplied uncertainties.
    bool inverse_variance = false;
};

struct CrooksFitResult {
    double beta_est;
    double beta_delta_f_est;
    double delta_f_est;  ///< crossing point P^F(W) = P^B(-W), h*kHz
    double stderr_slope;
    double stderr_intercept;
    double max_abs_residual;
    std::vector<LogRatioPoint> points_used;

    [[nodiscard]] double slope() const noexcept { return beta_est; }
    [[nodiscard]] double intercept() const noexcept { return -beta_delta_f_est; }
};

enum class FitMode { per_tau, pooled };

/// Pairs forward peaks at +W with backward peaks at -W. With inner_only the
/// pairs are restricted to the smallest |W| (the +-(nu_tau - nu0) peaks).
/// Peaks sharing a work value are merged first.
/// Throws SupportError on unmatched peaks, DomainError on probabilities <= 1e-12.
[[nodiscard]] std::vector<LogRatioPoint> log_ratio_points(const WorkDistribution& forward,
                                                          const WorkDistribution& backward,
                                                          bool inner_only = true);

/// Straight-line fit of one point set. Throws DegenerateFitError when fewer
/// than two distinct work values are present.
[[nodiscard]] CrooksFitResult fit_line(std::span<const LogRatioPoint> points);

/// per_tau: one fit per group. pooled: a single line shared by all groups.
[[nodiscard]] std::vector<CrooksFitResult> fit_line(
    std::span<const std::vector<LogRatioPoint>> groups, FitMode mode);

}  // namespace qarrow
