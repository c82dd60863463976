#include "qarrow/crooksfit.hpp"

#include <algorithm>
#include <cmath>

#include "qarrow/errors.hpp"

namespace qarrow {

namespace {

constexpr double kMinProbability = 1e-12;

}  // namespace

std::vector<LogRatioPoint> log_ratio_points(const WorkDistribution& forward,
                                            const WorkDistribution& backward, bool inner_only) {
    if (forward.direction() != Direction::forward || backward.direction() != Direction::backward)
        throw DomainError("log_ratio_points expects a forward and a backward distribution");

    const auto fwd = forward.merged(kPeakMatchTolerance);
    const auto bwd = backward.merged(kPeakMatchTolerance);
    if (fwd.empty()) throw SupportError("forward distribution is empty");

    double inner = std::abs(fwd.front().work_hkhz);
    for (const auto& pk : fwd) inner = std::min(inner, std::abs(pk.work_hkhz));

    std::vector<LogRatioPoint> out;
    for (const auto& f : fwd) {
        if (inner_only && std::abs(f.work_hkhz) > inner + kPeakMatchTolerance) continue;
        const auto b = std::find_if(bwd.begin(), bwd.end(), [&](const WorkPeak& q) {
            return std::abs(q.work_hkhz + f.work_hkhz) <= kPeakMatchTolerance;
        });
        if (b == bwd.end())
            throw SupportError("no backward peak mirrors the forward peak at W = " +
                               std::to_string(f.work_hkhz));
        if (f.probability <= kMinProbability || b->probability <= kMinProbability)
            throw DomainError("log-ratio undefined: peak probability at W = " +
                              std::to_string(f.work_hkhz) + " is not positive");

        LogRatioPoint pt{f.work_hkhz, std::log(f.probability / b->probability)};
        if (f.uncertainty && b->uncertainty) {
            // d(ln p) ~ dp / p
            const double rf = *f.uncertainty / f.probability;
            const double rb = *b->uncertainty / b->probability;
            const double var = rf * rf + rb * rb;
            if (var > 0.0) {
                pt.weight = 1.0 / var;
                pt.inverse_variance = true;
            }
        }
        out.push_back(pt);
    }
    return out;
}

CrooksFitResult fit_line(std::span<const LogRatioPoint> points) {
    if (points.size() < 2) throw DegenerateFitError("a line fit needs at least two points");
    const auto [lo, hi] = std::minmax_element(
        points.begin(), points.end(),
        [](const LogRatioPoint& a, const LogRatioPoint& b) { return a.work_hkhz < b.work_hkhz; });
    if (!(hi->work_hkhz - lo->work_hkhz > kPeakMatchTolerance))
        throw DegenerateFitError("all work values are identical");

    double sw = 0.0, swx = 0.0, swy = 0.0;
    bool absolute = true;
    for (const auto& p : points) {
        sw += p.weight;
        swx += p.weight * p.work_hkhz;
        swy += p.weight * p.log_ratio;
        absolute = absolute && p.inverse_variance;
    }
    const double xm = swx / sw;
    const double ym = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double dx = p.work_hkhz - xm;
        sxx += p.weight * dx * dx;
        sxy += p.weight * dx * (p.log_ratio - ym);
    }
    const double slope = sxy / sxx;
    const double intercept = ym - slope * xm;

    double chi2 = 0.0, max_res = 0.0;
    for (const auto& p : points) {
        const double r = p.log_ratio - (slope * p.work_hkhz + intercept);
        chi2 += p.weight * r * r;
        max_res = std::max(max_res, std::abs(r));
    }
    // Inverse-variance weights give absolute errors; otherwise scale by the
    // residual variance (zero when the line passes through both points).
    const auto n = static_cast<double>(points.size());
    const double scale = absolute ? 1.0 : (n > 2.0 ? chi2 / (n - 2.0) : 0.0);

    CrooksFitResult r{};
    r.beta_est = slope;
    r.beta_delta_f_est = -intercept;
    r.delta_f_est = -intercept / slope;
    r.stderr_slope = std::sqrt(scale / sxx);
    r.stderr_intercept = std::sqrt(scale * (1.0 / sw + xm * xm / sxx));
    r.max_abs_residual = max_res;
    r.points_used.assign(points.begin(), points.end());
    return r;
}

std::vector<CrooksFitResult> fit_line(std::span<const std::vector<LogRatioPoint>> groups,
                                      FitMode mode) {
    std::vector<CrooksFitResult> out;
    if (mode == FitMode::per_tau) {
        out.reserve(groups.size());
        for (const auto& g : groups) out.push_back(fit_line(std::span<const LogRatioPoint>(g)));
        return out;
    }
    std::vector<LogRatioPoint> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    out.push_back(fit_line(std::span<const LogRatioPoint>(all)));
    return out;
}

}  // namespace qarrow
