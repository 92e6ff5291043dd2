#include "mpr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace mpr {

KMCurve kaplan_meier(const Eigen::VectorXd& t, const Eigen::VectorXd& delta) {
    const Eigen::Index n = t.size();
    if (delta.size() != n || n == 0)
        throw MprError(ErrorCode::DimensionMismatch, "t and delta sizes differ");
    if (delta.sum() < 1.0)
        throw MprError(ErrorCode::NoEvents, "no events for the Kaplan-Meier estimate");

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return t[a] < t[b]; });

    std::vector<double> times, survival, greenwood;
    double s = 1.0;
    double g = 0.0;  // running sum d / (r (r - d))
    Eigen::Index i = 0;
    while (i < n) {
        const double now = t[order[i]];
        const double at_risk = static_cast<double>(n - i);
        double events = 0.0;
        while (i < n && t[order[i]] == now) {
            events += delta[order[i]];
            ++i;
        }
        if (events == 0.0) continue;  // censoring-only time point
        s *= 1.0 - events / at_risk;
        g = (at_risk > events)
                ? g + events / (at_risk * (at_risk - events))
                : std::numeric_limits<double>::infinity();
        times.push_back(now);
        survival.push_back(s);
        greenwood.push_back(g);
    }

    const Eigen::Index k = static_cast<Eigen::Index>(times.size());
    KMCurve curve;
    curve.time = Eigen::Map<Eigen::VectorXd>(times.data(), k);
    curve.survival = Eigen::Map<Eigen::VectorXd>(survival.data(), k);
    curve.var_survival.resize(k);
    curve.cumhaz.resize(k);
    curve.ci_lo.resize(k);
    curve.ci_hi.resize(k);
    constexpr double z = 1.959963984540054;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double sj = curve.survival[j];
        const double gj = greenwood[j];
        curve.var_survival[j] = sj * sj * gj;
        const double h = -std::log(sj);
        curve.cumhaz[j] = h;
        if (sj > 0.0 && h > 0.0 && std::isfinite(gj)) {
            // symmetric interval on log H: var(H) = g, se(log H) = sqrt(g)/H
            const double spread = z * std::sqrt(gj) / h;
            curve.ci_lo[j] = h * std::exp(-spread);
            curve.ci_hi[j] = h * std::exp(spread);
        } else {
            curve.ci_lo[j] = curve.ci_hi[j] =
                std::numeric_limits<double>::quiet_NaN();
        }
    }
    return curve;
}

WeibullCheck weibull_check_points(const KMCurve& curve) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < curve.time.size(); ++j) {
        const double s = curve.survival[j];
        if (s > 0.0 && s < 1.0 && curve.cumhaz[j] > 0.0) keep.push_back(j);
    }
    const Eigen::Index k = static_cast<Eigen::Index>(keep.size());
    if (k < 2)
        throw MprError(ErrorCode::TooFewPoints,
                       "need at least two usable Kaplan-Meier points");

    WeibullCheck check;
    check.log_t.resize(k);
    check.log_cumhaz.resize(k);
    check.ci_lo.resize(k);
    check.ci_hi.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index src = keep[j];
        check.log_t[j] = std::log(curve.time[src]);
        check.log_cumhaz[j] = std::log(curve.cumhaz[src]);
        check.ci_lo[j] = std::log(curve.ci_lo[src]);
        check.ci_hi[j] = std::log(curve.ci_hi[src]);
    }

    const double x_mean = check.log_t.mean();
    const double y_mean = check.log_cumhaz.mean();
    const Eigen::VectorXd xc = check.log_t.array() - x_mean;
    const Eigen::VectorXd yc = check.log_cumhaz.array() - y_mean;
    const double sxx = xc.squaredNorm();
    if (sxx == 0.0)
        throw MprError(ErrorCode::TooFewPoints, "all event times coincide");
    check.slope = xc.dot(yc) / sxx;
    check.intercept = y_mean - check.slope * x_mean;
    const double ss_res = (yc - check.slope * xc).squaredNorm();
    const double ss_tot = yc.squaredNorm();
    check.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return check;
}

} // namespace mpr
