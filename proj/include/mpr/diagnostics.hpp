#ifndef MPR_DIAGNOSTICS_HPP
#define MPR_DIAGNOSTICS_HPP

#include <Eigen/Dense>

#include "mpr/errors.hpp"

namespace mpr {

// Product-limit estimate over the distinct event times, with Greenwood
// variance and a log-transformed 95% CI for the cumulative hazard.
struct KMCurve {
    Eigen::VectorXd time;       // distinct event times, ascending
    Eigen::VectorXd survival;   // S(t_k)
    Eigen::VectorXd var_survival;  // Greenwood
    Eigen::VectorXd cumhaz;     // H(t_k) = -log S(t_k)
    Eigen::VectorXd ci_lo, ci_hi;  // CI bounds for H
};

KMCurve kaplan_meier(const Eigen::VectorXd& t, const Eigen::VectorXd& delta);

// log H(t) against log t should be a straight line under a Weibull baseline:
// slope estimates the shape, intercept the log scale.
struct WeibullCheck {
    Eigen::VectorXd log_t, log_cumhaz;
    Eigen::VectorXd ci_lo, ci_hi;  // CI bounds for log H
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

WeibullCheck weibull_check_points(const KMCurve& curve);

} // namespace mpr

#endif
