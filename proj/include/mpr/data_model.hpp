#ifndef MPR_DATA_MODEL_HPP
#define MPR_DATA_MODEL_HPP

#include <Eigen/Dense>
#include <string>

#include "mpr/errors.hpp"

namespace mpr {

// Right-censored survival data with separate design matrices for the
// Weibull scale (X) and shape (Z) regressions. Column 0 of each design
// matrix is the intercept (all ones).
struct SurvivalDataset {
    Eigen::VectorXd t;      // observed times, all > 0
    Eigen::VectorXd delta;  // censoring indicator, 0 = censored, 1 = event
    Eigen::MatrixXd X;      // n x (p+1)
    Eigen::MatrixXd Z;      // n x (q+1)

    Eigen::Index n() const { return t.size(); }
    Eigen::Index p() const { return X.cols() - 1; }
    Eigen::Index q() const { return Z.cols() - 1; }
};

// Regression coefficients: beta for the scale, alpha for the shape, each
// with its intercept at index 0. Flattening order is (beta, alpha)
// everywhere gradients and Hessians are laid out.
struct ThetaVector {
    Eigen::VectorXd beta;   // length p+1
    Eigen::VectorXd alpha;  // length q+1

    Eigen::Index dim() const { return beta.size() + alpha.size(); }

    Eigen::VectorXd flatten() const {
        Eigen::VectorXd out(dim());
        out << beta, alpha;
        return out;
    }

    static ThetaVector unflatten(const Eigen::VectorXd& v,
                                 Eigen::Index n_beta, Eigen::Index n_alpha) {
        if (v.size() != n_beta + n_alpha)
            throw MprError(ErrorCode::DimensionMismatch,
                           "flattened theta has wrong length");
        return ThetaVector{v.head(n_beta), v.tail(n_alpha)};
    }

    static ThetaVector zeros(Eigen::Index n_beta, Eigen::Index n_alpha) {
        return ThetaVector{Eigen::VectorXd::Zero(n_beta),
                           Eigen::VectorXd::Zero(n_alpha)};
    }

    bool all_finite() const {
        return beta.allFinite() && alpha.allFinite();
    }
};

// Per-column mean/sd of the non-intercept columns, recorded when a dataset
// is standardized so that estimates can be mapped back.
struct StandardizationRecord {
    Eigen::VectorXd x_mean, x_sd;  // length p
    Eigen::VectorXd z_mean, z_sd;  // length q
    bool applied = false;
};

struct ValidationResult {
    ErrorCode code = ErrorCode::Ok;
    std::string message;
    bool ok() const { return code == ErrorCode::Ok; }
};

ValidationResult validate(const SurvivalDataset& data);
void validate_or_throw(const SurvivalDataset& data);

// Centers and scales every non-intercept column of X and Z to sample mean 0
// and sample sd 1 (denominator n-1). Intercept columns are untouched.
std::pair<SurvivalDataset, StandardizationRecord>
standardize(const SurvivalDataset& data);

// Maps coefficients fitted on the standardized scale back to the original
// covariate scale, preserving all linear predictors.
ThetaVector destandardize_theta(const ThetaVector& theta,
                                const StandardizationRecord& record);

// The destandardization is linear, theta_orig = A * theta_std; this returns A
// (block diagonal over the beta and alpha blocks) so covariances can be
// mapped as A * cov * A^T.
Eigen::MatrixXd destandardize_matrix(const StandardizationRecord& record);

Eigen::MatrixXd destandardize_covariance(const Eigen::MatrixXd& cov,
                                         const StandardizationRecord& record);

} // namespace mpr

#endif
