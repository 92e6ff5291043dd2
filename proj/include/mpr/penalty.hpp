#ifndef MPR_PENALTY_HPP
#define MPR_PENALTY_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mpr/data_model.hpp"

namespace mpr {

enum class PenaltyFamily { None, Lasso, Scad, Alasso };

// How the tuning scalar(s) expand to per-coefficient lambdas:
//   Single              lambda_beta_j = lambda_alpha_j = lambda
//   SingleAdaptive      lambda * w_j (ALASSO weights)
//   SeparateNonAdaptive (lambda_beta, lambda_alpha) per component
//   SeparateAdaptive    component scalars times ALASSO weights
enum class TuningMode { Single, SingleAdaptive, SeparateNonAdaptive, SeparateAdaptive };

const char* penalty_family_name(PenaltyFamily family);
const char* tuning_mode_name(TuningMode mode);

struct AdaptiveWeights {
    Eigen::VectorXd beta;   // length p+1, entry 0 ignored
    Eigen::VectorXd alpha;  // length q+1, entry 0 ignored
};

struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::None;
    TuningMode tuning_mode = TuningMode::Single;
    double scad_a = 3.7;
    double epsilon = 1e-4;   // smoothing of |x|
    double zero_tol = 1e-3;  // |theta_j| below this counts as selected-out
    std::optional<AdaptiveWeights> adaptive_weights;

    bool adaptive() const {
        return tuning_mode == TuningMode::SingleAdaptive ||
               tuning_mode == TuningMode::SeparateAdaptive;
    }
    bool separate() const {
        return tuning_mode == TuningMode::SeparateNonAdaptive ||
               tuning_mode == TuningMode::SeparateAdaptive;
    }
    int n_tuning_scalars() const { return separate() ? 2 : 1; }

    void check() const;  // throws InvalidConfig on inconsistent settings
};

// Per-coefficient tuning values; intercept entries are identically zero.
struct LambdaVector {
    Eigen::VectorXd beta;   // length p+1
    Eigen::VectorXd alpha;  // length q+1

    static LambdaVector zeros(Eigen::Index n_beta, Eigen::Index n_alpha) {
        return {Eigen::VectorXd::Zero(n_beta), Eigen::VectorXd::Zero(n_alpha)};
    }
};

// Smoothed absolute value a(x) = sqrt(x^2 + eps^2) - eps and derivatives.
double smooth_abs(double x, double epsilon);
double smooth_abs_d1(double x, double epsilon);
double smooth_abs_d2(double x, double epsilon);

// Penalty J_lambda(theta_j) with |.| replaced by the smoothed a(.), plus its
// first and second derivatives in theta_j.
double penalty_value(PenaltyFamily family, double lambda_j, double theta_j,
                     const PenaltySpec& spec);
double penalty_grad(PenaltyFamily family, double lambda_j, double theta_j,
                    const PenaltySpec& spec);
double penalty_hess(PenaltyFamily family, double lambda_j, double theta_j,
                    const PenaltySpec& spec);

// Expands 1 (Single*) or 2 (Separate*) tuning scalars into per-coefficient
// lambdas according to the tuning mode.
LambdaVector expand_lambda(const std::vector<double>& scalars,
                           const PenaltySpec& spec,
                           Eigen::Index p, Eigen::Index q);

// ALASSO weights w_j = 1 / |theta0_j| from an unpenalized fit, capped so a
// zero estimate yields weight `cap` instead of infinity. Intercepts get 0.
AdaptiveWeights alasso_weights(const ThetaVector& unpenalized, double cap = 1e6);

// Gradient vector V, curvature diagonal Sigma and total penalty value for
// the whole coefficient vector; these enter the penalized score and the
// Newton system as -n*V and +n*diag(Sigma).
struct PenaltyTerms {
    Eigen::VectorXd v_beta, v_alpha;
    Eigen::VectorXd sigma_beta, sigma_alpha;
    double total = 0.0;
};

PenaltyTerms assemble_penalty_terms(const ThetaVector& theta,
                                    const LambdaVector& lambda,
                                    const PenaltySpec& spec);

} // namespace mpr

#endif
