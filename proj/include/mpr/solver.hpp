#ifndef MPR_SOLVER_HPP
#define MPR_SOLVER_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mpr/data_model.hpp"
#include "mpr/likelihood.hpp"
#include "mpr/penalty.hpp"

namespace mpr {

struct SolverConfig {
    int max_iter = 100;
    double conv_tol = 1e-6;       // sup-norm threshold on the parameter change
    int max_step_halvings = 20;
    double ridge_boost = 1e-8;    // diagonal inflation on factorization failure
    double ridge_max = 1e-2;      // escalation cap (x10 steps), then SingularSystem
};

struct FitResult {
    ThetaVector theta_hat;
    bool converged = false;
    int n_iter = 0;
    double loglik = 0.0;            // unpenalized l at theta_hat
    double penalized_loglik = 0.0;  // l_lambda at theta_hat
    std::optional<Eigen::MatrixXd> covariance;  // sandwich, (p+q+2)^2
    std::optional<double> effective_df;
    std::vector<bool> selected_mask;  // |theta_j| >= zero_tol, (beta, alpha) order
    double final_step_supnorm = 0.0;
    double grad_supnorm = 0.0;  // penalized score at theta_hat, diagnostics only
    std::vector<double> penalized_loglik_trace;  // l_lambda at each accepted iterate
};

// Maximizes l_lambda(theta) = l(theta) - n * sum J by Newton-Raphson on the
// system I_lambda * step = penalized score, with step halving so accepted
// iterates never decrease l_lambda. Data must already be standardized when a
// penalty is active.
FitResult fit_penalized(const SurvivalDataset& data, const PenaltySpec& penalty,
                        const LambdaVector& lambda, const ThetaVector& init,
                        const SolverConfig& config = {});

// Unpenalized maximum likelihood. Default init: beta0 = log(sum delta / sum t)
// (the exponential-model moment estimate), all other coefficients 0.
FitResult fit_unpenalized(const SurvivalDataset& data,
                          const std::optional<ThetaVector>& init = std::nullopt,
                          const SolverConfig& config = {});

// cov(theta_hat) = I_lambda^{-1} I_0 I_lambda^{-1}, symmetrized.
Eigen::MatrixXd sandwich_covariance(const ThetaVector& theta_hat,
                                    const SurvivalDataset& data,
                                    const PenaltySpec& penalty,
                                    const LambdaVector& lambda);

// e_lambda = tr[I_lambda^{-1} I_0], one linear solve per column of I_0.
double effective_df(const ThetaVector& theta_hat, const SurvivalDataset& data,
                    const PenaltySpec& penalty, const LambdaVector& lambda);

// Partial traces of I_lambda^{-1} I_0 over the beta rows and the alpha rows;
// the two add up to effective_df.
std::pair<double, double> effective_df_split(const ThetaVector& theta_hat,
                                             const SurvivalDataset& data,
                                             const PenaltySpec& penalty,
                                             const LambdaVector& lambda);

} // namespace mpr

#endif
