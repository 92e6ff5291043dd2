#ifndef MPR_LIKELIHOOD_HPP
#define MPR_LIKELIHOOD_HPP

#include <Eigen/Dense>

#include "mpr/data_model.hpp"

namespace mpr {

// Per-subject quantities for the Weibull MPR likelihood, refreshed at each
// theta. weib[i] = tau_i * t_i^{gamma_i} is the cumulative hazard at t_i.
// The score carriers u_* and the information weights w_* feed the Newton
// system: grad = (X^T u_beta, Z^T u_alpha) and the information blocks are
// X^T diag(w_beta) X, X^T diag(w_alphabeta) Z, Z^T diag(w_alpha) Z.
struct LikelihoodWorkspace {
    Eigen::VectorXd log_t;
    Eigen::VectorXd tau, gamma, weib;
    Eigen::VectorXd u_beta, u_alpha;
    Eigen::VectorXd w_beta, w_alpha, w_alphabeta;
    double loglik = 0.0;

    void resize(Eigen::Index n) {
        log_t.resize(n);
        tau.resize(n);
        gamma.resize(n);
        weib.resize(n);
        u_beta.resize(n);
        u_alpha.resize(n);
        w_beta.resize(n);
        w_alpha.resize(n);
        w_alphabeta.resize(n);
    }
};

// Recomputes all per-subject quantities at theta. Returns false when any
// exp/power overflows to a non-finite value; nothing is clamped.
bool update_workspace(const ThetaVector& theta, const SurvivalDataset& data,
                      LikelihoodWorkspace& ws);

Eigen::VectorXd score_from_workspace(const SurvivalDataset& data,
                                     const LikelihoodWorkspace& ws);

Eigen::MatrixXd information_from_workspace(const SurvivalDataset& data,
                                           const LikelihoodWorkspace& ws);

// l(theta) = sum_i delta_i {log tau_i + log gamma_i + (gamma_i - 1) log t_i}
//            - tau_i t_i^{gamma_i}
double log_likelihood(const ThetaVector& theta, const SurvivalDataset& data);

// Gradient of l, laid out as (d/dbeta, d/dalpha), length p+q+2.
Eigen::VectorXd score(const ThetaVector& theta, const SurvivalDataset& data);

// Observed information I0(theta) = -hessian of l; exactly symmetric.
Eigen::MatrixXd observed_information(const ThetaVector& theta,
                                     const SurvivalDataset& data);

// H(t|x,z) = exp(x'beta) * t^{exp(z'alpha)}
double cumulative_hazard(const ThetaVector& theta, double t,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& z);

} // namespace mpr

#endif
