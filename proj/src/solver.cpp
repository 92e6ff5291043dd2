#include "mpr/solver.hpp"

#include <cmath>
#include <limits>

namespace mpr {

namespace {

Eigen::MatrixXd penalized_information(const Eigen::MatrixXd& info0,
                                      const PenaltyTerms& terms, double n) {
    Eigen::MatrixXd out = info0;
    const Eigen::Index nb = terms.sigma_beta.size();
    for (Eigen::Index j = 0; j < nb; ++j)
        out(j, j) += n * terms.sigma_beta[j];
    for (Eigen::Index j = 0; j < terms.sigma_alpha.size(); ++j)
        out(nb + j, nb + j) += n * terms.sigma_alpha[j];
    return out;
}

// Newton system matrix: SCAD's middle branch carries negative curvature that
// can make I_lambda indefinite far from the optimum, turning the Newton
// direction into a descent direction no line search can rescue. Truncating
// the penalty curvature at zero keeps the system matrix positive definite;
// the fixed point is unchanged (the right-hand side still uses the exact
// score) and BIC df / sandwich covariance use the exact I_lambda.
Eigen::MatrixXd newton_system_matrix(const Eigen::MatrixXd& info0,
                                     const PenaltyTerms& terms, double n) {
    Eigen::MatrixXd out = info0;
    const Eigen::Index nb = terms.sigma_beta.size();
    for (Eigen::Index j = 0; j < nb; ++j)
        out(j, j) += n * std::max(terms.sigma_beta[j], 0.0);
    for (Eigen::Index j = 0; j < terms.sigma_alpha.size(); ++j)
        out(nb + j, nb + j) += n * std::max(terms.sigma_alpha[j], 0.0);
    return out;
}

Eigen::VectorXd penalized_score(const SurvivalDataset& data,
                                const LikelihoodWorkspace& ws,
                                const PenaltyTerms& terms) {
    Eigen::VectorXd g = score_from_workspace(data, ws);
    const double n = static_cast<double>(data.n());
    g.head(terms.v_beta.size()) -= n * terms.v_beta;
    g.tail(terms.v_alpha.size()) -= n * terms.v_alpha;
    return g;
}

bool try_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
               Eigen::VectorXd& x) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) return false;
    x = ldlt.solve(b);
    if (!x.allFinite()) return false;
    const double resid = (a * x - b).norm();
    return resid <= 1e-6 * (b.norm() + 1.0);
}

// LDLT with diagonal ridge escalation on failure.
Eigen::VectorXd solve_with_ridge(const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& b,
                                 const SolverConfig& config) {
    Eigen::VectorXd x;
    if (try_solve(a, b, x)) return x;
    const Eigen::MatrixXd eye =
        Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (double ridge = config.ridge_boost; ridge <= config.ridge_max;
         ridge *= 10.0) {
        if (try_solve(a + ridge * eye, b, x)) return x;
    }
    throw MprError(ErrorCode::SingularSystem,
                   "Newton system not solvable even with ridge inflation");
}

Eigen::LDLT<Eigen::MatrixXd> factorize_or_throw(const Eigen::MatrixXd& a) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw MprError(ErrorCode::SingularSystem,
                       "penalized information is not positive definite");
    return ldlt;
}

std::vector<bool> selection_mask(const ThetaVector& theta, double zero_tol) {
    const Eigen::VectorXd flat = theta.flatten();
    std::vector<bool> mask(flat.size());
    for (Eigen::Index j = 0; j < flat.size(); ++j)
        mask[j] = std::abs(flat[j]) >= zero_tol;
    return mask;
}

} // namespace

FitResult fit_penalized(const SurvivalDataset& data, const PenaltySpec& penalty,
                        const LambdaVector& lambda, const ThetaVector& init,
                        const SolverConfig& config) {
    if (!init.all_finite())
        throw MprError(ErrorCode::NonFiniteResult, "initial theta is not finite");

    const double n = static_cast<double>(data.n());
    LikelihoodWorkspace ws;
    ThetaVector theta = init;
    if (!update_workspace(theta, data, ws))
        throw MprError(ErrorCode::NonFiniteResult,
                       "likelihood overflows at the initial theta");
    PenaltyTerms terms = assemble_penalty_terms(theta, lambda, penalty);
    double pen_ll = ws.loglik - n * terms.total;

    FitResult result;
    result.converged = false;
    result.penalized_loglik_trace.push_back(pen_ll);

    LikelihoodWorkspace trial_ws;
    int iter = 0;
    for (; iter < config.max_iter; ++iter) {
        const Eigen::VectorXd grad = penalized_score(data, ws, terms);
        const Eigen::MatrixXd info_l =
            newton_system_matrix(information_from_workspace(data, ws), terms, n);
        const Eigen::VectorXd direction = solve_with_ridge(info_l, grad, config);

        // step halving: accept the first scale that does not decrease l_lambda
        double scale = 1.0;
        bool accepted = false;
        ThetaVector trial;
        PenaltyTerms trial_terms;
        double trial_pen_ll = 0.0;
        for (int h = 0; h <= config.max_step_halvings; ++h, scale *= 0.5) {
            trial.beta = theta.beta + scale * direction.head(theta.beta.size());
            trial.alpha = theta.alpha + scale * direction.tail(theta.alpha.size());
            if (!update_workspace(trial, data, trial_ws)) continue;
            trial_terms = assemble_penalty_terms(trial, lambda, penalty);
            trial_pen_ll = trial_ws.loglik - n * trial_terms.total;
            if (trial_pen_ll >= pen_ll - 1e-12) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        const double step_supnorm =
            scale * direction.lpNorm<Eigen::Infinity>();
        theta = trial;
        std::swap(ws, trial_ws);
        terms = trial_terms;
        pen_ll = trial_pen_ll;
        result.penalized_loglik_trace.push_back(pen_ll);
        result.final_step_supnorm = step_supnorm;
        if (step_supnorm < config.conv_tol) {
            result.converged = true;
            ++iter;
            break;
        }
    }

    result.theta_hat = theta;
    result.n_iter = iter;
    result.loglik = ws.loglik;
    result.penalized_loglik = pen_ll;
    result.grad_supnorm =
        penalized_score(data, ws, terms).lpNorm<Eigen::Infinity>();
    result.selected_mask = selection_mask(theta, penalty.zero_tol);
    try {
        result.covariance = sandwich_covariance(theta, data, penalty, lambda);
        result.effective_df = effective_df(theta, data, penalty, lambda);
    } catch (const MprError&) {
        // leave absent; callers treat missing covariance as a failed fit
    }
    return result;
}

FitResult fit_unpenalized(const SurvivalDataset& data,
                          const std::optional<ThetaVector>& init,
                          const SolverConfig& config) {
    PenaltySpec none;
    none.family = PenaltyFamily::None;
    const LambdaVector lambda = LambdaVector::zeros(data.X.cols(), data.Z.cols());
    ThetaVector start = init ? *init
                             : ThetaVector::zeros(data.X.cols(), data.Z.cols());
    if (!init)
        start.beta[0] = std::log(data.delta.sum() / data.t.sum());
    return fit_penalized(data, none, lambda, start, config);
}

Eigen::MatrixXd sandwich_covariance(const ThetaVector& theta_hat,
                                    const SurvivalDataset& data,
                                    const PenaltySpec& penalty,
                                    const LambdaVector& lambda) {
    LikelihoodWorkspace ws;
    if (!update_workspace(theta_hat, data, ws))
        throw MprError(ErrorCode::NonFiniteResult,
                       "likelihood overflows at theta_hat");
    const Eigen::MatrixXd info0 = information_from_workspace(data, ws);
    const PenaltyTerms terms = assemble_penalty_terms(theta_hat, lambda, penalty);
    const Eigen::MatrixXd info_l =
        penalized_information(info0, terms, static_cast<double>(data.n()));

    const auto ldlt = factorize_or_throw(info_l);
    const Eigen::MatrixXd inv =
        ldlt.solve(Eigen::MatrixXd::Identity(info_l.rows(), info_l.cols()));
    Eigen::MatrixXd cov = inv * info0 * inv;
    return 0.5 * (cov + cov.transpose());
}

namespace {

std::pair<double, double> edf_split_impl(const ThetaVector& theta_hat,
                                         const SurvivalDataset& data,
                                         const PenaltySpec& penalty,
                                         const LambdaVector& lambda) {
    const Eigen::Index nb = data.X.cols();
    const Eigen::Index na = data.Z.cols();

    const PenaltyTerms terms = assemble_penalty_terms(theta_hat, lambda, penalty);
    const bool no_curvature = terms.sigma_beta.isZero(0.0) &&
                              terms.sigma_alpha.isZero(0.0);
    if (no_curvature) {
        // I_lambda == I_0, so the trace is the parameter count identically
        return {static_cast<double>(nb), static_cast<double>(na)};
    }

    LikelihoodWorkspace ws;
    if (!update_workspace(theta_hat, data, ws))
        throw MprError(ErrorCode::NonFiniteResult,
                       "likelihood overflows at theta_hat");
    const Eigen::MatrixXd info0 = information_from_workspace(data, ws);
    const Eigen::MatrixXd info_l =
        penalized_information(info0, terms, static_cast<double>(data.n()));

    const auto ldlt = factorize_or_throw(info_l);
    const Eigen::MatrixXd m = ldlt.solve(info0);  // one solve per column
    double trace_beta = 0.0, trace_alpha = 0.0;
    for (Eigen::Index j = 0; j < nb; ++j) trace_beta += m(j, j);
    for (Eigen::Index j = 0; j < na; ++j) trace_alpha += m(nb + j, nb + j);
    return {trace_beta, trace_alpha};
}

} // namespace

double effective_df(const ThetaVector& theta_hat, const SurvivalDataset& data,
                    const PenaltySpec& penalty, const LambdaVector& lambda) {
    const auto [b, a] = edf_split_impl(theta_hat, data, penalty, lambda);
    return b + a;
}

std::pair<double, double> effective_df_split(const ThetaVector& theta_hat,
                                             const SurvivalDataset& data,
                                             const PenaltySpec& penalty,
                                             const LambdaVector& lambda) {
    return edf_split_impl(theta_hat, data, penalty, lambda);
}

} // namespace mpr
