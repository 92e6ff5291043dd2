#include "mpr/likelihood.hpp"

#include <cmath>

namespace mpr {

bool update_workspace(const ThetaVector& theta, const SurvivalDataset& data,
                      LikelihoodWorkspace& ws) {
    const Eigen::Index n = data.n();
    if (theta.beta.size() != data.X.cols() || theta.alpha.size() != data.Z.cols())
        throw MprError(ErrorCode::DimensionMismatch,
                       "theta does not match the design matrices");
    if (ws.log_t.size() != n) ws.resize(n);
    ws.log_t = data.t.array().log();

    const Eigen::VectorXd eta_beta = data.X * theta.beta;    // log tau
    const Eigen::VectorXd eta_alpha = data.Z * theta.alpha;  // log gamma

    double loglik = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double log_t = ws.log_t[i];
        const double tau = std::exp(eta_beta[i]);
        const double gamma = std::exp(eta_alpha[i]);
        // t^gamma computed as exp(gamma * log t); t > 0 by validation
        const double weib = std::exp(eta_beta[i] + gamma * log_t);
        if (!std::isfinite(tau) || !std::isfinite(gamma) || !std::isfinite(weib))
            return false;

        ws.tau[i] = tau;
        ws.gamma[i] = gamma;
        ws.weib[i] = weib;

        const double delta = data.delta[i];
        loglik += delta * (eta_beta[i] + eta_alpha[i] + (gamma - 1.0) * log_t) - weib;

        const double glt = gamma * log_t;
        ws.u_beta[i] = delta - weib;
        ws.u_alpha[i] = delta * (1.0 + glt) - weib * glt;
        ws.w_beta[i] = weib;
        ws.w_alpha[i] = (weib * (glt + 1.0) - delta) * glt;
        ws.w_alphabeta[i] = weib * glt;
    }
    if (!std::isfinite(loglik)) return false;
    ws.loglik = loglik;
    return true;
}

Eigen::VectorXd score_from_workspace(const SurvivalDataset& data,
                                     const LikelihoodWorkspace& ws) {
    Eigen::VectorXd g(data.X.cols() + data.Z.cols());
    g.head(data.X.cols()) = data.X.transpose() * ws.u_beta;
    g.tail(data.Z.cols()) = data.Z.transpose() * ws.u_alpha;
    return g;
}

Eigen::MatrixXd information_from_workspace(const SurvivalDataset& data,
                                           const LikelihoodWorkspace& ws) {
    const Eigen::Index nb = data.X.cols();
    const Eigen::Index na = data.Z.cols();
    Eigen::MatrixXd info(nb + na, nb + na);
    // diagonal blocks are symmetrized so the result is symmetric bit for bit
    const Eigen::MatrixXd bb =
        data.X.transpose() * ws.w_beta.asDiagonal() * data.X;
    const Eigen::MatrixXd aa =
        data.Z.transpose() * ws.w_alpha.asDiagonal() * data.Z;
    info.topLeftCorner(nb, nb) = 0.5 * (bb + bb.transpose());
    info.bottomRightCorner(na, na) = 0.5 * (aa + aa.transpose());
    const Eigen::MatrixXd cross =
        data.X.transpose() * ws.w_alphabeta.asDiagonal() * data.Z;
    info.topRightCorner(nb, na) = cross;
    info.bottomLeftCorner(na, nb) = cross.transpose();
    return info;
}

double log_likelihood(const ThetaVector& theta, const SurvivalDataset& data) {
    LikelihoodWorkspace ws;
    if (!update_workspace(theta, data, ws))
        throw MprError(ErrorCode::NonFiniteResult,
                       "log-likelihood overflowed at this theta");
    return ws.loglik;
}

Eigen::VectorXd score(const ThetaVector& theta, const SurvivalDataset& data) {
    LikelihoodWorkspace ws;
    if (!update_workspace(theta, data, ws))
        throw MprError(ErrorCode::NonFiniteResult,
                       "score overflowed at this theta");
    return score_from_workspace(data, ws);
}

Eigen::MatrixXd observed_information(const ThetaVector& theta,
                                     const SurvivalDataset& data) {
    LikelihoodWorkspace ws;
    if (!update_workspace(theta, data, ws))
        throw MprError(ErrorCode::NonFiniteResult,
                       "observed information overflowed at this theta");
    return information_from_workspace(data, ws);
}

double cumulative_hazard(const ThetaVector& theta, double t,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    if (x.size() != theta.beta.size() || z.size() != theta.alpha.size())
        throw MprError(ErrorCode::DimensionMismatch,
                       "covariate rows do not match theta");
    if (t == 0.0) return 0.0;
    const double gamma = std::exp(z.dot(theta.alpha));
    return std::exp(x.dot(theta.beta) + gamma * std::log(t));
}

} // namespace mpr
