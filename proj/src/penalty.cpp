#include "mpr/penalty.hpp"

#include <cmath>

namespace mpr {

const char* penalty_family_name(PenaltyFamily family) {
    switch (family) {
        case PenaltyFamily::None: return "none";
        case PenaltyFamily::Lasso: return "lasso";
        case PenaltyFamily::Scad: return "scad";
        case PenaltyFamily::Alasso: return "alasso";
    }
    return "?";
}

const char* tuning_mode_name(TuningMode mode) {
    switch (mode) {
        case TuningMode::Single: return "single";
        case TuningMode::SingleAdaptive: return "single-adaptive";
        case TuningMode::SeparateNonAdaptive: return "separate";
        case TuningMode::SeparateAdaptive: return "separate-adaptive";
    }
    return "?";
}

void PenaltySpec::check() const {
    if (!(scad_a > 2.0))
        throw MprError(ErrorCode::InvalidConfig, "scad_a must be > 2");
    if (!(epsilon > 0.0))
        throw MprError(ErrorCode::InvalidConfig, "epsilon must be > 0");
    if (!(zero_tol > 0.0))
        throw MprError(ErrorCode::InvalidConfig, "zero_tol must be > 0");
    const bool adaptive_mode = adaptive();
    if (family == PenaltyFamily::Alasso && !adaptive_mode)
        throw MprError(ErrorCode::InvalidConfig,
                       "alasso requires an adaptive tuning mode");
    if (adaptive_mode && family != PenaltyFamily::Alasso)
        throw MprError(ErrorCode::InvalidConfig,
                       "adaptive tuning modes require the alasso family");
}

double smooth_abs(double x, double epsilon) {
    return std::sqrt(x * x + epsilon * epsilon) - epsilon;
}

double smooth_abs_d1(double x, double epsilon) {
    return x / std::sqrt(epsilon * epsilon + x * x);
}

double smooth_abs_d2(double x, double epsilon) {
    const double s = epsilon * epsilon + x * x;
    return epsilon * epsilon / (s * std::sqrt(s));
}

namespace {

// Raw penalty P(u) on u = a(theta) >= 0 and its derivatives in u. The SCAD
// branch tests use u itself, keeping J twice continuously differentiable.
struct RawPenalty {
    double value, d1, d2;
};

RawPenalty raw_penalty(PenaltyFamily family, double lambda, double u, double a) {
    switch (family) {
        case PenaltyFamily::None:
            return {0.0, 0.0, 0.0};
        case PenaltyFamily::Lasso:
        case PenaltyFamily::Alasso:
            // adaptive weights are already folded into lambda
            return {lambda * u, lambda, 0.0};
        case PenaltyFamily::Scad: {
            if (u <= lambda)
                return {lambda * u, lambda, 0.0};
            if (u < a * lambda) {
                const double denom = 2.0 * (a - 1.0);
                return {(2.0 * a * lambda * u - u * u - lambda * lambda) / denom,
                        (a * lambda - u) / (a - 1.0), -1.0 / (a - 1.0)};
            }
            return {lambda * lambda * (a + 1.0) / 2.0, 0.0, 0.0};
        }
    }
    return {0.0, 0.0, 0.0};
}

} // namespace

double penalty_value(PenaltyFamily family, double lambda_j, double theta_j,
                     const PenaltySpec& spec) {
    if (family == PenaltyFamily::None || lambda_j == 0.0) return 0.0;
    const double u = smooth_abs(theta_j, spec.epsilon);
    return raw_penalty(family, lambda_j, u, spec.scad_a).value;
}

double penalty_grad(PenaltyFamily family, double lambda_j, double theta_j,
                    const PenaltySpec& spec) {
    if (family == PenaltyFamily::None || lambda_j == 0.0) return 0.0;
    const double u = smooth_abs(theta_j, spec.epsilon);
    const RawPenalty raw = raw_penalty(family, lambda_j, u, spec.scad_a);
    return raw.d1 * smooth_abs_d1(theta_j, spec.epsilon);
}

double penalty_hess(PenaltyFamily family, double lambda_j, double theta_j,
                    const PenaltySpec& spec) {
    if (family == PenaltyFamily::None || lambda_j == 0.0) return 0.0;
    const double u = smooth_abs(theta_j, spec.epsilon);
    const RawPenalty raw = raw_penalty(family, lambda_j, u, spec.scad_a);
    const double d1 = smooth_abs_d1(theta_j, spec.epsilon);
    const double d2 = smooth_abs_d2(theta_j, spec.epsilon);
    return raw.d2 * d1 * d1 + raw.d1 * d2;
}

LambdaVector expand_lambda(const std::vector<double>& scalars,
                           const PenaltySpec& spec,
                           Eigen::Index p, Eigen::Index q) {
    const int want = spec.n_tuning_scalars();
    if (static_cast<int>(scalars.size()) != want)
        throw MprError(ErrorCode::WrongScalarCount,
                       "mode " + std::string(tuning_mode_name(spec.tuning_mode)) +
                           " takes " + std::to_string(want) + " scalar(s), got " +
                           std::to_string(scalars.size()));
    for (double s : scalars)
        if (!(s >= 0.0))
            throw MprError(ErrorCode::InvalidConfig, "tuning scalars must be >= 0");

    const AdaptiveWeights* weights = nullptr;
    if (spec.adaptive()) {
        if (!spec.adaptive_weights)
            throw MprError(ErrorCode::MissingAdaptiveWeights,
                           "adaptive tuning mode without weights");
        weights = &*spec.adaptive_weights;
        if (weights->beta.size() != p + 1 || weights->alpha.size() != q + 1)
            throw MprError(ErrorCode::DimensionMismatch,
                           "adaptive weights do not match (p, q)");
    }

    const double lam_beta = scalars[0];
    const double lam_alpha = spec.separate() ? scalars[1] : scalars[0];

    LambdaVector out = LambdaVector::zeros(p + 1, q + 1);
    for (Eigen::Index j = 1; j <= p; ++j)
        out.beta[j] = weights ? lam_beta * weights->beta[j] : lam_beta;
    for (Eigen::Index j = 1; j <= q; ++j)
        out.alpha[j] = weights ? lam_alpha * weights->alpha[j] : lam_alpha;
    return out;
}

AdaptiveWeights alasso_weights(const ThetaVector& unpenalized, double cap) {
    AdaptiveWeights w;
    w.beta = Eigen::VectorXd::Zero(unpenalized.beta.size());
    w.alpha = Eigen::VectorXd::Zero(unpenalized.alpha.size());
    const double floor = 1.0 / cap;
    for (Eigen::Index j = 1; j < unpenalized.beta.size(); ++j)
        w.beta[j] = 1.0 / std::max(std::abs(unpenalized.beta[j]), floor);
    for (Eigen::Index j = 1; j < unpenalized.alpha.size(); ++j)
        w.alpha[j] = 1.0 / std::max(std::abs(unpenalized.alpha[j]), floor);
    return w;
}

PenaltyTerms assemble_penalty_terms(const ThetaVector& theta,
                                    const LambdaVector& lambda,
                                    const PenaltySpec& spec) {
    if (lambda.beta.size() != theta.beta.size() ||
        lambda.alpha.size() != theta.alpha.size())
        throw MprError(ErrorCode::DimensionMismatch,
                       "lambda vector does not match theta");

    PenaltyTerms terms;
    terms.v_beta = Eigen::VectorXd::Zero(theta.beta.size());
    terms.v_alpha = Eigen::VectorXd::Zero(theta.alpha.size());
    terms.sigma_beta = Eigen::VectorXd::Zero(theta.beta.size());
    terms.sigma_alpha = Eigen::VectorXd::Zero(theta.alpha.size());

    for (Eigen::Index j = 1; j < theta.beta.size(); ++j) {
        terms.total += penalty_value(spec.family, lambda.beta[j], theta.beta[j], spec);
        terms.v_beta[j] = penalty_grad(spec.family, lambda.beta[j], theta.beta[j], spec);
        terms.sigma_beta[j] = penalty_hess(spec.family, lambda.beta[j], theta.beta[j], spec);
    }
    for (Eigen::Index j = 1; j < theta.alpha.size(); ++j) {
        terms.total += penalty_value(spec.family, lambda.alpha[j], theta.alpha[j], spec);
        terms.v_alpha[j] = penalty_grad(spec.family, lambda.alpha[j], theta.alpha[j], spec);
        terms.sigma_alpha[j] = penalty_hess(spec.family, lambda.alpha[j], theta.alpha[j], spec);
    }
    return terms;
}

} // namespace mpr
