#include "mpr/selection.hpp"

#include <cmath>
#include <limits>

#include "mpr/rng.hpp"

namespace mpr {

void DEConfig::check(int dim) const {
    if (dim < 1)
        throw MprError(ErrorCode::InvalidConfig, "DE dimension must be >= 1");
    if (!(diff_weight > 0.0 && diff_weight < 2.0))
        throw MprError(ErrorCode::InvalidConfig, "DE F must be in (0, 2)");
    if (!(crossover_rate > 0.0 && crossover_rate <= 1.0))
        throw MprError(ErrorCode::InvalidConfig, "DE CR must be in (0, 1]");
    if (population_size != 0 && population_size < 4)
        throw MprError(ErrorCode::InvalidConfig, "DE population must be >= 4");
    if (generations_max < 1 || stagnation_patience < 0)
        throw MprError(ErrorCode::InvalidConfig,
                       "DE generation and patience settings must be positive");
    if (!bounds.empty() && static_cast<int>(bounds.size()) != dim)
        throw MprError(ErrorCode::InvalidConfig, "DE bounds do not match dimension");
    for (const auto& [lo, hi] : bounds) {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw MprError(ErrorCode::InvalidConfig, "DE bounds must be finite with lo < hi");
    }
}

DEResult de_minimize(const std::function<double(const std::vector<double>&)>& objective,
                     int dim, const DEConfig& config) {
    config.check(dim);
    const int np = config.population_size > 0 ? config.population_size : 10 * dim;
    const int patience = config.stagnation_patience > 0
                             ? config.stagnation_patience
                             : 10 * dim;
    std::vector<std::pair<double, double>> bounds = config.bounds;
    if (bounds.empty()) bounds.assign(dim, {0.0, 1.0});

    Rng rng(config.rng_seed);
    auto clip = [&](double v, int j) {
        return std::min(std::max(v, bounds[j].first), bounds[j].second);
    };

    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    std::vector<double> value(np);
    DEResult result;

    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < dim; ++j)
            pop[i][j] = bounds[j].first +
                        rng.uniform() * (bounds[j].second - bounds[j].first);
        value[i] = objective(pop[i]);
        ++result.n_evaluations;
    }

    auto best_index = [&] {
        int best = 0;
        for (int i = 1; i < np; ++i)
            if (value[i] < value[best]) best = i;
        return best;
    };
    double best_value = value[best_index()];
    result.trace.push_back(best_value);

    int stagnant = 0;
    std::vector<double> trial(dim);
    for (int gen = 0; gen < config.generations_max; ++gen) {
        for (int i = 0; i < np; ++i) {
            int r1, r2, r3;
            do { r1 = static_cast<int>(rng.uniform_int(np)); } while (r1 == i);
            do { r2 = static_cast<int>(rng.uniform_int(np)); } while (r2 == i || r2 == r1);
            do { r3 = static_cast<int>(rng.uniform_int(np)); } while (r3 == i || r3 == r1 || r3 == r2);

            const int j_rand = static_cast<int>(rng.uniform_int(dim));
            for (int j = 0; j < dim; ++j) {
                if (j == j_rand || rng.uniform() < config.crossover_rate) {
                    const double mutant = pop[r1][j] +
                        config.diff_weight * (pop[r2][j] - pop[r3][j]);
                    trial[j] = clip(mutant, j);
                } else {
                    trial[j] = pop[i][j];
                }
            }
            const double trial_value = objective(trial);
            ++result.n_evaluations;
            if (trial_value <= value[i]) {
                pop[i] = trial;
                value[i] = trial_value;
            }
        }

        const double gen_best = value[best_index()];
        if (best_value - gen_best < config.bic_tol)
            ++stagnant;
        else
            stagnant = 0;
        best_value = std::min(best_value, gen_best);
        result.trace.push_back(best_value);
        if (stagnant >= patience) break;
    }

    const int best = best_index();
    result.argmin = pop[best];
    result.min_value = value[best];
    return result;
}

double bic_objective(const std::vector<double>& scalars,
                     const SurvivalDataset& data, const PenaltySpec& penalty,
                     const ThetaVector& init_theta, const SolverConfig& config,
                     long* n_fits) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    try {
        const LambdaVector lambda = expand_lambda(scalars, penalty, data.p(), data.q());
        const FitResult fit = fit_penalized(data, penalty, lambda, init_theta, config);
        if (n_fits) ++*n_fits;
        if (!fit.converged || !fit.effective_df) return inf;
        const double bic = -2.0 * fit.loglik +
                           *fit.effective_df * std::log(static_cast<double>(data.n()));
        return std::isfinite(bic) ? bic : inf;
    } catch (const MprError&) {
        if (n_fits) ++*n_fits;
        return inf;
    }
}

SelectionResult select_and_fit(const SurvivalDataset& data, PenaltySpec penalty,
                               const SolverConfig& solver_config,
                               const DEConfig& de_config) {
    validate_or_throw(data);
    penalty.check();

    auto [std_data, record] = standardize(data);

    SelectionResult result;
    result.record = record;
    result.unpenalized = fit_unpenalized(std_data, std::nullopt, solver_config);
    if (!result.unpenalized.converged)
        throw MprError(ErrorCode::SingularSystem,
                       "unpenalized fit did not converge");
    const ThetaVector& theta0 = result.unpenalized.theta_hat;

    if (penalty.adaptive() && !penalty.adaptive_weights)
        penalty.adaptive_weights = alasso_weights(theta0);
    result.penalty = penalty;

    const double log_n = std::log(static_cast<double>(data.n()));

    if (penalty.family == PenaltyFamily::None) {
        result.lambda_star.assign(penalty.n_tuning_scalars(), 0.0);
        result.fit = result.unpenalized;
        if (!result.fit.effective_df)
            throw MprError(ErrorCode::SingularSystem,
                           "information matrix singular at the unpenalized fit");
        result.bic_star = -2.0 * result.fit.loglik +
                          *result.fit.effective_df * log_n;
        result.bic_trace = {result.bic_star};
        result.n_inner_fits = 1;
    } else {
        const int dim = penalty.n_tuning_scalars();
        std::vector<std::pair<double, double>> bounds = de_config.bounds;
        if (bounds.empty()) bounds.assign(dim, {0.0, 1.0});
        if (static_cast<int>(bounds.size()) != dim)
            throw MprError(ErrorCode::InvalidConfig,
                           "tuning bounds do not match the number of scalars");

        // Useful lambda values cluster within a few percent of the lower
        // bound, so the search runs on a quartic-warped coordinate u in
        // [0,1], lambda = lo + (hi-lo) u^4; on the raw scale DE/rand/1/bin
        // collapses onto the lambda=0 corner before it can locate that
        // narrow basin.
        const auto warp = [&](const std::vector<double>& u) {
            std::vector<double> lam(u.size());
            for (size_t k = 0; k < u.size(); ++k) {
                const double t = u[k] * u[k] * u[k] * u[k];
                lam[k] = bounds[k].first +
                         (bounds[k].second - bounds[k].first) * t;
            }
            return lam;
        };
        DEConfig warped = de_config;
        warped.bounds.assign(dim, {0.0, 1.0});

        long n_fits = 1;  // the unpenalized fit above
        const auto objective = [&](const std::vector<double>& u) {
            return bic_objective(warp(u), std_data, penalty, theta0,
                                 solver_config, &n_fits);
        };
        const DEResult de = de_minimize(objective, dim, warped);
        if (!std::isfinite(de.min_value))
            throw MprError(ErrorCode::SingularSystem,
                           "no tuning value produced a usable fit");

        result.lambda_star = warp(de.argmin);
        result.bic_star = de.min_value;
        result.bic_trace = de.trace;
        const LambdaVector lambda =
            expand_lambda(result.lambda_star, penalty, data.p(), data.q());
        result.fit = fit_penalized(std_data, penalty, lambda, theta0, solver_config);
        result.n_inner_fits = n_fits + 1;
    }

    result.theta_original = destandardize_theta(result.fit.theta_hat, record);
    if (result.fit.covariance)
        result.cov_original =
            destandardize_covariance(*result.fit.covariance, record);
    return result;
}

} // namespace mpr
