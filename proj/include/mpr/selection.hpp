#ifndef MPR_SELECTION_HPP
#define MPR_SELECTION_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mpr/solver.hpp"

namespace mpr {

struct DEConfig {
    int population_size = 0;   // 0 means 10 * dimension
    int generations_max = 60;
    double diff_weight = 0.8;   // F
    double crossover_rate = 0.9;  // CR
    std::vector<std::pair<double, double>> bounds;  // per scalar; empty -> [0,1]
    double bic_tol = 1e-4;        // stagnation threshold on the best value
    int stagnation_patience = 0;  // improvement-free generations; 0 means 10 * dimension
    std::uint64_t rng_seed = 0;

    void check(int dim) const;
};

struct DEResult {
    std::vector<double> argmin;
    double min_value = 0.0;
    std::vector<double> trace;  // best value per generation, non-increasing
    long n_evaluations = 0;
};

// DE/rand/1/bin minimizer: mutation x_r1 + F (x_r2 - x_r3), binomial
// crossover with at least one mutated coordinate, clipping to bounds,
// greedy selection. Stops at generations_max or once the best value has
// improved by less than bic_tol for stagnation_patience generations in a row.
DEResult de_minimize(const std::function<double(const std::vector<double>&)>& objective,
                     int dim, const DEConfig& config);

// BIC(lambda) = -2 l(theta_hat_lambda) + e_lambda log n, fitted from
// init_theta (the unpenalized estimates). Solver failures and
// non-convergence map to +infinity so the outer search discards them.
double bic_objective(const std::vector<double>& scalars,
                     const SurvivalDataset& data, const PenaltySpec& penalty,
                     const ThetaVector& init_theta, const SolverConfig& config,
                     long* n_fits = nullptr);

struct SelectionResult {
    std::vector<double> lambda_star;
    double bic_star = 0.0;
    FitResult fit;                    // at lambda_star, standardized scale
    ThetaVector theta_original;       // destandardized coefficients
    Eigen::MatrixXd cov_original;     // destandardized sandwich covariance
    StandardizationRecord record;
    FitResult unpenalized;            // theta_hat_0 on the standardized scale
    PenaltySpec penalty;              // with adaptive weights filled in
    std::vector<double> bic_trace;
    long n_inner_fits = 0;
};

// Full nested procedure: standardize, fit unpenalized, derive ALASSO weights
// if needed, DE-minimize BIC over the tuning scalar(s), refit at lambda_star
// with sandwich covariance, and report on both covariate scales.
SelectionResult select_and_fit(const SurvivalDataset& data, PenaltySpec penalty,
                               const SolverConfig& solver_config = {},
                               const DEConfig& de_config = {});

} // namespace mpr

#endif
