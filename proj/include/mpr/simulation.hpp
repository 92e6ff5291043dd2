#ifndef MPR_SIMULATION_HPP
#define MPR_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpr/selection.hpp"
#include "mpr/rng.hpp"

namespace mpr {

// One cell of the simulation study: true model, sample size, censoring
// level, penalty, and replication settings.
struct SimScenario {
    int n = 500;
    double rho = 0.5;
    Eigen::VectorXd true_beta;   // length p+1, intercept first
    Eigen::VectorXd true_alpha;  // length q+1
    double target_censoring = 0.25;
    PenaltySpec penalty;
    int n_replicates = 200;
    std::uint64_t rng_seed = 1;

    Eigen::Index n_covariates() const { return true_beta.size() - 1; }
    void check() const;
};

// The study's true coefficient vectors (10 covariates plus intercepts).
Eigen::VectorXd study_true_beta();
Eigen::VectorXd study_true_alpha();

struct ComponentMetrics {
    double c = 0.0;    // mean true zeros correctly set to zero (max 7 here)
    double ic = 0.0;   // mean true nonzeros incorrectly set to zero
    double pt = 0.0;   // fraction of replicates selecting exactly the truth
    double mse = 0.0;  // mean (est - truth)' V (est - truth), V = covariate cov
};

struct CoefficientStat {
    std::string name;
    int flat_index = 0;       // position in the (beta, alpha) flattening
    double truth = 0.0;
    double mean_estimate = 0.0;
    double se = 0.0;   // sd of estimates across replicates
    double see = 0.0;  // mean of estimated (sandwich) standard errors
    double cp = 0.0;   // coverage of nominal 95% intervals
};

struct SimReport {
    ComponentMetrics scale, shape;
    std::vector<CoefficientStat> coefficients;  // nonzero truths only
    int n_replicates = 0;
    int n_failures = 0;
    double censoring_rate = 0.0;       // calibrated exponential rate
    double realized_censoring = 0.0;   // mean censored fraction across replicates
    double mean_seconds_per_replicate = 0.0;
};

// AR(1) Gaussian covariates: marginally N(0,1) with corr(x_j, x_k) = rho^|j-k|.
Eigen::MatrixXd gen_ar1_covariates(int n, int dim, double rho, Rng& rng);

// T = (-log u / tau)^(1/gamma), the survival-function inverse at u.
double weibull_mpr_inverse_survival(double u, double tau, double gamma);

// Weibull MPR event time by inverse CDF with U ~ Uniform(0,1).
double sample_weibull_mpr(const Eigen::VectorXd& x_row, const Eigen::VectorXd& z_row,
                          const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha,
                          Rng& rng);

// Exponential censoring rate hit by bisection on a Monte Carlo estimate of
// P(C < T) from mc_pairs draws of the scenario's marginal law; deterministic
// given the scenario seed. Throws CalibrationFailed when the target cannot
// be reached inside [bracket_lo, bracket_hi] within max_steps bisections.
double calibrate_censoring(const SimScenario& scenario, double target,
                           double bracket_lo = 1e-9, double bracket_hi = 1e9,
                           int mc_pairs = 50000, int max_steps = 60);

// One simulated dataset with x_i = z_i, identified by replicate index so
// parallel runs are reproducible.
SurvivalDataset gen_replicate(const SimScenario& scenario, double censoring_rate,
                              std::uint64_t replicate_index);

// What the study needs from one fitted replicate: estimates on the original
// covariate scale, their standard errors, and the selection mask.
struct ReplicateFit {
    bool ok = false;
    ThetaVector theta;
    Eigen::VectorXd se;          // flattened (beta, alpha)
    std::vector<bool> selected;  // flattened mask
};

using ReplicateFitter =
    std::function<ReplicateFit(const SurvivalDataset&, std::uint64_t de_seed)>;

// Runs the replication loop with a custom fitter; the production path wraps
// select_and_fit, tests inject oracles.
SimReport run_scenario_with_fitter(const SimScenario& scenario,
                                   const ReplicateFitter& fitter,
                                   int n_threads = 1);

SimReport run_scenario(const SimScenario& scenario,
                       const SolverConfig& solver_config = {},
                       const DEConfig& de_config = {}, int n_threads = 1);

} // namespace mpr

#endif
