#include "mpr/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace mpr {

namespace {

// stream tags for deriving independent seeds from the scenario seed
constexpr std::uint64_t kCalibrationStream = 0xCA11;
constexpr std::uint64_t kReplicateStream = 0x5EED;

} // namespace

void SimScenario::check() const {
    if (true_beta.size() < 2 || true_beta.size() != true_alpha.size())
        throw MprError(ErrorCode::InvalidConfig,
                       "true_beta and true_alpha must have equal length >= 2 "
                       "(shared covariates)");
    if (!(rho >= 0.0 && rho < 1.0))
        throw MprError(ErrorCode::InvalidConfig, "rho must be in [0, 1)");
    if (!(target_censoring > 0.0 && target_censoring < 1.0))
        throw MprError(ErrorCode::InvalidConfig,
                       "target_censoring must be in (0, 1)");
    if (n < 2 || n_replicates < 1)
        throw MprError(ErrorCode::InvalidConfig, "n and n_replicates must be positive");
}

Eigen::VectorXd study_true_beta() {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(11);
    b[0] = -1.5;
    b[1] = -1.0;
    b[7] = -0.8;
    b[8] = 0.5;
    return b;
}

Eigen::VectorXd study_true_alpha() {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(11);
    a[0] = 0.5;
    a[1] = 0.4;
    a[5] = 0.4;
    a[6] = -0.2;
    return a;
}

Eigen::MatrixXd gen_ar1_covariates(int n, int dim, double rho, Rng& rng) {
    Eigen::MatrixXd x(n, dim);
    const double innovation_sd = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        for (int j = 1; j < dim; ++j)
            x(i, j) = rho * x(i, j - 1) + innovation_sd * rng.normal();
    }
    return x;
}

double weibull_mpr_inverse_survival(double u, double tau, double gamma) {
    return std::pow(-std::log(u) / tau, 1.0 / gamma);
}

double sample_weibull_mpr(const Eigen::VectorXd& x_row, const Eigen::VectorXd& z_row,
                          const Eigen::VectorXd& beta, const Eigen::VectorXd& alpha,
                          Rng& rng) {
    const double tau = std::exp(x_row.dot(beta));
    const double gamma = std::exp(z_row.dot(alpha));
    return weibull_mpr_inverse_survival(rng.uniform_open(), tau, gamma);
}

double calibrate_censoring(const SimScenario& scenario, double target,
                           double bracket_lo, double bracket_hi,
                           int mc_pairs, int max_steps) {
    if (!(target > 0.0 && target < 1.0))
        throw MprError(ErrorCode::InvalidConfig, "target must be in (0, 1)");
    const int dim = static_cast<int>(scenario.n_covariates());
    Rng rng(derive_seed(scenario.rng_seed, kCalibrationStream));

    // one fixed draw of (event time, unit-rate exponential); the censoring
    // fraction P(E/r < T) = P(E < rT) is then monotone in the rate r
    Eigen::VectorXd event(mc_pairs), unit_exp(mc_pairs);
    Eigen::VectorXd row(dim + 1);
    row[0] = 1.0;
    for (int k = 0; k < mc_pairs; ++k) {
        const Eigen::MatrixXd cov = gen_ar1_covariates(1, dim, scenario.rho, rng);
        row.tail(dim) = cov.row(0);
        event[k] = sample_weibull_mpr(row, row, scenario.true_beta,
                                      scenario.true_alpha, rng);
        unit_exp[k] = rng.exponential(1.0);
    }
    const auto censored_fraction = [&](double rate) {
        int count = 0;
        for (int k = 0; k < mc_pairs; ++k)
            if (unit_exp[k] < rate * event[k]) ++count;
        return static_cast<double>(count) / mc_pairs;
    };

    constexpr double tol = 0.005;
    if (censored_fraction(bracket_lo) > target + tol ||
        censored_fraction(bracket_hi) < target - tol)
        throw MprError(ErrorCode::CalibrationFailed,
                       "target censoring fraction not bracketed");

    // bisect on log(rate); rates span orders of magnitude
    double lo = std::log(bracket_lo), hi = std::log(bracket_hi);
    for (int step = 0; step < max_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double frac = censored_fraction(std::exp(mid));
        if (std::abs(frac - target) < tol) return std::exp(mid);
        if (frac < target)
            lo = mid;
        else
            hi = mid;
    }
    throw MprError(ErrorCode::CalibrationFailed,
                   "bisection did not reach the target censoring fraction");
}

SurvivalDataset gen_replicate(const SimScenario& scenario, double censoring_rate,
                              std::uint64_t replicate_index) {
    const int n = scenario.n;
    const int dim = static_cast<int>(scenario.n_covariates());
    Rng rng(derive_seed(scenario.rng_seed,
                        kReplicateStream + replicate_index));

    const Eigen::MatrixXd cov = gen_ar1_covariates(n, dim, scenario.rho, rng);
    SurvivalDataset data;
    data.X.resize(n, dim + 1);
    data.X.col(0).setOnes();
    data.X.rightCols(dim) = cov;
    data.Z = data.X;  // x_i = z_i, stored independently
    data.t.resize(n);
    data.delta.resize(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd row = data.X.row(i);
        const double event = sample_weibull_mpr(row, row, scenario.true_beta,
                                                scenario.true_alpha, rng);
        const double censor = rng.exponential(censoring_rate);
        data.t[i] = std::min(event, censor);
        data.delta[i] = event <= censor ? 1.0 : 0.0;
    }
    return data;
}

namespace {

struct ReplicateOutcome {
    bool ok = false;
    Eigen::VectorXd estimate;  // flattened, masked-out entries zeroed
    Eigen::VectorXd se;        // flattened, masked-out entries zeroed
    std::vector<bool> selected;
    double scale_mse = 0.0, shape_mse = 0.0;
    double censored_fraction = 0.0;
    double seconds = 0.0;
};

Eigen::MatrixXd covariate_covariance(const Eigen::MatrixXd& design) {
    // sample covariance of the non-intercept columns, denominator n-1
    const Eigen::Index n = design.rows();
    const Eigen::MatrixXd cols = design.rightCols(design.cols() - 1);
    const Eigen::MatrixXd centered = cols.rowwise() - cols.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(n - 1);
}

} // namespace

SimReport run_scenario_with_fitter(const SimScenario& scenario,
                                   const ReplicateFitter& fitter,
                                   int n_threads) {
    scenario.check();
    const double rate = calibrate_censoring(scenario, scenario.target_censoring);
    const int n_reps = scenario.n_replicates;
    const Eigen::Index p = scenario.n_covariates();
    const Eigen::Index d = 2 * (p + 1);
    const Eigen::VectorXd truth_flat = [&] {
        Eigen::VectorXd v(d);
        v << scenario.true_beta, scenario.true_alpha;
        return v;
    }();

    std::vector<ReplicateOutcome> outcomes(n_reps);
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int rep; (rep = next.fetch_add(1)) < n_reps;) {
            const auto started = std::chrono::steady_clock::now();
            ReplicateOutcome& out = outcomes[rep];
            const SurvivalDataset data = gen_replicate(scenario, rate, rep);
            out.censored_fraction =
                1.0 - data.delta.sum() / static_cast<double>(data.n());
            try {
                const ReplicateFit fit = fitter(
                    data, derive_seed(scenario.rng_seed, 0xDE00 + rep));
                if (fit.ok && fit.theta.dim() == d) {
                    out.ok = true;
                    out.selected = fit.selected;
                    const Eigen::VectorXd raw = fit.theta.flatten();
                    out.estimate = Eigen::VectorXd::Zero(d);
                    out.se = Eigen::VectorXd::Zero(d);
                    for (Eigen::Index j = 0; j < d; ++j) {
                        if (fit.selected[j]) {
                            out.estimate[j] = raw[j];
                            out.se[j] = fit.se[j];
                        }
                    }
                    const Eigen::MatrixXd v = covariate_covariance(data.X);
                    const Eigen::VectorXd db =
                        out.estimate.segment(1, p) - truth_flat.segment(1, p);
                    const Eigen::VectorXd da = out.estimate.segment(p + 2, p) -
                                               truth_flat.segment(p + 2, p);
                    out.scale_mse = db.dot(v * db);
                    out.shape_mse = da.dot(v * da);
                }
            } catch (const MprError&) {
                out.ok = false;
            }
            out.seconds = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - started)
                              .count();
        }
    };

    const int workers = std::max(1, n_threads);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // deterministic reduction over replicate slots
    SimReport report;
    report.n_replicates = n_reps;
    report.censoring_rate = rate;

    const Eigen::Index shape_offset = p + 1;
    std::vector<int> nonzero_indices;
    for (Eigen::Index j = 0; j < d; ++j)
        if (truth_flat[j] != 0.0) nonzero_indices.push_back(static_cast<int>(j));

    long n_ok = 0;
    double sum_seconds = 0.0, sum_censored = 0.0;
    Eigen::VectorXd est_sum = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd est_sq_sum = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd see_sum = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd cover_sum = Eigen::VectorXd::Zero(d);
    double c_scale = 0, ic_scale = 0, pt_scale = 0, mse_scale = 0;
    double c_shape = 0, ic_shape = 0, pt_shape = 0, mse_shape = 0;

    for (const ReplicateOutcome& out : outcomes) {
        sum_seconds += out.seconds;
        if (!out.ok) continue;
        ++n_ok;
        sum_censored += out.censored_fraction;

        int c_b = 0, ic_b = 0, c_a = 0, ic_a = 0;
        bool exact_b = true, exact_a = true;
        for (Eigen::Index j = 1; j <= p; ++j) {
            const bool true_zero_b = truth_flat[j] == 0.0;
            const bool sel_b = out.selected[j];
            if (true_zero_b && !sel_b) ++c_b;
            if (!true_zero_b && !sel_b) ++ic_b;
            if (sel_b == true_zero_b) exact_b = false;

            const Eigen::Index k = shape_offset + j;
            const bool true_zero_a = truth_flat[k] == 0.0;
            const bool sel_a = out.selected[k];
            if (true_zero_a && !sel_a) ++c_a;
            if (!true_zero_a && !sel_a) ++ic_a;
            if (sel_a == true_zero_a) exact_a = false;
        }
        c_scale += c_b;
        ic_scale += ic_b;
        pt_scale += exact_b ? 1.0 : 0.0;
        c_shape += c_a;
        ic_shape += ic_a;
        pt_shape += exact_a ? 1.0 : 0.0;
        mse_scale += out.scale_mse;
        mse_shape += out.shape_mse;

        est_sum += out.estimate;
        est_sq_sum += out.estimate.cwiseProduct(out.estimate);
        see_sum += out.se;
        for (int j : nonzero_indices) {
            const double half_width = 1.959963984540054 * out.se[j];
            if (std::abs(out.estimate[j] - truth_flat[j]) <= half_width)
                cover_sum[j] += 1.0;
        }
    }

    report.n_failures = n_reps - static_cast<int>(n_ok);
    report.mean_seconds_per_replicate = sum_seconds / n_reps;
    if (n_ok == 0) return report;

    const double m = static_cast<double>(n_ok);
    report.realized_censoring = sum_censored / m;
    report.scale = {c_scale / m, ic_scale / m, pt_scale / m, mse_scale / m};
    report.shape = {c_shape / m, ic_shape / m, pt_shape / m, mse_shape / m};

    for (int j : nonzero_indices) {
        CoefficientStat stat;
        stat.flat_index = j;
        const bool is_beta = j < shape_offset;
        const int coef_index = is_beta ? j : j - static_cast<int>(shape_offset);
        stat.name = (is_beta ? "beta" : "alpha") + std::to_string(coef_index);
        stat.truth = truth_flat[j];
        stat.mean_estimate = est_sum[j] / m;
        const double var =
            m > 1 ? (est_sq_sum[j] - m * stat.mean_estimate * stat.mean_estimate) / (m - 1)
                  : 0.0;
        stat.se = std::sqrt(std::max(var, 0.0));
        stat.see = see_sum[j] / m;
        stat.cp = cover_sum[j] / m;
        report.coefficients.push_back(stat);
    }
    return report;
}

SimReport run_scenario(const SimScenario& scenario,
                       const SolverConfig& solver_config,
                       const DEConfig& de_config, int n_threads) {
    const ReplicateFitter fitter = [&](const SurvivalDataset& data,
                                       std::uint64_t de_seed) {
        DEConfig de = de_config;
        de.rng_seed = de_seed;
        const SelectionResult sel =
            select_and_fit(data, scenario.penalty, solver_config, de);
        ReplicateFit fit;
        if (!sel.fit.converged || !sel.fit.covariance) return fit;
        fit.ok = true;
        fit.theta = sel.theta_original;
        fit.se = sel.cov_original.diagonal().cwiseMax(0.0).cwiseSqrt();
        fit.selected = sel.fit.selected_mask;
        return fit;
    };
    return run_scenario_with_fitter(scenario, fitter, n_threads);
}

} // namespace mpr
