#include <CLI11.hpp>

#include "mpr/commands.hpp"

namespace {

void add_data_options(CLI::App* cmd, mpr::RunConfig& config) {
    cmd->add_option("--input", config.input, "input CSV file")->required();
    cmd->add_option("--time-col", config.time_col, "time column name");
    cmd->add_option("--status-col", config.status_col,
                    "status column name (0 censored, 1 event)");
}

void add_model_options(CLI::App* cmd, mpr::RunConfig& config) {
    cmd->add_option("--scale-covs", config.scale_covs,
                    "scale covariate columns, comma separated")
        ->delimiter(',');
    cmd->add_option("--shape-covs", config.shape_covs,
                    "shape covariate columns, comma separated")
        ->delimiter(',');
}

void add_penalty_options(CLI::App* cmd, mpr::RunConfig& config) {
    cmd->add_option("--penalty", config.penalty, "none|lasso|scad|alasso");
    cmd->add_option("--tuning", config.tuning,
                    "single|single-adaptive|separate|separate-adaptive");
    cmd->add_option("--scad-a", config.scad_a, "SCAD shape constant");
    cmd->add_option("--epsilon", config.epsilon, "absolute-value smoothing");
    cmd->add_option("--zero-tol", config.zero_tol,
                    "selection threshold on standardized coefficients");
}

void add_solver_options(CLI::App* cmd, mpr::RunConfig& config) {
    cmd->add_option("--max-iter", config.max_iter, "Newton iteration cap");
    cmd->add_option("--conv-tol", config.conv_tol,
                    "sup-norm convergence threshold");
}

void add_de_options(CLI::App* cmd, mpr::RunConfig& config) {
    cmd->add_option("--lambda-bounds", config.lambda_bounds,
                    "tuning search bounds lo,hi")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--de-pop", config.de_pop, "DE population size (0 = 10*dim)");
    cmd->add_option("--de-gens", config.de_gens, "DE generation cap");
    cmd->add_option("--de-f", config.de_f, "DE differential weight");
    cmd->add_option("--de-cr", config.de_cr, "DE crossover rate");
}

void add_output_options(CLI::App* cmd, mpr::RunConfig& config) {
    cmd->add_option("--output", config.output, "report file")->required();
    cmd->add_option("--format", config.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", config.seed, "RNG seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized variable selection for Weibull scale-shape "
                 "(multi-parameter) survival regression"};
    app.require_subcommand(1);
    mpr::RunConfig config;

    CLI::App* fit = app.add_subcommand(
        "fit", "maximum likelihood fit, optionally penalized at a fixed lambda");
    add_data_options(fit, config);
    add_model_options(fit, config);
    add_penalty_options(fit, config);
    add_solver_options(fit, config);
    add_output_options(fit, config);
    fit->add_option("--lambda", config.lambda,
                    "fixed tuning value(s), one or two per --tuning")
        ->delimiter(',');

    CLI::App* select = app.add_subcommand(
        "select", "BIC-driven tuning selection with a differential-evolution search");
    add_data_options(select, config);
    add_model_options(select, config);
    add_penalty_options(select, config);
    add_solver_options(select, config);
    add_de_options(select, config);
    add_output_options(select, config);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "replicated simulation study with selection metrics");
    add_penalty_options(simulate, config);
    add_solver_options(simulate, config);
    add_de_options(simulate, config);
    add_output_options(simulate, config);
    simulate->add_option("--n", config.sim_n, "sample size per replicate");
    simulate->add_option("--rho", config.sim_rho, "AR(1) correlation");
    simulate->add_option("--censoring", config.sim_censoring,
                         "target censoring proportion");
    simulate->add_option("--replicates", config.sim_replicates,
                         "number of replicates");
    simulate->add_option("--true-beta", config.true_beta,
                         "true scale coefficients, intercept first")
        ->delimiter(',');
    simulate->add_option("--true-alpha", config.true_alpha,
                         "true shape coefficients, intercept first")
        ->delimiter(',');
    simulate->add_option("--threads", config.threads, "worker thread cap");

    CLI::App* km = app.add_subcommand(
        "km-check", "Kaplan-Meier log cumulative hazard Weibull adequacy data");
    add_data_options(km, config);
    km->add_option("--output", config.output, "plot-data file")->required();
    km->add_option("--format", config.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // config errors exit 2
    }

    config.command = app.get_subcommands().front()->get_name();
    if (config.command == "km-check" && !km->count("--format"))
        config.format = "csv";  // plot data defaults to CSV
    return mpr::run_command(config);
}
