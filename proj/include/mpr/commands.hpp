#ifndef MPR_COMMANDS_HPP
#define MPR_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mpr/errors.hpp"

namespace mpr {

// Everything the CLI collects; shared by all subcommands so reports can echo
// the full configuration.
struct RunConfig {
    std::string command;  // fit | select | simulate | km-check
    std::string input;
    std::string output;
    std::string format = "json";  // json | csv

    std::string time_col = "time";
    std::string status_col = "status";
    std::vector<std::string> scale_covs, shape_covs;

    std::string penalty = "none";
    std::string tuning = "single";
    double scad_a = 3.7;
    double epsilon = 1e-4;
    double zero_tol = 1e-3;
    std::vector<double> lambda;  // fixed tuning value(s) for `fit`

    int max_iter = 100;
    double conv_tol = 1e-6;

    std::vector<double> lambda_bounds = {0.0, 1.0};
    int de_pop = 0;
    int de_gens = 60;
    double de_f = 0.8;
    double de_cr = 0.9;

    std::uint64_t seed = 1;
    int threads = 1;

    int sim_n = 500;
    double sim_rho = 0.5;
    double sim_censoring = 0.25;
    int sim_replicates = 200;
    std::vector<double> true_beta, true_alpha;  // empty -> built-in study truth
};

int cmd_fit(const RunConfig& config);
int cmd_select(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_km_check(const RunConfig& config);

// 0 ok, 2 configuration, 3 data, 4 numerical failure
int exit_code_for(ErrorCode code);

// Dispatches on config.command, mapping MprError to the documented exit
// codes and a single machine-parseable stderr line.
int run_command(const RunConfig& config);

} // namespace mpr

#endif
