#include "mpr/commands.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "mpr/csv.hpp"
#include "mpr/diagnostics.hpp"
#include "mpr/selection.hpp"
#include "mpr/simulation.hpp"

namespace mpr {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr double kZ95 = 1.959963984540054;

PenaltyFamily parse_family(const std::string& name) {
    if (name == "none") return PenaltyFamily::None;
    if (name == "lasso") return PenaltyFamily::Lasso;
    if (name == "scad") return PenaltyFamily::Scad;
    if (name == "alasso") return PenaltyFamily::Alasso;
    throw MprError(ErrorCode::InvalidConfig, "unknown penalty '" + name + "'");
}

TuningMode parse_tuning(const std::string& name) {
    if (name == "single") return TuningMode::Single;
    if (name == "single-adaptive") return TuningMode::SingleAdaptive;
    if (name == "separate") return TuningMode::SeparateNonAdaptive;
    if (name == "separate-adaptive") return TuningMode::SeparateAdaptive;
    throw MprError(ErrorCode::InvalidConfig, "unknown tuning mode '" + name + "'");
}

PenaltySpec penalty_from_config(const RunConfig& config) {
    PenaltySpec spec;
    spec.family = parse_family(config.penalty);
    spec.tuning_mode = parse_tuning(config.tuning);
    // convenience: plain alasso implies the adaptive variant of the mode
    if (spec.family == PenaltyFamily::Alasso && !spec.adaptive())
        spec.tuning_mode = spec.separate() ? TuningMode::SeparateAdaptive
                                           : TuningMode::SingleAdaptive;
    spec.scad_a = config.scad_a;
    spec.epsilon = config.epsilon;
    spec.zero_tol = config.zero_tol;
    spec.check();
    return spec;
}

SolverConfig solver_from_config(const RunConfig& config) {
    SolverConfig solver;
    solver.max_iter = config.max_iter;
    solver.conv_tol = config.conv_tol;
    return solver;
}

DEConfig de_from_config(const RunConfig& config, int dim) {
    DEConfig de;
    if (config.lambda_bounds.size() != 2 ||
        !(config.lambda_bounds[0] < config.lambda_bounds[1]))
        throw MprError(ErrorCode::InvalidConfig,
                       "--lambda-bounds takes lo,hi with lo < hi");
    de.bounds.assign(dim, {config.lambda_bounds[0], config.lambda_bounds[1]});
    de.population_size = config.de_pop;
    de.generations_max = config.de_gens;
    de.diff_weight = config.de_f;
    de.crossover_rate = config.de_cr;
    de.rng_seed = config.seed;
    return de;
}

struct LoadedData {
    SurvivalDataset data;
    std::vector<std::string> scale_names, shape_names;  // incl. intercept
};

LoadedData load_dataset(const RunConfig& config) {
    const CsvTable table = CsvTable::read_file(config.input);
    const Eigen::Index n = static_cast<Eigen::Index>(table.rows.size());
    if (n == 0)
        throw MprError(ErrorCode::ParseError, config.input + ": no data rows");

    LoadedData loaded;
    loaded.data.t = table.numeric_column(config.time_col);
    loaded.data.delta = table.numeric_column(config.status_col);

    auto build_design = [&](const std::vector<std::string>& names,
                            std::vector<std::string>& out_names) {
        Eigen::MatrixXd m(n, static_cast<Eigen::Index>(names.size()) + 1);
        m.col(0).setOnes();
        out_names.push_back("(intercept)");
        for (size_t j = 0; j < names.size(); ++j) {
            m.col(static_cast<Eigen::Index>(j) + 1) = table.numeric_column(names[j]);
            out_names.push_back(names[j]);
        }
        return m;
    };
    loaded.data.X = build_design(config.scale_covs, loaded.scale_names);
    loaded.data.Z = build_design(config.shape_covs, loaded.shape_names);
    validate_or_throw(loaded.data);
    return loaded;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw MprError(ErrorCode::FileNotFound, "cannot write " + path);
    out << text;
}

json coefficient_entries(const std::vector<std::string>& scale_names,
                         const std::vector<std::string>& shape_names,
                         const FitResult& fit, const ThetaVector& theta_orig,
                         const Eigen::MatrixXd* cov_orig) {
    json arr = json::array();
    const Eigen::Index nb = theta_orig.beta.size();
    const auto entry = [&](const std::string& component, const std::string& name,
                           Eigen::Index flat, double est_std, double est) {
        json e;
        e["component"] = component;
        e["name"] = name;
        e["estimate_std"] = est_std;
        e["estimate"] = est;
        const bool selected = fit.selected_mask[flat];
        e["selected"] = selected;
        if (cov_orig) {
            const double var = (*cov_orig)(flat, flat);
            const double se = std::sqrt(std::max(var, 0.0));
            const double se_std =
                std::sqrt(std::max((*fit.covariance)(flat, flat), 0.0));
            e["se"] = se;
            e["se_std"] = se_std;
            e["significant"] = selected && se > 0.0 && std::abs(est) >= kZ95 * se;
        } else {
            e["se"] = nullptr;
            e["se_std"] = nullptr;
            e["significant"] = false;
        }
        arr.push_back(e);
    };
    for (Eigen::Index j = 0; j < nb; ++j)
        entry("scale", scale_names[static_cast<size_t>(j)], j,
              fit.theta_hat.beta[j], theta_orig.beta[j]);
    for (Eigen::Index j = 0; j < theta_orig.alpha.size(); ++j)
        entry("shape", shape_names[static_cast<size_t>(j)], nb + j,
              fit.theta_hat.alpha[j], theta_orig.alpha[j]);
    return arr;
}

std::string coefficients_csv(const json& entries) {
    std::string out =
        "component,name,estimate,se,estimate_std,se_std,selected,significant\n";
    for (const auto& e : entries) {
        out += e["component"].get<std::string>() + ",";
        out += e["name"].get<std::string>() + ",";
        out += format_double(e["estimate"].get<double>()) + ",";
        out += e["se"].is_null() ? "" : format_double(e["se"].get<double>());
        out += ",";
        out += format_double(e["estimate_std"].get<double>()) + ",";
        out += e["se_std"].is_null() ? "" : format_double(e["se_std"].get<double>());
        out += ",";
        out += e["selected"].get<bool>() ? "1," : "0,";
        out += e["significant"].get<bool>() ? "1" : "0";
        out += "\n";
    }
    return out;
}

json fit_summary(const FitResult& fit) {
    json s;
    s["converged"] = fit.converged;
    s["iterations"] = fit.n_iter;
    s["loglik"] = fit.loglik;
    s["penalized_loglik"] = fit.penalized_loglik;
    if (fit.effective_df) s["effective_df"] = *fit.effective_df;
    s["grad_supnorm"] = fit.grad_supnorm;
    return s;
}

void emit_report(const RunConfig& config, const json& report,
                 const json& coefficient_table) {
    if (config.format == "csv") {
        write_text_file(config.output, coefficients_csv(coefficient_table));
    } else {
        write_text_file(config.output, report.dump(2) + "\n");
    }
    std::cout << "wrote " << config.output << "\n";
}

} // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok:
            return 0;
        case ErrorCode::WrongScalarCount:
        case ErrorCode::MissingAdaptiveWeights:
        case ErrorCode::InvalidConfig:
            return 2;
        case ErrorCode::NonPositiveTime:
        case ErrorCode::BadIndicator:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NoEvents:
        case ErrorCode::ConstantColumnNotIntercept:
        case ErrorCode::FileNotFound:
        case ErrorCode::ParseError:
        case ErrorCode::TooFewPoints:
            return 3;
        case ErrorCode::NonFiniteResult:
        case ErrorCode::SingularSystem:
        case ErrorCode::CalibrationFailed:
            return 4;
    }
    return 4;
}

int cmd_fit(const RunConfig& config) {
    const LoadedData loaded = load_dataset(config);
    PenaltySpec spec = penalty_from_config(config);
    const SolverConfig solver = solver_from_config(config);

    auto [std_data, record] = standardize(loaded.data);
    const FitResult unpenalized = fit_unpenalized(std_data, std::nullopt, solver);

    FitResult fit = unpenalized;
    std::vector<double> lambda_used;
    if (spec.family != PenaltyFamily::None) {
        if (config.lambda.empty())
            throw MprError(ErrorCode::InvalidConfig,
                           "fit with a penalty needs --lambda");
        if (spec.adaptive())
            spec.adaptive_weights = alasso_weights(unpenalized.theta_hat);
        const LambdaVector lambda = expand_lambda(config.lambda, spec,
                                                  std_data.p(), std_data.q());
        fit = fit_penalized(std_data, spec, lambda, unpenalized.theta_hat, solver);
        lambda_used = config.lambda;
    }

    const ThetaVector theta_orig = destandardize_theta(fit.theta_hat, record);
    Eigen::MatrixXd cov_orig;
    if (fit.covariance)
        cov_orig = destandardize_covariance(*fit.covariance, record);

    const json coefficients =
        coefficient_entries(loaded.scale_names, loaded.shape_names, fit,
                            theta_orig, fit.covariance ? &cov_orig : nullptr);
    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "fit";
    report["seed"] = config.seed;
    report["n"] = loaded.data.n();
    report["events"] = loaded.data.delta.sum();
    report["penalty"] = {{"family", config.penalty},
                         {"tuning", tuning_mode_name(spec.tuning_mode)},
                         {"scad_a", spec.scad_a},
                         {"epsilon", spec.epsilon},
                         {"zero_tol", spec.zero_tol},
                         {"lambda", lambda_used}};
    report["fit"] = fit_summary(fit);
    report["coefficients"] = coefficients;
    emit_report(config, report, coefficients);
    return 0;
}

int cmd_select(const RunConfig& config) {
    const LoadedData loaded = load_dataset(config);
    const PenaltySpec spec = penalty_from_config(config);
    if (spec.family != PenaltyFamily::None &&
        loaded.data.p() + loaded.data.q() == 0)
        throw MprError(ErrorCode::InvalidConfig,
                       "select with a penalty needs at least one covariate");
    const SolverConfig solver = solver_from_config(config);
    const DEConfig de = de_from_config(config, spec.n_tuning_scalars());

    const SelectionResult sel = select_and_fit(loaded.data, spec, solver, de);

    // scale/shape degrees-of-freedom split at lambda_star
    auto [std_data, record] = standardize(loaded.data);
    const LambdaVector lambda_star =
        sel.penalty.family == PenaltyFamily::None
            ? LambdaVector::zeros(std_data.X.cols(), std_data.Z.cols())
            : expand_lambda(sel.lambda_star, sel.penalty, std_data.p(), std_data.q());
    const auto [df_scale, df_shape] =
        effective_df_split(sel.fit.theta_hat, std_data, sel.penalty, lambda_star);

    const json coefficients = coefficient_entries(
        loaded.scale_names, loaded.shape_names, sel.fit, sel.theta_original,
        sel.fit.covariance ? &sel.cov_original : nullptr);

    json selected = json::array();
    for (const auto& e : coefficients)
        if (e["selected"].get<bool>() && e["name"] != "(intercept)")
            selected.push_back({{"component", e["component"]}, {"name", e["name"]}});

    json report;
    report["schema_version"] = kSchemaVersion;
    report["command"] = "select";
    report["seed"] = config.seed;
    report["n"] = loaded.data.n();
    report["events"] = loaded.data.delta.sum();
    report["penalty"] = {{"family", config.penalty},
                         {"tuning", tuning_mode_name(sel.penalty.tuning_mode)},
                         {"scad_a", sel.penalty.scad_a},
                         {"epsilon", sel.penalty.epsilon},
                         {"zero_tol", sel.penalty.zero_tol}};
    report["lambda_star"] = sel.lambda_star;
    report["bic"] = sel.bic_star;
    report["df_scale"] = df_scale;
    report["df_shape"] = df_shape;
    report["n_inner_fits"] = sel.n_inner_fits;
    report["bic_trace"] = sel.bic_trace;
    report["fit"] = fit_summary(sel.fit);
    report["selected"] = selected;
    report["coefficients"] = coefficients;
    emit_report(config, report, coefficients);
    return 0;
}

namespace {

json sim_report_json(const RunConfig& config, const SimScenario& scenario,
                     const SimReport& report) {
    json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = "simulate";
    out["seed"] = config.seed;
    out["scenario"] = {{"n", scenario.n},
                       {"rho", scenario.rho},
                       {"target_censoring", scenario.target_censoring},
                       {"penalty", config.penalty},
                       {"tuning", tuning_mode_name(scenario.penalty.tuning_mode)},
                       {"replicates", scenario.n_replicates},
                       {"true_beta", std::vector<double>(
                                         scenario.true_beta.data(),
                                         scenario.true_beta.data() + scenario.true_beta.size())},
                       {"true_alpha", std::vector<double>(
                                          scenario.true_alpha.data(),
                                          scenario.true_alpha.data() + scenario.true_alpha.size())}};
    out["n_failures"] = report.n_failures;
    out["censoring_rate"] = report.censoring_rate;
    out["realized_censoring"] = report.realized_censoring;
    const auto metrics = [](const ComponentMetrics& m) {
        return json{{"C", m.c}, {"IC", m.ic}, {"PT", m.pt}, {"MSE", m.mse}};
    };
    out["scale"] = metrics(report.scale);
    out["shape"] = metrics(report.shape);
    json coefs = json::array();
    for (const auto& c : report.coefficients)
        coefs.push_back({{"name", c.name},
                         {"truth", c.truth},
                         {"estimate", c.mean_estimate},
                         {"SE", c.se},
                         {"SEE", c.see},
                         {"CP", c.cp}});
    out["coefficients"] = coefs;
    return out;
}

std::string sim_report_csv(const SimReport& report) {
    std::string out = "kind,component,name,value,truth,estimate,SE,SEE,CP\n";
    const auto run_row = [&](const std::string& name, double value) {
        out += "run,," + name + "," + format_double(value) + ",,,,,\n";
    };
    run_row("n_replicates", report.n_replicates);
    run_row("n_failures", report.n_failures);
    run_row("censoring_rate", report.censoring_rate);
    run_row("realized_censoring", report.realized_censoring);
    const auto metric_rows = [&](const std::string& comp, const ComponentMetrics& m) {
        out += "selection," + comp + ",C," + format_double(m.c) + ",,,,,\n";
        out += "selection," + comp + ",IC," + format_double(m.ic) + ",,,,,\n";
        out += "selection," + comp + ",PT," + format_double(m.pt) + ",,,,,\n";
        out += "selection," + comp + ",MSE," + format_double(m.mse) + ",,,,,\n";
    };
    metric_rows("scale", report.scale);
    metric_rows("shape", report.shape);
    for (const auto& c : report.coefficients) {
        out += "coefficient," +
               std::string(c.name.rfind("beta", 0) == 0 ? "scale" : "shape") + "," +
               c.name + ",," + format_double(c.truth) + "," +
               format_double(c.mean_estimate) + "," + format_double(c.se) + "," +
               format_double(c.see) + "," + format_double(c.cp) + "\n";
    }
    return out;
}

std::string strip_report_extension(const std::string& path) {
    for (const char* ext : {".json", ".csv"})
        if (path.size() > std::strlen(ext) &&
            path.compare(path.size() - std::strlen(ext), std::string::npos, ext) == 0)
            return path.substr(0, path.size() - std::strlen(ext));
    return path;
}

} // namespace

int cmd_simulate(const RunConfig& config) {
    SimScenario scenario;
    scenario.n = config.sim_n;
    scenario.rho = config.sim_rho;
    scenario.target_censoring = config.sim_censoring;
    scenario.n_replicates = config.sim_replicates;
    scenario.rng_seed = config.seed;
    scenario.penalty = penalty_from_config(config);
    if (config.true_beta.empty() != config.true_alpha.empty())
        throw MprError(ErrorCode::InvalidConfig,
                       "--true-beta and --true-alpha must be given together");
    if (config.true_beta.empty()) {
        scenario.true_beta = study_true_beta();
        scenario.true_alpha = study_true_alpha();
    } else {
        scenario.true_beta = Eigen::Map<const Eigen::VectorXd>(
            config.true_beta.data(), static_cast<Eigen::Index>(config.true_beta.size()));
        scenario.true_alpha = Eigen::Map<const Eigen::VectorXd>(
            config.true_alpha.data(), static_cast<Eigen::Index>(config.true_alpha.size()));
    }
    scenario.check();

    const SolverConfig solver = solver_from_config(config);
    const DEConfig de = de_from_config(config, scenario.penalty.n_tuning_scalars());
    const SimReport report = run_scenario(scenario, solver, de, config.threads);

    const std::string base = strip_report_extension(config.output);
    write_text_file(base + ".json",
                    sim_report_json(config, scenario, report).dump(2) + "\n");
    write_text_file(base + ".csv", sim_report_csv(report));
    std::cout << "wrote " << base << ".json\n"
              << "wrote " << base << ".csv\n";
    // timing is not part of the report files so outputs stay reproducible
    std::cerr << "simulate: " << report.n_replicates << " replicates, "
              << report.n_failures << " failures, "
              << report.mean_seconds_per_replicate << " s/replicate\n";
    return 0;
}

int cmd_km_check(const RunConfig& config) {
    const CsvTable table = CsvTable::read_file(config.input);
    const Eigen::VectorXd t = table.numeric_column(config.time_col);
    const Eigen::VectorXd delta = table.numeric_column(config.status_col);
    for (Eigen::Index i = 0; i < t.size(); ++i)
        if (!(t[i] > 0.0))
            throw MprError(ErrorCode::NonPositiveTime,
                           "row " + std::to_string(i + 1));

    const KMCurve curve = kaplan_meier(t, delta);
    const WeibullCheck check = weibull_check_points(curve);

    if (config.format == "json") {
        json points = json::array();
        for (Eigen::Index j = 0; j < check.log_t.size(); ++j)
            points.push_back({{"log_t", check.log_t[j]},
                              {"log_H", check.log_cumhaz[j]},
                              {"ci_lo", check.ci_lo[j]},
                              {"ci_hi", check.ci_hi[j]}});
        json report;
        report["schema_version"] = kSchemaVersion;
        report["command"] = "km-check";
        report["slope"] = check.slope;
        report["intercept"] = check.intercept;
        report["r_squared"] = check.r_squared;
        report["points"] = points;
        write_text_file(config.output, report.dump(2) + "\n");
    } else {
        std::string out = "log_t,log_H,ci_lo,ci_hi\n";
        for (Eigen::Index j = 0; j < check.log_t.size(); ++j)
            out += format_double(check.log_t[j]) + "," +
                   format_double(check.log_cumhaz[j]) + "," +
                   format_double(check.ci_lo[j]) + "," +
                   format_double(check.ci_hi[j]) + "\n";
        write_text_file(config.output, out);
    }
    std::cout << "slope=" << format_double(check.slope)
              << " intercept=" << format_double(check.intercept)
              << " r_squared=" << format_double(check.r_squared) << "\n"
              << "wrote " << config.output << "\n";
    return 0;
}

int run_command(const RunConfig& config) {
    try {
        if (config.command == "fit") return cmd_fit(config);
        if (config.command == "select") return cmd_select(config);
        if (config.command == "simulate") return cmd_simulate(config);
        if (config.command == "km-check") return cmd_km_check(config);
        throw MprError(ErrorCode::InvalidConfig,
                       "unknown command '" + config.command + "'");
    } catch (const MprError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err.code());
    }
}

} // namespace mpr
