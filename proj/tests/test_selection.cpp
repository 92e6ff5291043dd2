#include <doctest.h>

#include <cmath>

#include "mpr/selection.hpp"
#include "mpr/simulation.hpp"
#include "test_helpers.hpp"

using namespace mpr;

namespace {

SurvivalDataset study_dataset(int n, std::uint64_t seed, double rate = 0.2,
                              std::uint64_t rep = 0) {
    SimScenario scenario;
    scenario.true_beta = study_true_beta();
    scenario.true_alpha = study_true_alpha();
    scenario.n = n;
    scenario.rng_seed = seed;
    return gen_replicate(scenario, rate, rep);
}

DEConfig quick_de(std::uint64_t seed, int dim) {
    DEConfig de;
    de.rng_seed = seed;
    de.bounds.assign(dim, {0.0, 1.0});
    return de;
}

} // namespace

TEST_SUITE_BEGIN("selection");

TEST_CASE("DE finds the minimum of simple convex objectives") {
    DEConfig de;
    de.rng_seed = 1;
    de.bic_tol = 1e-10;  // toy objectives live on a much smaller scale than BIC
    de.generations_max = 100;
    de.bounds = {{0.0, 1.0}};
    const DEResult r1 = de_minimize(
        [](const std::vector<double>& x) { return (x[0] - 0.3) * (x[0] - 0.3); },
        1, de);
    CHECK(std::abs(r1.argmin[0] - 0.3) < 1e-3);

    de.bounds = {{-0.8, 1.0}, {-0.8, 1.0}};
    const DEResult r2 = de_minimize(
        [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; },
        2, de);
    CHECK(std::abs(r2.argmin[0]) < 1e-3);
    CHECK(std::abs(r2.argmin[1]) < 1e-3);
}

TEST_CASE("DE matches a dense grid on 2-D Rastrigin") {
    const auto rastrigin = [](const std::vector<double>& x) {
        double sum = 20.0;
        for (double v : x)
            sum += v * v - 10.0 * std::cos(2.0 * M_PI * v);
        return sum;
    };
    DEConfig de;
    de.rng_seed = 3;
    de.bounds = {{-0.5, 0.5}, {-0.5, 0.5}};
    de.generations_max = 80;
    de.bic_tol = 1e-8;
    const DEResult result = de_minimize(rastrigin, 2, de);

    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 200; ++j) {
            const double x = -0.5 + i / 199.0;
            const double y = -0.5 + j / 199.0;
            grid_best = std::min(grid_best, rastrigin({x, y}));
        }
    CHECK(result.min_value <= grid_best + 1e-2);
}

TEST_CASE("DE bookkeeping: trace, bounds, determinism") {
    DEConfig de;
    de.rng_seed = 5;
    de.bounds = {{0.1, 0.9}};
    bool in_bounds = true;
    const auto objective = [&](const std::vector<double>& x) {
        in_bounds = in_bounds && x[0] >= 0.1 && x[0] <= 0.9;
        return std::sin(13.0 * x[0]) + x[0];
    };
    const DEResult a = de_minimize(objective, 1, de);
    CHECK(in_bounds);
    for (size_t g = 1; g < a.trace.size(); ++g)
        CHECK(a.trace[g] <= a.trace[g - 1]);
    CHECK(a.min_value == a.trace.back());

    const DEResult b = de_minimize(objective, 1, de);
    CHECK(a.min_value == b.min_value);
    CHECK(a.argmin[0] == b.argmin[0]);
    CHECK(a.n_evaluations == b.n_evaluations);
}

TEST_CASE("DE configuration validation") {
    DEConfig de;
    de.crossover_rate = 0.0;
    CHECK_THROWS_AS(de_minimize([](const std::vector<double>&) { return 0.0; }, 1, de),
                    MprError);
    de = DEConfig{};
    de.population_size = 3;
    CHECK_THROWS_AS(de_minimize([](const std::vector<double>&) { return 0.0; }, 1, de),
                    MprError);
    de = DEConfig{};
    de.bounds = {{1.0, 0.0}};
    CHECK_THROWS_AS(de_minimize([](const std::vector<double>&) { return 0.0; }, 1, de),
                    MprError);
}

TEST_CASE("BIC at lambda zero matches the unpenalized identity") {
    auto [data, record] = standardize(study_dataset(200, 11));
    const FitResult fit0 = fit_unpenalized(data);
    REQUIRE(fit0.converged);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    const double bic = bic_objective({0.0}, data, lasso, fit0.theta_hat, {});
    const double expect =
        -2.0 * fit0.loglik + 22.0 * std::log(static_cast<double>(data.n()));
    CHECK(bic == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("BIC at enormous lambda approaches the intercept-only model") {
    const SurvivalDataset data_full = study_dataset(300, 13);
    auto [data, record] = standardize(data_full);
    const FitResult fit0 = fit_unpenalized(data);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    const double bic_big =
        bic_objective({1e3}, data, lasso, fit0.theta_hat, {});

    SurvivalDataset intercept_only = data;
    intercept_only.X = Eigen::MatrixXd::Ones(data.n(), 1);
    intercept_only.Z = Eigen::MatrixXd::Ones(data.n(), 1);
    const FitResult fit_icpt = fit_unpenalized(intercept_only);
    REQUIRE(fit_icpt.converged);
    const double bic_icpt = -2.0 * fit_icpt.loglik +
                            2.0 * std::log(static_cast<double>(data.n()));
    CHECK(std::abs(bic_big - bic_icpt) < 0.1);
}

TEST_CASE("BIC surface over a grid is multi-modal") {
    auto [data, record] = standardize(study_dataset(200, 17, 0.25, 3));
    const FitResult fit0 = fit_unpenalized(data);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    lasso.tuning_mode = TuningMode::SeparateNonAdaptive;

    const int g = 20;
    Eigen::MatrixXd bic(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            bic(i, j) = bic_objective({0.5 * i / (g - 1.0), 0.5 * j / (g - 1.0)},
                                      data, lasso, fit0.theta_hat, {});

    int local_minima = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            bool is_min = std::isfinite(bic(i, j));
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= g || nj >= g) continue;
                    if (bic(ni, nj) < bic(i, j)) {
                        is_min = false;
                        break;
                    }
                }
            if (is_min) ++local_minima;
        }
    CHECK(local_minima >= 2);
}

TEST_CASE("select_and_fit with family none degenerates to the plain fit") {
    const SurvivalDataset data = study_dataset(150, 19);
    PenaltySpec none;
    const SelectionResult sel = select_and_fit(data, none);
    CHECK(sel.lambda_star == std::vector<double>{0.0});
    auto [std_data, record] = standardize(data);
    const FitResult plain = fit_unpenalized(std_data);
    CHECK((sel.fit.theta_hat.flatten().array() ==
           plain.theta_hat.flatten().array()).all());
    CHECK(sel.bic_star ==
          doctest::Approx(-2.0 * plain.loglik +
                          22.0 * std::log(static_cast<double>(data.n()))));
}

TEST_CASE("select_and_fit is deterministic given the seed") {
    const SurvivalDataset data = study_dataset(150, 23);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    DEConfig de = quick_de(99, 1);
    de.generations_max = 15;
    const SelectionResult a = select_and_fit(data, lasso, {}, de);
    const SelectionResult b = select_and_fit(data, lasso, {}, de);
    CHECK(a.lambda_star == b.lambda_star);
    CHECK(a.bic_star == b.bic_star);
    CHECK((a.fit.theta_hat.flatten().array() ==
           b.fit.theta_hat.flatten().array()).all());
    CHECK(a.n_inner_fits == b.n_inner_fits);
}

TEST_CASE("selection bic trace is non-increasing and ends at bic_star") {
    const SurvivalDataset data = study_dataset(200, 29);
    PenaltySpec alasso;
    alasso.family = PenaltyFamily::Alasso;
    alasso.tuning_mode = TuningMode::SingleAdaptive;
    DEConfig de = quick_de(31, 1);
    const SelectionResult sel = select_and_fit(data, alasso, {}, de);
    for (size_t g = 1; g < sel.bic_trace.size(); ++g)
        CHECK(sel.bic_trace[g] <= sel.bic_trace[g - 1]);
    CHECK(sel.bic_star == sel.bic_trace.back());
    CHECK(sel.fit.converged);
}

TEST_CASE("all-noise data mostly selects the intercept-only model") {
    SimScenario scenario;
    scenario.true_beta = Eigen::VectorXd::Zero(11);
    scenario.true_beta[0] = -0.5;
    scenario.true_alpha = Eigen::VectorXd::Zero(11);
    scenario.n = 500;
    scenario.rng_seed = 37;
    const double rate = calibrate_censoring(scenario, 0.25);

    PenaltySpec alasso;
    alasso.family = PenaltyFamily::Alasso;
    alasso.tuning_mode = TuningMode::SingleAdaptive;

    int empty_support = 0;
    const int reps = 9;
    for (int rep = 0; rep < reps; ++rep) {
        const SurvivalDataset data = gen_replicate(scenario, rate, rep);
        const SelectionResult sel =
            select_and_fit(data, alasso, {}, quick_de(1000 + rep, 1));
        bool empty = true;
        for (Eigen::Index j = 1; j <= 10; ++j)
            empty = empty && !sel.fit.selected_mask[j] &&
                    !sel.fit.selected_mask[11 + j];
        if (empty) ++empty_support;
    }
    CHECK(empty_support > reps / 2);
}

TEST_CASE("two-tuning search is at least as good as one-tuning (soft)") {
    const SurvivalDataset data = study_dataset(200, 41);
    PenaltySpec one;
    one.family = PenaltyFamily::Lasso;
    PenaltySpec two = one;
    two.tuning_mode = TuningMode::SeparateNonAdaptive;

    DEConfig de1 = quick_de(43, 1);
    DEConfig de2 = quick_de(43, 2);
    de1.generations_max = de2.generations_max = 60;
    const SelectionResult sel1 = select_and_fit(data, one, {}, de1);
    const SelectionResult sel2 = select_and_fit(data, two, {}, de2);
    // DE sampling noise can break this ordering; warn rather than fail
    WARN_LE(sel2.bic_star, sel1.bic_star + de2.bic_tol);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("slow");

TEST_CASE("two-tuning ALASSO recovers the scale support at n=1000") {
    SimScenario scenario;
    scenario.true_beta = study_true_beta();
    scenario.true_alpha = study_true_alpha();
    scenario.n = 1000;
    scenario.rng_seed = 47;
    const double rate = calibrate_censoring(scenario, 0.25);

    PenaltySpec alasso;
    alasso.family = PenaltyFamily::Alasso;
    alasso.tuning_mode = TuningMode::SeparateAdaptive;

    const int reps = 50;
    int scale_match = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const SurvivalDataset data = gen_replicate(scenario, rate, rep);
        const SelectionResult sel =
            select_and_fit(data, alasso, {}, quick_de(5000 + rep, 2));
        bool match = true;
        for (Eigen::Index j = 1; j <= 10; ++j) {
            const bool truly_nonzero = scenario.true_beta[j] != 0.0;
            if (sel.fit.selected_mask[j] != truly_nonzero) match = false;
        }
        if (match) ++scale_match;
    }
    // expected true-model rate exceeds 0.9 at this sample size
    CHECK(scale_match >= static_cast<int>(0.85 * reps));
}

TEST_SUITE_END();
