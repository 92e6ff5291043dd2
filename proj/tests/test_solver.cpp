#include <doctest.h>

#include <cmath>

#include "mpr/simulation.hpp"
#include "mpr/solver.hpp"
#include "test_helpers.hpp"

using namespace mpr;

namespace {

double penalized_objective(const ThetaVector& theta, const SurvivalDataset& data,
                           const PenaltySpec& spec, const LambdaVector& lambda) {
    return log_likelihood(theta, data) -
           data.n() * assemble_penalty_terms(theta, lambda, spec).total;
}

} // namespace

TEST_SUITE_BEGIN("solver");

TEST_CASE("unpenalized fit reaches a stationary point") {
    const SurvivalDataset data = test::random_dataset(101, 150, 3, 2);
    const FitResult fit = fit_unpenalized(data);
    REQUIRE(fit.converged);
    CHECK(score(fit.theta_hat, data).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("all lambda zero reproduces the unpenalized fit bit for bit") {
    const SurvivalDataset data = test::random_dataset(103, 120, 2, 2);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    const LambdaVector zero = LambdaVector::zeros(3, 3);
    ThetaVector init = ThetaVector::zeros(3, 3);
    init.beta[0] = std::log(data.delta.sum() / data.t.sum());

    const FitResult penalized = fit_penalized(data, lasso, zero, init);
    const FitResult plain = fit_unpenalized(data);
    REQUIRE(penalized.converged);
    REQUIRE(plain.converged);
    const double diff = (penalized.theta_hat.flatten() - plain.theta_hat.flatten())
                            .lpNorm<Eigen::Infinity>();
    CHECK(diff <= 1e-8);
}

TEST_CASE("huge lambda shrinks every non-intercept coefficient below tolerance") {
    const SurvivalDataset raw = test::random_dataset(105, 200, 4, 3);
    auto [data, record] = standardize(raw);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    const LambdaVector lambda = expand_lambda({1e3}, lasso, 4, 3);
    const FitResult init_fit = fit_unpenalized(data);
    const FitResult fit = fit_penalized(data, lasso, lambda, init_fit.theta_hat);
    REQUIRE(fit.converged);
    for (Eigen::Index j = 1; j <= 4; ++j)
        CHECK(std::abs(fit.theta_hat.beta[j]) < lasso.zero_tol);
    for (Eigen::Index j = 1; j <= 3; ++j)
        CHECK(std::abs(fit.theta_hat.alpha[j]) < lasso.zero_tol);
}

TEST_CASE("penalized fit is a local maximum of the penalized likelihood") {
    SimScenario scenario;
    scenario.true_beta = study_true_beta();
    scenario.true_alpha = study_true_alpha();
    scenario.n = 200;
    scenario.rng_seed = 42;
    const SurvivalDataset raw = gen_replicate(scenario, 0.2, 0);
    auto [data, record] = standardize(raw);

    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    const LambdaVector lambda = expand_lambda({0.05}, lasso, data.p(), data.q());
    const FitResult init_fit = fit_unpenalized(data);
    const FitResult fit = fit_penalized(data, lasso, lambda, init_fit.theta_hat);
    REQUIRE(fit.converged);

    const double at_hat = penalized_objective(fit.theta_hat, data, lasso, lambda);
    Rng rng(4242);
    const Eigen::Index d = fit.theta_hat.dim();
    for (int rep = 0; rep < 1000; ++rep) {
        Eigen::VectorXd noise(d);
        for (Eigen::Index j = 0; j < d; ++j) noise[j] = rng.normal();
        noise *= 0.05 * rng.uniform() / noise.norm();
        const ThetaVector probe = ThetaVector::unflatten(
            fit.theta_hat.flatten() + noise, data.X.cols(), data.Z.cols());
        CHECK(penalized_objective(probe, data, lasso, lambda) <= at_hat + 1e-9);
    }
}

TEST_CASE("monotone ascent of accepted iterates") {
    const SurvivalDataset data = test::random_dataset(107, 80, 3, 3);
    PenaltySpec scad;
    scad.family = PenaltyFamily::Scad;
    const LambdaVector lambda = expand_lambda({0.2}, scad, 3, 3);
    const FitResult fit =
        fit_penalized(data, scad, lambda, ThetaVector::zeros(4, 4));
    for (size_t m = 1; m < fit.penalized_loglik_trace.size(); ++m)
        CHECK(fit.penalized_loglik_trace[m] >=
              fit.penalized_loglik_trace[m - 1] - 1e-12);
}

TEST_CASE("exponential data recovers a zero shape intercept") {
    // tau = 1 (beta0 = 0), gamma = 1 (alpha0 = 0), heavy censoring-free draw
    Rng rng(109);
    const int n = 5000;
    SurvivalDataset data;
    data.t.resize(n);
    data.delta = Eigen::VectorXd::Ones(n);
    data.X = Eigen::MatrixXd::Ones(n, 1);
    data.Z = Eigen::MatrixXd::Ones(n, 1);
    for (int i = 0; i < n; ++i) data.t[i] = rng.exponential(1.0);

    const FitResult fit = fit_unpenalized(data);
    REQUIRE(fit.converged);
    REQUIRE(fit.covariance.has_value());
    const double se_alpha = std::sqrt((*fit.covariance)(1, 1));
    CHECK(std::abs(fit.theta_hat.alpha[0]) < 3.0 * se_alpha);
}

TEST_CASE("stationarity on an intercept-only fit with varying times") {
    SurvivalDataset data;
    data.t = Eigen::Vector3d(0.5, 1.0, 2.0);
    data.delta = Eigen::Vector3d::Ones();
    data.X = Eigen::MatrixXd::Ones(3, 1);
    data.Z = Eigen::MatrixXd::Ones(3, 1);
    const FitResult fit = fit_unpenalized(data);
    REQUIRE(fit.converged);
    CHECK(score(fit.theta_hat, data).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("identical repeated times degenerate gracefully") {
    // all events at t = 1 make the shape likelihood unbounded; the solver
    // must stop without converging rather than crash
    SurvivalDataset data;
    data.t = Eigen::Vector3d::Ones();
    data.delta = Eigen::Vector3d::Ones();
    data.X = Eigen::MatrixXd::Ones(3, 1);
    data.Z = Eigen::MatrixXd::Ones(3, 1);
    const FitResult fit = fit_unpenalized(data);
    CHECK_FALSE(fit.converged);
}

TEST_CASE("warm start at the truth converges quickly") {
    SimScenario scenario;
    scenario.true_beta = study_true_beta();
    scenario.true_alpha = study_true_alpha();
    scenario.n = 500;
    scenario.rng_seed = 7;
    const SurvivalDataset data = gen_replicate(scenario, 0.2, 1);
    ThetaVector truth{scenario.true_beta, scenario.true_alpha};
    const FitResult fit = fit_unpenalized(data, truth);
    REQUIRE(fit.converged);
    CHECK(fit.n_iter <= 10);
}

TEST_CASE("sandwich covariance at lambda zero is the inverse information") {
    const SurvivalDataset data = test::random_dataset(111, 100, 2, 1);
    const FitResult fit = fit_unpenalized(data);
    REQUIRE(fit.converged);
    PenaltySpec none;
    const LambdaVector zero = LambdaVector::zeros(3, 2);
    const Eigen::MatrixXd cov =
        sandwich_covariance(fit.theta_hat, data, none, zero);
    const Eigen::MatrixXd info = observed_information(fit.theta_hat, data);
    const Eigen::MatrixXd inv_info = info.fullPivLu().inverse();
    CHECK(test::rel_err(cov, inv_info) < 1e-8);
    CHECK(cov.diagonal().minCoeff() > 0.0);
}

TEST_CASE("sandwich matches a dense-inverse oracle on a 6-parameter instance") {
    const SurvivalDataset raw = test::random_dataset(113, 150, 2, 1);
    auto [data, record] = standardize(raw);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    const LambdaVector lambda = expand_lambda({0.1}, lasso, 2, 1);
    const FitResult init_fit = fit_unpenalized(data);
    const FitResult fit = fit_penalized(data, lasso, lambda, init_fit.theta_hat);
    REQUIRE(fit.converged);

    const Eigen::MatrixXd info0 = observed_information(fit.theta_hat, data);
    const PenaltyTerms terms =
        assemble_penalty_terms(fit.theta_hat, lambda, lasso);
    Eigen::MatrixXd info_l = info0;
    const double n = static_cast<double>(data.n());
    for (Eigen::Index j = 0; j < 3; ++j) info_l(j, j) += n * terms.sigma_beta[j];
    for (Eigen::Index j = 0; j < 2; ++j)
        info_l(3 + j, 3 + j) += n * terms.sigma_alpha[j];
    const Eigen::MatrixXd inv = info_l.fullPivLu().inverse();
    const Eigen::MatrixXd expect = inv * info0 * inv;

    const Eigen::MatrixXd cov =
        sandwich_covariance(fit.theta_hat, data, lasso, lambda);
    CHECK(test::rel_err(cov, expect) < 1e-8);
    CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective degrees of freedom") {
    const SurvivalDataset raw = test::random_dataset(115, 120, 3, 2);
    auto [data, record] = standardize(raw);
    const FitResult fit = fit_unpenalized(data);
    REQUIRE(fit.converged);

    SUBCASE("lambda zero gives exactly p+q+2") {
        PenaltySpec none;
        const LambdaVector zero = LambdaVector::zeros(4, 3);
        CHECK(effective_df(fit.theta_hat, data, none, zero) == 7.0);
        const auto [df_b, df_a] =
            effective_df_split(fit.theta_hat, data, none, zero);
        CHECK(df_b == 4.0);
        CHECK(df_a == 3.0);
    }

    SUBCASE("lasso penalization can only reduce the df") {
        PenaltySpec lasso;
        lasso.family = PenaltyFamily::Lasso;
        for (double lam : {0.01, 0.05, 0.2, 0.8}) {
            const LambdaVector lambda = expand_lambda({lam}, lasso, 3, 2);
            const FitResult pfit =
                fit_penalized(data, lasso, lambda, fit.theta_hat);
            REQUIRE(pfit.converged);
            const double e =
                effective_df(pfit.theta_hat, data, lasso, lambda);
            CHECK(e <= 7.0 + 1e-8);
            CHECK(e > 0.0);
        }
    }
}

TEST_CASE("permutation equivariance of the fit") {
    const SurvivalDataset raw = test::random_dataset(117, 150, 3, 2);
    auto [data, record] = standardize(raw);
    PenaltySpec lasso;
    lasso.family = PenaltyFamily::Lasso;
    LambdaVector lambda = LambdaVector::zeros(4, 3);
    lambda.beta << 0.0, 0.02, 0.08, 0.15;
    lambda.alpha << 0.0, 0.05, 0.11;
    const FitResult base =
        fit_penalized(data, lasso, lambda, fit_unpenalized(data).theta_hat);
    REQUIRE(base.converged);

    // swap covariate columns 1 and 3 of X together with their lambdas
    SurvivalDataset permuted = data;
    permuted.X.col(1).swap(permuted.X.col(3));
    LambdaVector lambda_p = lambda;
    std::swap(lambda_p.beta[1], lambda_p.beta[3]);
    const FitResult perm = fit_penalized(permuted, lasso, lambda_p,
                                         fit_unpenalized(permuted).theta_hat);
    REQUIRE(perm.converged);
    CHECK(perm.theta_hat.beta[1] == doctest::Approx(base.theta_hat.beta[3]).epsilon(1e-9));
    CHECK(perm.theta_hat.beta[3] == doctest::Approx(base.theta_hat.beta[1]).epsilon(1e-9));
    CHECK(perm.theta_hat.beta[2] == doctest::Approx(base.theta_hat.beta[2]).epsilon(1e-9));
}

TEST_CASE("determinism: identical inputs give bit-identical results") {
    const SurvivalDataset data = test::random_dataset(119, 90, 2, 2);
    PenaltySpec scad;
    scad.family = PenaltyFamily::Scad;
    const LambdaVector lambda = expand_lambda({0.1}, scad, 2, 2);
    const ThetaVector init = fit_unpenalized(data).theta_hat;
    const FitResult a = fit_penalized(data, scad, lambda, init);
    const FitResult b = fit_penalized(data, scad, lambda, init);
    CHECK((a.theta_hat.flatten().array() == b.theta_hat.flatten().array()).all());
    CHECK(a.n_iter == b.n_iter);
    CHECK(a.penalized_loglik == b.penalized_loglik);
}

TEST_CASE("a Newton step from a perturbed MLE shrinks the score") {
    const SurvivalDataset data = test::random_dataset(121, 400, 2, 2);
    const FitResult fit = fit_unpenalized(data);
    REQUIRE(fit.converged);
    Rng rng(122);
    Eigen::VectorXd noise(fit.theta_hat.dim());
    for (Eigen::Index j = 0; j < noise.size(); ++j) noise[j] = 0.05 * rng.normal();
    const ThetaVector start = ThetaVector::unflatten(
        fit.theta_hat.flatten() + noise, data.X.cols(), data.Z.cols());

    const Eigen::VectorXd g = score(start, data);
    const Eigen::MatrixXd info = observed_information(start, data);
    const Eigen::VectorXd step = info.ldlt().solve(g);
    const ThetaVector next = ThetaVector::unflatten(
        start.flatten() + step, data.X.cols(), data.Z.cols());
    CHECK(score(next, data).lpNorm<Eigen::Infinity>() <
          g.lpNorm<Eigen::Infinity>());
}

TEST_SUITE_END();
