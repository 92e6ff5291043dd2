#include "mpr/data_model.hpp"

#include <cmath>

namespace mpr {

namespace {

bool is_ones_column(const Eigen::VectorXd& col) {
    return (col.array() == 1.0).all();
}

// sample sd, denominator n-1
double column_sd(const Eigen::VectorXd& col, double mean) {
    const Eigen::Index n = col.size();
    if (n < 2) return 0.0;
    const double ss = (col.array() - mean).square().sum();
    return std::sqrt(ss / static_cast<double>(n - 1));
}

} // namespace

ValidationResult validate(const SurvivalDataset& data) {
    const Eigen::Index n = data.t.size();
    if (data.delta.size() != n || data.X.rows() != n || data.Z.rows() != n)
        return {ErrorCode::DimensionMismatch,
                "t, delta, X and Z must all have n rows"};
    if (n == 0)
        return {ErrorCode::DimensionMismatch, "dataset is empty"};
    if (data.X.cols() < 1 || data.Z.cols() < 1)
        return {ErrorCode::DimensionMismatch,
                "X and Z need at least the intercept column"};

    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(data.t[i] > 0.0) || !std::isfinite(data.t[i]))
            return {ErrorCode::NonPositiveTime,
                    "t[" + std::to_string(i) + "] = " + std::to_string(data.t[i])};
        if (data.delta[i] != 0.0 && data.delta[i] != 1.0)
            return {ErrorCode::BadIndicator,
                    "delta[" + std::to_string(i) + "] = " + std::to_string(data.delta[i])};
    }
    if (data.delta.sum() < 1.0)
        return {ErrorCode::NoEvents, "all observations are censored"};

    if (!is_ones_column(data.X.col(0)) || !is_ones_column(data.Z.col(0)))
        return {ErrorCode::DimensionMismatch,
                "column 0 of X and Z must be the intercept (all ones)"};

    auto check_columns = [&](const Eigen::MatrixXd& m, const char* name) -> ValidationResult {
        for (Eigen::Index j = 1; j < m.cols(); ++j) {
            if (!m.col(j).allFinite())
                return {ErrorCode::DimensionMismatch,
                        std::string(name) + " column " + std::to_string(j) + " has non-finite entries"};
            const double mean = m.col(j).mean();
            if (column_sd(m.col(j), mean) == 0.0)
                return {ErrorCode::ConstantColumnNotIntercept,
                        std::string(name) + " column " + std::to_string(j) + " is constant"};
        }
        return {};
    };
    if (auto r = check_columns(data.X, "X"); !r.ok()) return r;
    if (auto r = check_columns(data.Z, "Z"); !r.ok()) return r;
    return {};
}

void validate_or_throw(const SurvivalDataset& data) {
    const ValidationResult r = validate(data);
    if (!r.ok()) throw MprError(r.code, r.message);
}

std::pair<SurvivalDataset, StandardizationRecord>
standardize(const SurvivalDataset& data) {
    SurvivalDataset out = data;
    StandardizationRecord record;
    record.applied = true;
    record.x_mean.resize(data.p());
    record.x_sd.resize(data.p());
    record.z_mean.resize(data.q());
    record.z_sd.resize(data.q());

    auto scale_columns = [](Eigen::MatrixXd& m, Eigen::VectorXd& means,
                            Eigen::VectorXd& sds, const char* name) {
        for (Eigen::Index j = 1; j < m.cols(); ++j) {
            const double mean = m.col(j).mean();
            const double sd = column_sd(m.col(j), mean);
            if (sd <= 0.0)
                throw MprError(ErrorCode::ConstantColumnNotIntercept,
                               std::string(name) + " column " + std::to_string(j) + " is constant");
            means[j - 1] = mean;
            sds[j - 1] = sd;
            m.col(j) = (m.col(j).array() - mean) / sd;
        }
    };
    scale_columns(out.X, record.x_mean, record.x_sd, "X");
    scale_columns(out.Z, record.z_mean, record.z_sd, "Z");
    return {std::move(out), std::move(record)};
}

// Standardized column u_j = (x_j - mu_j) / s_j, so
//   sum_j b_j u_j + b_0 = sum_j (b_j / s_j) x_j + (b_0 - sum_j b_j mu_j / s_j).
Eigen::MatrixXd destandardize_matrix(const StandardizationRecord& record) {
    const Eigen::Index p = record.x_mean.size();
    const Eigen::Index q = record.z_mean.size();
    const Eigen::Index d = p + q + 2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    a(0, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        a(j + 1, j + 1) = 1.0 / record.x_sd[j];
        a(0, j + 1) = -record.x_mean[j] / record.x_sd[j];
    }
    const Eigen::Index off = p + 1;
    a(off, off) = 1.0;
    for (Eigen::Index j = 0; j < q; ++j) {
        a(off + j + 1, off + j + 1) = 1.0 / record.z_sd[j];
        a(off, off + j + 1) = -record.z_mean[j] / record.z_sd[j];
    }
    return a;
}

ThetaVector destandardize_theta(const ThetaVector& theta,
                                const StandardizationRecord& record) {
    if (theta.beta.size() != record.x_mean.size() + 1 ||
        theta.alpha.size() != record.z_mean.size() + 1)
        throw MprError(ErrorCode::DimensionMismatch,
                       "theta does not match the standardization record");
    if (!record.applied) return theta;

    ThetaVector out = theta;
    for (Eigen::Index j = 1; j < theta.beta.size(); ++j) {
        out.beta[j] = theta.beta[j] / record.x_sd[j - 1];
        out.beta[0] -= theta.beta[j] * record.x_mean[j - 1] / record.x_sd[j - 1];
    }
    for (Eigen::Index j = 1; j < theta.alpha.size(); ++j) {
        out.alpha[j] = theta.alpha[j] / record.z_sd[j - 1];
        out.alpha[0] -= theta.alpha[j] * record.z_mean[j - 1] / record.z_sd[j - 1];
    }
    return out;
}

Eigen::MatrixXd destandardize_covariance(const Eigen::MatrixXd& cov,
                                         const StandardizationRecord& record) {
    const Eigen::MatrixXd a = destandardize_matrix(record);
    if (cov.rows() != a.rows() || cov.cols() != a.cols())
        throw MprError(ErrorCode::DimensionMismatch,
                       "covariance does not match the standardization record");
    Eigen::MatrixXd out = a * cov * a.transpose();
    return 0.5 * (out + out.transpose());
}

} // namespace mpr
