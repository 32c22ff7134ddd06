#include "fairsched/lr.hpp"

#include "fairsched/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace fairsched {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct Scaling {
    Vector mean;
    Vector scale;
};

Scaling column_scaling(const Matrix& X) {
    const auto n = static_cast<double>(X.rows());
    Scaling s{X.colwise().mean().transpose(), Vector::Ones(X.cols())};
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.mean(j)).square().sum() / n;
        if (var > 1e-24) s.scale(j) = std::sqrt(var);
    }
    return s;
}

}  // namespace

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::optional<double> TrainedModel::coefficient(std::string_view name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return coefficients[i];
    return std::nullopt;
}

double TrainedModel::linear_term(const FeatureRow& row) const {
    double z = intercept;
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        auto idx = feature_index(feature_names[i]);
        if (!idx) throw UsageError("row does not supply model feature '" + feature_names[i] + "'");
        z += coefficients[i] * row.values[*idx];
    }
    return z;
}

bool TrainedModel::has_cluster_features() const {
    return std::any_of(feature_names.begin(), feature_names.end(),
                       [](const std::string& n) { return is_cluster_feature(n); });
}

void TrainedModel::validate() const {
    if (feature_names.size() != coefficients.size())
        throw DataError("model has " + std::to_string(coefficients.size()) + " coefficients for " +
                        std::to_string(feature_names.size()) + " features");
    if (!std::isfinite(intercept) ||
        !std::all_of(coefficients.begin(), coefficients.end(), [](double v) { return std::isfinite(v); }))
        throw NumericError("model contains non-finite values");
}

std::vector<std::string> all_feature_names() { return {kFeatureNames.begin(), kFeatureNames.end()}; }

std::vector<std::string> non_cluster_feature_names() {
    return {kFeatureNames.begin() + kClusterFeatureCount, kFeatureNames.end()};
}

Matrix design_matrix(const std::vector<FeatureRow>& rows, const std::vector<std::string>& names) {
    std::vector<std::size_t> all(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) all[i] = i;
    return design_matrix(rows, all, names);
}

Matrix design_matrix(const std::vector<FeatureRow>& rows, const std::vector<std::size_t>& subset,
                     const std::vector<std::string>& names) {
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        auto idx = feature_index(name);
        if (!idx) throw UsageError("unknown feature '" + name + "'");
        cols.push_back(*idx);
    }
    Matrix X(static_cast<Eigen::Index>(subset.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < subset.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[subset[r]].values[cols[c]];
    return X;
}

Vector label_vector(const std::vector<bool>& labels) {
    Vector y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i] ? 1.0 : 0.0;
    return y;
}

TrainResult fit_logistic(const Matrix& X, const Vector& y, const std::vector<std::string>& names,
                         const TrainConfig& config, const FitOptions& options) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (static_cast<std::size_t>(p) != names.size()) throw UsageError("feature name count mismatch");
    if (y.size() != n) throw UsageError("label count mismatch");
    if (n == 0) throw DegenerateLabels("no training rows");
    const double positives = y.sum();
    if (positives < 0.5 || positives > static_cast<double>(n) - 0.5)
        throw DegenerateLabels("training labels are all one class");
    if (!X.allFinite()) throw DataError("feature matrix has non-finite entries");

    Vector w = Vector::Ones(n);
    if (options.sample_weights) {
        if (options.sample_weights->size() != n) throw UsageError("sample weight count mismatch");
        w = *options.sample_weights * (static_cast<double>(n) / options.sample_weights->sum());
    }

    Scaling scaling{Vector::Zero(p), Vector::Ones(p)};
    if (config.standardize) scaling = column_scaling(X);
    const Matrix Xs = config.standardize
                          ? Matrix((X.rowwise() - scaling.mean.transpose()).array().rowwise() /
                                   scaling.scale.transpose().array())
                          : X;
    const Vector inv_scale2 = scaling.scale.array().square().inverse();
    const double lambda = config.l2_weight;
    const double inv_n = 1.0 / static_cast<double>(n);

    // Parameters: [coefficients in optimiser coordinates..., intercept].
    Objective objective = [&](const Vector& theta, Vector& grad) {
        const auto beta = theta.head(p);
        const double b = theta(p);
        Vector z = (Xs * beta).array() + b;
        double loss = 0.0;
        Vector dz(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            loss += w(i) * (softplus(z(i)) - y(i) * z(i));
            dz(i) = w(i) * (sigmoid(z(i)) - y(i)) * inv_n;
        }
        loss *= inv_n;
        loss += 0.5 * lambda * beta.cwiseProduct(beta).dot(inv_scale2);
        if (options.penalty) {
            Vector pg = Vector::Zero(n);
            loss += options.penalty(z, pg);
            dz += pg;
        }
        grad.resize(p + 1);
        grad.head(p) = Xs.transpose() * dz + lambda * beta.cwiseProduct(inv_scale2);
        grad(p) = dz.sum();
        return loss;
    };

    Vector theta0 = Vector::Zero(p + 1);
    if (options.warm_start) {
        const auto& ws = *options.warm_start;
        if (ws.feature_names != names) throw UsageError("warm start model has a different feature set");
        double b = ws.intercept;
        for (Eigen::Index j = 0; j < p; ++j) {
            theta0(j) = ws.coefficients[static_cast<std::size_t>(j)] * scaling.scale(j);
            b += ws.coefficients[static_cast<std::size_t>(j)] * scaling.mean(j);
        }
        theta0(p) = b;
    } else {
        const double rate = (w.array() * y.array()).sum() / w.sum();
        theta0(p) = std::log(rate / (1.0 - rate));
    }

    MinimizeOptions mopts;
    mopts.max_iterations = config.max_iterations;
    mopts.gradient_tolerance = config.convergence_tolerance;
    mopts.initial_step = config.step_size;
    MinimizeResult opt = minimize(objective, theta0, mopts);

    TrainResult result;
    result.model.feature_names = names;
    result.model.coefficients.resize(static_cast<std::size_t>(p));
    double intercept = opt.x(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double beta = opt.x(j) / scaling.scale(j);
        result.model.coefficients[static_cast<std::size_t>(j)] = beta;
        intercept -= beta * scaling.mean(j);
    }
    result.model.intercept = intercept;
    result.status = opt.status == MinimizeStatus::Converged ? TrainStatus::Converged : TrainStatus::NotConverged;
    result.iterations = opt.iterations;
    result.loss = opt.value;
    result.gradient_norm = opt.gradient_norm;
    result.loss_trace = std::move(opt.trace);
    result.model.validate();
    return result;
}

TrainResult train_logistic(const std::vector<FeatureRow>& features, const std::vector<bool>& labels,
                           const TrainConfig& config) {
    if (features.size() != labels.size()) throw UsageError("feature and label counts differ");
    const auto names = all_feature_names();
    return fit_logistic(design_matrix(features, names), label_vector(labels), names, config);
}

RiskScore predict_score(const TrainedModel& model, const FeatureRow& row) {
    return {row.inspection_id, sigmoid(model.linear_term(row))};
}

Vector linear_terms(const TrainedModel& model, const Matrix& X) {
    if (static_cast<std::size_t>(X.cols()) != model.coefficients.size())
        throw UsageError("design matrix does not match the model's features");
    const Eigen::Map<const Vector> beta(model.coefficients.data(), X.cols());
    return (X * beta).array() + model.intercept;
}

Vector predict_scores(const TrainedModel& model, const Matrix& X) {
    return linear_terms(model, X).unaryExpr([](double z) { return sigmoid(z); });
}

LossAndGradient log_loss_and_gradient(const TrainedModel& model, const Matrix& X, const Vector& y,
                                      double l2_weight) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    const Vector z = linear_terms(model, X);
    const Eigen::Map<const Vector> beta(model.coefficients.data(), p);
    LossAndGradient out;
    Vector dz(n);
    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        nll += softplus(z(i)) - y(i) * z(i);
        dz(i) = sigmoid(z(i)) - y(i);
    }
    const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
    out.penalty = 0.5 * l2_weight * beta.squaredNorm();
    out.loss = nll * inv_n + out.penalty;
    out.gradient.resize(p + 1);
    out.gradient.head(p) = X.transpose() * dz * inv_n + l2_weight * beta;
    out.gradient(p) = dz.sum() * inv_n;
    return out;
}

void write_model(std::ostream& out, const TrainedModel& model) {
    for (std::size_t i = 0; i < model.feature_names.size(); ++i)
        out << model.feature_names[i] << '\t' << format_double17(model.coefficients[i]) << '\n';
    out << "__intercept__\t" << format_double17(model.intercept) << '\n';
}

TrainedModel read_model(std::istream& in) {
    TrainedModel model;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError("model line without tab: '" + line + "'");
        auto name = line.substr(0, tab);
        auto value = parse_double(std::string_view(line).substr(tab + 1));
        if (!value) throw DataError("model line with bad value: '" + line + "'");
        if (name == "__intercept__") {
            model.intercept = *value;
            model.validate();
            return model;
        }
        model.feature_names.push_back(name);
        model.coefficients.push_back(*value);
    }
    throw DataError("model file ended before __intercept__");
}

}  // namespace fairsched
