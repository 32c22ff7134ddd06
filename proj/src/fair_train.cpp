#include "fairsched/fair_train.hpp"

#include "fairsched/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace fairsched {

namespace {

constexpr double kZafarSlack = 1e-4;
constexpr double kZafarInitialWeight = 10.0;
constexpr int kZafarMaxEscalations = 20;

TrainConfig standardized(TrainConfig config) {
    config.standardize = true;
    return config;
}

struct OneVsRest {
    int value;
    Vector centered;  // indicator minus its mean
};

std::vector<OneVsRest> one_vs_rest(const ProtectedSpec& spec, std::vector<std::string>* warnings) {
    const auto n = static_cast<Eigen::Index>(spec.values.size());
    std::vector<OneVsRest> out;
    for (int v = 0; v < spec.value_count; ++v) {
        Vector ind(n);
        for (Eigen::Index i = 0; i < n; ++i) ind(i) = spec.values[static_cast<std::size_t>(i)] == v ? 1.0 : 0.0;
        const double count = ind.sum();
        if (count == 0.0) {
            if (warnings)
                warnings->push_back("protected value " + std::to_string(v) + " absent from data; excluded");
            continue;
        }
        out.push_back({v, (ind.array() - count / static_cast<double>(n)).matrix()});
    }
    return out;
}

}  // namespace

ProtectedSpec ProtectedSpec::polyvalent(const std::vector<Cluster>& clusters) {
    ProtectedSpec spec;
    spec.kind = ProtectedKind::PolyvalentCluster;
    spec.value_count = static_cast<int>(kClusterCount);
    spec.values.reserve(clusters.size());
    for (Cluster c : clusters) spec.values.push_back(static_cast<int>(index_of(c)));
    return spec;
}

ProtectedSpec ProtectedSpec::binary(const std::vector<Cluster>& clusters) {
    ProtectedSpec spec;
    spec.kind = ProtectedKind::BinaryCluster;
    spec.value_count = 2;
    spec.values.reserve(clusters.size());
    for (Cluster c : clusters) spec.values.push_back(binarize_cluster(c));
    return spec;
}

void ProtectedSpec::validate(std::size_t rows) const {
    if (value_count < 2) throw UsageError("protected attribute needs at least two values");
    if (values.size() != rows) throw UsageError("protected attribute does not cover every training row");
    for (int v : values)
        if (v < 0 || v >= value_count) throw UsageError("protected attribute value out of range");
}

std::string_view objective_name(FairObjective o) { return o == FairObjective::DP ? "DP" : "EOpp"; }

FairObjective parse_objective(std::string_view s) {
    if (s == "DP" || s == "dp") return FairObjective::DP;
    if (s == "EOpp" || s == "eopp" || s == "EOPP") return FairObjective::EOpp;
    throw UsageError("unknown fairness objective '" + std::string(s) + "'");
}

TrainResult train_no_sanitarian(const std::vector<FeatureRow>& features, const std::vector<bool>& labels,
                                const TrainConfig& config) {
    if (features.size() != labels.size()) throw UsageError("feature and label counts differ");
    const auto names = non_cluster_feature_names();
    return fit_logistic(design_matrix(features, names), label_vector(labels), names, config);
}

double CovarianceReport::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, std::abs(e.covariance));
    return m;
}

CovarianceReport covariance_decision_protected(const TrainedModel& model, const Matrix& X,
                                               const ProtectedSpec& protected_attr) {
    protected_attr.validate(static_cast<std::size_t>(X.rows()));
    CovarianceReport report;
    const Vector z = linear_terms(model, X);
    const double inv_n = 1.0 / static_cast<double>(X.rows());
    for (const auto& ovr : one_vs_rest(protected_attr, &report.warnings))
        report.entries.push_back({ovr.value, ovr.centered.dot(z) * inv_n});
    return report;
}

ZafarResult train_zafar(const Matrix& X, const Vector& y, const std::vector<std::string>& names,
                        const ProtectedSpec& protected_attr, double c, const TrainConfig& config) {
    if (protected_attr.kind != ProtectedKind::PolyvalentCluster)
        throw UsageError("covariance-constrained training expects a polyvalent protected attribute");
    if (!(c >= 0.0)) throw UsageError("covariance threshold must be non-negative");
    protected_attr.validate(static_cast<std::size_t>(X.rows()));

    ZafarResult result;
    result.threshold = c;
    std::vector<std::string> warnings;
    const auto groups = one_vs_rest(protected_attr, &warnings);
    const double inv_n = 1.0 / static_cast<double>(X.rows());

    double weight = kZafarInitialWeight;
    const TrainConfig cfg = standardized(config);
    const TrainedModel* warm = nullptr;
    TrainedModel previous;
    for (int escalation = 0;; ++escalation) {
        FitOptions opts;
        opts.warm_start = warm;
        opts.penalty = [&groups, c, weight, inv_n](const Vector& z, Vector& grad_z) {
            double value = 0.0;
            for (const auto& g : groups) {
                const double cov = g.centered.dot(z) * inv_n;
                const double excess = std::abs(cov) - c;
                if (excess <= 0.0) continue;
                value += weight * excess * excess;
                grad_z += (2.0 * weight * excess * (cov > 0 ? 1.0 : -1.0) * inv_n) * g.centered;
            }
            return value;
        };
        result.fit = fit_logistic(X, y, names, cfg, opts);
        result.covariances = covariance_decision_protected(result.fit.model, X, protected_attr);
        result.max_violation = std::max(0.0, result.covariances.max_abs() - c);
        result.escalations = escalation;
        result.penalty_weight = weight;
        // Stop with a margin below the reporting tolerance.
        if (result.max_violation <= 0.5 * kZafarSlack || escalation == kZafarMaxEscalations) break;
        weight *= 2.0;
        previous = result.fit.model;
        warm = &previous;
    }
    result.satisfied = result.max_violation <= kZafarSlack;
    result.covariances.warnings.insert(result.covariances.warnings.begin(), warnings.begin(), warnings.end());
    if (!result.satisfied)
        result.covariances.warnings.push_back("covariance constraint violated by " +
                                              format_double(result.max_violation) + " after " +
                                              std::to_string(kZafarMaxEscalations) + " escalations");
    return result;
}

namespace {

struct GapGroups {
    std::vector<Eigen::Index> rows[2];
};

GapGroups gap_groups(const Vector& y, const ProtectedSpec& spec, FairObjective objective) {
    GapGroups g;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (objective == FairObjective::EOpp && y(i) < 0.5) continue;
        g.rows[spec.values[static_cast<std::size_t>(i)]].push_back(i);
    }
    for (int a = 0; a < 2; ++a)
        if (g.rows[a].empty())
            throw DataError(std::string("protected group A=") + std::to_string(a) + " has no " +
                            (objective == FairObjective::EOpp ? "positive-label rows" : "rows"));
    return g;
}

double mean_score(const Vector& z, const std::vector<Eigen::Index>& rows) {
    double s = 0.0;
    for (auto i : rows) s += sigmoid(z(i));
    return s / static_cast<double>(rows.size());
}

}  // namespace

double binary_score_gap(const TrainedModel& model, const Matrix& X, const Vector& y,
                        const ProtectedSpec& protected_attr, FairObjective objective) {
    protected_attr.validate(static_cast<std::size_t>(X.rows()));
    const auto groups = gap_groups(y, protected_attr, objective);
    const Vector z = linear_terms(model, X);
    return mean_score(z, groups.rows[1]) - mean_score(z, groups.rows[0]);
}

BinaryFairResult train_binary_fair(const Matrix& X, const Vector& y, const std::vector<std::string>& names,
                                   const ProtectedSpec& protected_attr, FairObjective objective, double C,
                                   const TrainConfig& config) {
    if (protected_attr.kind != ProtectedKind::BinaryCluster || protected_attr.value_count != 2)
        throw UsageError("binary-fair training expects a binary protected attribute");
    if (!(C >= 0.0)) throw UsageError("regularisation strength must be non-negative");
    protected_attr.validate(static_cast<std::size_t>(X.rows()));
    const auto groups = gap_groups(y, protected_attr, objective);

    FitOptions opts;
    if (C > 0.0) {
        opts.penalty = [&groups, C](const Vector& z, Vector& grad_z) {
            const double gap = mean_score(z, groups.rows[1]) - mean_score(z, groups.rows[0]);
            for (int a = 0; a < 2; ++a) {
                const double sign = a == 1 ? 1.0 : -1.0;
                const double scale = 2.0 * C * gap * sign / static_cast<double>(groups.rows[a].size());
                for (auto i : groups.rows[a]) {
                    const double s = sigmoid(z(i));
                    grad_z(i) += scale * s * (1.0 - s);
                }
            }
            return C * gap * gap;
        };
    }
    BinaryFairResult result;
    result.fit = fit_logistic(X, y, names, standardized(config), opts);
    result.strength = C;
    result.objective = objective;
    const Vector z = linear_terms(result.fit.model, X);
    result.gap = mean_score(z, groups.rows[1]) - mean_score(z, groups.rows[0]);
    result.penalty = result.gap * result.gap;
    return result;
}

void EnsembleModel::validate() const {
    if (members.empty()) throw DataError("ensemble has no members");
    double total = 0.0;
    for (const auto& m : members) {
        if (!(m.weight >= 0.0)) throw DataError("ensemble weight must be non-negative");
        m.model.validate();
        total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DataError("ensemble weights do not sum to 1");
}

double group_accuracy(const Vector& predicted, const Vector& y, const std::vector<int>& groups, int group) {
    double hit = 0.0, count = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (groups[static_cast<std::size_t>(i)] != group) continue;
        count += 1.0;
        if ((predicted(i) >= 0.5) == (y(i) >= 0.5)) hit += 1.0;
    }
    return count > 0 ? hit / count : std::numeric_limits<double>::quiet_NaN();
}

EnsembleResult train_proportional_ensemble(const Matrix& X, const Vector& y,
                                           const std::vector<std::string>& names,
                                           const std::vector<int>& groups, int group_count,
                                           const EnsembleConfig& ensemble_config, const TrainConfig& config) {
    if (ensemble_config.rounds < 1) throw UsageError("ensemble needs at least one round");
    if (groups.size() != static_cast<std::size_t>(X.rows())) throw UsageError("group labels do not cover every row");
    const Eigen::Index n = X.rows();

    EnsembleResult result;
    std::vector<std::vector<Eigen::Index>> rows(static_cast<std::size_t>(group_count));
    for (Eigen::Index i = 0; i < n; ++i) {
        const int g = groups[static_cast<std::size_t>(i)];
        if (g < 0 || g >= group_count) throw UsageError("group label out of range");
        rows[static_cast<std::size_t>(g)].push_back(i);
    }

    std::vector<int> active;
    result.standalone_accuracy.assign(static_cast<std::size_t>(group_count),
                                      std::numeric_limits<double>::quiet_NaN());
    for (int g = 0; g < group_count; ++g) {
        const auto& idx = rows[static_cast<std::size_t>(g)];
        if (idx.size() < ensemble_config.min_group_rows) {
            if (!idx.empty() || ensemble_config.min_group_rows > 0) {
                result.excluded_groups.push_back(g);
                result.warnings.push_back("group " + std::to_string(g) + " has " + std::to_string(idx.size()) +
                                          " rows (< " + std::to_string(ensemble_config.min_group_rows) +
                                          "); excluded from reweighting");
            }
            continue;
        }
        active.push_back(g);
        Matrix Xg(static_cast<Eigen::Index>(idx.size()), X.cols());
        Vector yg(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            Xg.row(static_cast<Eigen::Index>(r)) = X.row(idx[r]);
            yg(static_cast<Eigen::Index>(r)) = y(idx[r]);
        }
        double acc;
        try {
            const auto fit = fit_logistic(Xg, yg, names, config);
            const Vector pred = predict_scores(fit.model, Xg);
            double hit = 0.0;
            for (Eigen::Index i = 0; i < yg.size(); ++i)
                if ((pred(i) >= ensemble_config.threshold) == (yg(i) >= 0.5)) hit += 1.0;
            acc = hit / static_cast<double>(yg.size());
        } catch (const DegenerateLabels&) {
            const double rate = yg.mean();
            acc = std::max(rate, 1.0 - rate);  // constant predictor
        }
        result.standalone_accuracy[static_cast<std::size_t>(g)] = acc;
    }

    Vector sample_weights = Vector::Ones(n);
    Vector prob_sum = Vector::Zero(n);
    TrainedModel last;
    for (int round = 0; round < ensemble_config.rounds; ++round) {
        FitOptions opts;
        opts.sample_weights = &sample_weights;
        if (round > 0) opts.warm_start = &last;
        auto fit = fit_logistic(X, y, names, config, opts);
        last = fit.model;
        prob_sum += predict_scores(fit.model, X);
        result.ensemble.members.push_back({std::move(fit.model), 0.0});

        if (round + 1 == ensemble_config.rounds || active.empty()) continue;
        const double cut = ensemble_config.threshold * static_cast<double>(round + 1);
        const Vector ensemble_pred = (prob_sum.array() >= cut).cast<double>();
        int worst = -1;
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (int g : active) {
            const double standalone = result.standalone_accuracy[static_cast<std::size_t>(g)];
            const double acc = group_accuracy(ensemble_pred, y, groups, g);
            const double ratio = standalone > 0 ? acc / standalone : 1.0;
            if (ratio < worst_ratio) {
                worst_ratio = ratio;
                worst = g;
            }
        }
        const double boost = std::exp(ensemble_config.learning_rate);
        for (auto i : rows[static_cast<std::size_t>(worst)]) sample_weights(i) *= boost;
    }
    const double w = 1.0 / static_cast<double>(result.ensemble.members.size());
    for (auto& m : result.ensemble.members) m.weight = w;
    return result;
}

RiskScore ensemble_score(const EnsembleModel& ensemble, const FeatureRow& row) {
    double score = 0.0;
    for (const auto& m : ensemble.members) score += m.weight * sigmoid(m.model.linear_term(row));
    return {row.inspection_id, std::clamp(score, 0.0, 1.0)};
}

Vector ensemble_scores(const EnsembleModel& ensemble, const Matrix& X) {
    Vector score = Vector::Zero(X.rows());
    for (const auto& m : ensemble.members) score += m.weight * predict_scores(m.model, X);
    return score.cwiseMax(0.0).cwiseMin(1.0);
}

void write_ensemble(std::ostream& out, const EnsembleModel& ensemble) {
    out << "members\t" << ensemble.members.size() << '\n';
    for (const auto& m : ensemble.members) {
        out << "weight\t" << format_double17(m.weight) << '\n';
        write_model(out, m.model);
    }
}

EnsembleModel read_ensemble(std::istream& in) {
    std::string line;
    auto next_line = [&]() {
        while (std::getline(in, line))
            if (!trim(line).empty()) return true;
        return false;
    };
    if (!next_line() || line.rfind("members\t", 0) != 0) throw DataError("ensemble file must start with 'members<TAB>k'");
    auto k = parse_double(std::string_view(line).substr(8));
    if (!k || *k < 1 || *k != std::floor(*k)) throw DataError("bad ensemble member count");
    EnsembleModel ensemble;
    for (int i = 0; i < static_cast<int>(*k); ++i) {
        if (!next_line() || line.rfind("weight\t", 0) != 0) throw DataError("expected 'weight<TAB>value' line");
        auto w = parse_double(std::string_view(line).substr(7));
        if (!w) throw DataError("bad ensemble weight");
        ensemble.members.push_back({read_model(in), *w});
    }
    ensemble.validate();
    return ensemble;
}

}  // namespace fairsched
