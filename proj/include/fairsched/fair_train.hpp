#pragma once

// Fairness-aware trainers. The binary-fair and proportional-fair trainers are
// surrogates: penalised logistic regression and a multiplicative-weights
// ensemble respectively (reports label them "(surrogate)").

#include "fairsched/lr.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairsched {

enum class ProtectedKind { PolyvalentCluster, BinaryCluster };

struct ProtectedSpec {
    ProtectedKind kind = ProtectedKind::PolyvalentCluster;
    std::vector<int> values;  // per training row, in [0, value_count)
    int value_count = 0;

    static ProtectedSpec polyvalent(const std::vector<Cluster>& clusters);
    static ProtectedSpec binary(const std::vector<Cluster>& clusters);
    void validate(std::size_t rows) const;
};

enum class FairObjective { DP, EOpp };
std::string_view objective_name(FairObjective o);
FairObjective parse_objective(std::string_view s);

inline constexpr std::array<double, 5> kZafarGrid = {0.0, 1e-6, 0.001, 0.01, 0.1};
inline constexpr double kZafarSelected = 0.001;
inline constexpr std::array<double, 9> kBinaryFairGrid = {0.001, 0.005, 0.01, 0.05, 0.1,
                                                         0.2,   0.3,   0.4,  0.5};
inline constexpr double kBinaryFairSelected = 0.5;

TrainResult train_no_sanitarian(const std::vector<FeatureRow>& features, const std::vector<bool>& labels,
                                const TrainConfig& config = {});

struct ValueCovariance {
    int value = 0;
    double covariance = 0.0;
};

struct CovarianceReport {
    std::vector<ValueCovariance> entries;  // only values present in the data
    std::vector<std::string> warnings;

    double max_abs() const;
};

/// Empirical covariance between the signed linear term and the one-vs-rest
/// indicator of each protected value.
CovarianceReport covariance_decision_protected(const TrainedModel& model, const Matrix& X,
                                               const ProtectedSpec& protected_attr);

struct ZafarResult {
    TrainResult fit;
    CovarianceReport covariances;
    double threshold = 0.0;
    double max_violation = 0.0;  // max(|cov| - c, 0)
    bool satisfied = false;      // every |cov| <= c + 1e-4
    int escalations = 0;
    double penalty_weight = 0.0;
};

/// Logistic loss with |cov| <= c per protected value, enforced by a quadratic
/// penalty whose multiplier doubles until the constraints hold (max 20 times).
ZafarResult train_zafar(const Matrix& X, const Vector& y, const std::vector<std::string>& names,
                        const ProtectedSpec& protected_attr, double c, const TrainConfig& config);

struct BinaryFairResult {
    TrainResult fit;
    double strength = 0.0;
    FairObjective objective = FairObjective::EOpp;
    double gap = 0.0;      // mean score (A=1) - mean score (A=0), over Y=1 rows for EOpp
    double penalty = 0.0;  // gap^2, the unweighted fairness term at the optimum
};

/// Logistic loss + C * gap^2 where gap is the difference in mean predicted
/// score between the two protected values (restricted to Y=1 rows for EOpp).
BinaryFairResult train_binary_fair(const Matrix& X, const Vector& y, const std::vector<std::string>& names,
                                   const ProtectedSpec& protected_attr, FairObjective objective, double C,
                                   const TrainConfig& config);

// Mean-score gap used by train_binary_fair, evaluated for an arbitrary model.
double binary_score_gap(const TrainedModel& model, const Matrix& X, const Vector& y,
                        const ProtectedSpec& protected_attr, FairObjective objective);

struct EnsembleMember {
    TrainedModel model;
    double weight = 0.0;
};

struct EnsembleModel {
    std::vector<EnsembleMember> members;

    void validate() const;
};

struct EnsembleConfig {
    int rounds = 10;
    std::size_t min_group_rows = 10;
    double learning_rate = 1.0;  // log-multiplier applied to the worst group's row weights
    double threshold = 0.5;  // decision threshold for group accuracies
};

struct EnsembleResult {
    EnsembleModel ensemble;
    std::vector<int> excluded_groups;
    std::vector<std::string> warnings;
    // Standalone accuracy of each group's own model (NaN for excluded groups).
    std::vector<double> standalone_accuracy;
};

/// Multiplicative-weights game over groups: each round fits a member on
/// reweighted rows, then boosts the group whose ensemble accuracy is lowest
/// relative to its standalone model. Members are weighted uniformly.
EnsembleResult train_proportional_ensemble(const Matrix& X, const Vector& y,
                                           const std::vector<std::string>& names,
                                           const std::vector<int>& groups, int group_count,
                                           const EnsembleConfig& ensemble_config, const TrainConfig& config);

// Weighted mean of the members' predicted probabilities.
RiskScore ensemble_score(const EnsembleModel& ensemble, const FeatureRow& row);
Vector ensemble_scores(const EnsembleModel& ensemble, const Matrix& X);

// Accuracy of `predicted` (0/1) against y restricted to rows of `group`.
double group_accuracy(const Vector& predicted, const Vector& y, const std::vector<int>& groups, int group);

// Header `members<TAB>k`, then per member `weight<TAB>value` and a model block.
void write_ensemble(std::ostream& out, const EnsembleModel& ensemble);
EnsembleModel read_ensemble(std::istream& in);

}  // namespace fairsched
