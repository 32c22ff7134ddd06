#pragma once

// Logistic-regression risk model: training, scoring and the model file format.

#include "fairsched/ingest.hpp"
#include "fairsched/optimize.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairsched {

struct TrainedModel {
    std::vector<std::string> feature_names;
    std::vector<double> coefficients;
    double intercept = 0.0;

    std::optional<double> coefficient(std::string_view name) const;
    // intercept + sum(coefficient * feature); throws UsageError if a feature is missing.
    double linear_term(const FeatureRow& row) const;
    bool has_cluster_features() const;
    void validate() const;
};

struct RiskScore {
    std::string inspection_id;
    double score = 0.5;
};

struct TrainConfig {
    int max_iterations = 2000;
    double step_size = 1.0;
    double convergence_tolerance = 1e-6;
    double l2_weight = 1e-4;
    unsigned seed = 0;
    // Optimise in standardised coordinates. The optimum is unchanged because
    // the L2 penalty always applies to original-scale coefficients.
    bool standardize = true;
};

enum class TrainStatus { Converged, NotConverged };

struct TrainResult {
    TrainedModel model;
    TrainStatus status = TrainStatus::Converged;
    int iterations = 0;
    double loss = 0.0;
    double gradient_norm = 0.0;
    std::vector<double> loss_trace;
};

class DegenerateLabels : public DataError {
public:
    using DataError::DataError;
};

// Extra objective term expressed through the linear term z = X beta + b.
// Returns the value and writes d(value)/dz into grad_z.
using LinearPenalty = std::function<double(const Vector& z, Vector& grad_z)>;

struct FitOptions {
    const Vector* sample_weights = nullptr;  // rescaled to mean 1
    LinearPenalty penalty;
    const TrainedModel* warm_start = nullptr;
};

std::vector<std::string> all_feature_names();
std::vector<std::string> non_cluster_feature_names();

Matrix design_matrix(const std::vector<FeatureRow>& rows, const std::vector<std::string>& names);
Matrix design_matrix(const std::vector<FeatureRow>& rows, const std::vector<std::size_t>& subset,
                     const std::vector<std::string>& names);
Vector label_vector(const std::vector<bool>& labels);

TrainResult fit_logistic(const Matrix& X, const Vector& y, const std::vector<std::string>& names,
                         const TrainConfig& config, const FitOptions& options = {});

TrainResult train_logistic(const std::vector<FeatureRow>& features, const std::vector<bool>& labels,
                           const TrainConfig& config = {});

RiskScore predict_score(const TrainedModel& model, const FeatureRow& row);
Vector predict_scores(const TrainedModel& model, const Matrix& X);
Vector linear_terms(const TrainedModel& model, const Matrix& X);

struct LossAndGradient {
    double loss = 0.0;
    double penalty = 0.0;  // l2 part of `loss`
    // One entry per coefficient followed by the intercept.
    Vector gradient;
};

/// Mean negative log-likelihood plus (l2_weight / 2) * ||coefficients||^2.
LossAndGradient log_loss_and_gradient(const TrainedModel& model, const Matrix& X, const Vector& y,
                                      double l2_weight);

double sigmoid(double z);

// `name<TAB>value` per coefficient then `__intercept__<TAB>value`, 17 significant digits.
void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);

}  // namespace fairsched
