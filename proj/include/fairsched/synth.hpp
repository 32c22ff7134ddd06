#pragma once

// Synthetic inspection datasets with planted per-cluster violation rates and
// optional feature/cluster correlations.

#include "fairsched/ingest.hpp"

#include <array>

namespace fairsched {

// The City's published coefficients, in kFeatureNames order.
inline constexpr std::array<double, kFeatureCount> kCityCoefficients = {
    0.950, -1.306, -0.244, 0.202, 1.555, -0.697, 0.302, 0.427,
    0.097, -0.164, 0.411,  0.171, 0.005, 0.002,  0.002, -0.004};

// Critical violation rates by cluster (Purple .. Brown) during evaluation.
inline constexpr std::array<double, kClusterCount> kEvaluationViolationRates = {
    0.4083, 0.2553, 0.1376, 0.0968, 0.0594, 0.025};
// Same, restricted to establishments inspected by more than one cluster.
inline constexpr std::array<double, kClusterCount> kPairedViolationRates = {
    0.4021, 0.2521, 0.1514, 0.0915, 0.0668, 0.0251};

enum class LabelModel {
    ClusterRates,  // Y ~ Bernoulli(rate of the inspecting cluster)
    Logistic,      // Y ~ Bernoulli(sigmoid(intercept + coefficients . features))
};

struct SynthConfig {
    unsigned seed = 1;
    Date start = Date{std::chrono::year{2011} / 9 / 1};
    int days = 17 * 60;
    int per_day = 20;
    int establishments = 3000;
    LabelModel labels = LabelModel::ClusterRates;
    std::array<double, kClusterCount> cluster_rates = kEvaluationViolationRates;
    std::array<double, kFeatureCount> coefficients = kCityCoefficients;
    double intercept = -1.9;
    // Added to heat_burglary on inspections by the Purple cluster.
    double proxy_strength = 0.0;
    // Clusters drawn uniformly instead of following the by-side mix.
    bool balanced_clusters = false;
};

struct SynthData {
    Dataset dataset;
    RegionTable regions;
    DemographicTable demographics;
};

/// Deterministic for a given config. timeSinceLast is reported in years with
/// a two-year default for first visits.
SynthData generate_synthetic(const SynthConfig& config);

}  // namespace fairsched
