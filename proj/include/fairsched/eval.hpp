#pragma once

// Cross-validated evaluation of (trainer, scheduler) policies over the
// complete evaluation windows, and the efficiency/fairness trade-off.

#include "fairsched/fair_train.hpp"
#include "fairsched/metrics.hpp"
#include "fairsched/pareto.hpp"
#include "fairsched/scheduler.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fairsched {

struct BaselineTrainer {};
struct NoSanitarianTrainer {};
struct ZafarTrainer {
    double c = kZafarSelected;
};
struct BinaryFairTrainer {
    double C = kBinaryFairSelected;
    FairObjective objective = FairObjective::EOpp;
};
struct EnsembleTrainer {
    int rounds = 10;
};

using TrainerSpec = std::variant<BaselineTrainer, NoSanitarianTrainer, ZafarTrainer, BinaryFairTrainer, EnsembleTrainer>;

std::string trainer_family(const TrainerSpec& t);  // "baseline", "zafar", ...
std::string trainer_knob(const TrainerSpec& t);    // "c=0.001", "" for knob-less trainers
std::string trainer_label(const TrainerSpec& t);   // family, surrogate tag and knob

struct Policy {
    std::string name;
    TrainerSpec trainer;
    SchedulerKind scheduler = SchedulerKind::GlobalReorder;

    /// Throws UsageError for sanitarian-blind scheduling of a model without cluster features.
    void validate() const;
};

// Named presets: default, schenk, no-sanitarian, zafar, binary-fair,
// proportional, sanitarian-blind, in-cluster.
Policy preset_policy(const std::string& name);
std::vector<std::string> preset_policy_names();

using Scorer = std::variant<TrainedModel, EnsembleModel>;

ScoreTable score_rows(const Scorer& scorer, const std::vector<FeatureRow>& rows, bool blind_clusters);

struct EvalContext {
    const Dataset* dataset = nullptr;
    std::vector<EvaluationWindow> windows;
    int window_days = 60;
    GroupLabels labels;
    const DemographicTable* demographics = nullptr;
    TrainConfig train_config;
    EnsembleConfig ensemble_config;
    unsigned threads = 1;

    /// Splits the dataset and attaches region labels when a table is given.
    static EvalContext build(const Dataset& dataset, int window_days, const RegionTable* regions = nullptr,
                             const DemographicTable* demographics = nullptr);
    std::vector<const EvaluationWindow*> complete_windows() const;
};

/// Trains `trainer` on the rows dated before `window`.
Scorer train_for_window(const TrainerSpec& trainer, const EvalContext& ctx, const EvaluationWindow& window);

struct GroupMetrics {
    double d = 0.0;
    std::size_t groups = 0;
    std::size_t excluded = 0;
    std::vector<GroupDelta> deltas;
};

using MetricKey = std::pair<Grouping, Mode>;

struct FoldResult {
    int window_index = 0;
    bool failed = false;
    std::string failure;
    double mu = 0.0;
    std::map<MetricKey, GroupMetrics> metrics;
    std::map<Mode, std::vector<WeightedDelta>> demographic;
};

struct PolicyRun {
    Policy policy;
    std::vector<FoldResult> folds;  // one per complete window, in window order
    std::size_t failures = 0;

    std::vector<const FoldResult*> succeeded() const;
};

class ModelCache;

/// Evaluates one policy on every complete window. Training failures mark the
/// fold failed instead of aborting the run.
PolicyRun run_policy(const Policy& policy, const EvalContext& ctx, ModelCache* cache = nullptr);
std::vector<PolicyRun> run_policies(const std::vector<Policy>& policies, const EvalContext& ctx);

struct Aggregate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t folds = 0;
    bool single_fold = false;
};

/// Arithmetic mean and sample standard deviation / sqrt(k).
Aggregate aggregate(const std::vector<double>& values);

struct TradeoffPoint {
    std::string policy;
    std::string knob;
    double x = 0.0;
    double x_se = 0.0;
    double y = 0.0;
    double y_se = 0.0;
};

// x = unfairness d (or d / n with per_group_average), y = efficiency mu.
TradeoffPoint tradeoff_point(const PolicyRun& run, Grouping grouping, Mode mode, bool per_group_average = false);
std::vector<TradeoffPoint> tradeoff_points(const std::vector<PolicyRun>& runs, Grouping grouping, Mode mode,
                                           bool per_group_average = false);
std::vector<std::size_t> pareto_frontier(const std::vector<TradeoffPoint>& points);

struct SweepResult {
    std::vector<PolicyRun> runs;
    std::vector<TradeoffPoint> points;  // one per grid value, in grid order
};

/// Re-runs `family` with its knob set to each grid value (c for zafar, C for
/// binary-fair, rounds for the ensemble).
SweepResult sweep_parameters(const Policy& family, const std::vector<double>& grid, const EvalContext& ctx,
                             Grouping grouping, Mode mode, bool per_group_average = false);

// Results: one row per (policy, knob, fold, grouping, mode).
void write_results(std::ostream& out, const std::vector<PolicyRun>& runs);
// Report: one row per (policy, grouping, group, mode) with pooled delta and fold statistics.
void write_report(std::ostream& out, const std::vector<PolicyRun>& runs);
void write_tradeoff(std::ostream& out, const std::vector<TradeoffPoint>& points, Grouping grouping, Mode mode);

}  // namespace fairsched
