#pragma once

// Efficiency and group-fairness measures over detection times, plus the
// diagnostic tables (violation rates, paired-inspection matrix).

#include "fairsched/ingest.hpp"
#include "fairsched/scheduler.hpp"

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairsched {

struct DetectionOutcome {
    std::string inspection_id;
    int T = 0;  // days since window start
    bool Y = false;
    Cluster cluster = Cluster::Purple;
    std::optional<Region> region;
};

// Extra labels attached to outcomes by inspection id.
struct GroupLabels {
    std::unordered_map<std::string, Region> region_by_id;
};

/// Throws DataError when an assigned date falls outside [start, start + window_days).
std::vector<DetectionOutcome> detection_times(const Schedule& schedule, int window_days = 60,
                                              const GroupLabels* labels = nullptr);

enum class Grouping { Cluster, Region };
enum class Mode { DP, EOpp };
std::string_view grouping_name(Grouping g);
Grouping parse_grouping(std::string_view s);
std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view s);

struct GroupDelta {
    std::string group;
    Mode mode = Mode::EOpp;
    double delta_days = 0.0;  // group mean T minus overall mean T
    std::size_t count = 0;
};

struct GroupDeltaResult {
    std::vector<GroupDelta> deltas;  // non-empty groups in canonical order
    double overall_mean = 0.0;
    std::size_t considered = 0;  // outcomes passing the mode filter
    std::size_t excluded = 0;    // of those, outcomes without a label for the grouping
    std::vector<std::string> warnings;
};

GroupDeltaResult group_mean_deltas(const std::vector<DetectionOutcome>& outcomes, Grouping grouping, Mode mode);

/// Sum over non-empty groups of |group mean - overall mean|.
double unfairness_d(const std::vector<DetectionOutcome>& outcomes, Grouping grouping, Mode mode);
double unfairness_d(const GroupDeltaResult& deltas);

/// Mean T over outcomes with Y = 1. Throws NumericError if there are none.
double efficiency_mu(const std::vector<DetectionOutcome>& outcomes);

struct ClusterRate {
    Cluster cluster;
    std::size_t critical = 0;
    std::size_t total = 0;
    double rate = 0.0;
};

std::vector<ClusterRate> violation_rate_by_cluster(const std::vector<InspectionRecord>& records);

// Inspections of establishments visited by at least two distinct clusters.
std::vector<InspectionRecord> multi_cluster_subset(const std::vector<InspectionRecord>& records);

struct PairedMatrix {
    // [earlier cluster][later cluster]; nullopt where no pair exists.
    std::array<std::array<std::optional<double>, kClusterCount>, kClusterCount> value{};
    std::array<std::array<std::size_t, kClusterCount>, kClusterCount> count{};
};

/// Over consecutive inspections of the same establishment: fraction where the
/// earlier found no violation and the later did, minus the reverse fraction.
PairedMatrix paired_matrix(const std::vector<InspectionRecord>& records);

struct WeightedDelta {
    std::string group;
    double delta_days = 0.0;
    double total_weight = 0.0;
    std::size_t count = 0;
};

/// Per demographic group: composition-weighted mean of (T - schedule mean),
/// normalised by that group's total weight. Groups with zero weight are omitted.
std::vector<WeightedDelta> weighted_demographic_deltas(const std::vector<DetectionOutcome>& outcomes,
                                                       const DemographicTable& table, Mode mode);

}  // namespace fairsched
