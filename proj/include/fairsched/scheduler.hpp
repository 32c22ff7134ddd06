#pragma once

// Turning risk scores into inspection schedules. Every policy keeps the number
// of inspections on each date, and the cluster performing each inspection.

#include "fairsched/ingest.hpp"
#include "fairsched/lr.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairsched {

struct WindowInspection {
    std::string inspection_id;
    Date original_date;
    Cluster cluster = Cluster::Purple;
    bool critical_found = false;
};

// The test-window inspections of `window`, in dataset row order.
std::vector<WindowInspection> window_inspections(const Dataset& dataset, const EvaluationWindow& window);

struct ScheduleEntry {
    std::string inspection_id;
    Date original_date;
    Date assigned_date;
    Cluster cluster = Cluster::Purple;
    std::optional<double> score;
    bool critical_found = false;
};

struct Schedule {
    Date window_start;
    std::vector<ScheduleEntry> entries;
};

using ScoreTable = std::unordered_map<std::string, double>;

Schedule default_schedule(Date window_start, const std::vector<WindowInspection>& inspections,
                          const ScoreTable* scores = nullptr);

/// Highest score first onto the earliest date slots; ties go to the earlier
/// original date, then the smaller inspection_id.
Schedule global_reorder(const ScoreTable& scores, Date window_start,
                        const std::vector<WindowInspection>& inspections);

/// global_reorder applied separately to each cluster's inspections and slots.
Schedule in_cluster_reorder(const ScoreTable& scores, Date window_start,
                            const std::vector<WindowInspection>& inspections);

/// Scores with all six cluster indicators forced to zero.
ScoreTable sanitarian_blind_scores(const TrainedModel& model, const std::vector<FeatureRow>& rows);
ScoreTable model_scores(const TrainedModel& model, const std::vector<FeatureRow>& rows);

enum class SchedulerKind { Default, GlobalReorder, SanitarianBlind, InCluster };
std::string_view scheduler_name(SchedulerKind k);
SchedulerKind parse_scheduler(std::string_view s);

// Columns: inspection_id, original_date, assigned_date, cluster, score, critical_found.
void write_schedule(std::ostream& out, const Schedule& schedule);
Schedule read_schedule(std::istream& in);

}  // namespace fairsched
