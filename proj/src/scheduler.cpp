#include "fairsched/scheduler.hpp"

#include "fairsched/text.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <numeric>
#include <ostream>

namespace fairsched {

namespace {

double score_of(const ScoreTable& scores, const std::string& id) {
    auto it = scores.find(id);
    if (it == scores.end()) throw UsageError("no score for inspection '" + id + "'");
    return it->second;
}

// Assigns `members` (indices into `inspections`) to their own original date
// slots, best score first. Writes into `entries` at the same indices.
void reorder_subset(const ScoreTable& scores, const std::vector<WindowInspection>& inspections,
                    std::vector<std::size_t> members, std::vector<ScheduleEntry>& entries) {
    std::vector<Date> slots;
    slots.reserve(members.size());
    for (auto i : members) slots.push_back(inspections[i].original_date);
    std::sort(slots.begin(), slots.end());

    std::vector<double> key(inspections.size());
    for (auto i : members) key[i] = score_of(scores, inspections[i].inspection_id);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] > key[b];
        if (inspections[a].original_date != inspections[b].original_date)
            return inspections[a].original_date < inspections[b].original_date;
        return inspections[a].inspection_id < inspections[b].inspection_id;
    });
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& src = inspections[members[k]];
        entries[members[k]] = {src.inspection_id, src.original_date, slots[k], src.cluster, key[members[k]],
                               src.critical_found};
    }
}

}  // namespace

std::vector<WindowInspection> window_inspections(const Dataset& dataset, const EvaluationWindow& window) {
    std::vector<WindowInspection> out;
    out.reserve(window.test_rows.size());
    for (auto r : window.test_rows) {
        const auto& rec = dataset.records[r];
        out.push_back({rec.inspection_id, rec.date, rec.cluster, rec.critical_found});
    }
    return out;
}

Schedule default_schedule(Date window_start, const std::vector<WindowInspection>& inspections,
                          const ScoreTable* scores) {
    Schedule s{window_start, {}};
    s.entries.reserve(inspections.size());
    for (const auto& i : inspections) {
        std::optional<double> score;
        if (scores)
            if (auto it = scores->find(i.inspection_id); it != scores->end()) score = it->second;
        s.entries.push_back({i.inspection_id, i.original_date, i.original_date, i.cluster, score, i.critical_found});
    }
    return s;
}

Schedule global_reorder(const ScoreTable& scores, Date window_start,
                        const std::vector<WindowInspection>& inspections) {
    Schedule s{window_start, std::vector<ScheduleEntry>(inspections.size())};
    std::vector<std::size_t> all(inspections.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    reorder_subset(scores, inspections, std::move(all), s.entries);
    return s;
}

Schedule in_cluster_reorder(const ScoreTable& scores, Date window_start,
                            const std::vector<WindowInspection>& inspections) {
    Schedule s{window_start, std::vector<ScheduleEntry>(inspections.size())};
    std::array<std::vector<std::size_t>, kClusterCount> by_cluster;
    for (std::size_t i = 0; i < inspections.size(); ++i) by_cluster[index_of(inspections[i].cluster)].push_back(i);
    for (auto& members : by_cluster)
        if (!members.empty()) reorder_subset(scores, inspections, std::move(members), s.entries);
    return s;
}

ScoreTable model_scores(const TrainedModel& model, const std::vector<FeatureRow>& rows) {
    ScoreTable t;
    t.reserve(rows.size());
    for (const auto& r : rows) t[r.inspection_id] = predict_score(model, r).score;
    return t;
}

ScoreTable sanitarian_blind_scores(const TrainedModel& model, const std::vector<FeatureRow>& rows) {
    ScoreTable t;
    t.reserve(rows.size());
    for (FeatureRow r : rows) {
        for (std::size_t f = 0; f < kClusterFeatureCount; ++f) r.values[f] = 0.0;
        t[r.inspection_id] = predict_score(model, r).score;
    }
    return t;
}

std::string_view scheduler_name(SchedulerKind k) {
    switch (k) {
        case SchedulerKind::Default: return "default";
        case SchedulerKind::GlobalReorder: return "global-reorder";
        case SchedulerKind::SanitarianBlind: return "sanitarian-blind";
        case SchedulerKind::InCluster: return "in-cluster";
    }
    return "default";
}

SchedulerKind parse_scheduler(std::string_view s) {
    for (auto k : {SchedulerKind::Default, SchedulerKind::GlobalReorder, SchedulerKind::SanitarianBlind,
                   SchedulerKind::InCluster})
        if (scheduler_name(k) == s) return k;
    if (s == "global") return SchedulerKind::GlobalReorder;
    if (s == "blind") return SchedulerKind::SanitarianBlind;
    throw UsageError("unknown scheduler '" + std::string(s) + "'");
}

void write_schedule(std::ostream& out, const Schedule& schedule) {
    out << "# window_start=" << format_date(schedule.window_start) << '\n';
    write_csv_row(out, {"inspection_id", "original_date", "assigned_date", "cluster", "score", "critical_found"});
    for (const auto& e : schedule.entries)
        write_csv_row(out, {e.inspection_id, format_date(e.original_date), format_date(e.assigned_date),
                            std::string(cluster_name(e.cluster)), e.score ? format_double(*e.score) : "",
                            e.critical_found ? "1" : "0"});
}

Schedule read_schedule(std::istream& in) {
    std::string first;
    if (!std::getline(in, first) || first.rfind("# window_start=", 0) != 0)
        throw DataError("schedule file must start with '# window_start=YYYY-MM-DD'");
    Schedule s{parse_date(std::string_view(first).substr(15)), {}};
    CsvReader reader(in);
    std::vector<std::string> f;
    if (!reader.next(f) || f.size() != 6 || f[0] != "inspection_id") throw DataError("bad schedule header");
    while (reader.next(f)) {
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 6) throw DataError("schedule row with " + std::to_string(f.size()) + " columns");
        ScheduleEntry e{f[0], parse_date(f[1]), parse_date(f[2]), parse_cluster(f[3]), std::nullopt, f[5] == "1"};
        if (!f[4].empty()) {
            e.score = parse_double(f[4]);
            if (!e.score) throw DataError("bad score '" + f[4] + "'");
        }
        s.entries.push_back(std::move(e));
    }
    return s;
}

}  // namespace fairsched
