#include "fairsched/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace fairsched {

std::vector<DetectionOutcome> detection_times(const Schedule& schedule, int window_days, const GroupLabels* labels) {
    std::vector<DetectionOutcome> out;
    out.reserve(schedule.entries.size());
    for (const auto& e : schedule.entries) {
        const int t = static_cast<int>((e.assigned_date - schedule.window_start).count());
        if (t < 0 || t >= window_days)
            throw DataError("inspection " + e.inspection_id + " assigned to " + format_date(e.assigned_date) +
                            ", outside the window starting " + format_date(schedule.window_start));
        DetectionOutcome o{e.inspection_id, t, e.critical_found, e.cluster, std::nullopt};
        if (labels)
            if (auto it = labels->region_by_id.find(e.inspection_id); it != labels->region_by_id.end())
                o.region = it->second;
        out.push_back(std::move(o));
    }
    return out;
}

std::string_view grouping_name(Grouping g) { return g == Grouping::Cluster ? "cluster" : "region"; }

Grouping parse_grouping(std::string_view s) {
    if (s == "cluster" || s == "clusters") return Grouping::Cluster;
    if (s == "region" || s == "regions") return Grouping::Region;
    throw UsageError("unknown grouping '" + std::string(s) + "'");
}

std::string_view mode_name(Mode m) { return m == Mode::DP ? "DP" : "EOpp"; }

Mode parse_mode(std::string_view s) {
    if (s == "DP" || s == "dp") return Mode::DP;
    if (s == "EOpp" || s == "eopp" || s == "EOPP") return Mode::EOpp;
    throw UsageError("unknown fairness mode '" + std::string(s) + "'");
}

GroupDeltaResult group_mean_deltas(const std::vector<DetectionOutcome>& outcomes, Grouping grouping, Mode mode) {
    const std::size_t slots = grouping == Grouping::Cluster ? kClusterCount : kRegionCount;
    std::vector<double> sum(slots, 0.0);
    std::vector<std::size_t> count(slots, 0);
    GroupDeltaResult r;
    double total = 0.0;
    for (const auto& o : outcomes) {
        if (mode == Mode::EOpp && !o.Y) continue;
        ++r.considered;
        total += o.T;
        std::optional<std::size_t> slot;
        if (grouping == Grouping::Cluster)
            slot = index_of(o.cluster);
        else if (o.region)
            slot = static_cast<std::size_t>(*o.region);
        if (!slot) {
            ++r.excluded;
            continue;
        }
        sum[*slot] += o.T;
        ++count[*slot];
    }
    if (r.considered == 0) {
        r.warnings.push_back("no outcomes pass the " + std::string(mode_name(mode)) + " filter");
        return r;
    }
    r.overall_mean = total / static_cast<double>(r.considered);
    for (std::size_t s = 0; s < slots; ++s) {
        const std::string name(grouping == Grouping::Cluster ? cluster_name(kAllClusters[s])
                                                             : region_name(kAllRegions[s]));
        if (count[s] == 0) {
            r.warnings.push_back("group " + name + " is empty under " + std::string(mode_name(mode)) + "; omitted");
            continue;
        }
        r.deltas.push_back({name, mode, sum[s] / static_cast<double>(count[s]) - r.overall_mean, count[s]});
    }
    return r;
}

double unfairness_d(const GroupDeltaResult& deltas) {
    double d = 0.0;
    for (const auto& g : deltas.deltas) d += std::abs(g.delta_days);
    return d;
}

double unfairness_d(const std::vector<DetectionOutcome>& outcomes, Grouping grouping, Mode mode) {
    return unfairness_d(group_mean_deltas(outcomes, grouping, mode));
}

double efficiency_mu(const std::vector<DetectionOutcome>& outcomes) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& o : outcomes)
        if (o.Y) {
            sum += o.T;
            ++n;
        }
    if (n == 0) throw NumericError("efficiency undefined: no inspection with a critical violation");
    return sum / static_cast<double>(n);
}

std::vector<ClusterRate> violation_rate_by_cluster(const std::vector<InspectionRecord>& records) {
    std::array<ClusterRate, kClusterCount> acc{};
    for (Cluster c : kAllClusters) acc[index_of(c)].cluster = c;
    for (const auto& r : records) {
        auto& a = acc[index_of(r.cluster)];
        ++a.total;
        if (r.critical_found) ++a.critical;
    }
    std::vector<ClusterRate> out;
    for (auto& a : acc) {
        if (a.total == 0) continue;
        a.rate = static_cast<double>(a.critical) / static_cast<double>(a.total);
        out.push_back(a);
    }
    return out;
}

std::vector<InspectionRecord> multi_cluster_subset(const std::vector<InspectionRecord>& records) {
    std::map<std::string, std::set<Cluster>> clusters;
    for (const auto& r : records) clusters[r.establishment_id].insert(r.cluster);
    std::vector<InspectionRecord> out;
    for (const auto& r : records)
        if (clusters[r.establishment_id].size() >= 2) out.push_back(r);
    return out;
}

PairedMatrix paired_matrix(const std::vector<InspectionRecord>& records) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = records[a];
        const auto& rb = records[b];
        if (ra.establishment_id != rb.establishment_id) return ra.establishment_id < rb.establishment_id;
        if (ra.date != rb.date) return ra.date < rb.date;
        return ra.inspection_id < rb.inspection_id;
    });
    std::array<std::array<long, kClusterCount>, kClusterCount> net{};
    PairedMatrix m;
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& earlier = records[order[k - 1]];
        const auto& later = records[order[k]];
        if (earlier.establishment_id != later.establishment_id) continue;
        const auto i = index_of(earlier.cluster);
        const auto j = index_of(later.cluster);
        ++m.count[i][j];
        if (!earlier.critical_found && later.critical_found) ++net[i][j];
        if (earlier.critical_found && !later.critical_found) --net[i][j];
    }
    for (std::size_t i = 0; i < kClusterCount; ++i)
        for (std::size_t j = 0; j < kClusterCount; ++j)
            if (m.count[i][j] > 0) m.value[i][j] = static_cast<double>(net[i][j]) / static_cast<double>(m.count[i][j]);
    return m;
}

std::vector<WeightedDelta> weighted_demographic_deltas(const std::vector<DetectionOutcome>& outcomes,
                                                       const DemographicTable& table, Mode mode) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& o : outcomes)
        if (mode == Mode::DP || o.Y) {
            total += o.T;
            ++n;
        }
    if (n == 0) return {};
    const double mu = total / static_cast<double>(n);

    std::array<double, kDemographicCount> num{}, weight{};
    std::array<std::size_t, kDemographicCount> count{};
    for (const auto& o : outcomes) {
        if (mode == Mode::EOpp && !o.Y) continue;
        const Composition* c = table.find(o.inspection_id);
        if (!c) continue;
        for (std::size_t g = 0; g < kDemographicCount; ++g) {
            if ((*c)[g] <= 0.0) continue;
            num[g] += (*c)[g] * (o.T - mu);
            weight[g] += (*c)[g];
            ++count[g];
        }
    }
    std::vector<WeightedDelta> out;
    for (std::size_t g = 0; g < kDemographicCount; ++g)
        if (weight[g] > 0.0) out.push_back({std::string(kDemographicNames[g]), num[g] / weight[g], weight[g], count[g]});
    return out;
}

}  // namespace fairsched
