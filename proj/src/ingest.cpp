#include "fairsched/ingest.hpp"

#include "fairsched/text.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_set>

namespace fairsched {

namespace {

constexpr std::array<const char*, 5> kRequiredFields = {
    "inspection_id", "establishment_id", "date", "cluster", "critical_found"};

constexpr std::array<std::size_t, 3> kHistoryFeatures = {kPastCritical, kPastSerious,
                                                         kTimeSinceLast};

struct ColumnLayout {
    std::unordered_map<std::string, std::size_t> index;

    std::optional<std::size_t> find(const Schema& schema, const std::string& field) const {
        auto it = index.find(schema.column_for(field));
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

}  // namespace

FeatureRow make_feature_row(const InspectionRecord& record, const HistoryFeatures& history) {
    if (!record.covariates) throw DataError("record " + record.inspection_id + " has no covariates");
    FeatureRow row;
    row.inspection_id = record.inspection_id;
    row.values.fill(0.0);
    row.values[cluster_feature_index(record.cluster)] = 1.0;
    row.values[kPastCritical] = history.past_critical;
    row.values[kPastSerious] = history.past_serious;
    row.values[kTimeSinceLast] = history.time_since_last;
    for (std::size_t i = 0; i < kCovariateCount; ++i)
        row.values[kAgeAtInspection + i] = (*record.covariates)[i];
    return row;
}

Schema Schema::load(std::istream& in) {
    Schema schema;
    std::string line;
    while (std::getline(in, line)) {
        auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto sep = view.find_first_of("\t=");
        if (sep == std::string_view::npos)
            throw DataError("schema line without separator: '" + std::string(view) + "'");
        schema.set(std::string(trim(view.substr(0, sep))), std::string(trim(view.substr(sep + 1))));
    }
    return schema;
}

std::string Schema::column_for(const std::string& field) const {
    auto it = columns_.find(field);
    return it == columns_.end() ? field : it->second;
}

ParseResult parse_inspections(std::istream& in, const Schema& schema) {
    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) throw DataError("input has no header row");

    ColumnLayout layout;
    for (std::size_t i = 0; i < header.size(); ++i)
        layout.index.emplace(std::string(trim(header[i])), i);

    std::unordered_map<std::string, std::size_t> required;
    for (const char* field : kRequiredFields) {
        auto col = layout.find(schema, field);
        if (!col)
            throw DataError("schema error: required column '" + schema.column_for(field) +
                            "' (field " + field + ") not found in header");
        required.emplace(field, *col);
    }
    auto optional_col = [&](const std::string& field) { return layout.find(schema, field); };
    const auto zip_col = optional_col("zip");
    const auto lat_col = optional_col("latitude");
    const auto lon_col = optional_col("longitude");
    const auto serious_col = optional_col("serious_found");

    std::array<std::optional<std::size_t>, kFeatureCount> feature_cols;
    for (std::size_t f = 0; f < kFeatureCount; ++f)
        feature_cols[f] = optional_col(std::string(kFeatureNames[f]));
    const bool has_history = std::all_of(kHistoryFeatures.begin(), kHistoryFeatures.end(),
                                         [&](std::size_t f) { return feature_cols[f].has_value(); });
    bool has_covariates = true;
    for (std::size_t f = kAgeAtInspection; f < kFeatureCount; ++f)
        has_covariates = has_covariates && feature_cols[f].has_value();
    bool has_indicators = true;
    for (std::size_t f = 0; f < kClusterFeatureCount; ++f)
        has_indicators = has_indicators && feature_cols[f].has_value();

    ParseResult result;
    std::unordered_set<std::string> seen_ids;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const std::size_t line = reader.line();
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
        auto cell = [&](std::size_t col) -> std::string_view {
            return col < fields.size() ? trim(fields[col]) : std::string_view{};
        };
        auto number = [&](std::size_t col, const char* what) {
            auto v = parse_double(cell(col));
            if (!v) throw DataError(std::string("unparseable ") + what + " '" + std::string(cell(col)) + "'");
            return *v;
        };
        try {
            InspectionRecord rec;
            rec.inspection_id = std::string(cell(required["inspection_id"]));
            if (rec.inspection_id.empty()) throw DataError("empty inspection_id");
            rec.establishment_id = std::string(cell(required["establishment_id"]));
            if (rec.establishment_id.empty()) throw DataError("empty establishment_id");
            rec.date = parse_date(cell(required["date"]));
            rec.cluster = parse_cluster(cell(required["cluster"]));
            auto critical = parse_bool(cell(required["critical_found"]));
            if (!critical) throw DataError("unparseable critical_found '" +
                                           std::string(cell(required["critical_found"])) + "'");
            rec.critical_found = *critical;
            if (zip_col) rec.zip = std::string(cell(*zip_col));
            if (lat_col) rec.latitude = parse_double(cell(*lat_col));
            if (lon_col) rec.longitude = parse_double(cell(*lon_col));
            if (serious_col && !cell(*serious_col).empty()) {
                rec.serious_found = parse_bool(cell(*serious_col));
                if (!rec.serious_found) throw DataError("unparseable serious_found");
            }
            if (has_history) {
                HistoryFeatures h;
                h.past_critical = number(*feature_cols[kPastCritical], "pastCritical");
                h.past_serious = number(*feature_cols[kPastSerious], "pastSerious");
                h.time_since_last = number(*feature_cols[kTimeSinceLast], "timeSinceLast");
                rec.history = h;
            }
            if (has_covariates) {
                std::array<double, kCovariateCount> cov{};
                for (std::size_t i = 0; i < kCovariateCount; ++i)
                    cov[i] = number(*feature_cols[kAgeAtInspection + i],
                                    std::string(kFeatureNames[kAgeAtInspection + i]).c_str());
                rec.covariates = cov;
            }
            if (has_indicators) {
                for (Cluster c : kAllClusters) {
                    const std::size_t f = cluster_feature_index(c);
                    const double v = number(*feature_cols[f], std::string(kFeatureNames[f]).c_str());
                    if (v != (c == rec.cluster ? 1.0 : 0.0))
                        throw DataError("cluster indicator " + std::string(kFeatureNames[f]) +
                                        " disagrees with cluster " + std::string(cluster_name(rec.cluster)));
                }
            }
            if (!seen_ids.insert(rec.inspection_id).second)
                throw DataError("duplicate inspection_id '" + rec.inspection_id + "'");
            result.dataset.records.push_back(std::move(rec));
        } catch (const DataError& e) {
            result.errors.push_back({line, e.what()});
        }
    }

    if (has_history && has_covariates) {
        auto& ds = result.dataset;
        ds.features.reserve(ds.records.size());
        for (const auto& rec : ds.records) ds.features.push_back(make_feature_row(rec, *rec.history));
    }
    return result;
}

std::vector<HistoryFeatures> derive_history_features(const std::vector<InspectionRecord>& records,
                                                     const HistoryConfig& config) {
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = records[a];
        const auto& rb = records[b];
        if (ra.establishment_id != rb.establishment_id) return ra.establishment_id < rb.establishment_id;
        if (ra.date != rb.date) return ra.date < rb.date;
        return ra.inspection_id < rb.inspection_id;
    });

    std::vector<HistoryFeatures> out(records.size());
    const InspectionRecord* prev = nullptr;
    for (std::size_t idx : order) {
        const auto& rec = records[idx];
        HistoryFeatures h;
        if (prev && prev->establishment_id == rec.establishment_id) {
            h.past_critical = prev->critical_found ? 1.0 : 0.0;
            h.past_serious = prev->serious_found.value_or(false) ? 1.0 : 0.0;
            h.time_since_last = static_cast<double>((rec.date - prev->date).count()) / config.days_per_unit;
        } else {
            h.time_since_last = config.first_visit_days / config.days_per_unit;
        }
        out[idx] = h;
        prev = &rec;
    }
    return out;
}

bool assemble_features(Dataset& dataset, const HistoryConfig& config) {
    auto& records = dataset.records;
    if (std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.covariates; }))
        return false;
    const bool need_history =
        std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.history; });
    std::vector<HistoryFeatures> derived;
    if (need_history) derived = derive_history_features(records, config);
    dataset.features.clear();
    dataset.features.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (need_history) records[i].history = derived[i];
        dataset.features.push_back(make_feature_row(records[i], *records[i].history));
    }
    return true;
}

std::optional<Region> RegionTable::find(const std::string& zip) const {
    auto it = by_zip_.find(zip);
    if (it == by_zip_.end()) return std::nullopt;
    return it->second;
}

Region RegionTable::map_region(const std::string& zip) const {
    auto r = find(zip);
    if (!r) throw UnmappedRegion("zip '" + zip + "' is not in the region table");
    return *r;
}

Region map_region(const std::string& zip, const RegionTable& table) { return table.map_region(zip); }

RegionTable RegionTable::load(std::istream& in) {
    RegionTable table;
    CsvReader reader(in);
    std::vector<std::string> fields;
    bool first = true;
    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (fields.size() < 2)
            throw DataError("region table line " + std::to_string(reader.line()) + ": expected 2 columns");
        auto region = try_parse_region(trim(fields[1]));
        if (!region) {
            if (first) {
                first = false;
                continue;
            }
            throw DataError("region table line " + std::to_string(reader.line()) + ": unknown region '" +
                            fields[1] + "'");
        }
        first = false;
        table.add(std::string(trim(fields[0])), *region);
    }
    return table;
}

void DemographicTable::add(const std::string& inspection_id, const Composition& fractions) {
    double total = 0.0;
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0))
            throw DataError("composition for " + inspection_id + " has an entry outside [0,1]");
        total += f;
    }
    if (total > 1.0 + 1e-9) throw DataError("composition for " + inspection_id + " sums above 1");
    by_id_[inspection_id] = fractions;
}

const Composition* DemographicTable::find(const std::string& inspection_id) const {
    auto it = by_id_.find(inspection_id);
    return it == by_id_.end() ? nullptr : &it->second;
}

DemographicTable DemographicTable::load(std::istream& in) {
    DemographicTable table;
    CsvReader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) return table;
    if (fields.size() < 1 + kDemographicCount) throw DataError("demographic table needs 5 columns");
    while (reader.next(fields)) {
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (fields.size() < 1 + kDemographicCount)
            throw DataError("demographic table line " + std::to_string(reader.line()) + ": expected 5 columns");
        Composition c{};
        for (std::size_t g = 0; g < kDemographicCount; ++g) {
            auto v = parse_double(fields[g + 1]);
            if (!v) throw DataError("demographic table line " + std::to_string(reader.line()) + ": bad fraction");
            c[g] = *v;
        }
        table.add(std::string(trim(fields[0])), c);
    }
    return table;
}

std::vector<EvaluationWindow> split_windows(const std::vector<InspectionRecord>& records, int window_days) {
    if (window_days < 1) throw UsageError("window length must be positive");
    if (records.empty()) throw DataError("no inspections to split into windows");
    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                        [](const auto& a, const auto& b) { return a.date < b.date; });
    const Date first = lo->date;
    const Date last = hi->date;
    const auto span = (last - first).count() + 1;
    if (span < window_days)
        throw DataError("records span " + std::to_string(span) + " days, shorter than one " +
                        std::to_string(window_days) + "-day window");

    const std::size_t count = static_cast<std::size_t>((span + window_days - 1) / window_days);
    std::vector<EvaluationWindow> windows(count);
    std::vector<std::vector<char>> seen(count, std::vector<char>(static_cast<std::size_t>(window_days), 0));
    for (std::size_t w = 0; w < count; ++w) {
        windows[w].index = static_cast<int>(w);
        windows[w].start = first + std::chrono::days{static_cast<int>(w) * window_days};
        windows[w].end = windows[w].start + std::chrono::days{window_days - 1};
    }
    // Records in row order: train sets are rows strictly before the start.
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto offset = (records[i].date - first).count();
        const auto w = static_cast<std::size_t>(offset / window_days);
        windows[w].test_rows.push_back(i);
        seen[w][static_cast<std::size_t>(offset % window_days)] = 1;
        for (std::size_t later = w + 1; later < count; ++later) windows[later].train_rows.push_back(i);
    }
    for (std::size_t w = 0; w < count; ++w)
        windows[w].complete = std::all_of(seen[w].begin(), seen[w].end(), [](char c) { return c != 0; });
    return windows;
}

void write_canonical(std::ostream& out, const Dataset& dataset) {
    std::vector<std::string> header = {"inspection_id", "establishment_id", "date",      "cluster",
                                       "zip",           "latitude",         "longitude", "critical_found",
                                       "serious_found"};
    const bool features = dataset.has_features();
    if (features)
        for (auto name : kFeatureNames) header.emplace_back(name);
    write_csv_row(out, header);

    std::vector<std::string> row;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& r = dataset.records[i];
        row = {r.inspection_id,
               r.establishment_id,
               format_date(r.date),
               std::string(cluster_name(r.cluster)),
               r.zip,
               r.latitude ? format_double(*r.latitude) : "",
               r.longitude ? format_double(*r.longitude) : "",
               r.critical_found ? "1" : "0",
               r.serious_found ? (*r.serious_found ? "1" : "0") : ""};
        if (features)
            for (double v : dataset.features[i].values) row.push_back(format_double(v));
        write_csv_row(out, row);
    }
}

}  // namespace fairsched
