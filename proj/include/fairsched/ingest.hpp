#pragma once

// Loading inspection data, history features, region/demographic lookups and
// the partition of the timeline into evaluation windows.

#include "fairsched/types.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairsched {

inline constexpr std::size_t kCovariateCount = 7;  // ageAtInspection .. heat_garbage

struct HistoryFeatures {
    double past_critical = 0.0;
    double past_serious = 0.0;
    double time_since_last = 0.0;
};

struct InspectionRecord {
    std::string inspection_id;
    std::string establishment_id;
    Date date;
    Cluster cluster = Cluster::Purple;
    std::string zip;
    std::optional<double> latitude;
    std::optional<double> longitude;
    bool critical_found = false;
    std::optional<bool> serious_found;
    // Present when the source carries history columns directly.
    std::optional<HistoryFeatures> history;
    // ageAtInspection, the two license flags, temperatureMax and the three heat maps.
    std::optional<std::array<double, kCovariateCount>> covariates;
};

struct FeatureRow {
    std::string inspection_id;
    std::array<double, kFeatureCount> values{};

    double operator[](std::size_t i) const { return values[i]; }
};

FeatureRow make_feature_row(const InspectionRecord& record, const HistoryFeatures& history);

struct Dataset {
    std::vector<InspectionRecord> records;
    // Either empty or aligned index-for-index with `records`.
    std::vector<FeatureRow> features;

    bool has_features() const { return !records.empty() && features.size() == records.size(); }
};

/// Maps logical field names (inspection_id, date, cluster, ... and the feature
/// names) to the column headers of a particular source file.
class Schema {
public:
    Schema() = default;  // identity mapping

    // Reads `field<TAB>column` or `field=column` lines; '#' starts a comment.
    static Schema load(std::istream& in);

    void set(const std::string& field, const std::string& column) { columns_[field] = column; }
    std::string column_for(const std::string& field) const;

private:
    std::map<std::string, std::string> columns_;
};

struct RowError {
    std::size_t line;
    std::string message;
};

struct ParseResult {
    Dataset dataset;
    std::vector<RowError> errors;
};

/// Throws DataError when a required column is absent from the header.
ParseResult parse_inspections(std::istream& in, const Schema& schema = {});

struct HistoryConfig {
    double first_visit_days = 730.0;  // two years
    double days_per_unit = 1.0;       // 365.25 reports timeSinceLast in years
};

/// Per-inspection history relative to the establishment's previous visit,
/// aligned with `records`. Same-day repeats are ordered by inspection_id.
std::vector<HistoryFeatures> derive_history_features(const std::vector<InspectionRecord>& records,
                                                     const HistoryConfig& config = {});

/// Fills `dataset.features` from record covariates, deriving history where the
/// source had none. Returns false if covariates are missing.
bool assemble_features(Dataset& dataset, const HistoryConfig& config = {});

class UnmappedRegion : public DataError {
public:
    using DataError::DataError;
};

class RegionTable {
public:
    void add(const std::string& zip, Region region) { by_zip_[zip] = region; }
    Region map_region(const std::string& zip) const;
    std::optional<Region> find(const std::string& zip) const;
    std::size_t size() const { return by_zip_.size(); }
    const std::map<std::string, Region>& entries() const { return by_zip_; }

    // Two columns: zip, region name. A header row is skipped when present.
    static RegionTable load(std::istream& in);

private:
    std::map<std::string, Region> by_zip_;
};

Region map_region(const std::string& zip, const RegionTable& table);

using Composition = std::array<double, kDemographicCount>;

class DemographicTable {
public:
    void add(const std::string& inspection_id, const Composition& fractions);
    const Composition* find(const std::string& inspection_id) const;
    std::size_t size() const { return by_id_.size(); }

    // Columns: inspection_id, White, Black, Asian, Hispanic.
    static DemographicTable load(std::istream& in);

private:
    std::unordered_map<std::string, Composition> by_id_;
};

struct EvaluationWindow {
    int index = 0;
    Date start;
    Date end;  // inclusive: end - start == window_days - 1
    std::vector<std::size_t> train_rows;  // indices of records dated before start
    std::vector<std::size_t> test_rows;   // indices of records inside [start, end]
    bool complete = false;
};

std::vector<EvaluationWindow> split_windows(const std::vector<InspectionRecord>& records,
                                            int window_days = 60);

void write_canonical(std::ostream& out, const Dataset& dataset);

}  // namespace fairsched
