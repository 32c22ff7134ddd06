#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairsched {

using Date = std::chrono::sys_days;

/// Thrown for malformed or inconsistent input data (bad rows, unknown labels).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an operation is called with arguments that violate its contract.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an optimisation or metric cannot produce a finite answer.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses "YYYY-MM-DD" (optionally followed by a time part) or "MM/DD/YYYY".
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Sanitarian clusters, ordered from highest to lowest critical violation rate.
enum class Cluster : int { Purple = 0, Blue, Orange, Green, Yellow, Brown };
inline constexpr std::size_t kClusterCount = 6;
inline constexpr std::array<Cluster, kClusterCount> kAllClusters = {
    Cluster::Purple, Cluster::Blue, Cluster::Orange,
    Cluster::Green,  Cluster::Yellow, Cluster::Brown};

std::string_view cluster_name(Cluster c);
// Case-insensitive; throws DataError for anything but the six names.
Cluster parse_cluster(std::string_view name);
inline std::size_t index_of(Cluster c) { return static_cast<std::size_t>(c); }

/// Purple, Blue and Orange form the high-rate group (1); the rest are 0.
int binarize_cluster(Cluster c);
int binarize_cluster(std::string_view name);

enum class Region : int {
    Central = 0, FarNorth, FarSoutheast, FarSouthwest, North,
    Northwest, South, Southwest, West
};
inline constexpr std::size_t kRegionCount = 9;
inline constexpr std::array<Region, kRegionCount> kAllRegions = {
    Region::Central, Region::FarNorth, Region::FarSoutheast,
    Region::FarSouthwest, Region::North, Region::Northwest,
    Region::South, Region::Southwest, Region::West};

std::string_view region_name(Region r);
std::optional<Region> try_parse_region(std::string_view name);

enum class DemographicGroup : int { White = 0, Black, Asian, Hispanic };
inline constexpr std::size_t kDemographicCount = 4;
inline constexpr std::array<std::string_view, kDemographicCount> kDemographicNames = {
    "White", "Black", "Asian", "Hispanic"};

// Model features in the City's published coefficient order.
inline constexpr std::size_t kFeatureCount = 16;
inline constexpr std::size_t kClusterFeatureCount = 6;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "Inspectorblue",
    "Inspectorbrown",
    "Inspectorgreen",
    "Inspectororange",
    "Inspectorpurple",
    "Inspectoryellow",
    "pastCritical",
    "pastSerious",
    "timeSinceLast",
    "ageAtInspection",
    "consumption_on_premises_incidental_activity",
    "tobacco_retail_over_counter",
    "temperatureMax",
    "heat_burglary",
    "heat_sanitation",
    "heat_garbage",
};

// Position of the indicator for `c` inside kFeatureNames.
std::size_t cluster_feature_index(Cluster c);
bool is_cluster_feature(std::string_view name);
std::optional<std::size_t> feature_index(std::string_view name);

inline constexpr std::size_t kPastCritical = 6;
inline constexpr std::size_t kPastSerious = 7;
inline constexpr std::size_t kTimeSinceLast = 8;
inline constexpr std::size_t kAgeAtInspection = 9;
inline constexpr std::size_t kHeatBurglary = 13;

}  // namespace fairsched
