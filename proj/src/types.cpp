#include "fairsched/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace fairsched {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

constexpr std::array<std::string_view, kClusterCount> kClusterNames = {
    "Purple", "Blue", "Orange", "Green", "Yellow", "Brown"};

constexpr std::array<std::string_view, kRegionCount> kRegionNames = {
    "Central", "Far North", "Far Southeast", "Far Southwest", "North",
    "Northwest", "South", "Southwest", "West"};

}  // namespace

Date parse_date(std::string_view text) {
    using namespace std::chrono;
    auto fail = [&]() -> DataError {
        return DataError("malformed date '" + std::string(text) + "'");
    };
    // Trim a trailing time-of-day part ("2014-09-01T00:00:00", "09/01/2014 12:00").
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    if (auto cut = s.find_first_of("T "); cut != std::string_view::npos) s = s.substr(0, cut);

    int y = 0, m = 0, d = 0;
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
            !parse_int(s.substr(8, 2), d))
            throw fail();
    } else if (auto a = s.find('/'); a != std::string_view::npos) {
        auto b = s.find('/', a + 1);
        if (b == std::string_view::npos) throw fail();
        if (!parse_int(s.substr(0, a), m) || !parse_int(s.substr(a + 1, b - a - 1), d) ||
            !parse_int(s.substr(b + 1), y))
            throw fail();
    } else {
        throw fail();
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw fail();
    return sys_days{ymd};
}

std::string format_date(Date d) {
    using namespace std::chrono;
    year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string_view cluster_name(Cluster c) { return kClusterNames[index_of(c)]; }

Cluster parse_cluster(std::string_view name) {
    auto key = lower(name);
    if (key.rfind("inspector", 0) == 0) key = key.substr(9);
    for (Cluster c : kAllClusters)
        if (lower(cluster_name(c)) == key) return c;
    throw DataError("unknown sanitarian cluster '" + std::string(name) + "'");
}

int binarize_cluster(Cluster c) {
    switch (c) {
        case Cluster::Purple:
        case Cluster::Blue:
        case Cluster::Orange:
            return 1;
        default:
            return 0;
    }
}

int binarize_cluster(std::string_view name) { return binarize_cluster(parse_cluster(name)); }

std::string_view region_name(Region r) { return kRegionNames[static_cast<std::size_t>(r)]; }

std::optional<Region> try_parse_region(std::string_view name) {
    auto key = lower(name);
    for (Region r : kAllRegions)
        if (lower(region_name(r)) == key) return r;
    // Common abbreviations used in the cluster-by-side table.
    if (key == "cc") return Region::Central;
    if (key == "far se") return Region::FarSoutheast;
    if (key == "far sw") return Region::FarSouthwest;
    return std::nullopt;
}

std::size_t cluster_feature_index(Cluster c) {
    switch (c) {
        case Cluster::Blue: return 0;
        case Cluster::Brown: return 1;
        case Cluster::Green: return 2;
        case Cluster::Orange: return 3;
        case Cluster::Purple: return 4;
        case Cluster::Yellow: return 5;
    }
    return 0;
}

bool is_cluster_feature(std::string_view name) {
    auto idx = feature_index(name);
    return idx && *idx < kClusterFeatureCount;
}

std::optional<std::size_t> feature_index(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (kFeatureNames[i] == name) return i;
    return std::nullopt;
}

}  // namespace fairsched
