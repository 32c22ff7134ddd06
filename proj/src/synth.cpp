#include "fairsched/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace fairsched {

namespace {

// Inspections per (cluster, side) on the City's dataset; rows Purple .. Brown,
// columns in Region order.
constexpr std::array<std::array<double, kRegionCount>, kClusterCount> kClusterBySide = {{
    {412, 493, 0, 1, 344, 0, 20, 0, 7},                 // Purple
    {344, 799, 161, 176, 1096, 65, 340, 126, 353},      // Blue
    {476, 429, 480, 340, 242, 236, 345, 1050, 494},     // Orange
    {1551, 1223, 50, 112, 658, 379, 125, 133, 727},     // Green
    {697, 225, 3, 1, 752, 205, 139, 5, 990},            // Yellow
    {9, 265, 22, 343, 51, 371, 51, 485, 418},           // Brown
}};

constexpr std::array<std::array<double, 2>, kRegionCount> kSideCentroid = {{
    {41.88, -87.63}, {41.99, -87.67}, {41.70, -87.56}, {41.71, -87.68}, {41.94, -87.65},
    {41.94, -87.75}, {41.79, -87.60}, {41.79, -87.72}, {41.88, -87.70},
}};

constexpr std::array<double, kRegionCount> kBurglaryBase = {25, 30, 55, 45, 20, 35, 60, 50, 45};
constexpr std::array<double, kRegionCount> kSanitationBase = {30, 35, 40, 35, 45, 40, 35, 40, 50};
constexpr std::array<double, kRegionCount> kGarbageBase = {20, 40, 45, 50, 35, 45, 40, 55, 45};

struct Establishment {
    std::string id;
    std::size_t region = 0;
    std::string zip;
    double lat = 0, lon = 0;
    double license_age = 0;  // years at the start of the dataset
    bool consumption = false;
    bool tobacco = false;
    Composition composition{};
    std::optional<Cluster> last_cluster;
    std::optional<Date> last_date;
    bool last_critical = false;
    bool last_serious = false;
};

std::string padded(char prefix, std::size_t n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, n);
    return buf;
}

}  // namespace

SynthData generate_synthetic(const SynthConfig& config) {
    if (config.days < 1 || config.per_day < 1 || config.establishments < 1)
        throw UsageError("synthetic dataset needs positive days, per_day and establishments");

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SynthData out;
    std::array<std::vector<std::string>, kRegionCount> zips;
    for (std::size_t r = 0; r < kRegionCount; ++r)
        for (int k = 0; k < 3; ++k) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "60%03zu", 600 + r * 10 + static_cast<std::size_t>(k));
            zips[r].push_back(buf);
            out.regions.add(buf, kAllRegions[r]);
        }

    std::array<double, kRegionCount> side_totals{};
    for (const auto& row : kClusterBySide)
        for (std::size_t r = 0; r < kRegionCount; ++r) side_totals[r] += row[r];
    std::discrete_distribution<std::size_t> pick_side(side_totals.begin(), side_totals.end());
    std::array<std::discrete_distribution<std::size_t>, kRegionCount> cluster_in_side;
    for (std::size_t r = 0; r < kRegionCount; ++r) {
        std::array<double, kClusterCount> w{};
        for (std::size_t c = 0; c < kClusterCount; ++c) w[c] = config.balanced_clusters ? 1.0 : kClusterBySide[c][r];
        cluster_in_side[r] = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    std::vector<Establishment> shops(static_cast<std::size_t>(config.establishments));
    std::gamma_distribution<double> gamma(1.0, 1.0);
    for (std::size_t i = 0; i < shops.size(); ++i) {
        auto& s = shops[i];
        s.id = padded('E', i + 1, 5);
        s.region = pick_side(rng);
        s.zip = zips[s.region][static_cast<std::size_t>(unit(rng) * 3.0) % 3];
        s.lat = kSideCentroid[s.region][0] + 0.02 * normal(rng);
        s.lon = kSideCentroid[s.region][1] + 0.02 * normal(rng);
        s.license_age = 10.0 * unit(rng);
        s.consumption = unit(rng) < 0.1;
        s.tobacco = unit(rng) < 0.15;
        double total = 0.0;
        for (auto& f : s.composition) total += (f = gamma(rng));
        for (auto& f : s.composition) f = 0.95 * f / total;
    }

    std::uniform_int_distribution<std::size_t> pick_shop(0, shops.size() - 1);
    auto& records = out.dataset.records;
    auto& features = out.dataset.features;
    records.reserve(static_cast<std::size_t>(config.days) * static_cast<std::size_t>(config.per_day));
    features.reserve(records.capacity());
    std::size_t next_id = 1;
    for (int day = 0; day < config.days; ++day) {
        const Date date = config.start + std::chrono::days{day};
        const double season = std::sin(2.0 * std::numbers::pi * (day - 80) / 365.25);
        for (int k = 0; k < config.per_day; ++k) {
            auto& shop = shops[pick_shop(rng)];
            Cluster cluster = kAllClusters[cluster_in_side[shop.region](rng)];
            if (shop.last_cluster && !config.balanced_clusters && unit(rng) < 0.6) cluster = *shop.last_cluster;

            InspectionRecord rec;
            rec.inspection_id = padded('S', next_id++, 7);
            rec.establishment_id = shop.id;
            rec.date = date;
            rec.cluster = cluster;
            rec.zip = shop.zip;
            rec.latitude = shop.lat;
            rec.longitude = shop.lon;

            HistoryFeatures h;
            h.time_since_last = 2.0;
            if (shop.last_date) {
                h.past_critical = shop.last_critical ? 1.0 : 0.0;
                h.past_serious = shop.last_serious ? 1.0 : 0.0;
                h.time_since_last = static_cast<double>((date - *shop.last_date).count()) / 365.25;
            }
            const double purple = cluster == Cluster::Purple ? 1.0 : 0.0;
            std::array<double, kCovariateCount> cov = {
                shop.license_age + day / 365.25,
                shop.consumption ? 1.0 : 0.0,
                shop.tobacco ? 1.0 : 0.0,
                std::round(60.0 + 22.0 * season + 6.0 * normal(rng)),
                std::max(0.0, kBurglaryBase[shop.region] + 8.0 * normal(rng) + config.proxy_strength * purple),
                std::max(0.0, kSanitationBase[shop.region] + 10.0 * normal(rng)),
                std::max(0.0, kGarbageBase[shop.region] + 10.0 * normal(rng)),
            };
            rec.history = h;
            rec.covariates = cov;
            FeatureRow row = make_feature_row(rec, h);

            double p = 0.0;
            if (config.labels == LabelModel::ClusterRates) {
                p = config.cluster_rates[index_of(cluster)];
            } else {
                double z = config.intercept;
                for (std::size_t f = 0; f < kFeatureCount; ++f) z += config.coefficients[f] * row.values[f];
                p = 1.0 / (1.0 + std::exp(-z));
            }
            rec.critical_found = unit(rng) < p;
            rec.serious_found = unit(rng) < (rec.critical_found ? 0.45 : 0.2);

            shop.last_cluster = cluster;
            shop.last_date = date;
            shop.last_critical = rec.critical_found;
            shop.last_serious = *rec.serious_found;

            out.demographics.add(rec.inspection_id, shop.composition);
            records.push_back(std::move(rec));
            features.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace fairsched
