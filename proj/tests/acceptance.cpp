// Acceptance checks. Prints one PASS / FAIL / SKIP line per criterion and
// exits non-zero if any criterion fails.
//
// Real-data criteria read FAIRSCHED_DATA (inspections file), optionally
// FAIRSCHED_SCHEMA (column mapping) and FAIRSCHED_TIME_UNIT (days|years).

#include "fairsched/eval.hpp"
#include "fairsched/synth.hpp"
#include "fairsched/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace fairsched;

namespace {

// Tolerances.
constexpr double kMuGainDays = 4.0;           // 1: default mu minus schenk mu, real data
constexpr double kSplitGainDays = 7.0;        // 1: gap on the Sep-Oct 2014 window
constexpr double kSplitGainTolerance = 2.0;
constexpr double kRuntimeSeconds = 300.0;     // 1
constexpr double kRateTolerancePp = 0.05;     // 2
constexpr double kInClusterRatio = 0.25;      // 4: in-cluster d / schenk d
constexpr double kInClusterDeltaDays = 1.0;   // 4: synthetic cluster deltas
constexpr double kCoefficientTolerance = 0.2; // 5
constexpr double kGradientRelTolerance = 1e-5;  // 6a
constexpr double kZafarSlack = 1e-4;            // 6d
constexpr double kZeroSumTolerance = 1e-9;      // 6f
constexpr int kSignTestSeeds = 20;              // 6h
constexpr int kSignTestRequired = 18;
constexpr double kPropertySuiteSeconds = 60.0;

int failures = 0;

void report(const std::string& id, const std::string& status, const std::string& detail) {
    std::printf("%-4s %-4s %s\n", id.c_str(), status.c_str(), detail.c_str());
    std::fflush(stdout);
    if (status == "FAIL") ++failures;
}

void verdict(const std::string& id, bool ok, const std::string& detail) { report(id, ok ? "PASS" : "FAIL", detail); }

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Date kWindowStart = Date{std::chrono::year{2014} / 9 / 1};

// ---------------------------------------------------------------- 6a

void check_gradient() {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int n = 20 + static_cast<int>(rng() % 80), p = 2 + static_cast<int>(rng() % 10);
        Matrix X(n, p);
        Vector y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j) X(i, j) = normal(rng);
            y(i) = rng() % 2;
        }
        TrainedModel m;
        for (int j = 0; j < p; ++j) {
            m.feature_names.push_back("f" + std::to_string(j));
            m.coefficients.push_back(0.5 * normal(rng));
        }
        m.intercept = 0.5 * normal(rng);
        const double l2 = (inst % 2) ? 0.01 : 0.0;
        const Vector g = log_loss_and_gradient(m, X, y, l2).gradient;
        Vector fd(p + 1);
        const double h = 1e-6;
        for (int j = 0; j <= p; ++j) {
            TrainedModel up = m, down = m;
            if (j < p) {
                up.coefficients[j] += h;
                down.coefficients[j] -= h;
            } else {
                up.intercept += h;
                down.intercept -= h;
            }
            fd(j) = (log_loss_and_gradient(up, X, y, l2).loss - log_loss_and_gradient(down, X, y, l2).loss) / (2 * h);
        }
        worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / std::max(g.cwiseAbs().maxCoeff(), 1e-12));
    }
    verdict("6a", worst <= kGradientRelTolerance,
            "gradient vs central differences, 20 instances, worst relative error " + fmt("%.2e", worst));
}

// ---------------------------------------------------------------- 6b, 6c

struct Window {
    std::vector<WindowInspection> inspections;
    ScoreTable scores;
};

Window random_window(std::mt19937_64& rng, std::size_t n, int days, int distinct) {
    Window w;
    for (std::size_t i = 0; i < n; ++i) {
        WindowInspection x;
        x.inspection_id = "i" + std::to_string(rng() % 1000) + "_" + std::to_string(i);
        x.original_date = kWindowStart + std::chrono::days{static_cast<int>(rng() % days)};
        x.cluster = kAllClusters[rng() % (n <= 8 ? 2 : 6)];
        x.critical_found = rng() % 3 == 0;
        w.scores[x.inspection_id] = static_cast<double>(rng() % distinct) / distinct;
        w.inspections.push_back(x);
    }
    return w;
}

using Slots = std::multiset<std::pair<Date, Cluster>>;

bool preserves_counts(const Window& w, const Schedule& s, bool per_cluster) {
    if (s.entries.size() != w.inspections.size()) return false;
    std::multiset<Date> a, b;
    Slots ac, bc;
    std::multiset<std::pair<std::string, Cluster>> ids_a, ids_b;
    for (const auto& x : w.inspections) {
        a.insert(x.original_date);
        ac.insert({x.original_date, x.cluster});
        ids_a.insert({x.inspection_id, x.cluster});
    }
    for (const auto& e : s.entries) {
        b.insert(e.assigned_date);
        bc.insert({e.assigned_date, e.cluster});
        ids_b.insert({e.inspection_id, e.cluster});
    }
    return a == b && ids_a == ids_b && (!per_cluster || ac == bc);
}

void check_count_preservation() {
    std::mt19937_64 rng(77);
    int bad = 0;
    for (int k = 0; k < 200; ++k) {
        const Window w = random_window(rng, 1 + rng() % 400, 1 + static_cast<int>(rng() % 60), 50);
        if (!preserves_counts(w, global_reorder(w.scores, kWindowStart, w.inspections), false)) ++bad;
        if (!preserves_counts(w, in_cluster_reorder(w.scores, kWindowStart, w.inspections), true)) ++bad;
    }
    verdict("6b", bad == 0, "per-day and per-(cluster, day) counts on 200 random windows, " + std::to_string(bad) +
                                " violations");
}

// Rank by score descending, then original date, then id. Among all slot
// assignments allowed by the counts, the expected schedule is the one whose
// day-by-day sequence of ranks is lexicographically smallest.
std::map<std::string, Date> permutation_oracle(const Window& w, bool per_cluster) {
    const std::size_t n = w.inspections.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &x = w.inspections[a], &y = w.inspections[b];
        const double sx = w.scores.at(x.inspection_id), sy = w.scores.at(y.inspection_id);
        if (sx != sy) return sx > sy;
        if (x.original_date != y.original_date) return x.original_date < y.original_date;
        return x.inspection_id < y.inspection_id;
    });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;

    std::vector<std::size_t> slot_owner(n);  // slots are the original (date, cluster) pairs, sorted
    std::iota(slot_owner.begin(), slot_owner.end(), 0);
    std::sort(slot_owner.begin(), slot_owner.end(), [&](std::size_t a, std::size_t b) {
        return w.inspections[a].original_date < w.inspections[b].original_date;
    });
    std::vector<std::size_t> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best_key;
    do {
        bool ok = true;
        for (std::size_t s = 0; ok && s < n; ++s)
            ok = !per_cluster || w.inspections[perm[s]].cluster == w.inspections[slot_owner[s]].cluster;
        if (!ok) continue;
        // Ranks per day, sorted within the day.
        std::vector<std::size_t> key;
        for (std::size_t s = 0; s < n;) {
            std::size_t e = s;
            std::vector<std::size_t> day;
            while (e < n && w.inspections[slot_owner[e]].original_date == w.inspections[slot_owner[s]].original_date)
                day.push_back(rank[perm[e++]]);
            std::sort(day.begin(), day.end());
            key.insert(key.end(), day.begin(), day.end());
            s = e;
        }
        if (best.empty() || key < best_key) {
            best = perm;
            best_key = key;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::map<std::string, Date> out;
    for (std::size_t s = 0; s < n; ++s)
        out[w.inspections[best[s]].inspection_id] = w.inspections[slot_owner[s]].original_date;
    return out;
}

// For in-cluster reorder, lexicographic order across all days is not the same
// as per-cluster order, so the oracle is applied to each cluster separately.
std::map<std::string, Date> in_cluster_oracle(const Window& w) {
    std::map<std::string, Date> out;
    for (Cluster c : kAllClusters) {
        Window sub;
        for (const auto& x : w.inspections)
            if (x.cluster == c) {
                sub.inspections.push_back(x);
                sub.scores[x.inspection_id] = w.scores.at(x.inspection_id);
            }
        if (sub.inspections.empty()) continue;
        const auto part = permutation_oracle(sub, false);
        out.insert(part.begin(), part.end());
    }
    return out;
}

std::map<std::string, Date> assigned(const Schedule& s) {
    std::map<std::string, Date> out;
    for (const auto& e : s.entries) out[e.inspection_id] = e.assigned_date;
    return out;
}

void check_permutation_oracle() {
    std::mt19937_64 rng(5);
    int windows = 0, bad = 0;
    for (std::size_t n = 1; n <= 8; ++n)
        for (int k = 0; k < (n == 8 ? 6 : 25); ++k) {
            const Window w = random_window(rng, n, 1 + static_cast<int>(rng() % 4), 3 + static_cast<int>(rng() % 5));
            ++windows;
            if (assigned(global_reorder(w.scores, kWindowStart, w.inspections)) != permutation_oracle(w, false)) ++bad;
            if (assigned(in_cluster_reorder(w.scores, kWindowStart, w.inspections)) != in_cluster_oracle(w)) ++bad;
        }
    verdict("6c", bad == 0, "global and in-cluster reorder vs permutation oracle on " + std::to_string(windows) +
                                " windows of <= 8 inspections, " + std::to_string(bad) + " mismatches");
}

// ---------------------------------------------------------------- 6d

void check_zafar() {
    SynthConfig cfg;
    cfg.seed = 8;
    cfg.days = 120;
    cfg.per_day = 30;
    cfg.establishments = 800;
    const SynthData data = generate_synthetic(cfg);
    std::vector<bool> labels;
    std::vector<Cluster> clusters;
    for (const auto& r : data.dataset.records) {
        labels.push_back(r.critical_found);
        clusters.push_back(r.cluster);
    }
    const auto names = all_feature_names();
    const Matrix X = design_matrix(data.dataset.features, names);
    double worst = -1.0;
    std::string detail;
    for (double c : kZafarGrid) {
        const ZafarResult z =
            train_zafar(X, label_vector(labels), names, ProtectedSpec::polyvalent(clusters), c, TrainConfig{});
        const double excess = z.covariances.max_abs() - c;
        worst = std::max(worst, excess);
        detail += " c=" + format_double(c) + ":" + fmt("%.2e", z.covariances.max_abs());
    }
    verdict("6d", worst <= kZafarSlack, "max |cov| per grid value (" + std::to_string(X.rows()) + " rows):" + detail);
}

// ---------------------------------------------------------------- 6e

struct IPoint {
    std::int64_t x, y;
};

// Segment a-b meets the closed lower-left quadrant of p somewhere other than p.
bool segment_dominates(IPoint a, IPoint b, IPoint p) {
    std::int64_t lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 1;
    const std::int64_t d[2] = {b.x - a.x, b.y - a.y}, s[2] = {p.x - a.x, p.y - a.y};
    if (d[0] == 0 && d[1] == 0) return s[0] >= 0 && s[1] >= 0 && (s[0] > 0 || s[1] > 0);
    for (int k = 0; k < 2; ++k) {
        if (d[k] == 0) {
            if (s[k] < 0) return false;
        } else if (d[k] > 0) {
            if (s[k] * hi_d < hi_n * d[k]) hi_n = s[k], hi_d = d[k];
        } else {
            if (lo_n * -d[k] < -s[k] * lo_d) lo_n = -s[k], lo_d = -d[k];
        }
    }
    if (hi_n * lo_d < lo_n * hi_d) return false;
    if (hi_n * lo_d != lo_n * hi_d) return true;
    return !(a.x * lo_d + lo_n * d[0] == p.x * lo_d && a.y * lo_d + lo_n * d[1] == p.y * lo_d);
}

void check_pareto() {
    std::mt19937_64 rng(31);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const std::int64_t range = trial % 4 == 0 ? 5 : 30;
        std::vector<IPoint> pts;
        std::vector<TradeoffPoint> tp;
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back({static_cast<std::int64_t>(rng() % range), static_cast<std::int64_t>(rng() % range)});
            tp.push_back({"p" + std::to_string(i), "", static_cast<double>(pts.back().x), 0,
                          static_cast<double>(pts.back().y), 0});
        }
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < n; ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j)
                for (std::size_t k = j; k < n && !dominated; ++k)
                    if (j != i && k != i) dominated = segment_dominates(pts[j], pts[k], pts[i]);
            if (!dominated) expected.push_back(i);
        }
        if (pareto_frontier(tp) != expected) ++bad;
    }
    verdict("6e", bad == 0, "frontier vs convex-domination oracle on 100 random sets, " + std::to_string(bad) +
                                " mismatches");
}

// ---------------------------------------------------------------- 6f, 6g

std::vector<DetectionOutcome> random_outcomes(std::mt19937_64& rng, int n) {
    std::vector<DetectionOutcome> o;
    for (int i = 0; i < n; ++i)
        o.push_back({std::to_string(i), static_cast<int>(rng() % 60), rng() % 4 == 0, kAllClusters[rng() % 6],
                     kAllRegions[rng() % 9]});
    return o;
}

void check_zero_sum() {
    std::mt19937_64 rng(4);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto o = random_outcomes(rng, 5 + static_cast<int>(rng() % 2000));
        for (Grouping g : {Grouping::Cluster, Grouping::Region}) {
            const auto r = group_mean_deltas(o, g, Mode::DP);
            double sum = 0.0;
            for (const auto& d : r.deltas) sum += d.delta_days * static_cast<double>(d.count);
            worst = std::max(worst, std::abs(sum));
        }
    }
    verdict("6f", worst <= kZeroSumTolerance, "count-weighted DP deltas sum, worst " + fmt("%.2e", worst));
}

void check_d_zero() {
    std::mt19937_64 rng(6);
    int bad = 0;
    for (int trial = 0; trial < 200; ++trial) {
        // Same multiset of T values in every cluster, so all group means agree.
        std::vector<DetectionOutcome> o;
        const int per = 1 + static_cast<int>(rng() % 6);
        std::vector<int> ts;
        for (int k = 0; k < per; ++k) ts.push_back(static_cast<int>(rng() % 60));
        for (Cluster c : kAllClusters)
            for (int k = 0; k < per; ++k)
                o.push_back({std::string(cluster_name(c)) + std::to_string(k), ts[k], true, c, std::nullopt});
        for (Mode m : {Mode::DP, Mode::EOpp})
            if (unfairness_d(o, Grouping::Cluster, m) != 0.0) ++bad;
        // Any shift of one group makes d positive.
        o[0].T += 1 + static_cast<int>(rng() % 5);
        if (!(unfairness_d(o, Grouping::Cluster, Mode::EOpp) > 0.0)) ++bad;
    }
    verdict("6g", bad == 0, "d == 0 iff group means equal, 200 cases, " + std::to_string(bad) + " violations");
}

// ---------------------------------------------------------------- 6h

struct SignResult {
    int both = 0;
    double mean_mu_gain = 0.0, mean_d_gain = 0.0;
};

SignResult sign_test() {
    SignResult out;
    for (int seed = 1; seed <= kSignTestSeeds; ++seed) {
        SynthConfig cfg;
        cfg.seed = static_cast<unsigned>(seed);
        cfg.days = 240;
        cfg.per_day = 15;
        cfg.establishments = 500;
        cfg.cluster_rates = {0.40, 0.25, 0.14, 0.10, 0.06, 0.025};
        const SynthData data = generate_synthetic(cfg);
        const auto ctx = EvalContext::build(data.dataset, 60);
        const auto runs = run_policies({preset_policy("default"), preset_policy("schenk")}, ctx);
        const auto def = tradeoff_point(runs[0], Grouping::Cluster, Mode::EOpp);
        const auto sch = tradeoff_point(runs[1], Grouping::Cluster, Mode::EOpp);
        if (sch.y < def.y && sch.x > def.x) ++out.both;
        out.mean_mu_gain += (def.y - sch.y) / kSignTestSeeds;
        out.mean_d_gain += (sch.x - def.x) / kSignTestSeeds;
    }
    return out;
}

void check_sign_test(const SignResult& s, const std::string& id, const std::string& prefix) {
    verdict(id, s.both >= kSignTestRequired,
            prefix + "global-reorder lowers mu and raises cluster d on " + std::to_string(s.both) + "/" +
                std::to_string(kSignTestSeeds) + " seeds (mean mu gain " + fmt("%.2f", s.mean_mu_gain) +
                " days, mean d gain " + fmt("%.2f", s.mean_d_gain) + ")");
}

// ---------------------------------------------------------------- 4 (synthetic part)

std::map<std::string, double> pooled_cluster_deltas(const PolicyRun& run, Mode mode) {
    std::map<std::string, std::pair<double, double>> acc;
    for (const FoldResult* f : run.succeeded())
        for (const auto& d : f->metrics.at({Grouping::Cluster, mode}).deltas) {
            acc[d.group].first += d.delta_days * static_cast<double>(d.count);
            acc[d.group].second += static_cast<double>(d.count);
        }
    std::map<std::string, double> out;
    for (const auto& [g, a] : acc) out[g] = a.first / a.second;
    return out;
}

void check_in_cluster_synthetic() {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.days = 240;
    cfg.per_day = 2500;
    cfg.establishments = 60000;
    cfg.balanced_clusters = true;
    const SynthData data = generate_synthetic(cfg);
    const auto ctx = EvalContext::build(data.dataset, 60);
    const auto runs = run_policies({preset_policy("in-cluster"), preset_policy("schenk")}, ctx);
    const auto deltas = pooled_cluster_deltas(runs[0], Mode::EOpp);
    const auto schenk = pooled_cluster_deltas(runs[1], Mode::EOpp);
    double worst = 0.0;
    std::string detail;
    for (const auto& [g, v] : deltas) {
        worst = std::max(worst, std::abs(v));
        detail += " " + g + ":" + fmt("%+.2f", v);
    }
    verdict("4s", deltas.size() == kClusterCount && worst <= kInClusterDeltaDays,
            "synthetic, planted cluster-only rates, " + std::to_string(data.dataset.records.size()) +
                " rows: in-cluster EOpp deltas" + detail + " (schenk Purple " +
                fmt("%+.2f", schenk.count("Purple") ? schenk.at("Purple") : NAN) + ")");
}

// ---------------------------------------------------------------- analogues on synthetic data

void analogue_ordering() {
    SynthConfig cfg;
    cfg.seed = 21;
    cfg.days = 17 * 60;
    cfg.per_day = 20;
    const SynthData data = generate_synthetic(cfg);
    const auto ctx = EvalContext::build(data.dataset, 60);
    const auto run = run_policy(preset_policy("schenk"), ctx);
    const auto d = pooled_cluster_deltas(run, Mode::EOpp);
    bool ordered = d.size() == kClusterCount;
    std::string detail;
    for (std::size_t i = 0; ordered && i + 1 < kClusterCount; ++i)
        ordered = d.at(std::string(cluster_name(kAllClusters[i]))) <
                  d.at(std::string(cluster_name(kAllClusters[i + 1])));
    for (Cluster c : kAllClusters)
        if (d.count(std::string(cluster_name(c))))
            detail += " " + std::string(cluster_name(c)) + ":" + fmt("%+.2f", d.at(std::string(cluster_name(c))));
    verdict("3s", ordered, "synthetic analogue, evaluation-period cluster rates planted: schenk EOpp deltas ordered by rate" + detail);
}

void analogue_coefficients() {
    SynthConfig cfg;
    cfg.seed = 22;
    cfg.days = 900;
    cfg.per_day = 150;
    cfg.labels = LabelModel::Logistic;
    const SynthData data = generate_synthetic(cfg);
    std::vector<bool> labels;
    for (const auto& r : data.dataset.records) labels.push_back(r.critical_found);
    TrainConfig tc;
    tc.l2_weight = 1e-6;
    const TrainedModel m = train_logistic(data.dataset.features, labels, tc).model;
    // The six indicators sum to one, so only their differences are identified;
    // compare after removing the mean indicator coefficient from both sides.
    double planted_mean = 0.0, fitted_mean = 0.0;
    for (std::size_t c = 0; c < kClusterCount; ++c) {
        planted_mean += kCityCoefficients[c] / kClusterCount;
        fitted_mean += *m.coefficient(kFeatureNames[c]) / kClusterCount;
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < kClusterCount; ++c)
        worst = std::max(worst, std::abs((*m.coefficient(kFeatureNames[c]) - fitted_mean) -
                                         (kCityCoefficients[c] - planted_mean)));
    verdict("5s", worst <= kCoefficientTolerance,
            "synthetic analogue, planted coefficients, " + std::to_string(labels.size()) +
                " rows: worst centred cluster coefficient error " + fmt("%.3f", worst));
}

// ---------------------------------------------------------------- real data

struct RealData {
    Dataset dataset;
    std::string source;
};

std::optional<RealData> load_real() {
    const char* path = std::getenv("FAIRSCHED_DATA");
    if (!path || !*path) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw DataError(std::string("cannot open input file '") + path + "'");
    Schema schema;
    if (const char* s = std::getenv("FAIRSCHED_SCHEMA"); s && *s) {
        std::ifstream sin(s);
        if (!sin) throw DataError(std::string("cannot open input file '") + s + "'");
        schema = Schema::load(sin);
    }
    HistoryConfig history;
    if (const char* u = std::getenv("FAIRSCHED_TIME_UNIT"); u && std::string(u) == "years") {
        history.first_visit_days = 2.0 * 365.25;
        history.days_per_unit = 365.25;
    }
    ParseResult parsed = parse_inspections(in, schema);
    if (!parsed.dataset.has_features() && !assemble_features(parsed.dataset, history))
        throw DataError("real dataset lacks the model covariates");
    return RealData{std::move(parsed.dataset), path};
}

void real_data_criteria(const RealData& real) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ctx = EvalContext::build(real.dataset, 60);
    const auto runs =
        run_policies({preset_policy("default"), preset_policy("schenk"), preset_policy("in-cluster")}, ctx);
    const double elapsed = seconds_since(t0);
    const auto def = tradeoff_point(runs[0], Grouping::Cluster, Mode::EOpp);
    const auto sch = tradeoff_point(runs[1], Grouping::Cluster, Mode::EOpp);
    const auto inc = tradeoff_point(runs[2], Grouping::Cluster, Mode::EOpp);

    // Gap on the window holding 2014-09-01.
    double split_gap = NAN;
    for (std::size_t k = 0; k < runs[0].folds.size(); ++k) {
        const auto& w = ctx.windows[static_cast<std::size_t>(runs[0].folds[k].window_index)];
        if (w.start <= kWindowStart && kWindowStart <= w.end && !runs[0].folds[k].failed && !runs[1].folds[k].failed)
            split_gap = runs[0].folds[k].mu - runs[1].folds[k].mu;
    }
    verdict("1", def.y - sch.y >= kMuGainDays && std::abs(split_gap - kSplitGainDays) <= kSplitGainTolerance &&
                     elapsed < kRuntimeSeconds,
            "real data: mu default " + fmt("%.2f", def.y) + ", schenk " + fmt("%.2f", sch.y) + ", Sep 2014 gap " +
                fmt("%.2f", split_gap) + " days, " + fmt("%.0f", elapsed) + " s");

    // Cluster rates over the evaluation-period records.
    std::vector<InspectionRecord> eval_records;
    for (const EvaluationWindow* w : ctx.complete_windows())
        for (auto r : w->test_rows) eval_records.push_back(real.dataset.records[r]);
    double worst = 0.0;
    for (const auto& r : violation_rate_by_cluster(eval_records))
        worst = std::max(worst, std::abs(100 * r.rate - 100 * kEvaluationViolationRates[index_of(r.cluster)]));
    double worst_paired = 0.0;
    for (const auto& r : violation_rate_by_cluster(multi_cluster_subset(eval_records)))
        worst_paired = std::max(worst_paired, std::abs(100 * r.rate - 100 * kPairedViolationRates[index_of(r.cluster)]));
    verdict("2", worst <= kRateTolerancePp && worst_paired <= kRateTolerancePp,
            "real data: worst cluster-rate error " + fmt("%.3f", worst) + " pp, paired " + fmt("%.3f", worst_paired) +
                " pp");

    const auto d = pooled_cluster_deltas(runs[1], Mode::EOpp);
    bool ordered = d.size() == kClusterCount;
    for (std::size_t i = 0; ordered && i + 1 < kClusterCount; ++i)
        ordered = d.at(std::string(cluster_name(kAllClusters[i]))) <
                  d.at(std::string(cluster_name(kAllClusters[i + 1])));
    verdict("3", ordered, "real data: schenk cluster EOpp deltas strictly ordered by violation rate");

    verdict("4r", inc.x < kInClusterRatio * sch.x,
            "real data: in-cluster d " + fmt("%.2f", inc.x) + " vs schenk d " + fmt("%.2f", sch.x));

    // City training split.
    const Date from = Date{std::chrono::year{2011} / 9 / 1}, to = Date{std::chrono::year{2014} / 4 / 30};
    std::vector<FeatureRow> rows;
    std::vector<bool> labels;
    for (std::size_t i = 0; i < real.dataset.records.size(); ++i) {
        const auto& r = real.dataset.records[i];
        if (r.date < from || r.date > to) continue;
        rows.push_back(real.dataset.features[i]);
        labels.push_back(r.critical_found);
    }
    TrainConfig tc;
    tc.l2_weight = 1e-6;
    const TrainedModel m = train_logistic(rows, labels, tc).model;
    double worst_coef = 0.0;
    bool signs = true;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const double fitted = *m.coefficient(kFeatureNames[k]);
        if (k < kClusterCount) worst_coef = std::max(worst_coef, std::abs(fitted - kCityCoefficients[k]));
        signs = signs && (fitted > 0) == (kCityCoefficients[k] > 0);
    }
    verdict("5", worst_coef <= kCoefficientTolerance && signs,
            "real data: worst cluster coefficient error " + fmt("%.3f", worst_coef) +
                (signs ? ", all signs match" : ", sign mismatch"));
}

}  // namespace

int main() {
    try {
        std::optional<RealData> real = load_real();
        const char* why = "FAIRSCHED_DATA not set; real inspection dataset unavailable";

        const auto t0 = std::chrono::steady_clock::now();
        check_gradient();
        check_count_preservation();
        check_permutation_oracle();
        check_zafar();
        check_pareto();
        check_zero_sum();
        check_d_zero();
        const SignResult sign = sign_test();
        check_sign_test(sign, "6h", "synthetic, 20 seeds: ");
        const double suite = seconds_since(t0);
        verdict("6", suite < kPropertySuiteSeconds, "property suite runtime " + fmt("%.1f", suite) + " s");

        if (real) {
            real_data_criteria(*real);
        } else {
            report("1", "SKIP", std::string(why) + "; synthetic substitute follows");
            check_sign_test(sign, "1s", "substitute for 1: ");
            report("2", "SKIP", why);
            report("3", "SKIP", why);
            report("4r", "SKIP", std::string(why) + " (real-data half of 4)");
            report("5", "SKIP", why);
        }
        check_in_cluster_synthetic();
        analogue_ordering();
        analogue_coefficients();
    } catch (const std::exception& e) {
        report("--", "FAIL", std::string("aborted: ") + e.what());
    }
    std::printf("%d failing criteria\n", failures);
    return failures == 0 ? 0 : 1;
}
