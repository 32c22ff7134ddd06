#include "fairsched/eval.hpp"

#include "fairsched/text.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

namespace fairsched {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string knob_value(double v) { return format_double(v); }

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
    for (unsigned t = 0; t < n; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

std::string trainer_family(const TrainerSpec& t) {
    return std::visit(Overloaded{[](const BaselineTrainer&) { return std::string("baseline"); },
                                 [](const NoSanitarianTrainer&) { return std::string("no-sanitarian"); },
                                 [](const ZafarTrainer&) { return std::string("zafar"); },
                                 [](const BinaryFairTrainer&) { return std::string("binary-fair"); },
                                 [](const EnsembleTrainer&) { return std::string("proportional-ensemble"); }},
                      t);
}

std::string trainer_knob(const TrainerSpec& t) {
    return std::visit(
        Overloaded{[](const BaselineTrainer&) { return std::string(); },
                   [](const NoSanitarianTrainer&) { return std::string(); },
                   [](const ZafarTrainer& z) { return "c=" + knob_value(z.c); },
                   [](const BinaryFairTrainer& b) {
                       return "C=" + knob_value(b.C) + ";" + std::string(objective_name(b.objective));
                   },
                   [](const EnsembleTrainer& e) { return "rounds=" + std::to_string(e.rounds); }},
        t);
}

std::string trainer_label(const TrainerSpec& t) {
    std::string label = trainer_family(t);
    if (std::holds_alternative<BinaryFairTrainer>(t) || std::holds_alternative<EnsembleTrainer>(t))
        label += " (surrogate)";
    if (auto knob = trainer_knob(t); !knob.empty()) label += " [" + knob + "]";
    return label;
}

void Policy::validate() const {
    if (scheduler == SchedulerKind::SanitarianBlind && std::holds_alternative<NoSanitarianTrainer>(trainer))
        throw UsageError("policy '" + name + "': sanitarian-blind scheduling needs a model with cluster features");
    if (auto* z = std::get_if<ZafarTrainer>(&trainer); z && !(z->c >= 0.0))
        throw UsageError("policy '" + name + "': covariance threshold must be non-negative");
    if (auto* b = std::get_if<BinaryFairTrainer>(&trainer); b && !(b->C >= 0.0))
        throw UsageError("policy '" + name + "': regularisation strength must be non-negative");
    if (auto* e = std::get_if<EnsembleTrainer>(&trainer); e && e->rounds < 1)
        throw UsageError("policy '" + name + "': ensemble needs at least one round");
}

Policy preset_policy(const std::string& name) {
    if (name == "default") return {name, BaselineTrainer{}, SchedulerKind::Default};
    if (name == "schenk") return {name, BaselineTrainer{}, SchedulerKind::GlobalReorder};
    if (name == "no-sanitarian") return {name, NoSanitarianTrainer{}, SchedulerKind::GlobalReorder};
    if (name == "zafar") return {name, ZafarTrainer{}, SchedulerKind::GlobalReorder};
    if (name == "binary-fair") return {name, BinaryFairTrainer{}, SchedulerKind::GlobalReorder};
    if (name == "proportional") return {name, EnsembleTrainer{}, SchedulerKind::GlobalReorder};
    if (name == "sanitarian-blind") return {name, BaselineTrainer{}, SchedulerKind::SanitarianBlind};
    if (name == "in-cluster") return {name, BaselineTrainer{}, SchedulerKind::InCluster};
    throw UsageError("unknown policy '" + name + "'");
}

std::vector<std::string> preset_policy_names() {
    return {"default", "schenk", "no-sanitarian", "zafar", "binary-fair", "proportional", "sanitarian-blind",
            "in-cluster"};
}

ScoreTable score_rows(const Scorer& scorer, const std::vector<FeatureRow>& rows, bool blind_clusters) {
    ScoreTable table;
    table.reserve(rows.size());
    for (FeatureRow r : rows) {
        if (blind_clusters)
            for (std::size_t f = 0; f < kClusterFeatureCount; ++f) r.values[f] = 0.0;
        const double s = std::visit(Overloaded{[&](const TrainedModel& m) { return predict_score(m, r).score; },
                                               [&](const EnsembleModel& e) { return ensemble_score(e, r).score; }},
                                    scorer);
        table[r.inspection_id] = s;
    }
    return table;
}

EvalContext EvalContext::build(const Dataset& dataset, int window_days, const RegionTable* regions,
                               const DemographicTable* demographics) {
    EvalContext ctx;
    ctx.dataset = &dataset;
    ctx.window_days = window_days;
    ctx.windows = split_windows(dataset.records, window_days);
    ctx.demographics = demographics;
    if (regions)
        for (const auto& r : dataset.records)
            if (auto region = regions->find(r.zip)) ctx.labels.region_by_id.emplace(r.inspection_id, *region);
    return ctx;
}

std::vector<const EvaluationWindow*> EvalContext::complete_windows() const {
    std::vector<const EvaluationWindow*> out;
    for (const auto& w : windows)
        if (w.complete) out.push_back(&w);
    return out;
}

Scorer train_for_window(const TrainerSpec& trainer, const EvalContext& ctx, const EvaluationWindow& window) {
    const Dataset& ds = *ctx.dataset;
    if (!ds.has_features()) throw UsageError("dataset has no feature columns");
    const auto& rows = window.train_rows;
    std::vector<Cluster> clusters;
    Vector y(static_cast<Eigen::Index>(rows.size()));
    clusters.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        clusters.push_back(ds.records[rows[i]].cluster);
        y(static_cast<Eigen::Index>(i)) = ds.records[rows[i]].critical_found ? 1.0 : 0.0;
    }
    const auto names = std::holds_alternative<NoSanitarianTrainer>(trainer) ? non_cluster_feature_names()
                                                                              : all_feature_names();
    const Matrix X = design_matrix(ds.features, rows, names);
    const TrainConfig& cfg = ctx.train_config;
    return std::visit(
        Overloaded{
            [&](const BaselineTrainer&) -> Scorer { return fit_logistic(X, y, names, cfg).model; },
            [&](const NoSanitarianTrainer&) -> Scorer { return fit_logistic(X, y, names, cfg).model; },
            [&](const ZafarTrainer& z) -> Scorer {
                return train_zafar(X, y, names, ProtectedSpec::polyvalent(clusters), z.c, cfg).fit.model;
            },
            [&](const BinaryFairTrainer& b) -> Scorer {
                return train_binary_fair(X, y, names, ProtectedSpec::binary(clusters), b.objective, b.C, cfg)
                    .fit.model;
            },
            [&](const EnsembleTrainer& e) -> Scorer {
                std::vector<int> groups;
                groups.reserve(clusters.size());
                for (Cluster c : clusters) groups.push_back(static_cast<int>(index_of(c)));
                EnsembleConfig ec = ctx.ensemble_config;
                ec.rounds = e.rounds;
                return train_proportional_ensemble(X, y, names, groups, static_cast<int>(kClusterCount), ec, cfg)
                    .ensemble;
            }},
        trainer);
}

class ModelCache {
public:
    std::shared_ptr<const Scorer> get(const TrainerSpec& trainer, const EvalContext& ctx,
                                      const EvaluationWindow& window) {
        const auto key = std::make_pair(trainer_label(trainer), window.index);
        {
            std::lock_guard lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        }
        auto scorer = std::make_shared<const Scorer>(train_for_window(trainer, ctx, window));
        std::lock_guard lock(mutex_);
        return entries_.emplace(key, std::move(scorer)).first->second;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::string, int>, std::shared_ptr<const Scorer>> entries_;
};

std::vector<const FoldResult*> PolicyRun::succeeded() const {
    std::vector<const FoldResult*> out;
    for (const auto& f : folds)
        if (!f.failed) out.push_back(&f);
    return out;
}

namespace {

FoldResult evaluate_fold(const Policy& policy, const EvalContext& ctx, const EvaluationWindow& window,
                         ModelCache& cache) {
    FoldResult fold;
    fold.window_index = window.index;
    try {
        // Every policy skips the same folds, even those that never train.
        if (window.train_rows.empty()) throw DataError("no training rows before the window");
        const auto inspections = window_inspections(*ctx.dataset, window);
        Schedule schedule;
        if (policy.scheduler == SchedulerKind::Default) {
            schedule = default_schedule(window.start, inspections);
        } else {
            const auto scorer = cache.get(policy.trainer, ctx, window);
            std::vector<FeatureRow> rows;
            rows.reserve(window.test_rows.size());
            for (auto r : window.test_rows) rows.push_back(ctx.dataset->features[r]);
            const bool blind = policy.scheduler == SchedulerKind::SanitarianBlind;
            const auto scores = score_rows(*scorer, rows, blind);
            schedule = policy.scheduler == SchedulerKind::InCluster ? in_cluster_reorder(scores, window.start, inspections)
                                                                    : global_reorder(scores, window.start, inspections);
        }
        const auto outcomes = detection_times(schedule, ctx.window_days, &ctx.labels);
        fold.mu = efficiency_mu(outcomes);
        std::vector<Grouping> groupings = {Grouping::Cluster};
        if (!ctx.labels.region_by_id.empty()) groupings.push_back(Grouping::Region);
        for (Grouping g : groupings)
            for (Mode m : {Mode::DP, Mode::EOpp}) {
                auto deltas = group_mean_deltas(outcomes, g, m);
                GroupMetrics gm;
                gm.d = unfairness_d(deltas);
                gm.groups = deltas.deltas.size();
                gm.excluded = deltas.excluded;
                gm.deltas = std::move(deltas.deltas);
                fold.metrics.emplace(MetricKey{g, m}, std::move(gm));
            }
        if (ctx.demographics)
            for (Mode m : {Mode::DP, Mode::EOpp})
                fold.demographic[m] = weighted_demographic_deltas(outcomes, *ctx.demographics, m);
    } catch (const std::exception& e) {
        fold = FoldResult{};
        fold.window_index = window.index;
        fold.failed = true;
        fold.failure = e.what();
    }
    return fold;
}

}  // namespace

PolicyRun run_policy(const Policy& policy, const EvalContext& ctx, ModelCache* cache) {
    policy.validate();
    if (!ctx.dataset) throw UsageError("evaluation context has no dataset");
    const auto windows = ctx.complete_windows();
    if (windows.empty()) throw DataError("no complete evaluation window");
    ModelCache local;
    ModelCache& models = cache ? *cache : local;

    PolicyRun run;
    run.policy = policy;
    run.folds.resize(windows.size());
    parallel_for(windows.size(), ctx.threads,
                 [&](std::size_t i) { run.folds[i] = evaluate_fold(policy, ctx, *windows[i], models); });
    for (const auto& f : run.folds)
        if (f.failed) ++run.failures;
    return run;
}

std::vector<PolicyRun> run_policies(const std::vector<Policy>& policies, const EvalContext& ctx) {
    ModelCache cache;
    std::vector<PolicyRun> runs;
    runs.reserve(policies.size());
    for (const auto& p : policies) runs.push_back(run_policy(p, ctx, &cache));
    return runs;
}

Aggregate aggregate(const std::vector<double>& values) {
    if (values.empty()) throw UsageError("cannot aggregate zero folds");
    Aggregate a;
    a.folds = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    if (values.size() == 1) {
        a.single_fold = true;
        return a;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    a.standard_error = sd / std::sqrt(static_cast<double>(values.size()));
    return a;
}

TradeoffPoint tradeoff_point(const PolicyRun& run, Grouping grouping, Mode mode, bool per_group_average) {
    std::vector<double> xs, ys;
    for (const FoldResult* f : run.succeeded()) {
        auto it = f->metrics.find({grouping, mode});
        if (it == f->metrics.end())
            throw UsageError("policy '" + run.policy.name + "' has no " + std::string(grouping_name(grouping)) +
                             " metrics (region table missing?)");
        const auto& gm = it->second;
        xs.push_back(per_group_average && gm.groups > 0 ? gm.d / static_cast<double>(gm.groups) : gm.d);
        ys.push_back(f->mu);
    }
    if (xs.empty()) throw NumericError("policy '" + run.policy.name + "' has no successful folds");
    const auto ax = aggregate(xs);
    const auto ay = aggregate(ys);
    return {run.policy.name, trainer_knob(run.policy.trainer), ax.mean, ax.standard_error, ay.mean, ay.standard_error};
}

std::vector<TradeoffPoint> tradeoff_points(const std::vector<PolicyRun>& runs, Grouping grouping, Mode mode,
                                           bool per_group_average) {
    std::vector<TradeoffPoint> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(tradeoff_point(r, grouping, mode, per_group_average));
    return out;
}

std::vector<std::size_t> pareto_frontier(const std::vector<TradeoffPoint>& points) {
    // Failed sweep points carry NaN coordinates and never join the frontier.
    std::vector<Point2> p;
    std::vector<std::size_t> original;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (std::isfinite(points[i].x) && std::isfinite(points[i].y)) {
            p.push_back({points[i].x, points[i].y});
            original.push_back(i);
        }
    std::vector<std::size_t> out;
    for (std::size_t k : pareto_frontier(p)) out.push_back(original[k]);
    return out;
}

SweepResult sweep_parameters(const Policy& family, const std::vector<double>& grid, const EvalContext& ctx,
                             Grouping grouping, Mode mode, bool per_group_average) {
    if (grid.empty()) throw UsageError("parameter grid is empty");
    SweepResult result;
    ModelCache cache;
    for (double value : grid) {
        Policy p = family;
        std::visit(Overloaded{[&](ZafarTrainer& z) { z.c = value; },
                              [&](BinaryFairTrainer& b) { b.C = value; },
                              [&](EnsembleTrainer& e) { e.rounds = static_cast<int>(value); },
                              [&](auto&) {
                                  throw UsageError("trainer '" + trainer_family(family.trainer) +
                                                   "' has no sweepable parameter");
                              }},
                   p.trainer);
        result.runs.push_back(run_policy(p, ctx, &cache));
        const auto& run = result.runs.back();
        if (run.succeeded().empty()) {
            TradeoffPoint failed{p.name, trainer_knob(p.trainer), std::nan(""), 0.0, std::nan(""), 0.0};
            result.points.push_back(failed);
        } else {
            result.points.push_back(tradeoff_point(run, grouping, mode, per_group_average));
        }
    }
    return result;
}

void write_results(std::ostream& out, const std::vector<PolicyRun>& runs) {
    write_csv_row(out, {"policy", "trainer", "knob", "scheduler", "fold", "grouping", "mode", "status", "mu", "d",
                        "d_over_n", "groups", "excluded"});
    for (const auto& run : runs) {
        const auto& p = run.policy;
        const std::vector<std::string> prefix = {p.name, trainer_family(p.trainer), trainer_knob(p.trainer),
                                                 std::string(scheduler_name(p.scheduler))};
        for (const auto& f : run.folds) {
            auto row = prefix;
            row.push_back(std::to_string(f.window_index));
            if (f.failed) {
                row.insert(row.end(), {"", "", "failed", "", "", "", "", ""});
                write_csv_row(out, row);
                continue;
            }
            for (const auto& [key, gm] : f.metrics) {
                auto r = row;
                r.insert(r.end(), {std::string(grouping_name(key.first)), std::string(mode_name(key.second)), "ok",
                                   format_double(f.mu), format_double(gm.d),
                                   format_double(gm.groups ? gm.d / static_cast<double>(gm.groups) : 0.0),
                                   std::to_string(gm.groups), std::to_string(gm.excluded)});
                write_csv_row(out, r);
            }
        }
    }
}

void write_report(std::ostream& out, const std::vector<PolicyRun>& runs) {
    write_csv_row(out, {"policy", "grouping", "group", "mode", "delta", "count", "fold_mean", "fold_se", "folds"});
    struct Acc {
        double weighted = 0.0;
        double weight = 0.0;
        std::size_t count = 0;
        std::vector<double> per_fold;
    };
    for (const auto& run : runs) {
        // Keyed by (grouping, mode, group order); group order keeps canonical listing.
        std::map<std::tuple<std::string, Mode, std::size_t>, std::pair<std::string, Acc>> acc;
        for (const FoldResult* f : run.succeeded()) {
            for (const auto& [key, gm] : f->metrics)
                for (const auto& d : gm.deltas) {
                    std::size_t order = 0;
                    if (key.first == Grouping::Cluster)
                        order = index_of(parse_cluster(d.group));
                    else if (auto r = try_parse_region(d.group))
                        order = static_cast<std::size_t>(*r);
                    auto& [name, a] = acc[{std::string(grouping_name(key.first)), key.second, order}];
                    name = d.group;
                    a.weighted += d.delta_days * static_cast<double>(d.count);
                    a.weight += static_cast<double>(d.count);
                    a.count += d.count;
                    a.per_fold.push_back(d.delta_days);
                }
            for (const auto& [mode, deltas] : f->demographic)
                for (std::size_t g = 0; g < deltas.size(); ++g) {
                    std::size_t order = 0;
                    for (std::size_t k = 0; k < kDemographicCount; ++k)
                        if (kDemographicNames[k] == deltas[g].group) order = k;
                    auto& [name, a] = acc[{"demographic", mode, order}];
                    name = deltas[g].group;
                    a.weighted += deltas[g].delta_days * deltas[g].total_weight;
                    a.weight += deltas[g].total_weight;
                    a.count += deltas[g].count;
                    a.per_fold.push_back(deltas[g].delta_days);
                }
        }
        for (const auto& [key, entry] : acc) {
            const auto& [name, a] = entry;
            const auto agg = aggregate(a.per_fold);
            write_csv_row(out, {run.policy.name, std::get<0>(key), name, std::string(mode_name(std::get<1>(key))),
                                format_double(a.weight > 0 ? a.weighted / a.weight : 0.0), std::to_string(a.count),
                                format_double(agg.mean), format_double(agg.standard_error),
                                std::to_string(agg.folds)});
        }
    }
}

void write_tradeoff(std::ostream& out, const std::vector<TradeoffPoint>& points, Grouping grouping, Mode mode) {
    const auto frontier = pareto_frontier(points);
    write_csv_row(out, {"policy", "knob", "grouping", "mode", "x", "x_se", "y", "y_se", "frontier"});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const bool on = std::find(frontier.begin(), frontier.end(), i) != frontier.end();
        write_csv_row(out, {p.policy, p.knob, std::string(grouping_name(grouping)), std::string(mode_name(mode)),
                            format_double(p.x), format_double(p.x_se), format_double(p.y), format_double(p.y_se),
                            on ? "1" : "0"});
    }
}

}  // namespace fairsched
