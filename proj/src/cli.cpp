#include "fairsched/cli.hpp"

#include "fairsched/eval.hpp"
#include "fairsched/svg.hpp"
#include "fairsched/synth.hpp"
#include "fairsched/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fairsched {

namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file '" + path + "'");
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file '" + path.string() + "'");
    return out;
}

fs::path output_path(const RunConfig& run, const std::string& explicit_path, const std::string& default_name) {
    if (!explicit_path.empty()) return explicit_path;
    return fs::path(run.out_dir) / default_name;
}

HistoryConfig history_config(const std::string& unit) {
    HistoryConfig h;
    if (unit == "years") {
        h.days_per_unit = 365.25;
        h.first_visit_days = 730.0;
    } else if (unit != "days") {
        throw UsageError("--time-unit must be 'days' or 'years'");
    }
    return h;
}

Dataset load_dataset(const std::string& path, const Schema& schema = {}, const HistoryConfig& history = {},
                     bool quiet = false) {
    auto in = open_input(path);
    ParseResult parsed = parse_inspections(in, schema);
    if (!quiet) {
        const std::size_t shown = std::min<std::size_t>(parsed.errors.size(), 20);
        for (std::size_t i = 0; i < shown; ++i)
            std::cerr << path << ":" << parsed.errors[i].line << ": " << parsed.errors[i].message << "\n";
        if (parsed.errors.size() > shown)
            std::cerr << path << ": " << parsed.errors.size() - shown << " more rejected rows\n";
    }
    if (parsed.dataset.records.empty()) throw DataError("'" + path + "' contains no valid inspection rows");
    if (!parsed.dataset.has_features()) assemble_features(parsed.dataset, history);
    return std::move(parsed.dataset);
}

Dataset load_training_dataset(const std::string& path) {
    Dataset ds = load_dataset(path);
    if (!ds.has_features()) throw DataError("'" + path + "' has no feature columns; run ingest on a complete source");
    return ds;
}

void write_regions(std::ostream& out, const RegionTable& table) {
    write_csv_row(out, {"zip", "region"});
    for (const auto& [zip, region] : table.entries()) write_csv_row(out, {zip, std::string(region_name(region))});
}

void write_demographics(std::ostream& out, const Dataset& ds, const DemographicTable& table) {
    std::vector<std::string> header = {"inspection_id"};
    for (auto name : kDemographicNames) header.emplace_back(name);
    write_csv_row(out, header);
    for (const auto& r : ds.records)
        if (const Composition* c = table.find(r.inspection_id)) {
            std::vector<std::string> row = {r.inspection_id};
            for (double v : *c) row.push_back(format_double(v));
            write_csv_row(out, row);
        }
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_double(trim(item));
        if (!v) throw UsageError(std::string("bad value '") + item + "' in " + what);
        out.push_back(*v);
    }
    if (out.empty()) throw UsageError(std::string(what) + " is empty");
    return out;
}

// ---- subcommand options ----

struct IngestArgs {
    std::string input, schema, output, time_unit = "days";
};

struct SynthArgs {
    int days = 17 * 60;
    int per_day = 20;
    int establishments = 3000;
    std::string labels = "rates";
    std::string rates;
    double intercept = SynthConfig{}.intercept;
    double proxy_strength = 0.0;
    bool balanced = false;
};

struct TrainArgs {
    std::string trainer, data, output;
    double c = kZafarSelected;
    double C = kBinaryFairSelected;
    std::string objective = "EOpp";
    int rounds = 10;
    int window = -1;
    double l2 = TrainConfig{}.l2_weight;
    bool raw_scale = false;
};

struct ScheduleArgs {
    std::string data, model, scheduler = "global-reorder", output;
    int window = -1;
};

struct EvaluateArgs {
    std::string data, regions, demographics, results, report;
    std::vector<std::string> policies;
    std::vector<std::string> groupings;
    std::optional<double> c, C;
    std::optional<int> rounds;
    unsigned threads = 1;
};

struct TradeoffArgs {
    std::string data, regions, output;
    std::vector<std::string> policies;
    std::vector<std::string> sweeps;
    std::string zafar_grid = "0.001,0.01,0.1";
    std::string binary_grid = "0.5,0.2,0.1,0.05,0.01,0.005";
    std::string ensemble_grid = "1,2,5,10";
    std::string grouping = "cluster", mode = "EOpp";
    bool per_group_average = false;
    unsigned threads = 1;
};

struct PlotArgs {
    std::string input, kind, grouping = "cluster", output;
};

struct PairedArgs {
    std::string data, from, to, output, rates_output;
};

// ---- commands ----

int cmd_ingest(const RunConfig& run, const IngestArgs& a) {
    Schema schema;
    if (!a.schema.empty()) {
        auto in = open_input(a.schema);
        schema = Schema::load(in);
    }
    Dataset ds = load_dataset(a.input, schema, history_config(a.time_unit));
    const auto path = output_path(run, a.output, "dataset.csv");
    auto out = open_output(path);
    write_canonical(out, ds);
    std::cout << "wrote " << ds.records.size() << " rows to " << path.string()
              << (ds.has_features() ? "" : " (no feature columns)") << "\n";
    return kExitOk;
}

int cmd_synth(const RunConfig& run, const SynthArgs& a) {
    SynthConfig cfg;
    cfg.seed = run.seed;
    cfg.days = a.days;
    cfg.per_day = a.per_day;
    cfg.establishments = a.establishments;
    cfg.intercept = a.intercept;
    cfg.proxy_strength = a.proxy_strength;
    cfg.balanced_clusters = a.balanced;
    if (a.labels == "rates")
        cfg.labels = LabelModel::ClusterRates;
    else if (a.labels == "logistic")
        cfg.labels = LabelModel::Logistic;
    else
        throw UsageError("--labels must be 'rates' or 'logistic'");
    if (!a.rates.empty()) {
        auto rates = parse_list(a.rates, "--rates");
        if (rates.size() != kClusterCount) throw UsageError("--rates needs six values, Purple to Brown");
        for (std::size_t i = 0; i < kClusterCount; ++i) {
            if (!(rates[i] >= 0.0 && rates[i] <= 1.0)) throw UsageError("--rates values must lie in [0, 1]");
            cfg.cluster_rates[i] = rates[i];
        }
    }
    const SynthData data = generate_synthetic(cfg);
    const fs::path dir(run.out_dir);
    {
        auto out = open_output(dir / "dataset.csv");
        write_canonical(out, data.dataset);
    }
    {
        auto out = open_output(dir / "regions.csv");
        write_regions(out, data.regions);
    }
    {
        auto out = open_output(dir / "demographics.csv");
        write_demographics(out, data.dataset, data.demographics);
    }
    std::cout << "wrote " << data.dataset.records.size() << " synthetic inspections to " << dir.string() << "\n";
    return kExitOk;
}

TrainerSpec trainer_from_args(const TrainArgs& a) {
    if (a.trainer == "baseline") return BaselineTrainer{};
    if (a.trainer == "no-sanitarian") return NoSanitarianTrainer{};
    if (a.trainer == "zafar") return ZafarTrainer{a.c};
    if (a.trainer == "binary-fair") return BinaryFairTrainer{a.C, parse_objective(a.objective)};
    if (a.trainer == "proportional" || a.trainer == "proportional-ensemble") return EnsembleTrainer{a.rounds};
    throw UsageError("unknown trainer '" + a.trainer +
                     "' (expected baseline, no-sanitarian, zafar, binary-fair or proportional)");
}

int cmd_train(const RunConfig& run, const TrainArgs& a) {
    const TrainerSpec spec = trainer_from_args(a);
    Policy{a.trainer, spec, SchedulerKind::GlobalReorder}.validate();
    Dataset ds = load_training_dataset(a.data);
    EvalContext ctx = EvalContext::build(ds, run.window_days);
    ctx.train_config.seed = run.seed;
    ctx.train_config.l2_weight = a.l2;
    ctx.train_config.standardize = !a.raw_scale;

    EvaluationWindow window;
    if (a.window >= 0) {
        if (static_cast<std::size_t>(a.window) >= ctx.windows.size())
            throw UsageError("--window " + std::to_string(a.window) + " out of range (" +
                             std::to_string(ctx.windows.size()) + " windows)");
        window = ctx.windows[static_cast<std::size_t>(a.window)];
    } else {
        window.index = -1;
        for (std::size_t i = 0; i < ds.records.size(); ++i) window.train_rows.push_back(i);
    }
    if (window.train_rows.empty()) throw DataError("no training rows before the selected window");

    const auto path = output_path(run, a.output, "model.txt");
    if (auto* z = std::get_if<ZafarTrainer>(&spec)) {
        // Trained directly so the covariance report can be written alongside.
        const auto names = all_feature_names();
        std::vector<Cluster> clusters;
        std::vector<bool> labels;
        for (std::size_t r : window.train_rows) {
            clusters.push_back(ds.records[r].cluster);
            labels.push_back(ds.records[r].critical_found);
        }
        const Matrix X = design_matrix(ds.features, window.train_rows, names);
        ZafarResult res = train_zafar(X, label_vector(labels), names, ProtectedSpec::polyvalent(clusters), z->c,
                                      ctx.train_config);
        {
            auto out = open_output(path);
            write_model(out, res.fit.model);
        }
        auto cov_path = path;
        cov_path.replace_filename(path.stem().string() + "_covariance.csv");
        auto out = open_output(cov_path);
        write_csv_row(out, {"cluster", "covariance", "threshold", "satisfied"});
        for (const auto& e : res.covariances.entries)
            write_csv_row(out, {std::string(cluster_name(kAllClusters[static_cast<std::size_t>(e.value)])),
                                format_double(e.covariance), format_double(z->c),
                                std::abs(e.covariance) <= z->c + 1e-4 ? "1" : "0"});
        for (const auto& w : res.covariances.warnings) std::cerr << "warning: " << w << "\n";
        if (!res.satisfied)
            std::cerr << "warning: covariance constraint violated by " << format_double(res.max_violation) << "\n";
        std::cout << "wrote " << path.string() << " and " << cov_path.string() << "\n";
        return kExitOk;
    }

    const Scorer scorer = train_for_window(spec, ctx, window);
    auto out = open_output(path);
    if (auto* m = std::get_if<TrainedModel>(&scorer))
        write_model(out, *m);
    else
        write_ensemble(out, std::get<EnsembleModel>(scorer));
    std::cout << "wrote " << trainer_label(spec) << " model to " << path.string() << "\n";
    return kExitOk;
}

Scorer read_scorer(const std::string& path) {
    auto in = open_input(path);
    std::string first;
    std::getline(in, first);
    in.clear();
    in.seekg(0);
    if (first.rfind("members", 0) == 0) return read_ensemble(in);
    return read_model(in);
}

int cmd_schedule(const RunConfig& run, const ScheduleArgs& a) {
    const SchedulerKind kind = parse_scheduler(a.scheduler);
    Dataset ds = load_dataset(a.data);
    EvalContext ctx = EvalContext::build(ds, run.window_days);
    const EvaluationWindow* window = nullptr;
    if (a.window >= 0) {
        if (static_cast<std::size_t>(a.window) >= ctx.windows.size())
            throw UsageError("--window " + std::to_string(a.window) + " out of range");
        window = &ctx.windows[static_cast<std::size_t>(a.window)];
    } else {
        auto complete = ctx.complete_windows();
        if (complete.empty()) throw DataError("dataset has no complete evaluation window");
        window = complete.back();
    }
    const auto inspections = window_inspections(ds, *window);

    Schedule schedule;
    if (kind == SchedulerKind::Default && a.model.empty()) {
        schedule = default_schedule(window->start, inspections);
    } else {
        if (a.model.empty()) throw UsageError("--model is required for scheduler '" + a.scheduler + "'");
        if (!ds.has_features()) throw DataError("'" + a.data + "' has no feature columns to score");
        const Scorer scorer = read_scorer(a.model);
        if (kind == SchedulerKind::SanitarianBlind) {
            auto* m = std::get_if<TrainedModel>(&scorer);
            if (m && !m->has_cluster_features())
                throw UsageError("sanitarian-blind scheduling needs a model with cluster features");
        }
        std::vector<FeatureRow> rows;
        for (std::size_t r : window->test_rows) rows.push_back(ds.features[r]);
        const ScoreTable scores = score_rows(scorer, rows, kind == SchedulerKind::SanitarianBlind);
        switch (kind) {
            case SchedulerKind::Default: schedule = default_schedule(window->start, inspections, &scores); break;
            case SchedulerKind::GlobalReorder:
            case SchedulerKind::SanitarianBlind:
                schedule = global_reorder(scores, window->start, inspections);
                break;
            case SchedulerKind::InCluster: schedule = in_cluster_reorder(scores, window->start, inspections); break;
        }
    }
    const auto path = output_path(run, a.output, "schedule_w" + std::to_string(window->index) + ".csv");
    auto out = open_output(path);
    write_schedule(out, schedule);
    const auto outcomes = detection_times(schedule, run.window_days);
    std::cout << "window " << window->index << " (" << format_date(window->start) << "): "
              << schedule.entries.size() << " inspections, mu=" << format_double(efficiency_mu(outcomes))
              << " d_cluster_EOpp=" << format_double(unfairness_d(outcomes, Grouping::Cluster, Mode::EOpp))
              << "\nwrote " << path.string() << "\n";
    return kExitOk;
}

void apply_knobs(Policy& p, const std::optional<double>& c, const std::optional<double>& C,
                 const std::optional<int>& rounds) {
    if (auto* z = std::get_if<ZafarTrainer>(&p.trainer); z && c) z->c = *c;
    if (auto* b = std::get_if<BinaryFairTrainer>(&p.trainer); b && C) b->C = *C;
    if (auto* e = std::get_if<EnsembleTrainer>(&p.trainer); e && rounds) e->rounds = *rounds;
}

struct LoadedTables {
    std::optional<RegionTable> regions;
    std::optional<DemographicTable> demographics;
};

LoadedTables load_tables(const std::string& regions, const std::string& demographics) {
    LoadedTables t;
    if (!regions.empty()) {
        auto in = open_input(regions);
        t.regions = RegionTable::load(in);
    }
    if (!demographics.empty()) {
        auto in = open_input(demographics);
        t.demographics = DemographicTable::load(in);
    }
    return t;
}

int cmd_evaluate(const RunConfig& run, const EvaluateArgs& a) {
    if (a.policies.empty()) throw UsageError("at least one --policy is required");
    std::vector<Policy> policies;
    for (const auto& name : a.policies) {
        Policy p = preset_policy(name);
        apply_knobs(p, a.c, a.C, a.rounds);
        p.validate();
        policies.push_back(p);
    }
    bool want_region = false;
    for (const auto& g : a.groupings) want_region = want_region || parse_grouping(g) == Grouping::Region;
    if (want_region && a.regions.empty()) throw UsageError("--grouping region needs --regions");

    Dataset ds = load_training_dataset(a.data);
    const LoadedTables tables = load_tables(a.regions, a.demographics);
    EvalContext ctx = EvalContext::build(ds, run.window_days, tables.regions ? &*tables.regions : nullptr,
                                         tables.demographics ? &*tables.demographics : nullptr);
    ctx.train_config.seed = run.seed;
    ctx.threads = std::max(1u, a.threads);
    if (ctx.complete_windows().empty()) throw DataError("dataset has no complete evaluation window");

    const auto runs = run_policies(policies, ctx);
    const auto results_path = output_path(run, a.results, "results.csv");
    const auto report_path = output_path(run, a.report, "report.csv");
    {
        auto out = open_output(results_path);
        write_results(out, runs);
    }
    {
        auto out = open_output(report_path);
        write_report(out, runs);
    }

    std::vector<Grouping> groupings;
    for (const auto& g : a.groupings) groupings.push_back(parse_grouping(g));
    if (groupings.empty()) groupings.push_back(Grouping::Cluster);
    for (const auto& r : runs) {
        const auto ok = r.succeeded();
        std::cout << r.policy.name << " [" << trainer_label(r.policy.trainer) << ", "
                  << scheduler_name(r.policy.scheduler) << "]: " << ok.size() << " folds";
        if (r.failures) std::cout << ", " << r.failures << " failed";
        if (ok.empty()) {
            std::cout << "\n";
            continue;
        }
        for (Grouping g : groupings)
            for (Mode m : {Mode::DP, Mode::EOpp}) {
                const auto t = tradeoff_point(r, g, m);
                std::cout << "  " << grouping_name(g) << "/" << mode_name(m) << " d=" << format_double(t.x)
                          << "±" << format_double(t.x_se);
            }
        const auto t = tradeoff_point(r, Grouping::Cluster, Mode::EOpp);
        std::cout << "  mu=" << format_double(t.y) << "±" << format_double(t.y_se) << "\n";
    }
    for (const auto& r : runs)
        for (const auto& f : r.folds)
            if (f.failed) std::cerr << r.policy.name << " fold " << f.window_index << " failed: " << f.failure << "\n";
    std::cout << "wrote " << results_path.string() << " and " << report_path.string() << "\n";
    bool any_ok = false;
    for (const auto& r : runs) any_ok = any_ok || !r.succeeded().empty();
    if (!any_ok) throw NumericError("every fold of every policy failed");
    return kExitOk;
}

int cmd_tradeoff(const RunConfig& run, const TradeoffArgs& a) {
    if (a.policies.empty() && a.sweeps.empty()) throw UsageError("give at least one --policy or --sweep");
    const Grouping grouping = parse_grouping(a.grouping);
    const Mode mode = parse_mode(a.mode);
    if (grouping == Grouping::Region && a.regions.empty()) throw UsageError("--grouping region needs --regions");
    std::vector<Policy> policies;
    for (const auto& name : a.policies) {
        policies.push_back(preset_policy(name));
        policies.back().validate();
    }
    std::vector<std::pair<Policy, std::vector<double>>> sweeps;
    for (const auto& name : a.sweeps) {
        Policy p = preset_policy(name);
        if (std::holds_alternative<ZafarTrainer>(p.trainer))
            sweeps.emplace_back(p, parse_list(a.zafar_grid, "--zafar-grid"));
        else if (std::holds_alternative<BinaryFairTrainer>(p.trainer))
            sweeps.emplace_back(p, parse_list(a.binary_grid, "--binary-grid"));
        else if (std::holds_alternative<EnsembleTrainer>(p.trainer))
            sweeps.emplace_back(p, parse_list(a.ensemble_grid, "--ensemble-grid"));
        else
            throw UsageError("policy '" + name + "' has no parameter to sweep");
    }

    Dataset ds = load_training_dataset(a.data);
    const LoadedTables tables = load_tables(a.regions, "");
    EvalContext ctx = EvalContext::build(ds, run.window_days, tables.regions ? &*tables.regions : nullptr);
    ctx.train_config.seed = run.seed;
    ctx.threads = std::max(1u, a.threads);
    if (ctx.complete_windows().empty()) throw DataError("dataset has no complete evaluation window");

    std::vector<TradeoffPoint> points;
    if (!policies.empty()) {
        const auto runs = run_policies(policies, ctx);
        for (const auto& r : runs) {
            if (r.succeeded().empty()) {
                std::cerr << "policy " << r.policy.name << ": every fold failed\n";
                continue;
            }
            points.push_back(tradeoff_point(r, grouping, mode, a.per_group_average));
        }
    }
    for (const auto& [family, grid] : sweeps) {
        const auto s = sweep_parameters(family, grid, ctx, grouping, mode, a.per_group_average);
        points.insert(points.end(), s.points.begin(), s.points.end());
    }
    const auto path = output_path(run, a.output, "tradeoff.csv");
    auto out = open_output(path);
    write_tradeoff(out, points, grouping, mode);
    const auto frontier = pareto_frontier(points);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const bool on = std::find(frontier.begin(), frontier.end(), i) != frontier.end();
        std::cout << (on ? "* " : "  ") << points[i].policy << " " << points[i].knob << " d=" << format_double(points[i].x)
                  << " mu=" << format_double(points[i].y) << "\n";
    }
    std::cout << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_plot(const RunConfig& run, const PlotArgs& a) {
    const PlotKind kind = parse_plot_kind(a.kind);
    auto in = open_input(a.input);
    const Table table = read_table(in);
    if (table.header.empty()) throw DataError("'" + a.input + "' is empty");
    const std::string svg = render_plot(kind, table, a.grouping);
    const auto path = output_path(run, a.output, a.kind + ".svg");
    auto out = open_output(path);
    out << svg;
    std::cout << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_paired(const RunConfig& run, const PairedArgs& a) {
    Dataset ds = load_dataset(a.data);
    std::vector<InspectionRecord> records;
    const std::optional<Date> from = a.from.empty() ? std::nullopt : std::optional<Date>(parse_date(a.from));
    const std::optional<Date> to = a.to.empty() ? std::nullopt : std::optional<Date>(parse_date(a.to));
    for (const auto& r : ds.records)
        if ((!from || r.date >= *from) && (!to || r.date <= *to)) records.push_back(r);
    if (records.empty()) throw DataError("no inspections in the selected date range");

    const PairedMatrix m = paired_matrix(records);
    const auto path = output_path(run, a.output, "paired.csv");
    {
        auto out = open_output(path);
        write_csv_row(out, {"earlier", "later", "value", "count"});
        for (Cluster e : kAllClusters)
            for (Cluster l : kAllClusters) {
                const auto i = index_of(e), j = index_of(l);
                write_csv_row(out, {std::string(cluster_name(e)), std::string(cluster_name(l)),
                                    m.value[i][j] ? format_double(*m.value[i][j]) : "",
                                    std::to_string(m.count[i][j])});
            }
    }
    const auto rates_path = output_path(run, a.rates_output, "rates.csv");
    auto out = open_output(rates_path);
    write_csv_row(out, {"subset", "cluster", "critical", "total", "rate"});
    auto emit = [&](const char* subset, const std::vector<InspectionRecord>& recs) {
        for (const auto& r : violation_rate_by_cluster(recs)) {
            write_csv_row(out, {subset, std::string(cluster_name(r.cluster)), std::to_string(r.critical),
                                std::to_string(r.total), format_double(r.rate)});
            std::cout << subset << " " << cluster_name(r.cluster) << " " << format_double(100.0 * r.rate) << "% ("
                      << r.critical << "/" << r.total << ")\n";
        }
    };
    emit("all", records);
    emit("multi-cluster", multi_cluster_subset(records));
    std::cout << "wrote " << path.string() << " and " << rates_path.string() << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Inspection scheduling with fairness diagnostics", "fairsched"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig run;
    app.add_option("--seed", run.seed, "Random seed")->capture_default_str();
    app.add_option("--out-dir", run.out_dir, "Directory for output files")->capture_default_str();
    app.add_option("--window-days", run.window_days, "Evaluation window length in days")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Validate a source file and write the canonical dataset");
    c_ingest->add_option("--input,input", ingest.input, "Inspection file")->required();
    c_ingest->add_option("--schema", ingest.schema, "Field-to-column mapping file");
    c_ingest->add_option("--time-unit", ingest.time_unit, "Unit of derived timeSinceLast: days or years")
        ->capture_default_str();
    c_ingest->add_option("-o,--output", ingest.output, "Output path (default <out-dir>/dataset.csv)");

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset with region and demographic tables");
    c_synth->add_option("--days", synth.days)->capture_default_str()->check(CLI::PositiveNumber);
    c_synth->add_option("--per-day", synth.per_day)->capture_default_str()->check(CLI::PositiveNumber);
    c_synth->add_option("--establishments", synth.establishments)->capture_default_str()->check(CLI::PositiveNumber);
    c_synth->add_option("--labels", synth.labels, "rates or logistic")->capture_default_str();
    c_synth->add_option("--rates", synth.rates, "Six comma-separated cluster rates, Purple to Brown");
    c_synth->add_option("--intercept", synth.intercept, "Intercept for logistic labels")->capture_default_str();
    c_synth->add_option("--proxy-strength", synth.proxy_strength, "Shift of heat_burglary for Purple inspections")
        ->capture_default_str();
    c_synth->add_flag("--balanced", synth.balanced, "Draw clusters uniformly");

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Fit a risk model");
    c_train->add_option("trainer", train.trainer, "baseline, no-sanitarian, zafar, binary-fair or proportional")
        ->required();
    c_train->add_option("--data", train.data, "Canonical dataset")->required();
    c_train->add_option("--c", train.c, "Covariance threshold (zafar)")->capture_default_str();
    c_train->add_option("--C", train.C, "Fairness strength (binary-fair)")->capture_default_str();
    c_train->add_option("--objective", train.objective, "DP or EOpp (binary-fair)")->capture_default_str();
    c_train->add_option("--rounds", train.rounds, "Ensemble rounds (proportional)")->capture_default_str();
    c_train->add_option("--window", train.window, "Train on rows before this window (default: all rows)");
    c_train->add_option("--l2", train.l2, "L2 penalty weight")->capture_default_str();
    c_train->add_flag("--raw-scale", train.raw_scale, "Optimise in the original feature coordinates");
    c_train->add_option("-o,--output", train.output, "Model path (default <out-dir>/model.txt)");

    ScheduleArgs schedule;
    auto* c_schedule = app.add_subcommand("schedule", "Schedule one evaluation window");
    c_schedule->add_option("--data", schedule.data, "Canonical dataset")->required();
    c_schedule->add_option("--model", schedule.model, "Model or ensemble file");
    c_schedule->add_option("--scheduler", schedule.scheduler,
                           "default, global-reorder, sanitarian-blind or in-cluster")
        ->capture_default_str();
    c_schedule->add_option("--window", schedule.window, "Window index (default: last complete window)");
    c_schedule->add_option("-o,--output", schedule.output, "Schedule path");

    EvaluateArgs evaluate;
    auto* c_evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation of policies");
    c_evaluate->add_option("--data", evaluate.data, "Canonical dataset")->required();
    c_evaluate->add_option("--policy", evaluate.policies, "Policy preset (repeatable)");
    c_evaluate->add_option("--grouping", evaluate.groupings, "cluster or region (repeatable, for the summary)");
    c_evaluate->add_option("--regions", evaluate.regions, "Zip-to-region table");
    c_evaluate->add_option("--demographics", evaluate.demographics, "Per-inspection demographic table");
    c_evaluate->add_option("--c", evaluate.c, "Override the zafar threshold");
    c_evaluate->add_option("--C", evaluate.C, "Override the binary-fair strength");
    c_evaluate->add_option("--rounds", evaluate.rounds, "Override the ensemble rounds");
    c_evaluate->add_option("--threads", evaluate.threads, "Worker threads")->capture_default_str();
    c_evaluate->add_option("--results", evaluate.results, "Results path (default <out-dir>/results.csv)");
    c_evaluate->add_option("--report", evaluate.report, "Report path (default <out-dir>/report.csv)");

    TradeoffArgs tradeoff;
    auto* c_tradeoff = app.add_subcommand("tradeoff", "Efficiency/fairness trade-off and Pareto frontier");
    c_tradeoff->add_option("--data", tradeoff.data, "Canonical dataset")->required();
    c_tradeoff->add_option("--policy", tradeoff.policies, "Policy preset evaluated at its default knob");
    c_tradeoff->add_option("--sweep", tradeoff.sweeps, "zafar, binary-fair or proportional, swept over its grid");
    c_tradeoff->add_option("--zafar-grid", tradeoff.zafar_grid)->capture_default_str();
    c_tradeoff->add_option("--binary-grid", tradeoff.binary_grid)->capture_default_str();
    c_tradeoff->add_option("--ensemble-grid", tradeoff.ensemble_grid)->capture_default_str();
    c_tradeoff->add_option("--grouping", tradeoff.grouping)->capture_default_str();
    c_tradeoff->add_option("--mode", tradeoff.mode)->capture_default_str();
    c_tradeoff->add_option("--regions", tradeoff.regions, "Zip-to-region table");
    c_tradeoff->add_flag("--per-group-average", tradeoff.per_group_average, "Use d/n on the x axis");
    c_tradeoff->add_option("--threads", tradeoff.threads)->capture_default_str();
    c_tradeoff->add_option("-o,--output", tradeoff.output, "Output path (default <out-dir>/tradeoff.csv)");

    PlotArgs plot;
    auto* c_plot = app.add_subcommand("plot", "Render an SVG figure from an output file");
    c_plot->add_option("--input,input", plot.input, "Report, trade-off, paired or dataset file")->required();
    c_plot->add_option("--kind", plot.kind, "group-bars, tradeoff, paired-heatmap or scatter-coords")->required();
    c_plot->add_option("--grouping", plot.grouping, "Grouping for group-bars")->capture_default_str();
    c_plot->add_option("-o,--output", plot.output, "SVG path (default <out-dir>/<kind>.svg)");

    PairedArgs paired;
    auto* c_paired = app.add_subcommand("paired", "Violation rates and the paired-inspection matrix");
    c_paired->add_option("--data", paired.data, "Canonical dataset")->required();
    c_paired->add_option("--from", paired.from, "First date included");
    c_paired->add_option("--to", paired.to, "Last date included");
    c_paired->add_option("-o,--output", paired.output, "Matrix path (default <out-dir>/paired.csv)");
    c_paired->add_option("--rates-output", paired.rates_output, "Rates path (default <out-dir>/rates.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*c_ingest) return cmd_ingest(run, ingest);
        if (*c_synth) return cmd_synth(run, synth);
        if (*c_train) return cmd_train(run, train);
        if (*c_schedule) return cmd_schedule(run, schedule);
        if (*c_evaluate) return cmd_evaluate(run, evaluate);
        if (*c_tradeoff) return cmd_tradeoff(run, tradeoff);
        if (*c_plot) return cmd_plot(run, plot);
        if (*c_paired) return cmd_paired(run, paired);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace fairsched
