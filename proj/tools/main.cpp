// cfbounds: counterfactual-probability bounds, point estimates, simulation
// benchmarks, and campaign profit reports.
//
// Exit codes: 0 success, 1 usage error, 2 data validation error, 3 runtime
// failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <thread>

#include "cfb/estimation.hpp"
#include "cfb/ingest.hpp"
#include "cfb/profit.hpp"
#include "cfb/report.hpp"
#include "cfb/rng.hpp"
#include "cfb/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;  // 0 = hardware concurrency
};

void resolve_seed(CommonOpts& opts) {
    if (!opts.seed_given) {
        opts.seed = std::random_device{}();
    }
}

int resolve_threads(const CommonOpts& opts) {
    if (opts.threads > 0) return opts.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string ensure_out_dir(const CommonOpts& opts) {
    fs::create_directories(opts.out_dir);
    return opts.out_dir;
}

json meta_block(const CommonOpts& opts, const json& resolved_config) {
    return {{"tool_version", cfb::kToolVersion},
            {"seed", opts.seed},
            {"config", resolved_config}};
}

std::string csv_prologue(const CommonOpts& opts, const json& resolved_config) {
    return std::string("cfbounds ") + cfb::kToolVersion + " seed=" +
           std::to_string(opts.seed) + " config=" + resolved_config.dump();
}

// Pre-scan for --config and load JSON defaults into an app's option values.
// Flags given on the command line override config values because CLI11
// processes them after the defaults are injected.
json load_config_file(int argc, char** argv) {
    for (int i = 1; i < argc - 1; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) throw std::runtime_error(std::string("cannot open config '") +
                                              argv[i + 1] + "'");
            json config;
            in >> config;
            return config;
        }
    }
    return json::object();
}

template <typename T>
void from_config(const json& config, const char* key, T& value) {
    if (config.contains(key)) value = config.at(key).get<T>();
}

void add_common(CLI::App* cmd, CommonOpts& opts, const json& config) {
    from_config(config, "out", opts.out_dir);
    from_config(config, "threads", opts.threads);
    if (config.contains("seed")) {
        opts.seed = config.at("seed").get<std::uint64_t>();
        opts.seed_given = true;
    }
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Master seed (auto-generated if absent)")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--threads", opts.threads, "Parallelism degree (0 = auto)");
    cmd->add_option("--config", "JSON config file mirroring the flags")
        ->expected(1);
}

// ---- simulate ----------------------------------------------------------

int cmd_simulate(const CommonOpts& opts, const cfb::BenchmarkProtocol& protocol) {
    const std::string dir = ensure_out_dir(opts);
    const json config = {{"subcommand", "simulate"},
                         {"runs", protocol.runs},
                         {"n_range", {protocol.n_min, protocol.n_max}},
                         {"v_range", {protocol.v_min, protocol.v_max}},
                         {"A_range", {protocol.a_min, protocol.a_max}},
                         {"seed", protocol.seed}};
    const cfb::BenchmarkReport report = cfb::run_benchmark(protocol);

    const std::string prologue = csv_prologue(opts, config);
    cfb::write_benchmark_runs_csv(dir + "/benchmark_runs.csv", report, prologue);
    cfb::write_strata_csv(dir + "/fig1_strata.csv", report, prologue);
    cfb::write_phi_hist_csv(dir + "/fig2_phi_hist.csv", report, 40, prologue);

    json summary = cfb::benchmark_summary_to_json(report);
    summary["meta"] = meta_block(opts, config);
    cfb::write_json(dir + "/summary.json", summary);

    std::cout << "benchmark: " << report.runs.size() << " runs, mean uplift width "
              << report.mean_uplift_width << ", mean Frechet width "
              << report.mean_frechet_width << '\n';
    return 0;
}

// ---- sweep -------------------------------------------------------------

struct SweepOpts {
    std::string axis = "A";
    std::vector<double> grid;
    std::size_t replicates = 30;
    std::size_t n = 2000;
    int v = 50;
    double concentration = 1.0;
    // Fixed simplex point from the sensitivity study, normalized.
    std::array<double, 4> simplex = {0.947 / 1.001, 0.020 / 1.001, 0.017 / 1.001,
                                     0.017 / 1.001};
};

std::vector<double> default_grid(const std::string& axis) {
    auto logspace = [](double lo, double hi, int k) {
        std::vector<double> g(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            g[static_cast<std::size_t>(i)] =
                std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (k - 1));
        }
        return g;
    };
    if (axis == "A") return logspace(0.02, 15.0, 16);
    if (axis == "N") {
        std::vector<double> g = logspace(10, 10000, 13);
        for (double& x : g) x = std::round(x);
        return g;
    }
    // v grid: integers, low v = high model variance
    return {2, 3, 5, 8, 12, 20, 35, 60, 100, 200};
}

int cmd_sweep(const CommonOpts& opts, const SweepOpts& sweep) {
    cfb::SweepAxis axis;
    if (sweep.axis == "A") {
        axis = cfb::SweepAxis::A;
    } else if (sweep.axis == "N") {
        axis = cfb::SweepAxis::N;
    } else if (sweep.axis == "v") {
        axis = cfb::SweepAxis::V;
    } else {
        throw CLI::ValidationError("--axis", "axis must be one of A, N, v");
    }
    const std::vector<double> grid = sweep.grid.empty() ? default_grid(sweep.axis) : sweep.grid;

    cfb::SimulationParams fixed;
    fixed.n = sweep.n;
    fixed.v = sweep.v;
    for (int i = 0; i < 4; ++i) fixed.dirichlet[i] = sweep.concentration * sweep.simplex[i];
    fixed.seed = opts.seed;

    const std::string dir = ensure_out_dir(opts);
    const json config = {{"subcommand", "sweep"},   {"axis", sweep.axis},
                         {"grid", grid},            {"replicates", sweep.replicates},
                         {"n", sweep.n},            {"v", sweep.v},
                         {"A", sweep.concentration}, {"simplex", sweep.simplex},
                         {"seed", opts.seed}};

    const auto series = cfb::sensitivity_sweep(axis, grid, fixed, sweep.replicates);
    const std::string prologue = csv_prologue(opts, config);
    cfb::write_sweep_csv(dir + "/sweep_" + sweep.axis + ".csv", series, prologue);
    cfb::write_sweep_replicates_csv(dir + "/sweep_" + sweep.axis + "_replicates.csv", series,
                                    prologue);

    json summary = {{"meta", meta_block(opts, config)}, {"grid_points", series.size()}};
    cfb::write_json(dir + "/sweep_" + sweep.axis + "_summary.json", summary);
    std::cout << "sweep over " << sweep.axis << ": " << series.size() << " grid points\n";
    return 0;
}

// ---- bounds / estimate -------------------------------------------------

void emit_estimation_report(const CommonOpts& opts, const json& config,
                            const cfb::EstimationReport& report, bool table) {
    const std::string dir = ensure_out_dir(opts);
    json out = cfb::estimation_report_to_json(report);
    out["meta"] = meta_block(opts, config);
    cfb::write_json(dir + "/report.json", out);

    if (table) {
        std::ofstream csv(dir + "/report_table.csv");
        csv << "# " << csv_prologue(opts, config) << '\n';
        csv << "quantity,point,uplift_lower,uplift_upper,frechet_lower,frechet_upper\n";
        for (std::size_t i = 0; i < 4; ++i) {
            const cfb::Quantity q = cfb::kAllQuantities[i];
            csv << cfb::to_string(q) << ',' << cfb::format_g17(report.point.dist[q]) << ','
                << cfb::format_g17(report.uplift_intervals[i].lower) << ','
                << cfb::format_g17(report.uplift_intervals[i].upper) << ','
                << cfb::format_g17(report.frechet_intervals[i].lower) << ','
                << cfb::format_g17(report.frechet_intervals[i].upper) << '\n';
        }
    }

    // Human-readable summary in percent, two decimals.
    std::printf("%-8s %10s %22s %22s\n", "quantity", "point", "uplift bounds",
                "Frechet bounds");
    for (std::size_t i = 0; i < 4; ++i) {
        const cfb::Quantity q = cfb::kAllQuantities[i];
        std::printf("%-8s %9.2f%% [%8.2f%%, %8.2f%%] [%8.2f%%, %8.2f%%]\n", cfb::to_string(q),
                    100.0 * report.point.dist[q], 100.0 * report.uplift_intervals[i].lower,
                    100.0 * report.uplift_intervals[i].upper,
                    100.0 * report.frechet_intervals[i].lower,
                    100.0 * report.frechet_intervals[i].upper);
    }
}

int cmd_bounds(const CommonOpts& opts, const std::string& score_path, bool table) {
    const json config = {{"subcommand", "bounds"},
                         {"scores", score_path},
                         {"seed", opts.seed}};
    const cfb::ScoreFile file = cfb::read_score_file(score_path);
    const cfb::EstimationReport report = cfb::make_report(file.scores);
    emit_estimation_report(opts, config, report, table);
    return 0;
}

struct EstimateOpts {
    std::string input;
    std::string treatment_col = "t";
    std::string outcome_col = "y";
    std::string id_col;
    int folds = 5;
    bool single_split = false;
    double test_fraction = 0.3;
    bool balancing = false;
    int ensemble = 10;
    bool no_calibration = false;
    double l2 = 1e-3;
    int max_iters = 500;
    bool table = false;
};

int cmd_estimate(const CommonOpts& opts, const EstimateOpts& est) {
    const json config = {{"subcommand", "estimate"},
                         {"input", est.input},
                         {"treatment_col", est.treatment_col},
                         {"outcome_col", est.outcome_col},
                         {"id_col", est.id_col},
                         {"folds", est.folds},
                         {"single_split", est.single_split},
                         {"test_fraction", est.test_fraction},
                         {"balancing", est.balancing},
                         {"ensemble", est.ensemble},
                         {"calibration", !est.no_calibration},
                         {"l2", est.l2},
                         {"max_iters", est.max_iters},
                         {"seed", opts.seed}};

    cfb::ColumnSchema schema;
    schema.treatment_col = est.treatment_col;
    schema.outcome_col = est.outcome_col;
    if (!est.id_col.empty()) schema.id_col = est.id_col;
    const cfb::CampaignDataset dataset = cfb::load_campaign_csv(est.input, schema);

    cfb::ScoreModelSpec spec;
    spec.balancing = est.balancing;
    spec.ensemble_size = est.ensemble;
    spec.calibration = !est.no_calibration;
    spec.l2_penalty = est.l2;
    spec.max_iterations = est.max_iters;
    spec.seed = opts.seed;

    cfb::SplitSpec split;
    split.mode = est.single_split ? cfb::SplitSpec::Mode::SingleSplit
                                  : cfb::SplitSpec::Mode::KFold;
    split.k_folds = est.folds;
    split.test_fraction = est.test_fraction;
    split.seed = opts.seed;

    cfb::ScoreSet scores;
    const cfb::EstimationReport report =
        cfb::run_algorithm_one(dataset, spec, split, &scores);
    emit_estimation_report(opts, config, report, est.table);

    // Out-of-fold scores for audit; in single-split mode ids are not aligned
    // with input rows, so the echo is skipped there.
    if (!est.single_split) {
        cfb::ScoreFile audit;
        audit.ids = dataset.ids;
        audit.scores = scores;
        audit.treatment = dataset.treatment;
        audit.outcome = dataset.outcome;
        cfb::write_score_file(opts.out_dir + "/oof_scores.csv", audit);
    }
    return 0;
}

// ---- profit ------------------------------------------------------------

struct ProfitOpts {
    std::string report_path;
    double value = 120.0;
    double cost = 1.0;
    std::int64_t contacted = 0;
    std::int64_t population = 0;  // 0 = use the report's n_samples
};

int cmd_profit(const CommonOpts& opts, const ProfitOpts& pr) {
    const json config = {{"subcommand", "profit"}, {"report", pr.report_path},
                         {"value", pr.value},      {"cost", pr.cost},
                         {"contacted", pr.contacted}, {"population", pr.population},
                         {"seed", opts.seed}};

    std::ifstream in(pr.report_path);
    if (!in) throw std::runtime_error("cannot open report '" + pr.report_path + "'");
    json report;
    in >> report;

    const double s0 = report.at("score_means").at("s0").get<double>();
    const double s1 = report.at("score_means").at("s1").get<double>();
    const double uplift = s0 - s1;
    const double beta_point = report.at("point_estimate").at("beta").get<double>();
    const json& ub = report.at("uplift_bounds").at("beta");
    cfb::Interval beta_interval{ub.at("lower").get<double>(), ub.at("upper").get<double>(),
                                cfb::Quantity::Beta};

    const std::int64_t population =
        pr.population > 0 ? pr.population
                          : report.at("n_samples").get<std::int64_t>();
    const std::int64_t contacted = pr.contacted > 0 ? pr.contacted : population;

    const double realized = cfb::realized_profit(contacted, uplift, pr.value, pr.cost);
    const cfb::PersuadableCounts counts =
        cfb::persuadable_counts(population, beta_point, beta_interval);
    const auto [range_lo, range_hi] =
        cfb::profit_range(population, beta_interval, pr.value, pr.cost);
    const double persuadable_only =
        static_cast<double>(counts.point) * (pr.value - pr.cost);

    const std::string dir = ensure_out_dir(opts);
    json out = {{"meta", meta_block(opts, config)},
                {"uplift", uplift},
                {"realized_profit", realized},
                {"persuadable_counts",
                 {{"point", counts.point}, {"lower", counts.lower}, {"upper", counts.upper}}},
                {"persuadable_only_profit", persuadable_only},
                {"profit_range", {{"lower", range_lo}, {"upper", range_hi}}}};
    cfb::write_json(dir + "/profit.json", out);

    std::printf("realized profit: %.2f (uplift %.2f%%, %lld contacted)\n", realized,
                100.0 * uplift, static_cast<long long>(contacted));
    std::printf("persuadables: %lld [%lld, %lld] of %lld\n",
                static_cast<long long>(counts.point), static_cast<long long>(counts.lower),
                static_cast<long long>(counts.upper), static_cast<long long>(population));
    std::printf("persuadable-only profit: %.2f, range [%.2f, %.2f]\n", persuadable_only,
                range_lo, range_hi);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual probability bounds and estimates from uplift scores"};
    app.require_subcommand(1);

    json config;
    try {
        config = load_config_file(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    CommonOpts common;

    // simulate
    cfb::BenchmarkProtocol protocol;
    auto* simulate = app.add_subcommand("simulate", "Randomized-parameter benchmark");
    add_common(simulate, common, config);
    from_config(config, "runs", protocol.runs);
    simulate->add_option("--runs", protocol.runs, "Number of simulation runs");
    simulate->add_option("--n-min", protocol.n_min);
    simulate->add_option("--n-max", protocol.n_max);
    simulate->add_option("--v-min", protocol.v_min);
    simulate->add_option("--v-max", protocol.v_max);
    simulate->add_option("--a-min", protocol.a_min);
    simulate->add_option("--a-max", protocol.a_max);

    // sweep
    SweepOpts sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sensitivity sweep over A, N or v");
    add_common(sweep_cmd, common, config);
    from_config(config, "axis", sweep.axis);
    from_config(config, "replicates", sweep.replicates);
    sweep_cmd->add_option("--axis", sweep.axis, "Sweep axis: A, N or v");
    sweep_cmd->add_option("--grid", sweep.grid, "Explicit grid values");
    sweep_cmd->add_option("--replicates", sweep.replicates, "Replicates per grid point");
    sweep_cmd->add_option("--n", sweep.n, "Fixed evaluation-set size");
    sweep_cmd->add_option("--v", sweep.v, "Fixed variance knob");
    sweep_cmd->add_option("--A", sweep.concentration, "Fixed concentration");

    // bounds
    std::string score_path;
    bool bounds_table = false;
    auto* bounds_cmd = app.add_subcommand("bounds", "Bounds and estimates from a score file");
    add_common(bounds_cmd, common, config);
    from_config(config, "scores", score_path);
    bounds_cmd->add_option("--scores", score_path, "Score CSV (id,s0_hat,s1_hat[,t,y])");
    bounds_cmd->add_flag("--table", bounds_table, "Also emit a per-quantity CSV table");

    // estimate
    EstimateOpts est;
    auto* estimate_cmd =
        app.add_subcommand("estimate", "Train, cross-validate and estimate from campaign CSV");
    add_common(estimate_cmd, common, config);
    from_config(config, "input", est.input);
    from_config(config, "treatment_col", est.treatment_col);
    from_config(config, "outcome_col", est.outcome_col);
    estimate_cmd->add_option("--input", est.input, "Campaign CSV");
    estimate_cmd->add_option("--treatment-col", est.treatment_col);
    estimate_cmd->add_option("--outcome-col", est.outcome_col);
    estimate_cmd->add_option("--id-col", est.id_col);
    estimate_cmd->add_option("--folds", est.folds);
    estimate_cmd->add_flag("--single-split", est.single_split);
    estimate_cmd->add_option("--test-fraction", est.test_fraction);
    estimate_cmd->add_flag("--balancing", est.balancing);
    estimate_cmd->add_option("--ensemble", est.ensemble);
    estimate_cmd->add_flag("--no-calibration", est.no_calibration);
    estimate_cmd->add_option("--l2", est.l2);
    estimate_cmd->add_option("--max-iters", est.max_iters);
    estimate_cmd->add_flag("--table", est.table);

    // profit
    ProfitOpts pr;
    auto* profit_cmd = app.add_subcommand("profit", "Campaign profit report");
    add_common(profit_cmd, common, config);
    from_config(config, "report", pr.report_path);
    from_config(config, "value", pr.value);
    from_config(config, "cost", pr.cost);
    profit_cmd->add_option("--report", pr.report_path, "Estimation report JSON");
    profit_cmd->add_option("--value", pr.value, "Customer lifetime value");
    profit_cmd->add_option("--cost", pr.cost, "Cost per contact");
    profit_cmd->add_option("--contacted", pr.contacted, "Customers contacted");
    profit_cmd->add_option("--population", pr.population, "Population size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    resolve_seed(common);
    protocol.seed = common.seed;
    protocol.threads = resolve_threads(common);

    try {
        if (simulate->parsed()) return cmd_simulate(common, protocol);
        if (sweep_cmd->parsed()) return cmd_sweep(common, sweep);
        if (bounds_cmd->parsed()) {
            if (score_path.empty()) throw CLI::ValidationError("--scores", "is required");
            return cmd_bounds(common, score_path, bounds_table);
        }
        if (estimate_cmd->parsed()) {
            if (est.input.empty()) throw CLI::ValidationError("--input", "is required");
            return cmd_estimate(common, est);
        }
        if (profit_cmd->parsed()) {
            if (pr.report_path.empty()) throw CLI::ValidationError("--report", "is required");
            return cmd_profit(common, pr);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        // Ingestion and validation failures carry location info; treat
        // write failures as runtime errors.
        if (msg.rfind("cannot write", 0) == 0) {
            std::cerr << "runtime error: " << msg << '\n';
            return 3;
        }
        std::cerr << "data error: " << msg << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
