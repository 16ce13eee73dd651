#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcasim/config.hpp"
#include "tcasim/csv.hpp"
#include "tcasim/version.hpp"

namespace fs = std::filesystem;
using namespace tcasim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitCalibration = 3;

struct CliOptions {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<int> seeds;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    std::optional<std::string> model;
};

std::string resolve_out_dir(const CliOptions& opt) {
    if (opt.out) return *opt.out;
    if (const char* env = std::getenv("TCASIM_OUT_DIR"); env && *env) return env;
    return "out";
}

/// Loads the config (defaults when no --config), applies flag overrides and
/// keeps the raw bytes for hashing. Throws ConfigError on bad content;
/// returns nullopt after printing when the file is missing.
struct LoadedConfig {
    Config cfg;
    std::string text;
    std::string path;  // empty when defaults
};

std::optional<LoadedConfig> load_cli_config(const CliOptions& opt, int& exit_code) {
    LoadedConfig lc;
    if (opt.config) {
        if (!fs::exists(*opt.config)) {
            std::cerr << "error: missing config file: " << *opt.config << "\n";
            exit_code = kExitMissingInput;
            return std::nullopt;
        }
        lc.path = *opt.config;
        lc.text = read_file(lc.path);
        lc.cfg = parse_config(lc.text);
    } else {
        lc.cfg = default_config();
    }
    if (opt.seed) lc.cfg.run.seed0 = *opt.seed;
    if (opt.seeds) {
        if (*opt.seeds < 1) throw ConfigError("--seeds: must be positive");
        lc.cfg.run.seeds = *opt.seeds;
    }
    if (opt.mode) {
        const auto m = mode_from_string(*opt.mode);
        if (!m) throw ConfigError("--mode: expected baseline or tca");
        lc.cfg.run.mode = *m;
    }
    exit_code = kExitOk;
    return lc;
}

std::vector<std::uint64_t> seed_list(std::uint64_t seed0, int n) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) seeds.push_back(seed0 + static_cast<std::uint64_t>(s));
    return seeds;
}

RunManifest start_manifest(const std::string& subcommand, const LoadedConfig& lc,
                           const std::string& out_dir, const std::string& mode,
                           std::vector<std::uint64_t> seeds, const std::string& model_path) {
    RunManifest m;
    m.version = kVersion;
    m.subcommand = subcommand;
    m.config_path = lc.path;
    m.config_hash = config_hash_hex(lc.text);
    m.model_path = model_path;
    m.mode = mode;
    m.seeds = std::move(seeds);
    m.out_dir = out_dir;
    m.started_at = utc_timestamp_now();
    write_manifest(out_dir + "/manifest.json", m);
    return m;
}

void finish_manifest(RunManifest& m) {
    m.finished_at = utc_timestamp_now();
    write_manifest(m.out_dir + "/manifest.json", m);
}

/// Resolves and loads the optional trained model. An explicit --model that
/// does not exist is a hard error; otherwise <out>/model.json is picked up
/// when present and the deterministic fallback predictor is used when not.
std::optional<Forest> load_model(const CliOptions& opt, const std::string& out_dir, bool needed,
                                 std::string& used_path, int& exit_code) {
    exit_code = kExitOk;
    used_path.clear();
    if (!needed) return std::nullopt;
    std::string path = opt.model ? *opt.model : out_dir + "/model.json";
    if (!fs::exists(path)) {
        if (opt.model) {
            std::cerr << "error: missing model file: " << path << "\n";
            exit_code = kExitMissingInput;
            return std::nullopt;
        }
        std::cerr << "note: no trained model at " << path
                  << "; using the built-in network-condition fallback predictor\n";
        return std::nullopt;
    }
    used_path = path;
    return load_forest(path);
}

void print_eval_report(const EvalReport& r, std::size_t n_test) {
    std::printf("test examples: %zu\n", n_test);
    std::printf("accuracy:      %.4f\n", r.accuracy);
    std::printf("macro F1:      %.4f\n", r.macro_f1);
    if (!r.absent_classes.empty()) {
        std::printf("classes absent from truth and prediction:");
        for (int c : r.absent_classes) std::printf(" %d", c);
        std::printf(" (excluded from macro F1)\n");
    }
    std::printf("confusion (rows = truth 1..4, cols = predicted 1..4):\n");
    for (int t = 0; t < kNumClasses; ++t) {
        std::printf("  ");
        for (int p = 0; p < kNumClasses; ++p) std::printf("%6d", r.confusion[t][p]);
        std::printf("\n");
    }
}

void write_eval_csv(const std::string& path, const EvalReport& r, std::size_t n_test) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "metric,value\n";
    out << "n_test," << n_test << '\n';
    out << "accuracy," << fmt_double(r.accuracy, 4) << '\n';
    out << "macro_f1," << fmt_double(r.macro_f1, 4) << '\n';
    for (int t = 0; t < kNumClasses; ++t) {
        for (int p = 0; p < kNumClasses; ++p) {
            out << "confusion_" << (t + 1) << '_' << (p + 1) << ',' << r.confusion[t][p] << '\n';
        }
    }
}

int cmd_simulate(const CliOptions& opt) {
    int ec = 0;
    auto lc = load_cli_config(opt, ec);
    if (!lc) return ec;
    const Config& cfg = lc->cfg;
    const SimContext ctx = cfg.context();
    const Mode mode = cfg.run.mode;
    const std::string out_dir = resolve_out_dir(opt);
    fs::create_directories(out_dir);

    std::string model_path;
    std::optional<Forest> forest = load_model(opt, out_dir, mode == Mode::Tca, model_path, ec);
    if (ec != kExitOk) return ec;
    Predictor pred{forest ? &*forest : nullptr};

    RunManifest manifest = start_manifest("simulate", *lc, out_dir, to_string(mode),
                                          seed_list(cfg.run.seed0, cfg.run.seeds), model_path);

    std::vector<ConvergenceRecord> records;
    RunResult first;
    for (int s = 0; s < cfg.run.seeds; ++s) {
        RunResult r = run_simulation(ctx, mode, pred, cfg.run.seed0 + static_cast<std::uint64_t>(s));
        if (s == 0) first = r;
        records.insert(records.end(), r.records.begin(), r.records.end());
    }
    const std::string group = "profile=" + (records.empty() ? "none" : records.front().profile);
    const std::vector<GroupSummary> summary{summarize(records, group, mode, cfg.trust)};

    write_records_csv(out_dir + "/records.csv", records);
    write_summary_csv(out_dir + "/summary.csv", summary);
    write_diagnostics_csv(out_dir + "/diagnostics.csv", first.diagnostics);
    write_alerts_csv(out_dir + "/alerts.csv", first.alerts);
    write_qos_trace_csv(out_dir + "/qos_trace.csv", first.qos_trace);
    write_trajectories_csv(out_dir + "/trajectories.csv", first.trajectories);
    finish_manifest(manifest);

    std::cout << render_summary_table(summary);
    std::cout << "wrote " << out_dir << "/records.csv (" << records.size() << " rows)\n";
    return kExitOk;
}

int cmd_dataset(const CliOptions& opt) {
    int ec = 0;
    auto lc = load_cli_config(opt, ec);
    if (!lc) return ec;
    const Config& cfg = lc->cfg;
    const std::string out_dir = resolve_out_dir(opt);
    fs::create_directories(out_dir);

    RunManifest manifest =
        start_manifest("dataset", *lc, out_dir, "baseline", {cfg.run.seed0}, "");
    const std::vector<LabeledExample> ds = generate_dataset(cfg.context(), cfg.dataset, cfg.run.seed0);
    save_dataset_csv(ds, out_dir + "/dataset.csv");
    finish_manifest(manifest);

    std::array<int, kNumClasses> hist{};
    for (const LabeledExample& ex : ds) hist[static_cast<std::size_t>(ex.class_id - 1)]++;
    std::printf("wrote %s/dataset.csv (%zu examples; class counts", out_dir.c_str(), ds.size());
    for (int c = 0; c < kNumClasses; ++c) std::printf(" %d:%d", c + 1, hist[static_cast<std::size_t>(c)]);
    std::printf(")\n");
    return kExitOk;
}

int cmd_train(const CliOptions& opt, const std::string& data_arg) {
    int ec = 0;
    auto lc = load_cli_config(opt, ec);
    if (!lc) return ec;
    const Config& cfg = lc->cfg;
    const std::string out_dir = resolve_out_dir(opt);
    fs::create_directories(out_dir);

    const std::string data_path = data_arg.empty() ? out_dir + "/dataset.csv" : data_arg;
    if (!fs::exists(data_path)) {
        std::cerr << "error: missing dataset file: " << data_path
                  << " (generate one with the dataset subcommand or pass a path)\n";
        return kExitMissingInput;
    }
    const std::string model_path = opt.model ? *opt.model : out_dir + "/model.json";

    RunManifest manifest =
        start_manifest("train", *lc, out_dir, "baseline", {cfg.run.seed0}, model_path);
    const std::vector<LabeledExample> ds = load_dataset_csv(data_path);
    std::vector<LabeledExample> train_set, test_set;
    stratified_split(ds, cfg.train_fraction, cfg.run.seed0, train_set, test_set);
    const Forest forest = train_forest(train_set, cfg.forest, cfg.run.seed0);
    const EvalReport report = evaluate(forest, test_set);
    save_forest(forest, model_path);
    write_eval_csv(out_dir + "/evaluation.csv", report, test_set.size());
    finish_manifest(manifest);

    // Majority baseline on the same held-out set, for context.
    std::array<int, kNumClasses> train_hist{};
    for (const LabeledExample& ex : train_set) train_hist[static_cast<std::size_t>(ex.class_id - 1)]++;
    int majority = 1;
    for (int c = 1; c < kNumClasses; ++c) {
        if (train_hist[static_cast<std::size_t>(c)] > train_hist[static_cast<std::size_t>(majority - 1)]) {
            majority = c + 1;
        }
    }
    int majority_hits = 0;
    for (const LabeledExample& ex : test_set) majority_hits += ex.class_id == majority ? 1 : 0;

    std::printf("trained %d trees on %zu examples\n", cfg.forest.n_trees, train_set.size());
    print_eval_report(report, test_set.size());
    std::printf("majority baseline (class %d): %.4f\n", majority,
                test_set.empty() ? 0.0 : static_cast<double>(majority_hits) / static_cast<double>(test_set.size()));
    std::printf("wrote %s\n", model_path.c_str());
    return kExitOk;
}

int cmd_evaluate(const CliOptions& opt, const std::string& data_arg) {
    int ec = 0;
    auto lc = load_cli_config(opt, ec);
    if (!lc) return ec;
    const Config& cfg = lc->cfg;
    const std::string out_dir = resolve_out_dir(opt);
    fs::create_directories(out_dir);

    const std::string model_path = opt.model ? *opt.model : out_dir + "/model.json";
    if (!fs::exists(model_path)) {
        std::cerr << "error: missing model file: " << model_path << "\n";
        return kExitMissingInput;
    }
    const std::string data_path = data_arg.empty() ? out_dir + "/dataset.csv" : data_arg;
    if (!fs::exists(data_path)) {
        std::cerr << "error: missing dataset file: " << data_path << "\n";
        return kExitMissingInput;
    }

    RunManifest manifest =
        start_manifest("evaluate", *lc, out_dir, "baseline", {cfg.run.seed0}, model_path);
    const Forest forest = load_forest(model_path);
    const std::vector<LabeledExample> ds = load_dataset_csv(data_path);
    const EvalReport report = evaluate(forest, ds);
    write_eval_csv(out_dir + "/evaluation.csv", report, ds.size());
    finish_manifest(manifest);

    print_eval_report(report, ds.size());
    return kExitOk;
}

int cmd_experiment(const CliOptions& opt, const std::string& fig) {
    int ec = 0;
    auto lc = load_cli_config(opt, ec);
    if (!lc) return ec;
    const Config& cfg = lc->cfg;
    const SimContext ctx = cfg.context();
    const std::string out_dir = resolve_out_dir(opt);
    fs::create_directories(out_dir);

    std::string model_path;
    std::optional<Forest> forest = load_model(opt, out_dir, true, model_path, ec);
    if (ec != kExitOk) return ec;
    Predictor pred{forest ? &*forest : nullptr};

    RunManifest manifest = start_manifest("experiment " + fig, *lc, out_dir, "both",
                                          seed_list(cfg.run.seed0, cfg.run.seeds), model_path);

    ExperimentResult res;
    if (fig == "fig-a") {
        res = experiment_convergence(ctx, pred, cfg.run.seeds, cfg.run.seed0);
    } else if (fig == "fig-b") {
        res = experiment_badmouthing(ctx, pred, cfg.run.seeds, cfg.run.seed0);
    } else {
        res = experiment_scalability(ctx, pred, cfg.run.seeds, cfg.run.seed0);
    }

    write_records_csv(out_dir + "/records.csv", res.records);
    write_summary_csv(out_dir + "/summary.csv", res.summary);
    write_diagnostics_csv(out_dir + "/diagnostics.csv", res.diagnostics);
    write_alerts_csv(out_dir + "/alerts.csv", res.alerts);
    write_qos_trace_csv(out_dir + "/qos_trace.csv", res.qos_trace);
    if (!res.timings.empty()) write_timings_csv(out_dir + "/timings.csv", res.timings);
    finish_manifest(manifest);

    std::cout << render_summary_table(res.summary);
    std::cout << "wrote " << out_dir << "/records.csv (" << res.records.size() << " rows)\n";
    return kExitOk;
}

int cmd_calibrate(const CliOptions& opt) {
    int ec = 0;
    auto lc = load_cli_config(opt, ec);
    if (!lc) return ec;
    const Config& cfg = lc->cfg;
    const std::string out_dir = resolve_out_dir(opt);
    fs::create_directories(out_dir);

    RunManifest manifest =
        start_manifest("calibrate", *lc, out_dir, "baseline", {cfg.run.seed0}, "");
    const CalibrateResult res = calibrate(cfg.context(), cfg.calibrate, cfg.run.seed0);

    {
        std::ofstream out(out_dir + "/calibration.csv", std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + out_dir + "/calibration.csv");
        out << "q_floor,poor_center,good_mean,poor_mean,feasible\n";
        for (const CalibratePoint& p : res.report) {
            out << fmt_double(p.q_floor, 4) << ',' << fmt_double(p.poor_center, 4) << ','
                << fmt_double(p.good_mean, 4) << ',' << fmt_double(p.poor_mean, 4) << ','
                << (p.feasible ? 1 : 0) << '\n';
        }
    }
    finish_manifest(manifest);

    std::printf("%-8s %-11s %10s %10s %s\n", "q_floor", "poor_center", "good_mean", "poor_mean",
                "feasible");
    for (const CalibratePoint& p : res.report) {
        std::printf("%-8.3f %-11.3f %10.3f %10.3f %s\n", p.q_floor, p.poor_center, p.good_mean,
                    p.poor_mean, p.feasible ? "yes" : "no");
    }
    if (!res.feasible) {
        // Rank the misses by how far they fall outside the two target bands.
        auto band_miss = [](double v, double lo, double hi) {
            return v < lo ? lo - v : (v > hi ? v - hi : 0.0);
        };
        std::vector<CalibratePoint> misses(res.report.begin(), res.report.end());
        std::sort(misses.begin(), misses.end(), [&](const CalibratePoint& a, const CalibratePoint& b) {
            const double da = band_miss(a.good_mean, cfg.calibrate.good_lo, cfg.calibrate.good_hi) +
                              band_miss(a.poor_mean, cfg.calibrate.poor_lo, cfg.calibrate.poor_hi);
            const double db = band_miss(b.good_mean, cfg.calibrate.good_lo, cfg.calibrate.good_hi) +
                              band_miss(b.poor_mean, cfg.calibrate.poor_lo, cfg.calibrate.poor_hi);
            return da < db;
        });
        std::cerr << "error: no grid point satisfies the target bands (good ["
                  << fmt_double(cfg.calibrate.good_lo, 2) << ", " << fmt_double(cfg.calibrate.good_hi, 2)
                  << "], poor [" << fmt_double(cfg.calibrate.poor_lo, 2) << ", "
                  << fmt_double(cfg.calibrate.poor_hi, 2) << "]); nearest misses:\n";
        for (std::size_t i = 0; i < misses.size() && i < 3; ++i) {
            std::cerr << "  q_floor=" << fmt_double(misses[i].q_floor, 3)
                      << " poor_center=" << fmt_double(misses[i].poor_center, 3)
                      << " good_mean=" << fmt_double(misses[i].good_mean, 3)
                      << " poor_mean=" << fmt_double(misses[i].poor_mean, 3) << "\n";
        }
        return kExitCalibration;
    }
    std::printf("selected q_floor=%.3f poor_center=%.3f\n", res.q_floor, res.poor_center);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical trust simulation with network-aware boosting"};
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    CliOptions opt;
    app.add_option("--config", opt.config, "JSON configuration file");
    app.add_option("--seed", opt.seed, "first seed (overrides run.seed0)");
    app.add_option("--seeds", opt.seeds, "number of seeded runs (overrides run.seeds)");
    app.add_option("--out", opt.out, "output directory (default $TCASIM_OUT_DIR or ./out)");
    app.add_option("--mode", opt.mode, "baseline or tca (overrides run.mode)");
    app.add_option("--model", opt.model, "trained model file");

    CLI::App* sim = app.add_subcommand("simulate", "run seeded simulations in one mode");
    CLI::App* dat = app.add_subcommand("dataset", "generate the labeled convergence dataset");
    std::string train_data;
    CLI::App* trn = app.add_subcommand("train", "train the convergence predictor");
    trn->add_option("data", train_data, "dataset CSV (default <out>/dataset.csv)");
    std::string eval_data;
    CLI::App* evl = app.add_subcommand("evaluate", "evaluate a trained model on a dataset");
    evl->add_option("data", eval_data, "dataset CSV (default <out>/dataset.csv)");
    std::string fig;
    CLI::App* exp = app.add_subcommand("experiment", "run a paired baseline/boosted sweep");
    exp->add_option("figure", fig, "fig-a (profiles), fig-b (bad-mouthing) or fig-c (scaling)")
        ->required()
        ->check(CLI::IsMember({"fig-a", "fig-b", "fig-c"}));
    CLI::App* cal = app.add_subcommand("calibrate", "grid-search q_floor and the Poor profile");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opt);
        if (dat->parsed()) return cmd_dataset(opt);
        if (trn->parsed()) return cmd_train(opt, train_data);
        if (evl->parsed()) return cmd_evaluate(opt, eval_data);
        if (exp->parsed()) return cmd_experiment(opt, fig);
        if (cal->parsed()) return cmd_calibrate(opt);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
