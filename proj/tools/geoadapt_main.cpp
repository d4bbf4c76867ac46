// geoadapt command-line front end. Talks to the core exclusively through the
// public C API in geoadapt.h; all pipeline logic lives behind it.

#include <cstdio>
#include <cstdlib>
#include <deque>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "geoadapt.h"

namespace {

struct ConfigDeleter {
    void operator()(ga_config* cfg) const { ga_config_free(cfg); }
};
using ConfigPtr = std::unique_ptr<ga_config, ConfigDeleter>;

using KeyValue = std::pair<std::string, std::string>;

// flag storage: value plus the config key it maps onto
struct BoundOption {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
};

int fail(int status) {
    std::fprintf(stderr, "geoadapt: %s: %s\n", ga_status_name(status),
                 ga_last_error());
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "locatability scoring, reward construction, dataset curation and "
        "desk-scale GRPO training for geo-localization"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "key = value configuration file (falls back to the "
                   "GEOADAPT_CONFIG environment variable)");
    std::vector<std::string> sets;
    app.add_option("--set", sets,
                   "override a single config key, e.g. --set sigma=200")
        ->take_all();

    std::deque<BoundOption> bound;  // stable addresses for CLI11 bindings
    auto bind = [&bound](CLI::App* cmd, const char* flag, const char* key,
                         const char* help) {
        bound.push_back({key, "", nullptr});
        auto& slot = bound.back();
        slot.option = cmd->add_option(flag, slot.value, help);
    };

    bind(&app, "--seed", "seed", "random seed");
    bind(&app, "--gamma1", "gamma1", "reasoning-score base decay rate");
    bind(&app, "--gamma2", "gamma2", "reasoning-score gap decay rate");
    bind(&app, "--alpha", "alpha", "optimized-score modulation strength");
    bind(&app, "--tau-margin", "tau_margin",
         "rag-superior margin in kilometers");
    bind(&app, "--sigma", "sigma", "coordinate reward distance scale (km)");

    bool lenient = false;
    app.add_flag("--lenient", lenient,
                 "skip and log malformed records instead of aborting");
    bool plot = false;
    app.add_flag("--plot", plot, "emit SVG charts next to the outputs");

    auto* score = app.add_subcommand(
        "score", "annotate records with locatability scores and stratum");
    bind(score, "--in", "dataset_in", "dataset JSONL input");
    bind(score, "--out", "dataset_out", "scored JSONL output");
    bind(score, "--plot-out", "plot_out", "path for the L_opt histogram SVG");

    auto* stratify = app.add_subcommand(
        "stratify", "split a dataset into standard and rag-superior subsets");
    bind(stratify, "--in", "dataset_in", "dataset JSONL input");
    bind(stratify, "--standard-out", "standard_out", "standard subset output");
    bind(stratify, "--rag-superior-out", "rag_superior_out",
         "rag-superior subset output");
    bind(stratify, "--summary-out", "summary_out", "summary JSON output");

    auto* curate = app.add_subcommand(
        "curate",
        "stratify, validate candidate-derived cues and merge trajectories");
    bind(curate, "--in", "dataset_in", "dataset JSONL input");
    bind(curate, "--standard-out", "standard_out", "standard subset output");
    bind(curate, "--rag-superior-out", "rag_superior_out",
         "augmented rag-superior subset output");
    bind(curate, "--summary-out", "summary_out", "summary JSON output");
    bind(curate, "--step-threshold", "step_threshold",
         "implicit/explicit grounding threshold");
    bind(curate, "--plot-out", "plot_out", "path for the L_opt histogram SVG");

    auto* reward = app.add_subcommand(
        "reward", "score predictions with the full reward breakdown");
    bind(reward, "--dataset", "dataset_in", "dataset JSONL with ground truth");
    bind(reward, "--predictions", "predictions_in", "predictions JSONL");
    bind(reward, "--out", "rewards_out", "reward breakdown JSONL output");
    bind(reward, "--grounding-table", "grounding_table",
         "grounding confidence table (TSV or JSONL)");
    bind(reward, "--alias-table", "alias_table", "name alias table (TSV)");
    bind(reward, "--plot-out", "plot_out",
         "path for the reward-surface SVG");

    auto* train = app.add_subcommand(
        "train-toy",
        "run the two-stage curriculum on the bundled synthetic world");
    bind(train, "--trace-out", "trace_out", "JSONL trace output");
    bind(train, "--policy-out", "policy_out", "plain-text policy dump");
    bind(train, "--stage1-epochs", "stage1_epochs", "stage 1 epoch count");
    bind(train, "--stage2-epochs", "stage2_epochs", "stage 2 epoch count");

    auto* eval = app.add_subcommand(
        "eval", "compute distance-threshold and name accuracies");
    bind(eval, "--predictions", "predictions_in",
         "eval records JSONL (predicted + truth)");
    bind(eval, "--report-out", "report_out",
         "report output path (prints to stdout when omitted)");
    bind(eval, "--alias-table", "alias_table", "name alias table (TSV)");
    std::string eval_format;
    eval->add_option("--format", eval_format, "json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));

    auto* report = app.add_subcommand(
        "report", "re-emit a JSON metrics report in another format");
    bind(report, "--in", "report_in", "report JSON input");
    bind(report, "--report-out", "report_out",
         "output path (prints to stdout when omitted)");
    std::string report_format;
    report->add_option("--format", report_format, "json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));

    CLI11_PARSE(app, argc, argv);

    ConfigPtr cfg(ga_config_new());
    if (!cfg) {
        std::fprintf(stderr, "geoadapt: out of memory\n");
        return GA_ERR_INTERNAL;
    }

    // precedence: defaults, then config file, then flags
    if (config_path.empty()) {
        if (const char* env = std::getenv("GEOADAPT_CONFIG")) {
            config_path = env;
        }
    }
    if (!config_path.empty()) {
        if (int rc = ga_config_load_file(cfg.get(), config_path.c_str())) {
            return fail(rc);
        }
    }
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "geoadapt: --set expects key=value, got '%s'\n",
                         kv.c_str());
            return GA_ERR_INVALID_ARGUMENT;
        }
        if (int rc = ga_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                   kv.substr(eq + 1).c_str())) {
            return fail(rc);
        }
    }
    for (const auto& slot : bound) {
        if (slot.option->count() == 0) continue;
        if (int rc = ga_config_set(cfg.get(), slot.key.c_str(),
                                   slot.value.c_str())) {
            return fail(rc);
        }
    }
    if (eval->count("--format")) {
        if (int rc = ga_config_set(cfg.get(), "report_format",
                                   eval_format.c_str())) {
            return fail(rc);
        }
    }
    if (report->count("--format")) {
        if (int rc = ga_config_set(cfg.get(), "report_format",
                                   report_format.c_str())) {
            return fail(rc);
        }
    }
    if (lenient) {
        if (int rc = ga_config_set(cfg.get(), "lenient", "true")) {
            return fail(rc);
        }
    }
    if (plot) {
        if (int rc = ga_config_set(cfg.get(), "plot", "true")) return fail(rc);
    }

    int (*command)(const ga_config*, char**) = nullptr;
    if (score->parsed()) command = ga_run_score;
    if (stratify->parsed()) command = ga_run_stratify;
    if (curate->parsed()) command = ga_run_curate;
    if (reward->parsed()) command = ga_run_reward;
    if (train->parsed()) command = ga_run_train_toy;
    if (eval->parsed()) command = ga_run_eval;
    if (report->parsed()) command = ga_run_report;
    if (!command) {
        std::fprintf(stderr, "geoadapt: no subcommand selected\n");
        return GA_ERR_INVALID_ARGUMENT;
    }

    char* summary = nullptr;
    const int rc = command(cfg.get(), &summary);
    if (summary) {
        std::fputs(summary, stdout);
        ga_string_free(summary);
    }
    if (rc != GA_OK) return fail(rc);
    return 0;
}
