// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geoadapt.h"
#include "geoadapt/commands.hpp"
#include "geoadapt/evalharness.hpp"
#include "geoadapt/grpo.hpp"
#include "geoadapt/locatability.hpp"
#include "geoadapt/records.hpp"
#include "geoadapt/rewards.hpp"
#include "geoadapt/run_config.hpp"
#include "geoadapt/world.hpp"

namespace {

const std::string kDataDir = GEOADAPT_TEST_DATA_DIR;

struct Failure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw Failure{message};
}

void require_close(double actual, double expected, double tol,
                   const std::string& what) {
    if (!(std::abs(actual - expected) <= tol)) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s: got %.12g, want %.12g +/- %g",
                      what.c_str(), actual, expected, tol);
        throw Failure{buf};
    }
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::path("/tmp") /
               ("geoadapt_acc_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

double km_to_lon(double km) {
    return km / geoadapt::geodesy::kEarthRadiusKm * 180.0 /
           geoadapt::geodesy::kPi;
}

// ---------------------------------------------------------------- criteria

void closed_form_reward_fidelity() {
    using namespace geoadapt;
    const rewards::RewardParams p;  // lambda1 0.3, lambda2 0.7, sigma 100
    const text::NameNormalizer names;
    const rewards::GeoLocation truth{"France", "Paris",
                                     geodesy::GeoCoord(0.0, 0.0)};

    const double wrong_country = rewards::hierarchical_geo_reward(
        {"Spain", "Paris", geodesy::GeoCoord(0.0, 0.0)}, truth, p, names);
    require(wrong_country == 0.0, "wrong country must earn exactly 0");

    const double country_only = rewards::hierarchical_geo_reward(
        {"France", "Lyon", geodesy::GeoCoord(0.0, km_to_lon(p.sigma_km))},
        truth, p, names);
    require_close(country_only, 0.110364, 1e-5, "country-only tier at d=sigma");

    const double full = rewards::hierarchical_geo_reward(
        {"France", "Paris", geodesy::GeoCoord(0.0, 0.0)}, truth, p, names);
    require_close(full, 1.0, 1e-12, "full match at d=0");

    // three tiers across the distance grid against a piecewise oracle
    for (double d : {0.0, p.sigma_km / 2.0, p.sigma_km, 10.0 * p.sigma_km}) {
        const double lon = km_to_lon(d);
        const double dist = geodesy::haversine_km(geodesy::GeoCoord(0.0, lon),
                                                  truth.coord);
        const double rc = std::exp(-dist / p.sigma_km);
        require_close(
            rewards::hierarchical_geo_reward(
                {"Spain", "Madrid", geodesy::GeoCoord(0.0, lon)}, truth, p,
                names),
            0.0, 1e-9, "tier 0 on the grid");
        require_close(
            rewards::hierarchical_geo_reward(
                {"France", "Lyon", geodesy::GeoCoord(0.0, lon)}, truth, p,
                names),
            p.lambda1 * rc, 1e-9, "tier 1 on the grid");
        require_close(
            rewards::hierarchical_geo_reward(
                {"France", "Paris", geodesy::GeoCoord(0.0, lon)}, truth, p,
                names),
            p.lambda1 + p.lambda2 * rc, 1e-9, "tier 2 on the grid");
    }
}

void locatability_bound_suite() {
    using namespace geoadapt::locatability;
    std::mt19937_64 rng(20240);
    std::size_t gap_checks = 0;
    for (int i = 0; i < 10000; ++i) {
        const double l_visual = uniform(rng, 0.0, 1.0);
        const double d_reason = uniform(rng, 0.0, 5000.0);
        const double d_rag = uniform(rng, 0.0, 5000.0);
        const double alpha = uniform(rng, 0.0, 1.0);
        LocatabilityParams p;
        p.alpha = alpha;
        const auto result = score_record(l_visual, {d_rag, d_reason}, p);
        require(result.l_opt >= 0.0, "L_opt must be non-negative");
        require(result.l_opt <= l_visual,
                "L_opt must never exceed L_visual");
        if (d_reason <= d_rag) {
            require(result.l_gap == 1.0,
                    "L_gap must be exactly 1 when reasoning wins");
            ++gap_checks;
        }
    }
    require(gap_checks > 1000, "sampling failed to cover the no-penalty regime");
}

void default_hyperparameter_fidelity() {
    const geoadapt::config::RunConfig cfg;
    require(cfg.gamma1 == 0.01 && cfg.gamma2 == 0.01, "gamma defaults");
    require(cfg.alpha == 0.6, "alpha default");
    require(cfg.tau_margin == 50.0, "tau_margin default");
    require(cfg.w1 == 0.5 && cfg.w2 == 0.5, "stage-1 weight defaults");
    require(cfg.lambda1 == 0.3 && cfg.lambda2 == 0.7, "tier weight defaults");
    require(cfg.sigma == 100.0, "sigma default");

    // the same snapshot through the public C surface
    ga_config* c = ga_config_new();
    require(c != nullptr, "ga_config_new failed");
    const std::vector<std::pair<std::string, std::string>> expected{
        {"gamma1", "0.01"},   {"gamma2", "0.01"}, {"alpha", "0.6"},
        {"tau_margin", "50"}, {"w1", "0.5"},      {"w2", "0.5"},
        {"lambda1", "0.3"},   {"lambda2", "0.7"}, {"sigma", "100"}};
    for (const auto& [key, want] : expected) {
        char buf[64];
        require(ga_config_get(c, key.c_str(), buf, sizeof(buf)) == GA_OK,
                "ga_config_get(" + key + ")");
        require(std::string(buf) == want,
                "config default " + key + " = " + buf + ", want " + want);
    }
    ga_config_free(c);
}

void grpo_numeric_suite() {
    using namespace geoadapt::grpo;
    std::mt19937_64 rng(4242);

    // group-centered advantages: zero mean, shift/scale invariance
    for (int trial = 0; trial < 200; ++trial) {
        const int g = 2 + static_cast<int>(uniform(rng, 0, 7));
        std::vector<double> rewards;
        for (int i = 0; i < g; ++i) rewards.push_back(uniform(rng, -3, 3));
        const auto adv = normalize_advantages(rewards, 1e-8, true);
        double mean = 0.0;
        for (double a : adv) mean += a;
        mean /= static_cast<double>(g);
        require(std::abs(mean) < 1e-9, "per-group advantage mean exceeds 1e-9");

        auto shifted = rewards;
        for (double& r : shifted) r += 2.5;
        const auto adv_shift = normalize_advantages(shifted, 1e-8, true);
        for (std::size_t i = 0; i < adv.size(); ++i) {
            require(std::abs(adv_shift[i] - adv[i]) < 1e-9,
                    "shift invariance violated");
        }
        double var = 0.0, rmean = 0.0;
        for (double r : rewards) rmean += r;
        rmean /= static_cast<double>(g);
        for (double r : rewards) var += (r - rmean) * (r - rmean);
        if (var > 1e-6) {
            auto scaled = rewards;
            for (double& r : scaled) r *= 3.0;
            const auto adv_scale = normalize_advantages(scaled, 1e-8, true);
            for (std::size_t i = 0; i < adv.size(); ++i) {
                require(std::abs(adv_scale[i] - adv[i]) < 1e-6,
                        "scale invariance violated");
            }
        }
    }

    // KL(pi, pi) = 0 and KL >= 0
    for (int trial = 0; trial < 50; ++trial) {
        ToyPolicy p(3, 4);
        ToyPolicy q(3, 4);
        std::vector<double> x(4);
        for (double& v : x) v = uniform(rng, -1, 1);
        for (int a = 0; a < p.num_actions(); ++a) {
            for (int f = 0; f < 4; ++f) {
                p.weight(a, f) = uniform(rng, -0.5, 0.5);
                q.weight(a, f) = uniform(rng, -0.5, 0.5);
            }
        }
        require(kl_divergence(p, p, x) == 0.0, "KL(pi, pi) must be 0");
        require(kl_divergence(p, q, x) >= -1e-12, "KL must be non-negative");
    }

    // surrogate gradient vs central finite differences, 20 instances
    GrpoConfig cfg;
    const double h = 1e-5;
    int accepted = 0;
    while (accepted < 20) {
        const int cells = 2 + static_cast<int>(uniform(rng, 0, 2));
        const int feats = 2 + static_cast<int>(uniform(rng, 0, 3));
        ToyPolicy policy(cells, feats);
        ToyPolicy sampler(cells, feats);
        ToyPolicy ref(cells, feats);
        for (int a = 0; a < policy.num_actions(); ++a) {
            for (int f = 0; f < feats; ++f) {
                policy.weight(a, f) = uniform(rng, -0.5, 0.5);
                sampler.weight(a, f) = uniform(rng, -0.4, 0.4);
                ref.weight(a, f) = uniform(rng, -0.5, 0.5);
            }
        }
        std::vector<double> x(static_cast<std::size_t>(feats));
        for (double& v : x) v = uniform(rng, -1, 1);
        auto group = sample_group(sampler, ref, x, 6,
                                  static_cast<std::uint64_t>(accepted) + 7,
                                  "acc");
        std::vector<double> rewards;
        for (auto& c : group.candidates) {
            c.reward = uniform(rng, 0.0, 1.0);
            rewards.push_back(c.reward);
        }
        const auto adv = normalize_advantages(rewards, cfg.advantage_eps, true);
        for (std::size_t i = 0; i < adv.size(); ++i) {
            group.candidates[i].advantage = adv[i];
        }
        const auto logp_now = policy.log_probs(group.features);
        bool near_kink = false;
        for (const auto& c : group.candidates) {
            const double ratio =
                std::exp(logp_now[static_cast<std::size_t>(c.action)] -
                         c.logp_current);
            if (std::abs(ratio - (1.0 - cfg.clip_ratio)) < 1e-3 ||
                std::abs(ratio - (1.0 + cfg.clip_ratio)) < 1e-3) {
                near_kink = true;
            }
        }
        if (near_kink) continue;

        const auto grad = surrogate_gradient(group, policy, ref, cfg);
        for (int a = 0; a < policy.num_actions(); ++a) {
            for (int f = 0; f < feats; ++f) {
                ToyPolicy plus = policy;
                plus.weight(a, f) += h;
                ToyPolicy minus = policy;
                minus.weight(a, f) -= h;
                const double fd =
                    (surrogate_objective(group, plus, ref, cfg) -
                     surrogate_objective(group, minus, ref, cfg)) /
                    (2.0 * h);
                const double analytic =
                    grad[static_cast<std::size_t>(a * feats + f)];
                const double rel =
                    std::abs(analytic - fd) /
                    std::max({std::abs(fd), std::abs(analytic), 1e-6});
                require(rel < 1e-4,
                        "gradient mismatch beyond relative 1e-4");
            }
        }
        ++accepted;
    }
}

void curriculum_behavior() {
    using namespace geoadapt;
    int stage2_improved = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto t0 = std::chrono::steady_clock::now();

        config::RunConfig cfg;
        cfg.seed = seed;
        const auto world = world::make_world(cfg.world_params());
        require(world.images.size() == 200, "bundled world must hold 200 images");
        grpo::ToyPolicy policy(world.num_cells, world.feature_dim);

        grpo::CurriculumConfig cc = cfg.curriculum_config();
        const auto result =
            grpo::run_curriculum(world, policy, cc, cfg.reward_params());

        const double acc =
            grpo::depth_accuracy(policy, world, world.holdout_indices);
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "seed %llu: held-out depth accuracy %.3f <= 0.9",
                      static_cast<unsigned long long>(seed), acc);
        require(acc > 0.9, msg);

        require(result.stage2.size() == 2, "stage 2 must run 2 epochs");
        if (result.stage2.back().mean_reward >=
            result.stage2.front().mean_reward) {
            ++stage2_improved;
        }

        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        std::snprintf(msg, sizeof(msg),
                      "seed %llu: curriculum took %.1fs (budget 60s)",
                      static_cast<unsigned long long>(seed), seconds);
        require(seconds < 60.0, msg);
    }
    char msg[96];
    std::snprintf(msg, sizeof(msg),
                  "stage-2 mean R_geo improved on %d of 5 seeds (need >= 4)",
                  stage2_improved);
    require(stage2_improved >= 4, msg);
}

void curation_pipeline_oracle() {
    TempDir tmp;
    geoadapt::config::RunConfig cfg;
    cfg.dataset_in = kDataDir + "/dataset_12.jsonl";
    cfg.standard_out = tmp.file("standard.jsonl");
    cfg.rag_superior_out = tmp.file("rag_superior.jsonl");
    cfg.summary_out = tmp.file("summary.json");
    geoadapt::commands::run_curate(cfg);

    const std::string golden_dir = kDataDir + "/golden";
    require(slurp(cfg.standard_out) ==
                slurp(golden_dir + "/curate_standard.jsonl"),
            "standard subset drifted from the golden file");
    require(slurp(cfg.rag_superior_out) ==
                slurp(golden_dir + "/curate_rag_superior.jsonl"),
            "rag-superior subset drifted from the golden file");
    require(slurp(cfg.summary_out) == slurp(golden_dir + "/curate_summary.json"),
            "curation summary drifted from the golden file");
}

void metric_oracle() {
    using namespace geoadapt;
    using evalharness::EvalRecord;
    std::mt19937_64 rng(515151);
    const text::NameNormalizer names;
    const char* cities[] = {"Paris", "Lyon", "Unknown"};
    const char* countries[] = {"France", "Spain", "Unknown"};

    for (int trial = 0; trial < 25; ++trial) {
        std::vector<EvalRecord> recs;
        const int n = 50;
        for (int i = 0; i < n; ++i) {
            EvalRecord r;
            r.image_id = "r" + std::to_string(i);
            r.truth = {"France", "Paris",
                       geodesy::GeoCoord(uniform(rng, -80, 80),
                                         uniform(rng, -180, 180))};
            r.predicted = {countries[static_cast<int>(uniform(rng, 0, 3)) % 3],
                           cities[static_cast<int>(uniform(rng, 0, 3)) % 3],
                           geodesy::GeoCoord(uniform(rng, -80, 80),
                                             uniform(rng, -180, 180))};
            recs.push_back(r);
        }
        const auto report = evalharness::compute_report(recs, names);

        // independent brute-force recount (atan2 haversine form)
        std::array<std::size_t, 5> hits{};
        std::size_t city_hits = 0, country_hits = 0;
        for (const auto& r : recs) {
            const double rad = geodesy::kPi / 180.0;
            const double sdlat = std::sin(
                (r.truth.coord.lat() - r.predicted.coord.lat()) * rad / 2.0);
            const double sdlon = std::sin(
                (r.truth.coord.lon() - r.predicted.coord.lon()) * rad / 2.0);
            const double h =
                sdlat * sdlat + std::cos(r.predicted.coord.lat() * rad) *
                                    std::cos(r.truth.coord.lat() * rad) *
                                    sdlon * sdlon;
            const double d = 2.0 * geodesy::kEarthRadiusKm *
                             std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
            for (std::size_t t = 0; t < evalharness::kThresholdsKm.size();
                 ++t) {
                if (d <= evalharness::kThresholdsKm[t]) ++hits[t];
            }
            if (names.names_match(r.predicted.city, r.truth.city)) ++city_hits;
            if (names.names_match(r.predicted.country, r.truth.country)) {
                ++country_hits;
            }
        }
        for (std::size_t t = 0; t < hits.size(); ++t) {
            const double expect = 100.0 * static_cast<double>(hits[t]) /
                                  static_cast<double>(n);
            require(report.threshold_acc[t] == expect,
                    "threshold accuracy differs from the brute-force count");
        }
        require(report.city_acc == 100.0 * static_cast<double>(city_hits) /
                                       static_cast<double>(n),
                "city accuracy differs from the brute-force count");
        require(report.country_acc ==
                    100.0 * static_cast<double>(country_hits) /
                        static_cast<double>(n),
                "country accuracy differs from the brute-force count");
        for (std::size_t t = 1; t < hits.size(); ++t) {
            require(report.threshold_acc[t] >= report.threshold_acc[t - 1],
                    "threshold accuracies must be monotone");
        }
    }

    // committed golden: csv rendering of the shared 4-record fixture
    const auto batch =
        geoadapt::records::read_eval_file(kDataDir + "/eval_4.jsonl", false);
    const auto report = evalharness::compute_report(batch.records, names);
    const std::string csv =
        evalharness::emit_report(report, evalharness::ReportFormat::csv);
    require(csv == slurp(kDataDir + "/golden/eval_4.csv"),
            "eval csv drifted from the golden file");
}

void determinism_all_subcommands() {
    using geoadapt::commands::CommandOutcome;
    using geoadapt::config::RunConfig;
    TempDir tmp;

    struct Step {
        const char* name;
        std::function<CommandOutcome(const RunConfig&)> fn;
        RunConfig cfg;
        std::vector<std::string> outputs;
    };
    std::vector<Step> steps;

    {
        Step s{"score", geoadapt::commands::run_score, {}, {}};
        s.cfg.dataset_in = kDataDir + "/dataset_12.jsonl";
        s.cfg.dataset_out = tmp.file("score.jsonl");
        s.cfg.plot = true;
        s.cfg.plot_out = tmp.file("score_hist.svg");
        s.outputs = {s.cfg.dataset_out, s.cfg.plot_out};
        steps.push_back(std::move(s));
    }
    {
        Step s{"stratify", geoadapt::commands::run_stratify, {}, {}};
        s.cfg.dataset_in = kDataDir + "/dataset_12.jsonl";
        s.cfg.standard_out = tmp.file("str_std.jsonl");
        s.cfg.rag_superior_out = tmp.file("str_rs.jsonl");
        s.cfg.summary_out = tmp.file("str_summary.json");
        s.outputs = {s.cfg.standard_out, s.cfg.rag_superior_out,
                     s.cfg.summary_out};
        steps.push_back(std::move(s));
    }
    {
        Step s{"curate", geoadapt::commands::run_curate, {}, {}};
        s.cfg.dataset_in = kDataDir + "/dataset_12.jsonl";
        s.cfg.standard_out = tmp.file("cur_std.jsonl");
        s.cfg.rag_superior_out = tmp.file("cur_rs.jsonl");
        s.cfg.summary_out = tmp.file("cur_summary.json");
        s.outputs = {s.cfg.standard_out, s.cfg.rag_superior_out,
                     s.cfg.summary_out};
        steps.push_back(std::move(s));
    }
    {
        Step s{"reward", geoadapt::commands::run_reward, {}, {}};
        s.cfg.dataset_in = kDataDir + "/reward_dataset.jsonl";
        s.cfg.predictions_in = kDataDir + "/reward_predictions.jsonl";
        s.cfg.grounding_table = kDataDir + "/grounding.tsv";
        s.cfg.alias_table = kDataDir + "/aliases.tsv";
        s.cfg.rewards_out = tmp.file("rewards.jsonl");
        s.cfg.plot = true;
        s.cfg.plot_out = tmp.file("reward_surface.svg");
        s.outputs = {s.cfg.rewards_out, s.cfg.plot_out};
        steps.push_back(std::move(s));
    }
    {
        Step s{"train-toy", geoadapt::commands::run_train_toy, {}, {}};
        s.cfg.world_images = 60;
        s.cfg.seed = 42;
        s.cfg.trace_out = tmp.file("trace.jsonl");
        s.cfg.policy_out = tmp.file("policy.txt");
        s.outputs = {s.cfg.trace_out, s.cfg.policy_out};
        steps.push_back(std::move(s));
    }
    {
        Step s{"eval", geoadapt::commands::run_eval, {}, {}};
        s.cfg.predictions_in = kDataDir + "/eval_4.jsonl";
        s.cfg.report_format = "csv";
        s.cfg.report_out = tmp.file("report.csv");
        s.outputs = {s.cfg.report_out};
        steps.push_back(std::move(s));
    }
    {
        Step s{"report", geoadapt::commands::run_report, {}, {}};
        // render the eval json report into a table
        RunConfig eval_cfg;
        eval_cfg.predictions_in = kDataDir + "/eval_4.jsonl";
        eval_cfg.report_format = "json";
        eval_cfg.report_out = tmp.file("report.json");
        geoadapt::commands::run_eval(eval_cfg);
        s.cfg.report_in = eval_cfg.report_out;
        s.cfg.report_format = "table";
        s.cfg.report_out = tmp.file("report.txt");
        s.outputs = {s.cfg.report_out};
        steps.push_back(std::move(s));
    }

    for (auto& step : steps) {
        const auto first = step.fn(step.cfg);
        std::vector<std::string> snapshots;
        for (const auto& out : step.outputs) snapshots.push_back(slurp(out));
        const auto second = step.fn(step.cfg);
        require(first.summary == second.summary,
                std::string(step.name) + ": summary differs across reruns");
        for (std::size_t i = 0; i < step.outputs.size(); ++i) {
            require(slurp(step.outputs[i]) == snapshots[i],
                    std::string(step.name) + ": output " + step.outputs[i] +
                        " differs across reruns");
        }
    }
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        void (*fn)();
        double budget_seconds;
    };
    const std::vector<Criterion> criteria{
        {"closed-form reward fidelity", closed_form_reward_fidelity, 1.0},
        {"locatability bound suite (10k tuples)", locatability_bound_suite,
         5.0},
        {"default hyper-parameter fidelity", default_hyperparameter_fidelity, 0.0},
        {"grpo numeric suite", grpo_numeric_suite, 10.0},
        {"curriculum behavior (5 seeds)", curriculum_behavior, 0.0},
        {"curation pipeline oracle", curation_pipeline_oracle, 0.0},
        {"metric oracle", metric_oracle, 0.0},
        {"determinism of all subcommands", determinism_all_subcommands, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.fn();
        } catch (const Failure& f) {
            error = f.message;
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (error.empty() && c.budget_seconds > 0.0 &&
            seconds >= c.budget_seconds) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "runtime %.2fs exceeds %.0fs budget",
                          seconds, c.budget_seconds);
            error = buf;
        }
        if (error.empty()) {
            std::printf("[PASS] %s (%.2fs)\n", c.name, seconds);
        } else {
            std::printf("[FAIL] %s (%.2fs): %s\n", c.name, seconds,
                        error.c_str());
            ++failures;
        }
    }
    if (failures) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
