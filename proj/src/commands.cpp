#include "geoadapt/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "geoadapt/curation.hpp"
#include "geoadapt/errors.hpp"
#include "geoadapt/evalharness.hpp"
#include "geoadapt/grpo.hpp"
#include "geoadapt/records.hpp"
#include "geoadapt/svg_plot.hpp"

namespace geoadapt::commands {

using nlohmann::json;

namespace {

json rejected_to_json(const std::vector<records::RejectedLine>& rejected) {
    json arr = json::array();
    for (const auto& r : rejected) {
        json j;
        if (r.line) j["line"] = r.line;
        if (!r.image_id.empty()) j["image_id"] = r.image_id;
        j["reason"] = r.reason;
        arr.push_back(j);
    }
    return arr;
}

std::vector<std::size_t> l_opt_histogram(
    const std::vector<records::DatasetRecord>& recs) {
    std::vector<std::size_t> bins(10, 0);
    for (const auto& r : recs) {
        if (!r.scores) continue;
        const double v = r.scores->l_opt;
        const auto bin = std::min<std::size_t>(
            9, static_cast<std::size_t>(std::floor(v * 10.0)));
        ++bins[bin];
    }
    return bins;
}

// score + stratum for every record that carries distances
struct ScoredBatch {
    std::vector<records::DatasetRecord> records;
    std::vector<records::RejectedLine> rejected;
};

ScoredBatch load_and_score(const config::RunConfig& cfg) {
    auto batch = records::read_dataset_file(cfg.dataset_in, cfg.lenient);
    const auto params = cfg.locatability_params();
    ScoredBatch out;
    out.rejected = std::move(batch.rejected);
    for (auto& rec : batch.records) {
        if (!rec.has_distances()) {
            if (!cfg.lenient) {
                throw ValidationError("record '" + rec.image_id +
                                      "' is missing d_rag/d_reason");
            }
            out.rejected.push_back({0, rec.image_id, "missing d_rag/d_reason"});
            continue;
        }
        const auto d = rec.distances();
        rec.scores = locatability::score_record(rec.l_visual, d, params);
        rec.stratum = locatability::stratum_label(d, params.tau_margin_km);
        out.records.push_back(std::move(rec));
    }
    return out;
}

void require(const std::string& value, const char* key) {
    if (value.empty()) {
        throw ValidationError(std::string("config key '") + key +
                              "' must be set for this command");
    }
}

void sort_by_image_id(std::vector<records::DatasetRecord>& recs) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto& a, const auto& b) {
                         return a.image_id < b.image_id;
                     });
}

std::string default_plot_path(const config::RunConfig& cfg,
                              const std::string& anchor, const char* suffix) {
    if (!cfg.plot_out.empty()) return cfg.plot_out;
    return anchor + suffix;
}

text::NameNormalizer make_normalizer(const config::RunConfig& cfg) {
    text::NameNormalizer names;
    if (!cfg.alias_table.empty()) names.load_alias_file(cfg.alias_table);
    return names;
}

}  // namespace

CommandOutcome run_score(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.dataset_in, "dataset_in");
    require(cfg.dataset_out, "dataset_out");

    const ScoredBatch scored = load_and_score(cfg);
    std::vector<json> lines;
    lines.reserve(scored.records.size());
    for (const auto& rec : scored.records) {
        lines.push_back(records::to_json(rec));
    }
    records::write_jsonl(cfg.dataset_out, lines);

    if (cfg.plot) {
        plot::write_file(
            default_plot_path(cfg, cfg.dataset_out, ".lopt_hist.svg"),
            plot::histogram_svg(l_opt_histogram(scored.records),
                                "L_opt histogram"));
    }

    json summary;
    summary["command"] = "score";
    summary["accepted"] = scored.records.size();
    summary["rejected"] = rejected_to_json(scored.rejected);
    return {summary.dump() + "\n", false};
}

CommandOutcome run_stratify(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.dataset_in, "dataset_in");
    require(cfg.standard_out, "standard_out");
    require(cfg.rag_superior_out, "rag_superior_out");

    ScoredBatch scored = load_and_score(cfg);
    auto split = curation::stratify(std::move(scored.records),
                                    cfg.locatability_params());
    if (!cfg.lenient && !split.rejected.empty()) {
        throw ValidationError("record '" + split.rejected.front().image_id +
                              "' rejected: " + split.rejected.front().reason);
    }
    sort_by_image_id(split.standard);
    sort_by_image_id(split.rag_superior);

    std::vector<json> std_lines, rs_lines;
    for (const auto& rec : split.standard) {
        std_lines.push_back(records::to_json(rec));
    }
    for (const auto& rec : split.rag_superior) {
        rs_lines.push_back(records::to_json(rec));
    }
    records::write_jsonl(cfg.standard_out, std_lines);
    records::write_jsonl(cfg.rag_superior_out, rs_lines);

    std::vector<records::RejectedLine> all_rejected = scored.rejected;
    all_rejected.insert(all_rejected.end(), split.rejected.begin(),
                        split.rejected.end());

    std::vector<records::DatasetRecord> accepted;
    accepted.insert(accepted.end(), split.standard.begin(),
                    split.standard.end());
    accepted.insert(accepted.end(), split.rag_superior.begin(),
                    split.rag_superior.end());

    json summary;
    summary["command"] = "stratify";
    summary["standard"] = split.standard.size();
    summary["rag_superior"] = split.rag_superior.size();
    summary["stripped_candidates"] = split.stripped_candidates;
    summary["rejected"] = rejected_to_json(all_rejected);
    summary["l_opt_histogram"] = l_opt_histogram(accepted);
    if (!cfg.summary_out.empty()) {
        plot::write_file(cfg.summary_out, summary.dump() + "\n");
    }
    return {summary.dump() + "\n", false};
}

CommandOutcome run_curate(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.dataset_in, "dataset_in");
    require(cfg.standard_out, "standard_out");
    require(cfg.rag_superior_out, "rag_superior_out");

    ScoredBatch scored = load_and_score(cfg);
    auto split = curation::stratify(std::move(scored.records),
                                    cfg.locatability_params());
    if (!cfg.lenient && !split.rejected.empty()) {
        throw ValidationError("record '" + split.rejected.front().image_id +
                              "' rejected: " + split.rejected.front().reason);
    }
    sort_by_image_id(split.standard);
    sort_by_image_id(split.rag_superior);

    curation::CurationParams params;
    params.loc = cfg.locatability_params();
    params.step_threshold = cfg.step_threshold;
    params.min_support = cfg.min_support;
    const curation::AcceptAllVerification verifier;

    curation::AugmentStats stats;
    std::vector<json> rs_lines;
    for (auto& rec : split.rag_superior) {
        rec = curation::augment_record(std::move(rec), params, verifier, &stats);
        rs_lines.push_back(records::to_json(rec));
    }
    std::vector<json> std_lines;
    for (const auto& rec : split.standard) {
        std_lines.push_back(records::to_json(rec));
    }
    records::write_jsonl(cfg.standard_out, std_lines);
    records::write_jsonl(cfg.rag_superior_out, rs_lines);

    std::vector<records::DatasetRecord> accepted;
    accepted.insert(accepted.end(), split.standard.begin(),
                    split.standard.end());
    accepted.insert(accepted.end(), split.rag_superior.begin(),
                    split.rag_superior.end());
    const auto hist = l_opt_histogram(accepted);

    std::vector<records::RejectedLine> all_rejected = scored.rejected;
    all_rejected.insert(all_rejected.end(), split.rejected.begin(),
                        split.rejected.end());

    json summary;
    summary["command"] = "curate";
    summary["standard"] = split.standard.size();
    summary["rag_superior"] = split.rag_superior.size();
    summary["stripped_candidates"] = split.stripped_candidates;
    summary["rejected"] = rejected_to_json(all_rejected);
    summary["implicit_steps"] = stats.implicit_steps;
    summary["removed_steps"] = stats.removed_steps;
    summary["validated_steps"] = stats.validated_steps;
    summary["merged_steps"] = stats.merged_steps;
    summary["l_opt_histogram"] = hist;
    if (!cfg.summary_out.empty()) {
        plot::write_file(cfg.summary_out, summary.dump() + "\n");
    }
    if (cfg.plot) {
        plot::write_file(
            default_plot_path(cfg, cfg.rag_superior_out, ".lopt_hist.svg"),
            plot::histogram_svg(hist, "L_opt histogram"));
    }
    return {summary.dump() + "\n", false};
}

CommandOutcome run_reward(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.dataset_in, "dataset_in");
    require(cfg.predictions_in, "predictions_in");
    require(cfg.rewards_out, "rewards_out");

    const auto dataset = records::read_dataset_file(cfg.dataset_in, cfg.lenient);
    auto predictions =
        records::read_prediction_file(cfg.predictions_in, cfg.lenient);

    rewards::TableGroundingProvider grounding;
    if (!cfg.grounding_table.empty()) grounding.load_file(cfg.grounding_table);
    const text::NameNormalizer names = make_normalizer(cfg);
    text::EntityExtractor extractor;
    grounding.for_each_entity(
        [&](std::string_view e) { extractor.add_gazetteer_entry(e); });

    std::unordered_map<std::string, const records::DatasetRecord*> by_id;
    for (const auto& rec : dataset.records) by_id[rec.image_id] = &rec;

    const auto reward_params = cfg.reward_params();
    const auto loc_params = cfg.locatability_params();

    std::vector<records::RejectedLine> rejected = dataset.rejected;
    rejected.insert(rejected.end(), predictions.rejected.begin(),
                    predictions.rejected.end());

    std::vector<json> lines;
    for (const auto& pred : predictions.records) {
        const auto it = by_id.find(pred.image_id);
        std::optional<std::string> problem;
        if (it == by_id.end()) {
            problem = "no dataset record for prediction";
        } else if (!it->second->has_distances()) {
            problem = "dataset record is missing d_rag/d_reason";
        }
        if (problem) {
            if (!cfg.lenient) {
                throw ValidationError("prediction '" + pred.image_id +
                                      "': " + *problem);
            }
            rejected.push_back({0, pred.image_id, *problem});
            continue;
        }
        const auto& rec = *it->second;

        // reference entities come from the curated trajectory
        text::EntitySet reference;
        const auto& steps = rec.augmented_steps ? *rec.augmented_steps
                                                : rec.standard_steps;
        for (const auto& step : steps) {
            if (step.entities.empty()) {
                for (const auto& e : extractor.extract(step.text).items()) {
                    reference.insert(e);
                }
            } else {
                for (const auto& e : step.entities) reference.insert(e);
            }
        }

        const text::EntitySet predicted_entities =
            pred.entities ? text::EntitySet(*pred.entities)
                          : extractor.extract(pred.rationale);

        rewards::RewardBreakdown b;
        const int true_label =
            locatability::stratum_label(rec.distances(),
                                        loc_params.tau_margin_km) ==
                    locatability::Stratum::rag_superior
                ? 1
                : 0;
        b.r_depth = rewards::depth_reward(pred.predicted_label, true_label);
        const auto vis = rewards::visual_reward(predicted_entities, reference,
                                                pred.image_id, grounding);
        b.r_grounding = vis.grounding;
        b.r_alignment = vis.alignment;
        b.r_vis = vis.vis;
        b.no_entities = vis.no_entities;
        const double d = geodesy::haversine_km(pred.predicted.coord,
                                               rec.ground_truth.coord);
        b.r_coord = rewards::coord_reward(d, reward_params.sigma_km);
        b.r_geo = rewards::hierarchical_geo_reward(pred.predicted,
                                                   rec.ground_truth,
                                                   reward_params, names);
        b.r_stage1 = rewards::stage1_reward(b, reward_params);
        b.r_stage2 = rewards::stage2_reward(b);

        json j;
        j["image_id"] = pred.image_id;
        j["r_depth"] = b.r_depth;
        j["r_grounding"] = b.r_grounding;
        j["r_alignment"] = b.r_alignment;
        j["r_vis"] = b.r_vis;
        j["no_entities"] = b.no_entities;
        j["r_coord"] = b.r_coord;
        j["r_geo"] = b.r_geo;
        j["r_stage1"] = b.r_stage1;
        j["r_stage2"] = b.r_stage2;
        lines.push_back(std::move(j));
    }
    records::write_jsonl(cfg.rewards_out, lines);

    if (cfg.plot) {
        plot::write_file(
            default_plot_path(cfg, cfg.rewards_out, ".reward_surface.svg"),
            plot::reward_surface_svg(reward_params));
    }

    json summary;
    summary["command"] = "reward";
    summary["scored"] = lines.size();
    summary["rejected"] = rejected_to_json(rejected);
    return {summary.dump() + "\n", false};
}

CommandOutcome run_train_toy(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.trace_out, "trace_out");
    require(cfg.policy_out, "policy_out");

    const auto world = world::make_world(cfg.world_params());
    grpo::ToyPolicy policy(world.num_cells, world.feature_dim);
    const auto curriculum_cfg = cfg.curriculum_config();

    grpo::CurriculumResult result;
    try {
        result = grpo::run_curriculum(world, policy, curriculum_cfg,
                                      cfg.reward_params());
    } catch (const NumericError& e) {
        throw NumericError(std::string("train-toy aborted: ") + e.what());
    }

    std::vector<json> trace_lines;
    for (const auto* stage : {&result.stage1, &result.stage2}) {
        for (const auto& s : *stage) {
            json j;
            j["stage"] = s.stage;
            j["epoch"] = s.epoch;
            j["mean_reward"] = s.mean_reward;
            j["mean_kl"] = s.mean_kl;
            j["objective"] = s.objective;
            trace_lines.push_back(std::move(j));
        }
    }
    records::write_jsonl(cfg.trace_out, trace_lines);
    plot::write_file(cfg.policy_out, policy.serialize());

    json summary;
    summary["command"] = "train-toy";
    summary["seed"] = cfg.seed;
    summary["holdout_depth_accuracy"] =
        grpo::depth_accuracy(policy, world, world.holdout_indices);
    if (!result.stage2.empty()) {
        summary["stage2_first_mean_reward"] = result.stage2.front().mean_reward;
        summary["stage2_final_mean_reward"] = result.stage2.back().mean_reward;
    }
    return {summary.dump() + "\n", false};
}

CommandOutcome run_eval(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.predictions_in, "predictions_in");
    const auto format = evalharness::format_from_string(cfg.report_format);

    auto batch = records::read_eval_file(cfg.predictions_in, cfg.lenient);
    const text::NameNormalizer names = make_normalizer(cfg);
    const auto report = evalharness::compute_report(batch.records, names);
    const std::string rendered = evalharness::emit_report(report, format);

    if (!cfg.report_out.empty()) {
        plot::write_file(cfg.report_out, rendered);
    }

    CommandOutcome outcome;
    outcome.rejected_records = !batch.rejected.empty();
    if (!cfg.report_out.empty()) {
        json summary;
        summary["command"] = "eval";
        summary["records"] = report.records;
        summary["rejected"] = rejected_to_json(batch.rejected);
        outcome.summary = summary.dump() + "\n";
    } else {
        outcome.summary = rendered;
    }
    return outcome;
}

CommandOutcome run_report(const config::RunConfig& cfg) {
    cfg.check();
    require(cfg.report_in, "report_in");
    const auto format = evalharness::format_from_string(cfg.report_format);

    std::ifstream in(cfg.report_in);
    if (!in) throw IoError("cannot open report file: " + cfg.report_in);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    const auto report = evalharness::report_from_json_text(content);
    const std::string rendered = evalharness::emit_report(report, format);

    if (!cfg.report_out.empty()) {
        plot::write_file(cfg.report_out, rendered);
        json summary;
        summary["command"] = "report";
        return {summary.dump() + "\n", false};
    }
    return {rendered, false};
}

}  // namespace geoadapt::commands
