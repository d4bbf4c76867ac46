#include "geoadapt/curation.hpp"

#include <algorithm>
#include <set>

#include "geoadapt/errors.hpp"
#include "geoadapt/text_norm.hpp"

namespace geoadapt::curation {

StratifyResult stratify(std::vector<DatasetRecord> records,
                        const locatability::LocatabilityParams& params) {
    locatability::validate(params);
    StratifyResult out;
    for (auto& rec : records) {
        if (!rec.has_distances()) {
            out.rejected.push_back({0, rec.image_id, "missing d_rag/d_reason"});
            continue;
        }
        const Stratum label =
            locatability::stratum_label(rec.distances(), params.tau_margin_km);
        if (label == Stratum::rag_superior && rec.candidate_ids.size() != 3) {
            out.rejected.push_back(
                {0, rec.image_id,
                 "rag-superior record must carry exactly 3 candidate_ids, has " +
                     std::to_string(rec.candidate_ids.size())});
            continue;
        }
        if (label == Stratum::standard && !rec.candidate_ids.empty()) {
            rec.candidate_ids.clear();
            rec.candidate_steps.clear();
            for (auto& step : rec.standard_steps) {
                step.confidence_per_candidate.clear();
            }
            ++out.stripped_candidates;
        }
        rec.stratum = label;
        if (label == Stratum::rag_superior) {
            out.rag_superior.push_back(std::move(rec));
        } else {
            out.standard.push_back(std::move(rec));
        }
    }
    return out;
}

StepClass classify_step(const ReasoningStep& step, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ValidationError("step threshold must lie in [0, 1]");
    }
    if (!step.own_image_confidence) {
        throw ValidationError("step '" + step.text +
                              "' has no own_image_confidence");
    }
    return *step.own_image_confidence < threshold ? StepClass::implicit
                                                  : StepClass::explicit_removed;
}

bool validate_implicit(const ReasoningStep& step,
                       const std::vector<std::string>& candidate_ids,
                       double threshold, int min_support) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ValidationError("step threshold must lie in [0, 1]");
    }
    if (min_support < 1) {
        throw ValidationError("min_support must be at least 1");
    }
    if (candidate_ids.size() < 3) {
        throw ValidationError("validation requires 3 candidates, record has " +
                              std::to_string(candidate_ids.size()));
    }
    int applies = 0;
    for (const auto& id : candidate_ids) {
        const auto it = step.confidence_per_candidate.find(id);
        if (it == step.confidence_per_candidate.end()) {
            throw ValidationError("step '" + step.text +
                                  "' lacks a confidence for candidate '" + id +
                                  "'");
        }
        if (it->second >= threshold) ++applies;
    }
    return applies >= min_support;
}

namespace {

std::set<std::string> entity_keys(const ReasoningStep& step) {
    std::set<std::string> keys;
    for (const auto& e : step.entities) {
        std::string k = text::fold(e);
        if (!k.empty()) keys.insert(std::move(k));
    }
    return keys;
}

bool shares_entity(const std::set<std::string>& a,
                   const std::set<std::string>& b) {
    for (const auto& k : a) {
        if (b.count(k)) return true;
    }
    return false;
}

}  // namespace

DatasetRecord merge_trajectories(DatasetRecord record,
                                 const std::vector<ReasoningStep>& validated) {
    if (!record.stratum || *record.stratum != Stratum::rag_superior) {
        throw ValidationError("cannot merge into non-rag-superior record '" +
                              record.image_id + "'");
    }

    const std::size_t n = record.standard_steps.size();
    std::vector<std::set<std::string>> standard_entities;
    standard_entities.reserve(n);
    std::set<std::string> seen_texts;
    for (const auto& s : record.standard_steps) {
        standard_entities.push_back(entity_keys(s));
        seen_texts.insert(text::fold(s.text));
    }

    // anchor = index of last standard step sharing an entity; n means "end"
    std::vector<std::vector<const ReasoningStep*>> inserts(n + 1);
    for (const auto& step : validated) {
        const std::string key = text::fold(step.text);
        if (!seen_texts.insert(key).second) continue;
        const auto ents = entity_keys(step);
        std::size_t anchor = n;
        if (!ents.empty()) {
            for (std::size_t i = n; i-- > 0;) {
                if (shares_entity(ents, standard_entities[i])) {
                    anchor = i;
                    break;
                }
            }
        }
        inserts[anchor == n ? n : anchor].push_back(&step);
    }

    std::vector<ReasoningStep> augmented;
    augmented.reserve(n + validated.size());
    for (std::size_t i = 0; i < n; ++i) {
        augmented.push_back(record.standard_steps[i]);
        for (const ReasoningStep* s : inserts[i]) augmented.push_back(*s);
    }
    for (const ReasoningStep* s : inserts[n]) augmented.push_back(*s);

    record.augmented_steps = std::move(augmented);
    return record;
}

DatasetRecord augment_record(DatasetRecord record, const CurationParams& params,
                             const VerificationProvider& verifier,
                             AugmentStats* stats) {
    std::vector<ReasoningStep> implicit;
    for (const auto& step : record.candidate_steps) {
        StepClass cls = classify_step(step, params.step_threshold);
        if (cls == StepClass::explicit_removed &&
            !verifier.confirm_removal(step, record.image_id)) {
            cls = StepClass::implicit;
        }
        if (cls == StepClass::implicit) {
            if (stats) ++stats->implicit_steps;
            implicit.push_back(step);
        } else if (stats) {
            ++stats->removed_steps;
        }
    }

    std::vector<ReasoningStep> validated;
    for (const auto& step : implicit) {
        if (validate_implicit(step, record.candidate_ids, params.step_threshold,
                              params.min_support)) {
            validated.push_back(step);
        }
    }
    if (stats) stats->validated_steps += validated.size();

    const std::size_t before = record.standard_steps.size();
    record = merge_trajectories(std::move(record), validated);
    if (stats) stats->merged_steps += record.augmented_steps->size() - before;
    return record;
}

}  // namespace geoadapt::curation
