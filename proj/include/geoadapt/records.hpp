#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoadapt/locatability.hpp"
#include "geoadapt/rewards.hpp"

namespace geoadapt::records {

// One step of a reasoning trajectory. confidence_per_candidate carries the
// grounding confidence of this step on each retrieved candidate image;
// own_image_confidence is the confidence on the record's own image.
struct ReasoningStep {
    std::string text;
    std::vector<std::string> entities;
    std::map<std::string, double> confidence_per_candidate;
    std::optional<double> own_image_confidence;
};

// Curation-side record, one JSON object per line in a dataset file.
// candidate_steps is the candidate-derived cue pool consumed by the
// augmentation pipeline; rag-superior records only.
struct DatasetRecord {
    std::string image_id;
    double l_visual = 0.0;
    rewards::GeoLocation ground_truth;
    std::optional<double> d_rag;
    std::optional<double> d_reason;
    std::vector<std::string> candidate_ids;
    std::vector<ReasoningStep> standard_steps;
    std::vector<ReasoningStep> candidate_steps;
    std::optional<locatability::Stratum> stratum;
    std::optional<std::vector<ReasoningStep>> augmented_steps;
    std::optional<locatability::LocatabilityResult> scores;

    locatability::DistancePair distances() const;
    bool has_distances() const { return d_rag && d_reason; }
};

// Prediction/ground-truth pairing for metric computation.
struct EvalRecord {
    std::string image_id;
    rewards::GeoLocation predicted;
    rewards::GeoLocation truth;
};

// Model output consumed by the reward pipeline. Entities, when present,
// bypass rule-based extraction from the rationale.
struct PredictionRecord {
    std::string image_id;
    int predicted_label = 0;
    std::string rationale;
    std::optional<std::vector<std::string>> entities;
    rewards::GeoLocation predicted;
};

struct RejectedLine {
    std::size_t line = 0;
    std::string image_id;
    std::string reason;
};

template <typename T>
struct JsonlBatch {
    std::vector<T> records;
    std::vector<RejectedLine> rejected;
};

nlohmann::json to_json(const rewards::GeoLocation& loc);
nlohmann::json to_json(const ReasoningStep& step);
nlohmann::json to_json(const DatasetRecord& rec);

rewards::GeoLocation geolocation_from_json(const nlohmann::json& j);
ReasoningStep step_from_json(const nlohmann::json& j);
DatasetRecord dataset_record_from_json(const nlohmann::json& j);
EvalRecord eval_record_from_json(const nlohmann::json& j);
PredictionRecord prediction_record_from_json(const nlohmann::json& j);

// Strict mode throws ParseError at the first bad line; lenient mode collects
// it and moves on. Duplicate image ids within one file are rejected.
JsonlBatch<DatasetRecord> read_dataset_file(const std::string& path,
                                            bool lenient);
JsonlBatch<EvalRecord> read_eval_file(const std::string& path, bool lenient);
JsonlBatch<PredictionRecord> read_prediction_file(const std::string& path,
                                                  bool lenient);

void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::json>& lines);

}  // namespace geoadapt::records
