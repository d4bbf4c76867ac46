#include "geoadapt/records.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "geoadapt/errors.hpp"

namespace geoadapt::records {

using nlohmann::json;

namespace {

double finite_number(const json& j, const char* field) {
    if (!j.is_number()) {
        throw ParseError(std::string(field) + " must be a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ParseError(std::string(field) + " must be finite");
    }
    return v;
}

double unit_interval(const json& j, const char* field) {
    const double v = finite_number(j, field);
    if (v < 0.0 || v > 1.0) {
        throw ParseError(std::string(field) + " = " + std::to_string(v) +
                         " outside [0, 1]");
    }
    return v;
}

double non_negative(const json& j, const char* field) {
    const double v = finite_number(j, field);
    if (v < 0.0) {
        throw ParseError(std::string(field) + " must be non-negative");
    }
    return v;
}

std::string required_string(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string()) {
        throw ParseError(std::string("missing string field '") + field + "'");
    }
    return j[field].get<std::string>();
}

std::vector<ReasoningStep> steps_from_json(const json& j, const char* field) {
    std::vector<ReasoningStep> steps;
    if (!j.is_array()) {
        throw ParseError(std::string(field) + " must be an array");
    }
    steps.reserve(j.size());
    for (const auto& s : j) steps.push_back(step_from_json(s));
    return steps;
}

json steps_to_json(const std::vector<ReasoningStep>& steps) {
    json arr = json::array();
    for (const auto& s : steps) arr.push_back(to_json(s));
    return arr;
}

}  // namespace

locatability::DistancePair DatasetRecord::distances() const {
    if (!has_distances()) {
        throw ValidationError("record '" + image_id +
                              "' is missing d_rag/d_reason");
    }
    return {*d_rag, *d_reason};
}

json to_json(const rewards::GeoLocation& loc) {
    return json{{"country", loc.country},
                {"city", loc.city},
                {"coord", {{"lat", loc.coord.lat()}, {"lon", loc.coord.lon()}}}};
}

json to_json(const ReasoningStep& step) {
    json j;
    j["text"] = step.text;
    if (!step.entities.empty()) j["entities"] = step.entities;
    if (!step.confidence_per_candidate.empty()) {
        j["confidence_per_candidate"] = step.confidence_per_candidate;
    }
    if (step.own_image_confidence) {
        j["own_image_confidence"] = *step.own_image_confidence;
    }
    return j;
}

json to_json(const DatasetRecord& rec) {
    json j;
    j["image_id"] = rec.image_id;
    j["l_visual"] = rec.l_visual;
    j["ground_truth"] = to_json(rec.ground_truth);
    if (rec.d_rag) j["d_rag"] = *rec.d_rag;
    if (rec.d_reason) j["d_reason"] = *rec.d_reason;
    if (!rec.candidate_ids.empty()) j["candidate_ids"] = rec.candidate_ids;
    if (!rec.standard_steps.empty()) {
        j["standard_steps"] = steps_to_json(rec.standard_steps);
    }
    if (!rec.candidate_steps.empty()) {
        j["candidate_steps"] = steps_to_json(rec.candidate_steps);
    }
    if (rec.stratum) j["stratum"] = locatability::to_string(*rec.stratum);
    if (rec.augmented_steps) {
        j["augmented_steps"] = steps_to_json(*rec.augmented_steps);
    }
    if (rec.scores) {
        j["l_base"] = rec.scores->l_base;
        j["l_gap"] = rec.scores->l_gap;
        j["l_reason"] = rec.scores->l_reason;
        j["l_opt"] = rec.scores->l_opt;
    }
    return j;
}

rewards::GeoLocation geolocation_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("location must be an object");
    rewards::GeoLocation loc;
    loc.country = required_string(j, "country");
    loc.city = required_string(j, "city");
    if (!j.contains("coord") || !j["coord"].is_object()) {
        throw ParseError("location is missing 'coord'");
    }
    const auto& c = j["coord"];
    if (!c.contains("lat") || !c.contains("lon")) {
        throw ParseError("coord must carry 'lat' and 'lon'");
    }
    try {
        loc.coord = geodesy::GeoCoord(finite_number(c["lat"], "lat"),
                                      finite_number(c["lon"], "lon"));
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
    return loc;
}

ReasoningStep step_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("step must be an object");
    ReasoningStep step;
    step.text = required_string(j, "text");
    if (j.contains("entities")) {
        if (!j["entities"].is_array()) {
            throw ParseError("step entities must be an array");
        }
        for (const auto& e : j["entities"]) {
            if (!e.is_string()) throw ParseError("entities must be strings");
            step.entities.push_back(e.get<std::string>());
        }
    }
    if (j.contains("confidence_per_candidate")) {
        const auto& m = j["confidence_per_candidate"];
        if (!m.is_object()) {
            throw ParseError("confidence_per_candidate must be an object");
        }
        for (const auto& [k, v] : m.items()) {
            step.confidence_per_candidate[k] =
                unit_interval(v, "candidate confidence");
        }
    }
    if (j.contains("own_image_confidence")) {
        step.own_image_confidence =
            unit_interval(j["own_image_confidence"], "own_image_confidence");
    }
    return step;
}

DatasetRecord dataset_record_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("record must be an object");
    DatasetRecord rec;
    rec.image_id = required_string(j, "image_id");
    if (!j.contains("l_visual")) throw ParseError("missing 'l_visual'");
    rec.l_visual = unit_interval(j["l_visual"], "l_visual");
    if (!j.contains("ground_truth")) throw ParseError("missing 'ground_truth'");
    rec.ground_truth = geolocation_from_json(j["ground_truth"]);
    if (j.contains("d_rag")) rec.d_rag = non_negative(j["d_rag"], "d_rag");
    if (j.contains("d_reason")) {
        rec.d_reason = non_negative(j["d_reason"], "d_reason");
    }
    if (j.contains("candidate_ids")) {
        for (const auto& c : j["candidate_ids"]) {
            if (!c.is_string()) throw ParseError("candidate_ids must be strings");
            rec.candidate_ids.push_back(c.get<std::string>());
        }
    }
    if (j.contains("standard_steps")) {
        rec.standard_steps = steps_from_json(j["standard_steps"], "standard_steps");
    }
    if (j.contains("candidate_steps")) {
        rec.candidate_steps =
            steps_from_json(j["candidate_steps"], "candidate_steps");
    }
    if (j.contains("stratum")) {
        rec.stratum =
            locatability::stratum_from_string(j["stratum"].get<std::string>());
    }
    if (j.contains("augmented_steps")) {
        rec.augmented_steps =
            steps_from_json(j["augmented_steps"], "augmented_steps");
    }

    // step confidence maps may only reference declared candidates
    std::set<std::string> ids(rec.candidate_ids.begin(),
                              rec.candidate_ids.end());
    for (const auto* steps : {&rec.standard_steps, &rec.candidate_steps}) {
        for (const auto& s : *steps) {
            for (const auto& [cand, conf] : s.confidence_per_candidate) {
                if (!ids.count(cand)) {
                    throw ParseError("step references unknown candidate '" +
                                     cand + "'");
                }
            }
        }
    }
    return rec;
}

EvalRecord eval_record_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("record must be an object");
    EvalRecord rec;
    rec.image_id = required_string(j, "image_id");
    if (!j.contains("predicted")) throw ParseError("missing 'predicted'");
    if (!j.contains("truth")) throw ParseError("missing 'truth'");
    rec.predicted = geolocation_from_json(j["predicted"]);
    rec.truth = geolocation_from_json(j["truth"]);
    return rec;
}

PredictionRecord prediction_record_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("record must be an object");
    PredictionRecord rec;
    rec.image_id = required_string(j, "image_id");
    if (!j.contains("predicted_label") ||
        !j["predicted_label"].is_number_integer()) {
        throw ParseError("missing integer 'predicted_label'");
    }
    rec.predicted_label = j["predicted_label"].get<int>();
    if (rec.predicted_label != 0 && rec.predicted_label != 1) {
        throw ParseError("predicted_label must be 0 or 1");
    }
    if (j.contains("rationale")) {
        rec.rationale = j["rationale"].get<std::string>();
    }
    if (j.contains("entities")) {
        std::vector<std::string> ents;
        for (const auto& e : j["entities"]) {
            if (!e.is_string()) throw ParseError("entities must be strings");
            ents.push_back(e.get<std::string>());
        }
        rec.entities = std::move(ents);
    }
    if (!j.contains("predicted")) throw ParseError("missing 'predicted'");
    rec.predicted = geolocation_from_json(j["predicted"]);
    return rec;
}

namespace {

template <typename T, typename ParseFn>
JsonlBatch<T> read_jsonl(const std::string& path, bool lenient,
                         ParseFn&& parse) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open input file: " + path);
    JsonlBatch<T> batch;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool only_space = true;
        for (char c : line) {
            if (c != ' ' && c != '\t' && c != '\r') only_space = false;
        }
        if (only_space) continue;
        try {
            const json j = json::parse(line);
            T rec = parse(j);
            if (!seen_ids.insert(rec.image_id).second) {
                throw ParseError("duplicate image_id '" + rec.image_id + "'");
            }
            batch.records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            if (!lenient) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": " +
                                 e.what());
            }
            std::string id;
            try {
                const json j = json::parse(line, nullptr, false);
                if (j.is_object() && j.contains("image_id") &&
                    j["image_id"].is_string()) {
                    id = j["image_id"].get<std::string>();
                }
            } catch (...) {
            }
            batch.rejected.push_back({lineno, id, e.what()});
        }
    }
    return batch;
}

}  // namespace

JsonlBatch<DatasetRecord> read_dataset_file(const std::string& path,
                                            bool lenient) {
    return read_jsonl<DatasetRecord>(path, lenient, dataset_record_from_json);
}

JsonlBatch<EvalRecord> read_eval_file(const std::string& path, bool lenient) {
    return read_jsonl<EvalRecord>(path, lenient, eval_record_from_json);
}

JsonlBatch<PredictionRecord> read_prediction_file(const std::string& path,
                                                  bool lenient) {
    return read_jsonl<PredictionRecord>(path, lenient,
                                        prediction_record_from_json);
}

void write_jsonl(const std::string& path,
                 const std::vector<nlohmann::json>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file: " + path);
    for (const auto& j : lines) {
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace geoadapt::records
