#pragma once

#include <vector>

#include "geoadapt/locatability.hpp"
#include "geoadapt/records.hpp"

namespace geoadapt::curation {

using locatability::Stratum;
using records::DatasetRecord;
using records::ReasoningStep;

enum class StepClass { implicit, explicit_removed };

struct CurationParams {
    locatability::LocatabilityParams loc;
    double step_threshold = 0.3;  // grounding confidence below this is implicit
    int min_support = 2;          // candidates an implicit step must apply to
};

// Hook for external cross-checking of explicit-step removal. The default
// accepts every removal; a rejected removal sends the step back through the
// implicit path.
class VerificationProvider {
public:
    virtual ~VerificationProvider() = default;
    virtual bool confirm_removal(const ReasoningStep& step,
                                 const std::string& image_id) const = 0;
};

class AcceptAllVerification final : public VerificationProvider {
public:
    bool confirm_removal(const ReasoningStep&,
                         const std::string&) const override {
        return true;
    }
};

struct StratifyResult {
    std::vector<DatasetRecord> standard;
    std::vector<DatasetRecord> rag_superior;
    std::vector<records::RejectedLine> rejected;  // line 0, id + reason set
    std::size_t stripped_candidates = 0;
};

// Partition by the rag-superior rule and set each record's stratum field.
// Records missing distances, or labeled rag-superior without exactly 3
// candidates, are rejected with a reason. Records labeled standard shed any
// candidate data they arrived with (counted in stripped_candidates), keeping
// outputs within the record invariant under any tau.
StratifyResult stratify(std::vector<DatasetRecord> records,
                        const locatability::LocatabilityParams& params);

StepClass classify_step(const ReasoningStep& step, double threshold);

// True iff the step's confidence reaches `threshold` (inclusive) on at least
// min_support of the record's candidates. The confidence map must cover
// every candidate id; anything less is a coverage error.
bool validate_implicit(const ReasoningStep& step,
                       const std::vector<std::string>& candidate_ids,
                       double threshold, int min_support);

// Insert validated implicit steps into the standard chain: each lands after
// the last standard step sharing an entity with it, or at the end. Dedup by
// normalized text. Only rag-superior records may be merged into.
DatasetRecord merge_trajectories(DatasetRecord record,
                                 const std::vector<ReasoningStep>& validated);

struct AugmentStats {
    std::size_t implicit_steps = 0;
    std::size_t removed_steps = 0;
    std::size_t validated_steps = 0;
    std::size_t merged_steps = 0;
};

// Full single-record pipeline over the candidate-derived cue pool:
// classify, verify removals, validate implicit cues, merge survivors.
DatasetRecord augment_record(DatasetRecord record, const CurationParams& params,
                             const VerificationProvider& verifier,
                             AugmentStats* stats = nullptr);

}  // namespace geoadapt::curation
