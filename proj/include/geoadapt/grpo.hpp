#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "geoadapt/world.hpp"

namespace geoadapt::grpo {

// Linear-softmax policy over the joint action space
// (depth bit in {0,1}) x (geo cell in {0..K-1}); actions [0,K) carry depth 0.
// Stands in for the trained policy at desk scale.
class ToyPolicy {
public:
    ToyPolicy(int num_cells, int feature_dim, double temperature = 1.0);

    int num_cells() const { return num_cells_; }
    int num_actions() const { return 2 * num_cells_; }
    int feature_dim() const { return feature_dim_; }
    double temperature() const { return temperature_; }

    int depth_of(int action) const { return action / num_cells_; }
    int cell_of(int action) const { return action % num_cells_; }
    int action_of(int depth, int cell) const {
        return depth * num_cells_ + cell;
    }

    double weight(int action, int feature) const;
    double& weight(int action, int feature);
    std::span<const double> weights() const { return weights_; }
    std::span<double> weights() { return weights_; }

    // log softmax of W x / temperature; throws NumericError on non-finite
    // logits.
    std::vector<double> log_probs(std::span<const double> features) const;
    std::vector<double> probs(std::span<const double> features) const;

    // marginal P(depth = 1) across all cells
    double depth_marginal(std::span<const double> features) const;

    std::string serialize() const;
    static ToyPolicy deserialize(const std::string& text);

    bool same_shape(const ToyPolicy& other) const {
        return num_cells_ == other.num_cells_ &&
               feature_dim_ == other.feature_dim_ &&
               temperature_ == other.temperature_;
    }

private:
    int num_cells_;
    int feature_dim_;
    double temperature_;
    std::vector<double> weights_;  // num_actions x feature_dim, row-major
};

struct Candidate {
    int action = 0;
    double reward = 0.0;
    double logp_current = 0.0;    // under the sampling policy
    double logp_reference = 0.0;  // under the frozen reference policy
    double advantage = 0.0;
};

struct CandidateGroup {
    std::string prompt_id;
    std::vector<double> features;
    std::vector<Candidate> candidates;
};

// Per-update knobs. kl_coeff is the beta of the KL penalty.
struct GrpoConfig {
    int group_size = 8;
    double clip_ratio = 0.2;
    double kl_coeff = 0.04;
    double learning_rate = 0.01;
    double advantage_eps = 1e-8;
    bool normalize_std = true;  // divide centered rewards by (std + eps)
};

// Two-stage schedule: 3 reasoning-formation epochs, then 2 refinement epochs.
struct CurriculumConfig {
    GrpoConfig grpo;
    double kl_coeff_stage2 = 0.04;
    int stage1_epochs = 3;
    int stage2_epochs = 2;
    std::uint64_t seed = 42;
};

void validate(const GrpoConfig& cfg);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stage,
                       std::uint64_t epoch, std::uint64_t prompt);

// Group-centered advantages: (r - mean) / (std + eps), population std.
// An all-equal group yields all zeros. Pass divide_by_std = false for pure
// centering.
std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         double eps, bool divide_by_std);

// G i.i.d. draws from the policy's softmax with log-probs recorded under
// both the sampling policy and the reference. Rewards are left unfilled.
CandidateGroup sample_group(const ToyPolicy& policy, const ToyPolicy& reference,
                            std::span<const double> features, int group_size,
                            std::uint64_t seed, std::string prompt_id = {});

// Exact KL(policy || reference) over the action distribution at `features`.
double kl_divergence(const ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const double> features);

// Clipped-surrogate objective for one group at the current policy:
// mean_j min(ratio_j A_j, clip(ratio_j, 1-eps, 1+eps) A_j) - beta * KL.
double surrogate_objective(const CandidateGroup& group, const ToyPolicy& policy,
                           const ToyPolicy& reference, const GrpoConfig& cfg);

// Analytic gradient of surrogate_objective with respect to the policy
// weights, flattened row-major.
std::vector<double> surrogate_gradient(const CandidateGroup& group,
                                       const ToyPolicy& policy,
                                       const ToyPolicy& reference,
                                       const GrpoConfig& cfg);

struct StepResult {
    double objective = 0.0;  // value before the update
    double kl = 0.0;
};

// One gradient-ascent step on the group. Advantages must be populated.
// Non-finite gradients abort with the offending prompt id.
StepResult clipped_step(const CandidateGroup& group, ToyPolicy& policy,
                        const ToyPolicy& reference, const GrpoConfig& cfg);

using RewardFn = std::function<double(int image_index, int action)>;

struct EpochStats {
    int stage = 0;
    int epoch = 0;
    double mean_reward = 0.0;
    double mean_kl = 0.0;
    double objective = 0.0;
};

// One curriculum stage: per epoch, snapshot the sampling policy, then apply
// one clipped step per training prompt. Returns per-epoch statistics.
std::vector<EpochStats> run_stage(const world::SyntheticGeoWorld& w,
                                  ToyPolicy& policy,
                                  const ToyPolicy& reference,
                                  const RewardFn& reward_fn,
                                  const GrpoConfig& cfg, int stage_index,
                                  int epochs, std::uint64_t seed);

struct CurriculumResult {
    std::vector<EpochStats> stage1;
    std::vector<EpochStats> stage2;
};

// Stage 1 against the initial policy as reference, then the reference is
// reassigned to the stage-1 checkpoint and stage 2 continues from it.
CurriculumResult run_curriculum(const world::SyntheticGeoWorld& w,
                                ToyPolicy& policy, const CurriculumConfig& cfg,
                                const rewards::RewardParams& reward_params);

// Fraction of the given images whose marginal depth prediction matches the
// label.
double depth_accuracy(const ToyPolicy& policy, const world::SyntheticGeoWorld& w,
                      std::span<const int> indices);

}  // namespace geoadapt::grpo
