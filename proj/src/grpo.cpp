#include "geoadapt/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "geoadapt/errors.hpp"

namespace geoadapt::grpo {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string dump_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ToyPolicy::ToyPolicy(int num_cells, int feature_dim, double temperature)
    : num_cells_(num_cells),
      feature_dim_(feature_dim),
      temperature_(temperature) {
    if (num_cells < 1 || feature_dim < 1) {
        throw ValidationError("policy needs at least one cell and one feature");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ValidationError("temperature must be positive and finite");
    }
    weights_.assign(static_cast<std::size_t>(num_actions()) *
                        static_cast<std::size_t>(feature_dim_),
                    0.0);
}

double ToyPolicy::weight(int action, int feature) const {
    return weights_[static_cast<std::size_t>(action) *
                        static_cast<std::size_t>(feature_dim_) +
                    static_cast<std::size_t>(feature)];
}

double& ToyPolicy::weight(int action, int feature) {
    return weights_[static_cast<std::size_t>(action) *
                        static_cast<std::size_t>(feature_dim_) +
                    static_cast<std::size_t>(feature)];
}

std::vector<double> ToyPolicy::log_probs(
    std::span<const double> features) const {
    if (features.size() != static_cast<std::size_t>(feature_dim_)) {
        throw ValidationError("feature vector has wrong dimension");
    }
    const int a_count = num_actions();
    std::vector<double> logits(static_cast<std::size_t>(a_count), 0.0);
    for (int a = 0; a < a_count; ++a) {
        double z = 0.0;
        for (int f = 0; f < feature_dim_; ++f) {
            z += weight(a, f) * features[static_cast<std::size_t>(f)];
        }
        z /= temperature_;
        if (!std::isfinite(z)) {
            throw NumericError("non-finite logit for action " +
                               std::to_string(a));
        }
        logits[static_cast<std::size_t>(a)] = z;
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - m);
    const double lse = m + std::log(sum);
    for (double& z : logits) z -= lse;
    return logits;
}

std::vector<double> ToyPolicy::probs(std::span<const double> features) const {
    std::vector<double> p = log_probs(features);
    for (double& v : p) v = std::exp(v);
    return p;
}

double ToyPolicy::depth_marginal(std::span<const double> features) const {
    const std::vector<double> p = probs(features);
    double mass = 0.0;
    for (int a = num_cells_; a < num_actions(); ++a) {
        mass += p[static_cast<std::size_t>(a)];
    }
    return mass;
}

std::string ToyPolicy::serialize() const {
    std::string out = "geoadapt-toy-policy v1\n";
    out += "cells " + std::to_string(num_cells_) + "\n";
    out += "features " + std::to_string(feature_dim_) + "\n";
    out += "temperature " + dump_double(temperature_) + "\n";
    for (int a = 0; a < num_actions(); ++a) {
        for (int f = 0; f < feature_dim_; ++f) {
            if (f) out += ' ';
            out += dump_double(weight(a, f));
        }
        out += '\n';
    }
    return out;
}

ToyPolicy ToyPolicy::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string header, token;
    if (!std::getline(in, header) || header != "geoadapt-toy-policy v1") {
        throw ParseError("bad policy header");
    }
    int cells = 0, feats = 0;
    double temp = 1.0;
    if (!(in >> token >> cells) || token != "cells") {
        throw ParseError("bad policy 'cells' line");
    }
    if (!(in >> token >> feats) || token != "features") {
        throw ParseError("bad policy 'features' line");
    }
    if (!(in >> token >> temp) || token != "temperature") {
        throw ParseError("bad policy 'temperature' line");
    }
    ToyPolicy p(cells, feats, temp);
    for (int a = 0; a < p.num_actions(); ++a) {
        for (int f = 0; f < feats; ++f) {
            if (!(in >> p.weight(a, f))) {
                throw ParseError("policy matrix truncated");
            }
        }
    }
    return p;
}

void validate(const GrpoConfig& cfg) {
    if (cfg.group_size < 2) {
        throw ValidationError("group_size must be at least 2");
    }
    if (!(cfg.clip_ratio > 0.0)) {
        throw ValidationError("clip_ratio must be positive");
    }
    if (!(cfg.kl_coeff >= 0.0)) {
        throw ValidationError("kl_coeff must be non-negative");
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw ValidationError("learning_rate must be positive");
    }
    if (!(cfg.advantage_eps > 0.0)) {
        throw ValidationError("advantage_eps must be positive");
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stage,
                       std::uint64_t epoch, std::uint64_t prompt) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ stage);
    h = splitmix64(h ^ epoch);
    h = splitmix64(h ^ prompt);
    return h;
}

std::vector<double> normalize_advantages(std::span<const double> rewards,
                                         double eps, bool divide_by_std) {
    if (rewards.size() < 2) {
        throw ValidationError("advantage normalization needs G >= 2 rewards");
    }
    bool all_equal = true;
    for (double r : rewards) {
        if (!std::isfinite(r)) {
            throw NumericError("non-finite reward in group");
        }
        if (r != rewards[0]) all_equal = false;
    }
    if (all_equal) {
        return std::vector<double>(rewards.size(), 0.0);
    }
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;
    const double denom = divide_by_std ? std::sqrt(var) + eps : 1.0;
    std::vector<double> adv(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        adv[i] = (rewards[i] - mean) / denom;
    }
    return adv;
}

CandidateGroup sample_group(const ToyPolicy& policy, const ToyPolicy& reference,
                            std::span<const double> features, int group_size,
                            std::uint64_t seed, std::string prompt_id) {
    if (group_size < 2) {
        throw ValidationError("group_size must be at least 2");
    }
    if (!policy.same_shape(reference)) {
        throw ValidationError("policy and reference must share shape");
    }
    const std::vector<double> logp = policy.log_probs(features);
    const std::vector<double> logp_ref = reference.log_probs(features);
    std::vector<double> probs(logp.size());
    for (std::size_t a = 0; a < logp.size(); ++a) probs[a] = std::exp(logp[a]);

    CandidateGroup group;
    group.prompt_id = std::move(prompt_id);
    group.features.assign(features.begin(), features.end());
    group.candidates.reserve(static_cast<std::size_t>(group_size));

    std::mt19937_64 rng(seed);
    for (int g = 0; g < group_size; ++g) {
        const double u = uniform01(rng);
        double acc = 0.0;
        int action = static_cast<int>(probs.size()) - 1;
        for (std::size_t a = 0; a < probs.size(); ++a) {
            acc += probs[a];
            if (u < acc) {
                action = static_cast<int>(a);
                break;
            }
        }
        Candidate c;
        c.action = action;
        c.logp_current = logp[static_cast<std::size_t>(action)];
        c.logp_reference = logp_ref[static_cast<std::size_t>(action)];
        group.candidates.push_back(c);
    }
    return group;
}

double kl_divergence(const ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const double> features) {
    if (!policy.same_shape(reference)) {
        throw ValidationError("policy and reference must share shape");
    }
    const std::vector<double> lp = policy.log_probs(features);
    const std::vector<double> lq = reference.log_probs(features);
    double kl = 0.0;
    for (std::size_t a = 0; a < lp.size(); ++a) {
        kl += std::exp(lp[a]) * (lp[a] - lq[a]);
    }
    return kl;
}

namespace {

struct SurrogateParts {
    double clipped_term = 0.0;  // mean_j min(ratio A, clip(ratio) A)
    double kl = 0.0;
};

SurrogateParts surrogate_parts(const CandidateGroup& group,
                               const ToyPolicy& reference,
                               const GrpoConfig& cfg,
                               const std::vector<double>& logp_now) {
    SurrogateParts parts;
    for (const auto& c : group.candidates) {
        const double ratio =
            std::exp(logp_now[static_cast<std::size_t>(c.action)] -
                     c.logp_current);
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip_ratio,
                                          1.0 + cfg.clip_ratio);
        parts.clipped_term +=
            std::min(ratio * c.advantage, clipped * c.advantage);
    }
    parts.clipped_term /= static_cast<double>(group.candidates.size());

    const std::vector<double> lq = reference.log_probs(group.features);
    for (std::size_t a = 0; a < logp_now.size(); ++a) {
        parts.kl += std::exp(logp_now[a]) * (logp_now[a] - lq[a]);
    }
    return parts;
}

}  // namespace

double surrogate_objective(const CandidateGroup& group, const ToyPolicy& policy,
                           const ToyPolicy& reference, const GrpoConfig& cfg) {
    validate(cfg);
    if (group.candidates.empty()) {
        throw ValidationError("group has no candidates");
    }
    const std::vector<double> logp_now = policy.log_probs(group.features);
    const SurrogateParts parts =
        surrogate_parts(group, reference, cfg, logp_now);
    return parts.clipped_term - cfg.kl_coeff * parts.kl;
}

std::vector<double> surrogate_gradient(const CandidateGroup& group,
                                       const ToyPolicy& policy,
                                       const ToyPolicy& reference,
                                       const GrpoConfig& cfg) {
    validate(cfg);
    if (group.candidates.empty()) {
        throw ValidationError("group has no candidates");
    }
    const int a_count = policy.num_actions();
    const int f_count = policy.feature_dim();
    const std::vector<double> logp_now = policy.log_probs(group.features);
    std::vector<double> p(logp_now.size());
    for (std::size_t a = 0; a < p.size(); ++a) p[a] = std::exp(logp_now[a]);

    // d objective / d logit, accumulated per action
    std::vector<double> dz(static_cast<std::size_t>(a_count), 0.0);

    const double inv_g = 1.0 / static_cast<double>(group.candidates.size());
    for (const auto& c : group.candidates) {
        const std::size_t act = static_cast<std::size_t>(c.action);
        const double ratio = std::exp(logp_now[act] - c.logp_current);
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip_ratio,
                                          1.0 + cfg.clip_ratio);
        const double unclipped_term = ratio * c.advantage;
        const double clipped_term = clipped * c.advantage;
        if (unclipped_term <= clipped_term) {
            // d ratio / d z = ratio * (e_a - p)
            const double coeff = inv_g * c.advantage * ratio;
            for (int a = 0; a < a_count; ++a) {
                dz[static_cast<std::size_t>(a)] -=
                    coeff * p[static_cast<std::size_t>(a)];
            }
            dz[act] += coeff;
        }
        // outside the clip window the active branch is constant in theta
    }

    // KL penalty: d KL / d z_a = p_a ((lp_a - lq_a) - KL)
    if (cfg.kl_coeff > 0.0) {
        const std::vector<double> lq = reference.log_probs(group.features);
        double kl = 0.0;
        for (std::size_t a = 0; a < p.size(); ++a) {
            kl += p[a] * (logp_now[a] - lq[a]);
        }
        for (std::size_t a = 0; a < p.size(); ++a) {
            dz[a] -= cfg.kl_coeff * p[a] * ((logp_now[a] - lq[a]) - kl);
        }
    }

    // chain through z = W x / temperature
    std::vector<double> grad(static_cast<std::size_t>(a_count) *
                                 static_cast<std::size_t>(f_count),
                             0.0);
    const double inv_temp = 1.0 / policy.temperature();
    for (int a = 0; a < a_count; ++a) {
        const double da = dz[static_cast<std::size_t>(a)] * inv_temp;
        for (int f = 0; f < f_count; ++f) {
            grad[static_cast<std::size_t>(a) * static_cast<std::size_t>(f_count) +
                 static_cast<std::size_t>(f)] =
                da * group.features[static_cast<std::size_t>(f)];
        }
    }
    return grad;
}

StepResult clipped_step(const CandidateGroup& group, ToyPolicy& policy,
                        const ToyPolicy& reference, const GrpoConfig& cfg) {
    validate(cfg);
    if (!policy.same_shape(reference)) {
        throw ValidationError("policy and reference must share shape");
    }
    const std::vector<double> logp_now = policy.log_probs(group.features);
    const SurrogateParts parts =
        surrogate_parts(group, reference, cfg, logp_now);
    if (!std::isfinite(parts.clipped_term) || !std::isfinite(parts.kl)) {
        throw NumericError("non-finite objective in group '" +
                           group.prompt_id + "'");
    }
    const std::vector<double> grad =
        surrogate_gradient(group, policy, reference, cfg);
    for (double g : grad) {
        if (!std::isfinite(g)) {
            throw NumericError("non-finite gradient in group '" +
                               group.prompt_id + "'");
        }
    }
    auto w = policy.weights();
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] += cfg.learning_rate * grad[i];
    }
    return {parts.clipped_term - cfg.kl_coeff * parts.kl, parts.kl};
}

std::vector<EpochStats> run_stage(const world::SyntheticGeoWorld& w,
                                  ToyPolicy& policy,
                                  const ToyPolicy& reference,
                                  const RewardFn& reward_fn,
                                  const GrpoConfig& cfg, int stage_index,
                                  int epochs, std::uint64_t seed) {
    validate(cfg);
    if (epochs < 0) throw ValidationError("epochs must be non-negative");
    std::vector<EpochStats> trace;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const ToyPolicy sampler = policy;  // old-policy snapshot for ratios
        double reward_sum = 0.0;
        std::size_t reward_count = 0;
        double kl_sum = 0.0;
        double objective_sum = 0.0;
        std::size_t groups = 0;

        for (std::size_t p = 0; p < w.train_indices.size(); ++p) {
            const int idx = w.train_indices[p];
            const auto& img = w.images[static_cast<std::size_t>(idx)];
            CandidateGroup group = sample_group(
                sampler, reference, img.features, cfg.group_size,
                mix_seed(seed, static_cast<std::uint64_t>(stage_index),
                         static_cast<std::uint64_t>(epoch), p),
                img.id);
            StepResult r;
            try {
                std::vector<double> rewards;
                rewards.reserve(group.candidates.size());
                for (auto& c : group.candidates) {
                    c.reward = reward_fn(idx, c.action);
                    rewards.push_back(c.reward);
                    reward_sum += c.reward;
                    ++reward_count;
                }
                const std::vector<double> adv = normalize_advantages(
                    rewards, cfg.advantage_eps, cfg.normalize_std);
                for (std::size_t i = 0; i < adv.size(); ++i) {
                    group.candidates[i].advantage = adv[i];
                }
                r = clipped_step(group, policy, reference, cfg);
            } catch (const NumericError& e) {
                throw NumericError("stage " + std::to_string(stage_index) +
                                   " epoch " + std::to_string(epoch) +
                                   " prompt '" + group.prompt_id + "': " +
                                   e.what());
            }
            kl_sum += r.kl;
            objective_sum += r.objective;
            ++groups;
        }

        EpochStats stats;
        stats.stage = stage_index;
        stats.epoch = epoch;
        stats.mean_reward =
            reward_count ? reward_sum / static_cast<double>(reward_count) : 0.0;
        stats.mean_kl = groups ? kl_sum / static_cast<double>(groups) : 0.0;
        stats.objective =
            groups ? objective_sum / static_cast<double>(groups) : 0.0;
        trace.push_back(stats);
    }
    return trace;
}

CurriculumResult run_curriculum(const world::SyntheticGeoWorld& w,
                                ToyPolicy& policy, const CurriculumConfig& cfg,
                                const rewards::RewardParams& reward_params) {
    rewards::validate(reward_params);
    CurriculumResult result;

    const ToyPolicy initial_reference = policy;
    const RewardFn stage1 = [&](int image_index, int action) {
        return world::stage1_candidate_reward(w, image_index, action,
                                              reward_params);
    };
    result.stage1 = run_stage(w, policy, initial_reference, stage1, cfg.grpo,
                              1, cfg.stage1_epochs, cfg.seed);

    // reference swap: stage 2 anchors to the stage-1 checkpoint
    const ToyPolicy stage1_checkpoint = policy;
    GrpoConfig stage2_cfg = cfg.grpo;
    stage2_cfg.kl_coeff = cfg.kl_coeff_stage2;
    const RewardFn stage2 = [&](int image_index, int action) {
        return world::stage2_candidate_reward(w, image_index, action,
                                              reward_params);
    };
    result.stage2 = run_stage(w, policy, stage1_checkpoint, stage2, stage2_cfg,
                              2, cfg.stage2_epochs, cfg.seed);
    return result;
}

double depth_accuracy(const ToyPolicy& policy, const world::SyntheticGeoWorld& w,
                      std::span<const int> indices) {
    if (indices.empty()) {
        throw ValidationError("depth accuracy needs at least one image");
    }
    std::size_t hits = 0;
    for (int idx : indices) {
        const auto& img = w.images.at(static_cast<std::size_t>(idx));
        const int predicted = policy.depth_marginal(img.features) > 0.5 ? 1 : 0;
        if (predicted == img.depth_label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(indices.size());
}

}  // namespace geoadapt::grpo
