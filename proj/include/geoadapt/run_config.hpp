#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "geoadapt/grpo.hpp"
#include "geoadapt/locatability.hpp"
#include "geoadapt/rewards.hpp"
#include "geoadapt/world.hpp"

namespace geoadapt::config {

// Every knob and path a pipeline command needs. Overrides come from a
// key=value config file and then from command-line flags, in that order.
struct RunConfig {
    // locatability
    double gamma1 = 0.01;
    double gamma2 = 0.01;
    double alpha = 0.6;
    double tau_margin = 50.0;
    // rewards
    double w1 = 0.5;
    double w2 = 0.5;
    double lambda1 = 0.3;
    double lambda2 = 0.7;
    double sigma = 100.0;
    // curation
    double step_threshold = 0.3;
    int min_support = 2;
    // grpo
    int group_size = 8;
    double clip_ratio = 0.2;
    double kl_coeff_stage1 = 0.04;
    double kl_coeff_stage2 = 0.04;
    double learning_rate = 0.01;
    double advantage_eps = 1e-8;
    bool normalize_std = true;
    int stage1_epochs = 3;
    int stage2_epochs = 2;
    std::uint64_t seed = 42;
    // synthetic world
    int world_images = 200;
    int world_countries = 4;
    int world_cities_per_country = 3;
    double world_feature_scale = 2.0;
    double world_noise = 0.1;
    double world_holdout_fraction = 0.15;
    double world_deep_fraction = 0.4;
    // files
    std::string dataset_in;
    std::string dataset_out;
    std::string standard_out;
    std::string rag_superior_out;
    std::string summary_out;
    std::string predictions_in;
    std::string rewards_out;
    std::string grounding_table;
    std::string alias_table;
    std::string trace_out;
    std::string policy_out;
    std::string report_in;
    std::string report_out;
    std::string plot_out;
    std::string report_format = "table";
    // behavior
    bool lenient = false;
    bool plot = false;

    // key=value lines, '#' comments; unknown keys are errors
    void load_file(const std::string& path);
    void set(std::string_view key, std::string_view value);
    std::string get(std::string_view key) const;
    static std::vector<std::string> keys();

    // range checks across all numeric fields
    void check() const;

    locatability::LocatabilityParams locatability_params() const;
    rewards::RewardParams reward_params() const;
    grpo::CurriculumConfig curriculum_config() const;
    world::WorldParams world_params() const;
};

}  // namespace geoadapt::config
