#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoadapt/grounding.hpp"
#include "geoadapt/rewards.hpp"
#include "geoadapt/text_norm.hpp"

namespace geoadapt::world {

// Desk-scale synthetic stand-in for a curated geo dataset. Images live on a
// countries x cities cell grid; features are a noisy cell one-hot plus a
// depth-label signal and a bias, so both the cell and the depth bit are
// linearly separable by construction.
struct WorldParams {
    int num_images = 200;
    int countries = 4;
    int cities_per_country = 3;
    double feature_scale = 2.0;
    double noise = 0.1;
    double holdout_fraction = 0.15;
    double deep_fraction = 0.4;  // share of images with depth label 1
    std::uint64_t seed = 42;
};

struct WorldImage {
    std::string id;
    std::vector<double> features;
    rewards::GeoLocation truth;
    int cell = 0;
    int depth_label = 0;
    text::EntitySet ref_entities;
};

struct SyntheticGeoWorld {
    WorldParams params;
    int num_cells = 0;
    int feature_dim = 0;
    std::vector<rewards::GeoLocation> cells;     // representative per cell
    std::vector<text::EntitySet> cell_entities;  // landmark + region names
    std::vector<WorldImage> images;
    rewards::TableGroundingProvider grounding;
    std::vector<int> train_indices;
    std::vector<int> holdout_indices;
};

SyntheticGeoWorld make_world(const WorldParams& params);

// Joint action encoding shared with the toy policy: the first num_cells
// actions carry depth bit 0, the rest depth bit 1.
inline int action_depth(int action, int num_cells) {
    return action / num_cells;
}
inline int action_cell(int action, int num_cells) { return action % num_cells; }

// Stage-1 candidate reward: w1 * depth correctness + w2 * visual grounding
// of the predicted cell's entities against the image's reference entities.
double stage1_candidate_reward(const SyntheticGeoWorld& w, int image_index,
                               int action, const rewards::RewardParams& rp);

// Stage-2 candidate reward: hierarchical geo reward of the predicted cell's
// representative location against the image's ground truth.
double stage2_candidate_reward(const SyntheticGeoWorld& w, int image_index,
                               int action, const rewards::RewardParams& rp);

}  // namespace geoadapt::world
