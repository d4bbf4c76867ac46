#pragma once

#include <string>

#include "geoadapt/geodesy.hpp"
#include "geoadapt/grounding.hpp"
#include "geoadapt/text_norm.hpp"

namespace geoadapt::rewards {

// Hierarchical location: country and city names plus coordinates. Name
// fields may carry the explicit "unknown" marker; unknown fields never match
// anything, including other unknowns.
struct GeoLocation {
    std::string country;
    std::string city;
    geodesy::GeoCoord coord{0.0, 0.0};
};

struct RewardParams {
    double w1 = 0.5;
    double w2 = 0.5;
    double lambda1 = 0.3;
    double lambda2 = 0.7;
    double sigma_km = 100.0;
};

// Throws unless w1, w2, lambda1, lambda2 >= 0, lambda1 + lambda2 == 1
// (within 1e-9) and sigma > 0.
void validate(const RewardParams& p);

struct RewardBreakdown {
    double r_depth = 0.0;
    double r_grounding = 0.0;
    double r_alignment = 0.0;
    double r_vis = 0.0;
    bool no_entities = false;  // distinguishes "no entities" from "ungrounded"
    double r_coord = 0.0;
    double r_geo = 0.0;
    double r_stage1 = 0.0;
    double r_stage2 = 0.0;
};

struct VisualReward {
    double grounding = 0.0;
    double alignment = 0.0;
    double vis = 0.0;
    bool no_entities = false;
};

// 1 iff the predicted depth bit equals the true one. Labels must be 0 or 1.
double depth_reward(int predicted_label, int true_label);

// grounding = mean provider confidence over predicted entities,
// alignment = Jaccard(E, E*), vis = product. An empty predicted set yields
// grounding 0 with the no_entities flag raised.
VisualReward visual_reward(const text::EntitySet& predicted,
                           const text::EntitySet& reference,
                           std::string_view image_id,
                           const GroundingProvider& provider);

// exp(-d / sigma)
double coord_reward(double distance_km, double sigma_km);

// Three tiers: 0 on country mismatch; lambda1 * r_coord on country-only
// match; lambda1 + lambda2 * r_coord on full match.
double hierarchical_geo_reward(const GeoLocation& predicted,
                               const GeoLocation& truth,
                               const RewardParams& p,
                               const text::NameNormalizer& names);

double stage1_reward(const RewardBreakdown& b, const RewardParams& p);

double stage2_reward(const RewardBreakdown& b);

}  // namespace geoadapt::rewards
