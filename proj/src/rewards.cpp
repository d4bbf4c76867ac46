#include "geoadapt/rewards.hpp"

#include <cmath>

#include "geoadapt/errors.hpp"

namespace geoadapt::rewards {

void validate(const RewardParams& p) {
    if (!(p.w1 >= 0.0) || !(p.w2 >= 0.0)) {
        throw ValidationError("stage-1 weights must be non-negative");
    }
    if (!(p.lambda1 >= 0.0) || !(p.lambda2 >= 0.0)) {
        throw ValidationError("tier weights must be non-negative");
    }
    if (std::abs(p.lambda1 + p.lambda2 - 1.0) > 1e-9) {
        throw ValidationError("lambda1 + lambda2 must equal 1");
    }
    if (!(p.sigma_km > 0.0)) {
        throw ValidationError("sigma must be positive");
    }
}

double depth_reward(int predicted_label, int true_label) {
    if ((predicted_label != 0 && predicted_label != 1) ||
        (true_label != 0 && true_label != 1)) {
        throw ValidationError("depth labels must be 0 or 1");
    }
    return predicted_label == true_label ? 1.0 : 0.0;
}

VisualReward visual_reward(const text::EntitySet& predicted,
                           const text::EntitySet& reference,
                           std::string_view image_id,
                           const GroundingProvider& provider) {
    VisualReward r;
    if (predicted.empty()) {
        r.no_entities = true;
        r.alignment = text::EntitySet::jaccard(predicted, reference);
        return r;
    }
    double sum = 0.0;
    for (const auto& e : predicted.items()) {
        const double c = provider.query(e, image_id);
        if (!(c >= 0.0 && c <= 1.0)) {
            throw ValidationError("provider confidence for '" + e +
                                  "' outside [0, 1]");
        }
        sum += c;
    }
    r.grounding = sum / static_cast<double>(predicted.size());
    r.alignment = text::EntitySet::jaccard(predicted, reference);
    r.vis = r.grounding * r.alignment;
    return r;
}

double coord_reward(double distance_km, double sigma_km) {
    if (!(distance_km >= 0.0)) {
        throw ValidationError("distance must be non-negative");
    }
    if (!(sigma_km > 0.0)) {
        throw ValidationError("sigma must be positive");
    }
    return std::exp(-distance_km / sigma_km);
}

double hierarchical_geo_reward(const GeoLocation& predicted,
                               const GeoLocation& truth,
                               const RewardParams& p,
                               const text::NameNormalizer& names) {
    validate(p);
    if (!names.names_match(predicted.country, truth.country)) {
        return 0.0;
    }
    const double d = geodesy::haversine_km(predicted.coord, truth.coord);
    const double rc = coord_reward(d, p.sigma_km);
    if (!names.names_match(predicted.city, truth.city)) {
        return p.lambda1 * rc;
    }
    return p.lambda1 + p.lambda2 * rc;
}

double stage1_reward(const RewardBreakdown& b, const RewardParams& p) {
    validate(p);
    return p.w1 * b.r_depth + p.w2 * b.r_vis;
}

double stage2_reward(const RewardBreakdown& b) { return b.r_geo; }

}  // namespace geoadapt::rewards
