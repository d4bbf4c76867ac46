#include "geoadapt/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "geoadapt/errors.hpp"
#include "geoadapt/geodesy.hpp"

namespace geoadapt::world {

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa construction, stable across platforms
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gauss(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * geoadapt::geodesy::kPi * u2);
}

int uniform_int(std::mt19937_64& rng, int n) {
    return static_cast<int>(uniform01(rng) * n) % n;
}

}  // namespace

SyntheticGeoWorld make_world(const WorldParams& params) {
    if (params.num_images < 2 || params.countries < 1 ||
        params.cities_per_country < 1) {
        throw ValidationError("world needs >= 2 images and a non-empty grid");
    }
    if (!(params.holdout_fraction >= 0.0 && params.holdout_fraction < 1.0)) {
        throw ValidationError("holdout_fraction must lie in [0, 1)");
    }
    if (!(params.deep_fraction >= 0.0 && params.deep_fraction <= 1.0)) {
        throw ValidationError("deep_fraction must lie in [0, 1]");
    }

    SyntheticGeoWorld w;
    w.params = params;
    w.num_cells = params.countries * params.cities_per_country;
    w.feature_dim = w.num_cells + 2;

    // cities within a country sit ~55 km apart, countries far apart
    for (int c = 0; c < params.countries; ++c) {
        for (int t = 0; t < params.cities_per_country; ++t) {
            rewards::GeoLocation loc;
            loc.country = "country_" + std::to_string(c);
            loc.city = "city_" + std::to_string(c) + "_" + std::to_string(t);
            loc.coord = geodesy::GeoCoord(-30.0 + 0.5 * t,
                                          -60.0 + 30.0 * c);
            w.cells.push_back(loc);

            text::EntitySet ents;
            ents.insert("landmark_" + std::to_string(c) + "_" +
                        std::to_string(t));
            ents.insert("region_" + std::to_string(c));
            w.cell_entities.push_back(std::move(ents));
        }
    }

    std::mt19937_64 rng(params.seed);
    for (int i = 0; i < params.num_images; ++i) {
        WorldImage img;
        img.id = "syn-" + std::to_string(i);
        img.cell = uniform_int(rng, w.num_cells);
        img.depth_label = uniform01(rng) < params.deep_fraction ? 1 : 0;

        img.features.assign(static_cast<std::size_t>(w.feature_dim), 0.0);
        for (int f = 0; f < w.num_cells; ++f) {
            img.features[f] = (f == img.cell ? params.feature_scale : 0.0) +
                              params.noise * gauss(rng);
        }
        img.features[w.num_cells] =
            (img.depth_label == 1 ? params.feature_scale
                                  : -params.feature_scale) +
            params.noise * gauss(rng);
        img.features[w.num_cells + 1] = 1.0;

        const auto& cell = w.cells[img.cell];
        img.truth.country = cell.country;
        img.truth.city = cell.city;
        img.truth.coord =
            geodesy::GeoCoord(cell.coord.lat() + 0.1 * (uniform01(rng) - 0.5),
                              cell.coord.lon() + 0.1 * (uniform01(rng) - 0.5));
        img.ref_entities = w.cell_entities[img.cell];

        for (const auto& e : img.ref_entities.items()) {
            const bool landmark = e.rfind("landmark_", 0) == 0;
            w.grounding.set(img.id, e, landmark ? 0.95 : 0.9);
        }
        w.images.push_back(std::move(img));
    }

    // deterministic shuffle for the train/holdout split
    std::vector<int> order(w.images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (std::size_t i = order.size(); i-- > 1;) {
        const std::size_t j = static_cast<std::size_t>(
            uniform_int(rng, static_cast<int>(i) + 1));
        std::swap(order[i], order[j]);
    }
    const std::size_t holdout = static_cast<std::size_t>(
        params.holdout_fraction * static_cast<double>(order.size()));
    w.holdout_indices.assign(order.begin(),
                             order.begin() + static_cast<long>(holdout));
    w.train_indices.assign(order.begin() + static_cast<long>(holdout),
                           order.end());
    std::sort(w.holdout_indices.begin(), w.holdout_indices.end());
    std::sort(w.train_indices.begin(), w.train_indices.end());
    return w;
}

double stage1_candidate_reward(const SyntheticGeoWorld& w, int image_index,
                               int action, const rewards::RewardParams& rp) {
    const auto& img = w.images.at(static_cast<std::size_t>(image_index));
    const int depth = action_depth(action, w.num_cells);
    const int cell = action_cell(action, w.num_cells);

    rewards::RewardBreakdown b;
    b.r_depth = rewards::depth_reward(depth, img.depth_label);
    const auto vis = rewards::visual_reward(w.cell_entities[static_cast<std::size_t>(cell)],
                                            img.ref_entities, img.id,
                                            w.grounding);
    b.r_vis = vis.vis;
    return rewards::stage1_reward(b, rp);
}

double stage2_candidate_reward(const SyntheticGeoWorld& w, int image_index,
                               int action, const rewards::RewardParams& rp) {
    const auto& img = w.images.at(static_cast<std::size_t>(image_index));
    const int cell = action_cell(action, w.num_cells);
    static const text::NameNormalizer kNames;
    return rewards::hierarchical_geo_reward(
        w.cells[static_cast<std::size_t>(cell)], img.truth, rp, kNames);
}

}  // namespace geoadapt::world
