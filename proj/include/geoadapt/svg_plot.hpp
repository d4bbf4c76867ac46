#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geoadapt/rewards.hpp"

namespace geoadapt::plot {

// Bar chart of an L_opt histogram (10 equal-width bins over [0, 1]).
std::string histogram_svg(const std::vector<std::size_t>& bins,
                          const std::string& title);

// R_geo against distance for the three name-match tiers.
std::string reward_surface_svg(const rewards::RewardParams& params);

void write_file(const std::string& path, const std::string& content);

}  // namespace geoadapt::plot
