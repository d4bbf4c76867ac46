#pragma once

#include <string>

#include "geoadapt/run_config.hpp"

namespace geoadapt::commands {

struct CommandOutcome {
    std::string summary;            // printed by the CLI
    bool rejected_records = false;  // eval contract: nonzero exit on rejects
};

CommandOutcome run_score(const config::RunConfig& cfg);
CommandOutcome run_stratify(const config::RunConfig& cfg);
CommandOutcome run_curate(const config::RunConfig& cfg);
CommandOutcome run_reward(const config::RunConfig& cfg);
CommandOutcome run_train_toy(const config::RunConfig& cfg);
CommandOutcome run_eval(const config::RunConfig& cfg);
CommandOutcome run_report(const config::RunConfig& cfg);

}  // namespace geoadapt::commands
