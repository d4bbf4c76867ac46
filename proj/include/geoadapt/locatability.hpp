#pragma once

#include <string_view>

namespace geoadapt::locatability {

// Haversine errors, in kilometers, of the retrieval and reasoning predictors
// against the same ground truth.
struct DistancePair {
    double d_rag = 0.0;
    double d_reason = 0.0;
};

// Decay rates are per kilometer, so the defaults give a 100 km decay scale.
struct LocatabilityParams {
    double gamma1 = 0.01;
    double gamma2 = 0.01;
    double alpha = 0.6;
    double tau_margin_km = 50.0;
};

void validate(const DistancePair& d);
void validate(const LocatabilityParams& p);

struct ReasonScore {
    double base = 0.0;  // exp(-gamma1 * d_reason)
    double gap = 0.0;   // exp(-gamma2 * max(0, d_reason - d_rag))
    double reason = 0.0;
};

struct LocatabilityResult {
    double l_base = 0.0;
    double l_gap = 0.0;
    double l_reason = 0.0;
    double l_opt = 0.0;
};

enum class Stratum { standard, rag_superior };

const char* to_string(Stratum s);
Stratum stratum_from_string(std::string_view s);

ReasonScore reason_score(const DistancePair& d, const LocatabilityParams& p);

// l_visual * [(1 - alpha) + alpha * l_reason]; never exceeds l_visual.
double optimized_score(double l_visual, double l_reason, double alpha);

// rag_superior iff d_reason > d_rag + tau (strict).
Stratum stratum_label(const DistancePair& d, double tau_margin_km);

LocatabilityResult score_record(double l_visual, const DistancePair& d,
                                const LocatabilityParams& p);

}  // namespace geoadapt::locatability
