#include "geoadapt/locatability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geoadapt/errors.hpp"

namespace geoadapt::locatability {

void validate(const DistancePair& d) {
    if (!(d.d_rag >= 0.0) || !(d.d_reason >= 0.0) ||
        !std::isfinite(d.d_rag) || !std::isfinite(d.d_reason)) {
        throw ValidationError("distances must be finite and non-negative");
    }
}

void validate(const LocatabilityParams& p) {
    if (!(p.gamma1 > 0.0) || !(p.gamma2 > 0.0)) {
        throw ValidationError("gamma1 and gamma2 must be positive");
    }
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
        throw ValidationError("alpha must lie in [0, 1]");
    }
    if (!(p.tau_margin_km >= 0.0)) {
        throw ValidationError("tau_margin must be non-negative");
    }
}

const char* to_string(Stratum s) {
    return s == Stratum::rag_superior ? "RagSuperior" : "Standard";
}

Stratum stratum_from_string(std::string_view s) {
    if (s == "RagSuperior") return Stratum::rag_superior;
    if (s == "Standard") return Stratum::standard;
    throw ParseError("unknown stratum label: " + std::string(s));
}

ReasonScore reason_score(const DistancePair& d, const LocatabilityParams& p) {
    validate(d);
    validate(p);
    ReasonScore s;
    s.base = std::exp(-p.gamma1 * d.d_reason);
    s.gap = std::exp(-p.gamma2 * std::max(0.0, d.d_reason - d.d_rag));
    s.reason = s.base * s.gap;
    return s;
}

double optimized_score(double l_visual, double l_reason, double alpha) {
    if (!(l_visual >= 0.0 && l_visual <= 1.0)) {
        throw ValidationError("l_visual must lie in [0, 1]");
    }
    if (!(l_reason >= 0.0 && l_reason <= 1.0)) {
        throw ValidationError("l_reason must lie in [0, 1]");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha must lie in [0, 1]");
    }
    return l_visual * ((1.0 - alpha) + alpha * l_reason);
}

Stratum stratum_label(const DistancePair& d, double tau_margin_km) {
    validate(d);
    if (!(tau_margin_km >= 0.0)) {
        throw ValidationError("tau_margin must be non-negative");
    }
    return d.d_reason > d.d_rag + tau_margin_km ? Stratum::rag_superior
                                                : Stratum::standard;
}

LocatabilityResult score_record(double l_visual, const DistancePair& d,
                                const LocatabilityParams& p) {
    const ReasonScore s = reason_score(d, p);
    LocatabilityResult r;
    r.l_base = s.base;
    r.l_gap = s.gap;
    r.l_reason = s.reason;
    r.l_opt = optimized_score(l_visual, s.reason, p.alpha);
    return r;
}

}  // namespace geoadapt::locatability
