#include "geoadapt.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "geoadapt/commands.hpp"
#include "geoadapt/errors.hpp"
#include "geoadapt/geodesy.hpp"
#include "geoadapt/locatability.hpp"
#include "geoadapt/rewards.hpp"
#include "geoadapt/run_config.hpp"

namespace {

thread_local std::string g_last_error;

int status_of(geoadapt::ErrorCode code) {
    switch (code) {
        case geoadapt::ErrorCode::invalid_argument:
            return GA_ERR_INVALID_ARGUMENT;
        case geoadapt::ErrorCode::parse:
            return GA_ERR_PARSE;
        case geoadapt::ErrorCode::io:
            return GA_ERR_IO;
        case geoadapt::ErrorCode::numeric:
            return GA_ERR_NUMERIC;
        case geoadapt::ErrorCode::rejected_records:
            return GA_ERR_REJECTED_RECORDS;
    }
    return GA_ERR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const geoadapt::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GA_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return GA_ERR_INTERNAL;
    }
}

const geoadapt::config::RunConfig& unwrap(const ga_config* cfg) {
    if (!cfg) throw geoadapt::ValidationError("config handle is NULL");
    return *reinterpret_cast<const geoadapt::config::RunConfig*>(cfg);
}

geoadapt::config::RunConfig& unwrap(ga_config* cfg) {
    if (!cfg) throw geoadapt::ValidationError("config handle is NULL");
    return *reinterpret_cast<geoadapt::config::RunConfig*>(cfg);
}

void require_out(const void* p) {
    if (!p) throw geoadapt::ValidationError("output pointer is NULL");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

using CommandFn =
    geoadapt::commands::CommandOutcome (*)(const geoadapt::config::RunConfig&);

int run_command(const ga_config* cfg, char** out_summary, CommandFn fn) {
    return guarded([&] {
        const auto outcome = fn(unwrap(cfg));
        if (out_summary) *out_summary = dup_string(outcome.summary);
        if (outcome.rejected_records) {
            g_last_error = "some records were rejected; see the summary";
            return static_cast<int>(GA_ERR_REJECTED_RECORDS);
        }
        return static_cast<int>(GA_OK);
    });
}

}  // namespace

extern "C" {

const char* ga_status_name(int status) {
    switch (status) {
        case GA_OK:
            return "ok";
        case GA_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case GA_ERR_PARSE:
            return "parse error";
        case GA_ERR_IO:
            return "io error";
        case GA_ERR_NUMERIC:
            return "numeric failure";
        case GA_ERR_REJECTED_RECORDS:
            return "rejected records";
        case GA_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* ga_last_error(void) { return g_last_error.c_str(); }

ga_config* ga_config_new(void) {
    try {
        return reinterpret_cast<ga_config*>(new geoadapt::config::RunConfig());
    } catch (...) {
        return nullptr;
    }
}

void ga_config_free(ga_config* cfg) {
    delete reinterpret_cast<geoadapt::config::RunConfig*>(cfg);
}

int ga_config_load_file(ga_config* cfg, const char* path) {
    return guarded([&] {
        if (!path) throw geoadapt::ValidationError("path is NULL");
        unwrap(cfg).load_file(path);
        return GA_OK;
    });
}

int ga_config_set(ga_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        if (!key || !value) {
            throw geoadapt::ValidationError("key/value is NULL");
        }
        unwrap(cfg).set(key, value);
        return GA_OK;
    });
}

int ga_config_get(const ga_config* cfg, const char* key, char* buf,
                  size_t bufsize) {
    return guarded([&] {
        if (!key || !buf) throw geoadapt::ValidationError("key/buf is NULL");
        const std::string value = unwrap(cfg).get(key);
        if (value.size() + 1 > bufsize) {
            throw geoadapt::ValidationError("buffer too small for value of '" +
                                            std::string(key) + "'");
        }
        std::memcpy(buf, value.c_str(), value.size() + 1);
        return GA_OK;
    });
}

int ga_haversine_km(double lat_a, double lon_a, double lat_b, double lon_b,
                    double* out_km) {
    return guarded([&] {
        require_out(out_km);
        const geoadapt::geodesy::GeoCoord a(lat_a, lon_a);
        const geoadapt::geodesy::GeoCoord b(lat_b, lon_b);
        *out_km = geoadapt::geodesy::haversine_km(a, b);
        return GA_OK;
    });
}

int ga_within_threshold(double distance_km, double threshold_km,
                        int* out_within) {
    return guarded([&] {
        require_out(out_within);
        *out_within =
            geoadapt::geodesy::within_threshold(distance_km, threshold_km) ? 1
                                                                           : 0;
        return GA_OK;
    });
}

int ga_reason_score(double d_rag_km, double d_reason_km, double gamma1,
                    double gamma2, double* out_base, double* out_gap,
                    double* out_reason) {
    return guarded([&] {
        geoadapt::locatability::LocatabilityParams params;
        params.gamma1 = gamma1;
        params.gamma2 = gamma2;
        const auto s = geoadapt::locatability::reason_score(
            {d_rag_km, d_reason_km}, params);
        if (out_base) *out_base = s.base;
        if (out_gap) *out_gap = s.gap;
        if (out_reason) *out_reason = s.reason;
        return GA_OK;
    });
}

int ga_optimized_score(double l_visual, double l_reason, double alpha,
                       double* out_opt) {
    return guarded([&] {
        require_out(out_opt);
        *out_opt =
            geoadapt::locatability::optimized_score(l_visual, l_reason, alpha);
        return GA_OK;
    });
}

int ga_stratum_label(double d_rag_km, double d_reason_km, double tau_margin_km,
                     int* out_rag_superior) {
    return guarded([&] {
        require_out(out_rag_superior);
        const auto label = geoadapt::locatability::stratum_label(
            {d_rag_km, d_reason_km}, tau_margin_km);
        *out_rag_superior =
            label == geoadapt::locatability::Stratum::rag_superior ? 1 : 0;
        return GA_OK;
    });
}

int ga_depth_reward(int predicted_label, int true_label, double* out) {
    return guarded([&] {
        require_out(out);
        *out = geoadapt::rewards::depth_reward(predicted_label, true_label);
        return GA_OK;
    });
}

int ga_coord_reward(double distance_km, double sigma_km, double* out) {
    return guarded([&] {
        require_out(out);
        *out = geoadapt::rewards::coord_reward(distance_km, sigma_km);
        return GA_OK;
    });
}

int ga_geo_reward(const char* predicted_country, const char* predicted_city,
                  double predicted_lat, double predicted_lon,
                  const char* true_country, const char* true_city,
                  double true_lat, double true_lon, double lambda1,
                  double lambda2, double sigma_km, double* out) {
    return guarded([&] {
        require_out(out);
        if (!predicted_country || !predicted_city || !true_country ||
            !true_city) {
            throw geoadapt::ValidationError("name arguments must not be NULL");
        }
        geoadapt::rewards::GeoLocation predicted{
            predicted_country, predicted_city,
            geoadapt::geodesy::GeoCoord(predicted_lat, predicted_lon)};
        geoadapt::rewards::GeoLocation truth{
            true_country, true_city,
            geoadapt::geodesy::GeoCoord(true_lat, true_lon)};
        geoadapt::rewards::RewardParams params;
        params.lambda1 = lambda1;
        params.lambda2 = lambda2;
        params.sigma_km = sigma_km;
        static const geoadapt::text::NameNormalizer names;
        *out = geoadapt::rewards::hierarchical_geo_reward(predicted, truth,
                                                          params, names);
        return GA_OK;
    });
}

int ga_run_score(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_score);
}

int ga_run_stratify(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_stratify);
}

int ga_run_curate(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_curate);
}

int ga_run_reward(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_reward);
}

int ga_run_train_toy(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_train_toy);
}

int ga_run_eval(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_eval);
}

int ga_run_report(const ga_config* cfg, char** out_summary) {
    return run_command(cfg, out_summary, geoadapt::commands::run_report);
}

void ga_string_free(char* s) { std::free(s); }

}  // extern "C"
