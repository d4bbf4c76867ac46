/* geoadapt C API: locatability scoring, reward construction, dataset
 * curation, desk-scale GRPO training and geo-localization metrics behind a
 * stable C surface. All functions return a ga_status code; details of the
 * last failure on the calling thread come from ga_last_error(). */

#ifndef GEOADAPT_H
#define GEOADAPT_H

#include <stddef.h>

#if defined(GEOADAPT_BUILD_SHARED)
#define GEOADAPT_API __attribute__((visibility("default")))
#else
#define GEOADAPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ga_status {
    GA_OK = 0,
    GA_ERR_INVALID_ARGUMENT = 1,
    GA_ERR_PARSE = 2,
    GA_ERR_IO = 3,
    GA_ERR_NUMERIC = 4,
    GA_ERR_REJECTED_RECORDS = 5,
    GA_ERR_INTERNAL = 6
} ga_status;

GEOADAPT_API const char* ga_status_name(int status);

/* Message for the most recent failure on this thread; empty on success. */
GEOADAPT_API const char* ga_last_error(void);

/* ------------------------------------------------------------------ */
/* configuration                                                       */

typedef struct ga_config ga_config;

/* Fresh configuration holding the built-in defaults. */
GEOADAPT_API ga_config* ga_config_new(void);
GEOADAPT_API void ga_config_free(ga_config* cfg);

/* key = value lines; '#' starts a comment; unknown keys are errors. */
GEOADAPT_API int ga_config_load_file(ga_config* cfg, const char* path);
GEOADAPT_API int ga_config_set(ga_config* cfg, const char* key,
                               const char* value);

/* Writes the value into buf (NUL-terminated). Fails with
 * GA_ERR_INVALID_ARGUMENT if the buffer is too small. */
GEOADAPT_API int ga_config_get(const ga_config* cfg, const char* key,
                               char* buf, size_t bufsize);

/* ------------------------------------------------------------------ */
/* scalar surface                                                      */

GEOADAPT_API int ga_haversine_km(double lat_a, double lon_a, double lat_b,
                                 double lon_b, double* out_km);
GEOADAPT_API int ga_within_threshold(double distance_km, double threshold_km,
                                     int* out_within);

/* Reasoning locatability: base, gap and their product. */
GEOADAPT_API int ga_reason_score(double d_rag_km, double d_reason_km,
                                 double gamma1, double gamma2,
                                 double* out_base, double* out_gap,
                                 double* out_reason);

GEOADAPT_API int ga_optimized_score(double l_visual, double l_reason,
                                    double alpha, double* out_opt);

/* out_rag_superior is 1 when d_reason > d_rag + tau_margin, else 0. */
GEOADAPT_API int ga_stratum_label(double d_rag_km, double d_reason_km,
                                  double tau_margin_km, int* out_rag_superior);

GEOADAPT_API int ga_depth_reward(int predicted_label, int true_label,
                                 double* out);
GEOADAPT_API int ga_coord_reward(double distance_km, double sigma_km,
                                 double* out);

/* Three-tier hierarchical reward over country/city names and coordinates.
 * Name comparison uses the built-in normalization (no alias table). */
GEOADAPT_API int ga_geo_reward(const char* predicted_country,
                               const char* predicted_city, double predicted_lat,
                               double predicted_lon, const char* true_country,
                               const char* true_city, double true_lat,
                               double true_lon, double lambda1, double lambda2,
                               double sigma_km, double* out);

/* ------------------------------------------------------------------ */
/* pipelines                                                           */

/* Each command reads its inputs and writes its outputs at the paths named
 * in the config. On success *out_summary (when non-NULL) receives a
 * malloc'd summary string; release it with ga_string_free. ga_run_eval
 * reports GA_ERR_REJECTED_RECORDS when lenient parsing skipped records but
 * still writes the report for the accepted ones. */
GEOADAPT_API int ga_run_score(const ga_config* cfg, char** out_summary);
GEOADAPT_API int ga_run_stratify(const ga_config* cfg, char** out_summary);
GEOADAPT_API int ga_run_curate(const ga_config* cfg, char** out_summary);
GEOADAPT_API int ga_run_reward(const ga_config* cfg, char** out_summary);
GEOADAPT_API int ga_run_train_toy(const ga_config* cfg, char** out_summary);
GEOADAPT_API int ga_run_eval(const ga_config* cfg, char** out_summary);
GEOADAPT_API int ga_run_report(const ga_config* cfg, char** out_summary);

GEOADAPT_API void ga_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* GEOADAPT_H */
