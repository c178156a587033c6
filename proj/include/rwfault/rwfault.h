/*
 * rwfault C API
 *
 * Opaque-handle interface to the reaction-wheel fault-estimating attitude
 * simulator. Every fallible call returns an rwf_status; on failure a
 * thread-local message is available from rwf_last_error().
 */
#ifndef RWFAULT_H
#define RWFAULT_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(RWF_BUILDING_LIBRARY)
#    define RWF_API __declspec(dllexport)
#  else
#    define RWF_API __declspec(dllimport)
#  endif
#else
#  define RWF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rwf_status {
    RWF_OK = 0,
    RWF_ERR_PARSE = 1,      /* malformed scenario or telemetry document */
    RWF_ERR_VALIDATION = 2, /* value violates an invariant */
    RWF_ERR_DIVERGENCE = 3, /* plant state became non-finite */
    RWF_ERR_IO = 4,         /* file could not be read or written */
    RWF_ERR_ARGUMENT = 5,   /* null handle, bad index, short buffer */
    RWF_ERR_INTERNAL = 6
} rwf_status;

typedef struct rwf_scenario rwf_scenario;
typedef struct rwf_run rwf_run;
typedef struct rwf_telemetry rwf_telemetry;

typedef struct rwf_metrics {
    int n_wheels;
    int has_final_sigma_e;
    double final_sigma_e_norm;
    int has_fe_time;
    double fe_time;
    double max_speed_fraction;
    long total_saturation_events;
    int has_exp_fit_slope;
    double exp_fit_slope;
    long controllability_loss_events;
    int diverged;
} rwf_metrics;

RWF_API const char* rwf_version(void);
RWF_API const char* rwf_status_name(rwf_status status);

/* Message for the last failed call on this thread, "" if none. */
RWF_API const char* rwf_last_error(void);

/* Built-in scenarios. */
RWF_API size_t rwf_preset_count(void);
RWF_API const char* rwf_preset_name(size_t index);
RWF_API const char* rwf_preset_description(size_t index);

/* Scenario handles. `source` is a preset name or a JSON file path. */
RWF_API rwf_status rwf_scenario_load(const char* source, rwf_scenario** out);
RWF_API rwf_status rwf_scenario_from_text(const char* json_text, rwf_scenario** out);
RWF_API void rwf_scenario_free(rwf_scenario* scenario);
RWF_API int rwf_scenario_wheel_count(const rwf_scenario* scenario);
RWF_API rwf_status rwf_scenario_set_duration(rwf_scenario* scenario, double seconds);
RWF_API rwf_status rwf_scenario_set_dt(rwf_scenario* scenario, double seconds);
/* Default telemetry path from the document's "output" key, "" if none. */
RWF_API const char* rwf_scenario_output_path(const rwf_scenario* scenario);

/*
 * Copies the scenario as JSON into `buf` (NUL-terminated). `needed` receives
 * the required size including the terminator; pass buf = NULL to query it.
 */
RWF_API rwf_status rwf_scenario_to_json(const rwf_scenario* scenario, char* buf, size_t cap, size_t* needed);

/*
 * Runs the closed loop. On RWF_ERR_DIVERGENCE `*out` still receives a run
 * holding the telemetry up to the last valid step.
 */
RWF_API rwf_status rwf_run_scenario(const rwf_scenario* scenario, rwf_run** out);
RWF_API void rwf_run_free(rwf_run* run);
RWF_API size_t rwf_run_record_count(const rwf_run* run);
RWF_API rwf_status rwf_run_metrics(const rwf_run* run, rwf_metrics* out);
/* Per-wheel terminal |theta_hat - phi| and saturation-event count. */
RWF_API rwf_status rwf_run_wheel_metrics(const rwf_run* run, int wheel, double* estimation_error,
                                         long* saturation_events);
RWF_API rwf_status rwf_run_write_csv(const rwf_run* run, const char* path);

/* Telemetry files and run comparison. */
RWF_API rwf_status rwf_telemetry_read(const char* path, rwf_telemetry** out);
RWF_API void rwf_telemetry_free(rwf_telemetry* telemetry);
RWF_API size_t rwf_telemetry_record_count(const rwf_telemetry* telemetry);
RWF_API int rwf_telemetry_wheel_count(const rwf_telemetry* telemetry);

/*
 * Compares run a against run b. `wheels` holds 1-based indices (NULL/0 for
 * all). With after_fe != 0 the averaging window starts fe_margin seconds after
 * the first FE time. The text report is copied to `buf` like
 * rwf_scenario_to_json; `ratios`, when non-NULL, receives mean|u|_a / mean|u|_b
 * per requested wheel.
 */
RWF_API rwf_status rwf_compare(const rwf_telemetry* a, const rwf_telemetry* b, const int* wheels,
                               size_t n_wheels, int after_fe, double fe_margin, double* ratios, char* buf,
                               size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* RWFAULT_H */
