/* C interface to the ctcp library. Every call returns a ctcp_status; on
 * failure ctcp_last_error() describes the problem for the calling thread.
 * Strings handed out by the library are freed with ctcp_string_free. */
#ifndef CTCP_H
#define CTCP_H

#include <stdint.h>

#if defined(_WIN32)
#  ifdef CTCP_BUILDING
#    define CTCP_API __declspec(dllexport)
#  else
#    define CTCP_API __declspec(dllimport)
#  endif
#else
#  define CTCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CTCP_OK = 0,
    CTCP_ERR_CONFIG = 1,
    CTCP_ERR_USAGE = 2,
    CTCP_ERR_DOMAIN = 3,
    CTCP_ERR_CONVERGENCE = 4,
    CTCP_ERR_NUMERIC = 5,
    CTCP_ERR_SINGULAR = 6,
    CTCP_ERR_NO_CROSSING = 7,
    CTCP_ERR_UNDETERMINED = 8,
    CTCP_ERR_INTERNAL = 9
} ctcp_status;

typedef struct ctcp_config ctcp_config;

typedef enum { CTCP_FORM_TWO_DELAY = 0, CTCP_FORM_REDUCED = 1 } ctcp_delay_form;

typedef enum {
    CTCP_AXIS_KAPPA = 0,
    CTCP_AXIS_ALPHA = 1,
    CTCP_AXIS_K = 2,
    CTCP_AXIS_B = 3
} ctcp_axis;

typedef enum {
    CTCP_CLASS_ONE_POSITIVE_ROOT = 0,
    CTCP_CLASS_TWO_POSITIVE_ROOTS = 1,
    CTCP_CLASS_NO_CROSSING = 2
} ctcp_condition_class;

CTCP_API const char* ctcp_version(void);

/* Message of the last failed call on this thread ("" if none). */
CTCP_API const char* ctcp_last_error(void);

/* Process exit code for a status: 0 ok, 1 config or usage, 3 undetermined,
 * 2 otherwise. */
CTCP_API int ctcp_status_exit_code(ctcp_status s);

CTCP_API void ctcp_string_free(char* s);

CTCP_API ctcp_status ctcp_config_parse(const char* text, ctcp_config** out);
CTCP_API ctcp_status ctcp_config_load(const char* path, ctcp_config** out);
CTCP_API ctcp_status ctcp_config_clone(const ctcp_config* cfg, ctcp_config** out);
CTCP_API void ctcp_config_free(ctcp_config* cfg);
/* Applies one key = value assignment, validating the result. */
CTCP_API ctcp_status ctcp_config_set(ctcp_config* cfg, const char* key, const char* value);
/* Numeric value of a key; topology reads as 1, 2 or 3. */
CTCP_API ctcp_status ctcp_config_get(const ctcp_config* cfg, const char* key, double* value);
CTCP_API ctcp_status ctcp_config_serialize(const ctcp_config* cfg, char** out);

typedef struct {
    double w1, w2;
    double total_loss1, total_loss2;
    double residual1, residual2;
} ctcp_equilibrium_result;

CTCP_API ctcp_status ctcp_equilibrium(const ctcp_config* cfg, ctcp_equilibrium_result* out);

typedef struct {
    double kappa_c;
    double omega0;
    double alpha_prime;
    ctcp_condition_class condition_class;
} ctcp_crossing_result;

/* Numeric first crossing of the two-delay model for kappa <= kappa_max.
 * Returns CTCP_ERR_NO_CROSSING when there is none. */
CTCP_API ctcp_status ctcp_hopf_locate(const ctcp_config* cfg, double kappa_max,
                                      ctcp_crossing_result* out);

typedef struct {
    double kappa_c, omega0;
    double g20_re, g20_im, g11_re, g11_im, g02_re, g02_im, g21_re, g21_im;
    double c1_re, c1_im;
    double alpha_prime, mu2, beta2;
    int supercritical;
    int orbitally_stable;
    double center_manifold_residual;
} ctcp_hopf_result;

CTCP_API ctcp_status ctcp_hopf_analyze(const ctcp_config* cfg, double kappa_max,
                                       ctcp_hopf_result* out);

typedef struct {
    double periodicity_metric; /* negative when the trace is too short */
    uint64_t arrivals, departures, drops, backlog; /* sampled queue */
    int max_occupancy;
    int conserved;
    uint64_t samples;
} ctcp_packet_result;

CTCP_API ctcp_status ctcp_packet_run(const ctcp_config* cfg, ctcp_packet_result* out);

/* Command runners. On CTCP_OK or CTCP_ERR_UNDETERMINED *out holds the full
 * report or CSV text. */
CTCP_API ctcp_status ctcp_run_equilibrium(const ctcp_config* cfg, char** out);
CTCP_API ctcp_status ctcp_run_stability(const ctcp_config* cfg, double kappa_max, char** out);
CTCP_API ctcp_status ctcp_run_hopf(const ctcp_config* cfg, double kappa_max, char** out);

typedef struct {
    double kappa; /* NaN: use the config value */
    double T;     /* 0: default */
    double h;     /* 0: default */
    ctcp_delay_form form;
    int phase;
    int stride;
} ctcp_simulate_options;

CTCP_API void ctcp_simulate_options_init(ctcp_simulate_options* opt);
CTCP_API ctcp_status ctcp_run_simulate(const ctcp_config* cfg, const ctcp_simulate_options* opt,
                                       char** out);
CTCP_API ctcp_status ctcp_run_sweep(const ctcp_config* cfg, double kappa_min, double kappa_max,
                                    double kappa_step, double T, ctcp_delay_form form, char** out);
/* axis1 is bisected for each of `points` values of axis2 in [min, max]
 * (min = max = 0 picks a default range). */
CTCP_API ctcp_status ctcp_run_chart(const ctcp_config* cfg, ctcp_axis axis1, ctcp_axis axis2,
                                    double min, double max, int points, ctcp_delay_form model,
                                    char** out);
CTCP_API ctcp_status ctcp_run_packetsim(const ctcp_config* cfg, char** out);

#ifdef __cplusplus
}
#endif

#endif
