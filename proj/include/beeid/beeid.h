/* beeid - bee identification error exponents and system simulation.
 *
 * C interface to the shared library: opaque handles, status codes, and a
 * thread-local error message. All rates and exponent values cross this
 * boundary in nats unless a function name says bits.
 */
#ifndef BEEID_H
#define BEEID_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum beeid_status {
    BEEID_OK = 0,
    BEEID_ERROR_INVALID_ARGUMENT = 1,
    BEEID_ERROR_PARSE = 2,
    BEEID_ERROR_INFEASIBLE = 3, /* hypothesis violated / empty feasible set */
    BEEID_ERROR_TOO_LARGE = 4,  /* exact-oracle size guard tripped */
    BEEID_ERROR_INTERNAL = 5
} beeid_status;

const char* beeid_status_name(beeid_status s);

/* Message for the most recent failing call on this thread. */
const char* beeid_last_error(void);

/* Worker cap for parallel loops; 0 restores the hardware default. Results
 * never depend on this setting. */
void beeid_set_max_threads(int n);

/* --- channels ---------------------------------------------------------- */

typedef struct beeid_channel beeid_channel;

beeid_status beeid_channel_create(int in_size, int out_size, const double* rows,
                                  beeid_channel** out);
beeid_status beeid_channel_load_json(const char* path, beeid_channel** out);
void beeid_channel_free(beeid_channel* c);

int beeid_channel_input_size(const beeid_channel* c);
int beeid_channel_output_size(const beeid_channel* c);
/* 1 when rows are permutations of each other and columns likewise. */
int beeid_channel_is_symmetric(const beeid_channel* c);
/* Crossover probability when the channel is a BSC; BEEID_ERROR_INFEASIBLE
 * otherwise. */
beeid_status beeid_channel_bsc_parameter(const beeid_channel* c, double* p_out);

/* --- naive (GLD) decoding exponents ------------------------------------ */

typedef enum beeid_metric {
    BEEID_METRIC_ML = 0,
    BEEID_METRIC_MMI = 1
} beeid_metric;

typedef enum beeid_naive_exponent {
    BEEID_NAIVE_RC_UPPER = 0,
    BEEID_NAIVE_RC_LOWER = 1,
    BEEID_NAIVE_TRC = 2,
    BEEID_NAIVE_EXPURGATED = 3,
    BEEID_NAIVE_RC_LIMIT = 4 /* large-L limit; threshold_L ignored */
} beeid_naive_exponent;

typedef struct beeid_naive_solver beeid_naive_solver;

/* q_x: composition over the input alphabet, NULL for uniform. */
beeid_status beeid_naive_solver_create(const beeid_channel* channel, const double* q_x,
                                       beeid_metric metric, beeid_naive_solver** out);
void beeid_naive_solver_free(beeid_naive_solver* s);

/* Lattice denominators for the nested grid search; 0 keeps the default.
 * Defaults: 100/50/200 with 3 refinement rounds for binary alphabets,
 * enumeration-budget-limited lattices otherwise. */
beeid_status beeid_naive_solver_set_resolution(beeid_naive_solver* s, int outer_den, int inner_den,
                                               int qy_cache_den, int refinement_rounds);
/* Documented accuracy scale of the grid outputs at the current settings. */
double beeid_naive_solver_tolerance(const beeid_naive_solver* s);

beeid_status beeid_naive_eval(beeid_naive_solver* s, beeid_naive_exponent which, double rate_nats,
                              int threshold_L, double* value_out);
beeid_status beeid_naive_curve(beeid_naive_solver* s, beeid_naive_exponent which,
                               const double* rates_nats, int n_rates, int threshold_L,
                               double* values_out);

/* Ordinary random coding exponent, min over Q_{Y|X} of D + [I - R]_+. */
beeid_status beeid_rc_ordinary(const beeid_channel* channel, const double* q_x, double rate_nats,
                               double* value_out);
/* Lower bound on the largest rate with a positive exponent. */
beeid_status beeid_rmax_lower_bound(const beeid_channel* channel, const double* q_x,
                                    double* value_out);

/* --- optimal (joint ML) decoding exponents ------------------------------ */

/* E_r^opt(R) for a symmetric channel and uniform input; the hypotheses are
 * checked and BEEID_ERROR_INFEASIBLE names the failed one. */
beeid_status beeid_opt_rc_exponent(const beeid_channel* channel, double rate_nats,
                                   double* value_out);
/* E_ex^opt(R): sup over sigma >= 1; sigma_max/grid_points <= 0 keep the
 * defaults (1e4, 200). */
beeid_status beeid_opt_ex_exponent(const beeid_channel* channel, double rate_nats,
                                   double sigma_max, int sigma_grid_points, double* value_out);

beeid_status beeid_bsc_critical_p(double tolerance, double* out);
beeid_status beeid_bsc_rate_break_nats(double p, double* out);
beeid_status beeid_rtrc_bits(double p, double* out);
/* Typical-random-binary-code bound, bits in and bits out. in_range_out may be
 * NULL. */
beeid_status beeid_tan_exponent_bits(double rate_bits, double p, double* value_out,
                                     int* in_range_out);
beeid_status beeid_gv_distance(double two_r_bits, double* out);

/* --- simulation --------------------------------------------------------- */

typedef struct beeid_sim_options {
    int joint_decoding;     /* 0: naive GLD per output, 1: ML permutation */
    int block_length;       /* n */
    int num_codewords;      /* M */
    int threshold_L;        /* naive mode: failure iff N_e >= L */
    beeid_metric metric;    /* naive mode */
    int map_decoder;        /* naive mode: 1 = argmax relaxation of the GLD */
    int iid_codebook;       /* 0: constant composition, 1: i.i.d. */
    int fresh_codebook;     /* 1: resample the codebook every trial */
    int exact;              /* naive mode: exact P{N_e >= L} instead of trials */
    unsigned long long trials;
} beeid_sim_options;

void beeid_sim_options_init(beeid_sim_options* opts);

typedef struct beeid_sim_report {
    unsigned long long trials;
    unsigned long long failures;
    unsigned long long successes;
    double p_hat;
    double wilson_lo;
    double wilson_hi;
    unsigned long long master_seed;
    int exact; /* p_hat is the exact oracle value; intervals degenerate */
} beeid_sim_report;

/* q_x: input law / composition target, NULL for uniform. trial_log_path:
 * optional JSON-lines file, one record per trial. */
beeid_status beeid_simulate(const beeid_channel* channel, const double* q_x,
                            const beeid_sim_options* opts, unsigned long long master_seed,
                            const char* trial_log_path, beeid_sim_report* report);

/* Exact P{N_e >= L} for a codebook sampled from (q_x, seed); the guards
 * require |Y|^n <= 1e7 and M <= 20. */
beeid_status beeid_exact_error_naive(const beeid_channel* channel, const double* q_x, int n, int m,
                                     int threshold_L, beeid_metric metric, int iid_codebook,
                                     unsigned long long codebook_seed, double* value_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BEEID_H */
