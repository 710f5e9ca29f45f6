#ifndef RATNET_RATNET_H
#define RATNET_RATNET_H

/*
 * C interface to the ratnet library: algebra of rational neural networks
 * with activation 1/x. Objects are opaque handles; every call returns a
 * status code and, on failure, leaves a message in ratnet_last_error().
 * Strings returned through char** outputs are owned by the caller and
 * released with ratnet_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RATNET_BUILDING)
#    define RATNET_API __declspec(dllexport)
#  else
#    define RATNET_API __declspec(dllimport)
#  endif
#else
#  define RATNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ratnet_status {
    RATNET_OK = 0,
    RATNET_ERR_INVALID_ARGUMENT = 1,
    RATNET_ERR_SHAPE = 2,
    RATNET_ERR_DOMAIN = 3,
    RATNET_ERR_NOT_DIVISIBLE = 4,
    RATNET_ERR_NUMERIC = 5,
    RATNET_ERR_PARSE = 6,
    RATNET_ERR_IO = 7,
    RATNET_ERR_TIMEOUT = 8,
    RATNET_ERR_INTERNAL = 9
} ratnet_status;

typedef struct ratnet_poly ratnet_poly;        /* homogeneous polynomial */
typedef struct ratnet_weights ratnet_weights;  /* architecture + weight matrices */
typedef struct ratnet_tuple ratnet_tuple;      /* (P_1, ..., P_k, Q) */

/* Library version, e.g. "1.0.0". */
RATNET_API const char* ratnet_version(void);
/* Message of the last failed call on this thread ("" if none). */
RATNET_API const char* ratnet_last_error(void);
RATNET_API const char* ratnet_status_name(ratnet_status s);
RATNET_API void ratnet_string_free(char* s);

/* Relative threshold for dropping tiny floating-point coefficients (default 1e-13). */
RATNET_API ratnet_status ratnet_set_cleanup_threshold(double rel);

/* ---- polynomials ---- */
RATNET_API ratnet_status ratnet_poly_from_json(const char* json, ratnet_poly** out);
RATNET_API ratnet_status ratnet_poly_to_json(const ratnet_poly* p, char** json);
RATNET_API void ratnet_poly_free(ratnet_poly* p);
RATNET_API ratnet_status ratnet_poly_mul(const ratnet_poly* a, const ratnet_poly* b, ratnet_poly** out);
/* Evaluates at a complex point given as separate real/imaginary arrays (im may be NULL). */
RATNET_API ratnet_status ratnet_poly_evaluate(const ratnet_poly* p, const double* re, const double* im, size_t n,
                                              double* out_re, double* out_im);

/* ---- weights ---- */
RATNET_API ratnet_status ratnet_weights_from_json(const char* json, ratnet_weights** out);
RATNET_API ratnet_status ratnet_weights_to_json(const ratnet_weights* w, char** json);
RATNET_API void ratnet_weights_free(ratnet_weights* w);
/* field: "real", "complex" or "gfp"; prime is used for "gfp" only (0 selects the default). */
RATNET_API ratnet_status ratnet_weights_random(const char* arch, const char* field, uint64_t seed, uint64_t prime,
                                               ratnet_weights** out);

/* ---- tuples ---- */
RATNET_API ratnet_status ratnet_tuple_from_json(const char* json, ratnet_tuple** out);
RATNET_API ratnet_status ratnet_tuple_to_json(const ratnet_tuple* t, char** json);
RATNET_API void ratnet_tuple_free(ratnet_tuple* t);
RATNET_API size_t ratnet_tuple_num_outputs(const ratnet_tuple* t);

/* ---- architecture arithmetic; arch is a comma-separated list such as "3,3,3,3" ---- */
RATNET_API ratnet_status ratnet_degrees(const char* arch, uint32_t* n, uint32_t* m);
RATNET_API ratnet_status ratnet_param_count(const char* arch, uint64_t* out);
RATNET_API ratnet_status ratnet_ambient_dim(const char* arch, uint64_t* out);

/* ---- network ---- */
/* Coefficient tuple of the network; binary != 0 uses the closed form for (2,...,2,k). */
RATNET_API ratnet_status ratnet_forward(const ratnet_weights* w, int binary, ratnet_tuple** out);
/* JSON report {"common_factor_suspected": bool}. */
RATNET_API ratnet_status ratnet_tuple_check(const ratnet_tuple* t, uint64_t seed, char** json);
/* Numeric network value at x; complex in/out via separate arrays (im arrays may be NULL for real weights). */
RATNET_API ratnet_status ratnet_eval(const ratnet_weights* w, const double* x_re, const double* x_im, size_t n,
                                     double* out_re, double* out_im, size_t out_len);
/* H(x, z) for a one-hidden-layer network. */
RATNET_API ratnet_status ratnet_hpoly(const ratnet_weights* w, ratnet_poly** out);

/* ---- factorisation ---- */
typedef struct ratnet_factor_options {
    double reassembly_tol; /* 0 selects 1e-8 */
    uint64_t seed;
    int binary;            /* nonzero: binary-form root factorisation */
} ratnet_factor_options;

/* JSON FactorReport; *decomposable receives 0/1. */
RATNET_API ratnet_status ratnet_factor(const ratnet_poly* p, const ratnet_factor_options* opt, char** json,
                                       int* decomposable);

/* ---- reconstruction and membership ---- */
typedef struct ratnet_reconstruct_options {
    double tol;      /* 0 selects 1e-6 */
    int real_only;
    uint64_t seed;
} ratnet_reconstruct_options;

/* Recovers weights for a one-hidden-layer or binary single-output architecture.
 * JSON verdict; *in_model receives 0/1. */
RATNET_API ratnet_status ratnet_reconstruct(const ratnet_tuple* t, const char* arch,
                                            const ratnet_reconstruct_options* opt, char** json, int* in_model);
/* Membership test: moment-matrix rank for one hidden layer, resultant screen for
 * binary multi-output, reconstruction for binary single-output. */
RATNET_API ratnet_status ratnet_membership(const ratnet_tuple* t, const char* arch,
                                           const ratnet_reconstruct_options* opt, char** json, int* in_model);

/* ---- dimension ---- */
RATNET_API ratnet_status ratnet_dim(const char* arch, uint64_t prime, uint64_t seed, double timeout_s, char** json,
                                    uint64_t* rank);

typedef struct ratnet_census_options {
    uint64_t max_params;
    uint32_t max_layers;
    uint32_t max_width;
    uint64_t prime;
    uint64_t seed;
    double timeout_s;
    uint32_t workers;
} ratnet_census_options;

typedef void (*ratnet_progress_fn)(const char* line, void* user);

/* CSV text of the census; progress (may be NULL) receives one line per architecture. */
RATNET_API ratnet_status ratnet_census(const ratnet_census_options* opt, ratnet_progress_fn progress, void* user,
                                       char** csv);
RATNET_API ratnet_status ratnet_census_count(uint64_t max_params, uint32_t max_layers, uint32_t max_width,
                                             uint64_t* count);

/* ---- training ---- */
typedef struct ratnet_train_options {
    uint32_t inits;
    uint64_t epochs;
    double lr;
    uint64_t seed;
    double exclusion_radius;
    uint32_t workers;
    double clip; /* <= 0 disables clipping */
} ratnet_train_options;

/* Runs the experiment; if out_dir is non-NULL writes per-run CSV and weights JSON
 * plus aggregate.csv there. Summary JSON in *json. */
RATNET_API ratnet_status ratnet_train(const ratnet_train_options* opt, const char* out_dir, ratnet_progress_fn progress,
                                      void* user, char** json);

#ifdef __cplusplus
}
#endif

#endif /* RATNET_RATNET_H */
