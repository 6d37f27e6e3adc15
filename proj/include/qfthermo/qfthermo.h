/* C interface to the qfthermo library.
 *
 * Every call returns a qft_status.  On failure the context (or, for calls
 * without one, the calling thread) keeps a message readable through
 * qft_last_error.  Handles are opaque; each *_create has a *_destroy, and
 * destroying NULL is a no-op.  Strings passed in are copied.  Strings
 * returned stay valid until the owning handle is destroyed or the next call
 * on it. */
#ifndef QFTHERMO_H
#define QFTHERMO_H

#include <stddef.h>

#if defined(_WIN32)
#define QFT_API __declspec(dllexport)
#else
#define QFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qft_status {
    QFT_OK = 0,
    QFT_ERR_DOMAIN = 1,
    QFT_ERR_MARKOV_VIOLATION,
    QFT_ERR_DEGENERATE_LIFT,
    QFT_ERR_CAP_EXCEEDED,
    QFT_ERR_UNPARSEABLE,
    QFT_ERR_UNKNOWN_LABEL,
    QFT_ERR_NON_CONVERGENT,
    QFT_ERR_BRACKET_FAILURE,
    QFT_ERR_EMPTY_CENSUS,
    QFT_ERR_BRANCH_COLLISION,
    QFT_ERR_CONFIG,
    QFT_ERR_VALIDATION,
    QFT_ERR_INTERNAL = 100
} qft_status;

typedef struct qft_complex {
    double re, im;
} qft_complex;

typedef struct qft_traces {
    qft_complex x, y, z;
} qft_traces;

/* Row-major [[a, b], [c, d]]. */
typedef struct qft_matrix {
    qft_complex a, b, c, d;
} qft_matrix;

typedef enum qft_automorphism { QFT_AB_TWIST = 0, QFT_BA_TWIST, QFT_SWAP, QFT_INVERT_A } qft_automorphism;

typedef struct qft_params {
    int n_max;                /* ladder depth, 4..10 */
    int s_max;                /* parabolic power cap */
    int workers;              /* 0 = all hardware threads */
    double root_tolerance;    /* entropy bisection tolerance in t */
} qft_params;

typedef struct qft_context qft_context;

QFT_API const char* qft_version(void);
QFT_API const char* qft_status_name(qft_status status);
/* Message of the last failure on ctx, or of the calling thread if ctx is NULL. */
QFT_API const char* qft_last_error(const qft_context* ctx);

QFT_API void qft_default_params(qft_params* out);
/* params == NULL takes the defaults; nMax above 10 is CAP_EXCEEDED. */
QFT_API qft_status qft_context_create(const qft_params* params, qft_context** out);
QFT_API void qft_context_destroy(qft_context* ctx);

/* ---- trace coordinates and representations ---- */

/* Roots of z^2 - xyz + x^2 + y^2 = 0; plus = larger modulus. */
QFT_API qft_status qft_solve_z(qft_complex x, qft_complex y, int plus, qft_complex* out);
QFT_API qft_status qft_markov_residual(const qft_traces* t, qft_complex* out);
QFT_API qft_status qft_apply_automorphism_traces(const qft_traces* t, qft_automorphism phi, qft_traces* out);
/* (x, y) + t (dx, dy), z by nearest-root continuation from t->z. */
QFT_API qft_status qft_continue_point(const qft_traces* base, qft_complex dx, qft_complex dy, double t,
                                      qft_traces* out);

/* Image of the tangent (dx, dy) at t under the derivative of phi. */
QFT_API qft_status qft_push_forward(const qft_traces* t, qft_complex dx, qft_complex dy, qft_automorphism phi,
                                    qft_complex* out_dx, qft_complex* out_dy);

QFT_API qft_status qft_add_traces(qft_context* ctx, const char* label, const qft_traces* t);
QFT_API qft_status qft_add_matrices(qft_context* ctx, const char* label, const qft_matrix* a, const qft_matrix* b);
/* Registers N rho N^-1 under new_label. */
QFT_API qft_status qft_add_conjugate(qft_context* ctx, const char* label, const char* new_label, const qft_matrix* n);
/* Registers phi(rho) (generators rho(phi(alpha)), rho(phi(beta))) under new_label. */
QFT_API qft_status qft_add_automorphism(qft_context* ctx, const char* label, const char* new_label,
                                        qft_automorphism phi);
QFT_API qft_status qft_get_traces(const qft_context* ctx, const char* label, qft_traces* out);
QFT_API qft_status qft_is_fuchsian(const qft_context* ctx, const char* label, int* out);
/* Translation length of a word in a, A, b, B. */
QFT_API qft_status qft_word_length(const qft_context* ctx, const char* label, const char* word, double* out);

/* ---- thermodynamics ---- */

#define QFT_LADDER_MAX 16

typedef struct qft_pressure {
    double value;
    double error_bar;
    int extrapolated;
    double tail_bound;
    int ladder_len;
    int ladder_n[QFT_LADDER_MAX];
    double ladder[QFT_LADDER_MAX];   /* (1/n) log Z_n */
} qft_pressure;

typedef struct qft_root {
    double value;
    double error_bar;
    double slope;                    /* d pressure / dt at the root */
    qft_pressure pressure;           /* at the root */
} qft_root;

/* P(-t sum_i coefficient_i tau_{label_i}) with its convergence checks. */
QFT_API qft_status qft_pressure_at(qft_context* ctx, const char* const* labels, const double* coefficients,
                                   size_t count, double t, qft_pressure* out);
QFT_API qft_status qft_entropy(qft_context* ctx, const char* label, qft_root* out);
QFT_API qft_status qft_weighted_entropy(qft_context* ctx, const char* rho, const char* eta, double a, double b,
                                        qft_root* out);

/* h(eta) - h(rho) from the same spectra; the error bar is the spread over
 * the last three ladder depths. */
QFT_API qft_status qft_entropy_gap(qft_context* ctx, const char* rho, const char* eta, double* value,
                                   double* error_bar);

typedef struct qft_z1_probe {
    int converging;
    double exponent;
    double exponent_error;
} qft_z1_probe;

QFT_API qft_status qft_z1_probe_run(double effective_scale, const int* s_max_schedule, size_t count,
                                    qft_z1_probe* out);

/* ---- oracle ---- */

typedef struct qft_slope_fit {
    double slope;
    double error;
    double max_relative_residual;
    int boundary_warning;
} qft_slope_fit;

QFT_API qft_status qft_ball_count(qft_context* ctx, const char* label, double radius, int word_cap,
                                  unsigned long long* count, int* boundary_warning);
/* radii == NULL uses the default grid R = 6, 6.5, ..., 12. */
QFT_API qft_status qft_poincare_entropy(qft_context* ctx, const char* label, const double* radii, size_t count,
                                        int word_cap, qft_slope_fit* out);

typedef struct qft_census qft_census;

/* R_T(labels[0]) with the lengths of every label; sorted by class. */
QFT_API qft_status qft_census_create(qft_context* ctx, const char* const* labels, size_t count, double max_length,
                                     int word_cap, qft_census** out);
QFT_API void qft_census_destroy(qft_census* census);
QFT_API size_t qft_census_size(const qft_census* census);
QFT_API int qft_census_complete(const qft_census* census);
QFT_API const char* qft_census_word(const qft_census* census, size_t row);
/* Length of row under the label at position column of the create call. */
QFT_API double qft_census_length(const qft_census* census, size_t row, size_t column);

/* Rotation classes of coding cycles (lengths under coding_label) vs
 * non-parabolic classes (lengths under oracle_label) up to word
 * length max_word_length.  *mismatches counts classes present on one side
 * only or with lengths further apart than tolerance. */
QFT_API qft_status qft_census_bijection(qft_context* ctx, const char* coding_label, const char* oracle_label,
                                        int max_word_length, double tolerance,
                                        size_t* coding_classes, size_t* oracle_classes, size_t* mismatches,
                                        double* max_length_gap);

/* ---- Manhattan curves and intersection ---- */

typedef struct qft_sample {
    double a, b, residual, error_bar;
    int ok;
} qft_sample;

typedef struct qft_curve qft_curve;

QFT_API qft_status qft_curve_create(qft_context* ctx, const char* rho, const char* eta, int grid_size,
                                    qft_curve** out);
QFT_API void qft_curve_destroy(qft_curve* curve);
QFT_API size_t qft_curve_size(const qft_curve* curve);
QFT_API qft_status qft_curve_sample(const qft_curve* curve, size_t i, qft_sample* out);
/* Empty unless sample i failed. */
QFT_API const char* qft_curve_sample_error(const qft_curve* curve, size_t i);
QFT_API void qft_curve_endpoints(const qft_curve* curve, qft_root* h_rho, qft_root* h_eta);
QFT_API int qft_curve_convex(const qft_curve* curve, double tolerance);
QFT_API int qft_curve_decreasing(const qft_curve* curve);
/* I(rho, eta) from the tangent at (h(rho), 0). */
QFT_API qft_status qft_curve_intersection(const qft_curve* curve, double* value, double* error_bar);

typedef enum qft_verdict { QFT_EQUALITY = 0, QFT_STRICT = 1, QFT_VIOLATED = 2 } qft_verdict;

typedef struct qft_intersection {
    double i_slope, i_slope_error;
    double i_orbit;
    size_t orbit_classes;
    double j, j_error;
    double j_reverse, j_reverse_error;
    double j_orbit;
    double estimator_gap;
    qft_verdict verdict;
    int completeness_warning;
} qft_intersection;

QFT_API qft_status qft_intersection_report(qft_context* ctx, const char* rho, const char* eta, int grid_size,
                                           double census_length, int word_cap, qft_intersection* out);
QFT_API qft_status qft_orbit_average(qft_context* ctx, const char* rho, const char* eta, double max_length,
                                     int word_cap, double* value, size_t* classes);

typedef struct qft_dual_report {
    double lhs, lhs_error;
    double rhs, rhs_error;
    double slack, tolerance;
    qft_verdict verdict;
} qft_dual_report;

QFT_API qft_status qft_dual_rigidity(qft_context* ctx, const char* rho, const char* eta, double a, double b,
                                     qft_dual_report* out);

/* ---- pressure metric ---- */

typedef struct qft_metric_params {
    double eps;
    int max_halvings;
    double richardson_agreement;
    double richardson_floor;
    int grid_size;
    double spot_census_length;
    int spot_word_cap;
} qft_metric_params;

typedef struct qft_pressure_form {
    double value, error_bar;
    double eps;
    int halvings;
    double at_eps, at_2eps;
    double j[5];                 /* t = -2, -1, 0, 1, 2 steps */
    int depths;
    double by_depth[3];
    double orbit_gap;
} qft_pressure_form;

QFT_API void qft_default_metric_params(qft_metric_params* out);
QFT_API qft_status qft_pressure_form_eval(qft_context* ctx, const qft_traces* base, qft_complex dx, qft_complex dy,
                                          const qft_metric_params* params, qft_pressure_form* out);
QFT_API qft_status qft_pressure_form_polarized(qft_context* ctx, const qft_traces* base, qft_complex vx,
                                               qft_complex vy, qft_complex wx, qft_complex wy,
                                               const qft_metric_params* params, double* value, double* error_bar);
/* derivatives[i] = D_v (h l_{words[i]}); *max_abs over all words. */
QFT_API qft_status qft_degeneracy_probe(qft_context* ctx, const qft_traces* base, qft_complex dx, qft_complex dy,
                                        const char* const* words, size_t count, double eps, double* derivatives,
                                        double* max_abs);
QFT_API qft_status qft_path_length(qft_context* ctx, const qft_traces* points, size_t count, double max_gap,
                                   const qft_metric_params* params, double* value, double* error_bar);

#ifdef __cplusplus
}
#endif

#endif /* QFTHERMO_H */
