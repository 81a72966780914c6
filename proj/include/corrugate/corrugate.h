/* Copyright (c) 2026 the corrugate authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the corrugate library: isometric C1 curves from short curves via
 * Nash twists, and the Gaussian limit law of their rescaled difference
 * processes.
 *
 * Conventions:
 *   - every object is an opaque handle created by a crg_*_create/build
 *     function and released with the matching crg_*_destroy;
 *   - every fallible call returns crg_status; on failure the thread-local
 *     message from crg_last_error() describes the cause;
 *   - all output buffers are caller-allocated; sizes are stated per call;
 *   - 3-vectors are (x,y,z) triples of doubles; grids of G times yield
 *     row-major arrays of G*3 doubles unless noted.
 */

#ifndef CORRUGATE_CORRUGATE_H
#define CORRUGATE_CORRUGATE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CRG_API __declspec(dllexport)
#else
#define CRG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crg_status {
  CRG_OK = 0,
  CRG_ERR_INVALID = 1,     /* bad argument, unknown catalog entry, parse-level misuse */
  CRG_ERR_DOMAIN = 2,      /* domain precondition (not short, out of domain, degenerate) */
  CRG_ERR_TOO_LARGE = 3,   /* resource guard (enumeration cap, cost cap) */
  CRG_ERR_NOT_PSD = 4,     /* oracle covariance failed its PSD budget */
  CRG_ERR_INTERNAL = 5
} crg_status;

/* Thread-local message for the most recent failure in this thread. */
CRG_API const char* crg_last_error(void);
CRG_API const char* crg_version(void);

/* ------------------------------------------------------------------ curves */

typedef struct crg_curve crg_curve;

/* Catalog entries: "line" (dx,dy,dz[,ox,oy,oz]), "circle" (radius),
 * "helix" (a,b), "polynomial" (x0..,y0..,z0..). */
CRG_API crg_status crg_curve_create(const char* kind, const char* const* param_keys,
                                    const double* param_values, size_t param_count,
                                    crg_curve** out);
CRG_API crg_status crg_curve_create_tabulated(const double* us, const double* points_xyz,
                                              size_t count, crg_curve** out);
CRG_API void crg_curve_destroy(crg_curve* curve);

/* order 0..3; out3 receives the derivative vector */
CRG_API crg_status crg_curve_derivative(const crg_curve* curve, double u, int order,
                                        double out3[3]);

/* -------------------------------------------------------------------- frames */

typedef struct crg_frames crg_frames;

/* method: 0 = rotation-minimizing (double reflection), 1 = Frenet.
 * nodes must be strictly increasing in [0,1].  initial_normal3 may be NULL
 * for the automatic seed (Frenet normal when curvature allows). */
CRG_API crg_status crg_frames_build(const crg_curve* curve, int method, const double* nodes,
                                    size_t node_count, const double* initial_normal3,
                                    crg_frames** out);
CRG_API void crg_frames_destroy(crg_frames* frames);

/* out9 = X,Y,Z rows of the frame at u */
CRG_API crg_status crg_frames_eval(const crg_frames* frames, double u, double out9[9]);

/* Frenet frame at a single parameter (errors when curvature < 1e-8). */
CRG_API crg_status crg_frenet_frame(const crg_curve* curve, double u, double out9[9]);

/* -------------------------------------------------------------------- metric */

typedef struct crg_metric crg_metric;

/* kind: "const" (1 coefficient) or "poly" (c0..ck). */
CRG_API crg_status crg_metric_create(const char* kind, const double* coeffs, size_t coeff_count,
                                     crg_metric** out);
CRG_API crg_status crg_metric_create_tabulated(const double* us, const double* gs, size_t count,
                                               crg_metric** out);
CRG_API void crg_metric_destroy(crg_metric* metric);

CRG_API crg_status crg_metric_eval(const crg_metric* metric, double u, double* out);

typedef struct crg_shortness_report {
  double min_margin;
  double argmin_u;
  int is_strictly_short;
  int grid_size;
} crg_shortness_report;

CRG_API crg_status crg_shortness(const crg_curve* curve, const crg_metric* metric, int grid,
                                 crg_shortness_report* out);

/* r(u) = sqrt(g - |f0'|^2) */
CRG_API crg_status crg_residual_amplitude(const crg_curve* curve, const crg_metric* metric,
                                          double u, double* out);

/* d/du of r(u) Z(u) */
CRG_API crg_status crg_amplitude_derivative(const crg_curve* curve, const crg_metric* metric,
                                            const crg_frames* frames, double u, double out3[3]);

/* --------------------------------------------------------------------- twist */

typedef struct crg_phase crg_phase;
typedef struct crg_map crg_map;

CRG_API crg_status crg_phase_deterministic(int n, crg_phase** out);
/* Rademacher signs from the counter generator keyed by seed. */
CRG_API crg_status crg_phase_random(int n, uint64_t seed, crg_phase** out);
/* signs: n entries, each exactly +1 or -1 */
CRG_API crg_status crg_phase_from_signs(int n, const int8_t* signs, crg_phase** out);
CRG_API void crg_phase_destroy(crg_phase* phase);
CRG_API crg_status crg_phase_eval(const crg_phase* phase, double u, double* out);
CRG_API crg_status crg_phase_signs(const crg_phase* phase, int8_t* out_n);

CRG_API crg_status crg_map_build(const crg_curve* curve, const crg_metric* metric,
                                 const crg_frames* frames, const crg_phase* phase,
                                 int quadrature_order, crg_map** out);
CRG_API void crg_map_destroy(crg_map* map);

CRG_API crg_status crg_map_eval(const crg_map* map, double t, double out3[3]);
CRG_API crg_status crg_map_isometry_defect_at(const crg_map* map, double u, double* out);
CRG_API crg_status crg_map_isometry_defect(const crg_map* map, int grid, double* out);
CRG_API crg_status crg_map_sup_difference(const crg_map* map, int grid, double* out);
/* D_n on a sorted grid; out = nt*3 doubles.  cos_out/sin_out may be NULL;
 * when given they receive the deterministic cos channel and the
 * sign-dependent sin channel (cos + sin = out). */
CRG_API crg_status crg_map_scaled_difference(const crg_map* map, const double* t, size_t nt,
                                             double* out, double* cos_out, double* sin_out);

/* ----------------------------------------------------------------- ensembles */

typedef struct crg_ensemble crg_ensemble;

typedef struct crg_ensemble_config {
  int n;
  int samples;
  uint64_t master_seed;
  int quadrature_order; /* 0 -> 16 */
  int workers;          /* 0 -> auto */
  int sign_mode;        /* 0 random, 1 all_plus, 2 enumerate_all (test hooks) */
  uint64_t cost_cap;    /* 0 -> default */
} crg_ensemble_config;

CRG_API crg_status crg_ensemble_run(const crg_curve* curve, const crg_metric* metric,
                                    const crg_frames* frames, const crg_ensemble_config* config,
                                    const double* t_grid, size_t grid_size, crg_ensemble** out);
CRG_API void crg_ensemble_destroy(crg_ensemble* ensemble);

CRG_API crg_status crg_ensemble_size(const crg_ensemble* ensemble, int* samples, int* grid_size);
/* borrowed pointer to samples*grid*3 doubles, valid until destroy */
CRG_API const double* crg_ensemble_data(const crg_ensemble* ensemble);
/* deterministic cos channel of D_n, grid*3 doubles */
CRG_API crg_status crg_ensemble_cos_channel(const crg_ensemble* ensemble, double* out);
CRG_API crg_status crg_ensemble_sample_seed(const crg_ensemble* ensemble, int sample,
                                            uint64_t* out);
CRG_API crg_status crg_ensemble_wall_time(const crg_ensemble* ensemble, double* out);

/* --------------------------------------------------------- exact enumeration */

typedef struct crg_enumeration crg_enumeration;

/* All 2^n sign sequences (n <= 20), exact mean and population covariance. */
CRG_API crg_status crg_enumeration_run(const crg_curve* curve, const crg_metric* metric,
                                       const crg_frames* frames, int n, int quadrature_order,
                                       const double* t_grid, size_t grid_size,
                                       crg_enumeration** out);
CRG_API void crg_enumeration_destroy(crg_enumeration* enumeration);

CRG_API crg_status crg_enumeration_outcomes(const crg_enumeration* enumeration, uint64_t* out);
/* mean: grid*3 doubles; covariance: (grid*3)^2 doubles */
CRG_API crg_status crg_enumeration_moments(const crg_enumeration* enumeration, double* mean,
                                           double* covariance);
/* recompute outcome row `index` (grid*3 doubles) */
CRG_API crg_status crg_enumeration_outcome(const crg_enumeration* enumeration, uint64_t index,
                                           double* out);

/* ----------------------------------------------------------------- limit law */

typedef struct crg_bundle crg_bundle;

CRG_API crg_status crg_bundle_create(const crg_curve* curve, const crg_metric* metric,
                                     const crg_frames* frames, double r_min_guard,
                                     crg_bundle** out);
CRG_API void crg_bundle_destroy(crg_bundle* bundle);

CRG_API crg_status crg_limit_kernel(const crg_bundle* bundle, double t, double u, double out3[3]);
/* 3x3 row-major covariance block */
CRG_API crg_status crg_limit_covariance(const crg_bundle* bundle, double t1, double t2,
                                        double out9[9]);
/* (grid*3)^2 row-major covariance of the stacked process on the grid */
CRG_API crg_status crg_limit_covariance_matrix(const crg_bundle* bundle, const double* t_grid,
                                               size_t grid_size, double* out);
/* samples*(grid*3) exact Gaussian draws */
CRG_API crg_status crg_limit_sample(const crg_bundle* bundle, const double* t_grid,
                                    size_t grid_size, int samples, uint64_t seed, double* out);
/* one Euler path on {j/m}, out = (m+1)*3 doubles */
CRG_API crg_status crg_euler_limit_path(const crg_bundle* bundle, int resolution, uint64_t seed,
                                        double* out);

/* -------------------------------------------------------------------- stats */

/* mean: dim doubles; covariance and standard_errors: dim^2 doubles (may be
 * NULL when not wanted).  Unbiased covariance, normal-theory SEs. */
CRG_API crg_status crg_empirical_moments(const double* data, int samples, int dim, double* mean,
                                         double* covariance, double* standard_errors);

CRG_API crg_status crg_ks_gof(const double* sample, size_t count, double null_sigma,
                              double* statistic, double* p_value, int* degenerate);

CRG_API crg_status crg_rate_fit(const int* ns, const double* values, size_t count, double* slope,
                                double* intercept, double* r_squared);

/* pass (may be NULL): dim^2 ints, 1 where |emp-oracle| <= k_sigma*SE */
CRG_API crg_status crg_covariance_comparison(const double* empirical, const double* oracle,
                                             const double* standard_errors, int dim,
                                             double k_sigma, int* pass, double* worst_deviation,
                                             int* all_pass);

/* normal quantile helper (p in (0,1)) */
CRG_API crg_status crg_normal_quantile(double p, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CORRUGATE_CORRUGATE_H */
