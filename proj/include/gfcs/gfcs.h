/*
 * Copyright 2026 The gfcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GFCS_GFCS_H
#define GFCS_GFCS_H

/*
 * C interface to the gfcs library.
 *
 * Objects are opaque handles created by *_load / *_generate / gfcs_train and
 * released with the matching *_free. Every fallible call returns a
 * gfcs_status; on failure gfcs_last_error() describes what went wrong. The
 * message is thread-local and stays valid until the next failing call on the
 * same thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GFCS_BUILDING_LIBRARY)
#    define GFCS_API __declspec(dllexport)
#  else
#    define GFCS_API __declspec(dllimport)
#  endif
#else
#  define GFCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gfcs_status {
  GFCS_OK = 0,
  GFCS_ERR_INVALID_INPUT = 1,
  GFCS_ERR_IO = 2,
  GFCS_ERR_PARSE = 3,
  GFCS_ERR_UNSUPPORTED_VERSION = 4,
  GFCS_ERR_NUMERICAL = 5,
  GFCS_ERR_TRAINING = 6,
  GFCS_ERR_EMPTY_SELECTION = 7,
  GFCS_ERR_SHORTFALL = 8,
  GFCS_ERR_DEGENERATE = 9,
  GFCS_ERR_EXHAUSTED = 10,
  GFCS_ERR_BUDGET = 11,
  GFCS_ERR_INTERNAL = 12
} gfcs_status;

typedef struct gfcs_model gfcs_model;
typedef struct gfcs_dataset gfcs_dataset;

GFCS_API const char* gfcs_version(void);
GFCS_API const char* gfcs_last_error(void);
GFCS_API const char* gfcs_status_name(gfcs_status status);

/* sqrt(0.001 * dim) */
GFCS_API double gfcs_default_nu(size_t dim);

/* ---- datasets ---------------------------------------------------------- */

typedef struct gfcs_generator_params {
  const char* generator; /* "blobs" or "minimages" */
  uint64_t seed;
  size_t height, width, channels; /* minimages */
  size_t dim;                     /* blobs */
  size_t classes;
  size_t per_class;
  double spread;   /* blobs: per-coordinate standard deviation */
  double noise;    /* minimages: pixel noise standard deviation */
  double contrast; /* minimages: class pattern amplitude */
} gfcs_generator_params;

GFCS_API void gfcs_generator_params_default(gfcs_generator_params* params);
GFCS_API gfcs_status gfcs_dataset_generate(const gfcs_generator_params* params, gfcs_dataset** out);
GFCS_API gfcs_status gfcs_dataset_load(const char* path, gfcs_dataset** out);
GFCS_API gfcs_status gfcs_dataset_save(const gfcs_dataset* data, const char* path);
GFCS_API void gfcs_dataset_free(gfcs_dataset* data);
GFCS_API size_t gfcs_dataset_size(const gfcs_dataset* data);
GFCS_API gfcs_status gfcs_dataset_shape(const gfcs_dataset* data, size_t* height, size_t* width,
                                        size_t* channels, size_t* classes);
/* Copies item `index` into `input` (length `len` = h * w * c). */
GFCS_API gfcs_status gfcs_dataset_item(const gfcs_dataset* data, size_t index, double* input,
                                       size_t len, int* label);

/* ---- models ------------------------------------------------------------ */

GFCS_API gfcs_status gfcs_model_load(const char* path, gfcs_model** out);
GFCS_API gfcs_status gfcs_model_save(const gfcs_model* model, const char* path);
GFCS_API void gfcs_model_free(gfcs_model* model);
GFCS_API gfcs_status gfcs_model_shape(const gfcs_model* model, size_t* height, size_t* width,
                                      size_t* channels, size_t* classes);
GFCS_API gfcs_status gfcs_model_forward(const gfcs_model* model, const double* x, size_t len,
                                        double* scores, size_t classes);
/* Gradient of w^T f(x) with respect to x, written to `grad` (length `len`). */
GFCS_API gfcs_status gfcs_model_weighted_gradient(const gfcs_model* model, const double* x,
                                                  size_t len, const double* w, size_t classes,
                                                  double* grad);

typedef struct gfcs_train_params {
  const char* arch; /* preset name or layer list, see README */
  double learning_rate;
  double momentum;
  size_t epochs;
  size_t batch_size;
  uint64_t seed;
  double test_fraction; /* held out for the reported test accuracy */
} gfcs_train_params;

typedef struct gfcs_train_report {
  double train_accuracy;
  double test_accuracy;
  double final_loss;
  size_t train_size;
  size_t test_size;
} gfcs_train_report;

GFCS_API void gfcs_train_params_default(gfcs_train_params* params);
GFCS_API gfcs_status gfcs_train(const gfcs_dataset* data, const gfcs_train_params* params,
                                gfcs_model** out, gfcs_train_report* report);

/* ---- single attacks ---------------------------------------------------- */

typedef enum gfcs_method {
  GFCS_METHOD_GFCS = 0,
  GFCS_METHOD_GF_ONLY = 1,
  GFCS_METHOD_SIMBA_ODS = 2,
  GFCS_METHOD_SIMBA_PIXEL = 3,
  GFCS_METHOD_SIMBA_DCT = 4,
  GFCS_METHOD_SIMBA_PCA_GRADIENTS = 5,
  GFCS_METHOD_SIMBA_PCA_IMAGES = 6
} gfcs_method;

GFCS_API gfcs_status gfcs_method_from_name(const char* name, gfcs_method* out);

typedef struct gfcs_attack_params {
  gfcs_method method;
  double epsilon;        /* step length */
  double nu;             /* l2 bound; <= 0 selects sqrt(0.001 D) */
  uint64_t budget;       /* victim queries */
  int targeted;          /* nonzero for a targeted attack */
  long target;           /* target class, or -1 for a uniform random one */
  int log_loss;          /* nonzero: targeted log-softmax loss instead of margin */
  int box_enabled;
  double box_lo, box_hi;
  uint64_t seed;
  size_t dct_freq;       /* 0: min(H, W) / 2 */
  int dct_random_order;  /* nonzero: shuffle the DCT basis */
  size_t pca_k;          /* 0: min(D, 100) */
} gfcs_attack_params;

typedef struct gfcs_attack_result {
  int success;
  char reason[32];
  uint64_t total_queries;
  uint64_t gradient_queries;
  uint64_t coimage_queries;
  uint64_t basis_queries;
  uint64_t accepted_steps;
  double final_norm;
  double epsilon;
  double nu;
  size_t label;
  size_t original_class;
  size_t final_class;
  long target; /* -1 when untargeted */
} gfcs_attack_result;

GFCS_API void gfcs_attack_params_default(gfcs_attack_params* params);

/* Attacks item `index` of `data`. The victim's scores at the clean input are
 * computed without charge. When `trace_path` is non-null every evaluated
 * candidate is written there as one JSON object per line. */
GFCS_API gfcs_status gfcs_attack_example(const gfcs_model* victim, const gfcs_model* const* surrogates,
                                         size_t n_surrogates, const gfcs_dataset* data, size_t index,
                                         const gfcs_attack_params* params, const char* trace_path,
                                         gfcs_attack_result* out);

/* ---- campaigns --------------------------------------------------------- */

typedef struct gfcs_summary_row {
  char method[32];
  double epsilon;
  int median_defined;
  double median;         /* +inf when undefined */
  double standard_error; /* +inf when undefined */
  double success_rate;
  size_t n;
} gfcs_summary_row;

typedef void (*gfcs_summary_callback)(const gfcs_summary_row* row, void* user);

/* Runs the campaign described by the key-value file at `spec_path`.
 * `workers` > 0 overrides the file's worker count. One callback per method. */
GFCS_API gfcs_status gfcs_campaign_run(const char* spec_path, size_t workers,
                                       gfcs_summary_callback callback, void* user);

/* One campaign per step length; the table goes to `out_csv` when non-null
 * (and to <output>/sweep.csv when the spec names an output directory). */
GFCS_API gfcs_status gfcs_sweep_run(const char* spec_path, const double* epsilons, size_t count,
                                    size_t workers, const char* out_csv,
                                    gfcs_summary_callback callback, void* user);

/* ---- self-check -------------------------------------------------------- */

typedef void (*gfcs_check_callback)(const char* name, int passed, const char* detail, void* user);

GFCS_API gfcs_status gfcs_selfcheck(const char* const* model_paths, size_t count,
                                    gfcs_check_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* GFCS_GFCS_H */
