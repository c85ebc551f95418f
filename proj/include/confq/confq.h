// Copyright 2026 The confq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CONFQ_CONFQ_H
#define CONFQ_CONFQ_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(CONFQ_BUILDING_LIBRARY)
#define CONFQ_API __declspec(dllexport)
#else
#define CONFQ_API __declspec(dllimport)
#endif
#else
#define CONFQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum confq_status {
  CONFQ_OK = 0,
  CONFQ_ERR_INVALID_ARGUMENT = 1,
  CONFQ_ERR_PARSE = 2,
  CONFQ_ERR_SCHEMA = 3,
  CONFQ_ERR_GEOMETRY = 4,
  CONFQ_ERR_TOPOLOGY = 5,
  CONFQ_ERR_NUMERIC = 6,
  CONFQ_ERR_IO = 7,
  CONFQ_ERR_INTERNAL = 99
} confq_status;

typedef struct confq_settings confq_settings;
typedef struct confq_dataset confq_dataset;
typedef struct confq_report confq_report;

/* Message of the last failed call on this thread; "" after a success. */
CONFQ_API const char* confq_last_error(void);
CONFQ_API const char* confq_status_name(confq_status status);
CONFQ_API const char* confq_version(void);

/* Strings returned through char** are owned by the caller. */
CONFQ_API void confq_string_free(char* s);

/* ---- settings ---------------------------------------------------------- */

CONFQ_API confq_status confq_settings_create(confq_settings** out);
CONFQ_API confq_status confq_settings_parse(const char* text, confq_settings** out);
CONFQ_API confq_status confq_settings_load(const char* path, confq_settings** out);
CONFQ_API confq_status confq_settings_set(confq_settings* settings, const char* key, const char* value);
/* Current value of one key, formatted as in settings text. */
CONFQ_API confq_status confq_settings_get(const confq_settings* settings, const char* key, char** out);
CONFQ_API confq_status confq_settings_text(const confq_settings* settings, char** out);
CONFQ_API void confq_settings_free(confq_settings* settings);

/* Parses an id list such as "1-3,9" into ascending unique integers. At most
   capacity values are written; *count receives the full count. */
CONFQ_API confq_status confq_parse_id_list(const char* text, int* out, size_t capacity, size_t* count);

/* ---- datasets ---------------------------------------------------------- */

/* Generates split.train + split.val + split.test molecules. */
CONFQ_API confq_status confq_dataset_generate(const confq_settings* settings, confq_dataset** out);
CONFQ_API confq_status confq_dataset_load(const char* manifest_path, confq_dataset** out);
CONFQ_API confq_status confq_dataset_save(const confq_dataset* dataset, const char* manifest_path);
CONFQ_API confq_status confq_dataset_size(const confq_dataset* dataset, size_t* out);
CONFQ_API void confq_dataset_free(confq_dataset* dataset);

/* CSV of labels recomputed from the stored Exact ensembles. With diff != 0
   the stored labels and the absolute differences are included, and
   *max_abs_diff (if not NULL) receives the largest difference. */
CONFQ_API confq_status confq_dataset_labels_csv(const confq_dataset* dataset, int diff, char** out,
                                                double* max_abs_diff);

/* Per-resplit MAE of labels computed directly from the tier ensemble
   ("mid", "low" or "exact") on each test split, as CSV. */
CONFQ_API confq_status confq_baseline_csv(const confq_dataset* dataset, const confq_settings* settings,
                                          const char* tier, char** out);

/* ---- training ---------------------------------------------------------- */

typedef struct confq_cell_result {
  int ok;
  double test_mae;
  double val_mae;
  int best_epoch;
  int epochs;
} confq_cell_result;

/* Trains one (model, target, resplit, train size) cell exactly as the
   matrix would. train_size <= 0 selects the full training split. When
   checkpoint_path is not NULL the trained model is written there. A
   diverged run returns CONFQ_OK with result->ok == 0 and the reason in
   confq_last_error(). */
CONFQ_API confq_status confq_train(const confq_dataset* dataset, const confq_settings* settings, int model_id,
                                   const char* target, int resplit, int train_size, const char* checkpoint_path,
                                   confq_cell_result* result);

/* ---- matrix and reports ------------------------------------------------ */

typedef void (*confq_cell_callback)(void* user, const char* cell_name, int ok, int reused, double seconds,
                                    double test_mae, const char* error);

typedef struct confq_matrix_options {
  const char* cell_dir;    /* per-cell result files; NULL disables */
  int resume;              /* reuse cell files written with identical settings */
  int jobs;                /* worker threads; <= 0 uses the settings value */
  const int* resplits;     /* subset of resplit indices, or NULL for all */
  size_t n_resplits;
  confq_cell_callback on_cell;
  void* user;
} confq_matrix_options;

CONFQ_API void confq_matrix_options_init(confq_matrix_options* options);
CONFQ_API confq_status confq_matrix_run(const confq_dataset* dataset, const confq_settings* settings,
                                        const confq_matrix_options* options, confq_report** out);

CONFQ_API confq_status confq_report_load(const char* path, confq_report** out);
CONFQ_API confq_status confq_report_merge(const confq_report* const* reports, size_t n, confq_report** out);
/* Writes report.json, report.csv, learning_curve.csv, baseline.csv and cells.csv. */
CONFQ_API confq_status confq_report_emit(const confq_report* report, const char* dir);
CONFQ_API confq_status confq_report_json(const confq_report* report, char** out);
CONFQ_API confq_status confq_report_csv(const confq_report* report, char** out);
CONFQ_API confq_status confq_report_counts(const confq_report* report, size_t* cells, size_t* failed);
/* One line per trend check: "PASS|FAIL|WARN <name>: <detail>". Hard
   failures are counted in *hard_failures. */
CONFQ_API confq_status confq_report_trends(const confq_report* report, char** out, int* hard_failures);
CONFQ_API void confq_report_free(confq_report* report);

/* ---- descriptors ------------------------------------------------------- */

/* Sterimol L and B5 (Angstrom) of the substituent on atom b of bond a-b.
   xyz holds 3 * n_atoms coordinates; bonds holds 2 * n_bonds atom indices. */
CONFQ_API confq_status confq_sterimol(size_t n_atoms, const int* atomic_numbers, const double* xyz,
                                      size_t n_bonds, const int* bonds, int a, int b, double* L, double* B5);

#ifdef __cplusplus
}
#endif

#endif
