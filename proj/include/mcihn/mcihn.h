/* include/mcihn/mcihn.h */

/*
 * Copyright 2026 The mcihn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the mcihn library.
 *
 * Every function returns an mcihn_status. On failure the thread-local
 * message from mcihn_last_error() describes the problem. Strings returned
 * through char** outputs are owned by the caller and must be released with
 * mcihn_string_free(). Handles are released with the matching *_free call,
 * which accepts NULL.
 */

#ifndef MCIHN_MCIHN_H_
#define MCIHN_MCIHN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MCIHN_API __declspec(dllexport)
#elif defined(__GNUC__)
#define MCIHN_API __attribute__((visibility("default")))
#else
#define MCIHN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcihn_status {
  MCIHN_OK = 0,
  MCIHN_ERR_INVALID_ARGUMENT = 1,
  MCIHN_ERR_IO = 2,
  MCIHN_ERR_DATA = 3,
  MCIHN_ERR_SHAPE = 4,
  MCIHN_ERR_NUMERIC = 5,
  MCIHN_ERR_TRAIN = 6,
  MCIHN_ERR_INTERNAL = 7
} mcihn_status;

typedef struct mcihn_config mcihn_config;
typedef struct mcihn_dataset mcihn_dataset;
typedef struct mcihn_model mcihn_model;

MCIHN_API const char *mcihn_last_error(void);
MCIHN_API const char *mcihn_status_name(mcihn_status status);
MCIHN_API const char *mcihn_version(void);
MCIHN_API void mcihn_string_free(char *s);

/* ---- configuration ---- */

/* Desk-scale defaults. */
MCIHN_API mcihn_status mcihn_config_new(mcihn_config **out);
/* "key=value" lines, '#' starts a comment. */
MCIHN_API mcihn_status mcihn_config_load(const char *path, mcihn_config **out);
MCIHN_API mcihn_status mcihn_config_set(mcihn_config *config, const char *key,
                                        const char *value);
MCIHN_API mcihn_status mcihn_config_to_text(const mcihn_config *config,
                                            char **out);
MCIHN_API void mcihn_config_free(mcihn_config *config);

/* ---- datasets ---- */

typedef struct mcihn_synth_options {
  size_t count;
  double rho;              /* signal weight in [0, 1] */
  const char *labels;      /* "uniform", "mosi7" or "sims5"; NULL = uniform */
  const char *scheme;      /* header tag "mosi7" or "sims5"; NULL = mosi7 */
  uint64_t seed;           /* labels and noise */
  uint64_t pattern_seed;   /* planted patterns, share across splits */
} mcihn_synth_options;

/* Shapes come from `config` (desk scale when NULL). */
MCIHN_API mcihn_status mcihn_dataset_synthesize(const mcihn_config *config,
                                                const mcihn_synth_options *opts,
                                                mcihn_dataset **out);
MCIHN_API mcihn_status mcihn_dataset_read(const char *path,
                                          mcihn_dataset **out);
MCIHN_API mcihn_status mcihn_dataset_write(const mcihn_dataset *dataset,
                                           const char *path);
MCIHN_API mcihn_status mcihn_dataset_info_json(const mcihn_dataset *dataset,
                                               char **out);
MCIHN_API size_t mcihn_dataset_size(const mcihn_dataset *dataset);
MCIHN_API void mcihn_dataset_free(mcihn_dataset *dataset);

/* ---- training and evaluation ---- */

/* Trains and, when run_dir is non-NULL, writes checkpoint.bin, history.jsonl,
 * steps.jsonl, metrics.json and config.txt there. out_model may be NULL. */
MCIHN_API mcihn_status mcihn_train(const mcihn_config *config,
                                   const mcihn_dataset *train,
                                   const mcihn_dataset *valid,
                                   const char *run_dir, mcihn_model **out_model);
MCIHN_API mcihn_status mcihn_model_load(const char *path, mcihn_model **out);
MCIHN_API mcihn_status mcihn_model_save(const mcihn_model *model,
                                        const char *path);
MCIHN_API mcihn_status mcihn_model_config_text(const mcihn_model *model,
                                               char **out);
MCIHN_API void mcihn_model_free(mcihn_model *model);

/* Metrics as a JSON object. */
MCIHN_API mcihn_status mcihn_evaluate(const mcihn_model *model,
                                      const mcihn_dataset *dataset, char **out);
/* Continuous scores, one per sample; `scores` must hold dataset size slots. */
MCIHN_API mcihn_status mcihn_predict(const mcihn_model *model,
                                     const mcihn_dataset *dataset,
                                     double *scores, size_t capacity);

/* All six variants for every seed. table_out gets a text table, json_out
 * the per-seed and mean metrics. Either output may be NULL. */
MCIHN_API mcihn_status mcihn_ablate(const mcihn_config *config,
                                    const mcihn_dataset *train,
                                    const mcihn_dataset *valid,
                                    const uint64_t *seeds, size_t num_seeds,
                                    char **table_out, char **json_out);
/* key is "dropout" or "adaptation_weight". */
MCIHN_API mcihn_status mcihn_sweep(const mcihn_config *config,
                                   const mcihn_dataset *train,
                                   const mcihn_dataset *valid, const char *key,
                                   char **json_out);
/* Largest relative error between analytic and finite-difference gradients. */
MCIHN_API mcihn_status mcihn_gradcheck(const mcihn_config *config, size_t batch,
                                       uint64_t seed, double eps,
                                       double *max_error);

#ifdef __cplusplus
}
#endif

#endif /* MCIHN_MCIHN_H_ */
