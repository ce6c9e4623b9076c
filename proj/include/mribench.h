/*
 * mribench — brain-tumor MRI classification benchmark library.
 *
 * C API over the C++ core. Every function that can fail returns an
 * mrb_status; MRB_OK is zero. On failure a thread-local message is
 * retrievable via mrb_last_error(). Objects returned through out-pointers
 * are owned by the caller and released with the matching *_free function.
 *
 * Status codes match the CLI exit-code contract:
 *   1 usage/config error, 2 data error, 3 runtime (training/eval) failure.
 */

#ifndef MRIBENCH_H
#define MRIBENCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrb_status {
  MRB_OK = 0,
  MRB_ERR_CONFIG = 1,
  MRB_ERR_DATA = 2,
  MRB_ERR_RUNTIME = 3
} mrb_status;

const char* mrb_version(void);

/* Message for the most recent failing call on this thread. */
const char* mrb_last_error(void);

/* Frees strings returned through char** out-parameters. */
void mrb_string_free(char* s);

/* ------------------------------------------------------------- dataset */

typedef struct mrb_manifest mrb_manifest; /* scanned image inventory */
typedef struct mrb_split mrb_split;       /* stratified split */

/* Walks <root>/<class>/ (or the pooled Training/ + Testing/ layout). */
mrb_status mrb_manifest_scan(const char* dataset_root, mrb_manifest** out);
size_t mrb_manifest_size(const mrb_manifest* m);
/* class_id: 0 glioma, 1 meningioma, 2 notumor, 3 pituitary */
size_t mrb_manifest_class_count(const mrb_manifest* m, int class_id);
size_t mrb_manifest_skipped(const mrb_manifest* m);
void mrb_manifest_free(mrb_manifest* m);

/* Deterministic per-class split; ratios must sum to 1. */
mrb_status mrb_split_stratified(const mrb_manifest* m, double train_ratio,
                                double val_ratio, double test_ratio,
                                uint64_t seed, mrb_split** out);
/* part: 0 train, 1 val, 2 test */
size_t mrb_split_size(const mrb_split* s, int part);
mrb_status mrb_split_save(const mrb_split* s, const char* csv_path);
mrb_status mrb_split_load(const char* csv_path, mrb_split** out);
void mrb_split_free(mrb_split* s);

/* -------------------------------------------------------------- models */

typedef struct mrb_model mrb_model;

/* model_id: mobilenet_v2 | resnet18 | efficientnet_b0 | vgg16 |
 * mobilenet_bt. init: "pretrained" (requires converted weights under
 * weights_dir or $MRIBENCH_WEIGHTS_DIR) or "random" (seeded).
 * weights_dir may be NULL for the default lookup. */
mrb_status mrb_model_build(const char* model_id, const char* init,
                           uint64_t init_seed, const char* weights_dir,
                           mrb_model** out);
mrb_status mrb_model_param_counts(const mrb_model* m, uint64_t* total,
                                  uint64_t* trainable);
void mrb_model_free(mrb_model* m);

/* ------------------------------------------------------------ commands */

/* Scan + 0.8/0.1/0.1 stratified split; writes manifests/split.csv and
 * manifests/summary.json under the workspace. */
mrb_status mrb_cmd_prepare(const char* dataset_root, uint64_t seed,
                           const char* workspace);

/* Trains model_id under the given run config; writes curves.csv, the best
 * checkpoint and run metadata into runs/<model>-<confighash>/ under the
 * workspace. On success *out_run_dir holds the run directory (caller frees
 * with mrb_string_free). */
mrb_status mrb_cmd_train(const char* workspace, const char* model_id,
                         const char* config_path, char** out_run_dir);

/* Evaluates the run's best checkpoint on the test split only; writes
 * report.json into the run directory. */
mrb_status mrb_cmd_evaluate(const char* run_dir, char** out_report_path);

/* Renders the comparison table over finished runs (ascending accuracy,
 * 4-decimal values). Writes CSV when out_csv is non-NULL. *out_table holds
 * the rendered text (caller frees). */
mrb_status mrb_cmd_compare(const char* const* run_dirs, size_t n_runs,
                           const char* out_csv, char** out_table);

/* Loss/accuracy-vs-epoch figure for one run. out_svg NULL means
 * <run_dir>/curves.svg. */
mrb_status mrb_cmd_curves(const char* run_dir, const char* out_svg,
                          char** out_svg_path);

#ifdef __cplusplus
}
#endif

#endif /* MRIBENCH_H */
