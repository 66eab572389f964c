#ifndef SURVKIT_C_API_H
#define SURVKIT_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes shared by every entry point (and by the CLI as exit codes). */
#define SK_OK 0
#define SK_ERR_RUNTIME 1
#define SK_ERR_CONFIG 2

/* Opaque handle onto a finished pipeline run. */
typedef struct sk_report sk_report_t;

const char* sk_version(void);

/* Message of the most recent failure on the calling thread. Empty string
 * when the last call succeeded. The pointer stays valid until the next
 * survkit call on the same thread. */
const char* sk_last_error(void);

/* Runs the pipeline described by a key=value config file and writes
 * report.json, table.md and the per-learner CSVs into its out_dir. When out
 * is non-NULL it receives a report handle the caller must release with
 * sk_report_free. */
int sk_run_pipeline(const char* config_path, sk_report_t** out);

/* Generates the synthetic dataset described by a spec file: four tab
 * separated tables plus their schema files, written into out_dir. */
int sk_generate_synthetic(const char* spec_path, const char* out_dir);

/* Re-renders table.md from an existing report.json in dir. out, when
 * non-NULL, receives a handle onto the reloaded report. */
int sk_render_report(const char* dir, sk_report_t** out);

/* Accessors. Returned strings live as long as the handle. */
const char* sk_report_dataset(const sk_report_t* report);
uint64_t sk_report_seed(const sk_report_t* report);
size_t sk_report_learner_count(const sk_report_t* report);
const char* sk_report_learner_name(const sk_report_t* report, size_t index);
double sk_report_val_auc(const sk_report_t* report, size_t index);
double sk_report_test_auc(const sk_report_t* report, size_t index);

/* Markdown AUC table for the run. */
const char* sk_report_table(const sk_report_t* report);

/* Full report serialized as JSON. */
const char* sk_report_json(const sk_report_t* report);

void sk_report_free(sk_report_t* report);

#ifdef __cplusplus
}
#endif

#endif /* SURVKIT_C_API_H */
