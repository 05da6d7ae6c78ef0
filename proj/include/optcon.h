/* C interface to the optcon experiment runner.
 *
 * Usage: create a run handle, configure it with string key/value options
 * (the same keys the config file understands), execute, then query results
 * or write the report files.  All functions returning optcon_status report
 * failures through the code plus optcon_run_last_error(); no exceptions
 * cross this boundary.  Handles are not thread-safe; distinct handles are
 * independent.
 */
#ifndef OPTCON_H
#define OPTCON_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct optcon_run optcon_run;

typedef enum optcon_status {
  OPTCON_OK = 0,
  OPTCON_ERR_ARG = 1,      /* null handle / bad argument at the C boundary */
  OPTCON_ERR_CONFIG = 2,   /* invalid configuration key or value */
  OPTCON_ERR_STATE = 3,    /* call sequencing error (e.g. query before execute) */
  OPTCON_ERR_IO = 4,       /* file could not be read or written */
  OPTCON_ERR_RUN = 5,      /* at least one configured rollout failed */
  OPTCON_ERR_INTERNAL = 6  /* invariant violation inside the library */
} optcon_status;

const char* optcon_version(void);
const char* optcon_status_name(optcon_status status);

optcon_run* optcon_run_new(void);
void optcon_run_free(optcon_run* run);

/* Message describing the most recent failure on this handle ("" if none). */
const char* optcon_run_last_error(const optcon_run* run);

/* Set one option, e.g. ("scenario", "b"), ("T", "1000"), ("d", "auto").
 * Unknown keys and unparsable values yield OPTCON_ERR_CONFIG. */
optcon_status optcon_run_set(optcon_run* run, const char* key, const char* value);

/* Apply every entry of a key/value config file on top of the current
 * options (the file wins over anything set before). */
optcon_status optcon_run_load_config(optcon_run* run, const char* path);

/* Roll every configured controller over the scenario.  Returns OPTCON_ERR_RUN
 * when some rollout failed; other rollouts still complete and are queryable. */
optcon_status optcon_run_execute(optcon_run* run);

/* Result queries; valid after execute. */
int optcon_run_controller_count(const optcon_run* run);
const char* optcon_run_controller_name(const optcon_run* run, int index);
optcon_status optcon_run_median_reward(const optcon_run* run, int index, double* out);
optcon_status optcon_run_median_final_regret(const optcon_run* run, int index, double* out);
int optcon_run_failed_count(const optcon_run* run);

/* Human-readable result table (owned by the handle, valid until the next
 * call on it). */
const char* optcon_run_summary(optcon_run* run);

/* Write per-slot CSVs, summary.txt and the optional plot into dir (or into
 * the configured "out" directory when dir is NULL). */
optcon_status optcon_run_write_reports(optcon_run* run, const char* dir);

/* Built-in numerical verification suites; prints one line per suite to
 * stdout.  Stores the number of failed suites in *failures when non-null. */
optcon_status optcon_self_check(int quick, int* failures);

#ifdef __cplusplus
}
#endif

#endif /* OPTCON_H */
