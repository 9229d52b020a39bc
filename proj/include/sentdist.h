/* sentdist: distributed sentiment-classifier trainer and cost simulator.
 *
 * C API over the core library. Handles are opaque; every fallible call
 * returns an sd_status. On failure, sd_last_error() holds a message and
 * sd_last_error_line() a 1-based config line when one applies. Error state
 * is thread-local.
 *
 * Typical use:
 *   sd_config* cfg = sd_config_create();
 *   sd_config_load_file(cfg, "experiment.ini");
 *   sd_config_set(cfg, "cluster.workers", "4");
 *   sd_result* res = NULL;
 *   sd_status st = sd_run(cfg, "both", &res);
 *   if (st == SD_OK) { puts(sd_result_summary(res)); sd_result_write(res, "out"); }
 *   sd_result_destroy(res);
 *   sd_config_destroy(cfg);
 */

#ifndef SENTDIST_H
#define SENTDIST_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sd_status {
    SD_OK = 0,
    SD_ERR_INVALID_ARGUMENT = 1, /* null handle, bad mode string, bad key */
    SD_ERR_CONFIG = 2,           /* config file or override rejected */
    SD_ERR_IO = 3,               /* file missing or unreadable/unwritable */
    SD_ERR_DATA = 4,             /* input data unusable */
    SD_ERR_CONTRACT = 5,         /* precondition or internal invariant broken */
    SD_ERR_INTERNAL = 6          /* unexpected failure */
} sd_status;

typedef struct sd_config sd_config;
typedef struct sd_result sd_result;

/* Library version string, static storage. */
const char* sd_version(void);

/* Message for the last failure on this thread; empty string if none. */
const char* sd_last_error(void);

/* 1-based config line of the last failure, or 0 when not line-specific. */
int sd_last_error_line(void);

/* ---- configuration ---- */

/* New config with built-in defaults. Free with sd_config_destroy. */
sd_config* sd_config_create(void);
void sd_config_destroy(sd_config* cfg);

/* Loads an INI file over the current values. */
sd_status sd_config_load_file(sd_config* cfg, const char* path);

/* Sets one "section.key" (e.g. "train.epochs") from its text form. */
sd_status sd_config_set(sd_config* cfg, const char* dotted_key, const char* value);

/* Cross-field validation; run/sweep also validate. */
sd_status sd_config_validate(const sd_config* cfg);

/* Resolved settings as text. Owned by the handle, valid until the next
 * sd_config call on it. */
const char* sd_config_describe(sd_config* cfg);

/* ---- execution ---- */

/* mode: "single" | "distributed" | "both" | "cost-only".
 * On SD_OK, *out holds a result to free with sd_result_destroy. */
sd_status sd_run(sd_config* cfg, const char* mode, sd_result** out);

/* Distributed run per worker count; writes the sweep CSV to csv_path. */
sd_status sd_sweep(sd_config* cfg, const size_t* worker_counts, size_t count,
                   const char* csv_path);

/* ---- results ---- */

/* Writes report files into out_dir (see README for the layout). Pass NULL
 * to use the configured output directory. */
sd_status sd_result_write(const sd_result* res, const char* out_dir);

/* Human-readable summary. Owned by the result. */
const char* sd_result_summary(const sd_result* res);

/* Scalar lookup, e.g. "single.accuracy", "distributed.sync_bytes",
 * "comparison.time_reduction_pct", "cost.predicted_speedup". Returns
 * SD_ERR_INVALID_ARGUMENT for unknown keys; keys are listed in README. */
sd_status sd_result_value(const sd_result* res, const char* key, double* out);

void sd_result_destroy(sd_result* res);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SENTDIST_H */
