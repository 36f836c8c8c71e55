#ifndef CDI_REGISTRY_H
#define CDI_REGISTRY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdiStatus {
  CDI_STATUS_OK = 0,
  /**
   * Null pointer, non-UTF-8 text or an unparseable argument.
   */
  CDI_STATUS_INVALID_ARGUMENT = 1,
  CDI_STATUS_PARSE_ERROR = 2,
  CDI_STATUS_SCHEMA_ERROR = 3,
  CDI_STATUS_VALIDATION_FAILED = 4,
  CDI_STATUS_NOT_FOUND = 5,
  CDI_STATUS_ILLEGAL_TRANSITION = 6,
  CDI_STATUS_MISSING_REASON = 7,
  CDI_STATUS_BAD_FILTER = 8,
  CDI_STATUS_LOCKED = 9,
  CDI_STATUS_IO = 10,
  CDI_STATUS_INTERNAL = 11,
} CdiStatus;

/**
 * Opaque store handle.
 */
typedef struct CdiStore CdiStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread; do not free.
 */
const char *cdi_last_error(void);

/**
 * Static name of a status code, e.g. "CDI_STATUS_NOT_FOUND". Do not free.
 */
const char *cdi_status_name(enum CdiStatus status);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library, freed once.
 */
void cdi_string_free(char *s);

/**
 * Whitespace-delimited word count, or -1 if `text` is null or not UTF-8.
 *
 * # Safety
 * `text` must be null or a NUL-terminated string.
 */
int64_t cdi_count_words(const char *text);

/**
 * Validates one canonical record. Writes the validation report JSON to
 * `out_report` and returns `Ok` if valid, `ValidationFailed` if not.
 *
 * # Safety
 * `record_json` must be a NUL-terminated string and `out_report` a valid
 * pointer.
 */
enum CdiStatus cdi_validate(const char *record_json, char **out_report);

/**
 * Writes the public (redacted) view of a record.
 *
 * # Safety
 * `record_json` must be a NUL-terminated string and `out_json` a valid
 * pointer.
 */
enum CdiStatus cdi_redact_public(const char *record_json, char **out_json);

/**
 * Serious-incident assessment: sets `*out_serious` and, if `out_json` is
 * not null, writes `{"serious":..,"clauses":[..]}`.
 *
 * # Safety
 * `record_json` must be a NUL-terminated string; `out_serious` must be
 * valid; `out_json` may be null.
 */
enum CdiStatus cdi_serious_incident(const char *record_json, bool *out_serious, char **out_json);

/**
 * Opens (creating if needed) a store directory and takes its lock.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out_store` a valid pointer.
 */
enum CdiStatus cdi_store_open(const char *dir, struct CdiStore **out_store);

/**
 * A store that keeps nothing on disk. Never null.
 */
struct CdiStore *cdi_store_open_in_memory(void);

/**
 * Releases a store handle and its lock. Null is ignored.
 *
 * # Safety
 * `store` must be null or a handle from this library, closed once.
 */
void cdi_store_close(struct CdiStore *store);

/**
 * Submits a record (its `incident_id` may be empty or absent) and writes
 * the allocated id.
 *
 * # Safety
 * `store` must be a live handle, `record_json` a NUL-terminated string and
 * `out_id` a valid pointer.
 */
enum CdiStatus cdi_store_submit(const struct CdiStore *store,
                                const char *record_json,
                                char **out_id);

/**
 * Applies "claim", "approve" or "reject" and writes the new state name.
 * `reason` may be null except for reject. `out_state` may be null.
 *
 * # Safety
 * `store` must be a live handle; string arguments must be NUL-terminated
 * or, where noted, null.
 */
enum CdiStatus cdi_store_review(const struct CdiStore *store,
                                const char *incident_id,
                                const char *action,
                                const char *reviewer_id,
                                const char *reason,
                                char **out_state);

/**
 * Writes one incident. Public callers (`reviewer == false`) only see
 * published incidents, redacted; reviewers get the full detail with
 * state and history.
 *
 * # Safety
 * `store` must be a live handle, `incident_id` NUL-terminated and
 * `out_json` valid.
 */
enum CdiStatus cdi_store_get(const struct CdiStore *store,
                             const char *incident_id,
                             bool reviewer,
                             char **out_json);

/**
 * Runs a query. `filter_json` is a filter object such as
 * `{"severity":["Critical"],"harm_kinds":["physical"]}` or null for no
 * filter. Writes a JSON array of views.
 *
 * # Safety
 * `store` must be a live handle, `filter_json` null or NUL-terminated, and
 * `out_json` valid.
 */
enum CdiStatus cdi_store_query(const struct CdiStore *store,
                               const char *filter_json,
                               bool reviewer,
                               char **out_json);

/**
 * Writes the public JSON Lines export of published incidents.
 *
 * # Safety
 * `store` must be a live handle and `out_jsonl` valid.
 */
enum CdiStatus cdi_store_export(const struct CdiStore *store, char **out_jsonl);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDI_REGISTRY_H */
