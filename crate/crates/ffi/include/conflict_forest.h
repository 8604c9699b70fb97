/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef CONFLICT_FOREST_H
#define CONFLICT_FOREST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfAlgorithm {
  CF_ALGORITHM_CONN = 0,
  CF_ALGORITHM_MST_GREEDY = 1,
  CF_ALGORITHM_STEINER = 2,
} CfAlgorithm;

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_VERIFICATION_FAILED = 1,
  CF_STATUS_INPUT_ERROR = 2,
  CF_STATUS_CAP_EXCEEDED = 3,
  CF_STATUS_NULL_POINTER = 4,
  CF_STATUS_INTERNAL = 5,
} CfStatus;

/**
 * A parsed instance.
 */
typedef struct CfInstance CfInstance;

/**
 * A schedule report produced by [`cf_schedule`].
 */
typedef struct CfSchedule CfSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an instance from JSON. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum CfStatus cf_instance_from_json(const char *json, struct CfInstance **out);

/**
 * # Safety
 * `instance` must come from [`cf_instance_from_json`] and not be used afterwards.
 */
void cf_instance_free(struct CfInstance *instance);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t cf_instance_node_count(const struct CfInstance *instance);

/**
 * Link count, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t cf_instance_link_count(const struct CfInstance *instance);

/**
 * Schedules the instance. The schedule is returned even when the
 * independent check rejects it, with status `VerificationFailed`.
 *
 * # Safety
 * `instance` must be a live handle and `out` a valid pointer.
 */
enum CfStatus cf_schedule(const struct CfInstance *instance,
                          enum CfAlgorithm algorithm,
                          bool dual,
                          struct CfSchedule **out);

/**
 * # Safety
 * `schedule` must come from [`cf_schedule`] and not be used afterwards.
 */
void cf_schedule_free(struct CfSchedule *schedule);

/**
 * Number of slots, or 0 for a null handle.
 *
 * # Safety
 * `schedule` must be null or a live handle.
 */
size_t cf_schedule_slot_count(const struct CfSchedule *schedule);

/**
 * Number of links in `slot`, or 0 if the handle is null or the slot does not exist.
 *
 * # Safety
 * `schedule` must be null or a live handle.
 */
size_t cf_schedule_slot_len(const struct CfSchedule *schedule, size_t slot);

/**
 * Copies up to `capacity` link ids of `slot` into `buffer` and stores the
 * slot's full length in `*len`.
 *
 * # Safety
 * `buffer` must hold `capacity` elements (it may be null when `capacity` is 0).
 */
enum CfStatus cf_schedule_slot_links(const struct CfSchedule *schedule,
                                     size_t slot,
                                     size_t *buffer,
                                     size_t capacity,
                                     size_t *len);

/**
 * Canonical JSON of the schedule report; release with [`cf_string_free`].
 *
 * # Safety
 * `schedule` must be a live handle and `out` a valid pointer.
 */
enum CfStatus cf_schedule_to_json(const struct CfSchedule *schedule, char **out);

/**
 * Checks a schedule report (JSON) against the instance: `Ok` if valid,
 * `VerificationFailed` with the first violation as the error message otherwise.
 *
 * # Safety
 * `instance` must be a live handle and `report_json` a nul-terminated string.
 */
enum CfStatus cf_verify_json(const struct CfInstance *instance, const char *report_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void cf_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *cf_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *cf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONFLICT_FOREST_H */
