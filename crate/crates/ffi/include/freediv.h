#ifndef FREEDIV_H
#define FREEDIV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. The nonzero library codes match the command line exit codes.
 */
typedef enum FreedivStatus {
  FREEDIV_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  FREEDIV_STATUS_NULL_ARGUMENT = 1,
  FREEDIV_STATUS_PARSE_ERROR = 2,
  FREEDIV_STATUS_PRECONDITION_FAILED = 3,
  FREEDIV_STATUS_NON_STABILIZATION = 4,
  FREEDIV_STATUS_INVARIANT_VIOLATED = 5,
  /*
   A string argument was not valid UTF-8.
   */
  FREEDIV_STATUS_INVALID_UTF8 = 6,
  /*
   A panic was caught at the boundary.
   */
  FREEDIV_STATUS_PANIC = 7,
} FreedivStatus;

/*
 A parsed job.
 */
typedef struct FreedivJob FreedivJob;

/*
 The record produced by running a job. Owns its rendered strings.
 */
typedef struct FreedivResult FreedivResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Valid until the next
 call into the library from the same thread.
 */
const char *freediv_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *freediv_version(void);

/*
 Parses job text. `command` may be null, in which case the text must carry
 a `command` line; otherwise it names the default command.

 # Safety
 `text` and a non-null `command` must be NUL-terminated strings; `out` must
 be a valid pointer to writable storage.
 */
enum FreedivStatus freediv_job_parse(const char *text,
                                     const char *command,
                                     struct FreedivJob **out);

/*
 Runs a job. On return `*out` holds a result even when the computation
 itself failed; the returned status is then the failure code.

 # Safety
 `job` must come from [`freediv_job_parse`] and not yet be freed; `out` must
 be valid for writes.
 */
enum FreedivStatus freediv_job_run(const struct FreedivJob *job, struct FreedivResult **out);

/*
 Canonical text of a parsed job. The caller frees it with
 [`freediv_string_free`].

 # Safety
 `job` must be a live handle or null.
 */
char *freediv_job_to_text(const struct FreedivJob *job);

/*
 JSON rendering of a result, owned by the result handle.

 # Safety
 `result` must be a live handle or null.
 */
const char *freediv_result_json(const struct FreedivResult *result);

/*
 Indented text rendering of a result, owned by the result handle.

 # Safety
 `result` must be a live handle or null.
 */
const char *freediv_result_text(const struct FreedivResult *result);

/*
 Exit code the command line tool would report for this result, or -1 for null.

 # Safety
 `result` must be a live handle or null.
 */
int32_t freediv_result_exit_code(const struct FreedivResult *result);

/*
 # Safety
 `job` must come from [`freediv_job_parse`] or be null, and is not used afterwards.
 */
void freediv_job_free(struct FreedivJob *job);

/*
 # Safety
 `result` must come from [`freediv_job_run`] or be null, and is not used afterwards.
 */
void freediv_result_free(struct FreedivResult *result);

/*
 # Safety
 `s` must come from this library or be null.
 */
void freediv_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEDIV_H */
