#ifndef TORIC_MIRROR_H
#define TORIC_MIRROR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes; 2, 3 and 4 coincide with the command-line exit codes.
 */
typedef enum TmStatus {
  TM_STATUS_OK = 0,
  TM_STATUS_NULL_ARGUMENT = 1,
  TM_STATUS_VALIDATION = 2,
  TM_STATUS_ILL_POSED = 3,
  TM_STATUS_INTERNAL = 4,
  TM_STATUS_INVALID_UTF8 = 5,
  TM_STATUS_PANIC = 6,
} TmStatus;

/*
 Opaque parsed fan document.
 */
typedef struct TmDocument TmDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a fan document. On success `*out` owns a new document.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TmStatus tm_document_parse(const char *text, struct TmDocument **out);

/*
 Releases a document; null is ignored.

 # Safety
 `doc` must come from `tm_document_parse` and not be used afterwards.
 */
void tm_document_free(struct TmDocument *doc);

/*
 Canonical text of the document.

 # Safety
 `doc` must be a live document and `out` a valid pointer.
 */
enum TmStatus tm_document_serialize(const struct TmDocument *doc, char **out);

/*
 Overrides the truncation profile with `qdeg=K,tord=K,yord=K` (any subset).

 # Safety
 `doc` must be a live document and `spec` a NUL-terminated string.
 */
enum TmStatus tm_document_set_profile(struct TmDocument *doc, const char *spec);

/*
 Sets χ to `symbolic` or to comma-separated rationals.

 # Safety
 `doc` must be a live document and `spec` a NUL-terminated string.
 */
enum TmStatus tm_document_set_chi(struct TmDocument *doc, const char *spec);

/*
 Runs a command and returns the JSON report in `*json_out`. `*exit_out`, when
 not null, receives 0 if every check passed and 4 otherwise.

 # Safety
 `doc` must be a live document, `command` a NUL-terminated string and
 `json_out` a valid pointer; `exit_out` may be null.
 */
enum TmStatus tm_run(const struct TmDocument *doc,
                     const char *command,
                     char **json_out,
                     int32_t *exit_out);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void tm_string_free(char *s);

/*
 Message for the last failure on this thread; valid until the next call.
 */
const char *tm_last_error(void);

/*
 Library version, static storage.
 */
const char *tm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORIC_MIRROR_H */
