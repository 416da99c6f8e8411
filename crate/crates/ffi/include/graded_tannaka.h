#ifndef GRADED_TANNAKA_H
#define GRADED_TANNAKA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TkStatus {
  TK_STATUS_OK = 0,
  TK_STATUS_NULL_ARGUMENT = 1,
  TK_STATUS_INVALID_UTF8 = 2,
  TK_STATUS_IO = 3,
  TK_STATUS_PARSE = 4,
  TK_STATUS_SCHEMA = 5,
  TK_STATUS_PANIC = 6,
} TkStatus;

typedef enum TkMethod {
  TK_METHOD_LEFSCHETZ = 0,
  TK_METHOD_SEMISIMPLE = 1,
} TkMethod;

// A finished query, rendered both ways.
typedef struct TkReport TkReport;

// A parsed document with its category, fiber functor and window.
typedef struct TkWorkspace TkWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *tk_version(void);

// Message of the last failed call on this thread, or null. Valid until the
// next call on this thread.
const char *tk_last_error(void);

// Parses a JSON document.
//
// # Safety
// `json` is a nul-terminated string; `out` is writable.
enum TkStatus tk_workspace_parse(const char *json, struct TkWorkspace **out);

// Opens a document file, or a bundled dataset by name.
//
// # Safety
// `path` is a nul-terminated string; `out` is writable.
enum TkStatus tk_workspace_open(const char *path, struct TkWorkspace **out);

// Replaces the window by comma-separated labels.
//
// # Safety
// `ws` comes from this library; `labels` is a nul-terminated string.
enum TkStatus tk_workspace_set_window(struct TkWorkspace *ws, const char *labels);

// # Safety
// `ws` is null or comes from this library and is not used afterwards.
void tk_workspace_free(struct TkWorkspace *ws);

// Runs `verb` (validate, hom, fiber, split, twist, check) with `argc`
// arguments. With no arguments, hom, fiber and split answer the document's
// queries and check runs every suite.
//
// # Safety
// `ws` comes from this library; `verb` and the `argc` entries of `argv`
// are nul-terminated strings; `out` is writable.
enum TkStatus tk_run(const struct TkWorkspace *ws,
                     const char *verb,
                     const char *const *argv,
                     size_t argc,
                     size_t depth,
                     enum TkMethod method,
                     struct TkReport **out);

// Replays the certificates of a machine report against the workspace.
//
// # Safety
// `ws` comes from this library; `report` is a nul-terminated string;
// `out` is writable.
enum TkStatus tk_replay(const struct TkWorkspace *ws, const char *report, struct TkReport **out);

// # Safety
// `r` comes from this library.
bool tk_report_passed(const struct TkReport *r);

// 0 when the report passed, 1 otherwise.
//
// # Safety
// `r` comes from this library.
int32_t tk_report_exit_code(const struct TkReport *r);

// Machine report JSON, owned by the report.
//
// # Safety
// `r` comes from this library.
const char *tk_report_machine(const struct TkReport *r);

// Human-readable report, owned by the report.
//
// # Safety
// `r` comes from this library.
const char *tk_report_human(const struct TkReport *r);

// # Safety
// `r` is null or comes from this library and is not used afterwards.
void tk_report_free(struct TkReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRADED_TANNAKA_H */
