#ifndef ERPGRAPH_H
#define ERPGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call. Nonzero values other than the last two match the
// CLI exit codes.
typedef enum ErpgStatus {
  ERPG_OK = 0,
  ERPG_IO = 1,
  ERPG_USAGE = 2,
  ERPG_PARSE = 3,
  ERPG_UNKNOWN_ENTITY = 4,
  ERPG_EXTRACTION = 5,
  ERPG_VALIDATION = 6,
  // A null pointer or non-UTF-8 string was passed.
  ERPG_INVALID_ARGUMENT = 7,
  ERPG_PANIC = 8,
} ErpgStatus;

// A loaded dataset.
typedef struct ErpgDataset ErpgDataset;

// A table selection.
typedef struct ErpgSelection ErpgSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread; do not free.
const char *erpg_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void erpg_string_free(char *s);

// Opens the dataset directory `dir` with default settings.
//
// # Safety
// `dir` must be a NUL-terminated string; `out` must be writable.
enum ErpgStatus erpg_dataset_open(const char *dir, struct ErpgDataset **out);

// # Safety
// `ds` must be null or a live handle from [`erpg_dataset_open`].
void erpg_dataset_free(struct ErpgDataset *ds);

// The document classes as a JSON array.
//
// # Safety
// `ds` must be a live handle; `out` must be writable.
enum ErpgStatus erpg_dataset_classes_json(const struct ErpgDataset *ds, char **out);

// Seeds a selection on `class_id` and expands it `depth` hops. `hub_limit`
// is `"auto"`, `"none"`, a number, or null for the default.
//
// # Safety
// Pointers must be valid; `hub_limit` may be null.
enum ErpgStatus erpg_identify(const struct ErpgDataset *ds,
                              const char *class_id,
                              size_t depth,
                              const char *hub_limit,
                              struct ErpgSelection **out);

// Expands `sel` in place.
//
// # Safety
// Pointers must be valid; `hub_limit` may be null.
enum ErpgStatus erpg_selection_expand(const struct ErpgDataset *ds,
                                      struct ErpgSelection *sel,
                                      size_t depth,
                                      const char *hub_limit);

// Includes or excludes `table` in place.
//
// # Safety
// Pointers must be valid.
enum ErpgStatus erpg_selection_toggle(const struct ErpgDataset *ds,
                                      struct ErpgSelection *sel,
                                      const char *table,
                                      bool included);

// # Safety
// `sel` must be a live handle; `out` must be writable.
enum ErpgStatus erpg_selection_to_json(const struct ErpgSelection *sel, char **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum ErpgStatus erpg_selection_from_json(const char *json, struct ErpgSelection **out);

// # Safety
// `sel` must be null or a live selection handle.
void erpg_selection_free(struct ErpgSelection *sel);

// Extracts an OCEL JSON document from `sel` under `config_json`.
//
// # Safety
// Pointers must be valid; `out` must be writable.
enum ErpgStatus erpg_extract(const struct ErpgDataset *ds,
                             const struct ErpgSelection *sel,
                             const char *config_json,
                             char **out);

// Validates an OCEL document. The findings report is written to `out` in
// both cases; the status is `ErpgValidation` when there are findings.
//
// # Safety
// `ocel_json` must be a NUL-terminated string; `out` must be writable.
enum ErpgStatus erpg_validate_ocel(const char *ocel_json, char **out);

// The whole schema graph with layout coordinates, as JSON.
//
// # Safety
// `ds` must be a live handle; `out` must be writable.
enum ErpgStatus erpg_layout_json(const struct ErpgDataset *ds,
                                 uint64_t seed,
                                 size_t iterations,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERPGRAPH_H */
