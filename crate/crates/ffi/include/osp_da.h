#ifndef OSP_DA_H
#define OSP_DA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes shared by every function.
 */
typedef enum OspStatus {
  OSP_STATUS_OK = 0,
  /*
   A null pointer or out-of-range argument.
   */
  OSP_STATUS_INVALID_ARGUMENT = 1,
  /*
   Malformed JSON or lists that are not permutations.
   */
  OSP_STATUS_PARSE_ERROR = 2,
  /*
   Inputs of different sizes.
   */
  OSP_STATUS_SIZE_MISMATCH = 3,
  /*
   The market is too large for the requested operation.
   */
  OSP_STATUS_TOO_LARGE = 4,
  /*
   Synthesis was asked for priorities that are not limited cyclic.
   */
  OSP_STATUS_NOT_LIMITED_CYCLIC = 5,
  /*
   A tree failed validation.
   */
  OSP_STATUS_INVALID_TREE = 6,
  /*
   A profile uses a type outside the tree's environment.
   */
  OSP_STATUS_OUTSIDE_ENVIRONMENT = 7,
  /*
   A panic was caught at the boundary.
   */
  OSP_STATUS_INTERNAL = 8,
} OspStatus;

/*
 Opaque priority set.
 */
typedef struct OspPriorities OspPriorities;

/*
 Opaque mechanism tree.
 */
typedef struct OspTree OspTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next call into this library on the same thread.
 */
const char *osp_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a string returned by this library, freed only once.
 */
void osp_string_free(char *s);

/*
 Parses priorities from JSON such as
 `{"n":3,"priorities":[["a","b","c"],...]}`.

 # Safety
 `json` must be a nul-terminated string and `out` writable.
 */
enum OspStatus osp_priorities_from_json(const char *json, struct OspPriorities **out);

/*
 # Safety
 `q` must be null or a handle from this library, freed only once.
 */
void osp_priorities_free(struct OspPriorities *q);

/*
 Number of applicants, or 0 for a null handle.

 # Safety
 `q` must be null or a live handle.
 */
size_t osp_priorities_size(const struct OspPriorities *q);

/*
 Writes 1 to `limited_cyclic` when the priorities admit an obviously
 strategyproof implementation and 0 otherwise.

 # Safety
 `q` must be a live handle and `limited_cyclic` writable.
 */
enum OspStatus osp_classify(const struct OspPriorities *q, int32_t *limited_cyclic);

/*
 Full classification (verdict, blocks, labelings or witness) as JSON.

 # Safety
 `q` must be a live handle and `out` writable.
 */
enum OspStatus osp_classify_json(const struct OspPriorities *q, char **out);

/*
 Runs deferred acceptance on a JSON profile and returns the matching as
 JSON.

 # Safety
 `q` must be a live handle, `profile_json` nul-terminated and `out`
 writable.
 */
enum OspStatus osp_run_da(const struct OspPriorities *q, const char *profile_json, char **out);

/*
 Builds an obviously strategyproof tree for limited-cyclic priorities.

 # Safety
 `q` must be a live handle and `out` writable.
 */
enum OspStatus osp_synthesize(const struct OspPriorities *q, struct OspTree **out);

/*
 # Safety
 `t` must be null or a handle from this library, freed only once.
 */
void osp_tree_free(struct OspTree *t);

/*
 Number of nodes, or 0 for a null handle.

 # Safety
 `t` must be null or a live handle.
 */
size_t osp_tree_node_count(const struct OspTree *t);

/*
 # Safety
 `t` must be a live handle and `out` writable.
 */
enum OspStatus osp_tree_to_json(const struct OspTree *t, char **out);

/*
 Parses and validates a tree.

 # Safety
 `json` must be nul-terminated and `out` writable.
 */
enum OspStatus osp_tree_from_json(const char *json, struct OspTree **out);

/*
 Counts obvious-strategyproofness violations; 0 means the tree is OSP.

 # Safety
 `t` must be a live handle and `violations` writable.
 */
enum OspStatus osp_check_osp(const struct OspTree *t, size_t *violations);

/*
 Compares the tree with deferred acceptance under `q`: every profile when
 `samples` is 0, otherwise `samples` random profiles drawn with `seed`.
 Writes 1 to `implements` when no profile disagrees.

 # Safety
 `t` and `q` must be live handles and `implements` writable.
 */
enum OspStatus osp_check_implements(const struct OspTree *t,
                                    const struct OspPriorities *q,
                                    uint64_t samples,
                                    uint64_t seed,
                                    int32_t *implements);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OSP_DA_H */
