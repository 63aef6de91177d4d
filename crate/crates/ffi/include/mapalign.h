#ifndef MAPALIGN_H
#define MAPALIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a fallible call. Values 1 to 5 equal the command-line exit codes.
typedef enum MaStatus {
  MA_STATUS_OK = 0,
  // Bad configuration key or value, or an out-of-range parameter.
  MA_STATUS_CONFIG = 1,
  // A file could not be read, decoded or written.
  MA_STATUS_IO = 2,
  // No line traits were found in a map.
  MA_STATUS_NO_TRAITS = 3,
  // No room survived pruning.
  MA_STATUS_NO_FACES = 4,
  // Every hypothesis was rejected.
  MA_STATUS_EMPTY_POOL = 5,
  // Null pointer, invalid UTF-8, or inconsistent sizes.
  MA_STATUS_INVALID_ARGUMENT = 6,
  // An internal panic was caught at the boundary.
  MA_STATUS_INTERNAL = 7,
} MaStatus;

// Outcome of an alignment.
typedef struct MaAlignment MaAlignment;

// Pipeline parameters.
typedef struct MaConfig MaConfig;

// A loaded map: an occupancy bitmap or a set of wall segments.
typedef struct MaMap MaMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or null after a
// successful call. Valid until the next call into this library on the same
// thread.
const char *ma_last_error(void);

// Library version as a static NUL-terminated string.
const char *ma_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void ma_string_free(char *s);

// Default parameters.
struct MaConfig *ma_config_new(void);

// # Safety
// `cfg` must be null or a handle from [`ma_config_new`] not yet freed.
void ma_config_free(struct MaConfig *cfg);

// Sets one `section.key` to a value given as text, e.g.
// `("prune.thr_e", "0.1")`.
//
// # Safety
// `cfg` must be a live config handle; `key` and `value` NUL-terminated.
enum MaStatus ma_config_set(struct MaConfig *cfg, const char *key, const char *value);

// Current value of a key as a caller-owned string, or null for an unknown
// key.
//
// # Safety
// `cfg` must be a live config handle; `key` NUL-terminated.
char *ma_config_get(const struct MaConfig *cfg, const char *key);

// Applies a config file of `key = value` lines on top of the current values.
//
// # Safety
// `cfg` must be a live config handle; `path` NUL-terminated.
enum MaStatus ma_config_load(struct MaConfig *cfg, const char *path);

// Loads a map file. `.txt` and `.lines` files are wall line lists, anything
// else an image. A null `cfg` uses the defaults.
//
// # Safety
// `path` NUL-terminated; `cfg` null or live; `out` writable.
enum MaStatus ma_map_load(const char *path, const struct MaConfig *cfg, struct MaMap **out);

// Map from a row-major 8-bit gray image. Levels below `occupied_threshold`
// are walls, above `255 - occupied_threshold` free space, the rest unknown.
//
// # Safety
// `gray` must hold `width * height` bytes; `out` writable.
enum MaStatus ma_map_from_gray(size_t width,
                               size_t height,
                               const uint8_t *gray,
                               uint8_t occupied_threshold,
                               struct MaMap **out);

// Map from `count` wall segments given as consecutive `x0 y0 x1 y1`
// quadruples.
//
// # Safety
// `coords` must hold `4 * count` doubles; `out` writable.
enum MaStatus ma_map_from_segments(const double *coords, size_t count, struct MaMap **out);

// # Safety
// `map` must be null or a live map handle.
void ma_map_free(struct MaMap *map);

// Decomposes a map into rooms and reports how many were found.
//
// # Safety
// `map` live; `cfg` null or live; `rooms` writable.
enum MaStatus ma_map_count_rooms(const struct MaMap *map,
                                 const struct MaConfig *cfg,
                                 size_t *rooms);

// Finds the similarity transform taking `map1` onto `map2`.
//
// # Safety
// `map1`, `map2` live; `cfg` null or live; `out` writable.
enum MaStatus ma_align(const struct MaMap *map1,
                       const struct MaMap *map2,
                       const struct MaConfig *cfg,
                       struct MaAlignment **out);

// # Safety
// `a` must be null or a live alignment handle.
void ma_alignment_free(struct MaAlignment *a);

// Writes the 3x3 homogeneous transform, row-major, into `out[0..9]`.
//
// # Safety
// `a` live; `out` must hold 9 doubles.
enum MaStatus ma_alignment_transform(const struct MaAlignment *a, double *out);

// Score of the winning hypothesis in [0, 1], or NaN for a null handle.
//
// # Safety
// `a` null or live.
double ma_alignment_score(const struct MaAlignment *a);

// True when every hypothesis scored zero and the winner is arbitrary.
//
// # Safety
// `a` null or live.
bool ma_alignment_low_confidence(const struct MaAlignment *a);

// Hypothesis counts before and after rejection. Either pointer may be null.
//
// # Safety
// `a` live; non-null outputs writable.
enum MaStatus ma_alignment_hypotheses(const struct MaAlignment *a, size_t *initial, size_t *kept);

// Rooms found in each map. Either pointer may be null.
//
// # Safety
// `a` live; non-null outputs writable.
enum MaStatus ma_alignment_rooms(const struct MaAlignment *a, size_t *map1, size_t *map2);

// The `key = value` result document, as printed by the command line tool.
// Caller-owned; null for a null handle.
//
// # Safety
// `a` null or live.
char *ma_alignment_document(const struct MaAlignment *a);

// The hypothesis pool as JSON lines. Caller-owned; null for a null handle.
//
// # Safety
// `a` null or live.
char *ma_alignment_pool_jsonl(const struct MaAlignment *a);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MAPALIGN_H */
