#ifndef FALLDET_H
#define FALLDET_H

#include <stddef.h>
#include <stdint.h>

#define FD_OK 0

#define FD_ERR_NULL 1

#define FD_ERR_INVALID_INPUT 2

#define FD_ERR_PARSE 3

#define FD_ERR_IO 4

#define FD_ERR_NO_DEPTH 5

#define FD_ERR_LIFT 6

#define FD_ERR_NO_GROUND 7

#define FD_ERR_PANIC 99

// Opaque engine holding a validated configuration.
typedef struct FdEngine FdEngine;

// Pinhole intrinsics in pixels.
typedef struct FdIntrinsics {
  double fx;
  double fy;
  double cx;
  double cy;
  uint32_t width;
  uint32_t height;
} FdIntrinsics;

// A camera-frame point in meters.
typedef struct FdPoint3 {
  double x;
  double y;
  double z;
} FdPoint3;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an engine. `config_toml` may be null for the defaults; otherwise
// it is a configuration document with `[reasoning]` and `[ground]` tables.
//
// # Safety
// `config_toml` must be null or a NUL-terminated string; `out` must be a
// valid pointer.
int32_t fd_engine_new(const char *config_toml, struct FdEngine **out);

// Releases an engine. Null is ignored.
//
// # Safety
// `engine` must be null or a pointer from `fd_engine_new` not yet freed.
void fd_engine_free(struct FdEngine *engine);

// Classifies every person of one frame. `depth_m` holds `width * height`
// row-major depths in meters (NaN or out-of-range values are holes);
// `keypoints_json` is a keypoints document. On success `*out_json` is a
// JSON array with one report per person.
//
// # Safety
// Pointers must be valid; `depth_m` must hold `depth_len` floats.
int32_t fd_engine_process_frame(const struct FdEngine *engine,
                                const struct FdIntrinsics *k,
                                const float *depth_m,
                                size_t depth_len,
                                const char *keypoints_json,
                                uint64_t frame_id,
                                char **out_json);

// Runs a whole session directory. `*out_json` receives the session result,
// including metrics when the directory has `labels.csv`.
//
// # Safety
// Pointers must be valid; `session_dir` must be NUL-terminated.
int32_t fd_engine_process_session(const struct FdEngine *engine,
                                  const char *session_dir,
                                  char **out_json);

// Back-projects pixel `(u, v)` at `depth` meters.
//
// # Safety
// `k` and `out` must be valid pointers.
int32_t fd_back_project(const struct FdIntrinsics *k,
                        double u,
                        double v,
                        double depth,
                        struct FdPoint3 *out);

// Body surface area in m² from weight in kg and height in cm.
//
// # Safety
// `out` must be a valid pointer.
int32_t fd_dubois_bsa(double weight_kg, double height_cm, double *out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void fd_string_free(char *s);

// Message of the last failure on this thread, or an empty string. Valid
// until the next call into the library on the same thread.
const char *fd_last_error(void);

// Library version as a static string.
const char *fd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FALLDET_H */
