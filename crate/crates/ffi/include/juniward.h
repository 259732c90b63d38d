/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef JUNIWARD_H
#define JUNIWARD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define JUNIWARD_MODE_ORIGINAL 0

#define JUNIWARD_MODE_FIXED 1

#define JUNIWARD_PATTERN_STRIPES_H 0

#define JUNIWARD_PATTERN_STRIPES_2D 1

typedef enum JuniwardStatus {
  JUNIWARD_STATUS_OK = 0,
  JUNIWARD_STATUS_INVALID_ARGUMENT = 1,
  JUNIWARD_STATUS_IO = 2,
  JUNIWARD_STATUS_NULL_POINTER = 3,
  JUNIWARD_STATUS_PANIC = 4,
} JuniwardStatus;

/**
 * Quantized DCT coefficients of one luminance plane.
 */
typedef struct JuniwardContainer JuniwardContainer;

/**
 * Per-coefficient embedding costs for one window mode.
 */
typedef struct JuniwardCostMap JuniwardCostMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null after a
 * success. The pointer stays valid until the next call on this thread.
 */
const char *juniward_last_error_message(void);

/**
 * Reads a DCTC v1 JSON container.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum JuniwardStatus juniward_container_read(const char *path, struct JuniwardContainer **out);

/**
 * Writes `container` in canonical DCTC v1 form.
 *
 * # Safety
 * `container` must come from this library; `path` must be NUL-terminated.
 */
enum JuniwardStatus juniward_container_write(const struct JuniwardContainer *container,
                                             const char *path);

/**
 * Builds a container from a row-major 8×8 quantization table and
 * `height * width` row-major coefficients.
 *
 * # Safety
 * `quant` must point to 64 values and `coeffs` to `height * width` values.
 */
enum JuniwardStatus juniward_container_new(size_t height,
                                           size_t width,
                                           const uint16_t *quant,
                                           const int32_t *coeffs,
                                           struct JuniwardContainer **out);

/**
 * Generates a synthetic cover (see `JUNIWARD_PATTERN_*`) with the given
 * texture strength in [0, 1], compressed at `quality`.
 *
 * # Safety
 * `out` must be writable.
 */
enum JuniwardStatus juniward_container_synth(uint32_t pattern,
                                             size_t height,
                                             size_t width,
                                             uint32_t quality,
                                             uint64_t seed,
                                             double texture,
                                             struct JuniwardContainer **out);

/**
 * # Safety
 * `container` must be null or come from this library, and not be used afterwards.
 */
void juniward_container_free(struct JuniwardContainer *container);

/**
 * # Safety
 * `container` must come from this library; `height` and `width` must be writable.
 */
enum JuniwardStatus juniward_container_dims(const struct JuniwardContainer *container,
                                            size_t *height,
                                            size_t *width);

/**
 * Copies `height * width` row-major coefficients into `out`.
 *
 * # Safety
 * `out` must have room for `len` values.
 */
enum JuniwardStatus juniward_container_copy_coeffs(const struct JuniwardContainer *container,
                                                   int32_t *out,
                                                   size_t len);

/**
 * Number of nonzero AC coefficients.
 *
 * # Safety
 * `container` must come from this library; `out` must be writable.
 */
enum JuniwardStatus juniward_container_nzac(const struct JuniwardContainer *container, size_t *out);

/**
 * Writes the 64 row-major steps of the quality-scaled luminance table.
 *
 * # Safety
 * `out` must have room for 64 values.
 */
enum JuniwardStatus juniward_quality_table(uint32_t quality, uint16_t *out);

/**
 * Top-left corner of the 23×23 residual window of block `(block_row,
 * block_col)` in padded-plane coordinates.
 *
 * # Safety
 * `row0` and `col0` must be writable.
 */
enum JuniwardStatus juniward_window_bounds(size_t block_row,
                                           size_t block_col,
                                           uint32_t mode,
                                           size_t *row0,
                                           size_t *col0);

/**
 * # Safety
 * `container` must come from this library; `out` must be writable.
 */
enum JuniwardStatus juniward_costmap_compute(const struct JuniwardContainer *container,
                                             uint32_t mode,
                                             double sigma,
                                             struct JuniwardCostMap **out);

/**
 * # Safety
 * `costmap` must be null or come from this library, and not be used afterwards.
 */
void juniward_costmap_free(struct JuniwardCostMap *costmap);

/**
 * Copies `height * width` row-major costs into `out`. Wet coefficients
 * carry the wet cost.
 *
 * # Safety
 * `out` must have room for `len` values.
 */
enum JuniwardStatus juniward_costmap_copy_rho(const struct JuniwardCostMap *costmap,
                                              double *out,
                                              size_t len);

/**
 * # Safety
 * `costmap` must come from this library; `out` must be writable.
 */
enum JuniwardStatus juniward_costmap_nzac(const struct JuniwardCostMap *costmap, size_t *out);

/**
 * Per-block costs, `(height / 8) * (width / 8)` values in row-major order.
 *
 * # Safety
 * `out` must have room for `len` values.
 */
enum JuniwardStatus juniward_block_costs(const struct JuniwardContainer *container,
                                         uint32_t mode,
                                         double sigma,
                                         double *out,
                                         size_t len);

/**
 * Simulates embedding `payload` bits per nonzero AC coefficient with costs
 * from `mode` and writes the stego container to `out`. `lambda` may be null.
 *
 * # Safety
 * `container` must come from this library; `out` must be writable.
 */
enum JuniwardStatus juniward_embed(const struct JuniwardContainer *container,
                                   uint32_t mode,
                                   double sigma,
                                   double payload,
                                   uint64_t seed,
                                   struct JuniwardContainer **out,
                                   double *lambda);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JUNIWARD_H */
