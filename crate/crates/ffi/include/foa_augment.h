#ifndef FOA_AUGMENT_H
#define FOA_AUGMENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FoaStatus {
  FOA_STATUS_OK = 0,
  FOA_STATUS_NULL_POINTER = 1,
  FOA_STATUS_INVALID_ARGUMENT = 2,
  FOA_STATUS_SPAN_MISMATCH = 3,
  FOA_STATUS_NO_ACTIVE_FRAMES = 4,
  FOA_STATUS_OVERLAP_UNSUPPORTED = 5,
  FOA_STATUS_RNG_FAILURE = 6,
  FOA_STATUS_NO_COACTIVE_FRAMES = 7,
  FOA_STATUS_BAD_CHANNEL_COUNT = 8,
  FOA_STATUS_UNSUPPORTED_FORMAT = 9,
  FOA_STATUS_CORRUPT_HEADER = 10,
  FOA_STATUS_PARSE = 11,
  FOA_STATUS_RANGE = 12,
  FOA_STATUS_IO = 13,
  FOA_STATUS_PANIC = 14,
} FoaStatus;

typedef enum FoaElevationMode {
  /**
   * Limits are the dataset's elevation range.
   */
  FOA_ELEVATION_MODE_LABEL_RANGE = 0,
  /**
   * Limits are the elevation-shift interval itself.
   */
  FOA_ELEVATION_MODE_FIXED_RANGE = 1,
} FoaElevationMode;

/**
 * Opaque per-frame label track.
 */
typedef struct FoaLabels FoaLabels;

/**
 * Opaque four-channel signal.
 */
typedef struct FoaSignal FoaSignal;

/**
 * One active source in one frame. Angles in radians.
 */
typedef struct FoaLabelEntry {
  uint32_t source_id;
  double azimuth;
  double elevation;
} FoaLabelEntry;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *foa_last_error_message(void);

/**
 * Builds a signal from four planar channel buffers in W, Y, Z, X order,
 * each `len` samples long.
 *
 * # Safety
 * `channels` points to four readable buffers of `len` doubles.
 */
enum FoaStatus foa_signal_new(uint32_t sample_rate,
                              const double *const *channels,
                              size_t len,
                              struct FoaSignal **out);

/**
 * # Safety
 * `path` is a NUL-terminated UTF-8 string; `out` is writable.
 */
enum FoaStatus foa_signal_read_wav(const char *path, struct FoaSignal **out);

/**
 * Writes 32-bit float WAV.
 *
 * # Safety
 * `sig` is a live handle; `path` is a NUL-terminated UTF-8 string.
 */
enum FoaStatus foa_signal_write_wav(const struct FoaSignal *sig, const char *path);

/**
 * Samples per channel; 0 for a null handle.
 *
 * # Safety
 * `sig` is null or a live handle.
 */
size_t foa_signal_len(const struct FoaSignal *sig);

/**
 * # Safety
 * `sig` is null or a live handle.
 */
uint32_t foa_signal_sample_rate(const struct FoaSignal *sig);

/**
 * Copies channel `channel` (0 W, 1 Y, 2 Z, 3 X) into `dst`, which holds
 * `dst_len` doubles and must fit the whole channel.
 *
 * # Safety
 * `sig` is a live handle; `dst` is writable for `dst_len` doubles.
 */
enum FoaStatus foa_signal_copy_channel(const struct FoaSignal *sig,
                                       uint32_t channel,
                                       double *dst,
                                       size_t dst_len);

/**
 * # Safety
 * `sig` is null or a handle not yet freed.
 */
void foa_signal_free(struct FoaSignal *sig);

/**
 * # Safety
 * `path` is a NUL-terminated UTF-8 string; `out` is writable.
 */
enum FoaStatus foa_labels_read_csv(const char *path, struct FoaLabels **out);

/**
 * Writes a label CSV. A `sample_rate` of 0 omits it from the header.
 *
 * # Safety
 * `labels` is a live handle; `path` is a NUL-terminated UTF-8 string.
 */
enum FoaStatus foa_labels_write_csv(const struct FoaLabels *labels,
                                    uint32_t sample_rate,
                                    const char *path);

/**
 * Number of frames; 0 for a null handle.
 *
 * # Safety
 * `labels` is null or a live handle.
 */
size_t foa_labels_frame_count(const struct FoaLabels *labels);

/**
 * Frame hop in seconds; 0 for a null handle.
 *
 * # Safety
 * `labels` is null or a live handle.
 */
double foa_labels_frame_hop(const struct FoaLabels *labels);

/**
 * Active sources in `frame`; 0 for a null handle or a frame past the end.
 *
 * # Safety
 * `labels` is null or a live handle.
 */
size_t foa_labels_entry_count(const struct FoaLabels *labels, size_t frame);

/**
 * # Safety
 * `labels` is a live handle; `out` is writable.
 */
enum FoaStatus foa_labels_get_entry(const struct FoaLabels *labels,
                                    size_t frame,
                                    size_t index,
                                    struct FoaLabelEntry *out);

/**
 * # Safety
 * `labels` is null or a handle not yet freed.
 */
void foa_labels_free(struct FoaLabels *labels);

/**
 * Applies one of the 16 fixed patterns, named like `s+d+90e-`.
 *
 * # Safety
 * Handles are live; `pattern` is a NUL-terminated string; outputs are writable.
 */
enum FoaStatus foa_apply_pattern(const struct FoaSignal *sig,
                                 const struct FoaLabels *labels,
                                 const char *pattern,
                                 struct FoaSignal **out_sig,
                                 struct FoaLabels **out_labels);

/**
 * Labels-first augmentation. Angles are radians; `out_alpha` and `out_beta`
 * may be null.
 *
 * # Safety
 * Handles are live; non-null outputs are writable.
 */
enum FoaStatus foa_apply_labels_first(const struct FoaSignal *sig,
                                      const struct FoaLabels *labels,
                                      enum FoaElevationMode mode,
                                      double range_min,
                                      double range_max,
                                      uint64_t seed,
                                      struct FoaSignal **out_sig,
                                      struct FoaLabels **out_labels,
                                      double *out_alpha,
                                      double *out_beta);

/**
 * Channels-first augmentation with a seeded random orthonormal matrix.
 * `out_rotation` (9 doubles, row-major) may be null.
 *
 * # Safety
 * Handles are live; non-null outputs are writable.
 */
enum FoaStatus foa_apply_channels_first(const struct FoaSignal *sig,
                                        const struct FoaLabels *labels,
                                        uint64_t seed,
                                        struct FoaSignal **out_sig,
                                        struct FoaLabels **out_labels,
                                        double *out_rotation);

/**
 * Channels-first augmentation with a caller-supplied orthonormal matrix
 * (9 doubles, row-major).
 *
 * # Safety
 * Handles are live; `rotation` is readable for 9 doubles; outputs are writable.
 */
enum FoaStatus foa_apply_rotation(const struct FoaSignal *sig,
                                  const struct FoaLabels *labels,
                                  const double *rotation,
                                  struct FoaSignal **out_sig,
                                  struct FoaLabels **out_labels);

/**
 * Per-frame DOA estimate as a label track with source id 0.
 *
 * # Safety
 * `sig` is a live handle; `out` is writable.
 */
enum FoaStatus foa_estimate_doa(const struct FoaSignal *sig,
                                double frame_hop,
                                double activity_threshold,
                                struct FoaLabels **out);

/**
 * Mean angular error in degrees over frames active in both tracks.
 *
 * # Safety
 * Handles are live; `out_deg` is writable.
 */
enum FoaStatus foa_doa_error(const struct FoaLabels *estimate,
                             const struct FoaLabels *reference,
                             double *out_deg);

/**
 * Fraction of frames whose active-source count matches, in `[0, 1]`.
 *
 * # Safety
 * Handles are live; `out` is writable.
 */
enum FoaStatus foa_frame_recall(const struct FoaLabels *estimate,
                                const struct FoaLabels *reference,
                                double *out);

/**
 * Azimuth wrapped to `[-π, π)`.
 */
double foa_wrap_azimuth(double azimuth);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOA_AUGMENT_H */
