#ifndef STRAIGHT_H
#define STRAIGHT_H

#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum StraightStatus {
  STRAIGHT_STATUS_OK = 0,
  STRAIGHT_STATUS_NULL_POINTER = 1,
  STRAIGHT_STATUS_INVALID_ARGUMENT = 2,
  STRAIGHT_STATUS_IO = 3,
  STRAIGHT_STATUS_FORMAT = 4,
  STRAIGHT_STATUS_OUT_OF_RANGE = 5,
  STRAIGHT_STATUS_PANIC = 6,
} StraightStatus;

/*
 Opaque grayscale image.
 */
typedef struct StraightImage StraightImage;

/*
 Opaque list of extracted segments.
 */
typedef struct StraightSegments StraightSegments;

/*
 Extraction parameters. Fill with [`straight_params_default`] and then
 override single fields.
 */
typedef struct StraightParams {
  double threshold;
  uint32_t bins;
  double window_radius;
  double prominence_fraction;
  double min_votes;
  uint32_t max_gap;
  double uncertainty_radius;
  double position_range;
  uint32_t grid;
  /*
   Nonzero enables hierarchical zoom.
   */
  uint8_t zoom;
  uint32_t min_length;
  double support_fraction;
} StraightParams;

/*
 One segment. Coordinates are pixel centres in image space (x right,
 y down).
 */
typedef struct StraightSegment {
  double x1;
  double y1;
  double x2;
  double y2;
  /*
   `L+ + L-` for STRAIGHT, Euclidean length for the Hough baseline.
   */
  double length;
  /*
   Supporting edge points.
   */
  uint64_t support;
  double theta_deg;
} StraightSegment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *straight_version(void);

/*
 Message of the last failed call on this thread, or null. The pointer
 stays valid until the next call into the library on this thread.
 */
const char *straight_last_error_message(void);

/*
 Default parameters.

 # Safety
 `out` must be null or point to writable memory for one `StraightParams`.
 */
enum StraightStatus straight_params_default(struct StraightParams *out);

/*
 Image from `width * height` row-major 8-bit samples.

 # Safety
 `data` must point to `width * height` readable bytes; `out` must be
 writable.
 */
enum StraightStatus straight_image_from_u8(size_t width,
                                           size_t height,
                                           const uint8_t *data,
                                           struct StraightImage **out);

/*
 Image from `width * height` row-major intensities.

 # Safety
 `data` must point to `width * height` readable doubles; `out` must be
 writable.
 */
enum StraightStatus straight_image_from_f64(size_t width,
                                            size_t height,
                                            const double *data,
                                            struct StraightImage **out);

/*
 Load a PNG or PGM file.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum StraightStatus straight_image_load(const char *path, struct StraightImage **out);

/*
 Width in pixels, 0 for a null handle.

 # Safety
 `image` must be null or a live handle.
 */
size_t straight_image_width(const struct StraightImage *image);

/*
 Height in pixels, 0 for a null handle.

 # Safety
 `image` must be null or a live handle.
 */
size_t straight_image_height(const struct StraightImage *image);

/*
 Release an image. Null is ignored.

 # Safety
 `image` must be null or a handle not yet freed.
 */
void straight_image_free(struct StraightImage *image);

/*
 Run the STRAIGHT extractor. `params` may be null for the defaults.

 # Safety
 `image` must be a live handle, `params` null or readable, `out` writable.
 */
enum StraightStatus straight_extract(const struct StraightImage *image,
                                     const struct StraightParams *params,
                                     struct StraightSegments **out);

/*
 Run the classical Hough baseline with edge threshold `threshold` and
 its default settings otherwise.

 # Safety
 `image` must be a live handle and `out` writable.
 */
enum StraightStatus straight_hough_extract(const struct StraightImage *image,
                                           double threshold,
                                           struct StraightSegments **out);

/*
 Number of segments, 0 for a null handle.

 # Safety
 `list` must be null or a live handle.
 */
size_t straight_segments_len(const struct StraightSegments *list);

/*
 Copy segment `index` into `out`.

 # Safety
 `list` must be a live handle and `out` writable.
 */
enum StraightStatus straight_segments_get(const struct StraightSegments *list,
                                          size_t index,
                                          struct StraightSegment *out);

/*
 Release a segment list. Null is ignored.

 # Safety
 `list` must be null or a handle not yet freed.
 */
void straight_segments_free(struct StraightSegments *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRAIGHT_H */
