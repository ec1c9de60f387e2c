#ifndef CDCODE_H
#define CDCODE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum {
  CDC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CDC_STATUS_NULL_POINTER = 1,
  /**
   * A block length, rate, alphabet or source is invalid.
   */
  CDC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A letter is outside its alphabet or a length does not match the code.
   */
  CDC_STATUS_INVALID_INPUT = 3,
  /**
   * The codeword does not parse or disagrees with the side information.
   */
  CDC_STATUS_MALFORMED = 4,
  /**
   * The codeword has fewer bits than it needs.
   */
  CDC_STATUS_TRUNCATED = 5,
  /**
   * The block was outside the decodable set; the decoder output is all zeros.
   */
  CDC_STATUS_FLAGGED = 6,
  /**
   * Building a coding table would exceed the memory budget.
   */
  CDC_STATUS_RESOURCE_LIMIT = 7,
  /**
   * The output buffer is too small; the required size is reported.
   */
  CDC_STATUS_BUFFER_TOO_SMALL = 8,
  /**
   * An internal invariant failed.
   */
  CDC_STATUS_INTERNAL = 9,
} CdcStatus;

/**
 * Fixed-length code handle.
 */
typedef struct CdcFfCode CdcFfCode;

/**
 * Variable-length code handle.
 */
typedef struct CdcFvCode CdcFvCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *cdc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cdc_version(void);

/**
 * Creates the universal fixed-length code of block length `n` and rate
 * `rate` bits per letter over alphabets of sizes `ax` and `ay`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
CdcStatus cdc_ff_new(size_t n, double rate, uint32_t ax, uint32_t ay, CdcFfCode **out);

/**
 * Releases a handle from [`cdc_ff_new`]. Null is ignored.
 *
 * # Safety
 * `code` must come from [`cdc_ff_new`] and not be used afterwards.
 */
void cdc_ff_free(CdcFfCode *code);

/**
 * Bits in every codeword of this code, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
uint32_t cdc_ff_codeword_bits(const CdcFfCode *code);

/**
 * Encodes the pair `(x, y)` of length `n`. Writes `ceil(bits / 8)` bytes
 * to `out` and the bit length to `out_bits`. A pair outside the decodable
 * set still yields a valid codeword and returns `Flagged`.
 *
 * # Safety
 * `x` and `y` must point to `n` bytes, `out` to `out_cap` writable bytes.
 */
CdcStatus cdc_ff_encode(const CdcFfCode *code,
                        const uint8_t *x,
                        const uint8_t *y,
                        size_t n,
                        uint8_t *out,
                        size_t out_cap,
                        size_t *out_bits);

/**
 * Recovers `x` from a codeword and the side information `y`.
 *
 * # Safety
 * `cw` must point to `ceil(cw_bits / 8)` bytes, `y` to `n` bytes and
 * `out_x` to `n` writable bytes.
 */
CdcStatus cdc_ff_decode_x(const CdcFfCode *code,
                          const uint8_t *cw,
                          size_t cw_bits,
                          const uint8_t *y,
                          size_t n,
                          uint8_t *out_x);

/**
 * Recovers `y` from a codeword and the side information `x`.
 *
 * # Safety
 * As for [`cdc_ff_decode_x`].
 */
CdcStatus cdc_ff_decode_y(const CdcFfCode *code,
                          const uint8_t *cw,
                          size_t cw_bits,
                          const uint8_t *x,
                          size_t n,
                          uint8_t *out_y);

/**
 * Creates the universal variable-length code of block length `n`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
CdcStatus cdc_fv_new(size_t n, uint32_t ax, uint32_t ay, CdcFvCode **out);

/**
 * Releases a handle from [`cdc_fv_new`]. Null is ignored.
 *
 * # Safety
 * `code` must come from [`cdc_fv_new`] and not be used afterwards.
 */
void cdc_fv_free(CdcFvCode *code);

/**
 * Longest codeword of this code in bits, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
uint32_t cdc_fv_max_codeword_bits(const CdcFvCode *code);

/**
 * Encodes the pair `(x, y)` of length `n`; see [`cdc_ff_encode`] for the
 * output convention.
 *
 * # Safety
 * `x` and `y` must point to `n` bytes, `out` to `out_cap` writable bytes.
 */
CdcStatus cdc_fv_encode(const CdcFvCode *code,
                        const uint8_t *x,
                        const uint8_t *y,
                        size_t n,
                        uint8_t *out,
                        size_t out_cap,
                        size_t *out_bits);

/**
 * Recovers `x` from a variable-length codeword and the side information `y`.
 *
 * # Safety
 * `cw` must point to `ceil(cw_bits / 8)` bytes, `y` to `n` bytes and
 * `out_x` to `n` writable bytes.
 */
CdcStatus cdc_fv_decode_x(const CdcFvCode *code,
                          const uint8_t *cw,
                          size_t cw_bits,
                          const uint8_t *y,
                          size_t n,
                          uint8_t *out_x);

/**
 * Recovers `y` from a variable-length codeword and the side information `x`.
 *
 * # Safety
 * As for [`cdc_fv_decode_x`].
 */
CdcStatus cdc_fv_decode_y(const CdcFvCode *code,
                          const uint8_t *cw,
                          size_t cw_bits,
                          const uint8_t *x,
                          size_t n,
                          uint8_t *out_y);

/**
 * Minimum achievable rate `max{H(X|Y), H(Y|X)}` of the source whose
 * row-major `ax * ay` probabilities are at `p`.
 *
 * # Safety
 * `p` must point to `ax * ay` doubles and `out_rate` to one writable double.
 */
CdcStatus cdc_achievable_rate(const double *p, uint32_t ax, uint32_t ay, double *out_rate);

/**
 * Error exponent of the fixed-length code at block length `n`: the minimum
 * divergence over joint types outside the decodable set. Infinite when no
 * type lies outside.
 *
 * # Safety
 * As for [`cdc_achievable_rate`].
 */
CdcStatus cdc_error_exponent(const double *p,
                             uint32_t ax,
                             uint32_t ay,
                             size_t n,
                             double rate,
                             double *out_exponent);

/**
 * Correct-decoding exponent at block length `n`: the minimum divergence
 * over correctly decoded joint types.
 *
 * # Safety
 * As for [`cdc_achievable_rate`].
 */
CdcStatus cdc_correct_exponent(const double *p,
                               uint32_t ax,
                               uint32_t ay,
                               size_t n,
                               double rate,
                               double *out_exponent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDCODE_H */
