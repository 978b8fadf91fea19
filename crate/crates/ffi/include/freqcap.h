#ifndef FREQCAP_H
#define FREQCAP_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/*
 Result codes.
 */
typedef enum FreqcapStatus {
  FREQCAP_STATUS_OK = 0,
  FREQCAP_STATUS_NULL_POINTER = 1,
  FREQCAP_STATUS_DOMAIN = 2,
  FREQCAP_STATUS_DIMENSION = 3,
  FREQCAP_STATUS_CODEWORD = 4,
  FREQCAP_STATUS_UNSUPPORTED = 5,
  FREQCAP_STATUS_NUMERIC = 6,
  FREQCAP_STATUS_QUADRATURE = 7,
  FREQCAP_STATUS_ATTEMPT_BUDGET = 8,
  FREQCAP_STATUS_CONFIG = 9,
  FREQCAP_STATUS_IO = 10,
  FREQCAP_STATUS_FRAMING = 11,
  FREQCAP_STATUS_PANIC = 12,
} FreqcapStatus;

/*
 Parameters of the multinomial frequency channel.
 */
typedef struct FreqcapChannel FreqcapChannel;

/*
 Finite-support probability mass function on the integers.
 */
typedef struct FreqcapPmf FreqcapPmf;

/*
 Seeded random stream.
 */
typedef struct FreqcapRng FreqcapRng;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *freqcap_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *freqcap_version(void);

/*
 Creates a random stream; identical `(seed, stream_id)` give identical draws.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum FreqcapStatus freqcap_rng_new(uint64_t seed, uint64_t stream_id, struct FreqcapRng **out);

/*
 # Safety
 `rng` must come from [`freqcap_rng_new`] and not be used afterwards. NULL is ignored.
 */
void freqcap_rng_free(struct FreqcapRng *rng);

/*
 Converse bound `½·ln(min(r, e·g))` in nats.

 # Safety
 `out` must be a valid writable pointer.
 */
enum FreqcapStatus freqcap_converse_bound(double g, double r, double *out);

/*
 Achievability bound `½·ln r − Ψ(r/g)` in nats.

 # Safety
 `out` must be a valid writable pointer.
 */
enum FreqcapStatus freqcap_achievability_bound(double g, double r, double *out);

/*
 Sampling-to-budget ratio maximizing `½·ln μ − Ψ(μ)` and the maximum.

 # Safety
 Both pointers must be valid and writable.
 */
enum FreqcapStatus freqcap_optimal_ratio(double *out_ratio, double *out_offset);

/*
 DNA storage log-cardinality: the leading term and the corrected lower bound, in nats.

 # Safety
 Both output pointers must be valid and writable.
 */
enum FreqcapStatus freqcap_dna_log_cardinality(double kl_total,
                                               double beta,
                                               uint32_t alphabet_size,
                                               bool optimized,
                                               double *out_leading,
                                               double *out_lower);

/*
 PMF on `offset, offset+1, …` proportional to `weights`.

 # Safety
 `weights` must point to `len` readable doubles; `out` must be writable.
 */
enum FreqcapStatus freqcap_pmf_from_weights(uint64_t offset,
                                            const double *weights,
                                            uintptr_t len,
                                            struct FreqcapPmf **out);

/*
 Truncated, rounded `Gamma(1/2, 2g)` input law with exponent `rho`.

 # Safety
 `out` must be writable.
 */
enum FreqcapStatus freqcap_pmf_truncated_gamma(double g, double rho, struct FreqcapPmf **out);

/*
 # Safety
 `pmf` must be a live handle; outputs must be writable.
 */
enum FreqcapStatus freqcap_pmf_support(const struct FreqcapPmf *pmf,
                                       uint64_t *out_min,
                                       uint64_t *out_max);

/*
 # Safety
 `pmf` must be a live handle; `out` must be writable.
 */
enum FreqcapStatus freqcap_pmf_mean(const struct FreqcapPmf *pmf, double *out);

/*
 # Safety
 `pmf` must be a live handle; `out` must be writable.
 */
enum FreqcapStatus freqcap_pmf_prob(const struct FreqcapPmf *pmf, uint64_t k, double *out);

/*
 # Safety
 `pmf` must come from a `freqcap_pmf_*` constructor and not be used afterwards. NULL is ignored.
 */
void freqcap_pmf_free(struct FreqcapPmf *pmf);

/*
 `I(X; Z)` in nats for `Z | X ~ Poi(gain·X)` and `X ~ pmf`.

 # Safety
 `pmf` must be a live handle; `out` must be writable.
 */
enum FreqcapStatus freqcap_mutual_information(const struct FreqcapPmf *pmf,
                                              double gain,
                                              double *out);

/*
 Channel with `n` types, budget `n·g` and `n·r` reads (`n·r` must be an integer).

 # Safety
 `out` must be writable.
 */
enum FreqcapStatus freqcap_channel_new(uintptr_t n,
                                       double g,
                                       double r,
                                       struct FreqcapChannel **out);

/*
 # Safety
 `channel` must be a live handle; `out` must be writable.
 */
enum FreqcapStatus freqcap_channel_total_samples(const struct FreqcapChannel *channel,
                                                 uint64_t *out);

/*
 # Safety
 `channel` must come from [`freqcap_channel_new`] and not be used afterwards. NULL is ignored.
 */
void freqcap_channel_free(struct FreqcapChannel *channel);

/*
 Transmits codeword `x` (length `len`) and writes the read counts to `y` (length `len`).

 # Safety
 `channel` and `rng` must be live handles; `x` must hold `len` readable and
 `y` `len` writable `uint64_t` values.
 */
enum FreqcapStatus freqcap_transmit(const struct FreqcapChannel *channel,
                                    struct FreqcapRng *rng,
                                    const uint64_t *x,
                                    uint64_t *y,
                                    uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREQCAP_H */
