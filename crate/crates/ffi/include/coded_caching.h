#ifndef CODED_CACHING_H
#define CODED_CACHING_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every `cc_*` call.
typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_INVALID_ARGUMENT = 1,
  CC_STATUS_PARSE = 2,
  CC_STATUS_EMPTY_PROFILE = 3,
  CC_STATUS_ALLOCATION_MISMATCH = 4,
  CC_STATUS_STRATEGY_MISMATCH = 5,
  CC_STATUS_OVER_ALLOCATED = 6,
  CC_STATUS_DEMAND_OUT_OF_RANGE = 7,
  CC_STATUS_UNDECODABLE = 8,
  CC_STATUS_INTERNAL = 9,
  CC_STATUS_NULL_POINTER = 10,
  CC_STATUS_PANIC = 11,
} CcStatus;

// Memory allocation rule for [`cc_allocation_optimize`].
typedef enum CcStrategy {
  CC_STRATEGY_UNIFORM = 0,
  CC_STRATEGY_OPTIMIZED = 1,
  CC_STRATEGY_HPF = 2,
  CC_STRATEGY_TWO_GROUP = 3,
} CcStrategy;

typedef struct CcAllocation CcAllocation;

typedef struct CcGrouping CcGrouping;

typedef struct CcProfile CcProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next `cc_*` call on the same thread.
const char *cc_last_error_message(void);

// Peak rate `R(M, N, K)` of decentralized coded caching.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum CcStatus cc_peak_rate(double memory, size_t files, double users, double *out);

// Cut-set lower bound on the peak rate.
//
// # Safety
// `out` must be null or valid for writing one `double`.
enum CcStatus cc_cutset_lower_bound(double memory, size_t files, size_t users, double *out);

// Zipf profile `p_n ∝ n^-alpha` over `n` files.
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum CcStatus cc_profile_zipf(size_t n, double alpha, struct CcProfile **out);

// # Safety
// `out` must be null or valid for writing one pointer.
enum CcStatus cc_profile_uniform(size_t n, struct CcProfile **out);

// Profile from nonnegative weights; zeros are dropped and the rest sorted
// by decreasing weight and normalized.
//
// # Safety
// `weights` must point to `len` readable doubles; `out` as above.
enum CcStatus cc_profile_from_weights(const double *weights, size_t len, struct CcProfile **out);

// Parses a `<file_id>,<weight>` table (one record per line).
//
// # Safety
// `text` must be a NUL-terminated string; `out` as above.
enum CcStatus cc_profile_load(const char *text, struct CcProfile **out);

// Number of files, or 0 for a null handle.
//
// # Safety
// `profile` must be null or a live handle.
size_t cc_profile_len(const struct CcProfile *profile);

// Copies the probabilities (most popular first) into `buf`.
//
// # Safety
// `profile` must be a live handle and `buf` valid for `len` doubles.
enum CcStatus cc_profile_probs(const struct CcProfile *profile, double *buf, size_t len);

// # Safety
// `profile` must be null or a handle not yet freed.
void cc_profile_free(struct CcProfile *profile);

// Groups whose popularities lie within a factor of two of each other.
//
// # Safety
// `profile` must be a live handle; `out` valid for one pointer.
enum CcStatus cc_grouping_factor_two(const struct CcProfile *profile, struct CcGrouping **out);

// Head of files with `K p_n >= 1`, and the rest.
//
// # Safety
// As for [`cc_grouping_factor_two`].
enum CcStatus cc_grouping_two_group(const struct CcProfile *profile,
                                    size_t users,
                                    struct CcGrouping **out);

// Grouping from boundaries `0 = b_0 < ... < b_L = N`.
//
// # Safety
// `boundaries` must point to `len` readable values; otherwise as above.
enum CcStatus cc_grouping_explicit(const struct CcProfile *profile,
                                   const size_t *boundaries,
                                   size_t len,
                                   struct CcGrouping **out);

// Number of groups, or 0 for a null handle.
//
// # Safety
// `grouping` must be null or a live handle.
size_t cc_grouping_num_groups(const struct CcGrouping *grouping);

// Copies the `L + 1` boundaries into `buf`.
//
// # Safety
// `grouping` must be a live handle and `buf` valid for `len` values.
enum CcStatus cc_grouping_boundaries(const struct CcGrouping *grouping, size_t *buf, size_t len);

// # Safety
// `grouping` must be null or a handle not yet freed.
void cc_grouping_free(struct CcGrouping *grouping);

// Expected rate when every user caches the `cached` most popular files;
// `multicast` sends each missed file once instead of once per request.
//
// # Safety
// `profile` must be a live handle; `out` valid for one double.
enum CcStatus cc_hpf_expected_rate(const struct CcProfile *profile,
                                   size_t cached,
                                   size_t users,
                                   bool multicast,
                                   double *out);

// Per-group memory budgets summing to `memory`.
//
// # Safety
// `grouping` must be a live handle; `out` valid for one pointer.
enum CcStatus cc_allocation_optimize(const struct CcGrouping *grouping,
                                     double memory,
                                     size_t users,
                                     enum CcStrategy strategy,
                                     struct CcAllocation **out);

// Allocation from explicit budgets.
//
// # Safety
// `budgets` must point to `len` readable doubles; `out` as above.
enum CcStatus cc_allocation_from_budgets(const double *budgets,
                                         size_t len,
                                         struct CcAllocation **out);

// Number of budgets, or 0 for a null handle.
//
// # Safety
// `alloc` must be null or a live handle.
size_t cc_allocation_num_groups(const struct CcAllocation *alloc);

// Copies the budgets into `buf`.
//
// # Safety
// `alloc` must be a live handle and `buf` valid for `len` doubles.
enum CcStatus cc_allocation_budgets(const struct CcAllocation *alloc, double *buf, size_t len);

// # Safety
// `alloc` must be null or a handle not yet freed.
void cc_allocation_free(struct CcAllocation *alloc);

// Exact expected rate of the grouped scheme.
//
// # Safety
// Handles must be live; `out` valid for one double.
enum CcStatus cc_grouped_expected_rate_exact(const struct CcGrouping *grouping,
                                             const struct CcAllocation *alloc,
                                             size_t users,
                                             double *out);

// Upper bound on the grouped rate with `K_ℓ` replaced by its mean.
//
// # Safety
// Handles must be live; `out` valid for one double.
enum CcStatus cc_grouped_rate_jensen(const struct CcGrouping *grouping,
                                     const struct CcAllocation *alloc,
                                     size_t users,
                                     double *out);

// Lower bound on the optimal expected rate; needs a factor-two grouping.
//
// # Safety
// `grouping` must be a live handle; `out` valid for one double.
enum CcStatus cc_theorem2_lower_bound(const struct CcGrouping *grouping,
                                      double memory,
                                      size_t users,
                                      double *out);

// `P(w >= ⌈min(N,K)/4⌉)` for `K` uniform requests over `N` files, and
// whether it reaches 2/3.
//
// # Safety
// Out pointers must be valid for writing.
enum CcStatus cc_coupon_bound_check(size_t files,
                                    size_t users,
                                    double *out_probability,
                                    bool *out_holds);

// Monte Carlo estimate of the grouped scheme's normalized rate with
// `file_bits`-bit files; every trial is decoded and checked.
//
// # Safety
// Handles must be live; out pointers valid for one double each.
enum CcStatus cc_simulate_expected_rate(const struct CcProfile *profile,
                                        const struct CcGrouping *grouping,
                                        const struct CcAllocation *alloc,
                                        size_t users,
                                        size_t trials,
                                        size_t file_bits,
                                        uint64_t seed,
                                        double *out_mean,
                                        double *out_half_width);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CODED_CACHING_H */
