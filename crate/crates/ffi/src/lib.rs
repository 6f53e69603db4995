//! C ABI over the `coded_caching` library.
//!
//! Every function returns a [`CcStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`cc_last_error_message`]. Profiles, groupings and allocations are opaque
//! handles owned by the caller and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coded_caching::allocator::{optimize_allocation, MemoryAllocation, Strategy};
use coded_caching::analytic::{
    cutset_lower_bound, grouped_expected_rate_exact, grouped_rate_jensen, hpf_expected_rate,
    peak_rate, theorem2_lower_bound, HpfMode,
};
use coded_caching::bitsim::{simulate_expected_rate, SimParams};
use coded_caching::popularity::{
    load_profile, partition_factor_two, partition_two_group, FileGrouping, PopularityProfile,
};
use coded_caching::probability::coupon_bound_check;
use coded_caching::Error;

/// Result code of every `cc_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    InvalidArgument = 1,
    Parse = 2,
    EmptyProfile = 3,
    AllocationMismatch = 4,
    StrategyMismatch = 5,
    OverAllocated = 6,
    DemandOutOfRange = 7,
    Undecodable = 8,
    Internal = 9,
    NullPointer = 10,
    Panic = 11,
}

/// Memory allocation rule for [`cc_allocation_optimize`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcStrategy {
    Uniform = 0,
    Optimized = 1,
    Hpf = 2,
    TwoGroup = 3,
}

impl From<CcStrategy> for Strategy {
    fn from(s: CcStrategy) -> Self {
        match s {
            CcStrategy::Uniform => Strategy::Uniform,
            CcStrategy::Optimized => Strategy::Optimized,
            CcStrategy::Hpf => Strategy::Hpf,
            CcStrategy::TwoGroup => Strategy::TwoGroup,
        }
    }
}

pub struct CcProfile(PopularityProfile);
pub struct CcGrouping(FileGrouping);
pub struct CcAllocation(MemoryAllocation);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CcStatus {
    match e {
        Error::InvalidArgument(_) => CcStatus::InvalidArgument,
        Error::Parse { .. } => CcStatus::Parse,
        Error::EmptyProfile => CcStatus::EmptyProfile,
        Error::AllocationMismatch { .. } => CcStatus::AllocationMismatch,
        Error::StrategyMismatch { .. } => CcStatus::StrategyMismatch,
        Error::OverAllocated { .. } => CcStatus::OverAllocated,
        Error::DemandOutOfRange { .. } => CcStatus::DemandOutOfRange,
        Error::Undecodable { .. } => CcStatus::Undecodable,
        Error::Internal(_) => CcStatus::Internal,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Arg(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CcStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer passed for `{what}`"));
            CcStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(&msg);
            CcStatus::InvalidArgument
        }
        Err(_) => {
            set_error("unexpected panic inside the library");
            CcStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn get<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn fill(buf: *mut f64, len: usize, values: &[f64]) -> Result<(), Fail> {
    if len < values.len() {
        return Err(Fail::Arg(format!(
            "buffer holds {len} values but {} are needed",
            values.len()
        )));
    }
    if values.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(Fail::Null("buf"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `cc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn cc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Peak rate `R(M, N, K)` of decentralized coded caching.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn cc_peak_rate(memory: f64, files: usize, users: f64, out: *mut f64) -> CcStatus {
    guard(|| write(out, peak_rate(memory, files, users)?, "out"))
}

/// Cut-set lower bound on the peak rate.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn cc_cutset_lower_bound(
    memory: f64,
    files: usize,
    users: usize,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        if memory.is_nan() || memory < 0.0 || files == 0 {
            return Err(Fail::Arg("need memory >= 0 and files >= 1".into()));
        }
        write(out, cutset_lower_bound(memory, files, users), "out")
    })
}

fn new_profile(
    out: *mut *mut CcProfile,
    make: impl FnOnce() -> Result<PopularityProfile, Fail>,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let p = make()?;
        unsafe { out.write(Box::into_raw(Box::new(CcProfile(p)))) };
        Ok(())
    })
}

/// Zipf profile `p_n ∝ n^-alpha` over `n` files.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_zipf(n: usize, alpha: f64, out: *mut *mut CcProfile) -> CcStatus {
    new_profile(out, || Ok(PopularityProfile::zipf(n, alpha)?))
}

/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_uniform(n: usize, out: *mut *mut CcProfile) -> CcStatus {
    new_profile(out, || Ok(PopularityProfile::uniform(n)?))
}

/// Profile from nonnegative weights; zeros are dropped and the rest sorted
/// by decreasing weight and normalized.
///
/// # Safety
/// `weights` must point to `len` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_from_weights(
    weights: *const f64,
    len: usize,
    out: *mut *mut CcProfile,
) -> CcStatus {
    new_profile(out, || {
        let w = slice(weights, len, "weights")?;
        Ok(PopularityProfile::from_weights(w.iter().copied())?)
    })
}

/// Parses a `<file_id>,<weight>` table (one record per line).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_load(text: *const c_char, out: *mut *mut CcProfile) -> CcStatus {
    new_profile(out, || {
        if text.is_null() {
            return Err(Fail::Null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Fail::Arg("popularity text is not UTF-8".into()))?;
        Ok(load_profile(s)?.profile)
    })
}

/// Number of files, or 0 for a null handle.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_len(profile: *const CcProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.0.len())
}

/// Copies the probabilities (most popular first) into `buf`.
///
/// # Safety
/// `profile` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_probs(profile: *const CcProfile, buf: *mut f64, len: usize) -> CcStatus {
    guard(|| fill(buf, len, get(profile, "profile")?.0.probs()))
}

/// # Safety
/// `profile` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_profile_free(profile: *mut CcProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

fn new_grouping(
    out: *mut *mut CcGrouping,
    make: impl FnOnce() -> Result<FileGrouping, Fail>,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let g = make()?;
        unsafe { out.write(Box::into_raw(Box::new(CcGrouping(g)))) };
        Ok(())
    })
}

/// Groups whose popularities lie within a factor of two of each other.
///
/// # Safety
/// `profile` must be a live handle; `out` valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_grouping_factor_two(
    profile: *const CcProfile,
    out: *mut *mut CcGrouping,
) -> CcStatus {
    new_grouping(out, || Ok(partition_factor_two(&get(profile, "profile")?.0)))
}

/// Head of files with `K p_n >= 1`, and the rest.
///
/// # Safety
/// As for [`cc_grouping_factor_two`].
#[no_mangle]
pub unsafe extern "C" fn cc_grouping_two_group(
    profile: *const CcProfile,
    users: usize,
    out: *mut *mut CcGrouping,
) -> CcStatus {
    new_grouping(out, || Ok(partition_two_group(&get(profile, "profile")?.0, users)?))
}

/// Grouping from boundaries `0 = b_0 < ... < b_L = N`.
///
/// # Safety
/// `boundaries` must point to `len` readable values; otherwise as above.
#[no_mangle]
pub unsafe extern "C" fn cc_grouping_explicit(
    profile: *const CcProfile,
    boundaries: *const usize,
    len: usize,
    out: *mut *mut CcGrouping,
) -> CcStatus {
    new_grouping(out, || {
        let b = slice(boundaries, len, "boundaries")?;
        Ok(FileGrouping::explicit(&get(profile, "profile")?.0, b.to_vec())?)
    })
}

/// Number of groups, or 0 for a null handle.
///
/// # Safety
/// `grouping` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_grouping_num_groups(grouping: *const CcGrouping) -> usize {
    grouping.as_ref().map_or(0, |g| g.0.num_groups())
}

/// Copies the `L + 1` boundaries into `buf`.
///
/// # Safety
/// `grouping` must be a live handle and `buf` valid for `len` values.
#[no_mangle]
pub unsafe extern "C" fn cc_grouping_boundaries(
    grouping: *const CcGrouping,
    buf: *mut usize,
    len: usize,
) -> CcStatus {
    guard(|| {
        let b = get(grouping, "grouping")?.0.boundaries();
        if len < b.len() {
            return Err(Fail::Arg(format!(
                "buffer holds {len} values but {} are needed",
                b.len()
            )));
        }
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        ptr::copy_nonoverlapping(b.as_ptr(), buf, b.len());
        Ok(())
    })
}

/// # Safety
/// `grouping` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_grouping_free(grouping: *mut CcGrouping) {
    if !grouping.is_null() {
        drop(Box::from_raw(grouping));
    }
}

/// Expected rate when every user caches the `cached` most popular files;
/// `multicast` sends each missed file once instead of once per request.
///
/// # Safety
/// `profile` must be a live handle; `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn cc_hpf_expected_rate(
    profile: *const CcProfile,
    cached: usize,
    users: usize,
    multicast: bool,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        let mode = if multicast { HpfMode::Multicast } else { HpfMode::Unicast };
        let v = hpf_expected_rate(&get(profile, "profile")?.0, cached, users, mode)?;
        write(out, v, "out")
    })
}

fn new_allocation(
    out: *mut *mut CcAllocation,
    make: impl FnOnce() -> Result<MemoryAllocation, Fail>,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let a = make()?;
        unsafe { out.write(Box::into_raw(Box::new(CcAllocation(a)))) };
        Ok(())
    })
}

/// Per-group memory budgets summing to `memory`.
///
/// # Safety
/// `grouping` must be a live handle; `out` valid for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_allocation_optimize(
    grouping: *const CcGrouping,
    memory: f64,
    users: usize,
    strategy: CcStrategy,
    out: *mut *mut CcAllocation,
) -> CcStatus {
    new_allocation(out, || {
        let g = &get(grouping, "grouping")?.0;
        Ok(optimize_allocation(g, memory, users, strategy.into())?)
    })
}

/// Allocation from explicit budgets.
///
/// # Safety
/// `budgets` must point to `len` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn cc_allocation_from_budgets(
    budgets: *const f64,
    len: usize,
    out: *mut *mut CcAllocation,
) -> CcStatus {
    new_allocation(out, || {
        Ok(MemoryAllocation::new(slice(budgets, len, "budgets")?.to_vec())?)
    })
}

/// Number of budgets, or 0 for a null handle.
///
/// # Safety
/// `alloc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_allocation_num_groups(alloc: *const CcAllocation) -> usize {
    alloc.as_ref().map_or(0, |a| a.0.num_groups())
}

/// Copies the budgets into `buf`.
///
/// # Safety
/// `alloc` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cc_allocation_budgets(
    alloc: *const CcAllocation,
    buf: *mut f64,
    len: usize,
) -> CcStatus {
    guard(|| fill(buf, len, get(alloc, "alloc")?.0.budgets()))
}

/// # Safety
/// `alloc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_allocation_free(alloc: *mut CcAllocation) {
    if !alloc.is_null() {
        drop(Box::from_raw(alloc));
    }
}

/// Exact expected rate of the grouped scheme.
///
/// # Safety
/// Handles must be live; `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn cc_grouped_expected_rate_exact(
    grouping: *const CcGrouping,
    alloc: *const CcAllocation,
    users: usize,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        let v = grouped_expected_rate_exact(&get(grouping, "grouping")?.0, &get(alloc, "alloc")?.0, users)?;
        write(out, v, "out")
    })
}

/// Upper bound on the grouped rate with `K_ℓ` replaced by its mean.
///
/// # Safety
/// Handles must be live; `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn cc_grouped_rate_jensen(
    grouping: *const CcGrouping,
    alloc: *const CcAllocation,
    users: usize,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        let v = grouped_rate_jensen(&get(grouping, "grouping")?.0, &get(alloc, "alloc")?.0, users)?;
        write(out, v, "out")
    })
}

/// Lower bound on the optimal expected rate; needs a factor-two grouping.
///
/// # Safety
/// `grouping` must be a live handle; `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn cc_theorem2_lower_bound(
    grouping: *const CcGrouping,
    memory: f64,
    users: usize,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        let v = theorem2_lower_bound(&get(grouping, "grouping")?.0, memory, users)?;
        write(out, v, "out")
    })
}

/// `P(w >= ⌈min(N,K)/4⌉)` for `K` uniform requests over `N` files, and
/// whether it reaches 2/3.
///
/// # Safety
/// Out pointers must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cc_coupon_bound_check(
    files: usize,
    users: usize,
    out_probability: *mut f64,
    out_holds: *mut bool,
) -> CcStatus {
    guard(|| {
        let c = coupon_bound_check(files, users)?;
        write(out_probability, c.probability, "out_probability")?;
        write(out_holds, c.holds, "out_holds")
    })
}

/// Monte Carlo estimate of the grouped scheme's normalized rate with
/// `file_bits`-bit files; every trial is decoded and checked.
///
/// # Safety
/// Handles must be live; out pointers valid for one double each.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn cc_simulate_expected_rate(
    profile: *const CcProfile,
    grouping: *const CcGrouping,
    alloc: *const CcAllocation,
    users: usize,
    trials: usize,
    file_bits: usize,
    seed: u64,
    out_mean: *mut f64,
    out_half_width: *mut f64,
) -> CcStatus {
    guard(|| {
        let mut params = SimParams::new(file_bits);
        params.library_seed = seed;
        let s = simulate_expected_rate(
            &params,
            &get(profile, "profile")?.0,
            &get(grouping, "grouping")?.0,
            &get(alloc, "alloc")?.0,
            users,
            trials,
            seed,
        )?;
        write(out_mean, s.mean, "out_mean")?;
        write(out_half_width, s.half_width, "out_half_width")
    })
}
