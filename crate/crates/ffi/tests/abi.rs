use std::ffi::{CStr, CString};
use std::ptr;

use coded_caching_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cc_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn peak_rate_and_errors() {
    let mut r = f64::NAN;
    assert_eq!(unsafe { cc_peak_rate(1.0, 2, 2.0, &mut r) }, CcStatus::Ok);
    assert_eq!(r, 0.75);
    assert_eq!(last_error(), "");
    assert_eq!(unsafe { cc_peak_rate(-1.0, 2, 2.0, &mut r) }, CcStatus::InvalidArgument);
    assert!(last_error().contains("nonnegative"));
    assert_eq!(unsafe { cc_peak_rate(1.0, 2, 2.0, ptr::null_mut()) }, CcStatus::NullPointer);
    let mut c = 0.0;
    assert_eq!(unsafe { cc_cutset_lower_bound(1.0, 2, 2, &mut c) }, CcStatus::Ok);
    assert!(c >= 0.75 / 12.0);
}

#[test]
fn profile_handles() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cc_profile_from_weights([1.0, 2.0].as_ptr(), 2, &mut p) }, CcStatus::Ok);
    assert_eq!(unsafe { cc_profile_len(p) }, 2);
    let mut buf = [0.0; 2];
    assert_eq!(unsafe { cc_profile_probs(p, buf.as_mut_ptr(), 2) }, CcStatus::Ok);
    assert!((buf[0] - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(unsafe { cc_profile_probs(p, buf.as_mut_ptr(), 1) }, CcStatus::InvalidArgument);

    let (mut u, mut m) = (0.0, 0.0);
    assert_eq!(unsafe { cc_hpf_expected_rate(p, 1, 2, false, &mut u) }, CcStatus::Ok);
    assert_eq!(unsafe { cc_hpf_expected_rate(p, 1, 2, true, &mut m) }, CcStatus::Ok);
    assert!((u - 2.0 / 3.0).abs() < 1e-12 && (m - 5.0 / 9.0).abs() < 1e-12);
    unsafe { cc_profile_free(p) };

    let text = CString::new("a,1\nb,x\n").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { cc_profile_load(text.as_ptr(), &mut q) }, CcStatus::Parse);
    assert!(q.is_null());
    assert!(last_error().contains("line 2"));
    assert_eq!(unsafe { cc_profile_uniform(0, &mut q) }, CcStatus::InvalidArgument);
    assert_eq!(unsafe { cc_profile_len(ptr::null()) }, 0);
    unsafe { cc_profile_free(ptr::null_mut()) };
}

#[test]
fn grouping_allocation_and_rates() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cc_profile_zipf(500, 0.5, &mut p) }, CcStatus::Ok);
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cc_grouping_factor_two(p, &mut g) }, CcStatus::Ok);
    assert_eq!(unsafe { cc_grouping_num_groups(g) }, 5);
    let mut b = [0usize; 6];
    assert_eq!(unsafe { cc_grouping_boundaries(g, b.as_mut_ptr(), 6) }, CcStatus::Ok);
    assert_eq!(b, [0, 4, 16, 64, 256, 500]);

    let mut a = ptr::null_mut();
    let status = unsafe { cc_allocation_optimize(g, 20.0, 10, CcStrategy::Optimized, &mut a) };
    assert_eq!(status, CcStatus::Ok);
    let mut budgets = [0.0; 5];
    assert_eq!(unsafe { cc_allocation_budgets(a, budgets.as_mut_ptr(), 5) }, CcStatus::Ok);
    assert!((budgets.iter().sum::<f64>() - 20.0).abs() < 1e-9);

    let (mut exact, mut jensen, mut lower) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(cc_grouped_expected_rate_exact(g, a, 10, &mut exact), CcStatus::Ok);
        assert_eq!(cc_grouped_rate_jensen(g, a, 10, &mut jensen), CcStatus::Ok);
        assert_eq!(cc_theorem2_lower_bound(g, 20.0, 10, &mut lower), CcStatus::Ok);
    }
    assert!(lower <= exact && exact <= jensen + 1e-9);

    let mut two = ptr::null_mut();
    assert_eq!(unsafe { cc_grouping_two_group(p, 10, &mut two) }, CcStatus::Ok);
    assert_eq!(unsafe { cc_theorem2_lower_bound(two, 20.0, 10, &mut lower) }, CcStatus::InvalidArgument);

    let mut bad = ptr::null_mut();
    let mismatched = [1.0, 1.0];
    assert_eq!(unsafe { cc_allocation_from_budgets(mismatched.as_ptr(), 2, &mut bad) }, CcStatus::Ok);
    assert_eq!(
        unsafe { cc_grouped_expected_rate_exact(g, bad, 10, &mut exact) },
        CcStatus::AllocationMismatch
    );
    unsafe {
        cc_allocation_free(bad);
        cc_allocation_free(a);
        cc_grouping_free(two);
        cc_grouping_free(g);
        cc_profile_free(p);
    }
}

#[test]
fn explicit_grouping_and_simulation() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cc_profile_uniform(4, &mut p) }, CcStatus::Ok);
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cc_grouping_explicit(p, [0usize, 4].as_ptr(), 2, &mut g) }, CcStatus::Ok);
    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { cc_grouping_explicit(p, [0usize, 3].as_ptr(), 2, &mut bad) },
        CcStatus::InvalidArgument
    );
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { cc_allocation_from_budgets([2.0].as_ptr(), 1, &mut a) }, CcStatus::Ok);
    let (mut mean, mut hw) = (0.0, 0.0);
    let s = unsafe { cc_simulate_expected_rate(p, g, a, 4, 4, 4096, 3, &mut mean, &mut hw) };
    assert_eq!(s, CcStatus::Ok);
    assert!((mean - 0.9375).abs() < 0.1, "{mean}");
    let mut over = ptr::null_mut();
    assert_eq!(unsafe { cc_allocation_from_budgets([5.0].as_ptr(), 1, &mut over) }, CcStatus::Ok);
    let s = unsafe { cc_simulate_expected_rate(p, g, over, 4, 1, 64, 3, &mut mean, &mut hw) };
    assert_eq!(s, CcStatus::OverAllocated);
    unsafe {
        cc_allocation_free(over);
        cc_allocation_free(a);
        cc_grouping_free(g);
        cc_profile_free(p);
    }
}

#[test]
fn coupon_check() {
    let (mut prob, mut holds) = (0.0, false);
    assert_eq!(unsafe { cc_coupon_bound_check(4, 4, &mut prob, &mut holds) }, CcStatus::Ok);
    assert!(holds && (prob - 1.0).abs() < 1e-15);
    assert_eq!(unsafe { cc_coupon_bound_check(0, 4, &mut prob, &mut holds) }, CcStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/coded_caching.h");
    for name in [
        "cc_last_error_message",
        "cc_peak_rate",
        "cc_cutset_lower_bound",
        "cc_profile_zipf",
        "cc_profile_uniform",
        "cc_profile_from_weights",
        "cc_profile_load",
        "cc_profile_len",
        "cc_profile_probs",
        "cc_profile_free",
        "cc_grouping_factor_two",
        "cc_grouping_two_group",
        "cc_grouping_explicit",
        "cc_grouping_num_groups",
        "cc_grouping_boundaries",
        "cc_grouping_free",
        "cc_hpf_expected_rate",
        "cc_allocation_optimize",
        "cc_allocation_from_budgets",
        "cc_allocation_num_groups",
        "cc_allocation_budgets",
        "cc_allocation_free",
        "cc_grouped_expected_rate_exact",
        "cc_grouped_rate_jensen",
        "cc_theorem2_lower_bound",
        "cc_coupon_bound_check",
        "cc_simulate_expected_rate",
        "typedef struct CcProfile CcProfile",
        "CC_STATUS_OVER_ALLOCATED = 6",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
