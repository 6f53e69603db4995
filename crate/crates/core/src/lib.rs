//! Coded caching over a shared link with nonuniform file popularities.
//!
//! The crate covers the decentralized placement and delivery scheme, the
//! grouped variant with per-group memory allocation, closed-form expected
//! rates and lower bounds, and a bit-exact simulator for realized rates.

pub mod allocator;
pub mod analytic;
pub mod bitsim;
pub mod cli;
pub mod error;
pub mod popularity;
pub mod probability;

pub use allocator::{
    optimize_allocation, tradeoff_curve, CurveOptions, MemoryAllocation, Scheme, Strategy,
    TradeoffCurve,
};
pub use analytic::{
    cutset_lower_bound, grouped_expected_rate_exact, grouped_rate_jensen, hpf_expected_rate,
    peak_rate, theorem2_lower_bound, HpfMode,
};
pub use error::{Error, Result};
pub use popularity::{
    load_profile, partition_factor_two, partition_head_relative, partition_two_group,
    FileGrouping, GroupingKind, PopularityProfile,
};
pub use probability::{coupon_bound_check, demand_sample, group_counts, DemandVector};
