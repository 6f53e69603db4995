//! Closed-form rate evaluators.
//!
//! All rates are normalized by the file size `F`. `M` may be any nonnegative
//! real; the user count may be real-valued where noted so that the rate can be
//! evaluated at an expected number of users.

use crate::allocator::{optimize_allocation, MemoryAllocation, Strategy};
use crate::error::{Error, Result};
use crate::popularity::{partition_factor_two, FileGrouping, PopularityProfile};

/// Constant `c` in the lower bound `R* >= (1/(cL)) Σ E R(M, N_ℓ, K_ℓ)`.
pub const LOWER_BOUND_CONSTANT: f64 = 864.0;

/// Gap between the peak rate and the cut-set bound.
pub const CUTSET_GAP: f64 = 12.0;

/// Binomial masses below this are dropped when taking expectations.
const PMF_FLOOR: f64 = 1e-18;

/// Arguments of the peak rate `R(M, N, K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQuery {
    pub memory: f64,
    pub files: usize,
    pub users: f64,
}

impl RateQuery {
    pub fn new(memory: f64, files: usize, users: f64) -> Result<Self> {
        if !memory.is_finite() || memory < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cache size must be a nonnegative number, got {memory}"
            )));
        }
        if files == 0 {
            return Err(Error::InvalidArgument("need at least one file".into()));
        }
        if !users.is_finite() || users < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "user count must be a nonnegative number, got {users}"
            )));
        }
        Ok(Self {
            memory,
            files,
            users,
        })
    }

    pub fn rate(&self) -> f64 {
        rate(self.memory, self.files as f64, self.users)
    }
}

/// Peak rate of decentralized coded caching with `files` files, `users`
/// users and normalized cache size `memory`.
pub fn peak_rate(memory: f64, files: usize, users: f64) -> Result<f64> {
    Ok(RateQuery::new(memory, files, users)?.rate())
}

/// Unchecked peak rate.
///
/// `K (1 - M/N) min{ N/(KM) (1 - (1-M/N)^K), N/K }` for `0 < M <= N`, written
/// with the `K` factored into each branch so that `K = 0` yields 0 rather than
/// `0/0`. `R(0, N, K) = min{N, K}` and `R = 0` for `M > N`.
pub(crate) fn rate(memory: f64, files: f64, users: f64) -> f64 {
    if users <= 0.0 {
        return 0.0;
    }
    if memory <= 0.0 {
        return files.min(users);
    }
    if memory >= files {
        return 0.0;
    }
    let uncached = 1.0 - memory / files;
    let coded = files / memory * uncached * (1.0 - uncached.powf(users));
    let uncoded = files * uncached;
    coded.min(uncoded)
}

/// Delivery model for the highest-popularity-first baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpfMode {
    /// Every miss is sent separately.
    Unicast,
    /// Each distinct missed file is sent once.
    Multicast,
}

/// Expected rate when every user caches the `cached` most popular files.
pub fn hpf_expected_rate(
    profile: &PopularityProfile,
    cached: usize,
    users: usize,
    mode: HpfMode,
) -> Result<f64> {
    if cached > profile.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot cache {cached} whole files out of {}",
            profile.len()
        )));
    }
    let tail = &profile.probs()[cached..];
    let k = users as f64;
    Ok(match mode {
        HpfMode::Unicast => k * tail.iter().sum::<f64>(),
        HpfMode::Multicast => tail.iter().map(|p| 1.0 - (1.0 - p).powf(k)).sum(),
    })
}

/// `Binomial(trials, p)` probability masses for `0..=trials`, computed in the
/// log domain so large `trials` neither overflow nor underflow prematurely.
pub fn binomial_pmf(trials: usize, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; trials + 1];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[trials] = 1.0;
        return pmf;
    }
    let mut log_fact = Vec::with_capacity(trials + 1);
    let mut acc = 0.0;
    log_fact.push(0.0);
    for i in 1..=trials {
        acc += (i as f64).ln();
        log_fact.push(acc);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    for (k, slot) in pmf.iter_mut().enumerate() {
        let log_mass = log_fact[trials] - log_fact[k] - log_fact[trials - k]
            + k as f64 * lp
            + (trials - k) as f64 * lq;
        *slot = log_mass.exp();
    }
    pmf
}

/// Distribution of the number of users requesting each group, for i.i.d.
/// demands. Only the binomial marginals matter for sums of expectations.
#[derive(Debug, Clone)]
pub struct GroupUserLaws {
    sizes: Vec<usize>,
    users: usize,
    laws: Vec<Vec<(usize, f64)>>,
}

impl GroupUserLaws {
    pub fn new(grouping: &FileGrouping, users: usize) -> Self {
        let laws = grouping
            .masses()
            .iter()
            .map(|&mass| {
                binomial_pmf(users, mass)
                    .into_iter()
                    .enumerate()
                    .filter(|&(_, w)| w > PMF_FLOOR)
                    .collect()
            })
            .collect();
        Self {
            sizes: grouping.sizes(),
            users,
            laws,
        }
    }

    pub fn num_groups(&self) -> usize {
        self.sizes.len()
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn size(&self, group: usize) -> usize {
        self.sizes[group]
    }

    /// `E[R(memory, N_ℓ, K_ℓ)]` for group `group`.
    pub fn expected_rate(&self, group: usize, memory: f64) -> f64 {
        let n = self.sizes[group] as f64;
        self.laws[group]
            .iter()
            .map(|&(k, w)| w * rate(memory, n, k as f64))
            .sum()
    }

    /// `E[K_ℓ]`.
    pub fn expected_users(&self, group: usize) -> f64 {
        self.laws[group].iter().map(|&(k, w)| k as f64 * w).sum()
    }
}

fn check_alloc(grouping: &FileGrouping, alloc: &MemoryAllocation) -> Result<()> {
    if alloc.num_groups() != grouping.num_groups() {
        return Err(Error::AllocationMismatch {
            budgets: alloc.num_groups(),
            groups: grouping.num_groups(),
        });
    }
    Ok(())
}

/// Exact expected rate of grouped coded caching,
/// `Σ_ℓ Σ_k P(K_ℓ = k) R(M_ℓ, N_ℓ, k)` with `K_ℓ ~ Binomial(K, P_ℓ)`.
pub fn grouped_expected_rate_exact(
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    users: usize,
) -> Result<f64> {
    check_alloc(grouping, alloc)?;
    let laws = GroupUserLaws::new(grouping, users);
    Ok(alloc
        .budgets()
        .iter()
        .enumerate()
        .map(|(l, &m)| laws.expected_rate(l, m))
        .sum())
}

/// Upper bound on [`grouped_expected_rate_exact`] obtained by evaluating each
/// group at its mean user count `K P_ℓ` (valid since `R` is concave in `K`).
pub fn grouped_rate_jensen(
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    users: usize,
) -> Result<f64> {
    check_alloc(grouping, alloc)?;
    let k = users as f64;
    Ok(alloc
        .budgets()
        .iter()
        .enumerate()
        .map(|(l, &m)| rate(m, grouping.size(l) as f64, k * grouping.mass(l)))
        .sum())
}

/// Lower bound on the optimal expected rate,
/// `(1/(864 L)) Σ_ℓ E[R(M, N_ℓ, K_ℓ)]`, with the full memory `M` in every term.
/// Only valid for groupings whose groups are within popularity factor two.
pub fn theorem2_lower_bound(grouping: &FileGrouping, memory: f64, users: usize) -> Result<f64> {
    if !grouping.kind().is_factor_two() {
        return Err(Error::InvalidArgument(
            "the lower bound requires a factor-two popularity grouping".into(),
        ));
    }
    RateQuery::new(memory, grouping.num_files(), users as f64)?;
    let laws = GroupUserLaws::new(grouping, users);
    let sum: f64 = (0..laws.num_groups())
        .map(|l| laws.expected_rate(l, memory))
        .sum();
    Ok(sum / (LOWER_BOUND_CONSTANT * grouping.num_groups() as f64))
}

/// Cut-set bound `max_{s <= min(N,K)} s (1 - M/⌊N/s⌋)^+` on the peak rate.
pub fn cutset_lower_bound(memory: f64, files: usize, users: usize) -> f64 {
    (1..=files.min(users))
        .map(|s| {
            let per_user = (files / s) as f64;
            s as f64 * (1.0 - memory / per_user).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// The upper and lower bounds on the optimal expected rate for one operating
/// point, using the factor-two grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub groups: usize,
    /// Grouped scheme with `M_ℓ = M/L`.
    pub upper_uniform_split: f64,
    /// Grouped scheme with optimized `M_ℓ`.
    pub upper_optimized: f64,
    pub lower_theorem2: f64,
    /// Cut-set bound on the peak rate of the whole library.
    pub lower_cutset: f64,
    pub c: f64,
}

pub fn bound_report(profile: &PopularityProfile, memory: f64, users: usize) -> Result<BoundReport> {
    let grouping = partition_factor_two(profile);
    let uniform = optimize_allocation(&grouping, memory, users, Strategy::Uniform)?;
    let optimized = optimize_allocation(&grouping, memory, users, Strategy::Optimized)?;
    Ok(BoundReport {
        groups: grouping.num_groups(),
        upper_uniform_split: grouped_expected_rate_exact(&grouping, &uniform, users)?,
        upper_optimized: grouped_expected_rate_exact(&grouping, &optimized, users)?,
        lower_theorem2: theorem2_lower_bound(&grouping, memory, users)?,
        lower_cutset: cutset_lower_bound(memory, profile.len(), users),
        c: LOWER_BOUND_CONSTANT,
    })
}
