//! Demand statistics: sampling request vectors, counting users per group, and
//! the distribution of the number of distinct requested files.
//!
//! The distinct-count law is the coupon-collector distribution. Writing
//! `f_k` for the number of distinct files among the first `k` uniform requests,
//! `f_{k+1} = f_k` with probability `f_k/N` and `f_k + 1` otherwise; iterating
//! this chain from `f_1 = 1` gives the exact pmf of `f_K = w(d)`. The waiting
//! times between new values (geometric with parameter `(N-i+1)/N`) are never
//! materialized; the chain already carries the same distribution.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::popularity::{FileGrouping, PopularityProfile};

/// One requested file index (0-based) per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(files: Vec<usize>, num_files: usize) -> Result<Self> {
        if let Some(&index) = files.iter().find(|&&f| f >= num_files) {
            return Err(Error::DemandOutOfRange {
                index,
                files: num_files,
            });
        }
        Ok(Self(files))
    }

    pub fn users(&self) -> usize {
        self.0.len()
    }

    pub fn file(&self, user: usize) -> usize {
        self.0[user]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of distinct requested files, `w(d)`.
    pub fn distinct(&self) -> usize {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

/// Draws `users` i.i.d. requests from `profile`.
pub fn demand_sample(profile: &PopularityProfile, users: usize, seed: u64) -> DemandVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    demand_sample_with(profile, users, &mut rng)
}

pub fn demand_sample_with<R: rand::Rng + ?Sized>(
    profile: &PopularityProfile,
    users: usize,
    rng: &mut R,
) -> DemandVector {
    let dist = WeightedIndex::new(profile.probs()).expect("profile weights are positive");
    DemandVector((0..users).map(|_| dist.sample(rng)).collect())
}

/// `K_ℓ`: the number of users requesting a file of each group.
pub fn group_counts(demand: &DemandVector, grouping: &FileGrouping) -> Result<Vec<usize>> {
    let mut counts = vec![0; grouping.num_groups()];
    for &f in demand.as_slice() {
        if f >= grouping.num_files() {
            return Err(Error::DemandOutOfRange {
                index: f,
                files: grouping.num_files(),
            });
        }
        counts[grouping.group_of(f)] += 1;
    }
    Ok(counts)
}

/// Law of `w(d)` for `K` uniform requests over `N` files.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctCountDistribution {
    pub files: usize,
    pub users: usize,
    /// `pmf[j-1] = P(w(d) = j)` for `j = 1..=min(N, K)`.
    pub pmf: Vec<f64>,
}

impl DistinctCountDistribution {
    pub fn prob(&self, distinct: usize) -> f64 {
        if distinct == 0 || distinct > self.pmf.len() {
            0.0
        } else {
            self.pmf[distinct - 1]
        }
    }

    /// `P(w(d) >= distinct)`.
    pub fn tail(&self, distinct: usize) -> f64 {
        self.pmf.iter().skip(distinct.saturating_sub(1)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }
}

pub fn distinct_count_distribution(files: usize, users: usize) -> Result<DistinctCountDistribution> {
    if files == 0 || users == 0 {
        return Err(Error::InvalidArgument(format!(
            "need N, K >= 1, got N={files}, K={users}"
        )));
    }
    let n = files as f64;
    let support = files.min(users);
    // state[j] = P(f_k = j); index 0 unused.
    let mut state = vec![0.0; support + 1];
    state[1] = 1.0;
    for k in 1..users {
        let top = (k + 1).min(support);
        for j in (1..=top).rev() {
            let stay = state[j] * (j as f64 / n);
            let arrive = state[j - 1] * ((n - j as f64 + 1.0) / n);
            state[j] = stay + arrive;
        }
    }
    Ok(DistinctCountDistribution {
        files,
        users,
        pmf: state[1..].to_vec(),
    })
}

/// Outcome of checking `P(w(d) >= ⌈min(N,K)/4⌉) >= 2/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouponCheck {
    pub s_star: usize,
    pub probability: f64,
    pub holds: bool,
}

pub fn coupon_bound_check(files: usize, users: usize) -> Result<CouponCheck> {
    let dist = distinct_count_distribution(files, users)?;
    let s_star = files.min(users).div_ceil(4);
    let probability = dist.tail(s_star);
    Ok(CouponCheck {
        s_star,
        probability,
        holds: probability >= 2.0 / 3.0,
    })
}
