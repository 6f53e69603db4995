//! File popularity distributions and their partition into popularity groups.
//!
//! A [`PopularityProfile`] always holds strictly positive probabilities sorted
//! in non-increasing order, so file `n` (0-based here) is the `n+1`-th most
//! popular file. Groupings are contiguous ranges of that order.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};

/// Tolerance for the sum-to-one check on profiles and groupings.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Slack on `log2` of popularity ratios. A file whose popularity is exactly a
/// power-of-two fraction of the reference counts as on the boundary even when
/// normalization rounding moved it by an ulp.
const LOG2_TIE: f64 = 1e-13;

/// Request probabilities `p_1 >= p_2 >= ... >= p_N > 0`, summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityProfile {
    probs: Vec<f64>,
}

impl PopularityProfile {
    /// Wraps an already normalized, sorted probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyProfile);
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p <= 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "probability {p} of file {} is not strictly positive",
                i + 1
            )));
        }
        if let Some(i) = probs.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!(
                "probabilities not sorted: p[{}] < p[{}]",
                i + 1,
                i + 2
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes arbitrary nonnegative weights. Zero weights are dropped and
    /// the remainder sorted by decreasing weight (stable for ties).
    pub fn from_weights<I: IntoIterator<Item = f64>>(weights: I) -> Result<Self> {
        let mut w = Vec::new();
        for (i, x) in weights.into_iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight {x} of entry {} is not a nonnegative number",
                    i + 1
                )));
            }
            if x > 0.0 {
                w.push(x);
            }
        }
        if w.is_empty() {
            return Err(Error::EmptyProfile);
        }
        w.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = w.iter().sum();
        Self::new(w.into_iter().map(|x| x / total).collect())
    }

    /// Zipf popularity `p_n ∝ n^{-alpha}` over `n` files.
    pub fn zipf(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("zipf profile needs at least one file".into()));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "zipf exponent must be nonnegative, got {alpha}"
            )));
        }
        let w: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-alpha)).collect();
        let total: f64 = w.iter().sum();
        Self::new(w.into_iter().map(|x| x / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("uniform profile needs at least one file".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    /// A flat head of `head` equally popular files followed by a power-law
    /// tail `p_n ∝ (n/head)^{-exponent}`, continuous at the junction.
    pub fn head_tail(n: usize, head: usize, exponent: f64) -> Result<Self> {
        if n == 0 || head == 0 || head > n {
            return Err(Error::InvalidArgument(format!(
                "head-tail profile needs 1 <= head <= n, got head={head}, n={n}"
            )));
        }
        if !exponent.is_finite() || exponent < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tail exponent must be nonnegative, got {exponent}"
            )));
        }
        let h = head as f64;
        let w: Vec<f64> = (1..=n)
            .map(|i| {
                if i <= head {
                    1.0
                } else {
                    (i as f64 / h).powf(-exponent)
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        Self::new(w.into_iter().map(|x| x / total).collect())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, file: usize) -> f64 {
        self.probs[file]
    }

    pub fn most_popular(&self) -> f64 {
        self.probs[0]
    }

    pub fn least_popular(&self) -> f64 {
        self.probs[self.probs.len() - 1]
    }

    /// Total probability of files `range`.
    pub fn mass(&self, range: Range<usize>) -> f64 {
        self.probs[range].iter().sum()
    }

    /// Serializes in the popularity file format with 1-based file ids.
    /// Values are written in shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.probs.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, p);
        }
        out
    }
}

/// Result of [`load_profile`]: the profile plus bookkeeping about the input.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedProfile {
    pub profile: PopularityProfile,
    /// File ids in profile order (most popular first).
    pub file_ids: Vec<String>,
    /// Number of rows dropped for having zero weight.
    pub dropped_zero: usize,
}

/// Parses a popularity table: one `<file_id><comma or whitespace><weight>`
/// record per line, `#` comment lines and blank lines ignored. Weights may be
/// raw counts or probabilities.
pub fn load_profile(text: &str) -> Result<LoadedProfile> {
    let mut rows: Vec<(String, f64)> = Vec::new();
    let mut dropped_zero = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `<file_id> <weight>`, found {} fields", fields.len()),
            });
        }
        let weight: f64 = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("weight `{}` is not a number", fields[1]),
        })?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("weight {} must be a finite nonnegative number", fields[1]),
            });
        }
        if weight == 0.0 {
            dropped_zero += 1;
            continue;
        }
        rows.push((fields[0].to_string(), weight));
    }
    if rows.is_empty() {
        return Err(Error::EmptyProfile);
    }
    rows.sort_by(|a, b| b.1.total_cmp(&a.1));
    let total: f64 = rows.iter().map(|r| r.1).sum();
    let profile = PopularityProfile::new(rows.iter().map(|r| r.1 / total).collect())?;
    Ok(LoadedProfile {
        profile,
        file_ids: rows.into_iter().map(|r| r.0).collect(),
        dropped_zero,
    })
}

/// How a grouping was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingKind {
    /// Dyadic bins relative to the most popular file; see [`partition_factor_two`].
    FactorTwo,
    /// Greedy groups relative to each group's own head; see [`partition_head_relative`].
    HeadRelative,
    /// Popular head plus uncached tail; see [`partition_two_group`].
    TwoGroup,
    /// User-supplied boundaries.
    Explicit,
}

impl GroupingKind {
    /// Whether every group is guaranteed to be within popularity factor two.
    pub fn is_factor_two(self) -> bool {
        matches!(self, GroupingKind::FactorTwo | GroupingKind::HeadRelative)
    }
}

/// Partition of the popularity-sorted files into `L` contiguous groups.
#[derive(Debug, Clone, PartialEq)]
pub struct FileGrouping {
    boundaries: Vec<usize>,
    masses: Vec<f64>,
    kind: GroupingKind,
}

impl FileGrouping {
    /// Builds a grouping from boundaries `0 = b_0 < b_1 < ... < b_L = N`.
    pub fn explicit(profile: &PopularityProfile, boundaries: Vec<usize>) -> Result<Self> {
        Self::build(profile, boundaries, GroupingKind::Explicit)
    }

    /// The trivial grouping with all files in one group.
    pub fn single(profile: &PopularityProfile) -> Self {
        Self::build(profile, vec![0, profile.len()], GroupingKind::Explicit)
            .expect("single group is always valid")
    }

    /// The split `{1..m}, {m+1..N}` under which caching only the first group
    /// reduces to highest-popularity-first caching. Degenerates to one group
    /// when `m` is `0` or `N`.
    pub fn hpf_split(profile: &PopularityProfile, m: usize) -> Result<Self> {
        let n = profile.len();
        if m > n {
            return Err(Error::InvalidArgument(format!(
                "cannot cache {m} whole files out of {n}"
            )));
        }
        let boundaries = if m == 0 || m == n { vec![0, n] } else { vec![0, m, n] };
        Self::build(profile, boundaries, GroupingKind::Explicit)
    }

    fn build(profile: &PopularityProfile, boundaries: Vec<usize>, kind: GroupingKind) -> Result<Self> {
        let n = profile.len();
        if boundaries.len() < 2 || boundaries[0] != 0 || *boundaries.last().unwrap() != n {
            return Err(Error::InvalidArgument(format!(
                "group boundaries must run from 0 to {n}, got {boundaries:?}"
            )));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!(
                "group boundaries must be strictly increasing, got {boundaries:?}"
            )));
        }
        let masses = if boundaries.len() == 2 {
            vec![1.0]
        } else {
            boundaries.windows(2).map(|w| profile.mass(w[0]..w[1])).collect()
        };
        Ok(Self {
            boundaries,
            masses,
            kind,
        })
    }

    pub fn kind(&self) -> GroupingKind {
        self.kind
    }

    pub fn num_groups(&self) -> usize {
        self.masses.len()
    }

    pub fn num_files(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// 0-based file indices of group `group`.
    pub fn files(&self, group: usize) -> Range<usize> {
        self.boundaries[group]..self.boundaries[group + 1]
    }

    pub fn size(&self, group: usize) -> usize {
        self.boundaries[group + 1] - self.boundaries[group]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Probability that a single request falls in `group`.
    pub fn mass(&self, group: usize) -> f64 {
        self.masses[group]
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Group containing `file`.
    pub fn group_of(&self, file: usize) -> usize {
        debug_assert!(file < self.num_files());
        self.boundaries.partition_point(|&b| b <= file) - 1
    }
}

/// Index `ℓ >= 1` of the dyadic bin `[p_1 2^{-ℓ}, p_1 2^{1-ℓ})` holding `p`;
/// bin 1 is closed at both ends.
fn dyadic_bin(reference: f64, p: f64) -> usize {
    let r = (reference / p).log2();
    ((r - LOG2_TIE).ceil() as i64).max(1) as usize
}

/// Partitions files into groups whose popularities are within a factor two.
///
/// File `n` goes to group `ℓ = max(1, ⌈log2(p_1/p_n)⌉)`, so group `ℓ` covers
/// popularities in `[p_1 2^{-ℓ}, p_1 2^{1-ℓ})`; a file at exactly `p_1/2` stays in
/// the first group. Empty bins are skipped, so `L` never exceeds
/// [`group_count_bound`].
pub fn partition_factor_two(profile: &PopularityProfile) -> FileGrouping {
    let head = profile.most_popular();
    let mut boundaries = vec![0];
    let mut current = 1;
    for (i, &p) in profile.probs().iter().enumerate() {
        let bin = dyadic_bin(head, p);
        if bin != current {
            if i > 0 {
                boundaries.push(i);
            }
            current = bin;
        }
    }
    boundaries.push(profile.len());
    let grouping = FileGrouping::build(profile, boundaries, GroupingKind::FactorTwo)
        .expect("dyadic bins are contiguous");
    debug_assert!(grouping.num_groups() <= group_count_bound(profile));
    grouping
}

/// Greedy partition where each group extends while popularity stays at least
/// half of that group's first (most popular) file.
pub fn partition_head_relative(profile: &PopularityProfile) -> FileGrouping {
    let probs = profile.probs();
    let mut boundaries = vec![0];
    let mut start = 0;
    while start < probs.len() {
        let head = probs[start];
        let len = probs[start..]
            .iter()
            .take_while(|&&p| (head / p).log2() <= 1.0 + LOG2_TIE)
            .count();
        start += len;
        boundaries.push(start);
    }
    FileGrouping::build(profile, boundaries, GroupingKind::HeadRelative)
        .expect("greedy groups are contiguous")
}

/// `max(1, ⌈log2(p_1/p_N)⌉)`: the number of dyadic popularity bins spanned.
pub fn group_count_bound(profile: &PopularityProfile) -> usize {
    dyadic_bin(profile.most_popular(), profile.least_popular())
}

/// Size `N_1` of the head in the two-group rule: the largest `n` with
/// `K p_n >= 1`, or 0 when no file qualifies.
pub fn two_group_head(profile: &PopularityProfile, users: usize) -> usize {
    let k = users as f64;
    profile.probs().iter().take_while(|&&p| k * p >= 1.0).count()
}

/// Two groups: the files each expected to be requested at least once, and
/// everything else. Collapses to a single group when either side is empty.
pub fn partition_two_group(profile: &PopularityProfile, users: usize) -> Result<FileGrouping> {
    if users == 0 {
        return Err(Error::InvalidArgument("two-group rule needs at least one user".into()));
    }
    let head = two_group_head(profile, users);
    let n = profile.len();
    let boundaries = if head == 0 || head == n { vec![0, n] } else { vec![0, head, n] };
    FileGrouping::build(profile, boundaries, GroupingKind::TwoGroup)
}
