//! Per-group memory allocation and memory-rate tradeoff sweeps.
//!
//! The optimized allocation minimizes the exact grouped expected rate
//! `Σ_ℓ E[R(M_ℓ, N_ℓ, K_ℓ)]` over the simplex `Σ M_ℓ = M`. The objective is
//! separable, so the search first solves the problem exactly on a grid of
//! `M/256` steps by dynamic programming over groups, then polishes the best
//! candidate with pairwise golden-section transfers between groups.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{
    cutset_lower_bound, hpf_expected_rate, theorem2_lower_bound, GroupUserLaws, HpfMode,
};
use crate::error::{Error, Result};
use crate::popularity::{partition_factor_two, FileGrouping, PopularityProfile};

pub const GRID_STEPS: usize = 256;
pub const REFINE_TOLERANCE: f64 = 1e-6;
pub const SUM_TOLERANCE: f64 = 1e-9;
const MAX_SWEEPS: usize = 40;

/// Memory budgets `M_ℓ` (in files) for each group, summing to `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryAllocation {
    budgets: Vec<f64>,
    total: f64,
}

impl MemoryAllocation {
    pub fn new(budgets: Vec<f64>) -> Result<Self> {
        if budgets.is_empty() {
            return Err(Error::InvalidArgument("allocation needs at least one group".into()));
        }
        if let Some(b) = budgets.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "memory budgets must be nonnegative, got {b}"
            )));
        }
        let total = budgets.iter().sum();
        Ok(Self { budgets, total })
    }

    fn with_total(budgets: Vec<f64>, total: f64) -> Self {
        debug_assert!((budgets.iter().sum::<f64>() - total).abs() <= SUM_TOLERANCE * total.max(1.0));
        Self { budgets, total }
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn num_groups(&self) -> usize {
        self.budgets.len()
    }
}

/// How to split the cache among groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// `M_ℓ = M/L`.
    Uniform,
    /// Minimize the exact expected rate.
    Optimized,
    /// All memory to the first of two groups `{1..M}, {M+1..N}`.
    Hpf,
    /// All memory to the head of a two-group split.
    TwoGroup,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Optimized => "optimized",
            Strategy::Hpf => "hpf",
            Strategy::TwoGroup => "two_group",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Strategy::Uniform),
            "optimized" => Ok(Strategy::Optimized),
            "hpf" => Ok(Strategy::Hpf),
            "two_group" => Ok(Strategy::TwoGroup),
            _ => Err(Error::InvalidArgument(format!("unknown allocation strategy `{s}`"))),
        }
    }
}

/// Groups from index `ℓ*` on are served by unicast from the server rather than
/// by coded delivery, following the heavy-tail treatment of Zipf popularities:
/// `ℓ* = ⌈log2(p_1 K) / (1 - 1/α)⌉`, clamped to at least one coded group.
pub fn unicast_tail_cutoff(profile: &PopularityProfile, alpha: f64, users: usize) -> Result<usize> {
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "unicast tail needs a Zipf exponent above 1, got {alpha}"
        )));
    }
    let scale = (profile.most_popular() * users as f64).log2() / (1.0 - 1.0 / alpha);
    Ok((scale.ceil().max(1.0)) as usize)
}

/// The grouped-scheme objective for fixed grouping and user count.
#[derive(Debug, Clone)]
pub struct GroupedObjective {
    laws: GroupUserLaws,
    coded_groups: usize,
    tail_rate: f64,
}

impl GroupedObjective {
    pub fn new(grouping: &FileGrouping, users: usize) -> Self {
        let laws = GroupUserLaws::new(grouping, users);
        let coded_groups = laws.num_groups();
        Self {
            laws,
            coded_groups,
            tail_rate: 0.0,
        }
    }

    /// Serve groups `cutoff..L` (0-based) uncached by unicast, costing
    /// `Σ E[K_ℓ]` for those groups.
    pub fn with_unicast_tail(mut self, cutoff: usize) -> Self {
        let cutoff = cutoff.clamp(1, self.laws.num_groups());
        self.coded_groups = cutoff;
        self.tail_rate = (cutoff..self.laws.num_groups())
            .map(|l| self.laws.expected_users(l))
            .sum();
        self
    }

    pub fn num_groups(&self) -> usize {
        self.laws.num_groups()
    }

    pub fn coded_groups(&self) -> usize {
        self.coded_groups
    }

    pub fn group_value(&self, group: usize, memory: f64) -> f64 {
        self.laws.expected_rate(group, memory)
    }

    pub fn value(&self, budgets: &[f64]) -> f64 {
        budgets[..self.coded_groups]
            .iter()
            .enumerate()
            .map(|(l, &m)| self.group_value(l, m))
            .sum::<f64>()
            + self.tail_rate
    }

    pub fn evaluate(&self, alloc: &MemoryAllocation) -> Result<f64> {
        if alloc.num_groups() != self.num_groups() {
            return Err(Error::AllocationMismatch {
                budgets: alloc.num_groups(),
                groups: self.num_groups(),
            });
        }
        Ok(self.value(alloc.budgets()))
    }
}

fn check_memory(memory: f64) -> Result<()> {
    if !memory.is_finite() || memory < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cache size must be nonnegative, got {memory}"
        )));
    }
    Ok(())
}

/// Computes per-group budgets for `strategy`.
pub fn optimize_allocation(
    grouping: &FileGrouping,
    memory: f64,
    users: usize,
    strategy: Strategy,
) -> Result<MemoryAllocation> {
    check_memory(memory)?;
    let l = grouping.num_groups();
    if l == 1 {
        return Ok(MemoryAllocation::with_total(vec![memory], memory));
    }
    match strategy {
        Strategy::Uniform => Ok(MemoryAllocation::with_total(
            vec![memory / l as f64; l],
            memory,
        )),
        Strategy::Hpf => {
            if l != 2 {
                return Err(Error::StrategyMismatch {
                    strategy: "hpf",
                    reason: format!("needs exactly two groups, got {l}"),
                });
            }
            if memory.fract() != 0.0 || grouping.size(0) != memory as usize {
                return Err(Error::StrategyMismatch {
                    strategy: "hpf",
                    reason: format!(
                        "first group must hold exactly the M = {memory} most popular files, holds {}",
                        grouping.size(0)
                    ),
                });
            }
            Ok(MemoryAllocation::with_total(vec![memory, 0.0], memory))
        }
        Strategy::TwoGroup => {
            if l != 2 {
                return Err(Error::StrategyMismatch {
                    strategy: "two_group",
                    reason: format!("needs at most two groups, got {l}"),
                });
            }
            Ok(MemoryAllocation::with_total(vec![memory, 0.0], memory))
        }
        Strategy::Optimized => {
            let objective = GroupedObjective::new(grouping, users);
            optimize_objective(&objective, grouping, memory, &[])
        }
    }
}

/// Minimizes `objective` over allocations of `memory`, also considering the
/// caller's `seeds` as starting points. The result is never worse than the
/// uniform split or any seed.
pub fn optimize_objective(
    objective: &GroupedObjective,
    grouping: &FileGrouping,
    memory: f64,
    seeds: &[MemoryAllocation],
) -> Result<MemoryAllocation> {
    check_memory(memory)?;
    let l = objective.num_groups();
    if l != grouping.num_groups() {
        return Err(Error::AllocationMismatch {
            budgets: l,
            groups: grouping.num_groups(),
        });
    }
    if l == 1 || memory == 0.0 {
        let mut budgets = vec![0.0; l];
        budgets[0] = memory;
        return Ok(MemoryAllocation::with_total(budgets, memory));
    }
    let coded = objective.coded_groups();
    let sizes = grouping.sizes();

    let mut filled = prefix_fill(&sizes[..coded], memory);
    filled.resize(l, 0.0);
    let mut candidates = vec![grid_optimum(objective, memory), filled];
    let mut uniform = vec![0.0; l];
    uniform[..coded].fill(memory / coded as f64);
    candidates.push(uniform.clone());
    for seed in seeds {
        if seed.num_groups() == l && (seed.total() - memory).abs() <= SUM_TOLERANCE * memory.max(1.0) {
            candidates.push(seed.budgets().to_vec());
        }
    }

    let mut best = candidates
        .into_iter()
        .map(|b| (objective.value(&b), b))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
        .1;
    refine(objective, &mut best, memory / GRID_STEPS as f64);
    fix_total(&mut best, memory, coded);
    move_excess(&mut best, &sizes[..coded]);
    snap(objective, &mut best, &sizes[..coded], memory * 1e-6);

    let optimized = objective.value(&best);
    let baseline = objective.value(&uniform);
    if optimized > baseline * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::Internal(format!(
            "optimized allocation ({optimized}) worse than uniform split ({baseline})"
        )));
    }
    Ok(MemoryAllocation::with_total(best, memory))
}

/// Exact minimum over allocations that are multiples of `memory / GRID_STEPS`.
fn grid_optimum(objective: &GroupedObjective, memory: f64) -> Vec<f64> {
    let coded = objective.coded_groups();
    let step = memory / GRID_STEPS as f64;
    let table: Vec<Vec<f64>> = (0..coded)
        .map(|l| {
            (0..=GRID_STEPS)
                .map(|j| objective.group_value(l, j as f64 * step))
                .collect()
        })
        .collect();

    // best[b] = minimum rate of groups 0..=l using exactly b steps.
    let mut best = table[0].clone();
    let mut choice: Vec<Vec<usize>> = vec![(0..=GRID_STEPS).collect()];
    for row in &table[1..] {
        let mut next = vec![f64::INFINITY; GRID_STEPS + 1];
        let mut pick = vec![0; GRID_STEPS + 1];
        for b in 0..=GRID_STEPS {
            for j in 0..=b {
                let v = row[j] + best[b - j];
                if v < next[b] {
                    next[b] = v;
                    pick[b] = j;
                }
            }
        }
        best = next;
        choice.push(pick);
    }

    let mut budgets = vec![0.0; objective.num_groups()];
    let mut remaining = GRID_STEPS;
    for l in (0..coded).rev() {
        let j = choice[l][remaining];
        budgets[l] = j as f64 * step;
        remaining -= j;
    }
    fix_total(&mut budgets, memory, coded);
    budgets
}

/// Fill groups in popularity order, each up to its size.
fn prefix_fill(sizes: &[usize], memory: f64) -> Vec<f64> {
    let mut budgets = Vec::with_capacity(sizes.len());
    let mut left = memory;
    for &n in sizes {
        let take = left.min(n as f64);
        budgets.push(take);
        left -= take;
    }
    budgets[0] += left;
    budgets
}

/// Pairwise transfers `i -> j` polished by golden-section search until a full
/// sweep no longer improves the objective.
fn refine(objective: &GroupedObjective, budgets: &mut [f64], step: f64) {
    let coded = objective.coded_groups();
    let mut current = objective.value(budgets);
    for _ in 0..MAX_SWEEPS {
        let start = current;
        for i in 0..coded {
            for j in (i + 1)..coded {
                let (mi, mj) = (budgets[i], budgets[j]);
                let pair = |t: f64| objective.group_value(i, mi + t) + objective.group_value(j, mj - t);
                let base = pair(0.0);
                let mut best_t = 0.0;
                let mut best_v = base;
                let windows = [(-mi, mj), ((-mi).max(-2.0 * step), mj.min(2.0 * step))];
                for (lo, hi) in windows {
                    if hi - lo <= REFINE_TOLERANCE {
                        continue;
                    }
                    let t = golden_section(&pair, lo, hi);
                    let v = pair(t);
                    if v < best_v {
                        best_v = v;
                        best_t = t;
                    }
                }
                // Endpoints are common optima (emptying or filling a group).
                for t in [-mi, mj] {
                    let v = pair(t);
                    if v < best_v {
                        best_v = v;
                        best_t = t;
                    }
                }
                if best_v < base {
                    budgets[i] = (mi + best_t).max(0.0);
                    budgets[j] = (mj - best_t).max(0.0);
                    current += best_v - base;
                }
            }
        }
        if start - current <= 1e-12 * start.abs().max(1e-300) {
            break;
        }
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > REFINE_TOLERANCE {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Absorb floating-point drift so the budgets sum to `memory`.
fn fix_total(budgets: &mut [f64], memory: f64, coded: usize) {
    let drift = memory - budgets.iter().sum::<f64>();
    if drift != 0.0 {
        let target = (0..coded)
            .max_by(|&a, &b| budgets[a].total_cmp(&budgets[b]))
            .unwrap_or(0);
        budgets[target] = (budgets[target] + drift).max(0.0);
    }
}

/// Rounds budgets lying within `tol` of empty or full onto that boundary,
/// compensating in the largest other group, when the objective stays put.
fn snap(objective: &GroupedObjective, budgets: &mut [f64], sizes: &[usize], tol: f64) {
    for i in 0..sizes.len() {
        for target in [0.0, sizes[i] as f64] {
            let delta = target - budgets[i];
            if delta == 0.0 || delta.abs() > tol {
                continue;
            }
            let Some(j) = (0..sizes.len())
                .filter(|&j| j != i)
                .filter(|&j| (0.0..=sizes[j] as f64).contains(&(budgets[j] - delta)))
                .max_by(|&a, &b| budgets[a].total_cmp(&budgets[b]))
            else {
                continue;
            };
            let before = objective.value(budgets);
            let mut trial = budgets.to_vec();
            trial[i] = target;
            trial[j] -= delta;
            let after = objective.value(&trial);
            if after <= before * (1.0 + 1e-10) + 1e-12 {
                budgets.copy_from_slice(&trial);
            }
        }
    }
}

/// Memory beyond a group's size is wasted (its rate is already zero); hand it
/// to groups that still have room so the allocation can actually be placed.
fn move_excess(budgets: &mut [f64], sizes: &[usize]) {
    let mut spare = 0.0;
    for (b, &n) in budgets.iter_mut().zip(sizes) {
        if *b > n as f64 {
            spare += *b - n as f64;
            *b = n as f64;
        }
    }
    for (b, &n) in budgets.iter_mut().zip(sizes) {
        if spare <= 0.0 {
            break;
        }
        let take = spare.min(n as f64 - *b);
        *b += take;
        spare -= take;
    }
    if spare > 0.0 {
        budgets[0] += spare;
    }
}

/// Columns of a tradeoff curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    HpfUnicast,
    HpfMulticast,
    GroupedUniform,
    GroupedOptimized,
    LowerTheorem2,
    LowerCutset,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::HpfUnicast,
        Scheme::HpfMulticast,
        Scheme::GroupedUniform,
        Scheme::GroupedOptimized,
        Scheme::LowerTheorem2,
        Scheme::LowerCutset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::HpfUnicast => "hpf_unicast",
            Scheme::HpfMulticast => "hpf_multicast",
            Scheme::GroupedUniform => "grouped_uniform",
            Scheme::GroupedOptimized => "grouped_optimized",
            Scheme::LowerTheorem2 => "lower_theorem2",
            Scheme::LowerCutset => "lower_cutset",
        }
    }

    /// Schemes that are achievable rates and must not increase with memory.
    pub fn is_achievable(self) -> bool {
        !matches!(self, Scheme::LowerTheorem2 | Scheme::LowerCutset)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scheme `{s}`")))
    }
}

/// One row of a tradeoff curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub memory: f64,
    pub rates: BTreeMap<Scheme, f64>,
}

/// Rates of several schemes over an increasing memory grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub schemes: Vec<Scheme>,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CurveOptions {
    /// Serve popularity groups past this 0-based index by unicast in the
    /// grouped schemes.
    pub unicast_tail: Option<usize>,
}

/// Sweeps `schemes` over `memory_grid`. Grouped and lower-bound schemes use
/// the factor-two grouping; HPF caches `⌊M⌋` whole files.
pub fn tradeoff_curve(
    profile: &PopularityProfile,
    users: usize,
    memory_grid: &[f64],
    schemes: &[Scheme],
    options: CurveOptions,
) -> Result<TradeoffCurve> {
    let n = profile.len() as f64;
    for &m in memory_grid {
        if !m.is_finite() || !(0.0..=n).contains(&m) {
            return Err(Error::InvalidArgument(format!(
                "memory grid value {m} outside [0, {n}]"
            )));
        }
    }
    if memory_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("memory grid must be strictly increasing".into()));
    }
    let mut schemes: Vec<Scheme> = schemes.to_vec();
    schemes.sort();
    schemes.dedup();

    let grouping = partition_factor_two(profile);
    let mut objective = GroupedObjective::new(&grouping, users);
    if let Some(cutoff) = options.unicast_tail {
        objective = objective.with_unicast_tail(cutoff);
    }

    let independent: Vec<Scheme> = schemes
        .iter()
        .copied()
        .filter(|s| *s != Scheme::GroupedOptimized)
        .collect();
    let mut points: Vec<CurvePoint> = memory_grid
        .par_iter()
        .map(|&m| -> Result<CurvePoint> {
            let mut rates = BTreeMap::new();
            for &s in &independent {
                let v = match s {
                    Scheme::HpfUnicast => {
                        hpf_expected_rate(profile, m.floor() as usize, users, HpfMode::Unicast)?
                    }
                    Scheme::HpfMulticast => {
                        hpf_expected_rate(profile, m.floor() as usize, users, HpfMode::Multicast)?
                    }
                    Scheme::GroupedUniform => {
                        let coded = objective.coded_groups();
                        let mut b = vec![0.0; grouping.num_groups()];
                        b[..coded].fill(m / coded as f64);
                        objective.value(&b)
                    }
                    Scheme::LowerTheorem2 => theorem2_lower_bound(&grouping, m, users)?,
                    Scheme::LowerCutset => cutset_lower_bound(m, profile.len(), users),
                    Scheme::GroupedOptimized => unreachable!(),
                };
                rates.insert(s, v);
            }
            Ok(CurvePoint { memory: m, rates })
        })
        .collect::<Result<_>>()?;

    // Sequential so each point can start from the previous optimum plus the
    // extra memory, which keeps the optimized column monotone.
    if schemes.contains(&Scheme::GroupedOptimized) {
        let mut previous: Option<MemoryAllocation> = None;
        for point in &mut points {
            let m = point.memory;
            let mut seeds = Vec::new();
            if let Some(prev) = &previous {
                let extra = m - prev.total();
                for l in 0..objective.coded_groups() {
                    let mut b = prev.budgets().to_vec();
                    b[l] += extra;
                    seeds.push(MemoryAllocation::with_total(b, m));
                }
            }
            let alloc = optimize_objective(&objective, &grouping, m, &seeds)?;
            point.rates.insert(Scheme::GroupedOptimized, objective.value(alloc.budgets()));
            previous = Some(alloc);
        }
    }

    for s in schemes.iter().filter(|s| s.is_achievable()) {
        for w in points.windows(2) {
            let (a, b) = (w[0].rates[s], w[1].rates[s]);
            if b > a + 1e-9 {
                return Err(Error::Internal(format!(
                    "{s} rate increases from {a} at M={} to {b} at M={}",
                    w[0].memory, w[1].memory
                )));
            }
        }
    }
    Ok(TradeoffCurve { schemes, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::grouped_expected_rate_exact;
    use crate::popularity::partition_two_group;

    #[test]
    fn single_group_every_strategy() {
        let p = PopularityProfile::uniform(5).unwrap();
        let g = partition_factor_two(&p);
        for s in [Strategy::Uniform, Strategy::Optimized, Strategy::Hpf, Strategy::TwoGroup] {
            let a = optimize_allocation(&g, 2.5, 3, s).unwrap();
            assert_eq!(a.budgets(), &[2.5]);
        }
    }

    #[test]
    fn uniform_split() {
        let p = PopularityProfile::new(vec![0.5, 0.2, 0.15, 0.1, 0.05]).unwrap();
        let g = FileGrouping::explicit(&p, vec![0, 1, 2, 4, 5]).unwrap();
        let a = optimize_allocation(&g, 2.0, 3, Strategy::Uniform).unwrap();
        assert_eq!(a.budgets(), &[0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn hpf_requires_matching_split() {
        let p = PopularityProfile::zipf(10, 1.0).unwrap();
        let g = FileGrouping::hpf_split(&p, 3).unwrap();
        let a = optimize_allocation(&g, 3.0, 4, Strategy::Hpf).unwrap();
        assert_eq!(a.budgets(), &[3.0, 0.0]);
        assert!(matches!(
            optimize_allocation(&g, 2.0, 4, Strategy::Hpf),
            Err(Error::StrategyMismatch { .. })
        ));
        let three = FileGrouping::explicit(&p, vec![0, 3, 6, 10]).unwrap();
        assert!(optimize_allocation(&three, 3.0, 4, Strategy::Hpf).is_err());
        assert!(optimize_allocation(&three, 3.0, 4, Strategy::TwoGroup).is_err());
    }

    #[test]
    fn two_group_puts_everything_on_the_head() {
        let p = PopularityProfile::new(vec![0.5, 0.3, 0.1, 0.1]).unwrap();
        let g = partition_two_group(&p, 5).unwrap();
        let a = optimize_allocation(&g, 3.0, 5, Strategy::TwoGroup).unwrap();
        assert_eq!(a.budgets(), &[3.0, 0.0]);
    }

    #[test]
    fn optimized_beats_uniform_and_dumps() {
        let p = PopularityProfile::zipf(8, 1.0).unwrap();
        let g = partition_factor_two(&p);
        let obj = GroupedObjective::new(&g, 4);
        let opt = optimize_allocation(&g, 2.0, 4, Strategy::Optimized).unwrap();
        assert!((opt.budgets().iter().sum::<f64>() - 2.0).abs() < 1e-9);
        let uni = optimize_allocation(&g, 2.0, 4, Strategy::Uniform).unwrap();
        let v = obj.value(opt.budgets());
        assert!(v <= obj.value(uni.budgets()));
        for l in 0..g.num_groups() {
            let mut dump = vec![0.0; g.num_groups()];
            dump[l] = 2.0;
            assert!(v <= obj.value(&dump) + 1e-12);
        }
        assert!((v - grouped_expected_rate_exact(&g, &opt, 4).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn optimized_never_exceeds_group_size() {
        let p = PopularityProfile::zipf(30, 1.2).unwrap();
        let g = partition_factor_two(&p);
        for m in [1.0, 5.0, 17.0, 29.0] {
            let a = optimize_allocation(&g, m, 50, Strategy::Optimized).unwrap();
            for (b, n) in a.budgets().iter().zip(g.sizes()) {
                assert!(*b <= n as f64 + 1e-9, "{b} > {n}");
            }
        }
    }

    #[test]
    fn zero_memory() {
        let p = PopularityProfile::zipf(30, 1.2).unwrap();
        let g = partition_factor_two(&p);
        let a = optimize_allocation(&g, 0.0, 10, Strategy::Optimized).unwrap();
        assert!(a.budgets().iter().all(|&b| b == 0.0));
        assert!(optimize_allocation(&g, -1.0, 10, Strategy::Optimized).is_err());
    }

    #[test]
    fn unicast_tail() {
        let p = PopularityProfile::zipf(1000, 1.5).unwrap();
        let cut = unicast_tail_cutoff(&p, 1.5, 100).unwrap();
        // log2(p_1 * 100) / (1/3) with p_1 = 1/ζ(1.5; 1000) ≈ 0.3904
        let expected = ((p.most_popular() * 100.0).log2() * 3.0).ceil() as usize;
        assert_eq!(cut, expected);
        assert!(unicast_tail_cutoff(&p, 0.8, 100).is_err());

        let g = partition_factor_two(&p);
        let full = GroupedObjective::new(&g, 100);
        let tail = GroupedObjective::new(&g, 100).with_unicast_tail(2);
        let b = vec![0.0; g.num_groups()];
        let expected_tail: f64 = (2..g.num_groups()).map(|l| 100.0 * g.mass(l)).sum();
        let coded: f64 = (0..2).map(|l| full.group_value(l, 0.0)).sum();
        assert!((tail.value(&b) - coded - expected_tail).abs() < 1e-9);
    }

    #[test]
    fn curve_endpoints() {
        let p = PopularityProfile::zipf(20, 0.8).unwrap();
        let c = tradeoff_curve(&p, 7, &[0.0, 20.0], &Scheme::ALL, CurveOptions::default()).unwrap();
        assert!((c.points[0].rates[&Scheme::HpfUnicast] - 7.0).abs() < 1e-12);
        // M/L per group overfills the small groups, so only the uniform split stays positive.
        for (s, v) in &c.points[1].rates {
            if *s == Scheme::GroupedUniform {
                assert!(*v > 0.0);
            } else {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(tradeoff_curve(&p, 7, &[2.0, 1.0], &Scheme::ALL, CurveOptions::default()).is_err());
        assert!(tradeoff_curve(&p, 7, &[21.0], &Scheme::ALL, CurveOptions::default()).is_err());
        assert!("bogus".parse::<Scheme>().is_err());
    }
}
