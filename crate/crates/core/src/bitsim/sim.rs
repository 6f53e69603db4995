use rayon::prelude::*;

use super::decode::decode;
use super::delivery::{deliver, DeliveryConfig, DeliveryTranscript, Procedure, DEFAULT_SEGMENT_BITS};
use super::placement::{place, CacheState, Library};
use crate::allocator::MemoryAllocation;
use crate::error::{Error, Result};
use crate::popularity::{FileGrouping, PopularityProfile};
use crate::probability::{demand_sample, DemandVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimParams {
    pub file_bits: usize,
    pub library_seed: u64,
    pub segment_bits: usize,
    /// Decode every trial and fail on any mismatch.
    pub verify: bool,
}

impl SimParams {
    pub fn new(file_bits: usize) -> Self {
        Self {
            file_bits,
            library_seed: 0,
            segment_bits: DEFAULT_SEGMENT_BITS,
            verify: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub rate: f64,
    pub distinct: usize,
    pub xor_groups: usize,
    pub parity_groups: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub trials: Vec<TrialOutcome>,
    pub mean: f64,
    /// 95% normal-approximation half-width.
    pub half_width: f64,
}

impl SimSummary {
    pub fn rates(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.rate).collect()
    }
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
pub fn mix_seed(seed: u64, trial: u64, purpose: u64) -> u64 {
    let mut z = seed
        .wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(purpose.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Placement, demand and delivery for one trial; seeds derive from `(seed, trial)`.
#[allow(clippy::too_many_arguments)]
pub fn trial_transcript(
    library: &Library,
    profile: &PopularityProfile,
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    users: usize,
    params: &SimParams,
    seed: u64,
    trial: u64,
) -> Result<(CacheState, DemandVector, DeliveryTranscript)> {
    let cache = place(library, grouping, alloc, users, mix_seed(seed, trial, 0))?;
    let demand = demand_sample(profile, users, mix_seed(seed, trial, 1));
    let config = DeliveryConfig {
        coding_seed: mix_seed(seed, trial, 2),
        segment_bits: params.segment_bits,
    };
    let transcript = deliver(library, &cache, &demand, config)?;
    Ok((cache, demand, transcript))
}

/// One trial, decoded and checked against the library when `params.verify` is set.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    library: &Library,
    profile: &PopularityProfile,
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    users: usize,
    params: &SimParams,
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let (cache, demand, transcript) =
        trial_transcript(library, profile, grouping, alloc, users, params, seed, trial)?;
    if params.verify {
        let files = decode(&cache, &transcript, &demand)?;
        for (k, bits) in files.iter().enumerate() {
            if bits != library.file(demand.file(k)) {
                return Err(Error::Undecodable { user: k });
            }
        }
    }
    let count = |p| transcript.groups.iter().filter(|g| g.chosen == p).count();
    Ok(TrialOutcome {
        rate: transcript.normalized_rate(),
        distinct: demand.distinct(),
        xor_groups: count(Procedure::Xor),
        parity_groups: count(Procedure::Parity),
    })
}

/// Monte Carlo estimate of the expected normalized delivery rate.
pub fn simulate_expected_rate(
    params: &SimParams,
    profile: &PopularityProfile,
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    users: usize,
    trials: usize,
    seed: u64,
) -> Result<SimSummary> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if users == 0 {
        return Err(Error::InvalidArgument("need at least one user".into()));
    }
    let library = Library::generate(profile.len(), params.file_bits, params.library_seed)?;
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&library, profile, grouping, alloc, users, params, seed, t))
        .collect::<Result<_>>()?;
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.rate).sum::<f64>() / n;
    let half_width = if outcomes.len() > 1 {
        let var = outcomes.iter().map(|o| (o.rate - mean).powi(2)).sum::<f64>() / (n - 1.0);
        1.96 * (var / n).sqrt()
    } else {
        0.0
    };
    Ok(SimSummary {
        trials: outcomes,
        mean,
        half_width,
    })
}
