use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bits::BitVec;
use super::gf2::{dot, Eliminator};
use super::placement::CacheState;
use crate::error::{Error, Result};
use crate::probability::DemandVector;

/// Largest user group the subset-indexed delivery handles.
pub const MAX_GROUP_USERS: usize = 64;

pub const DEFAULT_SEGMENT_BITS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeliveryConfig {
    /// Seeds the coefficient stream of the random-combination procedure.
    pub coding_seed: u64,
    /// Files are coded in independent segments of this many bits.
    pub segment_bits: usize,
}

impl Default for DeliveryConfig {
    fn default() -> Self {
        Self {
            coding_seed: 0,
            segment_bits: DEFAULT_SEGMENT_BITS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Procedure {
    /// XOR of the per-user pieces `V_{k,𝒮∖{k}}` for every user subset `𝒮`.
    Xor,
    /// Random parity combinations of each requested file.
    Parity,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::Xor => "xor",
            Procedure::Parity => "parity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MessageTag {
    /// XOR message for the user subset (global user indices, ascending).
    Subset { group: usize, users: Vec<usize> },
    /// Parity bits for `file`, with the number of combinations per segment.
    File {
        group: usize,
        file: usize,
        segment_combos: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub tag: MessageTag,
    pub payload: BitVec,
}

/// Cost of both procedures for one user group and which one was sent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupReport {
    pub group: usize,
    pub users: Vec<usize>,
    pub xor_bits: usize,
    pub parity_bits: usize,
    pub chosen: Procedure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryTranscript {
    pub file_bits: usize,
    pub config: DeliveryConfig,
    pub messages: Vec<Message>,
    pub groups: Vec<GroupReport>,
}

impl DeliveryTranscript {
    pub fn total_bits(&self) -> usize {
        self.messages.iter().map(|m| m.payload.len()).sum()
    }

    pub fn normalized_rate(&self) -> f64 {
        self.total_bits() as f64 / self.file_bits as f64
    }

    pub fn report(&self, group: usize) -> Option<&GroupReport> {
        self.groups.iter().find(|g| g.group == group)
    }

    /// One `MSG <group> <subset-or-file> <bits>` line per message, preceded by
    /// a comment line per group with both procedure costs.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.groups {
            let _ = writeln!(
                out,
                "# group {} users {} xor {} parity {} chosen {}",
                g.group,
                user_set(&g.users),
                g.xor_bits,
                g.parity_bits,
                g.chosen.name()
            );
        }
        for m in &self.messages {
            let (group, what) = match &m.tag {
                MessageTag::Subset { group, users } => (group, user_set(users)),
                MessageTag::File { group, file, .. } => (group, format!("file:{file}")),
            };
            let _ = writeln!(out, "MSG {group} {what} {}", m.payload.len());
        }
        out
    }
}

fn user_set(users: &[usize]) -> String {
    let inner: Vec<String> = users.iter().map(|u| u.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Users (ascending) whose request falls in each group.
pub(crate) fn group_members(cache: &CacheState, demand: &DemandVector) -> Result<Vec<Vec<usize>>> {
    if demand.users() != cache.num_users() {
        return Err(Error::InvalidArgument(format!(
            "demand has {} users but the caches were placed for {}",
            demand.users(),
            cache.num_users()
        )));
    }
    let grouping = cache.grouping();
    let mut members = vec![Vec::new(); grouping.num_groups()];
    for (k, &f) in demand.as_slice().iter().enumerate() {
        if f >= cache.num_files() {
            return Err(Error::DemandOutOfRange {
                index: f,
                files: cache.num_files(),
            });
        }
        members[grouping.group_of(f)].push(k);
    }
    Ok(members)
}

/// For each member `i`, the bits of its requested file it lacks, keyed by the
/// set of other members (bitmask over member positions) caching exactly them.
pub(crate) fn classify(
    cache: &CacheState,
    demand: &DemandVector,
    members: &[usize],
) -> Result<Vec<HashMap<u64, Vec<u32>>>> {
    if members.len() > MAX_GROUP_USERS {
        return Err(Error::InvalidArgument(format!(
            "a user group may hold at most {MAX_GROUP_USERS} users, got {}",
            members.len()
        )));
    }
    let f = cache.file_bits();
    Ok(members
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let file = demand.file(k);
            let missing = BitVec::ones(f).and_not(cache.mask(k, file));
            let others: Vec<(usize, &BitVec)> = members
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, &u)| (j, cache.mask(u, file)))
                .collect();
            let mut classes: HashMap<u64, Vec<u32>> = HashMap::new();
            for b in missing.iter_ones() {
                let pattern = others
                    .iter()
                    .filter(|(_, m)| m.get(b))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j);
                classes.entry(pattern).or_default().push(b as u32);
            }
            classes
        })
        .collect())
}

/// Subsets with a nonempty message, largest first, then by mask.
pub(crate) fn message_subsets(classes: &[HashMap<u64, Vec<u32>>]) -> Vec<u64> {
    let set: BTreeSet<(std::cmp::Reverse<u32>, u64)> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            c.iter()
                .filter(|(_, v)| !v.is_empty())
                .map(move |(&t, _)| t | 1 << i)
        })
        .map(|s| (std::cmp::Reverse(s.count_ones()), s))
        .collect();
    set.into_iter().map(|(_, s)| s).collect()
}

fn members_of(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask >> i & 1 == 1)
}

fn xor_procedure(
    cache: &CacheState,
    demand: &DemandVector,
    library_file: &dyn Fn(usize) -> BitVec,
    group: usize,
    members: &[usize],
) -> Result<Vec<Message>> {
    let classes = classify(cache, demand, members)?;
    let files: HashMap<usize, BitVec> = members
        .iter()
        .map(|&k| demand.file(k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|n| (n, library_file(n)))
        .collect();
    let mut messages = Vec::new();
    for s in message_subsets(&classes) {
        let mut payload = BitVec::default();
        for i in members_of(s) {
            if let Some(pos) = classes[i].get(&(s & !(1 << i))) {
                payload.xor_padded(&files[&demand.file(members[i])].gather(pos));
            }
        }
        messages.push(Message {
            tag: MessageTag::Subset {
                group,
                users: members_of(s).map(|i| members[i]).collect(),
            },
            payload,
        });
    }
    Ok(messages)
}

pub(crate) fn segment_rng(coding_seed: u64, file: usize, segment: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(coding_seed);
    rng.set_stream(((file as u64) << 32) | segment as u64);
    rng
}

pub(crate) fn next_coefficients(rng: &mut ChaCha8Rng, len: usize, out: &mut [u64]) {
    for w in out.iter_mut() {
        *w = rng.next_u64();
    }
    let rem = len % 64;
    if rem != 0 {
        *out.last_mut().unwrap() &= (1u64 << rem) - 1;
    }
}

fn parity_procedure(
    cache: &CacheState,
    demand: &DemandVector,
    library_file: &dyn Fn(usize) -> BitVec,
    config: &DeliveryConfig,
    group: usize,
    members: &[usize],
) -> Vec<Message> {
    let f = cache.file_bits();
    let seg = config.segment_bits;
    let mut requesters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &k in members {
        requesters.entry(demand.file(k)).or_default().push(k);
    }
    let mut messages = Vec::new();
    for (file, users) in requesters {
        let values = library_file(file);
        let unknown: Vec<BitVec> = users
            .iter()
            .map(|&k| BitVec::ones(f).and_not(cache.mask(k, file)))
            .collect();
        let mut payload = BitVec::default();
        let mut segment_combos = Vec::new();
        for (si, start) in (0..f).step_by(seg).enumerate() {
            let len = seg.min(f - start);
            let targets: Vec<Vec<u64>> = unknown.iter().map(|u| u.slice_words(start, len)).collect();
            let ranks: Vec<usize> = targets
                .iter()
                .map(|t| t.iter().map(|w| w.count_ones() as usize).sum())
                .collect();
            let mut pending: Vec<(Eliminator, usize)> = ranks
                .iter()
                .enumerate()
                .filter(|&(_, &r)| r > 0)
                .map(|(i, _)| (Eliminator::new(len), i))
                .collect();
            let seg_values = values.slice_words(start, len);
            let mut rng = segment_rng(config.coding_seed, file, si);
            let mut coeffs = vec![0u64; len.div_ceil(64)];
            let mut row = coeffs.clone();
            let mut combos = 0u32;
            while !pending.is_empty() {
                next_coefficients(&mut rng, len, &mut coeffs);
                combos += 1;
                payload.push(dot(&coeffs, &seg_values));
                pending.retain_mut(|(e, i)| {
                    for ((r, c), t) in row.iter_mut().zip(&coeffs).zip(&targets[*i]) {
                        *r = c & t;
                    }
                    e.insert(&mut row, false);
                    e.rank() < ranks[*i]
                });
            }
            segment_combos.push(combos);
        }
        messages.push(Message {
            tag: MessageTag::File {
                group,
                file,
                segment_combos,
            },
            payload,
        });
    }
    messages
}

/// Runs both delivery procedures for every nonempty user group and sends the
/// cheaper one (ties go to the XOR procedure).
pub fn deliver(
    library: &super::placement::Library,
    cache: &CacheState,
    demand: &DemandVector,
    config: DeliveryConfig,
) -> Result<DeliveryTranscript> {
    if config.segment_bits == 0 {
        return Err(Error::InvalidArgument("segment_bits must be >= 1".into()));
    }
    if library.file_bits() != cache.file_bits() || library.num_files() != cache.num_files() {
        return Err(Error::InvalidArgument(
            "library and cache dimensions disagree".into(),
        ));
    }
    let members = group_members(cache, demand)?;
    let file = |n: usize| library.file(n).clone();
    let mut messages = Vec::new();
    let mut groups = Vec::new();
    for (group, users) in members.iter().enumerate() {
        if users.is_empty() {
            continue;
        }
        let xor = xor_procedure(cache, demand, &file, group, users)?;
        let parity = parity_procedure(cache, demand, &file, &config, group, users);
        let xor_bits: usize = xor.iter().map(|m| m.payload.len()).sum();
        let parity_bits: usize = parity.iter().map(|m| m.payload.len()).sum();
        let chosen = if parity_bits < xor_bits {
            messages.extend(parity);
            Procedure::Parity
        } else {
            messages.extend(xor);
            Procedure::Xor
        };
        groups.push(GroupReport {
            group,
            users: users.clone(),
            xor_bits,
            parity_bits,
            chosen,
        });
    }
    Ok(DeliveryTranscript {
        file_bits: cache.file_bits(),
        config,
        messages,
        groups,
    })
}
