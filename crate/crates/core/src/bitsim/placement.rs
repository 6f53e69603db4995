use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bits::BitVec;
use crate::allocator::MemoryAllocation;
use crate::error::{Error, Result};
use crate::popularity::FileGrouping;

/// `N` pseudo-random files of `F` bits each, reproducible from a seed.
#[derive(Debug, Clone)]
pub struct Library {
    file_bits: usize,
    seed: u64,
    files: Vec<BitVec>,
}

impl Library {
    pub fn generate(num_files: usize, file_bits: usize, seed: u64) -> Result<Self> {
        if num_files == 0 || file_bits == 0 {
            return Err(Error::InvalidArgument(format!(
                "library needs N, F >= 1, got N={num_files}, F={file_bits}"
            )));
        }
        let files = (0..num_files)
            .map(|n| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(n as u64);
                BitVec::random(file_bits, &mut rng)
            })
            .collect();
        Ok(Self {
            file_bits,
            seed,
            files,
        })
    }

    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_files(&self) -> usize {
        self.files.len()
    }

    pub fn file(&self, n: usize) -> &BitVec {
        &self.files[n]
    }
}

/// Bits cached per file of each group: `⌊M_ℓ F / N_ℓ⌋`.
pub fn bits_per_file(
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    file_bits: usize,
) -> Result<Vec<usize>> {
    if alloc.num_groups() != grouping.num_groups() {
        return Err(Error::AllocationMismatch {
            budgets: alloc.num_groups(),
            groups: grouping.num_groups(),
        });
    }
    alloc
        .budgets()
        .iter()
        .enumerate()
        .map(|(l, &m)| {
            let size = grouping.size(l);
            if m > size as f64 * (1.0 + 1e-12) {
                return Err(Error::OverAllocated {
                    group: l,
                    budget: m,
                    files: size,
                });
            }
            let exact = m * file_bits as f64 / size as f64;
            Ok(((exact + 1e-9).floor() as usize).min(file_bits))
        })
        .collect()
}

/// The memory actually used per group after rounding subsets down to whole bits.
pub fn effective_allocation(
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    file_bits: usize,
) -> Result<MemoryAllocation> {
    let bits = bits_per_file(grouping, alloc, file_bits)?;
    let budgets = bits
        .iter()
        .enumerate()
        .map(|(l, &b)| grouping.size(l) as f64 * b as f64 / file_bits as f64)
        .collect();
    MemoryAllocation::new(budgets)
}

/// Cache contents of every user after placement.
///
/// `masks[k][n]` marks which bits of file `n` user `k` stores and is treated
/// as public metadata; `contents[k][n]` holds the stored values (zero elsewhere).
#[derive(Debug, Clone)]
pub struct CacheState {
    file_bits: usize,
    grouping: FileGrouping,
    bits_per_file: Vec<usize>,
    masks: Vec<Vec<BitVec>>,
    contents: Vec<Vec<BitVec>>,
}

impl CacheState {
    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    pub fn num_users(&self) -> usize {
        self.masks.len()
    }

    pub fn num_files(&self) -> usize {
        self.grouping.num_files()
    }

    pub fn grouping(&self) -> &FileGrouping {
        &self.grouping
    }

    pub fn bits_per_file(&self) -> &[usize] {
        &self.bits_per_file
    }

    pub fn mask(&self, user: usize, file: usize) -> &BitVec {
        &self.masks[user][file]
    }

    pub fn content(&self, user: usize, file: usize) -> &BitVec {
        &self.contents[user][file]
    }

    pub fn cached_bits(&self, user: usize) -> usize {
        self.masks[user].iter().map(BitVec::count_ones).sum()
    }

    /// Sizes of the subfiles `A_𝒮` of `file`, indexed by the bitmask of the
    /// user set `𝒮` holding those bits. Requires at most 24 users.
    pub fn subfile_sizes(&self, file: usize) -> Result<Vec<usize>> {
        let k = self.num_users();
        if k > 24 {
            return Err(Error::InvalidArgument(format!(
                "subfile census supports at most 24 users, got {k}"
            )));
        }
        let mut counts = vec![0usize; 1 << k];
        let words = self.file_bits.div_ceil(64);
        for w in 0..words {
            let valid = if (w + 1) * 64 <= self.file_bits {
                64
            } else {
                self.file_bits - w * 64
            };
            for b in 0..valid {
                let mut pattern = 0usize;
                for user in 0..k {
                    pattern |= (((self.masks[user][file].words()[w] >> b) & 1) as usize) << user;
                }
                counts[pattern] += 1;
            }
        }
        Ok(counts)
    }
}

/// Each user independently caches a uniform `⌊M_ℓF/N_ℓ⌋`-bit subset of every
/// file in group `ℓ`.
pub fn place(
    library: &Library,
    grouping: &FileGrouping,
    alloc: &MemoryAllocation,
    users: usize,
    seed: u64,
) -> Result<CacheState> {
    if grouping.num_files() != library.num_files() {
        return Err(Error::InvalidArgument(format!(
            "grouping covers {} files but the library has {}",
            grouping.num_files(),
            library.num_files()
        )));
    }
    let f = library.file_bits();
    let per_group = bits_per_file(grouping, alloc, f)?;
    let n_files = library.num_files();
    let mut masks = Vec::with_capacity(users);
    let mut contents = Vec::with_capacity(users);
    for k in 0..users {
        let mut user_masks = Vec::with_capacity(n_files);
        let mut user_contents = Vec::with_capacity(n_files);
        for n in 0..n_files {
            let count = per_group[grouping.group_of(n)];
            let mask = if count == f {
                BitVec::ones(f)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((k * n_files + n) as u64);
                let mut mask = BitVec::zeros(f);
                for i in index::sample(&mut rng, f, count) {
                    mask.set(i, true);
                }
                mask
            };
            user_contents.push(library.file(n).and(&mask));
            user_masks.push(mask);
        }
        masks.push(user_masks);
        contents.push(user_contents);
    }
    Ok(CacheState {
        file_bits: f,
        grouping: grouping.clone(),
        bits_per_file: per_group,
        masks,
        contents,
    })
}
