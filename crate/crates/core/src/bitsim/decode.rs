use super::bits::BitVec;
use super::delivery::{
    classify, group_members, message_subsets, next_coefficients, segment_rng, DeliveryTranscript,
    MessageTag,
};
use super::gf2::{dot, Eliminator};
use super::placement::CacheState;
use crate::error::{Error, Result};
use crate::probability::DemandVector;

/// Recovers every user's requested file from its own cache, the public cache
/// masks and the transcript.
pub fn decode(
    cache: &CacheState,
    transcript: &DeliveryTranscript,
    demand: &DemandVector,
) -> Result<Vec<BitVec>> {
    let members = group_members(cache, demand)?;
    let f = cache.file_bits();
    if transcript.file_bits != f {
        return Err(Error::InvalidArgument(
            "transcript and cache disagree on the file size".into(),
        ));
    }
    let mut recovered: Vec<BitVec> = (0..demand.users())
        .map(|k| cache.content(k, demand.file(k)).clone())
        .collect();
    let mut known: Vec<BitVec> = (0..demand.users())
        .map(|k| cache.mask(k, demand.file(k)).clone())
        .collect();

    for (group, users) in members.iter().enumerate() {
        if users.is_empty() {
            continue;
        }
        let subset_msgs: Vec<(&[usize], &BitVec)> = transcript
            .messages
            .iter()
            .filter_map(|m| match &m.tag {
                MessageTag::Subset { group: g, users } if *g == group => {
                    Some((users.as_slice(), &m.payload))
                }
                _ => None,
            })
            .collect();
        if !subset_msgs.is_empty() {
            let classes = classify(cache, demand, users)?;
            let expected = message_subsets(&classes);
            if expected.len() != subset_msgs.len() {
                return Err(Error::Undecodable { user: users[0] });
            }
            for (s, (tag_users, payload)) in expected.into_iter().zip(subset_msgs) {
                let positions: Vec<usize> = (0..users.len()).filter(|i| s >> i & 1 == 1).collect();
                if positions.iter().map(|&i| users[i]).ne(tag_users.iter().copied()) {
                    return Err(Error::Undecodable { user: users[0] });
                }
                for &i in &positions {
                    let k = users[i];
                    let Some(mine) = classes[i].get(&(s & !(1 << i))) else {
                        continue;
                    };
                    let mut acc = payload.clone();
                    for &j in positions.iter().filter(|&&j| j != i) {
                        let other = users[j];
                        if let Some(pos) = classes[j].get(&(s & !(1 << j))) {
                            // Bits in V_{j,𝒮∖{j}} are cached by every other member of 𝒮.
                            acc.xor_padded(&cache.content(k, demand.file(other)).gather(pos));
                        }
                    }
                    if acc.len() < mine.len() {
                        return Err(Error::Undecodable { user: k });
                    }
                    for (idx, &p) in mine.iter().enumerate() {
                        recovered[k].set(p as usize, acc.get(idx));
                        known[k].set(p as usize, true);
                    }
                }
            }
        }

        for m in &transcript.messages {
            let MessageTag::File {
                group: g,
                file,
                segment_combos,
            } = &m.tag
            else {
                continue;
            };
            if *g != group {
                continue;
            }
            let seg = transcript.config.segment_bits;
            let mut offset = 0usize;
            for (si, (start, &combos)) in (0..f).step_by(seg).zip(segment_combos).enumerate() {
                let len = seg.min(f - start);
                for &k in users.iter().filter(|&&k| demand.file(k) == *file) {
                    let unknown = BitVec::ones(f)
                        .and_not(cache.mask(k, *file))
                        .slice_words(start, len);
                    if unknown.iter().all(|&w| w == 0) {
                        continue;
                    }
                    let own = cache.content(k, *file).slice_words(start, len);
                    let mut rng = segment_rng(transcript.config.coding_seed, *file, si);
                    let mut coeffs = vec![0u64; len.div_ceil(64)];
                    let mut e = Eliminator::new(len);
                    for c in 0..combos as usize {
                        next_coefficients(&mut rng, len, &mut coeffs);
                        let rhs = m.payload.get(offset + c) ^ dot(&coeffs, &own);
                        let mut row: Vec<u64> =
                            coeffs.iter().zip(&unknown).map(|(a, b)| a & b).collect();
                        e.insert(&mut row, rhs);
                    }
                    let x = e.solve(&unknown).ok_or(Error::Undecodable { user: k })?;
                    for i in 0..len {
                        if unknown[i / 64] >> (i % 64) & 1 == 1 {
                            recovered[k].set(start + i, x[i / 64] >> (i % 64) & 1 == 1);
                            known[k].set(start + i, true);
                        }
                    }
                }
                offset += combos as usize;
            }
        }
    }

    for (k, mask) in known.iter().enumerate() {
        if mask.count_ones() != f {
            return Err(Error::Undecodable { user: k });
        }
    }
    Ok(recovered)
}
