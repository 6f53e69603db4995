//! Bit-exact placement, delivery and decoding for (grouped) decentralized
//! coded caching, plus a Monte Carlo driver for realized rates.

mod bits;
mod decode;
mod delivery;
mod gf2;
mod placement;
mod sim;

pub use bits::BitVec;
pub use decode::decode;
pub use delivery::{
    deliver, DeliveryConfig, DeliveryTranscript, GroupReport, Message, MessageTag, Procedure,
    DEFAULT_SEGMENT_BITS, MAX_GROUP_USERS,
};
pub use gf2::Eliminator;
pub use placement::{bits_per_file, effective_allocation, place, CacheState, Library};
pub use sim::{mix_seed, run_trial, trial_transcript, simulate_expected_rate, SimParams, SimSummary, TrialOutcome};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::MemoryAllocation;
    use crate::popularity::{FileGrouping, PopularityProfile};
    use crate::probability::DemandVector;

    fn setup(n: usize, m: f64, k: usize, f: usize, seed: u64) -> (Library, CacheState) {
        let p = PopularityProfile::uniform(n).unwrap();
        let g = FileGrouping::single(&p);
        let a = MemoryAllocation::new(vec![m]).unwrap();
        let lib = Library::generate(n, f, 11).unwrap();
        let cache = place(&lib, &g, &a, k, seed).unwrap();
        (lib, cache)
    }

    fn roundtrip(lib: &Library, cache: &CacheState, d: &DemandVector) -> DeliveryTranscript {
        let t = deliver(lib, cache, d, DeliveryConfig::default()).unwrap();
        let files = decode(cache, &t, d).unwrap();
        for (k, bits) in files.iter().enumerate() {
            assert_eq!(bits, lib.file(d.file(k)), "user {k}");
        }
        t
    }

    #[test]
    fn two_users_two_files() {
        let (lib, cache) = setup(2, 1.0, 2, 10_000, 3);
        let d = DemandVector::new(vec![0, 1], 2).unwrap();
        let t = roundtrip(&lib, &cache, &d);
        assert!((t.normalized_rate() - 0.75).abs() < 0.05);
        assert_eq!(t.total_bits(), t.messages.iter().map(|m| m.payload.len()).sum());
    }

    #[test]
    fn full_caches_send_nothing() {
        let (lib, cache) = setup(3, 3.0, 2, 500, 1);
        let d = DemandVector::new(vec![2, 2], 3).unwrap();
        let t = roundtrip(&lib, &cache, &d);
        assert_eq!(t.total_bits(), 0);
    }

    #[test]
    fn empty_caches_same_request_is_one_file() {
        let (lib, cache) = setup(3, 0.0, 4, 4096, 1);
        let d = DemandVector::new(vec![0; 4], 3).unwrap();
        let t = roundtrip(&lib, &cache, &d);
        assert_eq!(t.groups[0].chosen, Procedure::Parity);
        assert_eq!(t.groups[0].xor_bits, 4 * 4096);
        assert!(t.normalized_rate() > 1.0 && t.normalized_rate() < 1.05);
    }

    #[test]
    fn duplicate_and_distinct_demands_decode() {
        let (lib, cache) = setup(4, 1.0, 4, 2000, 9);
        for d in [[0, 1, 2, 3], [0, 0, 1, 1], [3, 3, 3, 0], [2, 2, 2, 2]] {
            let d = DemandVector::new(d.to_vec(), 4).unwrap();
            roundtrip(&lib, &cache, &d);
        }
    }

    #[test]
    fn grouped_delivery_decodes() {
        let p = PopularityProfile::zipf(8, 1.0).unwrap();
        let g = crate::popularity::partition_factor_two(&p);
        let a = MemoryAllocation::new(vec![1.0, 0.5, 0.5]).unwrap();
        let lib = Library::generate(8, 3000, 2).unwrap();
        let cache = place(&lib, &g, &a, 5, 4).unwrap();
        let d = DemandVector::new(vec![0, 7, 2, 1, 7], 8).unwrap();
        let t = roundtrip(&lib, &cache, &d);
        assert_eq!(t.groups.len(), 3);
        assert!(t.dump().lines().any(|l| l.starts_with("MSG ")));
    }

    #[test]
    fn tampered_transcript_is_rejected() {
        let (lib, cache) = setup(2, 1.0, 2, 1000, 3);
        let d = DemandVector::new(vec![0, 1], 2).unwrap();
        let mut t = deliver(&lib, &cache, &d, DeliveryConfig::default()).unwrap();
        t.messages.pop();
        assert!(matches!(
            decode(&cache, &t, &d),
            Err(crate::error::Error::Undecodable { .. })
        ));
    }
}
