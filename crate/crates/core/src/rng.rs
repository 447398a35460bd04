//! Deterministic, keyed random streams.
//!
//! Every random decision in a run draws from a [`RandomStream`] obtained with
//! [`derive_stream`]. A stream is a ChaCha8 generator seeded from the master
//! seed with the stream id selecting the ChaCha stream word, so streams for
//! different ids never overlap and can be created in any order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    stream_id: u64,
}

impl RandomStream {
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

/// Creates the stream `(master_seed, stream_id)`.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    RandomStream { rng, stream_id }
}

/// Folds a composite key (e.g. experiment, probe, run) into one 64-bit id.
///
/// Uses the splitmix64 finalizer on each component, so `[a, b]` and `[b, a]`
/// give different ids.
pub fn mix_key(parts: &[u64]) -> u64 {
    let mut acc: u64 = 0x243F_6A88_85A3_08D3;
    for &part in parts {
        acc = splitmix64(acc ^ splitmix64(part));
    }
    acc
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(stream: &mut RandomStream, count: usize) -> Vec<u64> {
        (0..count).map(|_| stream.next_u64()).collect()
    }

    #[test]
    fn same_key_same_sequence() {
        let a = first(&mut derive_stream(42, 0), 64);
        let b = first(&mut derive_stream(42, 0), 64);
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_ids_differ() {
        let a = first(&mut derive_stream(42, 0), 64);
        let b = first(&mut derive_stream(42, 1), 64);
        assert!(a.iter().zip(&b).any(|(x, y)| x != y));
    }

    #[test]
    fn creation_order_is_irrelevant() {
        let early = first(&mut derive_stream(42, 5), 16);
        let mut s4 = derive_stream(42, 4);
        let _ = first(&mut s4, 100);
        let late = first(&mut derive_stream(42, 5), 16);
        assert_eq!(early, late);
    }

    #[test]
    fn mix_key_is_order_sensitive() {
        assert_ne!(mix_key(&[1, 2]), mix_key(&[2, 1]));
        assert_eq!(mix_key(&[7, 8, 9]), mix_key(&[7, 8, 9]));
    }
}
