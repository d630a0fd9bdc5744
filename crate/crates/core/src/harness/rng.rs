//! Per-trial random streams.
//!
//! Trial `i` of a run seeded with `s` draws from ChaCha8 keyed by `s` on
//! stream `i`, so any subset of trials can be replayed in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_of_order() {
        let a: Vec<u64> = (0..4).map(|t| trial_rng(7, t).random()).collect();
        let b: Vec<u64> = (0..4).rev().map(|t| trial_rng(7, t).random()).collect::<Vec<_>>().into_iter().rev().collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert_ne!(trial_rng(7, 0).random::<u64>(), trial_rng(8, 0).random::<u64>());
    }
}
