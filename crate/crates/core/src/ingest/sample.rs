use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::IngestError;

/// Draws `k` distinct indices from `0..n_total`, uniformly without
/// replacement, returned in ascending order.
///
/// The draw is pinned so other implementations can reproduce it:
///
/// 1. generator: ChaCha20 (RFC 8439 block function, 20 rounds) keyed by
///    `rand_core::SeedableRng::seed_from_u64(seed)`;
/// 2. bounded integers: Lemire's multiply-and-reject on full 64-bit outputs
///    (`next_u64`), see [`bounded`];
/// 3. partial Fisher–Yates over `[0, 1, .., n_total - 1]`: for `i in 0..k`
///    swap slot `i` with slot `i + bounded(n_total - i)`;
/// 4. the first `k` slots, sorted ascending.
pub fn sample_subset(n_total: usize, k: usize, seed: u64) -> Result<Vec<usize>, IngestError> {
    if k == 0 || k > n_total {
        return Err(IngestError::SubsetSize { k, n_total });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..n_total).collect();
    for i in 0..k {
        let j = i + bounded(&mut rng, (n_total - i) as u64) as usize;
        slots.swap(i, j);
    }
    slots.truncate(k);
    slots.sort_unstable();
    Ok(slots)
}

/// Uniform integer in `0..range` (Lemire 2019, "Fast Random Integer
/// Generation in an Interval").
pub fn bounded(rng: &mut impl RngCore, range: u64) -> u64 {
    debug_assert!(range > 0);
    let mut m = u128::from(rng.next_u64()) * u128::from(range);
    let mut low = m as u64;
    if low < range {
        let threshold = range.wrapping_neg() % range;
        while low < threshold {
            m = u128::from(rng.next_u64()) * u128::from(range);
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_subset_is_identity() {
        for seed in [0, 1, 99] {
            assert_eq!(sample_subset(5, 5, seed).unwrap(), vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = sample_subset(100, 10, 7).unwrap();
        let b = sample_subset(100, 10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|&i| i < 100));
        assert_ne!(a, sample_subset(100, 10, 8).unwrap());
    }

    #[test]
    fn rejects_oversized_or_empty() {
        assert!(matches!(sample_subset(3, 4, 0), Err(IngestError::SubsetSize { .. })));
        assert!(sample_subset(3, 0, 0).is_err());
    }

    #[test]
    fn bounded_stays_in_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for range in [1u64, 2, 3, 7, 1000, u64::MAX] {
            for _ in 0..200 {
                assert!(bounded(&mut rng, range) < range);
            }
        }
    }

    #[test]
    fn inclusion_frequency_is_uniform() {
        // Bin(200, 0.1) per index: mean 20, sd sqrt(18).
        let (n, k, seeds) = (10_000usize, 1_000usize, 200u64);
        let mut counts = vec![0u32; n];
        for seed in 0..seeds {
            for i in sample_subset(n, k, seed).unwrap() {
                counts[i] += 1;
            }
        }
        let mean = seeds as f64 * k as f64 / n as f64;
        let sd = (seeds as f64 * 0.1 * 0.9).sqrt();
        let outside_3sd = counts
            .iter()
            .filter(|&&c| (f64::from(c) - mean).abs() > 3.0 * sd)
            .count();
        let worst = counts
            .iter()
            .map(|&c| (f64::from(c) - mean).abs() / sd)
            .fold(0.0, f64::max);
        // A fair sampler puts ~0.4% of indices beyond 3 sd.
        assert!(outside_3sd as f64 / n as f64 <= 0.01, "{outside_3sd} indices beyond 3 sd");
        assert!(worst <= 5.5, "worst deviation {worst} sd");
    }
}
