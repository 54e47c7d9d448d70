/// Depth of object `index` among `n` when the projection carries no z.
///
/// Bit-reversal of `index` over `ceil(log2 n)` bits, scaled into `[0, 1)`.
/// Consecutive indices land far apart, so objects that sit next to each other
/// in the source order rarely share a depth layer.
pub fn derived_depth(index: usize, n: usize) -> f64 {
    debug_assert!(index < n, "index {index} out of range for {n}");
    let bits = if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    };
    if bits == 0 {
        return 0.0;
    }
    let reversed = (index as u64).reverse_bits() >> (64 - bits);
    reversed as f64 / (1u64 << bits) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn first_indices_of_eight() {
        assert_eq!(derived_depth(0, 8), 0.0);
        assert_eq!(derived_depth(1, 8), 0.5);
        assert_eq!(derived_depth(2, 8), 0.25);
        assert_eq!(derived_depth(3, 8), 0.75);
        assert_eq!(derived_depth(7, 8), 0.875);
    }

    #[test]
    fn single_object() {
        assert_eq!(derived_depth(0, 1), 0.0);
    }

    #[test]
    fn distinct_for_hundred() {
        let depths: HashSet<u64> = (0..100).map(|i| derived_depth(i, 100).to_bits()).collect();
        assert_eq!(depths.len(), 100);
        assert!((0..100).all(|i| (0.0..1.0).contains(&derived_depth(i, 100))));
    }

    #[test]
    fn non_power_of_two_uses_ceil_bits() {
        // n = 5 -> 3 bits; index 4 = 100b -> 001b = 1/8
        assert_eq!(derived_depth(4, 5), 0.125);
    }
}
