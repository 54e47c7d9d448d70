#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnSummary {
    pub min: f64,
    pub max: f64,
    pub missing_count: usize,
    /// Every value is missing; `min` and `max` are then both zero.
    pub degenerate: bool,
}

/// Histogram domain for a column: min and max over non-missing (non-NaN)
/// values. The bin count is chosen by the caller.
pub fn summarize_column(values: &[f32]) -> ColumnSummary {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut missing = 0;
    for &v in values {
        if v.is_nan() {
            missing += 1;
        } else {
            min = min.min(f64::from(v));
            max = max.max(f64::from(v));
        }
    }
    if missing == values.len() {
        return ColumnSummary {
            min: 0.0,
            max: 0.0,
            missing_count: missing,
            degenerate: true,
        };
    }
    ColumnSummary {
        min,
        max,
        missing_count: missing,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_to_nine() {
        let v: Vec<f32> = (0..10).map(|i| i as f32).collect();
        let s = summarize_column(&v);
        assert_eq!((s.min, s.max, s.missing_count, s.degenerate), (0.0, 9.0, 0, false));
    }

    #[test]
    fn skips_missing() {
        let s = summarize_column(&[1.0, f32::NAN, 3.0]);
        assert_eq!((s.min, s.max, s.missing_count), (1.0, 3.0, 1));
    }

    #[test]
    fn all_missing_is_degenerate() {
        let s = summarize_column(&[f32::NAN; 4]);
        assert_eq!((s.min, s.max, s.missing_count, s.degenerate), (0.0, 0.0, 4, true));
    }

    #[test]
    fn uniform_draws_span_unit_interval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f32> = (0..10_000).map(|_| rng.random::<f32>()).collect();
        let s = summarize_column(&v);
        assert!((0.0..0.01).contains(&s.min), "min {}", s.min);
        assert!(s.max > 0.99 && s.max <= 1.0, "max {}", s.max);
    }
}
