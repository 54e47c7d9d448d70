//! Per-object predicate scans for range filters and histograms.

/// A column as the scans see it: raw values (NaN = missing) and its domain.
#[derive(Debug, Clone, Copy)]
pub struct Col<'a> {
    pub values: &'a [f32],
    pub min: f64,
    pub max: f64,
    pub bins: usize,
}

/// `(column index, lo, hi)`, closed on both ends.
pub type Range = (usize, f64, f64);

/// Object `i` passes when every range that does not cover its column's
/// whole domain holds a present value of `i` within `[lo, hi]`.
pub fn range_mask(cols: &[Col], ranges: &[Range], n: usize) -> Vec<bool> {
    (0..n)
        .map(|i| {
            ranges.iter().all(|&(c, lo, hi)| {
                let col = cols[c];
                let whole = lo <= col.min && hi >= col.max;
                if whole {
                    return true;
                }
                let v = col.values[i];
                !v.is_nan() && f64::from(v) >= lo && f64::from(v) <= hi
            })
        })
        .collect()
}

/// Bin of `v`: the first `b` with `min + b·w <= v < min + (b+1)·w`, the
/// last bin also taking `max`. Degenerate domains use bin 0.
pub fn bin_index(v: f64, min: f64, max: f64, bins: usize) -> Option<usize> {
    if v.is_nan() || v < min || v > max {
        return None;
    }
    if min == max {
        return Some(0);
    }
    let w = (max - min) / bins as f64;
    for b in 0..bins {
        let lo = min + b as f64 * w;
        let hi = if b + 1 == bins { max } else { min + (b + 1) as f64 * w };
        if v >= lo && (v < hi || (b + 1 == bins && v <= hi)) {
            return Some(b);
        }
    }
    None
}

/// Bin counts over the objects where `keep` is true.
pub fn histogram(col: Col, keep: &[bool]) -> Vec<u64> {
    let mut counts = vec![0u64; col.bins];
    for (i, &v) in col.values.iter().enumerate() {
        if keep[i] {
            if let Some(b) = bin_index(f64::from(v), col.min, col.max, col.bins) {
                counts[b] += 1;
            }
        }
    }
    counts
}
