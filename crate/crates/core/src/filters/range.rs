use serde::{Deserialize, Serialize};

use super::{FilterError, SelectionMask};
use crate::model::DimensionColumn;

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// One slider: keep objects whose value lies in `[lo, hi]` (or `[lo, hi)`
/// when `closed_right` is false).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeFilter {
    pub dimension: String,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub closed_right: bool,
    /// Constrain even when the range spans the whole domain, so missing
    /// values fail. Bin Mode filters set this.
    #[serde(default, skip_serializing_if = "is_false")]
    pub always_active: bool,
}

impl RangeFilter {
    pub fn new(dimension: impl Into<String>, lo: f64, hi: f64) -> Self {
        RangeFilter {
            dimension: dimension.into(),
            lo,
            hi,
            closed_right: true,
            always_active: false,
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi {
            return Err(FilterError::InvalidRange {
                dimension: self.dimension.clone(),
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(())
    }

    /// A range is inactive when it spans the column's whole `[min, max]`
    /// domain; inactive filters let every object through, missing or not.
    pub fn is_active(&self, column: &DimensionColumn) -> bool {
        if self.always_active {
            return true;
        }
        let covers_hi = if self.closed_right {
            self.hi >= column.max
        } else {
            self.hi > column.max
        };
        !(self.lo <= column.min && covers_hi)
    }

    /// Whether a present value satisfies the bounds. NaN never does.
    #[inline]
    pub fn contains(&self, value: f32) -> bool {
        let v = f64::from(value);
        if self.closed_right {
            v >= self.lo && v <= self.hi
        } else {
            v >= self.lo && v < self.hi
        }
    }

    /// Per-filter mask over one column.
    pub fn evaluate(&self, column: &DimensionColumn) -> SelectionMask {
        let n = column.len();
        if !self.is_active(column) {
            return SelectionMask::full(n);
        }
        let (lo, hi) = (self.lo, self.hi);
        let words = column
            .values
            .chunks(64)
            .map(|chunk| {
                let mut word = 0u64;
                if self.closed_right {
                    for (k, &v) in chunk.iter().enumerate() {
                        let v = f64::from(v);
                        word |= u64::from(v >= lo && v <= hi) << k;
                    }
                } else {
                    for (k, &v) in chunk.iter().enumerate() {
                        let v = f64::from(v);
                        word |= u64::from(v >= lo && v < hi) << k;
                    }
                }
                word
            })
            .collect();
        SelectionMask::from_words(words, n)
    }
}

/// Conjunction of every filter over `n` objects. Objects missing a value fail any active
/// filter on that dimension.
pub fn apply_range_filters(
    n: usize,
    columns: &[DimensionColumn],
    ranges: &[RangeFilter],
) -> Result<SelectionMask, FilterError> {
    let mut mask: Option<SelectionMask> = None;
    for range in ranges {
        range.validate()?;
        let column = columns
            .iter()
            .find(|c| c.name == range.dimension)
            .ok_or_else(|| FilterError::UnknownDimension(range.dimension.clone()))?;
        let m = range.evaluate(column);
        match &mut mask {
            Some(acc) => acc.and_assign(&m),
            None => mask = Some(m),
        }
    }
    Ok(mask.unwrap_or_else(|| SelectionMask::full(n)))
}
