use serde::{Deserialize, Serialize};

use super::{FilterError, RangeFilter, SelectionMask};
use crate::model::DimensionColumn;

/// Uniform bins over `[min, max]`: bin `b` is `[min + b·w, min + (b+1)·w)`
/// with `w = (max − min) / bin_count`, and the last bin also contains `max`.
/// A degenerate domain (`min == max`) puts every value in bin 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub min: f64,
    pub max: f64,
    pub bin_count: usize,
}

/// Edges of one bin; `hi` is inclusive only when `closed_right` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinInterval {
    pub lo: f64,
    pub hi: f64,
    pub closed_right: bool,
}

impl Binning {
    pub fn new(min: f64, max: f64, bin_count: usize) -> Self {
        debug_assert!(bin_count >= 1 && min <= max);
        Binning { min, max, bin_count }
    }

    pub fn of(column: &DimensionColumn) -> Self {
        Binning::new(column.min, column.max, column.bin_count)
    }

    fn degenerate(&self) -> bool {
        self.min == self.max
    }

    fn width(&self) -> f64 {
        (self.max - self.min) / self.bin_count as f64
    }

    /// Left edge of bin `b`; `edge(bin_count)` is `max`.
    pub fn edge(&self, b: usize) -> f64 {
        if b >= self.bin_count {
            self.max
        } else {
            self.min + b as f64 * self.width()
        }
    }

    /// Bin holding `v`, or `None` when `v` is missing or outside the domain.
    ///
    /// The arithmetic guess is corrected against [`Binning::edge`] so that
    /// membership agrees exactly with [`Binning::interval`].
    #[inline]
    pub fn bin_of(&self, v: f64) -> Option<usize> {
        if v.is_nan() || v < self.min || v > self.max {
            return None;
        }
        if self.degenerate() {
            return Some(0);
        }
        let last = self.bin_count - 1;
        let mut b = (((v - self.min) / self.width()).floor() as usize).min(last);
        while b > 0 && v < self.edge(b) {
            b -= 1;
        }
        while b < last && v >= self.edge(b + 1) {
            b += 1;
        }
        Some(b)
    }

    pub fn interval(&self, b: usize) -> BinInterval {
        if self.degenerate() {
            return BinInterval {
                lo: self.min,
                hi: self.max,
                closed_right: b == 0,
            };
        }
        BinInterval {
            lo: self.edge(b),
            hi: self.edge(b + 1),
            closed_right: b + 1 == self.bin_count,
        }
    }
}

impl BinInterval {
    /// The filter that selects exactly this bin's members.
    pub fn to_filter(&self, dimension: &str) -> RangeFilter {
        RangeFilter {
            dimension: dimension.to_string(),
            lo: self.lo,
            hi: self.hi,
            closed_right: self.closed_right,
            always_active: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub missing: u64,
    /// Present values outside the domain; zero for bundle columns.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub outside: u64,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

/// Counts per bin over `[min, max]`.
pub fn histogram(values: &[f32], binning: Binning) -> Histogram {
    let mut h = Histogram {
        counts: vec![0; binning.bin_count],
        missing: 0,
        outside: 0,
    };
    for &v in values {
        if v.is_nan() {
            h.missing += 1;
        } else {
            match binning.bin_of(f64::from(v)) {
                Some(b) => h.counts[b] += 1,
                None => h.outside += 1,
            }
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionHistogram {
    pub dimension: String,
    pub total: Vec<u64>,
    pub passing: Vec<u64>,
    pub missing: u64,
}

impl DimensionHistogram {
    /// Objects in each bin that the mask rejects.
    pub fn unfiltered(&self) -> Vec<u64> {
        self.total.iter().zip(&self.passing).map(|(t, p)| t - p).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramSet {
    pub dimensions: Vec<DimensionHistogram>,
}

impl HistogramSet {
    pub fn get(&self, dimension: &str) -> Option<&DimensionHistogram> {
        self.dimensions.iter().find(|d| d.dimension == dimension)
    }
}

/// Total and mask-passing counts for every column.
pub fn filtered_histograms(columns: &[DimensionColumn], mask: &SelectionMask) -> HistogramSet {
    let dimensions = columns
        .iter()
        .map(|col| {
            assert_eq!(col.len(), mask.len(), "mask length differs from column");
            let binning = Binning::of(col);
            let mut total = vec![0u64; binning.bin_count];
            let mut passing = vec![0u64; binning.bin_count];
            let mut missing = 0;
            for (i, &v) in col.values.iter().enumerate() {
                match binning.bin_of(f64::from(v)) {
                    Some(b) => {
                        total[b] += 1;
                        if mask.get(i) {
                            passing[b] += 1;
                        }
                    }
                    None if v.is_nan() => missing += 1,
                    None => {}
                }
            }
            DimensionHistogram {
                dimension: col.name.clone(),
                total,
                passing,
                missing,
            }
        })
        .collect();
    HistogramSet { dimensions }
}

/// Edges of bin `b` of `column`.
pub fn bin_interval(column: &DimensionColumn, b: usize) -> Result<BinInterval, FilterError> {
    if b >= column.bin_count {
        return Err(FilterError::BinOutOfRange {
            dimension: column.name.clone(),
            bin: b,
            bin_count: column.bin_count,
        });
    }
    Ok(Binning::of(column).interval(b))
}
