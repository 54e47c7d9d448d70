//! Range filters, selection masks and histograms.
//!
//! Bins are half-open except the last, which is closed on the right. The
//! same edge arithmetic drives both histogram counting and Bin Mode
//! intervals, so filtering by a bin's interval selects exactly the objects
//! counted in that bin.

pub mod bench;
mod histogram;
mod mask;
mod range;
mod session;

pub use histogram::{
    bin_interval, filtered_histograms, histogram, BinInterval, Binning, DimensionHistogram,
    Histogram, HistogramSet,
};
pub use mask::SelectionMask;
pub use range::{apply_range_filters, RangeFilter};
pub use session::FilterSession;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("invalid range for `{dimension}`: lo {lo} > hi {hi}")]
    InvalidRange { dimension: String, lo: f64, hi: f64 },
    #[error("bin {bin} out of range for `{dimension}` ({bin_count} bins)")]
    BinOutOfRange {
        dimension: String,
        bin: usize,
        bin_count: usize,
    },
}
