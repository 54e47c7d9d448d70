//! Timing harness for interactive re-filtering.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{FilterSession, RangeFilter};
use crate::model::DimensionColumn;

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub objects: usize,
    pub dimensions: usize,
    pub samples: usize,
    /// Median time to evaluate every slider from scratch and combine.
    pub cold_ms: f64,
    /// Median time to move one slider with the other masks cached.
    pub refilter_ms: f64,
}

/// Columns of uniform values in `[0, 1)` with ~1% missing.
pub fn synthetic_columns(n: usize, dims: usize, seed: u64) -> Vec<DimensionColumn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dims)
        .map(|d| {
            let values = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < 0.01 {
                        f32::NAN
                    } else {
                        rng.random::<f32>()
                    }
                })
                .collect();
            DimensionColumn::from_values(format!("dim{d}"), values, 30)
        })
        .collect()
}

fn random_range(rng: &mut ChaCha8Rng, column: &DimensionColumn) -> RangeFilter {
    let a = rng.random_range(column.min..=column.max);
    let b = rng.random_range(column.min..=column.max);
    RangeFilter::new(column.name.clone(), a.min(b), a.max(b))
}

fn median(mut samples: Vec<Duration>) -> f64 {
    samples.sort();
    samples[samples.len() / 2].as_secs_f64() * 1e3
}

/// Measures cold evaluation and one-slider re-filtering on synthetic data.
pub fn run(n: usize, dims: usize, samples: usize, seed: u64) -> BenchReport {
    let columns = synthetic_columns(n, dims, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut cold = Vec::with_capacity(samples);
    let mut warm = Vec::with_capacity(samples);
    let mut checksum = 0usize;

    for _ in 0..samples.max(1) {
        let ranges: Vec<RangeFilter> = columns.iter().map(|c| random_range(&mut rng, c)).collect();
        let start = Instant::now();
        let mut session = FilterSession::new(n, &columns);
        for r in &ranges {
            session.set_range(r.clone()).expect("known dimension");
        }
        checksum += session.mask().pass_count();
        cold.push(start.elapsed());

        let which = rng.random_range(0..columns.len());
        let moved = random_range(&mut rng, &columns[which]);
        let start = Instant::now();
        checksum += session.set_range(moved).expect("known dimension").pass_count();
        warm.push(start.elapsed());
    }
    std::hint::black_box(checksum);

    BenchReport {
        objects: n,
        dimensions: dims,
        samples: samples.max(1),
        cold_ms: median(cold),
        refilter_ms: median(warm),
    }
}
