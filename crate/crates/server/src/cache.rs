use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use csn_core::filters::{RangeFilter, SelectionMask};
use csn_core::model::DimensionColumn;

/// Entries kept before the cache is emptied and refilled.
const CAPACITY: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    dimension: String,
    lo: u64,
    hi: u64,
    closed_right: bool,
    always_active: bool,
}

impl Key {
    fn of(r: &RangeFilter) -> Self {
        Key {
            dimension: r.dimension.clone(),
            lo: r.lo.to_bits(),
            hi: r.hi.to_bits(),
            closed_right: r.closed_right,
            always_active: r.always_active,
        }
    }
}

/// Per-filter masks shared across requests. A cached mask is exactly what
/// [`RangeFilter::evaluate`] returns, so hits and misses answer alike.
#[derive(Debug, Default)]
pub struct MaskCache {
    masks: RwLock<HashMap<Key, Arc<SelectionMask>>>,
}

impl MaskCache {
    pub fn get_or_eval(&self, range: &RangeFilter, column: &DimensionColumn) -> Arc<SelectionMask> {
        let key = Key::of(range);
        if let Some(m) = self.masks.read().expect("cache lock").get(&key) {
            return Arc::clone(m);
        }
        let mask = Arc::new(range.evaluate(column));
        let mut masks = self.masks.write().expect("cache lock");
        if masks.len() >= CAPACITY {
            masks.clear();
        }
        Arc::clone(masks.entry(key).or_insert(mask))
    }

    pub fn len(&self) -> usize {
        self.masks.read().expect("cache lock").len()
    }
}
