use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use csn_core::filters::{FilterError, SelectionMask};
use csn_core::ingest::Atlas;
use csn_core::model::{Bundle, ModelError};
use csn_core::selection::{combine, FilterState, Selection};

use crate::cache::MaskCache;

/// A bundle plus the server's derived, lazily built data.
#[derive(Debug)]
pub struct Dataset {
    pub bundle: Bundle,
    masks: MaskCache,
    atlas: OnceLock<Result<Arc<Atlas>, String>>,
}

impl Dataset {
    pub fn new(bundle: Bundle) -> Self {
        Dataset {
            bundle,
            masks: MaskCache::default(),
            atlas: OnceLock::new(),
        }
    }

    /// Same result as [`csn_core::selection::select`], with per-filter
    /// masks served from the cache.
    pub fn select(&self, state: &FilterState) -> Result<Selection, FilterError> {
        let b = &self.bundle;
        let mut mask = SelectionMask::full(b.object_count());
        for range in &state.ranges {
            range.validate()?;
            let column = b
                .column(&range.dimension)
                .ok_or_else(|| FilterError::UnknownDimension(range.dimension.clone()))?;
            mask.and_assign(&self.masks.get_or_eval(range, column));
        }
        Ok(combine(mask, &state.query, &b.metadata))
    }

    pub fn cached_masks(&self) -> usize {
        self.masks.len()
    }

    /// Decoded atlas pages, loaded on first use.
    pub fn atlas(&self) -> Result<Arc<Atlas>, ModelError> {
        self.atlas
            .get_or_init(|| {
                self.bundle
                    .atlas_pages()
                    .map(|pages| {
                        Arc::new(Atlas {
                            descriptor: self.bundle.manifest.atlas,
                            pages,
                        })
                    })
                    .map_err(|e| e.to_string())
            })
            .clone()
            .map_err(ModelError::Input)
    }
}

#[derive(Debug, Clone)]
pub struct AppState {
    pub datasets: Arc<BTreeMap<String, Arc<Dataset>>>,
    /// Directory with the web client; a placeholder page is served without it.
    pub ui_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        let datasets = bundles
            .into_iter()
            .map(|b| (b.id(), Arc::new(Dataset::new(b))))
            .collect();
        AppState {
            datasets: Arc::new(datasets),
            ui_dir: None,
        }
    }

    pub fn with_ui(mut self, dir: Option<PathBuf>) -> Self {
        self.ui_dir = dir;
        self
    }

    pub fn dataset(&self, id: &str) -> Option<&Arc<Dataset>> {
        self.datasets.get(id)
    }
}
