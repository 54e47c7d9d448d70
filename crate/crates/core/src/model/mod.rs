//! Dataset bundle model.
//!
//! On disk a bundle is a directory:
//!
//! ```text
//! manifest.json            CollectionManifest
//! points/<projection>.bin  float32 LE, row-major N x dims
//! columns/<dimension>.bin  float32 LE, N values, NaN = missing
//! metadata.csv             header row, row i+1 = object i
//! atlas/page_<k>.png       thumbnail grid pages
//! ```
//!
//! A loaded [`Bundle`] is immutable and can be shared freely between threads.

mod binio;
mod bundle;
mod depth;
mod manifest;
mod metadata;
mod normalize;

use std::path::{Path, PathBuf};

pub use binio::{read_f32_le, write_f32_le};
pub use bundle::{Bundle, DimensionColumn, ProjectionTable};
pub use depth::derived_depth;
pub use manifest::{
    load_manifest, AtlasDescriptor, CollectionManifest, DimensionDescriptor, FieldDescriptor,
    FieldKind, ProjectionDescriptor, SubsetDescriptor, MANIFEST_FILE, METADATA_FILE,
};
pub use metadata::{MetadataTable, ObjectRecord};
pub use normalize::{normalize_projection, normalize_table_xy};

/// The first manifest invariant found to be violated.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("coordinate count mismatch: projection `{projection}` needs {expected} values, file holds {found}")]
    CoordinateCount {
        projection: String,
        expected: u64,
        found: u64,
    },
    #[error("value count mismatch: dimension `{dimension}` needs {expected} values, file holds {found}")]
    ValueCount {
        dimension: String,
        expected: u64,
        found: u64,
    },
    #[error("projection `{projection}` has dims {dims}, expected 2 or 3")]
    ProjectionDims { projection: String, dims: u8 },
    #[error("dimension `{dimension}` has min {min} > max {max}")]
    DomainInverted { dimension: String, min: f64, max: f64 },
    #[error("dimension `{0}` has zero bins")]
    ZeroBins(String),
    #[error("categorical field `{0}` lists no values")]
    CategoricalEmpty(String),
    #[error("categorical field `{0}` values are not sorted and deduplicated")]
    CategoricalUnsorted(String),
    #[error("non-categorical field `{0}` lists values")]
    ValuesOnNonCategorical(String),
    #[error("cluster field `{0}` is not a categorical metadata field")]
    ClusterField(String),
    #[error("atlas geometry: {0}")]
    AtlasGeometry(String),
    #[error("duplicate {what} name `{name}`")]
    DuplicateName { what: &'static str, name: String },
    #[error("empty {0} name")]
    EmptyName(&'static str),
    #[error("bundle path `{0}` must be relative and stay inside the bundle")]
    BadPath(String),
    #[error("metadata.csv header {found:?} does not match manifest fields {expected:?}")]
    MetadataHeader {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("metadata.csv has {found} rows, expected {expected}")]
    MetadataRows { expected: usize, found: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: malformed manifest: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: malformed CSV: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{}: malformed image: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("validation failed: {0}")]
    Invalid(#[from] Violation),
    #[error("{0}")]
    Input(String),
}

impl ModelError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ModelError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
