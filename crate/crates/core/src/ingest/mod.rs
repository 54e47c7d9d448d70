//! Builds a bundle from a metadata table, an optional embedding matrix and
//! a set of images. See [`IngestConfig`] for the input description.

mod atlas;
mod config;
mod pipeline;
mod project;
mod sample;
mod summary;

use std::path::PathBuf;

pub use atlas::{build_atlas, make_thumbnail, Atlas};
pub use config::{DimensionSpec, ImageSource, IngestConfig, ProjectionSpec, SubsetSpec};
pub use pipeline::{ingest, IngestReport, PARENT_INDEX_FIELD};
pub use project::{add_projection, ProjectionReport};
pub use sample::{bounded, sample_subset};
pub use summary::{summarize_column, ColumnSummary};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("subset size {k} must be between 1 and {n_total}")]
    SubsetSize { k: usize, n_total: usize },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("object {index} ({}): {message}", path.display())]
    Image {
        index: usize,
        path: PathBuf,
        message: String,
    },
    #[error("row count mismatch: metadata has {metadata} rows, {what} has {found}")]
    RowMismatch {
        what: String,
        metadata: usize,
        found: usize,
    },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Dimred(#[from] crate::dimred::DimredError),
}
