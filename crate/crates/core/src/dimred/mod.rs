//! Projections: exact PCA, exact t-SNE, metadata axis pairs and imported
//! coordinate tables.
//!
//! Everything here is a pure function of its inputs. Loops that run in
//! parallel reduce per row in a fixed order and then combine the row
//! results sequentially, so outputs never depend on the thread schedule.

mod axis;
mod import;
mod matrix;
mod pca;
mod perplexity;
mod tsne;

pub use axis::{axis_projection, numeric_column, AxisProjection};
pub use import::{import_projection, ImportFormat};
pub use matrix::EmbeddingMatrix;
pub use pca::{pca, Pca};
pub use perplexity::{conditional_distribution, perplexity_calibration, Calibration};
pub use tsne::{
    joint_probabilities, kl_divergence, kl_gradient, q_distribution, tsne, TsneParams, TsneResult,
};

#[derive(Debug, thiserror::Error)]
pub enum DimredError {
    #[error("zero variance: all rows are identical")]
    ZeroVariance,
    #[error("invalid input: {0}")]
    Input(String),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("row count mismatch: expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("column `{column}` is not numeric (row {row}: {value:?})")]
    NonNumeric {
        column: String,
        row: usize,
        value: String,
    },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}
