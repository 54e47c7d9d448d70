//! CSV and PNG snapshots of the current exploration state.

mod csv_export;
mod render;

pub use csv_export::{export_csv, read_csv_export, CsvExport};
pub use render::{render_png, render_view, Rendered, ViewState, GREY_ALPHA};

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("unknown projection `{0}`")]
    UnknownProjection(String),
    #[error("invalid view: {0}")]
    InvalidView(String),
    #[error("mask has {mask} entries, collection has {objects}")]
    MaskLength { mask: usize, objects: usize },
    #[error("malformed export: {0}")]
    Malformed(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}
