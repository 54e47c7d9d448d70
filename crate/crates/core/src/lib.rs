//! Engine for exploring large image collections through projections,
//! range filters and a small boolean query language.
//!
//! A collection lives on disk as a *bundle* (see [`model`]), produced by the
//! [`ingest`] pipeline. [`dimred`] computes projections, [`filters`] and
//! [`query`] turn user state into a [`filters::SelectionMask`], and
//! [`exports`] materializes that state as CSV or PNG.

pub mod dimred;
pub mod exports;
pub mod filters;
pub mod ingest;
pub mod model;
pub mod query;
pub mod selection;

pub use filters::SelectionMask;
pub use model::{Bundle, CollectionManifest, ProjectionTable};
pub use selection::{FilterState, Selection};
