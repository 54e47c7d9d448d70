//! Test fixtures and reference implementations.
//!
//! Nothing here depends on `csn-core`: the oracles are written from the
//! definitions alone so that agreement with the engine means something.

pub mod eigen;
pub mod fixture;
pub mod gen;
pub mod naive_filter;
pub mod naive_query;
