use std::path::Path;

use serde::Serialize;

use super::config::ProjectionSpec;
use super::pipeline::{compute_projection, ProjectionSources, PARENT_INDEX_FIELD};
use super::IngestError;
use crate::dimred::EmbeddingMatrix;
use crate::model::{Bundle, ModelError};

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    pub name: String,
    pub dims: u8,
    /// True when an existing projection of the same name was overwritten.
    pub replaced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_missing: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsne_clamped: Option<Vec<usize>>,
}

/// Computes one projection for an existing bundle, writes its points file
/// and records it in the manifest.
///
/// For a subset bundle, `embeddings` and imported tables may have one row
/// per bundle object or one per source object; the latter are restricted
/// through the `parent_index` column.
pub fn add_projection(
    bundle_dir: &Path,
    spec: &ProjectionSpec,
    embeddings: Option<EmbeddingMatrix>,
) -> Result<ProjectionReport, IngestError> {
    let bundle = Bundle::open(bundle_dir)?;
    let n = bundle.object_count();
    let (n_source, selected) = match bundle.manifest.subset {
        Some(s) => {
            let parents = bundle.metadata.column(PARENT_INDEX_FIELD).ok_or_else(|| {
                IngestError::Config(format!("subset bundle has no `{PARENT_INDEX_FIELD}` column"))
            })?;
            let selected = parents
                .iter()
                .map(|v| {
                    v.parse::<usize>()
                        .map_err(|_| IngestError::Config(format!("bad {PARENT_INDEX_FIELD} {v:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (s.parent_count, selected)
        }
        None => (n, (0..n).collect()),
    };
    let embeddings = match embeddings {
        Some(m) if m.rows() == n => Some(m),
        Some(m) if m.rows() == n_source => Some(m.select_rows(&selected)),
        Some(m) => {
            return Err(IngestError::RowMismatch {
                what: "embedding matrix".into(),
                metadata: n,
                found: m.rows(),
            })
        }
        None => None,
    };

    let computed = compute_projection(
        spec,
        &ProjectionSources {
            embeddings: embeddings.as_ref(),
            columns: &bundle.columns,
            metadata: &bundle.metadata,
            n_source,
            selected: &selected,
        },
    )?;
    let table = computed.table;
    let mut manifest = bundle.manifest.clone();
    let descriptor = table.write(bundle_dir)?;
    let replaced = match manifest.projections.iter_mut().find(|p| p.name == table.name) {
        Some(slot) => {
            *slot = descriptor.clone();
            true
        }
        None => {
            manifest.projections.push(descriptor.clone());
            false
        }
    };
    manifest.validate().map_err(ModelError::from)?;
    manifest.write(bundle_dir)?;
    Ok(ProjectionReport {
        name: descriptor.name,
        dims: descriptor.dims,
        replaced,
        axis_missing: computed.axis_missing,
        tsne_clamped: computed.tsne_clamped,
    })
}
