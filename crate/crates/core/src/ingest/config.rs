use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::dimred::TsneParams;
use crate::model::{FieldKind, ModelError};

/// Ingest description, read from JSON. Relative paths resolve against the
/// directory holding the config file.
///
/// ```json
/// {
///   "name": "demo",
///   "metadata_path": "metadata.csv",
///   "images": { "directory": "images" },
///   "embeddings_path": "embeddings.csv",
///   "dimension_columns": [{ "column": "year" }, { "embedding": 0, "label": "PC-ish" }],
///   "field_kinds": { "style": "categorical", "title": "freetext" },
///   "subset": { "k": 20, "seed": 3 },
///   "projections": [{ "method": "pca" }, { "method": "axis", "x": "year", "y": "dim0" }]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    pub name: String,
    pub metadata_path: PathBuf,
    pub images: ImageSource,
    #[serde(default)]
    pub embeddings_path: Option<PathBuf>,
    /// `[rows, cols]`, required for raw float32 embeddings.
    #[serde(default)]
    pub embeddings_shape: Option<(usize, usize)>,
    #[serde(default)]
    pub dimension_columns: Vec<DimensionSpec>,
    /// Fields not listed here are `info`.
    #[serde(default)]
    pub field_kinds: BTreeMap<String, FieldKind>,
    #[serde(default)]
    pub cluster_fields: Vec<String>,
    #[serde(default = "default_thumb_px")]
    pub thumb_px: u32,
    #[serde(default = "default_page_px")]
    pub page_px: u32,
    #[serde(default)]
    pub subset: Option<SubsetSpec>,
    /// Defaults to a single PCA projection when embeddings are given.
    #[serde(default)]
    pub projections: Option<Vec<ProjectionSpec>>,
}

fn default_thumb_px() -> u32 {
    64
}

fn default_page_px() -> u32 {
    1024
}

fn default_bins() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageSource {
    /// Every image file in the directory, sorted by file name; file `i`
    /// belongs to metadata row `i`.
    Directory(PathBuf),
    /// A metadata column of file paths, relative to `base` (or the config
    /// directory when `base` is absent).
    Column {
        field: String,
        #[serde(default)]
        base: Option<PathBuf>,
    },
}

/// One filterable dimension, taken from a numeric metadata column or from
/// an embedding coordinate. Exactly one source must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionSpec {
    #[serde(default)]
    pub column: Option<String>,
    #[serde(default)]
    pub embedding: Option<usize>,
    /// Defaults to the column name, or `dim<j>` for embedding coordinate j.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_bins")]
    pub bin_count: usize,
}

impl DimensionSpec {
    /// A dimension read from a numeric metadata field.
    pub fn column(field: impl Into<String>) -> Self {
        DimensionSpec {
            column: Some(field.into()),
            embedding: None,
            name: None,
            label: None,
            bin_count: default_bins(),
        }
    }

    pub fn resolved_name(&self) -> String {
        match (&self.name, &self.column, self.embedding) {
            (Some(n), _, _) => n.clone(),
            (None, Some(c), _) => c.clone(),
            (None, None, Some(j)) => format!("dim{j}"),
            (None, None, None) => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ProjectionSpec {
    Pca {
        #[serde(default)]
        name: Option<String>,
    },
    Tsne {
        #[serde(default)]
        name: Option<String>,
        #[serde(flatten)]
        params: TsneParams,
    },
    Axis {
        #[serde(default)]
        name: Option<String>,
        x: String,
        y: String,
    },
    /// CSV or float32 file with one row per bundle object, or one row per
    /// source row when subsetting (the subset is then applied).
    Import {
        name: String,
        path: PathBuf,
        /// Column count for float32 files.
        #[serde(default)]
        dims: Option<usize>,
    },
}

impl ProjectionSpec {
    pub fn name(&self) -> String {
        match self {
            ProjectionSpec::Pca { name } => name.clone().unwrap_or_else(|| "pca".into()),
            ProjectionSpec::Tsne { name, .. } => name.clone().unwrap_or_else(|| "tsne".into()),
            ProjectionSpec::Axis { name, x, y } => {
                name.clone().unwrap_or_else(|| format!("{x}_vs_{y}"))
            }
            ProjectionSpec::Import { name, .. } => name.clone(),
        }
    }
}

/// Names end up in bundle file paths.
pub(crate) fn check_file_name(what: &str, name: &str) -> Result<(), IngestError> {
    if name.is_empty()
        || name.starts_with('.')
        || name.chars().any(|c| matches!(c, '/' | '\\' | '\0') || c.is_control())
    {
        return Err(IngestError::Config(format!(
            "{what} name {name:?} cannot be used as a file name"
        )));
    }
    Ok(())
}

impl IngestConfig {
    /// Reads a config and makes its paths absolute relative to the file.
    pub fn read(path: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::io(path, e))?;
        let mut config: IngestConfig = serde_json::from_str(&text)
            .map_err(|e| IngestError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.metadata_path);
        if let Some(p) = &mut self.embeddings_path {
            fix(p);
        }
        match &mut self.images {
            ImageSource::Directory(p) => fix(p),
            ImageSource::Column { base: b, .. } => match b {
                Some(p) => fix(p),
                None => *b = Some(base.to_path_buf()),
            },
        }
        for p in self.projections.iter_mut().flatten() {
            if let ProjectionSpec::Import { path, .. } = p {
                fix(path);
            }
        }
    }

    /// Checks what can be checked without reading inputs.
    pub fn validate(&self) -> Result<(), IngestError> {
        let bad = |m: String| Err(IngestError::Config(m));
        if self.name.trim().is_empty() {
            return bad("name is empty".into());
        }
        if self.thumb_px == 0 || self.page_px == 0 || self.page_px % self.thumb_px != 0 {
            return bad(format!(
                "thumb_px {} must divide page_px {}",
                self.thumb_px, self.page_px
            ));
        }
        for d in &self.dimension_columns {
            if d.column.is_some() == d.embedding.is_some() {
                return bad(format!(
                    "dimension {:?} needs exactly one of `column` or `embedding`",
                    d.resolved_name()
                ));
            }
            if d.embedding.is_some() && self.embeddings_path.is_none() {
                return bad(format!(
                    "dimension {:?} reads embeddings but no embeddings_path is set",
                    d.resolved_name()
                ));
            }
            if d.bin_count == 0 {
                return bad(format!("dimension {:?} has zero bins", d.resolved_name()));
            }
            check_file_name("dimension", &d.resolved_name())?;
        }
        for p in self.projections.iter().flatten() {
            check_file_name("projection", &p.name())?;
            if matches!(p, ProjectionSpec::Pca { .. } | ProjectionSpec::Tsne { .. })
                && self.embeddings_path.is_none()
            {
                return bad(format!("projection {:?} needs embeddings_path", p.name()));
            }
        }
        if let Some(s) = self.subset {
            if s.k == 0 {
                return bad("subset k must be positive".into());
            }
        }
        Ok(())
    }
}
