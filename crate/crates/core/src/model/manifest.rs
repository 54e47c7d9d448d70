use std::collections::HashSet;
use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ModelError, Violation};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const METADATA_FILE: &str = "metadata.csv";

/// Self-description of a dataset bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionManifest {
    pub name: String,
    pub object_count: usize,
    pub projections: Vec<ProjectionDescriptor>,
    pub dimensions: Vec<DimensionDescriptor>,
    pub metadata_fields: Vec<FieldDescriptor>,
    #[serde(default)]
    pub cluster_fields: Vec<String>,
    pub atlas: AtlasDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<SubsetDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDescriptor {
    pub name: String,
    /// Path relative to the bundle root, e.g. `points/pca.bin`.
    pub file: String,
    pub dims: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionDescriptor {
    pub name: String,
    pub label: String,
    pub file: String,
    pub min: f64,
    pub max: f64,
    pub bin_count: usize,
    #[serde(default)]
    pub missing_count: usize,
    /// Set when every value is missing; the domain is then `[0, 0]`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Info,
    Categorical,
    Freetext,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub name: String,
    pub kind: FieldKind,
    /// Distinct values, sorted. Only present for categorical fields.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasDescriptor {
    pub thumb_px: u32,
    pub page_px: u32,
    pub per_page: usize,
    pub page_count: usize,
}

impl AtlasDescriptor {
    /// Geometry for `n` objects. Callers must ensure `thumb_px` divides `page_px`.
    pub fn for_objects(n: usize, thumb_px: u32, page_px: u32) -> Self {
        let cols = (page_px / thumb_px) as usize;
        let per_page = cols * cols;
        AtlasDescriptor {
            thumb_px,
            page_px,
            per_page,
            page_count: n.div_ceil(per_page),
        }
    }

    pub fn cols(&self) -> usize {
        (self.page_px / self.thumb_px) as usize
    }

    /// `(page, col, row)` of object `index`.
    pub fn cell(&self, index: usize) -> (usize, usize, usize) {
        let cols = self.cols();
        let page = index / self.per_page;
        let within = index % self.per_page;
        (page, within % cols, within / cols)
    }

    pub fn page_path(page: usize) -> String {
        format!("atlas/page_{page}.png")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetDescriptor {
    pub seed: u64,
    pub parent_count: usize,
}

impl CollectionManifest {
    pub fn projection(&self, name: &str) -> Option<&ProjectionDescriptor> {
        self.projections.iter().find(|p| p.name == name)
    }

    pub fn dimension(&self, name: &str) -> Option<&DimensionDescriptor> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDescriptor> {
        self.metadata_fields.iter().find(|f| f.name == name)
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.metadata_fields.iter().map(|f| f.name.as_str())
    }

    /// Checks every invariant that can be decided without touching the disk.
    pub fn validate(&self) -> Result<(), Violation> {
        unique(self.projections.iter().map(|p| p.name.as_str()), "projection")?;
        unique(self.dimensions.iter().map(|d| d.name.as_str()), "dimension")?;
        unique(self.field_names(), "metadata field")?;

        for p in &self.projections {
            if p.dims != 2 && p.dims != 3 {
                return Err(Violation::ProjectionDims {
                    projection: p.name.clone(),
                    dims: p.dims,
                });
            }
            check_relative(&p.file)?;
        }
        for d in &self.dimensions {
            check_relative(&d.file)?;
            if !(d.min <= d.max) {
                return Err(Violation::DomainInverted {
                    dimension: d.name.clone(),
                    min: d.min,
                    max: d.max,
                });
            }
            if d.bin_count == 0 {
                return Err(Violation::ZeroBins(d.name.clone()));
            }
        }
        for f in &self.metadata_fields {
            match f.kind {
                FieldKind::Categorical => {
                    if f.values.is_empty() {
                        return Err(Violation::CategoricalEmpty(f.name.clone()));
                    }
                    if f.values.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Violation::CategoricalUnsorted(f.name.clone()));
                    }
                }
                _ if !f.values.is_empty() => {
                    return Err(Violation::ValuesOnNonCategorical(f.name.clone()));
                }
                _ => {}
            }
        }
        for c in &self.cluster_fields {
            match self.field(c) {
                Some(f) if f.kind == FieldKind::Categorical => {}
                _ => return Err(Violation::ClusterField(c.clone())),
            }
        }

        let a = &self.atlas;
        if a.thumb_px == 0 || a.page_px == 0 || a.page_px % a.thumb_px != 0 {
            return Err(Violation::AtlasGeometry(format!(
                "thumb_px {} must divide page_px {}",
                a.thumb_px, a.page_px
            )));
        }
        let expected = AtlasDescriptor::for_objects(self.object_count, a.thumb_px, a.page_px);
        if expected.per_page != a.per_page {
            return Err(Violation::AtlasGeometry(format!(
                "per_page is {}, expected {}",
                a.per_page, expected.per_page
            )));
        }
        if expected.page_count != a.page_count {
            return Err(Violation::AtlasGeometry(format!(
                "page_count is {}, expected {}",
                a.page_count, expected.page_count
            )));
        }
        Ok(())
    }

    /// Checks the invariants that relate the manifest to the files beside it.
    pub fn validate_files(&self, root: &Path) -> Result<(), ModelError> {
        let n = self.object_count as u64;
        for p in &self.projections {
            let len = file_len(&root.join(&p.file))?;
            let expected = n * u64::from(p.dims) * 4;
            if len != expected {
                return Err(Violation::CoordinateCount {
                    projection: p.name.clone(),
                    expected: n * u64::from(p.dims),
                    found: len / 4,
                }
                .into());
            }
        }
        for d in &self.dimensions {
            let len = file_len(&root.join(&d.file))?;
            if len != n * 4 {
                return Err(Violation::ValueCount {
                    dimension: d.name.clone(),
                    expected: n,
                    found: len / 4,
                }
                .into());
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, root: &Path) -> Result<(), ModelError> {
        let path = root.join(MANIFEST_FILE);
        fs::write(&path, self.to_json()).map_err(|e| ModelError::io(&path, e))
    }
}

/// Reads and validates a manifest. `path` may name the manifest file itself
/// or the bundle directory containing it.
pub fn load_manifest(path: &Path) -> Result<CollectionManifest, ModelError> {
    let (file, root) = manifest_location(path);
    let text = fs::read_to_string(&file).map_err(|e| ModelError::io(&file, e))?;
    let manifest: CollectionManifest =
        serde_json::from_str(&text).map_err(|source| ModelError::Parse { path: file, source })?;
    manifest.validate()?;
    manifest.validate_files(&root)?;
    Ok(manifest)
}

pub(crate) fn manifest_location(path: &Path) -> (PathBuf, PathBuf) {
    if path.is_dir() {
        (path.join(MANIFEST_FILE), path.to_path_buf())
    } else {
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        (path.to_path_buf(), root)
    }
}

fn file_len(path: &Path) -> Result<u64, ModelError> {
    fs::metadata(path)
        .map(|m| m.len())
        .map_err(|e| ModelError::io(path, e))
}

fn unique<'a>(names: impl Iterator<Item = &'a str>, what: &'static str) -> Result<(), Violation> {
    let mut seen = HashSet::new();
    for n in names {
        if n.is_empty() {
            return Err(Violation::EmptyName(what));
        }
        if !seen.insert(n) {
            return Err(Violation::DuplicateName {
                what,
                name: n.to_string(),
            });
        }
    }
    Ok(())
}

fn check_relative(file: &str) -> Result<(), Violation> {
    let path = Path::new(file);
    let ok = !file.is_empty() && path.components().all(|c| matches!(c, Component::Normal(_)));
    if ok {
        Ok(())
    } else {
        Err(Violation::BadPath(file.to_string()))
    }
}
