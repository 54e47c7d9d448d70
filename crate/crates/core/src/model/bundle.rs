use std::path::{Path, PathBuf};

use image::RgbaImage;

use super::binio::read_f32_le;
use super::manifest::{load_manifest, manifest_location, AtlasDescriptor, METADATA_FILE};
use super::{
    derived_depth, CollectionManifest, DimensionDescriptor, MetadataTable, ModelError,
    ObjectRecord, ProjectionDescriptor, Violation,
};

/// Row-major coordinates of one projection. x and y live in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionTable {
    pub name: String,
    dims: usize,
    coords: Vec<f32>,
}

impl ProjectionTable {
    pub fn new(name: impl Into<String>, dims: usize, coords: Vec<f32>) -> Result<Self, ModelError> {
        if dims != 2 && dims != 3 {
            return Err(ModelError::Input(format!("projection dims {dims}, expected 2 or 3")));
        }
        if coords.len() % dims != 0 {
            return Err(ModelError::Input(format!(
                "{} coordinates do not form rows of {dims}",
                coords.len()
            )));
        }
        Ok(ProjectionTable {
            name: name.into(),
            dims,
            coords,
        })
    }

    pub fn from_xy(name: impl Into<String>, xy: &[[f32; 2]]) -> Self {
        ProjectionTable {
            name: name.into(),
            dims: 2,
            coords: xy.iter().flatten().copied().collect(),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f32] {
        &self.coords
    }

    pub fn xy(&self, i: usize) -> [f32; 2] {
        let r = i * self.dims;
        [self.coords[r], self.coords[r + 1]]
    }

    pub fn z(&self, i: usize) -> Option<f32> {
        (self.dims == 3).then(|| self.coords[i * self.dims + 2])
    }

    /// Painter's depth: the stored z when present, otherwise [`derived_depth`].
    pub fn depth(&self, i: usize) -> f64 {
        match self.z(i) {
            Some(z) => f64::from(z),
            None => derived_depth(i, self.len()),
        }
    }

    pub fn descriptor(&self) -> ProjectionDescriptor {
        ProjectionDescriptor {
            name: self.name.clone(),
            file: format!("points/{}.bin", self.name),
            dims: self.dims as u8,
        }
    }

    /// Writes `points/<name>.bin` under `root` and returns its descriptor.
    pub fn write(&self, root: &Path) -> Result<ProjectionDescriptor, ModelError> {
        let desc = self.descriptor();
        super::write_f32_le(&root.join(&desc.file), &self.coords)?;
        Ok(desc)
    }
}

/// One numeric filterable variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionColumn {
    pub name: String,
    pub label: String,
    pub values: Vec<f32>,
    pub min: f64,
    pub max: f64,
    pub bin_count: usize,
    pub missing_count: usize,
}

impl DimensionColumn {
    /// Builds a column whose domain is the observed range of `values`.
    pub fn from_values(name: impl Into<String>, values: Vec<f32>, bin_count: usize) -> Self {
        let name = name.into();
        let summary = crate::ingest::summarize_column(&values);
        DimensionColumn {
            label: name.clone(),
            name,
            values,
            min: summary.min,
            max: summary.max,
            bin_count,
            missing_count: summary.missing_count,
        }
    }

    pub fn from_descriptor(desc: &DimensionDescriptor, values: Vec<f32>) -> Self {
        DimensionColumn {
            name: desc.name.clone(),
            label: desc.label.clone(),
            values,
            min: desc.min,
            max: desc.max,
            bin_count: desc.bin_count,
            missing_count: desc.missing_count,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> Option<f32> {
        let v = self.values[i];
        (!v.is_nan()).then_some(v)
    }
}

/// A fully loaded, validated bundle.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub root: PathBuf,
    pub manifest: CollectionManifest,
    pub projections: Vec<ProjectionTable>,
    pub columns: Vec<DimensionColumn>,
    pub metadata: MetadataTable,
}

impl Bundle {
    pub fn open(path: &Path) -> Result<Self, ModelError> {
        let (_, root) = manifest_location(path);
        let manifest = load_manifest(path)?;

        let projections = manifest
            .projections
            .iter()
            .map(|p| ProjectionTable::new(&p.name, p.dims as usize, read_f32_le(&root.join(&p.file))?))
            .collect::<Result<Vec<_>, _>>()?;
        let columns = manifest
            .dimensions
            .iter()
            .map(|d| Ok(DimensionColumn::from_descriptor(d, read_f32_le(&root.join(&d.file))?)))
            .collect::<Result<Vec<_>, ModelError>>()?;

        let metadata = MetadataTable::read(&root.join(METADATA_FILE))?;
        let expected: Vec<String> = manifest.field_names().map(str::to_string).collect();
        if metadata.fields() != expected.as_slice() {
            return Err(Violation::MetadataHeader {
                expected,
                found: metadata.fields().to_vec(),
            }
            .into());
        }
        if metadata.len() != manifest.object_count {
            return Err(Violation::MetadataRows {
                expected: manifest.object_count,
                found: metadata.len(),
            }
            .into());
        }

        Ok(Bundle {
            root,
            manifest,
            projections,
            columns,
            metadata,
        })
    }

    pub fn object_count(&self) -> usize {
        self.manifest.object_count
    }

    pub fn id(&self) -> String {
        self.root
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.manifest.name.clone())
    }

    pub fn projection(&self, name: &str) -> Option<&ProjectionTable> {
        self.projections.iter().find(|p| p.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&DimensionColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn record(&self, index: usize) -> ObjectRecord {
        let mut record = self.metadata.record(index);
        record.dimension_values = self.columns.iter().map(|c| c.value(index)).collect();
        record
    }

    pub fn atlas_page_path(&self, page: usize) -> Option<PathBuf> {
        (page < self.manifest.atlas.page_count)
            .then(|| self.root.join(AtlasDescriptor::page_path(page)))
    }

    pub fn atlas_page_bytes(&self, page: usize) -> Result<Option<Vec<u8>>, ModelError> {
        match self.atlas_page_path(page) {
            Some(path) => std::fs::read(&path)
                .map(Some)
                .map_err(|e| ModelError::io(&path, e)),
            None => Ok(None),
        }
    }

    /// Decodes every atlas page.
    pub fn atlas_pages(&self) -> Result<Vec<RgbaImage>, ModelError> {
        (0..self.manifest.atlas.page_count)
            .map(|k| {
                let path = self.root.join(AtlasDescriptor::page_path(k));
                image::open(&path)
                    .map(|img| img.to_rgba8())
                    .map_err(|source| ModelError::Image { path, source })
            })
            .collect()
    }
}
