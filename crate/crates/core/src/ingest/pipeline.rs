use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use image::RgbaImage;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{check_file_name, ImageSource, IngestConfig, ProjectionSpec};
use super::{build_atlas, make_thumbnail, sample_subset, IngestError};
use crate::dimred::{
    axis_projection, import_projection, numeric_column, pca, tsne, EmbeddingMatrix, ImportFormat,
};
use crate::model::{
    load_manifest, normalize_projection, write_f32_le, AtlasDescriptor, CollectionManifest,
    DimensionColumn, DimensionDescriptor, FieldDescriptor, FieldKind, MetadataTable, ModelError,
    ProjectionTable, SubsetDescriptor, METADATA_FILE,
};

/// Categorical fields with more distinct values must be declared freetext.
pub const MAX_CATEGORIES: usize = 256;

pub const PARENT_INDEX_FIELD: &str = "parent_index";

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub bundle: PathBuf,
    pub object_count: usize,
    pub projections: Vec<String>,
    pub dimensions: Vec<String>,
    pub atlas_pages: usize,
    /// Axis projections: objects placed at the domain minimum for lack of a value.
    pub axis_missing: Vec<(String, Vec<usize>)>,
    /// t-SNE projections: rows whose perplexity target was unattainable.
    pub tsne_clamped: Vec<(String, Vec<usize>)>,
}

/// Runs the whole pipeline and writes the bundle to `out`, which must be
/// empty or absent.
pub fn ingest(config: &IngestConfig, out: &Path) -> Result<IngestReport, IngestError> {
    config.validate()?;
    let source_meta = MetadataTable::read(&config.metadata_path)?;
    let n_source = source_meta.len();
    if source_meta.fields().iter().any(|f| f == PARENT_INDEX_FIELD) && config.subset.is_some() {
        return Err(IngestError::Config(format!(
            "metadata already has a `{PARENT_INDEX_FIELD}` column"
        )));
    }

    let embeddings = match &config.embeddings_path {
        Some(p) => {
            let m = EmbeddingMatrix::load(p, config.embeddings_shape)?;
            if m.rows() != n_source {
                return Err(IngestError::RowMismatch {
                    what: format!("embedding matrix {}", p.display()),
                    metadata: n_source,
                    found: m.rows(),
                });
            }
            Some(m)
        }
        None => None,
    };
    let image_paths = resolve_images(config, &source_meta)?;

    let selected: Vec<usize> = match config.subset {
        Some(s) => sample_subset(n_source, s.k, s.seed)?,
        None => (0..n_source).collect(),
    };
    let n = selected.len();
    let mut metadata = source_meta.select_rows(&selected);
    if config.subset.is_some() {
        metadata.push_column(
            PARENT_INDEX_FIELD.into(),
            selected.iter().map(usize::to_string).collect(),
        )?;
    }
    let embeddings = embeddings.map(|m| m.select_rows(&selected));

    let metadata_fields = describe_fields(config, &metadata)?;

    let mut columns = Vec::with_capacity(config.dimension_columns.len());
    for spec in &config.dimension_columns {
        let name = spec.resolved_name();
        let values: Vec<f32> = match (&spec.column, spec.embedding) {
            (Some(field), _) => numeric_column(field, &[], &metadata)?
                .into_iter()
                .map(|v| v.map_or(f32::NAN, |v| v as f32))
                .collect(),
            (None, Some(j)) => {
                let m = embeddings.as_ref().expect("validated");
                if j >= m.cols() {
                    return Err(IngestError::Config(format!(
                        "dimension {name:?} reads embedding column {j}, matrix has {}",
                        m.cols()
                    )));
                }
                m.column(j).into_iter().map(|v| v as f32).collect()
            }
            (None, None) => unreachable!("validated"),
        };
        let mut column = DimensionColumn::from_values(name, values, spec.bin_count);
        if let Some(label) = &spec.label {
            column.label = label.clone();
        }
        columns.push(column);
    }

    let mut report = IngestReport {
        bundle: out.to_path_buf(),
        object_count: n,
        projections: Vec::new(),
        dimensions: columns.iter().map(|c| c.name.clone()).collect(),
        atlas_pages: 0,
        axis_missing: Vec::new(),
        tsne_clamped: Vec::new(),
    };

    let default_specs = [ProjectionSpec::Pca { name: None }];
    let specs: &[ProjectionSpec] = match &config.projections {
        Some(p) => p,
        None if embeddings.is_some() => &default_specs,
        None => &[],
    };
    let mut projections = Vec::with_capacity(specs.len());
    for spec in specs {
        let sources = ProjectionSources {
            embeddings: embeddings.as_ref(),
            columns: &columns,
            metadata: &metadata,
            n_source,
            selected: &selected,
        };
        let computed = compute_projection(spec, &sources)?;
        if let Some(rows) = computed.axis_missing {
            report.axis_missing.push((computed.table.name.clone(), rows));
        }
        if let Some(rows) = computed.tsne_clamped {
            report.tsne_clamped.push((computed.table.name.clone(), rows));
        }
        projections.push(computed.table);
    }

    let thumbs = make_thumbnails(&image_paths, &selected, config.thumb_px)?;
    let atlas = build_atlas(&thumbs, config.thumb_px, config.page_px);

    let manifest = CollectionManifest {
        name: config.name.clone(),
        object_count: n,
        projections: projections.iter().map(ProjectionTable::descriptor).collect(),
        dimensions: columns.iter().map(describe_column).collect(),
        metadata_fields,
        cluster_fields: config.cluster_fields.clone(),
        atlas: atlas.descriptor,
        subset: config.subset.map(|s| SubsetDescriptor {
            seed: s.seed,
            parent_count: n_source,
        }),
    };
    manifest.validate().map_err(ModelError::from)?;

    prepare_output(out)?;
    for p in &projections {
        p.write(out)?;
    }
    for c in &columns {
        write_f32_le(&out.join(column_file(&c.name)), &c.values)?;
    }
    metadata.write(&out.join(METADATA_FILE))?;
    let atlas_dir = out.join("atlas");
    std::fs::create_dir_all(&atlas_dir).map_err(|e| ModelError::io(&atlas_dir, e))?;
    for (k, page) in atlas.pages.iter().enumerate() {
        let path = out.join(AtlasDescriptor::page_path(k));
        page.save(&path)
            .map_err(|source| ModelError::Image { path, source })?;
    }
    manifest.write(out)?;
    load_manifest(out)?;

    report.projections = projections.iter().map(|p| p.name.clone()).collect();
    report.atlas_pages = atlas.pages.len();
    Ok(report)
}

fn column_file(name: &str) -> String {
    format!("columns/{name}.bin")
}

fn describe_column(c: &DimensionColumn) -> DimensionDescriptor {
    DimensionDescriptor {
        name: c.name.clone(),
        label: c.label.clone(),
        file: column_file(&c.name),
        min: c.min,
        max: c.max,
        bin_count: c.bin_count,
        missing_count: c.missing_count,
        degenerate: c.missing_count == c.values.len(),
    }
}

fn describe_fields(
    config: &IngestConfig,
    metadata: &MetadataTable,
) -> Result<Vec<FieldDescriptor>, IngestError> {
    for name in config.field_kinds.keys().chain(&config.cluster_fields) {
        if metadata.column(name).is_none() {
            return Err(IngestError::Config(format!("unknown metadata field `{name}`")));
        }
    }
    metadata
        .columns()
        .map(|(name, cells)| {
            let kind = config.field_kinds.get(name).copied().unwrap_or(FieldKind::Info);
            let values = if kind == FieldKind::Categorical {
                let distinct: BTreeSet<&str> =
                    cells.iter().map(String::as_str).filter(|v| !v.trim().is_empty()).collect();
                if distinct.len() > MAX_CATEGORIES {
                    return Err(IngestError::Config(format!(
                        "categorical field `{name}` has {} distinct values (limit {MAX_CATEGORIES}); declare it freetext",
                        distinct.len()
                    )));
                }
                distinct.into_iter().map(str::to_string).collect()
            } else {
                Vec::new()
            };
            Ok(FieldDescriptor {
                name: name.to_string(),
                kind,
                values,
            })
        })
        .collect()
}

fn resolve_images(config: &IngestConfig, meta: &MetadataTable) -> Result<Vec<PathBuf>, IngestError> {
    let paths: Vec<PathBuf> = match &config.images {
        ImageSource::Directory(dir) => {
            let entries = std::fs::read_dir(dir).map_err(|e| ModelError::io(dir, e))?;
            let mut files = Vec::new();
            for entry in entries {
                let path = entry.map_err(|e| ModelError::io(dir, e))?.path();
                let ext = path
                    .extension()
                    .map(|e| e.to_string_lossy().to_ascii_lowercase())
                    .unwrap_or_default();
                if path.is_file() && IMAGE_EXTENSIONS.contains(&ext.as_str()) {
                    files.push(path);
                }
            }
            files.sort();
            files
        }
        ImageSource::Column { field, base } => {
            let cells = meta
                .column(field)
                .ok_or_else(|| IngestError::Config(format!("unknown image column `{field}`")))?;
            let base = base.clone().unwrap_or_default();
            cells.iter().map(|c| base.join(c.trim())).collect()
        }
    };
    if paths.len() != meta.len() {
        return Err(IngestError::RowMismatch {
            what: "image list".into(),
            metadata: meta.len(),
            found: paths.len(),
        });
    }
    Ok(paths)
}

fn make_thumbnails(
    paths: &[PathBuf],
    selected: &[usize],
    thumb_px: u32,
) -> Result<Vec<RgbaImage>, IngestError> {
    selected
        .par_iter()
        .enumerate()
        .map(|(index, &src)| {
            let path = &paths[src];
            let img = image::open(path).map_err(|e| IngestError::Image {
                index,
                path: path.clone(),
                message: e.to_string(),
            })?;
            Ok(make_thumbnail(&img, thumb_px))
        })
        .collect()
}

/// Inputs a projection may draw on, already restricted to the bundle's rows
/// except for imports, which may hold one row per source object.
pub(crate) struct ProjectionSources<'a> {
    pub embeddings: Option<&'a EmbeddingMatrix>,
    pub columns: &'a [DimensionColumn],
    pub metadata: &'a MetadataTable,
    pub n_source: usize,
    pub selected: &'a [usize],
}

pub(crate) struct Computed {
    pub table: ProjectionTable,
    pub axis_missing: Option<Vec<usize>>,
    pub tsne_clamped: Option<Vec<usize>>,
}

pub(crate) fn compute_projection(
    spec: &ProjectionSpec,
    src: &ProjectionSources<'_>,
) -> Result<Computed, IngestError> {
    let name = spec.name();
    check_file_name("projection", &name)?;
    let embeddings = || {
        src.embeddings
            .ok_or_else(|| IngestError::Config(format!("projection {name:?} needs embeddings")))
    };
    let mut out = Computed {
        table: ProjectionTable::from_xy(&name, &[]),
        axis_missing: None,
        tsne_clamped: None,
    };
    out.table = match spec {
        ProjectionSpec::Pca { .. } => {
            let fit = pca(embeddings()?, 2)?;
            ProjectionTable::from_xy(&name, &normalize_projection(&fit.xy())?)
        }
        ProjectionSpec::Tsne { params, .. } => {
            let result = tsne(embeddings()?, params)?;
            out.tsne_clamped = Some(result.clamped_rows.clone());
            ProjectionTable::from_xy(&name, &normalize_projection(&result.coords)?)
        }
        ProjectionSpec::Axis { x, y, .. } => {
            let xs = numeric_column(x, src.columns, src.metadata)?;
            let ys = numeric_column(y, src.columns, src.metadata)?;
            let axis = axis_projection(&name, &xs, &ys)?;
            out.axis_missing = Some(axis.missing);
            axis.table
        }
        ProjectionSpec::Import { path, dims, .. } => {
            let format = ImportFormat::guess(path, *dims)?;
            import_with_subset(path, &name, format, src.n_source, src.selected)?
        }
    };
    Ok(out)
}

fn import_with_subset(
    path: &Path,
    name: &str,
    format: ImportFormat,
    n_source: usize,
    selected: &[usize],
) -> Result<ProjectionTable, IngestError> {
    let n = selected.len();
    match import_projection(path, name, n, format) {
        Ok(t) => Ok(t),
        Err(crate::dimred::DimredError::RowCount { found, .. }) if found == n_source => {
            let full = import_projection(path, name, n_source, format)?;
            let dims = full.dims();
            let mut coords: Vec<f32> = selected
                .iter()
                .flat_map(|&i| full.coords()[i * dims..(i + 1) * dims].iter().copied())
                .collect();
            crate::model::normalize_table_xy(&mut coords, dims)?;
            Ok(ProjectionTable::new(name, dims, coords)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn prepare_output(out: &Path) -> Result<(), IngestError> {
    if out.exists() {
        let mut entries = std::fs::read_dir(out).map_err(|e| ModelError::io(out, e))?;
        if entries.next().is_some() {
            return Err(IngestError::Config(format!(
                "output directory {} is not empty",
                out.display()
            )));
        }
    }
    std::fs::create_dir_all(out).map_err(|e| ModelError::io(out, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::config::{DimensionSpec, SubsetSpec};
    use crate::ingest::summarize_column;
    use crate::model::Bundle;
    use image::{Rgb, RgbImage};

    /// 12 small images, a metadata table and a 12×3 embedding.
    fn fixture(dir: &Path) -> IngestConfig {
        let images = dir.join("images");
        std::fs::create_dir_all(&images).unwrap();
        let mut csv = String::from("file,style,year\n");
        let mut emb = String::new();
        for i in 0..12u32 {
            let img = RgbImage::from_fn(20 + i, 16, |x, y| Rgb([(x * 10) as u8, (y * 10) as u8, i as u8 * 20]));
            img.save(images.join(format!("img_{i:02}.png"))).unwrap();
            let style = ["Cubism", "Dada", "Pop"][i as usize % 3];
            let year = if i == 5 { String::new() } else { (1900 + i * 7).to_string() };
            csv.push_str(&format!("img_{i:02}.png,{style},{year}\n"));
            let f = f64::from(i);
            emb.push_str(&format!("{},{},{}\n", f, (f * 0.7).sin(), f * f / 10.0));
        }
        std::fs::write(dir.join("meta.csv"), csv).unwrap();
        std::fs::write(dir.join("emb.csv"), emb).unwrap();
        let mut config: IngestConfig = serde_json::from_str(
            r#"{"name": "tiny", "metadata_path": "meta.csv", "images": {"directory": "images"},
                "embeddings_path": "emb.csv", "thumb_px": 8, "page_px": 32,
                "field_kinds": {"style": "categorical"}, "cluster_fields": ["style"],
                "dimension_columns": [{"column": "year"}, {"embedding": 2, "label": "squares", "bin_count": 4}],
                "projections": [{"method": "pca"}, {"method": "axis", "x": "year", "y": "dim2"}]}"#,
        )
        .unwrap();
        config.resolve_paths(dir);
        config
    }

    #[test]
    fn builds_a_loadable_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture(dir.path());
        let out = dir.path().join("bundle");
        let report = ingest(&config, &out).unwrap();
        assert_eq!(report.atlas_pages, 1);
        assert_eq!(report.axis_missing, vec![("year_vs_dim2".to_string(), vec![5])]);

        let b = Bundle::open(&out).unwrap();
        assert_eq!(b.object_count(), 12);
        assert_eq!(b.manifest.field("style").unwrap().values, ["Cubism", "Dada", "Pop"]);
        let year = b.column("year").unwrap();
        assert_eq!(year.missing_count, 1);
        let s = summarize_column(&year.values);
        assert_eq!((year.min, year.max), (s.min, s.max));
        assert_eq!(b.column("dim2").unwrap().label, "squares");
        assert_eq!(b.metadata.column("year").unwrap()[5], "");
        assert!(b.manifest.subset.is_none());
    }

    #[test]
    fn subset_records_parent_index_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture(dir.path());
        config.subset = Some(SubsetSpec { k: 5, seed: 3 });
        config.projections.as_mut().unwrap().push(ProjectionSpec::Import {
            name: "ext".into(),
            path: dir.path().join("emb.csv"),
            dims: None,
        });
        ingest(&config, &dir.path().join("a")).unwrap();
        ingest(&config, &dir.path().join("b")).unwrap();
        for f in ["manifest.json", "metadata.csv", "points/pca.bin", "points/ext.bin", "columns/year.bin"] {
            assert_eq!(
                std::fs::read(dir.path().join("a").join(f)).unwrap(),
                std::fs::read(dir.path().join("b").join(f)).unwrap(),
                "{f}"
            );
        }
        let b = Bundle::open(&dir.path().join("a")).unwrap();
        let expected: Vec<String> = sample_subset(12, 5, 3).unwrap().iter().map(|i| i.to_string()).collect();
        assert_eq!(b.metadata.column(PARENT_INDEX_FIELD).unwrap(), expected.as_slice());
        assert_eq!(b.projection("ext").unwrap().dims(), 3);
        assert_eq!(b.manifest.subset.unwrap().parent_count, 12);
    }

    #[test]
    fn zero_dimensions_still_loads() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture(dir.path());
        config.dimension_columns.clear();
        config.projections = None;
        ingest(&config, &dir.path().join("out")).unwrap();
        let b = Bundle::open(&dir.path().join("out")).unwrap();
        assert!(b.columns.is_empty());
        assert_eq!(b.projections.len(), 1);
    }

    #[test]
    fn errors_name_the_problem() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture(dir.path());
        std::fs::write(dir.path().join("images/img_03.png"), b"not a png").unwrap();
        match ingest(&config, &dir.path().join("out")) {
            Err(IngestError::Image { index: 3, .. }) => {}
            other => panic!("{other:?}"),
        }

        let dir = tempfile::tempdir().unwrap();
        let config = fixture(dir.path());
        std::fs::write(dir.path().join("emb.csv"), "1,2\n3,4\n").unwrap();
        assert!(matches!(
            ingest(&config, &dir.path().join("out")),
            Err(IngestError::RowMismatch { metadata: 12, found: 2, .. })
        ));

        let dir = tempfile::tempdir().unwrap();
        let mut config = fixture(dir.path());
        config.dimension_columns = vec![DimensionSpec {
            column: Some("style".into()),
            embedding: None,
            name: None,
            label: None,
            bin_count: 30,
        }];
        assert!(matches!(
            ingest(&config, &dir.path().join("out")),
            Err(IngestError::Dimred(crate::dimred::DimredError::NonNumeric { .. }))
        ));
    }

    #[test]
    fn refuses_non_empty_output() {
        let dir = tempfile::tempdir().unwrap();
        let config = fixture(dir.path());
        let out = dir.path().join("out");
        std::fs::create_dir_all(&out).unwrap();
        std::fs::write(out.join("keep.txt"), "x").unwrap();
        assert!(matches!(ingest(&config, &out), Err(IngestError::Config(_))));
    }
}
