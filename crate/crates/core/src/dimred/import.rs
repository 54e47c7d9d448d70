use std::path::Path;

use super::matrix::is_text;
use super::{DimredError, EmbeddingMatrix};
use crate::model::{normalize_table_xy, ProjectionTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportFormat {
    Csv,
    /// float32 LE, row-major, with the declared column count (2 or 3).
    F32 { dims: usize },
}

impl ImportFormat {
    pub fn guess(path: &Path, dims: Option<usize>) -> Result<Self, DimredError> {
        if is_text(path) {
            Ok(ImportFormat::Csv)
        } else {
            dims.map(|dims| ImportFormat::F32 { dims }).ok_or_else(|| {
                DimredError::Input(format!(
                    "{}: binary projections need a declared column count",
                    path.display()
                ))
            })
        }
    }
}

/// Loads an externally computed projection with `n` rows of 2 or 3 values.
/// x and y are normalized; a third column is kept as depth.
pub fn import_projection(
    path: &Path,
    name: &str,
    n: usize,
    format: ImportFormat,
) -> Result<ProjectionTable, DimredError> {
    let m = match format {
        ImportFormat::Csv => {
            let file = std::fs::File::open(path).map_err(|e| crate::model::ModelError::io(path, e))?;
            EmbeddingMatrix::from_csv(std::io::BufReader::new(file))?
        }
        ImportFormat::F32 { dims } => {
            let values = crate::model::read_f32_le(path)?;
            if dims == 0 || values.len() % dims != 0 {
                return Err(DimredError::Input(format!(
                    "{} values do not form rows of {dims}",
                    values.len()
                )));
            }
            EmbeddingMatrix::new(values.len() / dims, dims, values.into_iter().map(f64::from).collect())?
        }
    };
    if m.rows() != n {
        return Err(DimredError::RowCount {
            expected: n,
            found: m.rows(),
        });
    }
    let dims = m.cols();
    if dims != 2 && dims != 3 {
        return Err(DimredError::Input(format!(
            "projection files need 2 or 3 columns, found {dims}"
        )));
    }
    let mut coords: Vec<f32> = m.as_slice().iter().map(|&v| v as f32).collect();
    normalize_table_xy(&mut coords, dims)?;
    Ok(ProjectionTable::new(name, dims, coords)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let raw = vec![[0.3, 9.0], [4.0, -2.5], [1.7, 1.1], [-6.0, 0.25]];
        let norm = crate::model::normalize_projection(&raw).unwrap();
        let table = ProjectionTable::from_xy("p", &norm);
        let desc = table.write(dir.path()).unwrap();
        let back = import_projection(&dir.path().join(&desc.file), "p", 4, ImportFormat::F32 { dims: 2 }).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn csv_with_depth_keeps_z() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("umap.csv");
        std::fs::write(&path, "x,y,z\n0,0,0.25\n10,5,0.75\n").unwrap();
        let t = import_projection(&path, "umap", 2, ImportFormat::guess(&path, None).unwrap()).unwrap();
        assert_eq!(t.dims(), 3);
        assert_eq!(t.coords(), [-1.0, -0.5, 0.25, 1.0, 0.5, 0.75]);
    }

    #[test]
    fn row_count_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "1,2\n3,4\n").unwrap();
        let err = import_projection(&path, "p", 3, ImportFormat::Csv).unwrap_err();
        assert!(matches!(err, DimredError::RowCount { expected: 3, found: 2 }));
    }

    #[test]
    fn wrong_width_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "1,2,3,4\n5,6,7,8\n").unwrap();
        assert!(import_projection(&path, "p", 2, ImportFormat::Csv).is_err());
    }
}
