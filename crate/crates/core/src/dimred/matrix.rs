use std::io::Read;
use std::path::Path;

use super::DimredError;
use crate::model::{read_f32_le, ModelError};

/// Dense row-major N×D matrix; row `i` is object `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, DimredError> {
        if cols == 0 {
            return Err(DimredError::Input("embedding matrix needs at least one column".into()));
        }
        if data.len() != rows * cols {
            return Err(DimredError::Input(format!(
                "{} values do not form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(DimredError::Input(format!(
                "non-finite value at row {}, column {}",
                pos / cols,
                pos % cols
            )));
        }
        Ok(EmbeddingMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DimredError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(DimredError::Input("rows have unequal lengths".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// CSV of reals. A first row that does not parse as numbers is taken as
    /// a header and skipped.
    pub fn from_csv(reader: impl Read) -> Result<Self, DimredError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| DimredError::Input(e.to_string()))?;
            let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(_) => {
                    return Err(DimredError::Input(format!(
                        "row {i} contains a non-numeric value"
                    )))
                }
            }
        }
        Self::from_rows(&rows)
    }

    /// Raw float32 LE with a declared `(rows, cols)` shape.
    pub fn from_f32_file(path: &Path, shape: (usize, usize)) -> Result<Self, DimredError> {
        let values = read_f32_le(path)?;
        if values.len() != shape.0 * shape.1 {
            return Err(DimredError::Input(format!(
                "{} holds {} values, shape {}x{} needs {}",
                path.display(),
                values.len(),
                shape.0,
                shape.1,
                shape.0 * shape.1
            )));
        }
        Self::new(shape.0, shape.1, values.into_iter().map(f64::from).collect())
    }

    /// CSV when the extension is `csv`/`txt`, raw float32 LE otherwise.
    pub fn load(path: &Path, shape: Option<(usize, usize)>) -> Result<Self, DimredError> {
        if is_text(path) {
            let file = std::fs::File::open(path).map_err(|e| ModelError::io(path, e))?;
            Self::from_csv(std::io::BufReader::new(file))
        } else {
            let shape = shape.ok_or_else(|| {
                DimredError::Input(format!(
                    "{}: binary embeddings need a declared shape",
                    path.display()
                ))
            })?;
            Self::from_f32_file(path, shape)
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let data = indices.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        EmbeddingMatrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// True when every row equals the first.
    pub fn is_constant(&self) -> bool {
        let first = self.row(0);
        (1..self.rows).all(|i| self.row(i) == first)
    }

    /// Squared Euclidean distance between rows `i` and `j`.
    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

pub(crate) fn is_text(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("csv" | "txt")
    )
}
