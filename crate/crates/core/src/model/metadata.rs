use std::io::{Read, Write};
use std::path::Path;

use super::ModelError;

/// Column-oriented metadata table; row `i` describes object `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MetadataTable {
    fields: Vec<String>,
    columns: Vec<Vec<String>>,
    rows: usize,
}

/// One object's metadata and dimension values.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub index: usize,
    pub metadata: Vec<(String, String)>,
    /// One entry per bundle dimension, `None` when missing.
    pub dimension_values: Vec<Option<f32>>,
}

impl MetadataTable {
    pub fn new(fields: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self, ModelError> {
        let mut columns = vec![Vec::with_capacity(rows.len()); fields.len()];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != fields.len() {
                return Err(ModelError::Input(format!(
                    "metadata row {i} has {} values, expected {}",
                    row.len(),
                    fields.len()
                )));
            }
            for (col, value) in columns.iter_mut().zip(row) {
                col.push(value.clone());
            }
        }
        Ok(MetadataTable {
            fields,
            columns,
            rows: rows.len(),
        })
    }

    pub fn from_columns(fields: Vec<String>, columns: Vec<Vec<String>>) -> Result<Self, ModelError> {
        if fields.len() != columns.len() {
            return Err(ModelError::Input("field and column counts differ".into()));
        }
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(ModelError::Input("metadata columns have unequal lengths".into()));
        }
        Ok(MetadataTable {
            fields,
            columns,
            rows,
        })
    }

    /// Parses RFC-4180 CSV with a header row.
    pub fn from_reader(reader: impl Read) -> Result<Self, csv::Error> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let fields: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut columns = vec![Vec::new(); fields.len()];
        let mut rows = 0;
        for record in rdr.records() {
            let record = record?;
            for (col, value) in columns.iter_mut().zip(record.iter()) {
                col.push(value.to_string());
            }
            rows += 1;
        }
        Ok(MetadataTable {
            fields,
            columns,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self, ModelError> {
        let file = std::fs::File::open(path).map_err(|e| ModelError::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file)).map_err(|source| ModelError::Csv {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn write_to(&self, writer: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(writer);
        w.write_record(&self.fields)?;
        for i in 0..self.rows {
            w.write_record(self.columns.iter().map(|c| c[i].as_str()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), ModelError> {
        let file = std::fs::File::create(path).map_err(|e| ModelError::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|source| ModelError::Csv {
                path: path.to_path_buf(),
                source,
            })
    }

    pub fn fields(&self) -> &[String] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn column(&self, field: &str) -> Option<&[String]> {
        self.fields
            .iter()
            .position(|f| f == field)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.fields
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(Vec::as_slice))
    }

    pub fn row(&self, index: usize) -> impl Iterator<Item = (&str, &str)> {
        self.fields
            .iter()
            .zip(&self.columns)
            .map(move |(f, c)| (f.as_str(), c[index].as_str()))
    }

    /// Keeps rows in the order given by `indices`.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        MetadataTable {
            fields: self.fields.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| indices.iter().map(|&i| c[i].clone()).collect())
                .collect(),
            rows: indices.len(),
        }
    }

    pub fn push_column(&mut self, field: String, values: Vec<String>) -> Result<(), ModelError> {
        if values.len() != self.rows && !(self.fields.is_empty() && self.rows == 0) {
            return Err(ModelError::Input(format!(
                "column `{field}` has {} values, expected {}",
                values.len(),
                self.rows
            )));
        }
        self.rows = values.len();
        self.fields.push(field);
        self.columns.push(values);
        Ok(())
    }

    pub fn record(&self, index: usize) -> ObjectRecord {
        ObjectRecord {
            index,
            metadata: self
                .row(index)
                .map(|(f, v)| (f.to_string(), v.to_string()))
                .collect(),
            dimension_values: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_preserves_values() {
        let text = "name,note\na,\"x, y\"\nb,\"say \"\"hi\"\"\"\nc,\n";
        let t = MetadataTable::from_reader(text.as_bytes()).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.column("note").unwrap(), ["x, y", "say \"hi\"", ""]);
        let mut out = Vec::new();
        t.write_to(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn select_rows_keeps_given_order() {
        let t = MetadataTable::new(
            vec!["k".into()],
            vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]],
        )
        .unwrap();
        let s = t.select_rows(&[2, 0]);
        assert_eq!(s.column("k").unwrap(), ["c", "a"]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = MetadataTable::new(vec!["a".into(), "b".into()], vec![vec!["1".into()]]);
        assert!(err.is_err());
    }
}
