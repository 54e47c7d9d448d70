use super::ExportError;
use crate::filters::SelectionMask;
use crate::model::MetadataTable;

/// Metadata of the objects selected by `mask`: a leading `index` column,
/// then the table's fields in order. Values are written verbatim and
/// quoted only where RFC 4180 requires it.
pub fn export_csv(table: &MetadataTable, mask: &SelectionMask) -> Result<Vec<u8>, ExportError> {
    if mask.len() != table.len() {
        return Err(ExportError::MaskLength {
            mask: mask.len(),
            objects: table.len(),
        });
    }
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    w.write_record(std::iter::once("index").chain(table.fields().iter().map(String::as_str)))?;
    let columns: Vec<&[String]> = table.columns().map(|(_, c)| c).collect();
    for i in mask.ones() {
        let index = i.to_string();
        w.write_record(
            std::iter::once(index.as_str()).chain(columns.iter().map(|c| c[i].as_str())),
        )?;
    }
    w.into_inner()
        .map_err(|e| ExportError::Malformed(e.to_string()))
}

/// A parsed export: object indices and the metadata rows that came with them.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvExport {
    pub indices: Vec<usize>,
    pub metadata: MetadataTable,
}

impl CsvExport {
    /// Mask over `n` objects with exactly the exported indices set.
    pub fn mask(&self, n: usize) -> SelectionMask {
        let mut m = SelectionMask::empty(n);
        for &i in &self.indices {
            m.set(i, true);
        }
        m
    }
}

/// Inverse of [`export_csv`].
pub fn read_csv_export(bytes: &[u8]) -> Result<CsvExport, ExportError> {
    let table = MetadataTable::from_reader(bytes)?;
    let mut fields = table.fields().to_vec();
    if fields.first().map(String::as_str) != Some("index") {
        return Err(ExportError::Malformed("first column must be `index`".into()));
    }
    let mut columns: Vec<Vec<String>> = table.columns().map(|(_, c)| c.to_vec()).collect();
    let indices = columns
        .remove(0)
        .iter()
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| ExportError::Malformed(format!("bad index {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    fields.remove(0);
    let metadata = if fields.is_empty() {
        MetadataTable::default()
    } else {
        MetadataTable::from_columns(fields, columns)
            .map_err(|e| ExportError::Malformed(e.to_string()))?
    };
    Ok(CsvExport { indices, metadata })
}
