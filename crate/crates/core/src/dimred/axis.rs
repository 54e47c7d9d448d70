use super::DimredError;
use crate::model::{normalize_projection, DimensionColumn, MetadataTable, ProjectionTable};

#[derive(Debug, Clone, PartialEq)]
pub struct AxisProjection {
    pub table: ProjectionTable,
    /// Objects missing either value; they sit at that axis' domain minimum.
    pub missing: Vec<usize>,
}

/// Resolves `name` to numeric values: a dimension column first, then a
/// metadata column. Empty metadata cells count as missing; any other
/// unparseable cell makes the column non-numeric.
pub fn numeric_column(
    name: &str,
    columns: &[DimensionColumn],
    metadata: &MetadataTable,
) -> Result<Vec<Option<f64>>, DimredError> {
    if let Some(col) = columns.iter().find(|c| c.name == name) {
        return Ok((0..col.len()).map(|i| col.value(i).map(f64::from)).collect());
    }
    let cells = metadata
        .column(name)
        .ok_or_else(|| DimredError::UnknownColumn(name.to_string()))?;
    cells
        .iter()
        .enumerate()
        .map(|(row, cell)| {
            let t = cell.trim();
            if t.is_empty() {
                return Ok(None);
            }
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => Err(DimredError::NonNumeric {
                    column: name.to_string(),
                    row,
                    value: cell.clone(),
                }),
            }
        })
        .collect()
}

/// Pairs two numeric columns into a normalized 2D projection.
pub fn axis_projection(
    name: &str,
    x: &[Option<f64>],
    y: &[Option<f64>],
) -> Result<AxisProjection, DimredError> {
    if x.len() != y.len() {
        return Err(DimredError::RowCount {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.is_empty() {
        return Err(DimredError::Input("axis projection over zero objects".into()));
    }
    let floor = |col: &[Option<f64>]| col.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let (x_min, y_min) = (floor(x), floor(y));
    let fill = |v: Option<f64>, min: f64| v.unwrap_or(if min.is_finite() { min } else { 0.0 });

    let raw: Vec<[f64; 2]> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| [fill(a, x_min), fill(b, y_min)])
        .collect();
    let missing = x
        .iter()
        .zip(y)
        .enumerate()
        .filter_map(|(i, (a, b))| (a.is_none() || b.is_none()).then_some(i))
        .collect();
    let coords = normalize_projection(&raw)?;
    Ok(AxisProjection {
        table: ProjectionTable::from_xy(name, &coords),
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().copied().map(Some).collect()
    }

    #[test]
    fn year_against_score() {
        let a = axis_projection("t", &some(&[1900.0, 1950.0, 2000.0]), &some(&[0.0, 1.0, 2.0])).unwrap();
        let expect = normalize_projection(&[[1900.0, 0.0], [1950.0, 1.0], [2000.0, 2.0]]).unwrap();
        assert_eq!(a.table, ProjectionTable::from_xy("t", &expect));
        assert!(a.missing.is_empty());
    }

    #[test]
    fn same_column_lies_on_diagonal() {
        let v = some(&[3.0, -1.0, 7.5, 2.0]);
        let a = axis_projection("d", &v, &v).unwrap();
        for i in 0..4 {
            let [x, y] = a.table.xy(i);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn missing_value_sits_at_left_edge() {
        let x = vec![Some(1900.0), None, Some(2000.0)];
        let a = axis_projection("m", &x, &some(&[0.0, 1.0, 2.0])).unwrap();
        assert_eq!(a.missing, vec![1]);
        assert_eq!(a.table.xy(1)[0], -1.0);
    }

    #[test]
    fn metadata_columns_parse_or_fail() {
        let meta = MetadataTable::new(
            vec!["year".into(), "style".into()],
            vec![
                vec!["1900".into(), "Dada".into()],
                vec!["".into(), "Cubism".into()],
            ],
        )
        .unwrap();
        assert_eq!(numeric_column("year", &[], &meta).unwrap(), vec![Some(1900.0), None]);
        assert!(matches!(
            numeric_column("style", &[], &meta),
            Err(DimredError::NonNumeric { .. })
        ));
        assert!(matches!(
            numeric_column("nope", &[], &meta),
            Err(DimredError::UnknownColumn(_))
        ));
    }
}
