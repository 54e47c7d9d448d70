//! Slider ranges and the query text combined into one mask.

use serde::{Deserialize, Serialize};

use crate::filters::{apply_range_filters, FilterError, RangeFilter, SelectionMask};
use crate::model::{Bundle, MetadataTable};
use crate::query::{run_query, QueryError};

/// Everything that decides which objects pass.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterState {
    #[serde(default)]
    pub ranges: Vec<RangeFilter>,
    #[serde(default)]
    pub query: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Range mask AND query mask, or the range mask alone when the query
    /// failed.
    pub mask: SelectionMask,
    pub range_mask: SelectionMask,
    pub query_error: Option<QueryError>,
}

/// ANDs the query's mask onto an already evaluated range mask.
pub fn combine(range_mask: SelectionMask, query: &str, metadata: &MetadataTable) -> Selection {
    match run_query(query, metadata) {
        Ok(q) => Selection {
            mask: range_mask.and(&q),
            range_mask,
            query_error: None,
        },
        Err(e) => Selection {
            mask: range_mask.clone(),
            range_mask,
            query_error: Some(e),
        },
    }
}

/// Evaluates `state` against `bundle`. Range errors are fatal; a query
/// error is reported in the result.
pub fn select(bundle: &Bundle, state: &FilterState) -> Result<Selection, FilterError> {
    let ranges = apply_range_filters(bundle.object_count(), &bundle.columns, &state.ranges)?;
    Ok(combine(ranges, &state.query, &bundle.metadata))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_errors_keep_the_range_mask() {
        let meta = MetadataTable::new(
            vec!["k".into()],
            vec![vec!["a".into()], vec!["b".into()], vec!["a".into()]],
        )
        .unwrap();
        let ranges = SelectionMask::from_bools([true, true, false]);
        let ok = combine(ranges.clone(), "k == a", &meta);
        assert_eq!(ok.mask.to_bools(), [true, false, false]);
        let bad = combine(ranges.clone(), "k ==", &meta);
        assert_eq!(bad.mask, ranges);
        assert!(matches!(bad.query_error, Some(QueryError::Parse(_))));
        let unknown = combine(ranges.clone(), "z == 1", &meta);
        assert!(matches!(unknown.query_error, Some(QueryError::UnknownFields { .. })));
    }
}
