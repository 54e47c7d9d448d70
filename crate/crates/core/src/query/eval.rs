use super::{parse_query, CmpOp, ParseError, Query, QueryAst};
use crate::filters::SelectionMask;
use crate::model::MetadataTable;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("query syntax error {0}")]
    Parse(#[from] ParseError),
    #[error("unknown field(s) {}; valid fields: {}", unknown.join(", "), valid.join(", "))]
    UnknownFields {
        unknown: Vec<String>,
        valid: Vec<String>,
    },
}

/// Fields used by `ast` that are not in `known`, in left-to-right order.
/// A field used twice is reported twice.
pub fn validate_fields(ast: &QueryAst, known: &[impl AsRef<str>]) -> Vec<String> {
    ast.fields()
        .into_iter()
        .filter(|f| !known.iter().any(|k| k.as_ref() == *f))
        .map(str::to_string)
        .collect()
}

fn number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Applies one comparison to a raw cell value.
pub fn matches_row(value: &str, op: CmpOp, literal: &str) -> bool {
    match op {
        CmpOp::Eq => value.trim() == literal.trim(),
        CmpOp::Ne => !value.trim().is_empty() && value.trim() != literal.trim(),
        CmpOp::Contains => value.to_lowercase().contains(&literal.to_lowercase()),
        CmpOp::Gt | CmpOp::Ge | CmpOp::Lt | CmpOp::Le => {
            let (Some(a), Some(b)) = (number(value), number(literal)) else {
                return false;
            };
            match op {
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
                CmpOp::Lt => a < b,
                _ => a <= b,
            }
        }
    }
}

/// AST with field names resolved to columns.
enum Compiled<'t> {
    Or(Vec<Compiled<'t>>),
    And(Vec<Compiled<'t>>),
    Cmp {
        column: &'t [String],
        op: CmpOp,
        literal: &'t str,
    },
}

impl<'t> Compiled<'t> {
    fn new(ast: &'t QueryAst, table: &'t MetadataTable) -> Self {
        match ast {
            QueryAst::Or(c) => Compiled::Or(c.iter().map(|c| Compiled::new(c, table)).collect()),
            QueryAst::And(c) => Compiled::And(c.iter().map(|c| Compiled::new(c, table)).collect()),
            QueryAst::Cmp { field, op, literal } => Compiled::Cmp {
                column: table.column(field).expect("fields validated"),
                op: *op,
                literal,
            },
        }
    }

    fn test(&self, row: usize) -> bool {
        match self {
            Compiled::Or(c) => c.iter().any(|c| c.test(row)),
            Compiled::And(c) => c.iter().all(|c| c.test(row)),
            Compiled::Cmp {
                column,
                op,
                literal,
            } => matches_row(&column[row], *op, literal),
        }
    }
}

/// Evaluates a query over every row of `table`.
pub fn evaluate(query: &Query, table: &MetadataTable) -> Result<SelectionMask, QueryError> {
    let ast = match query {
        Query::All => return Ok(SelectionMask::full(table.len())),
        Query::Filter(ast) => ast,
    };
    let unknown = validate_fields(ast, table.fields());
    if !unknown.is_empty() {
        return Err(QueryError::UnknownFields {
            unknown,
            valid: table.fields().to_vec(),
        });
    }
    let compiled = Compiled::new(ast, table);
    Ok(SelectionMask::from_bools((0..table.len()).map(|i| compiled.test(i))))
}

/// Parses and evaluates `text`.
pub fn run_query(text: &str, table: &MetadataTable) -> Result<SelectionMask, QueryError> {
    evaluate(&parse_query(text)?, table)
}
