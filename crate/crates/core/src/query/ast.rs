use std::fmt;

use serde::{Deserialize, Serialize};

use super::lexer::is_reserved;

/// Comparison operators. The lexer recognizes exactly the symbols listed
/// in [`CmpOp::ALL`]; adding a variant there registers it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
    Contains,
}

impl CmpOp {
    pub const ALL: [CmpOp; 7] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Gt,
        CmpOp::Ge,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Contains,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Contains => "~",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueryAst {
    Or(Vec<QueryAst>),
    And(Vec<QueryAst>),
    Cmp {
        field: String,
        op: CmpOp,
        literal: String,
    },
}

/// A parsed query. Empty input matches everything and has no AST.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    All,
    Filter(QueryAst),
}

impl QueryAst {
    pub fn cmp(field: impl Into<String>, op: CmpOp, literal: impl Into<String>) -> Self {
        QueryAst::Cmp {
            field: field.into(),
            op,
            literal: literal.into(),
        }
    }

    /// Field names in left-to-right order.
    pub fn fields(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |node| {
            if let QueryAst::Cmp { field, .. } = node {
                out.push(field.as_str());
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a QueryAst)) {
        f(self);
        if let QueryAst::Or(children) | QueryAst::And(children) = self {
            for c in children {
                c.walk(f);
            }
        }
    }
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        if c == '"' || c == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("\"")
}

fn is_bare(s: &str) -> bool {
    !s.is_empty() && s != "AND" && s != "OR" && !s.chars().any(is_reserved)
}

/// Prints a query that parses back to the same tree. Nested `AND`/`OR`
/// groups are always parenthesized and literals always quoted.
impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAst::Cmp { field, op, literal } => {
                if is_bare(field) {
                    f.write_str(field)?;
                } else {
                    write_quoted(f, field)?;
                }
                write!(f, " {} ", op.symbol())?;
                write_quoted(f, literal)
            }
            QueryAst::Or(children) | QueryAst::And(children) => {
                let sep = if matches!(self, QueryAst::Or(_)) { " OR " } else { " AND " };
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    if matches!(c, QueryAst::Cmp { .. }) {
                        write!(f, "{c}")?;
                    } else {
                        write!(f, "({c})")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::All => Ok(()),
            Query::Filter(ast) => ast.fmt(f),
        }
    }
}

/// Query equivalent to picking `values` from a categorical drop-down:
/// one `==` per value joined by `OR`. No values means no constraint.
pub fn selection_query(field: &str, values: &[impl AsRef<str>]) -> Query {
    let mut cmps: Vec<QueryAst> = values
        .iter()
        .map(|v| QueryAst::cmp(field, CmpOp::Eq, v.as_ref()))
        .collect();
    match cmps.len() {
        0 => Query::All,
        1 => Query::Filter(cmps.remove(0)),
        _ => Query::Filter(QueryAst::Or(cmps)),
    }
}
