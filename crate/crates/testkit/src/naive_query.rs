//! A second, deliberately simple implementation of the query language.
//!
//! Nodes evaluate to whole boolean columns at once; there is no AST and no
//! short-circuiting, and the tokenizer is written separately.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    And,
    Or,
    Op(&'static str),
    Text(String),
}

const OPS: [&str; 7] = ["==", "!=", ">=", "<=", ">", "<", "~"];

fn special(c: char) -> bool {
    c.is_whitespace() || "()\"=!<>~".contains(c)
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, usize> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let start = i;
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push((start, Tok::Open));
            i += 1;
        } else if c == ')' {
            out.push((start, Tok::Close));
            i += 1;
        } else if c == '"' {
            let mut text = String::new();
            i += 1;
            loop {
                if i >= cs.len() {
                    return Err(start);
                }
                if cs[i] == '"' {
                    i += 1;
                    break;
                }
                if cs[i] == '\\' && i + 1 < cs.len() && (cs[i + 1] == '"' || cs[i + 1] == '\\') {
                    text.push(cs[i + 1]);
                    i += 2;
                } else {
                    text.push(cs[i]);
                    i += 1;
                }
            }
            out.push((start, Tok::Text(text)));
        } else if special(c) {
            let two: String = cs[i..(i + 2).min(cs.len())].iter().collect();
            let op = OPS
                .iter()
                .find(|o| o.len() == 2 && two == **o)
                .or_else(|| OPS.iter().find(|o| o.len() == 1 && o.starts_with(c)));
            match op {
                Some(op) => {
                    out.push((start, Tok::Op(op)));
                    i += op.len();
                }
                None => return Err(start),
            }
        } else {
            while i < cs.len() && !special(cs[i]) {
                i += 1;
            }
            let w: String = cs[start..i].iter().collect();
            out.push((
                start,
                match w.as_str() {
                    "AND" => Tok::And,
                    "OR" => Tok::Or,
                    _ => Tok::Text(w),
                },
            ));
        }
    }
    Ok(out)
}

fn is_decimal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let f = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - f;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let e = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == e {
            return false;
        }
    }
    i == b.len()
}

fn num(s: &str) -> Option<f64> {
    let t = s.trim();
    if !is_decimal(t) {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// One comparison on one cell.
pub fn compare(cell: &str, op: &str, lit: &str) -> bool {
    match op {
        "==" => cell.trim() == lit.trim(),
        "!=" => !cell.trim().is_empty() && cell.trim() != lit.trim(),
        "~" => cell.to_lowercase().contains(&lit.to_lowercase()),
        _ => match (num(cell), num(lit)) {
            (Some(a), Some(b)) => match op {
                ">" => a > b,
                ">=" => a >= b,
                "<" => a < b,
                "<=" => a <= b,
                _ => unreachable!(),
            },
            _ => false,
        },
    }
}

struct P<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    cols: &'a [(String, Vec<String>)],
    rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NaiveError {
    /// Character offset of a syntax error.
    Syntax(usize),
    UnknownField(String),
}

impl P<'_> {
    fn next_is(&self, t: &Tok) -> bool {
        self.toks.get(self.at).map(|x| &x.1) == Some(t)
    }

    fn pos(&self, end: usize) -> usize {
        self.toks.get(self.at).map_or(end, |x| x.0)
    }

    fn disjunction(&mut self, end: usize) -> Result<Vec<bool>, NaiveError> {
        let mut acc = self.conjunction(end)?;
        while self.next_is(&Tok::Or) {
            self.at += 1;
            let rhs = self.conjunction(end)?;
            acc.iter_mut().zip(rhs).for_each(|(a, b)| *a = *a || b);
        }
        Ok(acc)
    }

    fn conjunction(&mut self, end: usize) -> Result<Vec<bool>, NaiveError> {
        let mut acc = self.atom(end)?;
        while self.next_is(&Tok::And) {
            self.at += 1;
            let rhs = self.atom(end)?;
            acc.iter_mut().zip(rhs).for_each(|(a, b)| *a = *a && b);
        }
        Ok(acc)
    }

    fn atom(&mut self, end: usize) -> Result<Vec<bool>, NaiveError> {
        if self.next_is(&Tok::Open) {
            self.at += 1;
            let v = self.disjunction(end)?;
            if !self.next_is(&Tok::Close) {
                return Err(NaiveError::Syntax(self.pos(end)));
            }
            self.at += 1;
            return Ok(v);
        }
        let field = match self.toks.get(self.at) {
            Some((_, Tok::Text(f))) => f.clone(),
            _ => return Err(NaiveError::Syntax(self.pos(end))),
        };
        self.at += 1;
        let op = match self.toks.get(self.at) {
            Some((_, Tok::Op(o))) => *o,
            _ => return Err(NaiveError::Syntax(self.pos(end))),
        };
        self.at += 1;
        let lit = match self.toks.get(self.at) {
            Some((_, Tok::Text(l))) => l.clone(),
            _ => return Err(NaiveError::Syntax(self.pos(end))),
        };
        self.at += 1;
        let col = self
            .cols
            .iter()
            .find(|(name, _)| *name == field)
            .ok_or(NaiveError::UnknownField(field))?;
        Ok((0..self.rows).map(|r| compare(&col.1[r], op, &lit)).collect())
    }
}

/// Evaluates `query` over a column-oriented table with `rows` rows.
pub fn run(query: &str, cols: &[(String, Vec<String>)], rows: usize) -> Result<Vec<bool>, NaiveError> {
    let end = query.chars().count();
    let toks = lex(query).map_err(NaiveError::Syntax)?;
    if toks.is_empty() {
        return Ok(vec![true; rows]);
    }
    let mut p = P {
        toks,
        at: 0,
        cols,
        rows,
    };
    let v = p.disjunction(end)?;
    if p.at < p.toks.len() {
        return Err(NaiveError::Syntax(p.pos(end)));
    }
    Ok(v)
}
