//! Random tables and query strings.

use rand::seq::IndexedRandom;
use rand::Rng;

pub const FIELDS: [&str; 4] = ["style", "year", "first name", "note"];

const CELLS: &[&str] = &[
    "", "Cubism", "cubism", "Dada", " Dada ", "Pop Art", "1899", "1900", "1920", "-3.5", "+7",
    "1e3", ".5", "n/a", "inf", "AND", "say \"hi\"", "back\\slash", "Ümlaut", "x (y)", "10", "2",
];

const LITERALS: &[&str] = &[
    "", "Cubism", "cubism", "CUB", "Dada", "da", "Pop Art", "1900", "1899.5", "2", "10", "-4",
    "1e3", "0.5", "n/a", "AND", "OR", "hi", "\"hi\"", "\\", "ü", "(y)", " ",
];

/// Column-oriented table of `rows` rows over [`FIELDS`].
pub fn table(rng: &mut impl Rng, rows: usize) -> Vec<(String, Vec<String>)> {
    FIELDS
        .iter()
        .map(|f| {
            let cells = (0..rows)
                .map(|_| CELLS.choose(rng).unwrap().to_string())
                .collect();
            (f.to_string(), cells)
        })
        .collect()
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn bare_ok(s: &str) -> bool {
    !s.is_empty()
        && s != "AND"
        && s != "OR"
        && !s.chars().any(|c| c.is_whitespace() || "()\"=!<>~".contains(c))
}

fn token(rng: &mut impl Rng, s: &str) -> String {
    if bare_ok(s) && rng.random_bool(0.5) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn space(rng: &mut impl Rng) -> &'static str {
    [" ", " ", "  ", "\t"].choose(rng).unwrap()
}

fn comparison(rng: &mut impl Rng) -> String {
    let field = FIELDS.choose(rng).unwrap();
    let op = ["==", "!=", ">", ">=", "<", "<=", "~"].choose(rng).unwrap();
    let lit = LITERALS.choose(rng).unwrap();
    let (a, b) = if rng.random_bool(0.2) {
        ("", "")
    } else {
        (space(rng), space(rng))
    };
    format!("{}{a}{op}{b}{}", token(rng, field), token(rng, lit))
}

/// A syntactically valid query of nesting depth at most `depth`.
pub fn query(rng: &mut impl Rng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.35) {
        return comparison(rng);
    }
    let n = rng.random_range(2..=3);
    let kw = if rng.random_bool(0.5) { "AND" } else { "OR" };
    let parts: Vec<String> = (0..n)
        .map(|_| {
            let inner = query(rng, depth - 1);
            if rng.random_bool(0.5) {
                format!("({inner})")
            } else {
                inner
            }
        })
        .collect();
    parts.join(&format!(" {kw} "))
}
