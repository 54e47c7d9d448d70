use super::{CmpOp, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    And,
    Or,
    Op(CmpOp),
    Str(String),
    Word(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Character offset of the token's first character.
    pub pos: usize,
    /// Source text of the token, for error messages.
    pub text: String,
}

impl Token {
    pub fn word(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Word(w) => Some(w),
            _ => None,
        }
    }
}

/// Characters that end a bare word.
pub(crate) fn is_reserved(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '"' | '=' | '!' | '<' | '>' | '~')
}

/// Splits query text into tokens.
///
/// `AND` and `OR` are keywords only in upper case and only as whole words,
/// so `ANDb` is an ordinary bare word. Quoted strings accept `\"` and `\\`;
/// any other backslash is kept as is.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '(' => {
                i += 1;
                TokenKind::LParen
            }
            ')' => {
                i += 1;
                TokenKind::RParen
            }
            '"' => {
                i += 1;
                let mut value = String::new();
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(ParseError {
                                position: start,
                                expected: "closing quote".into(),
                                found: "unterminated string".into(),
                            })
                        }
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') if matches!(chars.get(i + 1), Some('"' | '\\')) => {
                            value.push(chars[i + 1]);
                            i += 2;
                        }
                        Some(&ch) => {
                            value.push(ch);
                            i += 1;
                        }
                    }
                }
                TokenKind::Str(value)
            }
            _ if is_reserved(c) => {
                let op = CmpOp::ALL
                    .iter()
                    .filter(|op| {
                        let sym: Vec<char> = op.symbol().chars().collect();
                        chars[i..].starts_with(&sym)
                    })
                    .max_by_key(|op| op.symbol().len());
                match op {
                    Some(&op) => {
                        i += op.symbol().chars().count();
                        TokenKind::Op(op)
                    }
                    None => {
                        return Err(ParseError {
                            position: start,
                            expected: "operator".into(),
                            found: c.to_string(),
                        })
                    }
                }
            }
            _ => {
                while i < chars.len() && !is_reserved(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "AND" => TokenKind::And,
                    "OR" => TokenKind::Or,
                    _ => TokenKind::Word(word),
                }
            }
        };
        tokens.push(Token {
            kind,
            pos: start,
            text: chars[start..i].iter().collect(),
        });
    }
    Ok(tokens)
}
