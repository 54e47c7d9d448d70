use super::lexer::{tokenize, Token, TokenKind};
use super::{ParseError, Query, QueryAst};

/// Parses query text.
///
/// ```text
/// query := or?
/// or    := and ("OR" and)*
/// and   := term ("AND" term)*
/// term  := "(" or ")" | field op literal
/// ```
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let tokens = tokenize(text)?;
    parse(&tokens, text.chars().count())
}

/// Parses a token list. `end` is the character length of the source text,
/// reported as the position of errors at end of input.
pub fn parse(tokens: &[Token], end: usize) -> Result<Query, ParseError> {
    if tokens.is_empty() {
        return Ok(Query::All);
    }
    let mut p = Parser { tokens, at: 0, end };
    let ast = p.or()?;
    if let Some(t) = p.peek() {
        return Err(ParseError {
            position: t.pos,
            expected: "AND, OR or end of input".into(),
            found: t.text.clone(),
        });
    }
    Ok(Query::Filter(ast))
}

struct Parser<'a> {
    tokens: &'a [Token],
    at: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn error(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                position: t.pos,
                expected: expected.into(),
                found: t.text.clone(),
            },
            None => ParseError {
                position: self.end,
                expected: expected.into(),
                found: "end of input".into(),
            },
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<QueryAst, ParseError> {
        let mut items = vec![self.and()?];
        while self.eat(&TokenKind::Or) {
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            QueryAst::Or(items)
        })
    }

    fn and(&mut self) -> Result<QueryAst, ParseError> {
        let mut items = vec![self.term()?];
        while self.eat(&TokenKind::And) {
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            QueryAst::And(items)
        })
    }

    fn term(&mut self) -> Result<QueryAst, ParseError> {
        if self.eat(&TokenKind::LParen) {
            let inner = self.or()?;
            if !self.eat(&TokenKind::RParen) {
                return Err(self.error("')'"));
            }
            return Ok(inner);
        }
        let field = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Word(w) | TokenKind::Str(w)) => w.clone(),
            _ => return Err(self.error("field name or '('")),
        };
        self.at += 1;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Op(op)) => *op,
            _ => return Err(self.error("comparison operator")),
        };
        self.at += 1;
        let literal = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Word(w) | TokenKind::Str(w)) => w.clone(),
            _ => return Err(self.error("literal")),
        };
        self.at += 1;
        Ok(QueryAst::Cmp { field, op, literal })
    }
}
