//! Recursive-descent parser.
//!
//! ```text
//! expr  := term { ("+" | "-") term }
//! term  := unary { ("*" | "/") unary }
//! unary := "-" unary | power
//! power := base [ "^" unary ]
//! base  := NUMBER | IDENT | FNAME "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-x` is `2^(-x)`.

use super::{Expr, Func};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {position}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at {position}")]
    UnknownIdentifier { name: String, position: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("`{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let tok = match c {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' | b'.' => {
                let len = number_len(&bytes[pos..]);
                let literal = &text[pos..pos + len];
                let value = literal.parse::<f64>().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: vec!["number"],
                    found: format!("`{literal}`"),
                })?;
                pos += len;
                out.push((start, Token::Number(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let len = bytes[pos..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                pos += len;
                out.push((start, Token::Ident(text[start..pos].to_string())));
                continue;
            }
            _ => {
                let ch = text[pos..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    position: start,
                    expected: vec!["number", "identifier", "operator", "parenthesis"],
                    found: format!("`{ch}`"),
                });
            }
        };
        pos += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

// Length of a decimal literal: digits [. digits] [(e|E) [+|-] digits].
fn number_len(s: &[u8]) -> usize {
    let digits = |from: usize| s[from..].iter().take_while(|b| b.is_ascii_digit()).count();
    let mut n = digits(0);
    if s.get(n) == Some(&b'.') {
        n += 1 + digits(n + 1);
    }
    if matches!(s.get(n), Some(b'e' | b'E')) {
        let mut m = n + 1;
        if matches!(s.get(m), Some(b'+' | b'-')) {
            m += 1;
        }
        let exp_digits = digits(m);
        if exp_digits > 0 {
            n = m + exp_digits;
        }
    }
    n
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].1
    }

    fn position(&self) -> usize {
        self.tokens[self.cursor].0
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.cursor].1.clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        tok
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            position: self.position(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Token, label: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![label]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let position = self.position();
        match self.peek().clone() {
            Token::Number(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Token::Ident(name) => {
                self.bump();
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Token::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    return Ok(Expr::Apply(f, Box::new(arg)));
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(i) => Ok(Expr::Coord(i)),
                    None => Err(ParseError::UnknownIdentifier { name, position }),
                }
            }
            Token::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(vec!["number", "identifier", "function", "`(`", "`-`"])),
        }
    }
}

/// Parses `text` against the coordinate names of a chart.
pub fn parse_expr(text: &str, coord_names: &[String]) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        cursor: 0,
        coords: coord_names,
    };
    let e = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error(vec!["operator", "end of input"]));
    }
    Ok(e)
}
