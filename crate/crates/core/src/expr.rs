//! Parser for the polynomial expression grammar used by job files and
//! fixtures: integer coefficients, declared variables, and `+ - * ^`, as in
//! `Y^3 - X*Z`. Fails with a column-precise diagnostic; nothing is guessed.

use crate::field::FieldSpec;
use crate::monomial::Monomial;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {col}: {msg}")]
pub struct ParseError {
    pub col: usize,
    pub msg: String,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { col: self.pos + 1, msg: msg.into() }
    }

    fn next_tok(&mut self) -> Result<(usize, Tok), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos == self.src.len() {
            return Ok((start, Tok::End));
        }
        let c = self.src[self.pos];
        self.pos += 1;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'0'..=b'9' => {
                let mut n: i64 = (c - b'0') as i64;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add((self.src[self.pos] - b'0') as i64))
                        .ok_or_else(|| self.error("integer literal overflows i64"))?;
                    self.pos += 1;
                }
                Tok::Int(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut name = String::new();
                name.push(c as char);
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    name.push(self.src[self.pos] as char);
                    self.pos += 1;
                }
                Tok::Ident(name)
            }
            other => {
                self.pos -= 1;
                return Err(self.error(format!("unexpected character {:?}", other as char)));
            }
        };
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: (usize, Tok),
    vars: &'a [String],
    field: FieldSpec,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(usize, Tok), ParseError> {
        let tok = std::mem::replace(&mut self.look, (0, Tok::End));
        self.look = self.lexer.next_tok()?;
        Ok(tok)
    }

    fn err_at(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { col: col + 1, msg: msg.into() }
    }

    // expr := ['-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut negate = false;
        if self.look.1 == Tok::Minus {
            self.bump()?;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.look.1 {
                Tok::Plus => {
                    self.bump()?;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.look.1 == Tok::Star {
            self.bump()?;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    // factor := integer | variable ['^' nat]
    fn factor(&mut self) -> Result<Poly, ParseError> {
        let (col, tok) = self.bump()?;
        match tok {
            Tok::Int(n) => Ok(Poly::constant(self.vars.len(), self.field.from_i64(n))),
            Tok::Ident(name) => {
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| self.err_at(col, format!("unknown variable `{name}`")))?;
                let mut exp: u32 = 1;
                if self.look.1 == Tok::Caret {
                    self.bump()?;
                    let (ecol, etok) = self.bump()?;
                    match etok {
                        Tok::Int(n) if n >= 0 && n <= u32::MAX as i64 => exp = n as u32,
                        _ => return Err(self.err_at(ecol, "expected nonnegative exponent")),
                    }
                }
                let mut m = Monomial::one(self.vars.len());
                m.0[idx] = exp;
                Ok(Poly::monomial(m, self.field.one()))
            }
            other => Err(self.err_at(col, format!("expected coefficient or variable, found {other:?}"))),
        }
    }
}

/// Parse one polynomial over the declared variables.
pub fn parse_poly(src: &str, vars: &[String], field: FieldSpec) -> Result<Poly, ParseError> {
    let mut lexer = Lexer::new(src);
    let look = lexer.next_tok()?;
    let mut p = Parser { lexer, look, vars, field };
    let poly = p.expr()?;
    let (col, tok) = p.bump()?;
    if tok != Tok::End {
        return Err(p.err_at(col, format!("trailing input {tok:?}")));
    }
    Ok(poly)
}
