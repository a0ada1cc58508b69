//! Polynomial expressions over `x, y` (half-plane) or `z, w` (bidisk).
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*')? unary)*        juxtaposition multiplies
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer ('/' integer)? | x | y | z | w | i | '(' expr ')'
//! ```

use num_bigint::BigInt;
use thiserror::Error;

use crate::algebra::{BiPoly, GaussianRational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
}

/// Which pair of variables an expression uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coords {
    HalfPlane,
    Disk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    /// First variable (`x` or `z`) and second (`y` or `w`).
    pub poly: BiPoly,
    pub coords: Option<Coords>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(char),
    I,
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 0);
    let mut it = src.chars().peekable();
    while let Some(c) = it.next() {
        col += 1;
        let here = (line, col);
        let tok = match c {
            '\n' => {
                line += 1;
                col = 0;
                continue;
            }
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut s = c.to_string();
                while let Some(&d) = it.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    it.next();
                    col += 1;
                }
                Tok::Num(s.parse().expect("digits"))
            }
            'x' | 'y' | 'z' | 'w' => Tok::Var(c),
            'i' => Tok::I,
            '+' | '*' | '/' | '^' => Tok::Op(c),
            '-' | '\u{2212}' => Tok::Op('-'),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(ParseError::Syntax { line, col, msg: format!("unexpected character '{}'", other) }),
        };
        toks.push((tok, here.0, here.1));
    }
    toks.push((Tok::End, line, col + 1));
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    coords: Option<Coords>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, col) = self.toks[self.pos];
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<BiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Var(_) | Tok::I | Tok::LParen)
    }

    fn term(&mut self) -> Result<BiPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.peek() == &Tok::Op('*') {
                self.bump();
                acc = acc.mul(&self.unary()?);
            } else if self.starts_atom() {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<BiPoly, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<BiPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Op('^') {
            self.bump();
            let Tok::Num(e) = self.peek().clone() else { return self.err("expected a nonnegative integer exponent") };
            self.bump();
            let e: u32 = e.try_into().or_else(|_| self.err("exponent too large"))?;
            if e > 10_000 {
                return self.err("exponent too large");
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn var(&mut self, c: char) -> Result<BiPoly, ParseError> {
        let kind = if matches!(c, 'x' | 'y') { Coords::HalfPlane } else { Coords::Disk };
        match self.coords {
            Some(k) if k != kind => return self.err("cannot mix x, y with z, w"),
            _ => self.coords = Some(kind),
        }
        self.bump();
        Ok(if matches!(c, 'x' | 'z') { BiPoly::x() } else { BiPoly::y() })
    }

    fn atom(&mut self) -> Result<BiPoly, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                let mut r = Rational::from_integer(n);
                // `a/b` binds as a literal only when `b` is an integer.
                if self.peek() == &Tok::Op('/') {
                    self.bump();
                    let Tok::Num(d) = self.peek().clone() else { return self.err("expected integer denominator") };
                    if d == BigInt::from(0) {
                        return self.err("zero denominator");
                    }
                    self.bump();
                    r /= Rational::from_integer(d);
                }
                Ok(BiPoly::constant(GaussianRational::real(r)))
            }
            Tok::Var(c) => self.var(c),
            Tok::I => {
                self.bump();
                Ok(BiPoly::constant(GaussianRational::i()))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != &Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(e)
            }
            Tok::End => self.err("unexpected end of input"),
            t => self.err(format!("unexpected token {:?}", t)),
        }
    }
}

pub fn parse_expression(src: &str) -> Result<Parsed, ParseError> {
    let lx = lex(src)?;
    let mut p = Parser { toks: lx.toks, pos: 0, coords: None };
    let poly = p.expr()?;
    if p.peek() != &Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(Parsed { poly, coords: p.coords })
}

/// Parses and requires half-plane variables (or a constant).
pub fn parse_halfplane(src: &str) -> Result<BiPoly, ParseError> {
    let p = parse_expression(src)?;
    if p.coords == Some(Coords::Disk) {
        return Err(ParseError::Syntax { line: 1, col: 1, msg: "expected an expression in x, y".into() });
    }
    Ok(p.poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn parses_products_and_powers() {
        let p = parse_halfplane("(y+x+i*x^2)*(y+2*x+i*x^2)").unwrap();
        let q = parse_halfplane("(y + x + i x^2)(y + 2x + ix^2)").unwrap();
        assert_eq!(p, q);
        assert_eq!(p.deg_y(), Some(2));
        assert_eq!(parse_halfplane("x^2").unwrap(), BiPoly::monomial(GaussianRational::one(), 2, 0));
        assert_eq!(parse_halfplane("-3/4").unwrap(), BiPoly::constant(GaussianRational::real(rat(-3, 4))));
        assert_eq!(parse_halfplane("2^3").unwrap(), BiPoly::constant(GaussianRational::from_int(8)));
    }

    #[test]
    fn disk_variables() {
        let p = parse_expression("2-z-w").unwrap();
        assert_eq!(p.coords, Some(Coords::Disk));
        assert!(parse_expression("x+w").is_err());
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_expression("x +\n  * y").unwrap_err();
        assert_eq!(e, ParseError::Syntax { line: 2, col: 3, msg: "unexpected token Op('*')".into() });
        assert!(matches!(parse_expression("(x"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expression("x $"), Err(ParseError::Syntax { line: 1, col: 3, .. })));
    }
}
