//! Text grammar for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'i' | 'u' | 'v' | 'z' integer | '(' expr ')'
//! number := digits ('/' digits)? 'i'?
//! ```
//!
//! `3/2i` is the single literal `(3/2)·i`; there is no division operator.
//! The Unicode minus sign is accepted as `-`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;

use super::poly::{z, Poly, U, V};
use super::scalar::GaussianRational;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(GaussianRational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    n: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn err(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(1, col + 1, msg)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
            let col = self.pos;
            let Some(&c) = self.chars.get(self.pos) else {
                out.push((Tok::End, col));
                return Ok(out);
            };
            let tok = match c {
                '+' => {
                    self.pos += 1;
                    Tok::Plus
                }
                '-' | '\u{2212}' => {
                    self.pos += 1;
                    Tok::Minus
                }
                '*' => {
                    self.pos += 1;
                    Tok::Star
                }
                '^' => {
                    self.pos += 1;
                    Tok::Caret
                }
                '(' => {
                    self.pos += 1;
                    Tok::LParen
                }
                ')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                'u' => {
                    self.pos += 1;
                    Tok::Var(U)
                }
                'v' => {
                    self.pos += 1;
                    Tok::Var(V)
                }
                'i' => {
                    self.pos += 1;
                    Tok::Num(GaussianRational::i())
                }
                'z' => {
                    self.pos += 1;
                    let d = self.digits();
                    if d.is_empty() {
                        return Err(self.err(col, "expected variable index after 'z'"));
                    }
                    let j: usize = d.parse().map_err(|_| self.err(col, "variable index too large"))?;
                    if j == 0 || j > self.n {
                        return Err(self.err(col, format!("variable z{j} outside z1..z{}", self.n)));
                    }
                    Tok::Var(z(j))
                }
                c if c.is_ascii_digit() => {
                    let num = self.digits();
                    let mut value = BigRational::from_integer(num.parse::<BigInt>().unwrap());
                    if self.chars.get(self.pos) == Some(&'/') {
                        self.pos += 1;
                        let den = self.digits();
                        if den.is_empty() {
                            return Err(self.err(self.pos, "expected denominator after '/'"));
                        }
                        let den: BigInt = den.parse().unwrap();
                        if den.is_zero() {
                            return Err(self.err(col, "zero denominator"));
                        }
                        value /= BigRational::from_integer(den);
                    }
                    if self.chars.get(self.pos) == Some(&'i') {
                        self.pos += 1;
                        Tok::Num(GaussianRational::new(BigRational::zero(), value))
                    } else {
                        Tok::Num(GaussianRational::from(value))
                    }
                }
                other => return Err(self.err(col, format!("unexpected character '{other}'"))),
            };
            out.push((tok, col));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    nvars: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1 + 1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(1, self.col(), msg)
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(c) if c.is_real() && c.re.is_integer() && c.re >= BigRational::zero() => {
                self.bump();
                let e: u32 = c
                    .re
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.err("exponent too large"))?;
                Ok(base.pow(e))
            }
            _ => Err(self.err("expected a non-negative integer exponent after '^'")),
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.bump() {
            Tok::Num(c) => Ok(Poly::constant(self.nvars, c)),
            Tok::Var(k) => Ok(Poly::var(self.nvars, k)),
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(self.err("unexpected end of input")),
            other => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err(format!("unexpected token {other:?}")))
            }
        }
    }
}

/// Parses a polynomial in the ambient ring `Q(i)[u, v, z1..zn]`.
pub fn parse_poly(src: &str, n: usize) -> Result<Poly, ParseError> {
    let toks = Lexer {
        chars: src.chars().collect(),
        pos: 0,
        n,
        _src: src,
    }
    .tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        nvars: n + 2,
    };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_example() {
        let p = parse_poly("(1/2 + 3i)*z1^2*v − u", 2).unwrap();
        let c = GaussianRational::from_parts((1, 2), (3, 1));
        let expected = &(&Poly::var(4, z(1)).pow(2) * &Poly::var(4, V)).scale(&c) - &Poly::var(4, U);
        assert_eq!(p, expected);
    }

    #[test]
    fn imaginary_literals() {
        let p = parse_poly("3/2i", 1).unwrap();
        assert_eq!(p.constant_term(), GaussianRational::from_parts((0, 1), (3, 2)));
        let q = parse_poly("i*i + 1", 1).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_poly("z1^", 1).unwrap_err();
        assert_eq!(e.column, 4);
        let e = parse_poly("z3 + 1", 2).unwrap_err();
        assert_eq!(e.column, 1);
        assert!(parse_poly("(z1 + 1", 1).is_err());
        assert!(parse_poly("1/0", 1).is_err());
        assert!(parse_poly("z1 z2", 2).is_err());
    }

    #[test]
    fn print_parse_roundtrip_examples() {
        for s in ["0", "-u", "(1/2 - 3i)*z1^2*v - u + 7", "-2i*u*v + z2^3 - 1/3", "i*z1"] {
            let p = parse_poly(s, 2).unwrap();
            let back = parse_poly(&p.to_string(), 2).unwrap();
            assert_eq!(p, back, "{s} -> {p}");
        }
    }
}
