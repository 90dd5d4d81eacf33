//! The polynomial text grammar, used for every polynomial the tool reads.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*        division only by nonzero constants
//! factor := '-' factor | atom ['^' integer]
//! atom   := integer | identifier | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::{Poly, Rational};

/// Syntax error with a byte offset into the parsed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PolyParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(PolyParseError {
                offset: i,
                message: format!("unexpected character '{}'", ch),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyParseError> {
        Err(PolyParseError {
            offset: self.offset(),
            message: msg.into(),
        })
    }

    fn is_op(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Op(d)) if *d == c)
    }

    fn expr(&mut self) -> Result<Poly, PolyParseError> {
        let n = self.names.len();
        let mut acc = Poly::zero(n);
        let mut sign_neg = false;
        if self.is_op('+') {
            self.pos += 1;
        } else if self.is_op('-') {
            self.pos += 1;
            sign_neg = true;
        }
        loop {
            let t = self.term()?;
            acc = if sign_neg { &acc - &t } else { &acc + &t };
            if self.is_op('+') {
                sign_neg = false;
            } else if self.is_op('-') {
                sign_neg = true;
            } else {
                return Ok(acc);
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.is_op('*') {
                self.pos += 1;
                let f = self.factor()?;
                acc = &acc * &f;
            } else if self.is_op('/') {
                self.pos += 1;
                let at = self.offset();
                let f = self.factor()?;
                match f.constant_value() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::from_integer(1.into()) / c)),
                    _ => {
                        return Err(PolyParseError {
                            offset: at,
                            message: "division is only allowed by nonzero constants".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, PolyParseError> {
        if self.is_op('-') {
            self.pos += 1;
            let f = self.factor()?;
            return Ok(-&f);
        }
        let base = self.atom()?;
        if self.is_op('^') {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(e)) => {
                    let e: u32 = match u32::try_from(&e) {
                        Ok(v) if v <= 10_000 => v,
                        _ => return self.err("exponent too large"),
                    };
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => self.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, PolyParseError> {
        let n = self.names.len();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Poly::constant(n, Rational::from_integer(v)))
            }
            Some(Tok::Ident(name)) => match self.names.iter().position(|s| *s == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Poly::var(n, i))
                }
                None => self.err(format!("unknown variable '{}'", name)),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.is_op(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected '{}'", c)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` as a polynomial in the variables `names` (in that order).
pub fn parse_poly(text: &str, names: &[String]) -> Result<Poly, PolyParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        names,
    };
    if p.peek().is_none() {
        return p.err("empty polynomial");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Splits a comma separated list, returning each item with its byte offset.
pub fn split_list(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out.into_iter()
        .map(|(o, s)| {
            let lead = s.len() - s.trim_start().len();
            (o + lead, s.trim())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_frac;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_products_and_powers() {
        let n = names(&["x", "y", "z"]);
        let p = parse_poly("x*y*z*(x+y+z)", &n).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.total_degree(), Some(4));
        let q = parse_poly("4*a^3+27*b^2", &names(&["a", "b"])).unwrap();
        assert_eq!(q.homogeneous_degree(&[2, 3]), Some(6));
    }

    #[test]
    fn unary_minus_and_rationals() {
        let n = names(&["x", "y"]);
        let p = parse_poly("-x^2 + 2*-y/4 - 1/3", &n).unwrap();
        let q = &(&(-&Poly::var(2, 0).pow(2)) - &Poly::var(2, 1).scale(&rat_frac(1, 2)))
            - &Poly::constant(2, rat_frac(1, 3));
        assert_eq!(p, q);
    }

    #[test]
    fn reports_offsets() {
        let n = names(&["x", "y"]);
        let e = parse_poly("x*y + w", &n).unwrap_err();
        assert_eq!(e.offset, 6);
        assert!(e.message.contains("'w'"));
        assert_eq!(parse_poly("x/(y+1)", &n).unwrap_err().offset, 2);
        assert!(parse_poly("x +", &n).is_err());
        assert!(parse_poly("(x", &n).is_err());
    }

    #[test]
    fn format_round_trip() {
        let n = names(&["x", "y", "lam"]);
        for s in ["x*y*(x-y)*(x+lam*y)", "3/2*x^2 - y + 7", "-(x+1)^3"] {
            let p = parse_poly(s, &n).unwrap();
            assert_eq!(parse_poly(&p.format(&n), &n).unwrap(), p);
        }
    }

    #[test]
    fn list_splitting_respects_parentheses() {
        let items = split_list("x, f(x,y) , 3");
        assert_eq!(items.len(), 3);
        assert_eq!(items[1], (3, "f(x,y)"));
    }
}
