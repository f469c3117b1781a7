//! Parser for `--poly` expressions.
//!
//! ```text
//! map     := poly (';' poly)*
//! poly    := sign? term (sign term)*
//! term    := factor ('*' factor)*
//! factor  := number | var ('^' digits)?
//! number  := digits ('.' digits)? ('/' digits)?
//! var     := 'x' digits | 'x' | 'y' | 'z'
//! sign    := '+' | '-'
//! ```
//!
//! `x1 … xn` index the variables; `x`, `y`, `z` are shorthands for `x1`,
//! `x2`, `x3`. Whitespace is ignored between tokens.

use std::collections::BTreeMap;
use std::fmt;

use dirreg_core::poly::{Polynomial, PolynomialMap};
use dirreg_core::BigRational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the expression.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

type Terms = BTreeMap<Vec<u32>, BigRational>;

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn map(&mut self) -> Result<Vec<Terms>, ParseError> {
        let mut comps = vec![self.poly()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            comps.push(self.poly()?);
        }
        if let Some(c) = self.peek() {
            return self.err(self.pos, format!("unexpected {:?}", c as char));
        }
        Ok(comps)
    }

    fn poly(&mut self) -> Result<Terms, ParseError> {
        let mut terms = Terms::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let (exps, mut c) = self.term()?;
            if negative {
                c = -c;
            }
            let slot = terms.entry(exps).or_insert_with(BigRational::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(terms)
    }

    fn term(&mut self) -> Result<(Vec<u32>, BigRational), ParseError> {
        let mut exps = vec![0u32; self.n];
        let mut coeff = BigRational::one();
        self.factor(&mut exps, &mut coeff)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut exps, &mut coeff)?;
        }
        Ok((exps, coeff))
    }

    fn factor(&mut self, exps: &mut [u32], coeff: &mut BigRational) -> Result<(), ParseError> {
        let start = match self.peek() {
            Some(_) => self.pos,
            None => return self.err(self.pos, "expected a number or variable, found end of input"),
        };
        match self.src[start] {
            b'0'..=b'9' => {
                *coeff *= self.number()?;
                Ok(())
            }
            b'x' | b'y' | b'z' => {
                let var = self.variable()?;
                let mut power = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    power = match self.digits().and_then(|d| d.parse().ok()) {
                        Some(p) => p,
                        None => return self.err(at, "expected a nonnegative integer exponent"),
                    };
                }
                exps[var] = match exps[var].checked_add(power) {
                    Some(p) => p,
                    None => return self.err(start, "exponent overflow"),
                };
                Ok(())
            }
            c => self.err(start, format!("expected a number or variable, found {:?}", c as char)),
        }
    }

    fn number(&mut self) -> Result<BigRational, ParseError> {
        let start = self.pos;
        let int = self.digits().unwrap_or("");
        let mut num: BigInt = int.parse().unwrap();
        let mut den = BigInt::one();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac = match self.digits() {
                Some(f) => f,
                None => return self.err(self.pos, "expected digits after the decimal point"),
            };
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            num = num * &scale + frac.parse::<BigInt>().unwrap();
            den = scale;
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let d: BigInt = match self.digits() {
                Some(d) => d.parse().unwrap(),
                None => return self.err(at, "expected a denominator"),
            };
            if d.is_zero() {
                return self.err(at, "zero denominator");
            }
            den *= d;
        }
        let _ = start;
        Ok(BigRational::new(num, den))
    }

    fn variable(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        let letter = self.src[start];
        self.pos += 1;
        let index = if letter == b'x' {
            match self.digits() {
                Some(d) => match d.parse::<usize>() {
                    Ok(i) if i >= 1 => i,
                    _ => return self.err(start, format!("variable x{d} does not exist; indices start at 1")),
                },
                None => 1,
            }
        } else {
            (letter - b'x') as usize + 1
        };
        if index > self.n {
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return self.err(start, format!("variable {name} exceeds n = {}", self.n));
        }
        Ok(index - 1)
    }
}

/// Parses `expr` as a map `ℝⁿ → ℝᵐ`, one `;`-separated component per output.
pub fn parse_poly_map(expr: &str, n: usize, m: usize) -> Result<PolynomialMap, ParseError> {
    let mut p = Parser {
        src: expr.as_bytes(),
        pos: 0,
        n,
    };
    let comps = p.map()?;
    if comps.len() != m {
        return Err(ParseError {
            offset: expr.len(),
            message: format!("expected {m} components separated by ';', found {}", comps.len()),
        });
    }
    let polys = comps
        .into_iter()
        .map(|t| Polynomial::from_terms(n, t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ParseError {
            offset: 0,
            message: e.to_string(),
        })?;
    PolynomialMap::new(polys).map_err(|e| ParseError {
        offset: 0,
        message: e.to_string(),
    })
}
