//! Parser for polynomial text.
//!
//! Grammar (whitespace insignificant, juxtaposition means multiplication):
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := power (['*'] power)*
//! power   := primary ['^' integer]
//! primary := integer ['/' integer]
//!          | 'a' k | 'α' k                  Schwinger parameter α_k
//!          | 's' i '_' j                    s_{ij}
//!          | 'msq' k                        m_k²
//!          | 'm' k '^' 2n                   m_k^{2n}
//!          | 'q' [i] '^' 2n                 (q_i²)^n   (bare `q` means q_1)
//!          | '(' momentum-sum ')' '^' 2n    (Σ ± c q_i)^{2n}
//!          | '(' expr ')'
//! ```
//!
//! Momentum expressions are expanded in the `s_{ij}` basis after eliminating
//! `q_Q` by momentum conservation, so the number of momenta `Q` must be
//! supplied.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{momentum_square, KinPoly, KinVar, Rational};

/// Parses polynomial text in a kinematic space with `n_momenta` momenta.
pub fn parse_poly(text: &str, n_momenta: u32) -> Result<KinPoly> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, n_momenta, text };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    n_momenta: u32,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        // line/column of current position
        let consumed: String = self.chars[..self.pos.min(self.chars.len())].iter().collect();
        let line = consumed.matches('\n').count() + 1;
        let column = consumed.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
        let _ = self.text;
        Error::Parse { line, column, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<BigInt>().map_err(|_| self.error("bad integer"))
    }

    fn small_integer(&mut self) -> Result<u32> {
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| self.error("integer too large"))
    }

    /// Digits directly following an identifier letter (no whitespace).
    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn expr(&mut self) -> Result<KinPoly> {
        let mut acc = KinPoly::zero();
        let mut first = true;
        loop {
            let sign = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else if first {
                1
            } else {
                break;
            };
            first = false;
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            match self.peek() {
                Some('+') | Some('-') => continue,
                _ => break,
            }
        }
        Ok(acc)
    }

    fn starts_primary(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '(' || c == 'a' || c == 'α' || c == 's' || c == 'm' || c == 'q')
    }

    fn term(&mut self) -> Result<KinPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                let f = self.power()?;
                acc = &acc * &f;
            } else if self.starts_primary() {
                let f = self.power()?;
                acc = &acc * &f;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Option<u32>> {
        if self.eat('^') {
            Ok(Some(self.small_integer()?))
        } else {
            Ok(None)
        }
    }

    fn even_exponent(&mut self, what: &str) -> Result<u32> {
        match self.exponent()? {
            Some(e) if e > 0 && e % 2 == 0 => Ok(e / 2),
            _ => Err(self.error(&format!("{what} must be raised to an even positive power"))),
        }
    }

    fn power(&mut self) -> Result<KinPoly> {
        let base = self.primary()?;
        match base {
            Primary::Poly(p) => match self.exponent()? {
                Some(e) => Ok(p.pow(e)),
                None => Ok(p),
            },
            Primary::Square(p) => Ok(p.pow(self.even_exponent("a momentum or mass")?)),
        }
    }

    fn momentum_index(&mut self) -> Result<u32> {
        let i = self.digits().unwrap_or(1);
        if i == 0 || i > self.n_momenta {
            return Err(self.error(&format!("momentum index {i} outside 1..={}", self.n_momenta)));
        }
        Ok(i)
    }

    fn unit_vector(&self, i: u32) -> Vec<i64> {
        let mut c = vec![0i64; self.n_momenta as usize];
        c[i as usize - 1] = 1;
        c
    }

    /// Attempts `( ±c q_i ± … ) ^2n`; restores position on failure.
    fn try_momentum_sum(&mut self) -> Option<KinPoly> {
        let save = self.pos;
        let result = (|| -> Option<Vec<i64>> {
            if !self.eat('(') {
                return None;
            }
            let mut c = vec![0i64; self.n_momenta as usize];
            let mut first = true;
            loop {
                let sign = if self.eat('+') {
                    1
                } else if self.eat('-') {
                    -1
                } else if first {
                    1
                } else {
                    break;
                };
                first = false;
                let coef = if matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    let n = self.small_integer().ok()? as i64;
                    self.eat('*');
                    n
                } else {
                    1
                };
                if self.peek() != Some('q') {
                    return None;
                }
                self.pos += 1;
                let i = self.momentum_index().ok()?;
                c[i as usize - 1] += sign * coef;
            }
            if !self.eat(')') {
                return None;
            }
            if self.peek() != Some('^') {
                return None;
            }
            Some(c)
        })();
        match result {
            Some(c) => Some(momentum_square(&c)),
            None => {
                self.pos = save;
                None
            }
        }
    }

    fn primary(&mut self) -> Result<Primary> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end of input"))?;
        if c.is_ascii_digit() {
            let n = self.integer()?;
            let d = if self.eat('/') { self.integer()? } else { BigInt::one() };
            if d == BigInt::from(0) {
                return Err(self.error("division by zero"));
            }
            return Ok(Primary::Poly(KinPoly::constant(Rational::new(n, d))));
        }
        if c == '(' {
            if let Some(sq) = self.try_momentum_sum() {
                return Ok(Primary::Square(sq));
            }
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Primary::Poly(e));
        }
        self.pos += 1;
        match c {
            'a' | 'α' => {
                let k = self.digits().ok_or_else(|| self.error("expected edge label after 'a'"))?;
                if k == 0 || k > crate::graph::EdgeSet::MAX_LABEL {
                    return Err(self.error("edge label out of range"));
                }
                Ok(Primary::Poly(KinPoly::alpha(k)))
            }
            's' => {
                let i = self.digits().ok_or_else(|| self.error("expected s<i>_<j>"))?;
                if self.chars.get(self.pos) != Some(&'_') {
                    return Err(self.error("expected '_' in s<i>_<j>"));
                }
                self.pos += 1;
                let j = self.digits().ok_or_else(|| self.error("expected s<i>_<j>"))?;
                if i == 0 || j == 0 || i.max(j) + 1 > self.n_momenta.max(1) {
                    return Err(self.error(&format!("s{i}_{j} is not an independent invariant for Q = {}", self.n_momenta)));
                }
                Ok(Primary::Poly(KinPoly::kin(KinVar::s(i, j))))
            }
            'm' => {
                if self.chars.get(self.pos) == Some(&'s') && self.chars.get(self.pos + 1) == Some(&'q') {
                    self.pos += 2;
                    let k = self.digits().ok_or_else(|| self.error("expected msq<k>"))?;
                    if k == 0 {
                        return Err(self.error("mass indices start at 1"));
                    }
                    return Ok(Primary::Poly(KinPoly::kin(KinVar::Msq(k))));
                }
                let k = self.digits().unwrap_or(1);
                if k == 0 {
                    return Err(self.error("mass indices start at 1"));
                }
                Ok(Primary::Square(KinPoly::kin(KinVar::Msq(k))))
            }
            'q' => {
                let i = self.momentum_index()?;
                Ok(Primary::Square(momentum_square(&self.unit_vector(i))))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(&format!("unexpected character '{c}'")))
            }
        }
    }
}

enum Primary {
    Poly(KinPoly),
    /// A squared quantity that must be raised to an even power (`m_k`, momenta).
    Square(KinPoly),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_handwritten_expressions() {
        let p = parse_poly("q^2 a1 a2 + m^2 (a1+a2)^2", 2).unwrap();
        assert_eq!(p.to_canonical_string(), "msq1*a1^2 + (s1_1 + 2*msq1)*a1*a2 + msq1*a2^2");
        let p = parse_poly("(q2+q3)^2 * a1*a3", 4).unwrap();
        assert_eq!(p.to_canonical_string(), "(s2_2 + 2*s2_3 + s3_3)*a1*a3");
        let p = parse_poly("q4^2", 4).unwrap();
        assert_eq!(p.to_canonical_string(), "s1_1 + 2*s1_2 + 2*s1_3 + s2_2 + 2*s2_3 + s3_3");
        let p = parse_poly("1/2 a1 - 3", 0).unwrap();
        assert_eq!(p.to_canonical_string(), "1/2*a1 - 3");
        let p = parse_poly("(a1 + a2) * msq2 + s1_1", 2).unwrap();
        assert_eq!(p.to_canonical_string(), "msq2*a1 + msq2*a2 + s1_1");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_poly("a1 +", 0), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("q3^2", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("m1", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("a1 )", 2), Err(Error::Parse { .. })));
    }
}
