//! Text forms used by the command line: phase and sequence expressions, ranges,
//! and set/function files.
//!
//! An expression is a sum of terms, each a product of factors:
//! numbers (`3`, `-2/7`, `0.25`), `sqrt(K)`, `n`, `n^K` and `C(n,K)`.
//! Decimal and `sqrt` factors mark the result as float-sourced.
//!
//! ```
//! use apinc::format::parse_phase;
//! let phi = parse_phase("1/3 + sqrt(2) n + 1/5 C(n,2)").unwrap();
//! assert_eq!(phi.degree(), 2);
//! ```

use std::path::Path;

use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{q_from_f64, Q};
use crate::gowers::{DenseSet, GroupFunction};
use crate::nil::{Nilmanifold, PolySequence};
use crate::poly::RealPoly;
use crate::polyphase::{Basis, Coeff, PolyPhase};
use crate::progression::Progression;

#[derive(Debug, Clone, PartialEq)]
struct Parsed {
    poly: RealPoly,
    binomial: bool,
    float: bool,
}

struct Scanner<'a> {
    s: &'a [u8],
    i: usize,
    src: &'a str,
}

impl<'a> Scanner<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in '{}'", self.i, self.src))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, t: &str) -> bool {
        if self.s[self.i..].starts_with(t.as_bytes()) {
            self.i += t.len();
            true
        } else {
            false
        }
    }

    fn uint(&mut self) -> Result<u64> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().map_err(|_| self.err("expected an integer"))
    }

    /// `digits[.digits][/digits]`, returning the value and whether it was a decimal.
    fn number(&mut self) -> Result<(Q, bool)> {
        let start = self.i;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == b'.') {
            self.i += 1;
        }
        let lit = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        if lit.contains('.') {
            let x: f64 = lit.parse().map_err(|_| self.err("bad decimal"))?;
            return Ok((q_from_f64(x)?, true));
        }
        let p: Q = lit.parse::<num_bigint::BigInt>().map(Q::from_integer).map_err(|_| self.err("expected a number"))?;
        if self.eat("/") {
            let q = self.uint()?;
            if q == 0 {
                return Err(self.err("zero denominator"));
            }
            return Ok((p / Q::from_integer(q.into()), false));
        }
        Ok((p, false))
    }
}

fn parse_sum(src: &str) -> Result<Parsed> {
    let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut sc = Scanner { s: compact.as_bytes(), i: 0, src };
    let mut poly = RealPoly::zero();
    let (mut binomial, mut float) = (false, false);
    if compact.is_empty() {
        return Err(sc.err("empty expression"));
    }
    let mut first = true;
    while sc.peek().is_some() {
        let mut sign = Q::one();
        if sc.eat("-") {
            sign = -sign;
        } else if !sc.eat("+") && !first {
            return Err(sc.err("expected '+' or '-'"));
        }
        first = false;
        let mut coef = sign;
        let mut basis: Option<RealPoly> = None;
        loop {
            let c = sc.peek().ok_or_else(|| sc.err("dangling operator"))?;
            if c.is_ascii_digit() || c == b'.' {
                let (v, dec) = sc.number()?;
                coef *= v;
                float |= dec;
            } else if sc.eat("sqrt(") {
                let (v, _) = sc.number()?;
                if !sc.eat(")") {
                    return Err(sc.err("expected ')'"));
                }
                coef *= q_from_f64(crate::exact::to_f64(&v).sqrt())?;
                float = true;
            } else if sc.eat("C(n,") || sc.eat("binom(n,") {
                let k = sc.uint()? as usize;
                if !sc.eat(")") || basis.is_some() {
                    return Err(sc.err("malformed binomial term"));
                }
                basis = Some(RealPoly::binomial(k));
                binomial = true;
            } else if sc.eat("n") {
                let k = if sc.eat("^") { sc.uint()? as usize } else { 1 };
                if basis.is_some() {
                    return Err(sc.err("two basis factors in one term"));
                }
                basis = Some(RealPoly::monomial(Q::one(), k));
            } else {
                return Err(sc.err("unexpected character"));
            }
            if !sc.eat("*") && !matches!(sc.peek(), Some(c) if c.is_ascii_digit() || c == b'n' || c == b's' || c == b'C' || c == b'b') {
                break;
            }
        }
        let term = basis.unwrap_or_else(|| RealPoly::constant(Q::one())).scale(&coef);
        poly = &poly + &term;
    }
    Ok(Parsed { poly, binomial, float })
}

/// Parses a real polynomial in `n` without reducing modulo 1.
pub fn parse_real_poly(src: &str) -> Result<RealPoly> {
    Ok(parse_sum(src)?.poly)
}

/// Parses a phase expression. Binomial terms select the binomial basis.
pub fn parse_phase(src: &str) -> Result<PolyPhase> {
    let p = parse_sum(src)?;
    let (basis, vals) = if p.binomial {
        (Basis::Binomial, p.poly.binomial_coeffs())
    } else {
        (Basis::Monomial, p.poly.coeffs().to_vec())
    };
    Ok(PolyPhase::new(basis, vals.into_iter().map(|v| Coeff::tagged(v, p.float)).collect()))
}

/// Coordinates separated by `;`, one polynomial each.
pub fn parse_sequence(src: &str, m: &Nilmanifold) -> Result<PolySequence> {
    let coords = src.split(';').map(parse_real_poly).collect::<Result<Vec<_>>>()?;
    let g = PolySequence::new(coords);
    g.check(m)?;
    Ok(g)
}

/// `A..B` (inclusive), optionally `A..B:STEP` for the progression
/// `A, A+STEP, ..` up to `B`.
pub fn parse_range(src: &str) -> Result<Progression> {
    let bad = || Error::Parse(format!("bad range '{src}', expected A..B"));
    let (span, step) = match src.split_once(':') {
        Some((a, s)) => (a, s.trim().parse::<i64>().map_err(|_| bad())?),
        None => (src, 1),
    };
    let (a, b) = span.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if step <= 0 || b < a {
        return Err(Error::InvalidArgument(format!("empty range '{src}'")));
    }
    Progression::new(a, step, ((b - a) / step + 1) as u64)
}

pub fn read_set(path: &Path) -> Result<DenseSet> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_set(path: &Path, a: &DenseSet) -> Result<()> {
    std::fs::write(path, serde_json::to_string(a)? + "\n")?;
    Ok(())
}

pub fn read_function(path: &Path) -> Result<GroupFunction> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    GroupFunction::from_json(&v)
}

pub fn write_function(path: &Path, f: &GroupFunction) -> Result<()> {
    std::fs::write(path, serde_json::to_string(&f.to_json())? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use num_traits::Zero;

    #[test]
    fn phases() {
        let p = parse_phase("1/3 + 2/5 n + 1/7 C(n,2)").unwrap();
        assert_eq!(p.basis(), Basis::Binomial);
        assert_eq!(p.coeff_values(), vec![q_frac(1, 3), q_frac(2, 5), q_frac(1, 7)]);
        assert!(!p.coeffs()[0].is_float());

        let p = parse_phase("0.5 n").unwrap();
        assert_eq!(p.basis(), Basis::Monomial);
        assert_eq!(p.coeff_values(), vec![Q::zero(), q_frac(1, 2)]);
        assert!(p.coeffs()[1].is_float());

        let p = parse_phase("sqrt(2) n + sqrt(3) C(n, 2)").unwrap();
        assert_eq!(p.coeff_values()[1], crate::exact::frac(&q_from_f64(2f64.sqrt()).unwrap()));

        let p = parse_phase("3 n^2 - 1/4*n").unwrap();
        assert_eq!(p.coeff_values(), vec![Q::zero(), q_frac(3, 4)]);
        assert_eq!(p.eval(2), q_frac(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "n n", "1 +", "x", "C(n,2", "1/0 n"] {
            assert!(parse_phase(s).is_err(), "{s}");
        }
    }

    #[test]
    fn sequences_and_ranges() {
        let h = Nilmanifold::heisenberg();
        let g = parse_sequence("sqrt(2) n; sqrt(3) n; 0", &h).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(parse_sequence("n; n", &h).is_err());
        assert_eq!(parse_range("1..100").unwrap(), Progression::interval(1, 100).unwrap());
        assert_eq!(parse_range("5..17:3").unwrap(), Progression::new(5, 3, 5).unwrap());
        assert!(parse_range("9..1").is_err());
    }
}
