//! Real polynomials with exact rational coefficients in the monomial basis.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{factorial, fmt_rational, parse_rational, q_int, Q};
use crate::error::Result;

/// `p(n) = Σ c[i] n^i`. Trailing zero coefficients are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RealPoly {
    c: Vec<Q>,
}

impl RealPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        RealPoly { c }
    }

    pub fn zero() -> Self {
        RealPoly { c: Vec::new() }
    }

    pub fn constant(v: Q) -> Self {
        RealPoly::new(vec![v])
    }

    /// The identity polynomial `n`.
    pub fn var() -> Self {
        RealPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn monomial(v: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = v;
        RealPoly::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.c.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, n: i64) -> Q {
        self.eval(&q_int(n))
    }

    pub fn scale(&self, k: &Q) -> Self {
        RealPoly::new(self.c.iter().map(|c| c * k).collect())
    }

    /// `m -> p(a m + b)`.
    pub fn compose_affine(&self, a: &Q, b: &Q) -> Self {
        let lin = RealPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = RealPoly::zero();
        for c in self.c.iter().rev() {
            acc = &(&acc * &lin) + &RealPoly::constant(c.clone());
        }
        acc
    }

    /// `C(n, j)` as a polynomial in `n`.
    pub fn binomial(j: usize) -> Self {
        let mut acc = RealPoly::constant(Q::one());
        for i in 0..j {
            acc = &acc * &RealPoly::new(vec![q_int(-(i as i64)), Q::one()]);
        }
        acc.scale(&Q::from_integer(factorial(j as u32)).recip())
    }

    /// Coefficients `b_j` with `p(n) = Σ b_j C(n, j)` (iterated forward
    /// differences at 0).
    pub fn binomial_coeffs(&self) -> Vec<Q> {
        let d = self.degree();
        if self.is_zero() {
            return vec![Q::zero()];
        }
        let mut vals: Vec<Q> = (0..=d as i64).map(|n| self.eval_int(n)).collect();
        let mut out = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            out.push(vals[0].clone());
            vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        out
    }

    pub fn from_binomial(b: &[Q]) -> Self {
        b.iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .fold(RealPoly::zero(), |acc, (j, v)| &acc + &RealPoly::binomial(j).scale(v))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.c.iter().map(fmt_rational).collect()
    }

    pub fn from_strings(s: &[String]) -> Result<Self> {
        Ok(RealPoly::new(s.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?))
    }
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, o: &RealPoly) -> RealPoly {
        let n = self.c.len().max(o.c.len());
        RealPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, o: &RealPoly) -> RealPoly {
        let n = self.c.len().max(o.c.len());
        RealPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, o: &RealPoly) -> RealPoly {
        if self.is_zero() || o.is_zero() {
            return RealPoly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RealPoly::new(c)
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        RealPoly::new(self.c.iter().map(|x| -x).collect())
    }
}

impl Serialize for RealPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        RealPoly::from_strings(&v).map_err(serde::de::Error::custom)
    }
}
