//! Polynomial phases `Z -> R/Z`.
//!
//! Coefficients are residues in `[0, 1)` held as exact rationals. A
//! coefficient that entered as a double keeps a `float` tag: its stored
//! value is the exact dyadic value of that double, so arithmetic is exact
//! in both modes and the tag only controls serialization.

mod partition;
mod walker;
mod weyl;

pub use partition::{
    partition_polyphase, partition_polyphase_with, rationalize_phase, rationalize_phase_with,
    reduce_degree_partition, reduce_degree_partition_with, BudgetSplit, PhaseOptions, ReducedPart,
    ReducedPartition, WeylSearch,
};
pub use walker::{circle_diam, diam_on, phase_residues, Residues};
pub use weyl::{best_denominator, weyl_min, WeylWitness};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    circle_norm, fmt_rational, frac, parse_rational, q_from_f64, q_int, stirling2_row, to_f64, Q,
};
use crate::poly::RealPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Binomial,
    Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coeff {
    value: Q,
    float: bool,
}

impl Coeff {
    pub fn exact(v: Q) -> Self {
        Coeff { value: frac(&v), float: false }
    }

    pub fn float(x: f64) -> Result<Self> {
        Ok(Coeff { value: frac(&q_from_f64(x)?), float: true })
    }

    /// An exact value carrying the given float tag.
    pub fn tagged(v: Q, float: bool) -> Self {
        Coeff { value: frac(&v), float }
    }

    pub fn value(&self) -> &Q {
        &self.value
    }

    pub fn is_float(&self) -> bool {
        self.float
    }

    fn to_json_string(&self) -> String {
        if self.float {
            format!("{:?}", to_f64(&self.value))
        } else {
            fmt_rational(&self.value)
        }
    }

    fn from_json_string(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') || t.parse::<BigInt>().is_ok() {
            Ok(Coeff::exact(parse_rational(t)?))
        } else {
            let x: f64 = t.parse().map_err(|_| Error::Parse(format!("bad coefficient '{s}'")))?;
            Coeff::float(x)
        }
    }
}

/// A polynomial phase in either the binomial basis `Σ α_j C(n, j)` or the
/// monomial basis `Σ θ_j n^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyPhase {
    basis: Basis,
    coeffs: Vec<Coeff>,
}

impl PolyPhase {
    pub fn new(basis: Basis, coeffs: Vec<Coeff>) -> Self {
        let mut p = PolyPhase { basis, coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        PolyPhase::new(Basis::Binomial, Vec::new())
    }

    pub fn binomial(coeffs: Vec<Q>) -> Self {
        PolyPhase::new(Basis::Binomial, coeffs.into_iter().map(Coeff::exact).collect())
    }

    pub fn monomial(coeffs: Vec<Q>) -> Self {
        PolyPhase::new(Basis::Monomial, coeffs.into_iter().map(Coeff::exact).collect())
    }

    pub fn binomial_f64(coeffs: &[f64]) -> Result<Self> {
        Ok(PolyPhase::new(Basis::Binomial, coeffs.iter().map(|&x| Coeff::float(x)).collect::<Result<_>>()?))
    }

    pub fn monomial_f64(coeffs: &[f64]) -> Result<Self> {
        Ok(PolyPhase::new(Basis::Monomial, coeffs.iter().map(|&x| Coeff::float(x)).collect::<Result<_>>()?))
    }

    /// The phase `n -> p(n) mod 1`; only meaningful when `p` maps integers
    /// (or the integers of interest) to reals, which it always does.
    pub fn from_real_poly(p: &RealPoly) -> Self {
        PolyPhase::binomial(p.binomial_coeffs())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.value.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn any_float(&self) -> bool {
        self.coeffs.iter().any(|c| c.float)
    }

    fn retag(coeffs: Vec<Q>, float: bool) -> Vec<Coeff> {
        coeffs.into_iter().map(|v| Coeff { value: frac(&v), float }).collect()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeff_values(&self) -> Vec<Q> {
        self.coeffs.iter().map(|c| c.value.clone()).collect()
    }

    /// Binomial-basis coefficients `α_0..α_s`, each in `[0, 1)`.
    pub fn binomial_coeffs(&self) -> Vec<Q> {
        match self.basis {
            Basis::Binomial => self.coeff_values(),
            Basis::Monomial => {
                // n^i = Σ_j S(i, j) j! C(n, j): an integer change of basis.
                let s = self.coeffs.len();
                let mut out = vec![Q::zero(); s];
                for (i, c) in self.coeffs.iter().enumerate() {
                    let row = stirling2_row(i);
                    let mut fact = BigInt::one();
                    for (j, st) in row.iter().enumerate() {
                        if j > 0 {
                            fact *= BigInt::from(j);
                        }
                        if !st.is_zero() {
                            out[j] += &c.value * Q::from_integer(st * &fact);
                        }
                    }
                }
                out.iter().map(frac).collect()
            }
        }
    }

    pub fn to_basis(&self, basis: Basis) -> Self {
        if basis == self.basis {
            return self.clone();
        }
        let float = self.any_float();
        match basis {
            Basis::Binomial => PolyPhase::new(basis, Self::retag(self.binomial_coeffs(), float)),
            Basis::Monomial => {
                let lift = RealPoly::from_binomial(&self.coeff_values());
                PolyPhase::new(basis, Self::retag(lift.coeffs().to_vec(), float))
            }
        }
    }

    /// A real polynomial whose reduction mod 1 is this phase.
    pub fn lift(&self) -> RealPoly {
        match self.basis {
            Basis::Binomial => RealPoly::from_binomial(&self.coeff_values()),
            Basis::Monomial => RealPoly::new(self.coeff_values()),
        }
    }

    /// Largest `j` with `α_j ≠ 0` in the binomial basis, or 0.
    pub fn degree(&self) -> usize {
        let b = self.binomial_coeffs();
        b.iter().rposition(|x| !x.is_zero()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.binomial_coeffs().iter().all(|x| x.is_zero())
    }

    pub fn eval(&self, n: i64) -> Q {
        let x = q_int(n);
        let mut acc = Q::zero();
        match self.basis {
            Basis::Monomial => {
                for c in self.coeffs.iter().rev() {
                    acc = frac(&(acc * &x + &c.value));
                }
            }
            Basis::Binomial => {
                let nb = BigInt::from(n);
                let mut b = BigInt::one();
                for (j, c) in self.coeffs.iter().enumerate() {
                    if j > 0 {
                        b = b * (&nb - BigInt::from(j - 1)) / BigInt::from(j);
                    }
                    acc += &c.value * Q::from_integer(b.clone());
                }
            }
        }
        frac(&acc)
    }

    pub fn eval_f64(&self, n: i64) -> f64 {
        to_f64(&self.eval(n))
    }

    /// `m -> φ(a m + b)`, in the same basis.
    pub fn compose_affine(&self, a: i64, b: i64) -> Self {
        let comp = self.lift().compose_affine(&q_int(a), &q_int(b));
        let coeffs = match self.basis {
            Basis::Binomial => comp.binomial_coeffs(),
            Basis::Monomial => comp.coeffs().to_vec(),
        };
        PolyPhase::new(self.basis, Self::retag(coeffs, self.any_float()))
    }

    pub fn scale_int(&self, q: i64) -> Self {
        let k = q_int(q);
        let coeffs = self.coeffs.iter().map(|c| Coeff { value: frac(&(&c.value * &k)), float: c.float }).collect();
        PolyPhase::new(self.basis, coeffs)
    }

    pub fn add(&self, other: &PolyPhase) -> Self {
        let a = self.binomial_coeffs();
        let b = other.binomial_coeffs();
        let n = a.len().max(b.len());
        let get = |v: &[Q], i: usize| v.get(i).cloned().unwrap_or_else(Q::zero);
        let sum = (0..n).map(|i| get(&a, i) + get(&b, i)).collect();
        PolyPhase::new(Basis::Binomial, Self::retag(sum, self.any_float() || other.any_float()))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| Coeff { value: frac(&-&c.value), float: c.float }).collect();
        PolyPhase::new(self.basis, coeffs)
    }

    pub fn sub(&self, other: &PolyPhase) -> Self {
        self.add(&other.neg())
    }

    /// `sup_{1<=j<=s} N^j ||α_j||` over binomial-basis coefficients, exactly.
    pub fn smoothness_norm_exact(&self, n: u64) -> Q {
        let nq = q_int(n as i64);
        let mut pw = Q::one();
        let mut best = Q::zero();
        for (j, a) in self.binomial_coeffs().iter().enumerate() {
            if j > 0 {
                pw = &pw * &nq;
                let v = circle_norm(a) * &pw;
                if v > best {
                    best = v;
                }
            }
        }
        best
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "basis": self.basis,
            "coeffs": self.coeffs.iter().map(Coeff::to_json_string).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let basis: Basis = serde_json::from_value(v.get("basis").cloned().unwrap_or(serde_json::Value::Null))?;
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Parse("phase needs a coeffs array".into()))?
            .iter()
            .map(|c| c.as_str().ok_or_else(|| Error::Parse("coefficients are strings".into())).and_then(Coeff::from_json_string))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyPhase::new(basis, coeffs))
    }
}

impl Serialize for PolyPhase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyPhase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        PolyPhase::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Operation form of [`PolyPhase::smoothness_norm_exact`].
pub fn smoothness_norm(phi: &PolyPhase, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    Ok(to_f64(&phi.smoothness_norm_exact(n)))
}

/// Operation form of [`PolyPhase::eval`].
pub fn eval(phi: &PolyPhase, n: i64) -> Q {
    phi.eval(n)
}

pub fn compose_affine(phi: &PolyPhase, a: i64, b: i64) -> PolyPhase {
    phi.compose_affine(a, b)
}
