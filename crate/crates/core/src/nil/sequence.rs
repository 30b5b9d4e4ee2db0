use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::manifold::{ManifoldKind, Nilmanifold};
use crate::error::{Error, Result};
use crate::exact::{q_int, Q};
use crate::poly::RealPoly;
use crate::polyphase::PolyPhase;

/// A polynomial sequence `n -> g(n)` given by its coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolySequence {
    pub coords: Vec<RealPoly>,
}

impl PolySequence {
    pub fn new(coords: Vec<RealPoly>) -> Self {
        PolySequence { coords }
    }

    pub fn identity(m: &Nilmanifold) -> Self {
        PolySequence { coords: vec![RealPoly::zero(); m.dim()] }
    }

    pub fn constant(x: &[Q]) -> Self {
        PolySequence { coords: x.iter().map(|c| RealPoly::constant(c.clone())).collect() }
    }

    /// Linear sequence `n -> n·a` (for tori and, coordinate-wise, Heisenberg).
    pub fn linear_f64(a: &[f64]) -> Result<Self> {
        let coords = a
            .iter()
            .map(|&x| Ok(RealPoly::new(vec![Q::zero(), crate::exact::q_from_f64(x)?])))
            .collect::<Result<_>>()?;
        Ok(PolySequence { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> usize {
        self.coords.iter().map(RealPoly::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, n: i64) -> Vec<Q> {
        let x = q_int(n);
        self.coords.iter().map(|p| p.eval(&x)).collect()
    }

    pub fn check(&self, m: &Nilmanifold) -> Result<()> {
        if self.dim() != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: self.dim() });
        }
        Ok(())
    }

    pub fn mul(&self, m: &Nilmanifold, o: &PolySequence) -> PolySequence {
        let (a, b) = (&self.coords, &o.coords);
        let coords = match m.kind {
            ManifoldKind::Torus(_) => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            ManifoldKind::Heisenberg => vec![&a[0] + &b[0], &a[1] + &b[1], &(&a[2] + &b[2]) + &(&a[0] * &b[1])],
        };
        PolySequence { coords }
    }

    pub fn inv(&self, m: &Nilmanifold) -> PolySequence {
        let a = &self.coords;
        let coords = match m.kind {
            ManifoldKind::Torus(_) => a.iter().map(|x| -x).collect(),
            ManifoldKind::Heisenberg => vec![-&a[0], -&a[1], &(-&a[2]) + &(&a[0] * &a[1])],
        };
        PolySequence { coords }
    }

    /// `n -> g(a n + b)`.
    pub fn compose_affine(&self, a: &Q, b: &Q) -> PolySequence {
        PolySequence { coords: self.coords.iter().map(|p| p.compose_affine(a, b)).collect() }
    }

    pub fn is_integer_valued(&self) -> bool {
        self.coords.iter().all(|p| p.binomial_coeffs().iter().all(|c| c.is_integer()))
    }
}

/// Horizontal character `x -> k·x mod 1` on the horizontal coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HorizontalCharacter {
    pub k: Vec<i64>,
}

impl HorizontalCharacter {
    pub fn new(k: Vec<i64>) -> Self {
        HorizontalCharacter { k }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut k = vec![0; dim];
        k[i] = 1;
        HorizontalCharacter { k }
    }

    pub fn is_trivial(&self) -> bool {
        self.k.iter().all(|&x| x == 0)
    }

    /// `|k|_1`, the Lipschitz bound.
    pub fn lipschitz(&self) -> u64 {
        self.k.iter().map(|x| x.unsigned_abs()).sum()
    }

    /// `k·g` as a real polynomial.
    pub fn apply_real(&self, m: &Nilmanifold, g: &PolySequence) -> Result<RealPoly> {
        g.check(m)?;
        if self.k.len() != m.horizontal_dim() {
            return Err(Error::DimensionMismatch { expected: m.horizontal_dim(), found: self.k.len() });
        }
        Ok(self
            .k
            .iter()
            .zip(&g.coords)
            .filter(|(k, _)| **k != 0)
            .fold(RealPoly::zero(), |acc, (k, p)| &acc + &p.scale(&q_int(*k))))
    }
}

/// `η∘g` as a polynomial phase.
pub fn horizontal_apply(m: &Nilmanifold, eta: &HorizontalCharacter, g: &PolySequence) -> Result<PolyPhase> {
    Ok(PolyPhase::from_real_poly(&eta.apply_real(m, g)?))
}
