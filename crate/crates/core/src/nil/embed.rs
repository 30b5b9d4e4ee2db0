use num_traits::Zero;

use super::manifold::Nilmanifold;
use super::sequence::PolySequence;
use crate::exact::{q_frac, q_int, Q};
use crate::poly::RealPoly;

/// A homomorphic embedding of a torus onto a closed subgroup `G'` of a
/// supported group, sending `Z^{d'}` onto `G' ∩ Γ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// `T^{d'} -> T^d`, `u -> Σ u_i cols[i]`; `inv_rows` recover `u`.
    Torus { dim: usize, cols: Vec<Vec<i64>>, inv_rows: Vec<Vec<i64>> },
    /// `T^2 -> H`, `(t, s) -> (t u1, t u2, s + C(t,2) u1 u2)`; `row·(x, y)`
    /// recovers `t`.
    Heisenberg { u: [i64; 2], row: [i64; 2] },
}

impl Embedding {
    pub fn source_dim(&self) -> usize {
        match self {
            Embedding::Torus { cols, .. } => cols.len(),
            Embedding::Heisenberg { .. } => 2,
        }
    }

    pub fn source(&self) -> Nilmanifold {
        Nilmanifold::torus(self.source_dim())
    }

    pub fn target(&self) -> Nilmanifold {
        match self {
            Embedding::Torus { dim, .. } => Nilmanifold::torus(*dim),
            Embedding::Heisenberg { .. } => Nilmanifold::heisenberg(),
        }
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        match self {
            Embedding::Torus { dim, cols, .. } => {
                let mut out = vec![Q::zero(); *dim];
                for (col, xi) in cols.iter().zip(x) {
                    for (o, c) in out.iter_mut().zip(col) {
                        if *c != 0 {
                            *o += xi * q_int(*c);
                        }
                    }
                }
                out
            }
            Embedding::Heisenberg { u, .. } => {
                let (t, s) = (&x[0], &x[1]);
                let u1u2 = q_int(u[0] * u[1]);
                let c2 = t * (t - q_int(1)) * q_frac(1, 2);
                vec![t * q_int(u[0]), t * q_int(u[1]), s + c2 * u1u2]
            }
        }
    }

    pub fn apply_seq(&self, h: &PolySequence) -> PolySequence {
        match self {
            Embedding::Torus { dim, cols, .. } => {
                let mut out = vec![RealPoly::zero(); *dim];
                for (col, p) in cols.iter().zip(&h.coords) {
                    for (o, c) in out.iter_mut().zip(col) {
                        if *c != 0 {
                            *o = &*o + &p.scale(&q_int(*c));
                        }
                    }
                }
                PolySequence::new(out)
            }
            Embedding::Heisenberg { u, .. } => {
                let (t, s) = (&h.coords[0], &h.coords[1]);
                let c2 = (&(t * t) - t).scale(&q_frac(1, 2));
                PolySequence::new(vec![
                    t.scale(&q_int(u[0])),
                    t.scale(&q_int(u[1])),
                    s + &c2.scale(&q_int(u[0] * u[1])),
                ])
            }
        }
    }

    /// Preimage of a sequence that takes values in the image subgroup.
    pub fn pull_seq(&self, g: &PolySequence) -> PolySequence {
        match self {
            Embedding::Torus { inv_rows, .. } => PolySequence::new(
                inv_rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&g.coords)
                            .filter(|(c, _)| **c != 0)
                            .fold(RealPoly::zero(), |acc, (c, p)| &acc + &p.scale(&q_int(*c)))
                    })
                    .collect(),
            ),
            Embedding::Heisenberg { u, row } => {
                let t = &g.coords[0].scale(&q_int(row[0])) + &g.coords[1].scale(&q_int(row[1]));
                let c2 = (&(&t * &t) - &t).scale(&q_frac(1, 2));
                let s = &g.coords[2] - &c2.scale(&q_int(u[0] * u[1]));
                PolySequence::new(vec![t, s])
            }
        }
    }

    /// Operator-norm style bound on how far `apply` stretches the torus
    /// metric (exact for tori; a coarse local bound for the Heisenberg map).
    pub fn stretch(&self) -> f64 {
        match self {
            Embedding::Torus { cols, .. } => {
                let rows = cols.first().map_or(0, |c| c.len());
                (0..rows)
                    .map(|r| cols.iter().map(|c| c[r].unsigned_abs() as f64).sum::<f64>())
                    .fold(1.0, f64::max)
            }
            Embedding::Heisenberg { u, .. } => {
                let m = (u[0].unsigned_abs() + u[1].unsigned_abs()) as f64;
                1.0 + m + (u[0] * u[1]).unsigned_abs() as f64
            }
        }
    }
}
