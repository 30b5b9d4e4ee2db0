use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{circle_dist, frac, to_f64, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    /// `R^d / Z^d`; `Torus(0)` is the one-point space.
    Torus(usize),
    /// Upper unitriangular `3x3` real matrices modulo integer ones, in
    /// coordinates `(x, y, z)` with `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
    Heisenberg,
}

/// A nilmanifold from the two supported families with the standard lattice.
///
/// The metric is the maximum of the circle distances between the
/// fundamental-domain coordinates of two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nilmanifold {
    pub kind: ManifoldKind,
    /// Bookkept bound on character sizes and Lipschitz constants.
    pub complexity: f64,
}

pub const DEFAULT_COMPLEXITY: f64 = 16.0;

impl Nilmanifold {
    pub fn torus(d: usize) -> Self {
        Nilmanifold { kind: ManifoldKind::Torus(d), complexity: DEFAULT_COMPLEXITY }
    }

    pub fn heisenberg() -> Self {
        Nilmanifold { kind: ManifoldKind::Heisenberg, complexity: DEFAULT_COMPLEXITY }
    }

    pub fn point() -> Self {
        Self::torus(0)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Torus(d) => d,
            ManifoldKind::Heisenberg => 3,
        }
    }

    /// Number of coordinates a horizontal character acts on.
    pub fn horizontal_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Torus(d) => d,
            ManifoldKind::Heisenberg => 2,
        }
    }

    pub fn check_len(&self, x: &[Q]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    pub fn identity(&self) -> Vec<Q> {
        vec![Q::zero(); self.dim()]
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        match self.kind {
            ManifoldKind::Torus(_) => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            ManifoldKind::Heisenberg => {
                vec![&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2] + &a[0] * &b[1]]
            }
        }
    }

    pub fn inv(&self, a: &[Q]) -> Vec<Q> {
        match self.kind {
            ManifoldKind::Torus(_) => a.iter().map(|x| -x).collect(),
            ManifoldKind::Heisenberg => vec![-&a[0], -&a[1], -&a[2] + &a[0] * &a[1]],
        }
    }

    /// Fundamental-domain representative of `xΓ`, coordinates in `[0, 1)`.
    ///
    /// For the Heisenberg group this right-multiplies by the lattice element
    /// `(-⌊x⌋, -⌊y⌋, c)`, which sends `z` to `z - x⌊y⌋ + c`.
    pub fn reduce(&self, x: &[Q]) -> Vec<Q> {
        match self.kind {
            ManifoldKind::Torus(_) => x.iter().map(frac).collect(),
            ManifoldKind::Heisenberg => {
                let fy = x[1].floor();
                vec![frac(&x[0]), frac(&x[1]), frac(&(&x[2] - &x[0] * fy))]
            }
        }
    }

    pub fn distance(&self, a: &[Q], b: &[Q]) -> f64 {
        let (ra, rb) = (self.reduce(a), self.reduce(b));
        ra.iter().zip(&rb).map(|(x, y)| to_f64(&circle_dist(x, y))).fold(0.0, f64::max)
    }
}

impl fmt::Display for Nilmanifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ManifoldKind::Torus(d) => write!(f, "torus:{d}"),
            ManifoldKind::Heisenberg => write!(f, "heisenberg"),
        }
    }
}

impl FromStr for Nilmanifold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("heisenberg") {
            return Ok(Nilmanifold::heisenberg());
        }
        if let Some(d) = s.strip_prefix("torus:") {
            let d: usize = d.parse().map_err(|_| Error::Parse(format!("bad torus dimension in '{s}'")))?;
            return Ok(Nilmanifold::torus(d));
        }
        Err(Error::UnsupportedManifold(s.to_string()))
    }
}

impl Serialize for Nilmanifold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Nilmanifold {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, q_from_f64};
    use rand::{Rng, SeedableRng};

    fn random_point(rng: &mut impl Rng, dim: usize) -> Vec<Q> {
        (0..dim).map(|_| q_from_f64(rng.gen_range(-3.0..3.0)).unwrap()).collect()
    }

    #[test]
    fn heisenberg_group_law() {
        let h = Nilmanifold::heisenberg();
        let a = vec![q_frac(1, 2), q_frac(3, 2), q_frac(1, 3)];
        let e = h.mul(&a, &h.inv(&a));
        assert_eq!(e, h.identity());
        let e = h.mul(&h.inv(&a), &a);
        assert_eq!(e, h.identity());
    }

    #[test]
    fn reduction_is_lattice_invariant() {
        let h = Nilmanifold::heisenberg();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = random_point(&mut rng, 3);
            let lam: Vec<Q> = (0..3).map(|_| Q::from_integer(rng.gen_range(-4i64..5).into())).collect();
            let moved = h.mul(&x, &lam);
            assert_eq!(h.reduce(&x), h.reduce(&moved));
            let r = h.reduce(&x);
            assert!(r.iter().all(|c| *c >= Q::zero() && *c < Q::from_integer(1.into())));
        }
    }

    #[test]
    fn metric_triangle_inequality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for m in [Nilmanifold::heisenberg(), Nilmanifold::torus(3)] {
            for _ in 0..500 {
                let (a, b, c) = (random_point(&mut rng, 3), random_point(&mut rng, 3), random_point(&mut rng, 3));
                assert!(m.distance(&a, &c) <= m.distance(&a, &b) + m.distance(&b, &c) + 1e-12);
            }
        }
    }

    #[test]
    fn descriptor_strings() {
        assert_eq!("torus:2".parse::<Nilmanifold>().unwrap().dim(), 2);
        assert_eq!("heisenberg".parse::<Nilmanifold>().unwrap().to_string(), "heisenberg");
        assert!(matches!("sl2".parse::<Nilmanifold>(), Err(Error::UnsupportedManifold(_))));
    }
}
