//! Exact evaluation of a phase along a progression.
//!
//! Along `P` the phase becomes `ψ(i) = Σ B_j C(i, j) / D` for integers `B_j`
//! and a common denominator `D`, so the residues `D·ψ(i) mod D` follow from
//! integer forward differences.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::PolyPhase;
use crate::exact::{lcm_denoms, Q};
use crate::progression::Progression;

/// Values `v_i / denom` of a phase at consecutive elements of a progression.
#[derive(Debug, Clone)]
pub enum Residues {
    Small { denom: u128, values: Vec<u128> },
    Big { denom: BigInt, values: Vec<BigInt> },
}

impl Residues {
    pub fn len(&self) -> usize {
        match self {
            Residues::Small { values, .. } => values.len(),
            Residues::Big { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> Q {
        match self {
            Residues::Small { denom, values } => Q::new(BigInt::from(values[i]), BigInt::from(*denom)),
            Residues::Big { denom, values } => Q::new(values[i].clone(), denom.clone()),
        }
    }

    /// Circle diameter of the values with indices in `range`.
    pub fn diam_range(&self, range: std::ops::Range<usize>) -> Q {
        match self {
            Residues::Small { denom, values } => {
                let mut v = values[range].to_vec();
                let d = small_diam(&mut v, *denom);
                Q::new(BigInt::from(d), BigInt::from(*denom))
            }
            Residues::Big { denom, values } => {
                let mut v = values[range].to_vec();
                let d = big_diam(&mut v, denom);
                Q::new(d, denom.clone())
            }
        }
    }

    pub fn diam(&self) -> Q {
        self.diam_range(0..self.len())
    }
}

const SMALL_LIMIT: u32 = 120;

/// Residues of `φ` at every element of `p`, in progression order.
pub fn phase_residues(phi: &PolyPhase, p: &Progression) -> Residues {
    let local = phi.compose_affine(p.step(), p.base()).binomial_coeffs();
    let denom = lcm_denoms(local.iter());
    let mut b: Vec<BigInt> = local.iter().map(|a| (a * Q::from_integer(denom.clone())).to_integer()).collect();
    if b.is_empty() {
        b.push(BigInt::zero());
    }
    let len = p.len() as usize;
    if denom.bits() <= SMALL_LIMIT as u64 {
        let d = denom.to_u128().unwrap();
        let mut diff: Vec<u128> = b.iter().map(|x| x.to_u128().unwrap()).collect();
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(diff[0]);
            for j in 0..diff.len().saturating_sub(1) {
                let s = diff[j] + diff[j + 1];
                diff[j] = if s >= d { s - d } else { s };
            }
        }
        Residues::Small { denom: d, values }
    } else {
        let mut diff = b;
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(diff[0].clone());
            for j in 0..diff.len().saturating_sub(1) {
                let s = &diff[j] + &diff[j + 1];
                diff[j] = if s >= denom { s - &denom } else { s };
            }
        }
        Residues::Big { denom, values }
    }
}

// For each point the farthest partner sits next to its antipode `x + d/2`;
// doubled values keep the comparison integral.
fn small_diam(v: &mut [u128], d: u128) -> u128 {
    v.sort_unstable();
    let n = v.len();
    let mut best = 0;
    for &x in v.iter() {
        let t = (2 * x + d) % (2 * d);
        let idx = v.partition_point(|&y| 2 * y < t);
        for k in [idx % n, (idx + n - 1) % n] {
            let e = x.abs_diff(v[k]);
            best = best.max(e.min(d - e));
        }
    }
    best
}

fn big_diam(v: &mut [BigInt], d: &BigInt) -> BigInt {
    v.sort_unstable();
    let n = v.len();
    let two_d = d * 2;
    let mut best = BigInt::zero();
    for x in v.iter() {
        let mut t = x * 2 + d;
        if t >= two_d {
            t -= &two_d;
        }
        let idx = v.partition_point(|y| y * 2 < t);
        for k in [idx % n, (idx + n - 1) % n] {
            let e = if x > &v[k] { x - &v[k] } else { &v[k] - x };
            let f = d - &e;
            let dist = if e < f { e } else { f };
            if dist > best {
                best = dist;
            }
        }
    }
    best
}

/// Exact circle diameter of `φ` over `P`, in `[0, 1/2]`.
pub fn diam_on(phi: &PolyPhase, p: &Progression) -> Q {
    phase_residues(phi, p).diam()
}

/// Circle diameter of arbitrary residues.
pub fn circle_diam(values: &[Q]) -> Q {
    if values.is_empty() {
        return Q::zero();
    }
    let denom = lcm_denoms(values.iter());
    let mut v: Vec<BigInt> = values
        .iter()
        .map(|x| (crate::exact::frac(x) * Q::from_integer(denom.clone())).to_integer())
        .collect();
    Q::new(big_diam(&mut v, &denom), denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{circle_dist, q_frac, to_f64};

    fn brute(phi: &PolyPhase, p: &Progression) -> Q {
        let vals: Vec<Q> = p.elements().map(|n| phi.eval(n)).collect();
        let mut best = Q::zero();
        for a in &vals {
            for b in &vals {
                let d = circle_dist(a, b);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    #[test]
    fn diam_examples() {
        let p = Progression::interval(1, 10).unwrap();
        assert_eq!(diam_on(&PolyPhase::binomial(vec![q_frac(2, 7)]), &p), Q::zero());
        let third = PolyPhase::monomial(vec![Q::zero(), q_frac(1, 3)]);
        assert_eq!(diam_on(&third, &p), q_frac(1, 3));
        let slow = PolyPhase::monomial_f64(&[0.0, 0.001]).unwrap();
        let d = to_f64(&diam_on(&slow, &Progression::interval(1, 100).unwrap()));
        assert!((d - 0.099).abs() < 1e-12);
    }

    #[test]
    fn residues_match_eval() {
        let phi = PolyPhase::monomial_f64(&[0.1, std::f64::consts::SQRT_2, 3f64.sqrt() / 2.0, 0.01]).unwrap();
        let p = Progression::new(-40, 7, 60).unwrap();
        let r = phase_residues(&phi, &p);
        for (i, n) in p.elements().enumerate() {
            assert_eq!(r.value(i), phi.eval(n));
        }
        assert_eq!(r.diam(), brute(&phi, &p));
    }

    #[test]
    fn big_denominators() {
        let huge = Q::new(BigInt::from(1), BigInt::from(3).pow(90u32));
        let phi = PolyPhase::binomial(vec![Q::zero(), huge.clone() * Q::from_integer(BigInt::from(5)), q_frac(1, 3)]);
        let p = Progression::new(3, 2, 40).unwrap();
        let r = phase_residues(&phi, &p);
        assert!(matches!(r, Residues::Big { .. }));
        for (i, n) in p.elements().enumerate() {
            assert_eq!(r.value(i), phi.eval(n));
        }
        assert_eq!(r.diam(), brute(&phi, &p));
        let vals: Vec<Q> = p.elements().map(|n| phi.eval(n)).collect();
        assert_eq!(circle_diam(&vals), brute(&phi, &p));
    }

    proptest::proptest! {
        #[test]
        fn diam_matches_pairwise(num in proptest::collection::vec(0i64..10_000, 1..4), den in 1i64..10_000,
                                 base in -100i64..100, step in 1i64..9, len in 1u64..80) {
            let phi = PolyPhase::binomial(num.iter().map(|&x| q_frac(x, den)).collect());
            let p = Progression::new(base, step, len).unwrap();
            proptest::prop_assert_eq!(diam_on(&phi, &p), brute(&phi, &p));
        }
    }
}
