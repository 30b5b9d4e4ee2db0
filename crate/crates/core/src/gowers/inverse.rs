//! Constructive inverse oracles: the largest Fourier coefficient for `U²`,
//! and a grid search over polynomial phases for higher `k`.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{e_frac, fourier, gowers_norm, GroupFunction};
use crate::budget;
use crate::error::{Error, Result};
use crate::exact::{q_frac, to_f64, Q};
use crate::nil::{nil_eval, LipschitzFunction, Nilmanifold, PolySequence};
use crate::polyphase::PolyPhase;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WitnessKind {
    /// `n -> e(r n / M)`.
    Fourier { r: usize },
    /// `n -> e(φ(n))`.
    Polyphase { phase: PolyPhase },
    /// `n -> F(g(n)Γ)`.
    Nilsequence { manifold: Nilmanifold, sequence: PolySequence, function: serde_json::Value },
}

/// A function the input correlates with.
///
/// `correlation` is `|E_{x ∈ Z_M} f(x) conj(w(x))|`; `delta` is the same sum
/// averaged over the support window of `f` instead of all of `Z_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseWitness {
    #[serde(flatten)]
    pub kind: WitnessKind,
    pub modulus: usize,
    pub correlation: f64,
    pub delta: f64,
}

impl InverseWitness {
    /// The witness as a function of `n`.
    pub fn value(&self, n: i64) -> Result<Complex64> {
        Ok(match &self.kind {
            WitnessKind::Fourier { r } => {
                let m = self.modulus as i64;
                e_frac(((*r as i64 * n).rem_euclid(m)) as f64 / m as f64)
            }
            WitnessKind::Polyphase { phase } => e_frac(to_f64(&phase.eval(n))),
            WitnessKind::Nilsequence { manifold, sequence, function } => {
                let f = LipschitzFunction::from_json(function)?;
                nil_eval(manifold, sequence, &f, n)
            }
        })
    }

    /// The phase `w = e(φ)` for phase-type witnesses.
    pub fn phase(&self) -> Option<PolyPhase> {
        match &self.kind {
            WitnessKind::Fourier { r } => {
                Some(PolyPhase::monomial(vec![Q::zero(), q_frac(*r as i64, self.modulus as i64)]))
            }
            WitnessKind::Polyphase { phase } => Some(phase.clone()),
            WitnessKind::Nilsequence { .. } => None,
        }
    }

    /// `(correlation, delta)` recomputed from scratch against `f`.
    pub fn recompute(&self, f: &GroupFunction) -> Result<(f64, f64)> {
        let mut s = Complex64::zero();
        for (x, v) in f.values().iter().enumerate() {
            if !v.is_zero() {
                s += v * self.value(x as i64)?.conj();
            }
        }
        Ok((s.norm() / f.modulus() as f64, s.norm() / f.support_len() as f64))
    }
}

fn witness(kind: WitnessKind, f: &GroupFunction, raw: f64) -> InverseWitness {
    let m = f.modulus();
    InverseWitness { kind, modulus: m, correlation: raw / m as f64, delta: raw / f.support_len() as f64 }
}

/// The largest Fourier coefficient of `f` (lowest frequency on ties), or
/// `NotFound` when `||f||_{U²} < δ`.
pub fn inverse_u2(f: &GroupFunction, delta: f64) -> Result<InverseWitness> {
    if !f.is_bounded() {
        return Err(Error::Unbounded(f.sup_norm()));
    }
    let u2 = gowers_norm(f, 2)?;
    if u2 < delta {
        return Err(Error::NotFound(format!("U2 norm {u2} below {delta}")));
    }
    let coeffs = fourier(f);
    let mut best = 0;
    for (r, c) in coeffs.iter().enumerate() {
        if c.norm() > coeffs[best].norm() {
            best = r;
        }
    }
    let raw = coeffs[best].norm() * f.modulus() as f64;
    Ok(witness(WitnessKind::Fourier { r: best }, f, raw))
}

fn pow_mod(x: u128, j: u32, g: u128) -> u128 {
    let mut acc = 1u128 % g;
    for _ in 0..j {
        acc = acc * x % g;
    }
    acc
}

/// Best correlation of `f` with `e(Σ_{j>=2} (a_j/grid) n^j + r n / M)` over
/// `a_j ∈ [0, grid)` and all `r`, for phases of degree `k - 2`. Returned
/// only when its `delta` reaches `threshold`.
///
/// This is a finite catalog: functions correlating only with genuinely
/// 2-step nilsequences can be missed.
pub fn catalog_inverse(f: &GroupFunction, k: usize, grid: u64, threshold: f64) -> Result<InverseWitness> {
    if k < 4 {
        return Err(Error::InvalidArgument("catalog search is for k >= 4".into()));
    }
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be positive".into()));
    }
    if !f.is_bounded() {
        return Err(Error::Unbounded(f.sup_norm()));
    }
    let m = f.modulus();
    let top = (k - 2) as u32;
    let combos = budget::pow_saturating(grid as u128, top - 1);
    let logm = (usize::BITS - m.leading_zeros()) as u128;
    budget::check(combos.saturating_mul(m as u128).saturating_mul(logm + 1))?;
    let plan = FftPlanner::new().plan_fft_forward(m);
    let g = grid as u128;
    let powers: Vec<Vec<u128>> = (2..=top).map(|j| (0..m).map(|x| pow_mod(x as u128, j, g)).collect()).collect();
    let decode = |mut c: u128| -> Vec<u64> {
        (0..top - 1)
            .map(|_| {
                let a = (c % g) as u64;
                c /= g;
                a
            })
            .collect()
    };
    let best = (0..combos as u64)
        .into_par_iter()
        .map(|c| {
            let a = decode(c as u128);
            let mut buf: Vec<Complex64> = (0..m)
                .map(|x| {
                    let mut t = 0u128;
                    for (aj, pj) in a.iter().zip(&powers) {
                        t = (t + *aj as u128 * pj[x]) % g;
                    }
                    f.values()[x] * e_frac(-(t as f64) / grid as f64)
                })
                .collect();
            plan.process(&mut buf);
            let (r, v) = buf
                .iter()
                .enumerate()
                .map(|(r, z)| (r, z.norm()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            (c, r, v)
        })
        .reduce(|| (u64::MAX, 0, -1.0), |p, q| if q.2 > p.2 || (q.2 == p.2 && q.0 < p.0) { q } else { p });
    let (c, r, raw) = best;
    let a = decode(c as u128);
    let mut coeffs = vec![Q::zero(), q_frac(r as i64, m as i64)];
    coeffs.extend(a.iter().map(|&aj| q_frac(aj as i64, grid as i64)));
    let w = witness(WitnessKind::Polyphase { phase: PolyPhase::monomial(coeffs) }, f, raw);
    if w.delta < threshold {
        return Err(Error::NotFound(format!("best catalog correlation {} below {threshold}", w.delta)));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gowers::{balanced, DenseSet};
    use rand::{Rng, SeedableRng};

    fn random_signs(m: usize, seed: u64) -> GroupFunction {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        GroupFunction::from_fn(m, |_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)).unwrap()
    }

    #[test]
    fn u2_examples() {
        let f = GroupFunction::character(64, 3).unwrap();
        let w = inverse_u2(&f, 0.5).unwrap();
        assert_eq!(w.kind, WitnessKind::Fourier { r: 3 });
        assert!((w.correlation - 1.0).abs() < 1e-12);

        let evens = DenseSet::new(100, (1..=50).map(|i| 2 * i).collect()).unwrap();
        let b = balanced(&evens, 3);
        let w = inverse_u2(&b, 0.01).unwrap();
        let WitnessKind::Fourier { r } = w.kind else { panic!() };
        assert!((r as i64 - b.modulus() as i64 / 2).abs() <= 1);
        assert!((w.delta - 0.5).abs() < 0.05);
        let (c, d) = w.recompute(&b).unwrap();
        assert!((c - w.correlation).abs() < 2f64.powi(-35) && (d - w.delta).abs() < 2f64.powi(-35));

        assert!(matches!(inverse_u2(&random_signs(256, 1), 0.5), Err(Error::NotFound(_))));
    }

    #[test]
    fn catalog_recovers_grid_quadratic() {
        let m = 64;
        let f = GroupFunction::from_fn(m, |n| e_frac(((5 * n * n) % 64) as f64 / 64.0)).unwrap();
        let w = catalog_inverse(&f, 4, 64, 0.5).unwrap();
        assert!((w.correlation - 1.0).abs() < 1e-9);
        let phase = w.phase().unwrap();
        assert_eq!(phase.coeff_values()[2], q_frac(5, 64));
        let (c, _) = w.recompute(&f).unwrap();
        assert!((c - w.correlation).abs() < 2f64.powi(-35));
    }

    #[test]
    fn catalog_rejects_noise() {
        assert!(matches!(catalog_inverse(&random_signs(128, 7), 4, 128, 0.5), Err(Error::NotFound(_))));
    }
}
