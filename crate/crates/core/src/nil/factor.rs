//! Factorisation `g = β g' γ` of a polynomial sequence along a progression.
//!
//! With `t ∈ [1, N]` indexing `P`, the phase `η∘g` has binomial coefficients
//! `α_j`. Choosing `q` by rationalisation, `α_j = r_j/q + σ_j (+ integer)`
//! with small `σ_j`. The rational part `c(t)` and the smooth part `b(t)` are
//! lifted along a rational vector `v` with `k·v = 1`; whatever remains of
//! `g` has `η∘g' = 0` exactly and so lives in the subgroup `ker η`.

use num_traits::{One, Zero};

use super::embed::Embedding;
use super::manifold::{ManifoldKind, Nilmanifold};
use super::sequence::{HorizontalCharacter, PolySequence};
use crate::error::{Error, Result};
use crate::exact::{frac, q_frac, q_int, round_half_up, to_f64, Q};
use crate::poly::RealPoly;
use crate::polyphase::{rationalize_phase_with, PolyPhase};
use crate::progression::Progression;

#[derive(Debug, Clone)]
pub struct Factorization {
    pub beta: PolySequence,
    pub g_prime: PolySequence,
    pub gamma: PolySequence,
    /// `ker η` as a torus, with its embedding into the ambient group.
    pub subgroup: Nilmanifold,
    pub embedding: Embedding,
    /// `g'` in subgroup coordinates, `ι^{-1}(g')`.
    pub h: PolySequence,
    pub q: u64,
    /// Smallest `p` (along `P`, in units of the original variable) with
    /// `γ(n)^{-1} γ(n + p) ∈ Γ`.
    pub gamma_period: u64,
    /// Measured `C` in `d(β(n), β(n')) <= C |n - n'| / len(P)`.
    pub smoothness: f64,
}

/// `(U, U⁻¹, g)`.
pub type Completion = (Vec<Vec<i64>>, Vec<Vec<i64>>, i64);

/// Unimodular `U` and its inverse with `kᵀ U = (g, 0, ..., 0)`, `g > 0`.
pub fn unimodular_completion(k: &[i64]) -> Result<Completion> {
    let d = k.len();
    if k.iter().all(|&x| x == 0) {
        return Err(Error::InvalidArgument("trivial horizontal character".into()));
    }
    let mut a: Vec<i64> = k.to_vec();
    let mut u: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    let mut ui = u.clone();
    loop {
        let nz: Vec<usize> = (0..d).filter(|&i| a[i] != 0).collect();
        if nz.len() == 1 {
            break;
        }
        let p = *nz.iter().min_by_key(|&&i| a[i].unsigned_abs()).unwrap();
        for &j in &nz {
            if j == p {
                continue;
            }
            let qt = a[j].div_euclid(a[p]);
            if qt == 0 {
                continue;
            }
            a[j] -= qt * a[p];
            for row in u.iter_mut() {
                row[j] -= qt * row[p];
            }
            let rj = ui[j].clone();
            for (x, y) in ui[p].iter_mut().zip(&rj) {
                *x += qt * y;
            }
        }
    }
    let p = (0..d).find(|&i| a[i] != 0).unwrap();
    if p != 0 {
        a.swap(0, p);
        for row in u.iter_mut() {
            row.swap(0, p);
        }
        ui.swap(0, p);
    }
    if a[0] < 0 {
        a[0] = -a[0];
        for row in u.iter_mut() {
            row[0] = -row[0];
        }
        for x in ui[0].iter_mut() {
            *x = -*x;
        }
    }
    Ok((u, ui, a[0]))
}

fn column(u: &[Vec<i64>], j: usize) -> Vec<i64> {
    u.iter().map(|row| row[j]).collect()
}

/// Smallest `p <= limit` with `x(t)^{-1} x(t + p)` integer-valued.
fn lattice_period(m: &Nilmanifold, x: &PolySequence, limit: u64) -> Option<u64> {
    let inv = x.inv(m);
    (1..=limit).find(|&p| {
        let shifted = x.compose_affine(&Q::one(), &q_int(p as i64));
        inv.mul(m, &shifted).is_integer_valued()
    })
}

const PERIOD_LIMIT: u64 = 1 << 16;

pub fn factorize_polyseq(
    m: &Nilmanifold,
    g: &PolySequence,
    p: &Progression,
    eta: &HorizontalCharacter,
    qmax: u64,
) -> Result<Factorization> {
    g.check(m)?;
    if eta.is_trivial() {
        return Err(Error::InvalidArgument("horizontal character must be nontrivial".into()));
    }
    let phi_n = eta.apply_real(m, g)?;
    // n = base + step (t - 1); t = (n - base + step) / step.
    let step = q_int(p.step());
    let base = q_int(p.base());
    let phi_t = phi_n.compose_affine(&step, &(&base - &step));
    let lifted = phi_t.binomial_coeffs();
    let alpha: Vec<Q> = lifted.iter().map(frac).collect();
    let rat = rationalize_phase_with(&PolyPhase::binomial(alpha.clone()), p.len(), qmax, None)?;
    let qq = q_int(rat.q as i64);
    let mut b_coeffs = vec![Q::zero(); lifted.len()];
    for j in 1..lifted.len() {
        let r = Q::from_integer(round_half_up(&(&alpha[j] * &qq)));
        b_coeffs[j] = &alpha[j] - r / &qq;
    }
    let c_coeffs: Vec<Q> = lifted.iter().zip(&b_coeffs).map(|(a, b)| a - b).collect();
    let to_n = |coeffs: &[Q]| RealPoly::from_binomial(coeffs).compose_affine(&step.recip(), &((&step - &base) / &step));
    let b = to_n(&b_coeffs);
    let c = to_n(&c_coeffs);

    let (u, ui, g0) = unimodular_completion(&eta.k)?;
    let v: Vec<Q> = column(&u, 0).iter().map(|&x| q_frac(x, g0)).collect();
    let hd = m.horizontal_dim();
    let along = |s: &RealPoly| -> PolySequence {
        let mut coords: Vec<RealPoly> = v.iter().map(|vi| s.scale(vi)).collect();
        coords.resize(m.dim(), RealPoly::zero());
        PolySequence::new(coords)
    };
    let beta = along(&b);
    let gamma = along(&c);
    let g_prime = beta.inv(m).mul(m, g).mul(m, &gamma.inv(m));

    let (subgroup, embedding) = match m.kind {
        ManifoldKind::Torus(d) => (
            Nilmanifold::torus(d - 1),
            Embedding::Torus { dim: d, cols: (1..d).map(|j| column(&u, j)).collect(), inv_rows: ui[1..].to_vec() },
        ),
        ManifoldKind::Heisenberg => {
            let w = column(&u, 1);
            (Nilmanifold::torus(2), Embedding::Heisenberg { u: [w[0], w[1]], row: [ui[1][0], ui[1][1]] })
        }
    };
    debug_assert_eq!(hd, eta.k.len());
    let h = embedding.pull_seq(&g_prime);

    let gamma_t = gamma.compose_affine(&step, &(&base - &step));
    let period_t = lattice_period(m, &gamma_t, PERIOD_LIMIT)
        .ok_or_else(|| Error::PreconditionViolated("rational part has no period below the search limit".into()))?;
    let gamma_period = period_t.saturating_mul(p.step().unsigned_abs());

    let smoothness = measure_smoothness(m, &beta, p);
    Ok(Factorization { beta, g_prime, gamma, subgroup, embedding, h, q: rat.q, gamma_period, smoothness })
}

/// `max len·|β(n) - β(n')|_∞ / |n - n'|` over sampled pairs, on raw
/// coordinates (no lattice reduction).
fn measure_smoothness(m: &Nilmanifold, beta: &PolySequence, p: &Progression) -> f64 {
    let len = p.len();
    if len < 2 {
        return 0.0;
    }
    let picks: Vec<u64> = {
        let mut v: Vec<u64> = (0..16).map(|i| i * (len - 1) / 15).collect();
        v.dedup();
        v
    };
    let vals: Vec<(i64, Vec<Q>)> = picks.iter().map(|&i| (p.at(i), beta.eval(p.at(i)))).collect();
    let mut c: f64 = 0.0;
    for (i, (n, a)) in vals.iter().enumerate() {
        for (n2, b2) in vals.iter().skip(i + 1) {
            let dist = a.iter().zip(b2).map(|(x, y)| to_f64(&(x - y)).abs()).fold(0.0, f64::max);
            let gap = (n - n2).unsigned_abs() as f64;
            c = c.max(dist * len as f64 / gap.max(1.0));
        }
    }
    let _ = m;
    c
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::exact::q_from_f64;

    fn identity_gap(m: &Nilmanifold, g: &PolySequence, f: &Factorization, p: &Progression) -> f64 {
        let rebuilt = f.beta.mul(m, &f.g_prime).mul(m, &f.gamma);
        p.elements()
            .map(|n| {
                g.eval(n).iter().zip(rebuilt.eval(n)).map(|(a, b)| to_f64(&(a - b)).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn unimodular() {
        for k in [vec![2, 3], vec![0, 1], vec![-4, 6, 9], vec![5], vec![0, 0, -3]] {
            let (u, ui, g) = unimodular_completion(&k).unwrap();
            let d = k.len();
            for j in 0..d {
                let s: i64 = (0..d).map(|i| k[i] * u[i][j]).sum();
                assert_eq!(s, if j == 0 { g } else { 0 });
                for i in 0..d {
                    let e: i64 = (0..d).map(|l| u[i][l] * ui[l][j]).sum();
                    assert_eq!(e, i64::from(i == j));
                }
            }
        }
    }

    #[test]
    fn torus_rational_plus_drift() {
        let t1 = Nilmanifold::torus(1);
        let alpha = q_frac(1, 3) + q_frac(1, 1_000_000);
        let g = PolySequence::new(vec![RealPoly::monomial(alpha, 1)]);
        let p = Progression::new(3, 3, 200).unwrap();
        let f = factorize_polyseq(&t1, &g, &p, &HorizontalCharacter::new(vec![1]), 10).unwrap();
        assert_eq!(f.gamma.coords[0], RealPoly::monomial(q_frac(1, 3), 1));
        assert_eq!(f.beta.coords[0], RealPoly::monomial(q_frac(1, 1_000_000), 1));
        assert!(f.g_prime.coords[0].is_zero());
        assert_eq!(f.subgroup.dim(), 0);
        assert_eq!(f.gamma_period, 3);
        assert_eq!(identity_gap(&t1, &g, &f, &p), 0.0);
    }

    #[test]
    fn heisenberg_trivial_phase() {
        let h = Nilmanifold::heisenberg();
        let g = PolySequence::linear_f64(&[std::f64::consts::SQRT_2, 0.0, 0.0]).unwrap();
        let p = Progression::interval(1, 100).unwrap();
        let f = factorize_polyseq(&h, &g, &p, &HorizontalCharacter::new(vec![0, 1]), 10).unwrap();
        assert!(f.beta.coords.iter().all(RealPoly::is_zero));
        assert!(f.gamma.coords.iter().all(RealPoly::is_zero));
        assert_eq!(f.g_prime, g);
        assert_eq!(f.subgroup.dim(), 2);
        assert_eq!(f.embedding.apply_seq(&f.h), g);
    }

    #[test]
    fn torus_two_dims() {
        let t2 = Nilmanifold::torus(2);
        let a = q_frac(1, 2) + q_frac(1, 10_000_000);
        let g = PolySequence::new(vec![
            RealPoly::monomial(a, 1),
            RealPoly::monomial(q_from_f64(3f64.sqrt()).unwrap(), 1),
        ]);
        let p = Progression::new(2, 2, 500).unwrap();
        let f = factorize_polyseq(&t2, &g, &p, &HorizontalCharacter::new(vec![1, 0]), 10).unwrap();
        assert_eq!(f.gamma.coords[0], RealPoly::monomial(q_frac(1, 2), 1));
        assert!(f.gamma.coords[1].is_zero());
        assert_eq!(f.gamma_period, 2);
        assert!(f.g_prime.coords[0].is_zero());
        assert_eq!(f.g_prime.coords[1], g.coords[1]);
        assert!(f.smoothness < 1.0);
        assert_eq!(identity_gap(&t2, &g, &f, &p), 0.0);
    }

    #[test]
    fn heisenberg_identity_and_subgroup() {
        let h = Nilmanifold::heisenberg();
        let g = PolySequence::new(vec![
            RealPoly::new(vec![q_frac(1, 5), q_from_f64(0.2500003).unwrap()]),
            RealPoly::new(vec![Q::zero(), q_from_f64(0.7).unwrap(), q_frac(1, 3_000_000)]),
            RealPoly::new(vec![Q::zero(), q_frac(1, 7)]),
        ]);
        let p = Progression::new(1, 4, 50).unwrap();
        let eta = HorizontalCharacter::new(vec![1, 0]);
        let f = factorize_polyseq(&h, &g, &p, &eta, 10).unwrap();
        assert_eq!(identity_gap(&h, &g, &f, &p), 0.0);
        assert!(eta.apply_real(&h, &f.g_prime).unwrap().is_zero());
        assert_eq!(f.embedding.apply_seq(&f.h), f.g_prime);
        let shift = f.gamma_period as i64;
        for n in p.elements().take(10) {
            let step = h.mul(&h.inv(&f.gamma.eval(n)), &f.gamma.eval(n + shift));
            assert!(step.iter().all(|c| c.is_integer()));
        }
    }

    #[test]
    fn rejects_wide_phase() {
        let t1 = Nilmanifold::torus(1);
        let g = PolySequence::new(vec![RealPoly::monomial(q_frac(1, 3), 1)]);
        let p = Progression::interval(1, 10).unwrap();
        assert!(matches!(
            factorize_polyseq(&t1, &g, &p, &HorizontalCharacter::new(vec![1]), 10),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
