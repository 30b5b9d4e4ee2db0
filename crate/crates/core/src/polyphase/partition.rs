//! Degree reduction and the constructive near-constant partition of a phase.
//!
//! One reduction step picks a multiplier `w` for which the leading binomial
//! coefficient `γ` of the phase (along `P`) satisfies `||γ w^s|| = ε₀`
//! small, splits `P` into the `w` residue classes and cuts each class into
//! blocks. On a block of length `L` with local index `u` the phase is
//! `c C(u, s) + lower(u)` with `|c| = ε₀`; subtracting `(c/s!)·M(u)`, where
//! `M` is the monic Chebyshev polynomial of `[0, L-1]`, leaves a phase of
//! degree `s - 1` and moves every value by at most `|c|·2((L-1)/4)^s/s!`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::walker::phase_residues;
use super::weyl::{weyl_min, weyl_scan, WeylWitness};
use super::PolyPhase;
use crate::cert::{PartitionCertificate, Source};
use crate::error::{Error, Result};
use crate::exact::{factorial, frac, q_from_f64, q_int, signed_frac, to_f64, Q};
use crate::poly::RealPoly;
use crate::progression::{balanced_floor, split_even, subdivide_balanced, Progression};

/// How the multiplier of a reduction step is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeylSearch {
    /// `weyl_min` over `n <= sqrt(len)`.
    #[default]
    Sqrt,
    /// Any `n <= bound` (default `len`), fewest predicted parts.
    MinParts { bound: Option<u64> },
    /// Any `n <= bound` (default `len`), longest guaranteed part.
    MaxFloor { bound: Option<u64> },
}

/// How the total `ε` is shared between the degrees of a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BudgetSplit {
    /// `ε_j = ε (6/π²) / j²`.
    #[default]
    Basel,
    /// `ε_j = ε / (j² Σ_{i<=s} i^-2)` for a phase of degree `s`.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseOptions {
    pub weyl: WeylSearch,
    pub split: BudgetSplit,
}

#[derive(Debug, Clone)]
pub struct ReducedPart {
    pub part: Progression,
    /// Phase of degree at most `s - 1` in the original variable.
    pub phase: PolyPhase,
    /// Exhaustive `diam_Q(φ - ψ_Q)`.
    pub deviation: Q,
}

#[derive(Debug, Clone)]
pub struct ReducedPartition {
    pub parts: Vec<ReducedPart>,
    pub degree: usize,
    pub weyl: WeylWitness,
    /// Multiplier actually used (equals `weyl.n` under [`WeylSearch::Sqrt`]).
    pub mult: u64,
    pub block: u64,
    /// Guaranteed minimum part length, `balanced_floor(len, mult, block)`.
    pub length_floor: u64,
}

/// Largest block length `L` with `4|c| (L-1)^s <= θ s! 4^s`, capped at `cap`.
fn block_length(c: &Q, s: usize, theta: &Q, cap: u64) -> u64 {
    if c.is_zero() {
        return cap.max(1);
    }
    let rhs = theta * Q::from_integer(factorial(s as u32) * BigInt::from(4).pow(s as u32));
    let lhs_unit = c.abs() * q_int(4);
    let fits = |l: u64| -> bool {
        let lm = Q::from_integer(BigInt::from(l - 1).pow(s as u32));
        &lhs_unit * lm <= rhs
    };
    let guess = {
        let ratio = to_f64(&rhs) / to_f64(&lhs_unit);
        let g = ratio.powf(1.0 / s as f64).floor();
        if g.is_finite() && g >= 0.0 { (g as u64).saturating_add(1) } else { cap }
    };
    let mut l = guess.clamp(1, cap.max(1));
    while l > 1 && !fits(l) {
        l -= 1;
    }
    while l < cap && fits(l + 1) {
        l += 1;
    }
    l
}

/// Monic Chebyshev polynomial of `[0, span]` in `u`, degree `s`.
fn chebyshev_monic(s: usize, span: u64) -> RealPoly {
    let x = RealPoly::var();
    let mut t_prev = RealPoly::constant(Q::one());
    let mut t = x.clone();
    if s == 0 {
        return t_prev;
    }
    for _ in 1..s {
        let next = &(&x * &t).scale(&q_int(2)) - &t_prev;
        t_prev = std::mem::replace(&mut t, next);
    }
    let span_q = q_int(span as i64);
    let inner = t.compose_affine(&(q_int(2) / &span_q), &q_int(-1));
    let quarter = &span_q / q_int(4);
    let mut lead = q_int(2);
    for _ in 0..s {
        lead *= &quarter;
    }
    inner.scale(&lead)
}

fn local_coeffs(phi: &PolyPhase, p: &Progression) -> Vec<Q> {
    phi.compose_affine(p.step(), p.base()).binomial_coeffs()
}

fn degree_of(coeffs: &[Q]) -> usize {
    coeffs.iter().rposition(|x| !x.is_zero()).unwrap_or(0)
}

/// Degree of `φ` as a function on `P` (via the local binomial expansion).
pub(crate) fn local_degree(phi: &PolyPhase, p: &Progression) -> usize {
    degree_of(&local_coeffs(phi, p))
}

/// `ψ_Q` for one block: lower-degree local part plus a Chebyshev correction,
/// expressed back in the original variable.
fn block_phase(phi: &PolyPhase, q: &Progression, s: usize) -> PolyPhase {
    let local = local_coeffs(phi, q);
    let mut lift: Vec<Q> = local.clone();
    lift.resize(s + 1, Q::zero());
    let c = signed_frac(&lift[s]);
    let real = if q.len() == 1 || c.is_zero() {
        lift[s] = Q::zero();
        RealPoly::from_binomial(&lift)
    } else {
        lift[s] = c.clone();
        let m = chebyshev_monic(s, q.len() - 1);
        let corr = m.scale(&(c / Q::from_integer(factorial(s as u32))));
        &RealPoly::from_binomial(&lift) - &corr
    };
    // u = (n - base) / step.
    let step = q_int(q.step());
    let back = real.compose_affine(&step.recip(), &(-q_int(q.base()) / &step));
    PolyPhase::from_real_poly(&back)
}

fn class_lengths(len: u64, w: u64) -> (u64, u64, u64) {
    (len / w, len % w, w - len % w)
}

fn predicted(len: u64, w: u64, l: u64) -> (u64, u64) {
    let (q, long, short) = class_lengths(len, w);
    let parts = long * (q + 1).div_ceil(l) + if q > 0 { short * q.div_ceil(l) } else { 0 };
    (parts, balanced_floor(len, w, l))
}

fn choose_mult(gamma: &Q, s: usize, len: u64, theta: &Q, how: WeylSearch) -> (u64, Q) {
    let den = frac(gamma).denom().clone();
    let (bound, maximize_floor) = match how {
        WeylSearch::Sqrt => {
            let w = weyl_min(gamma, s as u32, len);
            return (w.n, w.exact);
        }
        WeylSearch::MinParts { bound } => (bound.unwrap_or(len), false),
        WeylSearch::MaxFloor { bound } => (bound.unwrap_or(len), true),
    };
    let bound = bound.clamp(1, len);
    let scan = weyl_scan(gamma, s as u32, bound);
    let mut best: Option<(u64, u64, u64, Q)> = None;
    for (i, num) in scan.iter().enumerate() {
        let w = i as u64 + 1;
        let v = Q::new(num.clone(), den.clone());
        let cap = len.div_ceil(w);
        let l = block_length(&v, s, theta, cap);
        let (parts, floor) = predicted(len, w, l);
        let better = match &best {
            None => true,
            Some((_, bp, bf, _)) => {
                if maximize_floor {
                    floor > *bf || (floor == *bf && parts < *bp)
                } else {
                    parts < *bp || (parts == *bp && floor > *bf)
                }
            }
        };
        if better {
            best = Some((w, parts, floor, v));
        }
    }
    let (w, _, _, v) = best.expect("bound >= 1");
    (w, v)
}

/// One degree-reduction step with the default multiplier search.
pub fn reduce_degree_partition(phi: &PolyPhase, p: &Progression, theta: f64) -> Result<ReducedPartition> {
    reduce_degree_partition_with(phi, p, theta, WeylSearch::Sqrt)
}

pub fn reduce_degree_partition_with(
    phi: &PolyPhase,
    p: &Progression,
    theta: f64,
    how: WeylSearch,
) -> Result<ReducedPartition> {
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::InvalidArgument(format!("target {theta} outside (0, 1/2]")));
    }
    if p.len() < 2 {
        return Err(Error::InvalidArgument("degree reduction needs at least two terms".into()));
    }
    if phi.degree() == 0 {
        return Err(Error::InvalidArgument("degree reduction needs a phase of degree >= 1".into()));
    }
    let theta_q = q_from_f64(theta)?;
    let local = local_coeffs(phi, p);
    let s = degree_of(&local);
    let len = p.len();
    if s == 0 {
        let psi = PolyPhase::binomial(vec![phi.eval(p.base())]);
        let w = weyl_min(&Q::zero(), 1, len);
        return Ok(ReducedPartition {
            parts: vec![ReducedPart { part: *p, phase: psi, deviation: Q::zero() }],
            degree: 0,
            weyl: w,
            mult: 1,
            block: len,
            length_floor: len,
        });
    }
    let gamma = local[s].clone();
    let weyl = weyl_min(&gamma, s as u32, len);
    let (mult, eps0) = choose_mult(&gamma, s, len, &theta_q, how);
    let block = block_length(&eps0, s, &theta_q, len.div_ceil(mult));
    let mut parts = Vec::new();
    let mut queue: Vec<Progression> = subdivide_balanced(p, mult, block)?;
    queue.reverse();
    while let Some(q) = queue.pop() {
        let psi = block_phase(phi, &q, s);
        let dev = phase_residues(&phi.sub(&psi), &q).diam();
        if dev <= theta_q {
            parts.push(ReducedPart { part: q, phase: psi, deviation: dev });
        } else {
            // Not reachable in exact arithmetic; kept as a sound fallback.
            for h in split_even(&q, 2)?.into_iter().rev() {
                queue.push(h);
            }
        }
    }
    let length_floor = balanced_floor(len, mult, block);
    Ok(ReducedPartition { parts, degree: s, weyl, mult, block, length_floor })
}

fn budget(eps: &Q, j: usize, top: usize, split: BudgetSplit) -> f64 {
    let jj = (j * j) as f64;
    let e = to_f64(eps);
    match split {
        BudgetSplit::Basel => e * 6.0 / (std::f64::consts::PI.powi(2) * jj),
        BudgetSplit::Normalized => {
            let h: f64 = (1..=top.max(1)).map(|i| 1.0 / (i * i) as f64).sum();
            e / (jj * h)
        }
    }
}

/// Partition of `P` on whose parts `φ` has circle diameter at most `ε`.
pub fn partition_polyphase(phi: &PolyPhase, p: &Progression, eps: f64) -> Result<PartitionCertificate> {
    partition_polyphase_with(phi, p, eps, PhaseOptions::default())
}

pub fn partition_polyphase_with(
    phi: &PolyPhase,
    p: &Progression,
    eps: f64,
    opts: PhaseOptions,
) -> Result<PartitionCertificate> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} outside (0, 1/2]")));
    }
    let eps_q = q_from_f64(eps)?;
    let top = local_degree(phi, p);
    let mut out: Vec<(Progression, Q)> = Vec::new();
    let mut stack: Vec<(Progression, PolyPhase)> = vec![(*p, phi.clone())];
    while let Some((q, psi)) = stack.pop() {
        let d = phase_residues(phi, &q).diam();
        if d <= eps_q || q.len() == 1 {
            out.push((q, d));
            continue;
        }
        let s = local_degree(&psi, &q);
        if s == 0 {
            for h in split_even(&q, 2)? {
                stack.push((h, psi.clone()));
            }
            continue;
        }
        let theta = budget(&eps_q, s, top, opts.split).min(0.5);
        let red = reduce_degree_partition_with(&psi, &q, theta, opts.weyl)?;
        for part in red.parts {
            stack.push((part.part, part.phase));
        }
    }
    out.sort_by_key(|(q, _)| (q.base(), q.step()));
    Ok(PartitionCertificate::new(
        Source::Phase { phase: phi.clone() },
        *p,
        eps,
        out.iter().map(|(q, _)| *q).collect(),
        out.iter().map(|(_, d)| to_f64(d)).collect(),
        None,
    ))
}

/// Result of [`rationalize_phase_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rationalized {
    pub q: u64,
    pub norm: f64,
    pub norm_exact: Q,
}

/// Smallest-norm multiplier `q <= qmax` for `q·φ` on `[1, N]`.
pub fn rationalize_phase(phi: &PolyPhase, n: u64, qmax: u64) -> Result<(u64, f64)> {
    rationalize_phase_with(phi, n, qmax, None).map(|r| (r.q, r.norm))
}

pub fn rationalize_phase_with(phi: &PolyPhase, n: u64, qmax: u64, ceiling: Option<f64>) -> Result<Rationalized> {
    if n == 0 || qmax == 0 {
        return Err(Error::InvalidArgument("N and Qmax must be positive".into()));
    }
    let window = Progression::new(1, 1, n)?;
    let d = phase_residues(phi, &window).diam();
    if d * q_int(10) > Q::one() {
        return Err(Error::PreconditionViolated(format!(
            "phase diameter {} on [1, {n}] exceeds 1/10",
            to_f64(&phase_residues(phi, &window).diam())
        )));
    }
    let mut best: Option<(u64, Q)> = None;
    for q in 1..=qmax {
        let v = phi.scale_int(q as i64).smoothness_norm_exact(n);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((q, v));
        }
    }
    let (q, v) = best.expect("qmax >= 1");
    if let Some(c) = ceiling {
        if to_f64(&v) > c {
            return Err(Error::NoQFound { qmax, ceiling: c });
        }
    }
    Ok(Rationalized { q, norm: to_f64(&v), norm_exact: v })
}
