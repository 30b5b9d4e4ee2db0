//! Brute-force reference implementations.
//!
//! Nothing here calls into the kernels it checks: phases, sequences,
//! manifold reduction and the catalog functions are re-evaluated from the
//! raw coefficients.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::budget;
use crate::cert::{Channel, PartitionCertificate, Source};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::gowers::{DenseSet, GroupFunction};
use crate::nil::{ManifoldKind, Nilmanifold, PolySequence};
use crate::polyphase::{Basis, PolyPhase};
use crate::progression::Progression;

/// Tolerance between a recorded diameter witness and its recomputation.
pub const WITNESS_TOL: f64 = 1e-9;

/// Number of `k`-term progressions with positive difference inside `A`.
pub fn brute_ap_count(a: &DenseSet, k: usize) -> Result<u64> {
    let m = a.members();
    if k == 0 {
        return Ok(0);
    }
    if k == 1 {
        return Ok(m.len() as u64);
    }
    budget::check((m.len() as u128).pow(2) * k as u128)?;
    let mut member = vec![false; a.n() as usize + 1];
    for &x in m {
        member[x as usize] = true;
    }
    let mut count = 0;
    for (i, &x) in m.iter().enumerate() {
        for &y in &m[i + 1..] {
            let d = y - x;
            let ok = (2..k as u64).all(|j| {
                let z = x + j * d;
                z <= a.n() && member[z as usize]
            });
            if ok {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `||f||_{U^k}` by summing over every cube `(x, h_1, .., h_k)`.
pub fn brute_gowers(f: &GroupFunction, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let m = f.modulus();
    budget::check(budget::pow_saturating(m as u128, k as u32 + 1))?;
    let v = f.values();
    let mut h = vec![0usize; k];
    let mut total = Complex64::zero();
    loop {
        for x in 0..m {
            let mut p = Complex64::new(1.0, 0.0);
            for w in 0..(1usize << k) {
                let mut pos = x;
                for (i, hi) in h.iter().enumerate() {
                    if w >> i & 1 == 1 {
                        pos += hi;
                    }
                }
                let z = v[pos % m];
                p *= if w.count_ones() % 2 == 1 { z.conj() } else { z };
            }
            total += p;
        }
        let mut i = 0;
        while i < k {
            h[i] += 1;
            if h[i] < m {
                break;
            }
            h[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    let avg = total.re / (m as f64).powi(k as i32 + 1);
    Ok(avg.max(0.0).powf(1.0 / (1u64 << k) as f64))
}

fn binom_big(n: i64, j: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn frac_q(x: &Q) -> Q {
    x - Q::from_integer(x.floor().to_integer())
}

/// `φ(n) mod 1`, evaluated directly from the stored coefficients.
pub fn phase_value(phi: &PolyPhase, n: i64) -> Q {
    let mut s = Q::zero();
    for (j, c) in phi.coeffs().iter().enumerate() {
        let w = match phi.basis() {
            Basis::Monomial => BigInt::from(n).pow(j as u32),
            Basis::Binomial => binom_big(n, j),
        };
        s += c.value() * Q::from_integer(w);
    }
    frac_q(&s)
}

/// Diameter in `R/Z` of a multiset of points of `[0, 1)`: one minus the
/// largest circular gap.
pub fn circular_diam(values: &mut [Q]) -> Q {
    if values.len() < 2 {
        return Q::zero();
    }
    values.sort();
    let mut gap = &values[0] + Q::one() - values.last().unwrap();
    for w in values.windows(2) {
        let g = &w[1] - &w[0];
        if g > gap {
            gap = g;
        }
    }
    let d = Q::one() - gap;
    let half = Q::new(BigInt::one(), BigInt::from(2));
    if d <= half {
        return d;
    }
    // Points spread over more than half the circle: the farthest point from
    // `a` is one of the two neighbours of `a + 1/2`.
    let dist = |a: &Q, b: &Q| {
        let t = frac_q(&(a - b));
        if t > half {
            Q::one() - t
        } else {
            t
        }
    };
    let mut best = Q::zero();
    for a in values.iter() {
        let target = frac_q(&(a + &half));
        let i = values.partition_point(|v| v < &target);
        for j in [i % values.len(), (i + values.len() - 1) % values.len()] {
            let t = dist(a, &values[j]);
            if t > best {
                best = t;
            }
        }
    }
    best
}

/// Exact `diam_P(φ)` in `R/Z`.
pub fn brute_phase_diam(phi: &PolyPhase, p: &Progression) -> Result<Q> {
    if p.len() > 1_000_000 {
        return Err(Error::PreconditionViolated("progression longer than 10^6".into()));
    }
    let mut vals: Vec<Q> = p.elements().map(|n| phase_value(phi, n)).collect();
    Ok(circular_diam(&mut vals))
}

fn poly_value(c: &[Q], n: i64) -> Q {
    let x = Q::from_integer(BigInt::from(n));
    c.iter().rev().fold(Q::zero(), |acc, ci| acc * &x + ci)
}

/// Fundamental-domain coordinates of `g(n)Γ`.
pub fn nil_point(m: &Nilmanifold, g: &PolySequence, n: i64) -> Vec<Q> {
    let raw: Vec<Q> = g.coords.iter().map(|c| poly_value(c.coeffs(), n)).collect();
    match m.kind {
        ManifoldKind::Torus(_) => raw.iter().map(frac_q).collect(),
        ManifoldKind::Heisenberg => {
            let (x, y, z) = (&raw[0], &raw[1], &raw[2]);
            let fy = Q::from_integer(y.floor().to_integer());
            vec![frac_q(x), frac_q(y), frac_q(&(z - x * fy))]
        }
    }
}

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

fn json_ints(v: &Value, key: &str) -> Result<Vec<i64>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("function field {key}")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::Parse(format!("function field {key}"))))
        .collect()
}

/// Catalog function value at fundamental-domain coordinates `u`.
pub fn catalog_value(f: &Value, u: &[Q]) -> Result<Complex64> {
    let kind = f.get("kind").and_then(Value::as_str).unwrap_or("");
    let dot = |k: &[i64]| -> f64 {
        let s = k.iter().zip(u).fold(Q::zero(), |acc, (ki, ui)| acc + ui * Q::from_integer(BigInt::from(*ki)));
        frac_q(&s).to_f64().unwrap_or(0.0)
    };
    let sin2 = |x: &Q| (PI * x.to_f64().unwrap_or(0.0)).sin().powi(2);
    let inner = || -> Result<Complex64> {
        catalog_value(f.get("of").ok_or_else(|| Error::Parse("function field of".into()))?, u)
    };
    Ok(match kind {
        "const" => Complex64::new(
            f.get("re").and_then(Value::as_f64).unwrap_or(1.0),
            f.get("im").and_then(Value::as_f64).unwrap_or(0.0),
        ),
        "character" => e(dot(&json_ints(f, "k")?)),
        "cutoff" => {
            let axis = f.get("axis").and_then(Value::as_u64).ok_or_else(|| Error::Parse("function field axis".into()))?;
            e(dot(&json_ints(f, "k")?)) * sin2(&u[axis as usize])
        }
        "vertical" => {
            let m = f.get("m").and_then(Value::as_i64).ok_or_else(|| Error::Parse("function field m".into()))?;
            e(frac_q(&(&u[2] * Q::from_integer(BigInt::from(m)))).to_f64().unwrap_or(0.0)) * sin2(&u[1])
        }
        "re" => Complex64::new(inner()?.re, 0.0),
        "im" => Complex64::new(inner()?.im, 0.0),
        other => return Err(Error::UnsupportedManifold(format!("function kind '{other}' has no reference evaluator"))),
    })
}

/// Largest pairwise distance among complex values.
pub fn pairwise_diam(values: &[Complex64]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

/// Exact pairwise `diam_P(F(g(n)Γ))`.
pub fn brute_nil_diam(m: &Nilmanifold, g: &PolySequence, f: &Value, p: &Progression) -> Result<f64> {
    if p.len() > 1_000_000 {
        return Err(Error::PreconditionViolated("progression longer than 10^6".into()));
    }
    budget::check((p.len() as u128).pow(2) / 2)?;
    let vals: Vec<Complex64> = p.elements().map(|n| catalog_value(f, &nil_point(m, g, n))).collect::<Result<_>>()?;
    Ok(pairwise_diam(&vals))
}

/// Diameter of the certificate's source on `p`, as an `f64`.
pub fn brute_diam(source: &Source, p: &Progression) -> Result<f64> {
    match source {
        Source::Phase { phase } => Ok(brute_phase_diam(phase, p)?.to_f64().unwrap_or(f64::NAN)),
        Source::Nil { manifold, sequence, function } => brute_nil_diam(manifold, sequence, function, p),
    }
}

/// Size of the largest subset of `[1, N]` without a `k`-term progression.
pub fn max_ap_free(n: u64, k: usize) -> Result<u64> {
    if k < 3 {
        return Err(Error::InvalidArgument("k must be at least 3".into()));
    }
    if n > 64 {
        return Err(Error::BudgetExceeded { needed: 1u128 << n.min(127), budget: budget::work_budget() });
    }
    let mut table = vec![0u64; n as usize + 1];
    for len in 1..=n as usize {
        let mut chosen = Vec::with_capacity(len);
        let mut best = table[len - 1];
        search(len, k, 1, &mut chosen, &table, &mut best);
        table[len] = best;
    }
    Ok(table[n as usize])
}

fn closes_ap(chosen: &[usize], x: usize, k: usize) -> bool {
    let has = |y: usize| chosen.binary_search(&y).is_ok();
    let mut d = 1;
    while (k - 1) * d < x {
        if (1..k).all(|j| has(x - j * d)) {
            return true;
        }
        d += 1;
    }
    false
}

fn search(len: usize, k: usize, x: usize, chosen: &mut Vec<usize>, table: &[u64], best: &mut u64) {
    if x > len {
        *best = (*best).max(chosen.len() as u64);
        return;
    }
    // The tail [x, len] is a translate of [1, len - x + 1].
    if x > 1 && chosen.len() as u64 + table[len - x + 1] <= *best {
        return;
    }
    if !closes_ap(chosen, x, k) {
        chosen.push(x);
        search(len, k, x + 1, chosen, table, best);
        chosen.pop();
    }
    search(len, k, x + 1, chosen, table, best);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub reasons: Vec<String>,
    /// First offending part, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<usize>,
    pub parts_checked: usize,
    pub max_diam: f64,
}

/// Independent re-verification: disjoint exact cover of the progression,
/// every recomputed diameter within `epsilon` and matching its witness,
/// and consistent metadata.
pub fn verify(cert: &PartitionCertificate) -> Result<VerifyReport> {
    let mut reasons: Vec<String> = Vec::new();
    let mut first: Option<usize> = None;
    let mut flag = |r: &str, i: Option<usize>, reasons: &mut Vec<String>| {
        if !reasons.iter().any(|x| x == r) {
            reasons.push(r.to_string());
        }
        if first.is_none() {
            first = i;
        }
    };
    let p = cert.progression;
    let channel_ok = matches!(
        (&cert.channel, &cert.source),
        (Channel::Polyphase, Source::Phase { .. }) | (Channel::Nilsequence, Source::Nil { .. })
    );
    let min_len = cert.parts.iter().map(|q| q.len()).min().unwrap_or(0);
    if !channel_ok
        || cert.part_count != cert.parts.len()
        || cert.diam_witness.len() != cert.parts.len()
        || cert.min_len != min_len
        || cert.epsilon.is_nan()
        || cert.epsilon <= 0.0
    {
        flag("metadata-mismatch", None, &mut reasons);
    }
    let total: u128 = cert.parts.iter().map(|q| q.len() as u128).sum();
    if total > 4 * p.len() as u128 + 16 {
        flag("parts-not-disjoint", None, &mut reasons);
    } else {
        let mut seen = vec![false; p.len() as usize];
        for (i, q) in cert.parts.iter().enumerate() {
            for x in q.elements() {
                match p.index_of(x) {
                    None => flag("part-outside-progression", Some(i), &mut reasons),
                    Some(j) if seen[j as usize] => flag("parts-not-disjoint", Some(i), &mut reasons),
                    Some(j) => seen[j as usize] = true,
                }
            }
        }
        if seen.iter().any(|s| !s) {
            flag("coverage-gap", None, &mut reasons);
        }
    }
    let mut max_diam: f64 = 0.0;
    for (i, q) in cert.parts.iter().enumerate() {
        let d = brute_diam(&cert.source, q)?;
        max_diam = max_diam.max(d);
        if d > cert.epsilon {
            flag("diam-exceeds-epsilon", Some(i), &mut reasons);
        }
        match cert.diam_witness.get(i) {
            Some(w) if (w - d).abs() <= WITNESS_TOL => {}
            Some(_) => flag("witness-mismatch", Some(i), &mut reasons),
            None => {}
        }
    }
    Ok(VerifyReport { ok: reasons.is_empty(), reasons, part: first, parts_checked: cert.parts.len(), max_diam })
}
