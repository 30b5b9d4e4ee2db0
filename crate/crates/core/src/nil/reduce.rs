//! Dimension reduction and the full near-constant partition of a nilsequence.

use num_complex::Complex64;

use super::embed::Embedding;
use super::factor::factorize_polyseq;
use super::function::LipschitzFunction;
use super::manifold::Nilmanifold;
use super::sequence::{horizontal_apply, HorizontalCharacter, PolySequence};
use super::{complex_diam, nil_eval};
use crate::cert::{PartitionCertificate, Source};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::polyphase::{partition_polyphase_with, BudgetSplit, PhaseOptions, WeylSearch};
use crate::progression::{split_even, Progression};

/// Largest `q` tried when rationalising a horizontal phase.
pub const QMAX: u64 = 8;

/// One part of a dimension reduction: on `part`, `F(g(n)Γ)` is within
/// `deviation` of `function(sequence(n))` on the smaller `manifold`.
#[derive(Debug, Clone)]
pub struct NilPiece {
    pub part: Progression,
    pub manifold: Nilmanifold,
    pub sequence: PolySequence,
    pub function: LipschitzFunction,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct DimensionReduction {
    pub pieces: Vec<NilPiece>,
    /// Character used for the factorisation (`None` for constant `F`).
    pub character: Option<HorizontalCharacter>,
    /// Shortest part produced.
    pub length_floor: u64,
}

fn point_piece(m: &Nilmanifold, g: &PolySequence, f: &LipschitzFunction, p: &Progression) -> NilPiece {
    let v = nil_eval(m, g, f, p.base());
    NilPiece {
        part: *p,
        manifold: Nilmanifold { complexity: m.complexity, ..Nilmanifold::point() },
        sequence: PolySequence::default(),
        function: LipschitzFunction::Const(v),
        deviation: 0.0,
    }
}

fn choose_character(m: &Nilmanifold, g: &PolySequence, p: &Progression) -> Result<(HorizontalCharacter, Vec<Progression>)> {
    let opts = PhaseOptions { weyl: WeylSearch::MinParts { bound: None }, split: BudgetSplit::Normalized };
    let mut best: Option<(HorizontalCharacter, Vec<Progression>)> = None;
    for i in 0..m.horizontal_dim() {
        let eta = HorizontalCharacter::basis(m.horizontal_dim(), i);
        let phase = horizontal_apply(m, &eta, g)?;
        let cert = partition_polyphase_with(&phase, p, 0.1, opts)?;
        if best.as_ref().is_none_or(|(_, b)| cert.parts.len() < b.len()) {
            best = Some((eta, cert.parts));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("manifold has no horizontal characters".into()))
}

struct Class<'a> {
    m: &'a Nilmanifold,
    f: &'a LipschitzFunction,
    beta: &'a PolySequence,
    gamma0: Vec<Q>,
    embed: &'a Embedding,
    h: PolySequence,
    elems: Vec<i64>,
    target: Vec<Complex64>,
    hvals: Vec<Vec<Q>>,
}

impl Class<'_> {
    fn function_for(&self, lo: usize, hi: usize) -> LipschitzFunction {
        let n0 = self.elems[lo + (hi - lo - 1) / 2];
        let offset = self.m.mul(&self.beta.eval(n0), &self.gamma0);
        LipschitzFunction::Pullback { parent: Box::new(self.f.clone()), offset, embed: self.embed.clone() }
    }

    fn deviation(&self, lo: usize, hi: usize) -> (f64, LipschitzFunction) {
        let fj = self.function_for(lo, hi);
        let src = self.embed.source();
        let dev = (lo..hi).map(|i| (fj.eval(&src, &self.hvals[i]) - self.target[i]).norm()).fold(0.0, f64::max);
        (dev, fj)
    }

    /// Longest block starting at `lo` whose deviation is within `budget`.
    fn grow(&self, lo: usize, budget: f64) -> (usize, f64, LipschitzFunction) {
        let rest = self.elems.len() - lo;
        let (d1, f1) = self.deviation(lo, lo + 1);
        let mut good = (1, d1, f1);
        let mut bad = None;
        let mut l = 2;
        while l <= rest {
            let (d, f) = self.deviation(lo, lo + l);
            if d <= budget {
                good = (l, d, f);
                l *= 2;
            } else {
                bad = Some(l);
                break;
            }
        }
        let mut hi_bad = bad.unwrap_or(rest + 1).min(rest + 1);
        if bad.is_none() && good.0 < rest {
            let (d, f) = self.deviation(lo, lo + rest);
            if d <= budget {
                return (rest, d, f);
            }
            hi_bad = rest;
        }
        let mut lo_good = good.0;
        while hi_bad - lo_good > 1 {
            let mid = lo_good + (hi_bad - lo_good) / 2;
            let (d, f) = self.deviation(lo, lo + mid);
            if d <= budget {
                lo_good = mid;
                good = (mid, d, f);
            } else {
                hi_bad = mid;
            }
        }
        good
    }
}

/// Partition `P` into pieces on which `F(g(n)Γ)` is within `eps` of a
/// nilsequence on a manifold of smaller dimension.
pub fn reduce_dimension(
    m: &Nilmanifold,
    g: &PolySequence,
    f: &LipschitzFunction,
    p: &Progression,
    eps: f64,
) -> Result<DimensionReduction> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} outside (0, 1/2]")));
    }
    if m.dim() == 0 {
        return Err(Error::InvalidArgument("cannot reduce a zero-dimensional manifold".into()));
    }
    g.check(m)?;
    f.validate(m)?;
    if f.is_constant() {
        return Ok(DimensionReduction { pieces: vec![point_piece(m, g, f, p)], character: None, length_floor: p.len() });
    }
    let (eta, parts) = choose_character(m, g, p)?;
    let mut pieces = Vec::new();
    for part in parts {
        let fac = factorize_polyseq(m, g, &part, &eta, QMAX)?;
        let sub = Nilmanifold { complexity: m.complexity, ..fac.subgroup };
        let period = (fac.gamma_period / part.step().unsigned_abs()).max(1);
        for r in 0..period.min(part.len()) {
            let count = (part.len() - r).div_ceil(period);
            let class = part.sub(r, period, count)?;
            let elems: Vec<i64> = class.elements().collect();
            let gamma0 = m.reduce(&fac.gamma.eval(elems[0]));
            let g0 = PolySequence::constant(&gamma0);
            let conj = g0.inv(m).mul(m, &fac.g_prime).mul(m, &g0);
            let h = fac.embedding.pull_seq(&conj);
            let target: Vec<Complex64> = elems.iter().map(|&n| nil_eval(m, g, f, n)).collect();
            let hvals: Vec<Vec<Q>> = elems.iter().map(|&n| h.eval(n)).collect();
            let cls = Class {
                m,
                f,
                beta: &fac.beta,
                gamma0,
                embed: &fac.embedding,
                h,
                elems,
                target,
                hvals,
            };
            let mut lo = 0;
            while lo < cls.elems.len() {
                let (l, dev, fj) = cls.grow(lo, eps);
                pieces.push(NilPiece {
                    part: class.sub(lo as u64, 1, l as u64)?,
                    manifold: sub,
                    sequence: cls.h.clone(),
                    function: fj,
                    deviation: dev,
                });
                lo += l;
            }
        }
    }
    pieces.sort_by_key(|x| (x.part.base(), x.part.step()));
    let length_floor = pieces.iter().map(|x| x.part.len()).min().unwrap_or(0);
    Ok(DimensionReduction { pieces, character: Some(eta), length_floor })
}

/// Partition of `P` on whose parts `n -> F(g(n)Γ)` has diameter at most `eps`.
pub fn partition_nilsequence(
    m: &Nilmanifold,
    g: &PolySequence,
    f: &LipschitzFunction,
    p: &Progression,
    eps: f64,
) -> Result<PartitionCertificate> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} outside (0, 1/2]")));
    }
    g.check(m)?;
    f.validate(m)?;
    let values: Vec<Complex64> = p.elements().map(|n| nil_eval(m, g, f, n)).collect();
    let on = |q: &Progression| -> Vec<Complex64> {
        q.elements().map(|n| values[p.index_of(n).expect("part inside P") as usize]).collect()
    };
    struct Node {
        part: Progression,
        m: Nilmanifold,
        g: PolySequence,
        f: LipschitzFunction,
        level: u32,
    }
    let mut out: Vec<(Progression, f64)> = Vec::new();
    let mut depth = 0;
    let mut stack = vec![Node { part: *p, m: *m, g: g.clone(), f: f.clone(), level: 0 }];
    while let Some(node) = stack.pop() {
        let d = complex_diam(&on(&node.part));
        if d <= eps || node.part.len() == 1 {
            depth = depth.max(node.level);
            out.push((node.part, d));
            continue;
        }
        if node.m.dim() == 0 {
            for h in split_even(&node.part, 2)? {
                stack.push(Node { part: h, m: node.m, g: node.g.clone(), f: node.f.clone(), level: node.level });
            }
            continue;
        }
        let budget = eps / f64::from(1u32 << (node.level + 2).min(30));
        let red = reduce_dimension(&node.m, &node.g, &node.f, &node.part, budget)?;
        for piece in red.pieces {
            stack.push(Node {
                part: piece.part,
                m: piece.manifold,
                g: piece.sequence,
                f: piece.function,
                level: node.level + 1,
            });
        }
    }
    out.sort_by_key(|(q, _)| (q.base(), q.step()));
    Ok(PartitionCertificate::new(
        Source::Nil { manifold: *m, sequence: g.clone(), function: f.to_json() },
        *p,
        eps,
        out.iter().map(|(q, _)| *q).collect(),
        out.iter().map(|(_, d)| *d).collect(),
        Some(depth),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_from_f64;
    use crate::poly::RealPoly;
    use num_traits::Zero;

    fn heis_example() -> (Nilmanifold, PolySequence, LipschitzFunction) {
        let h = Nilmanifold::heisenberg();
        let g = PolySequence::linear_f64(&[2f64.sqrt(), 3f64.sqrt(), 0.0]).unwrap();
        (h, g, LipschitzFunction::cutoff(vec![1, 0], 1))
    }

    fn check_pieces(m: &Nilmanifold, g: &PolySequence, f: &LipschitzFunction, p: &Progression, red: &DimensionReduction, eps: f64) {
        let mut seen: Vec<i64> = Vec::new();
        for piece in &red.pieces {
            assert!(piece.manifold.dim() < m.dim());
            for n in piece.part.elements() {
                let a = nil_eval(m, g, f, n);
                let b = piece.function.eval(&piece.manifold, &piece.sequence.eval(n));
                assert!((a - b).norm() <= eps, "deviation at {n}");
                seen.push(n);
            }
        }
        seen.sort_unstable();
        assert_eq!(seen, p.elements().collect::<Vec<_>>());
    }

    #[test]
    fn constant_function_single_piece() {
        let (h, g, _) = heis_example();
        let p = Progression::interval(1, 300).unwrap();
        let f = LipschitzFunction::Const(Complex64::new(0.5, 0.0));
        let red = reduce_dimension(&h, &g, &f, &p, 0.1).unwrap();
        assert_eq!(red.pieces.len(), 1);
        assert_eq!(red.pieces[0].manifold.dim(), 0);
        let cert = partition_nilsequence(&h, &g, &f, &p, 0.1).unwrap();
        assert_eq!(cert.parts, vec![p]);
    }

    #[test]
    fn circle_base_case() {
        let t1 = Nilmanifold::torus(1);
        let g = PolySequence::new(vec![RealPoly::monomial(q_from_f64(0.6180339887).unwrap(), 1)]);
        let f = LipschitzFunction::character(vec![1]);
        let p = Progression::interval(1, 2000).unwrap();
        let red = reduce_dimension(&t1, &g, &f, &p, 0.1).unwrap();
        assert!(red.pieces.iter().all(|x| x.manifold.dim() == 0));
        check_pieces(&t1, &g, &f, &p, &red, 0.1);
    }

    #[test]
    fn heisenberg_reduction() {
        let (h, g, f) = heis_example();
        let p = Progression::interval(1, 1500).unwrap();
        let red = reduce_dimension(&h, &g, &f, &p, 0.1).unwrap();
        check_pieces(&h, &g, &f, &p, &red, 0.1);
        assert!(red.length_floor >= 1);
    }

    #[test]
    fn nil_partition_certificate() {
        let (h, g, f) = heis_example();
        let p = Progression::interval(1, 1500).unwrap();
        let cert = partition_nilsequence(&h, &g, &f, &p, 0.1).unwrap();
        assert!(cert.holds_at(0.1));
        assert!(cert.max_depth.unwrap() <= 3);
        let total: u64 = cert.parts.iter().map(|q| q.len()).sum();
        assert_eq!(total, 1500);
    }

    #[test]
    fn torus_two_partition() {
        let t2 = Nilmanifold::torus(2);
        let g = PolySequence::new(vec![
            RealPoly::monomial(q_from_f64(0.5 + 1e-7).unwrap(), 1),
            RealPoly::new(vec![Q::zero(), Q::zero(), q_from_f64(0.001).unwrap()]),
        ]);
        let f = LipschitzFunction::character(vec![1, 1]);
        let p = Progression::interval(1, 800).unwrap();
        let cert = partition_nilsequence(&t2, &g, &f, &p, 0.2).unwrap();
        assert!(cert.holds_at(0.2));
    }
}
