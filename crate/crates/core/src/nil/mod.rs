//! Tori, the Heisenberg nilmanifold, polynomial sequences on them and the
//! partition of a nilsequence into nearly constant pieces.

mod embed;
mod factor;
mod function;
mod manifold;
mod reduce;
mod sequence;

use num_complex::Complex64;

pub use embed::Embedding;
pub use factor::{factorize_polyseq, unimodular_completion, Completion, Factorization};
pub use function::{CustomFn, LipschitzFunction};
pub use manifold::{ManifoldKind, Nilmanifold, DEFAULT_COMPLEXITY};
pub use reduce::{partition_nilsequence, reduce_dimension, DimensionReduction, NilPiece, QMAX};
pub use sequence::{horizontal_apply, HorizontalCharacter, PolySequence};

/// `F(g(n)Γ)`.
pub fn nil_eval(m: &Nilmanifold, g: &PolySequence, f: &LipschitzFunction, n: i64) -> Complex64 {
    f.eval(m, &g.eval(n))
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Largest `|a - b|` over the values, via their convex hull.
pub fn complex_diam(values: &[Complex64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut pts = values.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return (pts[0] - pts[pts.len() - 1]).norm();
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut best: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}
