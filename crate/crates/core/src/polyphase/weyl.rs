use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{circle_norm, frac, to_f64, Q};

/// Minimiser of `||α n^s||` over `1 <= n <= search_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylWitness {
    pub n: u64,
    pub value: f64,
    pub search_bound: u64,
    #[serde(skip)]
    pub exact: Q,
}

/// `||α n^s||` for every `n` in `1..=bound`, as numerators over `denom(α)`.
pub(crate) fn weyl_scan(alpha: &Q, s: u32, bound: u64) -> Vec<BigInt> {
    let a = frac(alpha);
    let d = a.denom().clone();
    let num = a.numer().clone();
    (1..=bound)
        .map(|n| {
            let r = (&num * BigInt::from(n).pow(s)).mod_floor(&d);
            let other = &d - &r;
            if r < other { r } else { other }
        })
        .collect()
}

/// Exhaustive minimiser of `||α n^s||` over `1 <= n <= floor(sqrt(N))`,
/// smallest `n` on ties.
pub fn weyl_min(alpha: &Q, s: u32, big_n: u64) -> WeylWitness {
    let bound = big_n.max(1).sqrt().max(1);
    weyl_min_bounded(alpha, s, bound)
}

pub(crate) fn weyl_min_bounded(alpha: &Q, s: u32, bound: u64) -> WeylWitness {
    let scan = weyl_scan(alpha, s, bound);
    let (i, best) = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("bound >= 1");
    let exact = Q::new(best.clone(), frac(alpha).denom().clone());
    WeylWitness { n: i as u64 + 1, value: to_f64(&exact), search_bound: bound, exact }
}

/// Largest continued-fraction convergent denominator of `α` not exceeding
/// `bound`; for `s = 1` this is the Weyl minimiser.
pub fn best_denominator(alpha: &Q, bound: u64) -> u64 {
    let mut x = frac(alpha);
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let limit = BigInt::from(bound);
    loop {
        if x.is_zero() {
            break;
        }
        let inv = x.recip();
        let a = inv.floor().to_integer();
        let q_next = &a * &q + &q_prev;
        if q_next > limit {
            // A semiconvergent can tie only if it is not smaller; keep q.
            break;
        }
        q_prev = std::mem::replace(&mut q, q_next);
        x = &inv - Q::from_integer(a);
    }
    let q = u64::try_from(q).unwrap_or(1);
    // Equal distances can occur for a smaller multiple; report the smallest.
    let target = circle_norm(&(alpha * Q::from_integer(BigInt::from(q))));
    (1..=q)
        .find(|&m| circle_norm(&(alpha * Q::from_integer(BigInt::from(m)))) == target)
        .unwrap_or(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_frac, q_from_f64};

    #[test]
    fn examples() {
        let w = weyl_min(&q_frac(1, 2), 1, 100);
        assert_eq!((w.n, w.value, w.search_bound), (2, 0.0, 10));
        let w = weyl_min(&q_frac(1, 7), 2, 49);
        assert_eq!((w.n, w.value), (7, 0.0));
        let w = weyl_min(&q_from_f64(0.6180339887).unwrap(), 1, 100);
        assert_eq!(w.n, 8);
        assert!((w.value - 0.0557281).abs() < 1e-6);
    }

    #[test]
    fn optimal_against_rescan() {
        let alpha = q_from_f64(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        for s in 1..=4 {
            let w = weyl_min(&alpha, s, 5000);
            for m in 1..=w.search_bound {
                let v = circle_norm(&(&alpha * Q::from_integer(BigInt::from(m).pow(s))));
                assert!(w.exact <= v);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn convergents_agree(p in 0i64..100_000, q in 1i64..100_000, n in 1u64..1_000_000) {
            let alpha = q_frac(p, q);
            let w = weyl_min(&alpha, 1, n);
            proptest::prop_assert_eq!(best_denominator(&alpha, w.search_bound), w.n);
        }
    }
}
