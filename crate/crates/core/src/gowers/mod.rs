//! Functions on `Z_M`, Gowers uniformity norms and the `Λ_k` average.

mod inverse;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

pub use inverse::{catalog_inverse, inverse_u2, InverseWitness, WitnessKind};

use crate::budget;
use crate::error::{Error, Result};
use crate::exact::Q;

const BOUND_SLACK: f64 = 1.0 + 1.0 / (1u64 << 40) as f64;

/// A complex function on `Z_M`.
///
/// `window` records that the function came from `[1, N]` embedded in
/// `Z_M`; correlations against it are then averaged over `N` points.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    values: Vec<Complex64>,
    bounded: bool,
    window: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawFunction {
    #[serde(rename = "M")]
    m: usize,
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

impl GroupFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("function values must be finite".into()));
        }
        let bounded = values.iter().all(|v| v.norm() <= BOUND_SLACK);
        Ok(GroupFunction { values, bounded, window: None })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(m: usize, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::new((0..m).map(f).collect())
    }

    pub fn constant(m: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![c; m])
    }

    /// `n -> e(r n / M)`.
    pub fn character(m: usize, r: i64) -> Result<Self> {
        let rr = r.rem_euclid(m as i64) as usize;
        Self::from_fn(m, |n| e_frac(((rr * n) % m) as f64 / m as f64))
    }

    pub fn with_window(mut self, n: usize) -> Self {
        self.window = Some(n);
        self
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn window(&self) -> Option<usize> {
        self.window
    }

    /// Number of points correlations are averaged over.
    pub fn support_len(&self) -> usize {
        self.window.unwrap_or(self.modulus())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RawFunction {
            m: self.modulus(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        })
        .expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: RawFunction = serde_json::from_value(v.clone())?;
        if raw.re.len() != raw.m || !(raw.im.is_empty() || raw.im.len() == raw.m) {
            return Err(Error::Parse(format!("function file: M = {} but {} values", raw.m, raw.re.len())));
        }
        let im = if raw.im.is_empty() { vec![0.0; raw.m] } else { raw.im };
        Self::new(raw.re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }
}

pub(crate) fn e_frac(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// A subset of `[1, N]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct DenseSet {
    n: u64,
    members: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    #[serde(rename = "N")]
    n: u64,
    members: Vec<u64>,
}

impl TryFrom<RawSet> for DenseSet {
    type Error = Error;
    fn try_from(r: RawSet) -> Result<Self> {
        DenseSet::new(r.n, r.members)
    }
}

impl From<DenseSet> for RawSet {
    fn from(s: DenseSet) -> Self {
        RawSet { n: s.n, members: s.members }
    }
}

impl DenseSet {
    /// Members are sorted and deduplicated; anything outside `[1, N]` is an error.
    pub fn new(n: u64, mut members: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        members.sort_unstable();
        members.dedup();
        if let Some(&x) = members.iter().find(|&&x| x == 0 || x > n) {
            return Err(Error::InvalidArgument(format!("member {x} outside [1, {n}]")));
        }
        Ok(DenseSet { n, members })
    }

    pub fn interval(n: u64) -> Self {
        DenseSet { n, members: (1..=n).collect() }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn density(&self) -> f64 {
        self.members.len() as f64 / self.n as f64
    }

    pub fn density_exact(&self) -> Q {
        Q::new(self.members.len().into(), self.n.into())
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.n as usize + 1];
        for &x in &self.members {
            v[x as usize] = true;
        }
        v
    }
}

/// Smallest power of two that is at least `2kN`.
pub fn embed_modulus(n: u64, k: usize) -> usize {
    (2 * k as u64 * n).max(1).next_power_of_two() as usize
}

/// `1_A - α 1_[N]` on `[1, N]` in exact arithmetic, indexed `1..=N`
/// (entry 0 unused and zero).
pub fn balanced_exact(a: &DenseSet) -> Vec<Q> {
    let alpha = a.density_exact();
    let ind = a.indicator();
    let mut v = vec![Q::zero(); a.n as usize + 1];
    for n in 1..=a.n as usize {
        v[n] = if ind[n] { Q::from_integer(1.into()) - &alpha } else { -alpha.clone() };
    }
    v
}

/// The balanced function of `A` placed on `Z_M` with `M = embed_modulus(N, k)`.
pub fn balanced(a: &DenseSet, k: usize) -> GroupFunction {
    let m = embed_modulus(a.n, k);
    let exact = balanced_exact(a);
    let mut values = vec![Complex64::zero(); m];
    for n in 1..=a.n as usize {
        values[n % m] = Complex64::new(exact[n].to_f64().unwrap_or(0.0), 0.0);
    }
    GroupFunction::new(values).expect("finite").with_window(a.n as usize)
}

/// `1_A` on `Z_M`.
pub fn indicator_function(a: &DenseSet, m: usize) -> GroupFunction {
    let mut values = vec![Complex64::zero(); m];
    for &x in &a.members {
        values[x as usize % m] = Complex64::new(1.0, 0.0);
    }
    GroupFunction::new(values).expect("finite").with_window(a.n as usize)
}

/// Unnormalised DFT `Σ_x f(x) e(-rx/M)`.
pub fn dft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn idft(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let m = buf.len() as f64;
    buf.iter_mut().for_each(|v| *v /= m);
    buf
}

/// Normalised Fourier coefficients `E_x f(x) e(-rx/M)`.
pub fn fourier(f: &GroupFunction) -> Vec<Complex64> {
    let m = f.modulus() as f64;
    dft(&f.values).into_iter().map(|v| v / m).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormMethod {
    /// FFT for `k = 2`, direct summation otherwise.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// `||f||_{U^k}`.
pub fn gowers_norm(f: &GroupFunction, k: usize) -> Result<f64> {
    gowers_norm_with(f, k, NormMethod::Auto)
}

pub fn gowers_norm_with(f: &GroupFunction, k: usize, method: NormMethod) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("Gowers norms need k >= 1".into()));
    }
    match (method, k) {
        (NormMethod::Fft, 2) | (NormMethod::Auto, 2) => Ok(u2_fft(f)),
        (NormMethod::Fft, _) => Err(Error::InvalidArgument("the FFT path exists only for k = 2".into())),
        _ => {
            let m = f.modulus() as u128;
            budget::check(budget::pow_saturating(m, k as u32 + 1))?;
            let power = cube_average(&f.values, k);
            Ok(power.max(0.0).powf(1.0 / (1u64 << k) as f64))
        }
    }
}

/// `Σ_r |f̂(r)|^4` to the power `1/4`.
fn u2_fft(f: &GroupFunction) -> f64 {
    let s: f64 = fourier(f).iter().map(|c| c.norm_sqr().powi(2)).sum();
    s.max(0.0).powf(0.25)
}

/// `||f||_{U^k}^{2^k}` through `E_h ||Δ_h f||_{U^{k-1}}^{2^{k-1}}`.
fn cube_average(f: &[Complex64], k: usize) -> f64 {
    let m = f.len();
    if k == 1 {
        let mean: Complex64 = f.iter().sum::<Complex64>() / m as f64;
        return mean.norm_sqr();
    }
    let mut total = 0.0;
    let mut d = vec![Complex64::zero(); m];
    for h in 0..m {
        for x in 0..m {
            d[x] = f[(x + h) % m] * f[x].conj();
        }
        total += cube_average(&d, k - 1);
    }
    total / m as f64
}

fn same_modulus(fs: &[GroupFunction]) -> Result<usize> {
    let m = fs.first().ok_or_else(|| Error::InvalidArgument("need at least one function".into()))?.modulus();
    for f in fs {
        if f.modulus() != m {
            return Err(Error::ModulusMismatch(m, f.modulus()));
        }
    }
    Ok(m)
}

/// `Λ_k(f_0, ..., f_{k-1}) = E_{n,d} Π_i f_i(n + i d)` over `Z_M`.
pub fn lambda_k(fs: &[GroupFunction]) -> Result<Complex64> {
    let m = same_modulus(fs)?;
    if fs.len() == 3 {
        return Ok(lambda3_fft(&fs[0].values, &fs[1].values, &fs[2].values));
    }
    budget::check((m as u128) * (m as u128) * fs.len() as u128)?;
    let mut total = Complex64::zero();
    for n in 0..m {
        for d in 0..m {
            let mut p = Complex64::new(1.0, 0.0);
            for (i, f) in fs.iter().enumerate() {
                p *= f.values[(n + i * d) % m];
                if p == Complex64::zero() {
                    break;
                }
            }
            total += p;
        }
    }
    Ok(total / (m * m) as f64)
}

/// `Σ_y f_1(y) (f_0 * f_2)(2y) / M²`.
fn lambda3_fft(f0: &[Complex64], f1: &[Complex64], f2: &[Complex64]) -> Complex64 {
    let m = f0.len();
    let a = dft(f0);
    let c = dft(f2);
    let conv = idft(&a.iter().zip(&c).map(|(x, y)| x * y).collect::<Vec<_>>());
    let s: Complex64 = (0..m).map(|y| f1[y] * conv[(2 * y) % m]).sum();
    s / (m * m) as f64
}

/// `Λ_k` in exact rational arithmetic by direct summation.
pub fn lambda_k_exact(fs: &[Vec<Q>]) -> Result<Q> {
    let m = fs.first().map(Vec::len).ok_or_else(|| Error::InvalidArgument("need at least one function".into()))?;
    if let Some(f) = fs.iter().find(|f| f.len() != m) {
        return Err(Error::ModulusMismatch(m, f.len()));
    }
    budget::check((m as u128) * (m as u128) * fs.len() as u128)?;
    let mut total = Q::zero();
    for n in 0..m {
        for d in 0..m {
            let mut p = Q::from_integer(1.into());
            for (i, f) in fs.iter().enumerate() {
                let v = &f[(n + i * d) % m];
                if v.is_zero() {
                    p = Q::zero();
                    break;
                }
                p *= v;
            }
            total += p;
        }
    }
    Ok(total / Q::from_integer(((m * m) as u64).into()))
}

/// Number of `k`-term progressions in `A`. With `nontrivial` only `d > 0`
/// counts; otherwise the `|A|` constant progressions are added.
pub fn ap_count(a: &DenseSet, k: usize, nontrivial: bool) -> Result<u64> {
    if k < 3 {
        return Err(Error::InvalidArgument("ap_count needs k >= 3".into()));
    }
    let genuine = if k == 3 { three_ap_fft(a) } else { ap_scan(a, k)? };
    Ok(if nontrivial { genuine } else { genuine + a.len() as u64 })
}

/// Nontrivial 3-APs from `Λ_3(1_A, 1_A, 1_A)·M² = |A| + 2·#{d > 0}`.
fn three_ap_fft(a: &DenseSet) -> u64 {
    if a.len() < 3 {
        return 0;
    }
    let m = embed_modulus(a.n, 3);
    let f = indicator_function(a, m);
    let total = lambda3_fft(&f.values, &f.values, &f.values).re * (m * m) as f64;
    let rounded = total.round();
    if (total - rounded).abs() > 0.25 {
        return ap_scan(a, 3).expect("small enough to scan");
    }
    ((rounded as u64).saturating_sub(a.len() as u64)) / 2
}

fn ap_scan(a: &DenseSet, k: usize) -> Result<u64> {
    let n = a.n as usize;
    budget::check((a.len() as u128) * (n as u128) / (k as u128 - 1))?;
    let ind = a.indicator();
    let mut count = 0;
    for &x in &a.members {
        let x = x as usize;
        let mut d = 1;
        while x + (k - 1) * d <= n {
            if (1..k).all(|i| ind[x + i * d]) {
                count += 1;
            }
            d += 1;
        }
    }
    Ok(count)
}

/// Lowest-start, then shortest-difference `k`-AP in `A`, if any. For
/// `k = 3` the search starts from the middle term with the largest
/// `Λ_3` contribution.
pub fn find_ap(a: &DenseSet, k: usize) -> Option<Vec<u64>> {
    let ind = a.indicator();
    let n = a.n as usize;
    let from = |x: usize| -> Option<Vec<u64>> {
        let mut d = 1;
        while x + (k - 1) * d <= n {
            if (1..k).all(|i| ind[x + i * d]) {
                return Some((0..k).map(|i| (x + i * d) as u64).collect());
            }
            d += 1;
        }
        None
    };
    if k == 3 && a.len() >= 3 {
        let m = embed_modulus(a.n, 3);
        let f = indicator_function(a, m);
        let conv = idft(&dft(&f.values).iter().map(|x| x * x).collect::<Vec<_>>());
        let best = a
            .members
            .iter()
            .map(|&y| (conv[(2 * y as usize) % m].re, y))
            .max_by(|p, q| p.0.total_cmp(&q.0).then(q.1.cmp(&p.1)));
        if let Some((v, y)) = best {
            if v > 1.5 {
                let y = y as usize;
                for d in 1..y {
                    if y + d <= n && ind[y - d] && ind[y + d] {
                        return Some(vec![(y - d) as u64, y as u64, (y + d) as u64]);
                    }
                }
            }
        }
    }
    a.members.iter().find_map(|&x| from(x as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VonNeumannReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `|Λ_k(f_0..f_{k-1})| <= min_i ||f_i||_{U^{k-1}}` for 1-bounded inputs.
pub fn von_neumann_check(fs: &[GroupFunction]) -> Result<VonNeumannReport> {
    same_modulus(fs)?;
    if fs.len() < 2 {
        return Err(Error::InvalidArgument("need k >= 2 functions".into()));
    }
    if let Some(f) = fs.iter().find(|f| !f.is_bounded()) {
        return Err(Error::Unbounded(f.sup_norm()));
    }
    let lhs = lambda_k(fs)?.norm();
    let mut rhs = f64::INFINITY;
    for f in fs {
        rhs = rhs.min(gowers_norm(f, fs.len() - 1)?);
    }
    Ok(VonNeumannReport { lhs, rhs, ok: lhs <= rhs + 2f64.powi(-30) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_frac;
    use rand::{Rng, SeedableRng};

    fn quad(m: usize, a: usize) -> GroupFunction {
        GroupFunction::from_fn(m, |n| e_frac(((a * n * n) % m) as f64 / m as f64)).unwrap()
    }

    #[test]
    fn norm_examples() {
        let one = GroupFunction::constant(16, Complex64::new(1.0, 0.0)).unwrap();
        for k in 1..=3 {
            assert!((gowers_norm_with(&one, k, NormMethod::Direct).unwrap() - 1.0).abs() < 1e-12);
        }
        let chi = GroupFunction::character(32, 5).unwrap();
        assert!((gowers_norm(&chi, 2).unwrap() - 1.0).abs() < 1e-12);
        let g = quad(17, 1);
        let want = 17f64.powf(-0.25);
        let fft = gowers_norm_with(&g, 2, NormMethod::Fft).unwrap();
        let direct = gowers_norm_with(&g, 2, NormMethod::Direct).unwrap();
        assert!((fft - want).abs() < 1e-9 && (fft - direct).abs() < 2f64.powi(-30));
        assert!((gowers_norm(&g, 3).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn budget_is_enforced() {
        let f = GroupFunction::constant(4096, Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(gowers_norm_with(&f, 3, NormMethod::Direct), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn lambda_examples() {
        let one = GroupFunction::constant(12, Complex64::new(1.0, 0.0)).unwrap();
        assert!((lambda_k(&[one.clone(), one.clone(), one.clone()]).unwrap() - 1.0).norm() < 1e-12);
        let a = GroupFunction::constant(10, Complex64::new(0.3, 0.0)).unwrap();
        let v = lambda_k(&[a.clone(), a.clone(), a.clone(), a.clone()]).unwrap();
        assert!((v.re - 0.3f64.powi(4)).abs() < 1e-12);
        let c = q_frac(3, 10);
        assert_eq!(lambda_k_exact(&[vec![c.clone(); 7], vec![c.clone(); 7], vec![c.clone(); 7]]).unwrap(), &c * &c * &c);
    }

    #[test]
    fn lambda_matches_double_loop_on_balanced_evens() {
        let evens = DenseSet::new(10, (1..=5).map(|i| 2 * i).collect()).unwrap();
        let ex = balanced_exact(&evens);
        let mut slot = vec![Q::zero(); 32];
        slot[1..=10].clone_from_slice(&ex[1..=10]);
        let exact = lambda_k_exact(&[slot.clone(), slot.clone(), slot.clone()]).unwrap();
        let mut brute = Q::zero();
        for n in 0..32 {
            for d in 0..32 {
                brute += &slot[n] * &slot[(n + d) % 32] * &slot[(n + 2 * d) % 32];
            }
        }
        assert_eq!(exact, brute / Q::from_integer(1024.into()));
        let f = GroupFunction::from_real(&slot.iter().map(|q| q.to_f64().unwrap()).collect::<Vec<_>>()).unwrap();
        assert!((lambda_k(&[f.clone(), f.clone(), f]).unwrap().re - exact.to_f64().unwrap()).abs() < 2f64.powi(-30));
    }

    #[test]
    fn balanced_examples() {
        let full = DenseSet::interval(12);
        assert!(balanced_exact(&full).iter().all(Q::is_zero));
        let empty = DenseSet::new(12, vec![]).unwrap();
        assert!(balanced_exact(&empty).iter().all(Q::is_zero));
        let evens = DenseSet::new(10, (1..=5).map(|i| 2 * i).collect()).unwrap();
        let b = balanced_exact(&evens);
        assert_eq!(b[1..].iter().sum::<Q>(), Q::zero());
        assert_eq!(b[2], q_frac(1, 2));
        assert_eq!(b[3], q_frac(-1, 2));
        let f = balanced(&evens, 3);
        assert_eq!(f.modulus(), 64);
        assert!(f.values()[11..].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn ap_count_examples() {
        let a = DenseSet::interval(8);
        assert_eq!(ap_count(&a, 3, true).unwrap(), 12);
        assert_eq!(ap_count(&a, 3, false).unwrap(), 20);
        assert_eq!(ap_count(&a, 4, true).unwrap(), 5 + 2);
        let tiny = DenseSet::new(8, vec![2, 7]).unwrap();
        assert_eq!(ap_count(&tiny, 3, true).unwrap(), 0);
        let b = DenseSet::new(9, vec![1, 5, 9]).unwrap();
        assert_eq!(ap_count(&b, 3, true).unwrap(), 1);
        assert_eq!(find_ap(&b, 3), Some(vec![1, 5, 9]));
    }

    #[test]
    fn von_neumann_examples() {
        let m = 64;
        let zero = GroupFunction::constant(m, Complex64::zero()).unwrap();
        let chi = GroupFunction::character(m, 3).unwrap();
        let r = von_neumann_check(&[zero, chi.clone(), chi.clone()]).unwrap();
        assert!(r.ok && r.lhs == 0.0);
        let fs = [GroupFunction::character(m, 1).unwrap(), GroupFunction::character(m, -2).unwrap(), GroupFunction::character(m, 1).unwrap()];
        let r = von_neumann_check(&fs).unwrap();
        assert!(r.ok && (r.lhs - 1.0).abs() < 1e-9 && (r.rhs - 1.0).abs() < 1e-9);
        let big = GroupFunction::constant(m, Complex64::new(2.0, 0.0)).unwrap();
        assert!(matches!(von_neumann_check(&[big.clone(), big.clone(), big]), Err(Error::Unbounded(_))));
    }

    #[test]
    fn norms_increase_with_k() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f = GroupFunction::from_fn(12, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.7).unwrap();
            let u: Vec<f64> = (1..=4).map(|k| gowers_norm_with(&f, k, NormMethod::Direct).unwrap()).collect();
            assert!(u.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{u:?}");
        }
    }

    #[test]
    fn json_forms() {
        let f = GroupFunction::character(8, 1).unwrap();
        assert_eq!(GroupFunction::from_json(&f.to_json()).unwrap(), f);
        let s: DenseSet = serde_json::from_str(r#"{"N": 10, "members": [4, 2, 2]}"#).unwrap();
        assert_eq!(s.members(), &[2, 4]);
        assert!(serde_json::from_str::<DenseSet>(r#"{"N": 3, "members": [4]}"#).is_err());
    }
}
