//! Exact rational helpers shared by the phase and nilsequence code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// The exact dyadic value of a finite double.
pub fn q_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite coefficient {x}")))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators: scale down before converting.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// Representative of `x mod 1` in `(-1/2, 1/2]`.
pub fn signed_frac(x: &Q) -> Q {
    let f = frac(x);
    if f > half() {
        f - Q::one()
    } else {
        f
    }
}

pub fn half() -> Q {
    q_frac(1, 2)
}

/// `||x||_{R/Z}`, distance to the nearest integer.
pub fn circle_norm(x: &Q) -> Q {
    signed_frac(x).abs()
}

pub fn circle_dist(a: &Q, b: &Q) -> Q {
    circle_norm(&(a - b))
}

/// Nearest integer, halves rounded up.
pub fn round_half_up(x: &Q) -> BigInt {
    (x + half()).floor().to_integer()
}

/// `C(n, j)` for any integer `n` (generalised binomial).
pub fn binom(n: &BigInt, j: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..j {
        acc *= n - BigInt::from(i);
    }
    acc / factorial(j)
}

pub fn factorial(j: u32) -> BigInt {
    (1..=j).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// Row `i` of the Stirling numbers of the second kind, `S(i, 0..=i)`.
pub fn stirling2_row(i: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for n in 1..=i {
        let mut next = vec![BigInt::zero(); n + 1];
        for k in 1..=n {
            let carry = if k < row.len() { &row[k] * BigInt::from(k) } else { BigInt::zero() };
            next[k] = carry + &row[k - 1];
        }
        row = next;
    }
    row
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Parses `p/q`, an integer, or a decimal literal exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad number '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Q::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

pub fn fmt_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
