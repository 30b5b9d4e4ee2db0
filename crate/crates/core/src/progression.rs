//! Integer arithmetic progressions, subdivision and affine rescaling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The progression `base, base + step, ..., base + (len - 1) * step`.
///
/// Construction checks that every element fits in an `i64`, so element
/// access afterwards cannot overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawProgression", into = "RawProgression")]
pub struct Progression {
    base: i64,
    step: i64,
    len: u64,
}

#[derive(Serialize, Deserialize)]
struct RawProgression {
    base: i64,
    step: i64,
    len: u64,
}

impl TryFrom<RawProgression> for Progression {
    type Error = Error;
    fn try_from(r: RawProgression) -> Result<Self> {
        Progression::new(r.base, r.step, r.len)
    }
}

impl From<Progression> for RawProgression {
    fn from(p: Progression) -> Self {
        RawProgression { base: p.base, step: p.step, len: p.len }
    }
}

impl Progression {
    pub fn new(base: i64, step: i64, len: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument("progression length must be positive".into()));
        }
        if step == 0 {
            return Err(Error::InvalidArgument("progression step must be nonzero".into()));
        }
        let span = i64::try_from(len - 1)
            .ok()
            .and_then(|l| l.checked_mul(step))
            .ok_or(Error::Overflow("progression span"))?;
        base.checked_add(span).ok_or(Error::Overflow("progression end"))?;
        Ok(Progression { base, step, len })
    }

    /// The interval `[lo, hi]` with step 1.
    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty interval {lo}..{hi}")));
        }
        let len = (hi as i128 - lo as i128 + 1) as u64;
        Progression::new(lo, 1, len)
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    /// Always false: progressions have at least one element.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.len == 1
    }

    /// The `i`-th element; `i` must be below `len`.
    pub fn at(&self, i: u64) -> i64 {
        debug_assert!(i < self.len);
        self.base + (i as i64) * self.step
    }

    pub fn last(&self) -> i64 {
        self.at(self.len - 1)
    }

    pub fn min_element(&self) -> i64 {
        self.base.min(self.last())
    }

    pub fn max_element(&self) -> i64 {
        self.base.max(self.last())
    }

    pub fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    /// Position of `n` inside the progression, if present.
    pub fn index_of(&self, n: i64) -> Option<u64> {
        let off = n as i128 - self.base as i128;
        let step = self.step as i128;
        if off % step != 0 {
            return None;
        }
        let i = off / step;
        (i >= 0 && (i as u128) < self.len as u128).then_some(i as u64)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.index_of(n).is_some()
    }

    /// The sub-progression of indices `start, start + stride, ...` (`count`
    /// terms), expressed in the original integers.
    pub fn sub(&self, start: u64, stride: u64, count: u64) -> Result<Progression> {
        if count == 0 || stride == 0 {
            return Err(Error::InvalidArgument("empty sub-progression".into()));
        }
        if start + (count - 1) * stride >= self.len {
            return Err(Error::InvalidArgument("sub-progression leaves parent".into()));
        }
        let step = self
            .step
            .checked_mul(stride as i64)
            .ok_or(Error::Overflow("sub-progression step"))?;
        Progression::new(self.at(start), step, count)
    }

    /// The affine bijection `[0, len) -> P`.
    pub fn rescale_map(&self) -> RescaleMap {
        RescaleMap { base: self.base, step: self.step, len: self.len }
    }
}

impl std::fmt::Display for Progression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{} + {}i : 0 <= i < {}}}", self.base, self.step, self.len)
    }
}

/// `i -> base + i * step` on `[0, len)`, with its inverse on the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RescaleMap {
    pub base: i64,
    pub step: i64,
    pub len: u64,
}

impl RescaleMap {
    pub fn apply(&self, i: u64) -> i64 {
        assert!(i < self.len, "index {i} outside [0, {})", self.len);
        self.base + i as i64 * self.step
    }

    pub fn inverse(&self, n: i64) -> Option<u64> {
        Progression { base: self.base, step: self.step, len: self.len }.index_of(n)
    }
}

fn class_len(len: u64, mult: u64, r: u64) -> u64 {
    if r >= len {
        0
    } else {
        (len - r).div_ceil(mult)
    }
}

fn check_subdivide_args(p: &Progression, mult: u64, block: u64) -> Result<()> {
    if mult == 0 || block == 0 {
        return Err(Error::InvalidArgument("mult and block must be positive".into()));
    }
    if mult > p.len {
        return Err(Error::InvalidArgument(format!(
            "mult {mult} exceeds progression length {}",
            p.len
        )));
    }
    Ok(())
}

/// Splits `p` into its `mult` residue classes (common difference
/// `step * mult`) and cuts each class into consecutive blocks of `block`
/// terms. A class whose length is not a multiple of `block` ends with one
/// shorter block; classes are never merged.
pub fn subdivide(p: &Progression, mult: u64, block: u64) -> Result<Vec<Progression>> {
    check_subdivide_args(p, mult, block)?;
    let mut out = Vec::new();
    for r in 0..mult {
        let c = class_len(p.len, mult, r);
        let mut t = 0;
        while t < c {
            let take = block.min(c - t);
            out.push(p.sub(r + t * mult, mult, take)?);
            t += take;
        }
    }
    Ok(out)
}

/// Like [`subdivide`] but spreads each class evenly over the minimal number
/// of blocks, so that every block has length `>= floor(c / ceil(c / block))`
/// where `c` is its class length.
pub fn subdivide_balanced(p: &Progression, mult: u64, block: u64) -> Result<Vec<Progression>> {
    check_subdivide_args(p, mult, block)?;
    let mut out = Vec::new();
    for r in 0..mult {
        let c = class_len(p.len, mult, r);
        if c == 0 {
            continue;
        }
        let pieces = c.div_ceil(block);
        let small = c / pieces;
        let extra = c % pieces;
        let mut t = 0;
        for k in 0..pieces {
            let take = small + u64::from(k < extra);
            out.push(p.sub(r + t * mult, mult, take)?);
            t += take;
        }
    }
    Ok(out)
}

/// Guaranteed minimum part length of [`subdivide_balanced`].
pub fn balanced_floor(len: u64, mult: u64, block: u64) -> u64 {
    (0..mult.min(len))
        .map(|r| {
            let c = class_len(len, mult, r);
            c / c.div_ceil(block)
        })
        .min()
        .unwrap_or(0)
}

/// Splits `p` into `pieces` consecutive runs of near-equal length.
pub fn split_even(p: &Progression, pieces: u64) -> Result<Vec<Progression>> {
    let pieces = pieces.clamp(1, p.len);
    let small = p.len / pieces;
    let extra = p.len % pieces;
    let mut out = Vec::with_capacity(pieces as usize);
    let mut t = 0;
    for k in 0..pieces {
        let take = small + u64::from(k < extra);
        out.push(p.sub(t, 1, take)?);
        t += take;
    }
    Ok(out)
}
