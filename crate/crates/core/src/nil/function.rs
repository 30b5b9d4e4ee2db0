use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use super::embed::Embedding;
use super::manifold::{ManifoldKind, Nilmanifold};
use crate::error::{Error, Result};
use crate::exact::{frac, q_int, to_f64, Q};

pub type CustomFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// 1-bounded Lipschitz functions on a nilmanifold, evaluated on the
/// fundamental-domain coordinates of their argument.
#[derive(Clone)]
pub enum LipschitzFunction {
    Const(Complex64),
    /// `e(k·u)`; on the Heisenberg manifold `k` acts on `(x, y)`.
    Character { k: Vec<i64> },
    /// `e(k·u) sin²(π u_axis)`.
    Cutoff { k: Vec<i64>, axis: usize },
    /// Heisenberg only: `e(m z) sin²(π y)`, continuous across the seam.
    Vertical { m: i64 },
    Re(Box<LipschitzFunction>),
    Im(Box<LipschitzFunction>),
    Custom { name: String, lipschitz: f64, f: CustomFn },
    /// `x -> parent(offset · ι(x))`.
    Pullback { parent: Box<LipschitzFunction>, offset: Vec<Q>, embed: Embedding },
}

fn e(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * phase)
}

fn dot_frac(k: &[i64], u: &[Q]) -> f64 {
    let s = k.iter().zip(u).fold(Q::zero(), |acc, (ki, ui)| acc + ui * q_int(*ki));
    to_f64(&frac(&s))
}

fn sin2(x: &Q) -> f64 {
    let s = (PI * to_f64(x)).sin();
    s * s
}

impl LipschitzFunction {
    pub fn character(k: Vec<i64>) -> Self {
        LipschitzFunction::Character { k }
    }

    pub fn cutoff(k: Vec<i64>, axis: usize) -> Self {
        LipschitzFunction::Cutoff { k, axis }
    }

    /// A user function with a declared Lipschitz constant, accepted only if
    /// 10^4 sampled pairs respect both the constant and the bound `|F| <= 1`.
    pub fn custom(name: &str, m: &Nilmanifold, lipschitz: f64, f: CustomFn, seed: u64) -> Result<Self> {
        let cand = LipschitzFunction::Custom { name: name.to_string(), lipschitz, f };
        let (ratio, sup) = cand.sampled_lipschitz(m, 10_000, seed);
        if sup > 1.0 + 2f64.powi(-40) {
            return Err(Error::Unbounded(sup));
        }
        if ratio > lipschitz * (1.0 + 1e-9) {
            return Err(Error::InvalidArgument(format!(
                "sampled Lipschitz ratio {ratio} exceeds declared constant {lipschitz}"
            )));
        }
        Ok(cand)
    }

    pub fn is_constant(&self) -> bool {
        match self {
            LipschitzFunction::Const(_) => true,
            LipschitzFunction::Re(f) | LipschitzFunction::Im(f) => f.is_constant(),
            LipschitzFunction::Pullback { parent, .. } => parent.is_constant(),
            LipschitzFunction::Character { k } => k.iter().all(|&x| x == 0),
            _ => false,
        }
    }

    pub fn validate(&self, m: &Nilmanifold) -> Result<()> {
        let want = |k: &[i64]| -> Result<()> {
            if k.len() != m.horizontal_dim() {
                return Err(Error::DimensionMismatch { expected: m.horizontal_dim(), found: k.len() });
            }
            Ok(())
        };
        match self {
            LipschitzFunction::Character { k } => want(k),
            LipschitzFunction::Cutoff { k, axis } => {
                want(k)?;
                if *axis >= m.horizontal_dim() {
                    return Err(Error::InvalidArgument(format!("cutoff axis {axis} out of range")));
                }
                Ok(())
            }
            LipschitzFunction::Vertical { .. } => match m.kind {
                ManifoldKind::Heisenberg => Ok(()),
                _ => Err(Error::UnsupportedManifold(format!("vertical character on {m}"))),
            },
            LipschitzFunction::Re(f) | LipschitzFunction::Im(f) => f.validate(m),
            LipschitzFunction::Pullback { embed, .. } => {
                if embed.source_dim() != m.dim() {
                    return Err(Error::DimensionMismatch { expected: embed.source_dim(), found: m.dim() });
                }
                Ok(())
            }
            LipschitzFunction::Const(c) => {
                if c.norm() > 1.0 + 2f64.powi(-40) {
                    return Err(Error::Unbounded(c.norm()));
                }
                Ok(())
            }
            LipschitzFunction::Custom { .. } => Ok(()),
        }
    }

    /// Declared constant with respect to the coordinate metric. For
    /// pullbacks this is the parent's constant times the embedding stretch.
    pub fn lipschitz(&self) -> f64 {
        let l1 = |k: &[i64]| k.iter().map(|x| x.unsigned_abs() as f64).sum::<f64>();
        match self {
            LipschitzFunction::Const(_) => 0.0,
            LipschitzFunction::Character { k } => 2.0 * PI * l1(k),
            LipschitzFunction::Cutoff { k, .. } => 2.0 * PI * l1(k) + PI,
            LipschitzFunction::Vertical { m } => 2.0 * PI * m.unsigned_abs() as f64 + PI,
            LipschitzFunction::Re(f) | LipschitzFunction::Im(f) => f.lipschitz(),
            LipschitzFunction::Custom { lipschitz, .. } => *lipschitz,
            LipschitzFunction::Pullback { parent, embed, .. } => parent.lipschitz() * embed.stretch(),
        }
    }

    pub fn eval(&self, m: &Nilmanifold, x: &[Q]) -> Complex64 {
        match self {
            LipschitzFunction::Const(c) => *c,
            LipschitzFunction::Pullback { parent, offset, embed } => {
                let target = embed.target();
                let y = target.mul(offset, &embed.apply(x));
                parent.eval(&target, &y)
            }
            LipschitzFunction::Re(f) => Complex64::new(f.eval(m, x).re, 0.0),
            LipschitzFunction::Im(f) => Complex64::new(f.eval(m, x).im, 0.0),
            _ => self.eval_reduced(&m.reduce(x)),
        }
    }

    /// Evaluation on coordinates already in the fundamental domain.
    pub fn eval_reduced(&self, u: &[Q]) -> Complex64 {
        match self {
            LipschitzFunction::Const(c) => *c,
            LipschitzFunction::Character { k } => e(dot_frac(k, u)),
            LipschitzFunction::Cutoff { k, axis } => e(dot_frac(k, u)) * sin2(&u[*axis]),
            LipschitzFunction::Vertical { m } => e(to_f64(&frac(&(&u[2] * q_int(*m))))) * sin2(&u[1]),
            LipschitzFunction::Re(f) => Complex64::new(f.eval_reduced(u).re, 0.0),
            LipschitzFunction::Im(f) => Complex64::new(f.eval_reduced(u).im, 0.0),
            LipschitzFunction::Custom { f, .. } => {
                let v: Vec<f64> = u.iter().map(to_f64).collect();
                f(&v)
            }
            LipschitzFunction::Pullback { .. } => panic!("pullbacks need their manifold; use eval"),
        }
    }

    /// Largest sampled `|F(a) - F(b)| / d(a, b)` and largest `|F|`.
    pub fn sampled_lipschitz(&self, m: &Nilmanifold, pairs: usize, seed: u64) -> (f64, f64) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = m.dim();
        let mut ratio: f64 = 0.0;
        let mut sup: f64 = 0.0;
        let point = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Q> {
            (0..dim).map(|_| Q::from_float(rng.gen::<f64>()).unwrap()).collect()
        };
        for i in 0..pairs {
            let a = point(&mut rng);
            let b: Vec<Q> = if i % 2 == 0 {
                point(&mut rng)
            } else {
                let scale = 10f64.powi(-rng.gen_range(1..6));
                a.iter().map(|x| x + Q::from_float(scale * rng.gen_range(-1.0..1.0)).unwrap()).collect()
            };
            let (fa, fb) = (self.eval(m, &a), self.eval(m, &b));
            sup = sup.max(fa.norm()).max(fb.norm());
            let d = m.distance(&a, &b);
            if d > 0.0 {
                ratio = ratio.max((fa - fb).norm() / d);
            }
        }
        (ratio, sup)
    }

    pub fn to_json(&self) -> Value {
        match self {
            LipschitzFunction::Const(c) => json!({"kind": "const", "re": c.re, "im": c.im}),
            LipschitzFunction::Character { k } => json!({"kind": "character", "k": k}),
            LipschitzFunction::Cutoff { k, axis } => json!({"kind": "cutoff", "k": k, "axis": axis}),
            LipschitzFunction::Vertical { m } => json!({"kind": "vertical", "m": m}),
            LipschitzFunction::Re(f) => json!({"kind": "re", "of": f.to_json()}),
            LipschitzFunction::Im(f) => json!({"kind": "im", "of": f.to_json()}),
            LipschitzFunction::Custom { name, lipschitz, .. } => {
                json!({"kind": "custom", "name": name, "lipschitz": lipschitz})
            }
            LipschitzFunction::Pullback { parent, .. } => json!({"kind": "pullback", "of": parent.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("function descriptor: {what}"));
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
        let ints = |key: &str| -> Result<Vec<i64>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad(key)))
                .collect()
        };
        let inner = || -> Result<Box<LipschitzFunction>> {
            Ok(Box::new(LipschitzFunction::from_json(v.get("of").ok_or_else(|| bad("of"))?)?))
        };
        Ok(match kind {
            "const" => LipschitzFunction::Const(Complex64::new(
                v.get("re").and_then(Value::as_f64).unwrap_or(1.0),
                v.get("im").and_then(Value::as_f64).unwrap_or(0.0),
            )),
            "character" => LipschitzFunction::Character { k: ints("k")? },
            "cutoff" => LipschitzFunction::Cutoff {
                k: ints("k")?,
                axis: v.get("axis").and_then(Value::as_u64).ok_or_else(|| bad("axis"))? as usize,
            },
            "vertical" => LipschitzFunction::Vertical { m: v.get("m").and_then(Value::as_i64).ok_or_else(|| bad("m"))? },
            "re" => LipschitzFunction::Re(inner()?),
            "im" => LipschitzFunction::Im(inner()?),
            other => return Err(bad(&format!("'{other}' cannot be reconstructed"))),
        })
    }

    /// Parses a catalog name: `const`, `const:RE[,IM]`, `char:K1,K2,..`,
    /// `cutoff:K1,K2,..@AXIS`, `vertical:M`, `re(NAME)`, `im(NAME)`.
    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim();
        let bad = || Error::Parse(format!("unknown function '{s}'"));
        let ints = |t: &str| -> Result<Vec<i64>> {
            t.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| bad())).collect()
        };
        for (pre, re) in [("re(", true), ("im(", false)] {
            if let Some(rest) = s.strip_prefix(pre) {
                let inner = Box::new(LipschitzFunction::parse(rest.strip_suffix(')').ok_or_else(bad)?)?);
                return Ok(if re { LipschitzFunction::Re(inner) } else { LipschitzFunction::Im(inner) });
            }
        }
        if s == "const" {
            return Ok(LipschitzFunction::Const(Complex64::new(1.0, 0.0)));
        }
        if let Some(rest) = s.strip_prefix("const:") {
            let parts: Vec<f64> = rest.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
            return Ok(LipschitzFunction::Const(Complex64::new(parts[0], parts.get(1).copied().unwrap_or(0.0))));
        }
        if let Some(rest) = s.strip_prefix("char:") {
            return Ok(LipschitzFunction::Character { k: ints(rest)? });
        }
        if let Some(rest) = s.strip_prefix("cutoff:") {
            let (k, axis) = rest.split_once('@').ok_or_else(bad)?;
            return Ok(LipschitzFunction::Cutoff { k: ints(k)?, axis: axis.trim().parse().map_err(|_| bad())? });
        }
        if let Some(rest) = s.strip_prefix("vertical:") {
            return Ok(LipschitzFunction::Vertical { m: rest.trim().parse().map_err(|_| bad())? });
        }
        Err(bad())
    }
}

impl fmt::Debug for LipschitzFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lipschitz_constants_hold() {
        let h = Nilmanifold::heisenberg();
        let t2 = Nilmanifold::torus(2);
        let cases = [
            (h, LipschitzFunction::character(vec![1, -2])),
            (h, LipschitzFunction::cutoff(vec![1, 0], 1)),
            (h, LipschitzFunction::Vertical { m: 2 }),
            (t2, LipschitzFunction::cutoff(vec![3, 1], 0)),
            (t2, LipschitzFunction::Re(Box::new(LipschitzFunction::character(vec![1, 1])))),
        ];
        for (i, (m, f)) in cases.iter().enumerate() {
            f.validate(m).unwrap();
            let (ratio, sup) = f.sampled_lipschitz(m, 10_000, i as u64);
            assert!(ratio <= f.lipschitz(), "{f:?}: {ratio} > {}", f.lipschitz());
            assert!(sup <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn vertical_is_continuous_across_seam() {
        let h = Nilmanifold::heisenberg();
        let f = LipschitzFunction::Vertical { m: 1 };
        let x = Q::from_float(0.37).unwrap();
        let z = Q::from_float(0.21).unwrap();
        let below = vec![x.clone(), Q::from_float(1.0 - 1e-9).unwrap(), z.clone()];
        let above = vec![x, Q::from_float(1.0 + 1e-9).unwrap(), z];
        assert!((f.eval(&h, &below) - f.eval(&h, &above)).norm() < 1e-6);
    }

    #[test]
    fn custom_guard() {
        let t1 = Nilmanifold::torus(1);
        let ok: CustomFn = Arc::new(|u: &[f64]| Complex64::new((2.0 * PI * u[0]).cos(), 0.0));
        assert!(LipschitzFunction::custom("cos", &t1, 2.0 * PI, ok.clone(), 3).is_ok());
        assert!(LipschitzFunction::custom("cos", &t1, 1.0, ok, 3).is_err());
        let big: CustomFn = Arc::new(|_: &[f64]| Complex64::new(2.0, 0.0));
        assert!(matches!(LipschitzFunction::custom("big", &t1, 1.0, big, 3), Err(Error::Unbounded(_))));
    }

    #[test]
    fn names_and_json() {
        for name in ["const", "char:1,0", "cutoff:1,0@1", "vertical:3", "re(char:2)", "im(cutoff:1@0)"] {
            let f = LipschitzFunction::parse(name).unwrap();
            let back = LipschitzFunction::from_json(&f.to_json()).unwrap();
            assert_eq!(back.to_json(), f.to_json());
        }
        assert!(LipschitzFunction::parse("sin").is_err());
    }
}
