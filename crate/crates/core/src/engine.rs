//! The density-increment step and its iteration.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{q_from_f64, q_int, Q};
use crate::gowers::{ap_count, balanced, catalog_inverse, find_ap, gowers_norm, inverse_u2, DenseSet, InverseWitness};
use crate::nil::{partition_nilsequence, LipschitzFunction};
use crate::polyphase::partition_polyphase;
use crate::progression::Progression;

/// Slack allowed in the increment inequality.
pub const INCREMENT_SLACK: f64 = 1.0 / (1u64 << 30) as f64;

/// Where the inverse witness comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Oracle {
    /// Largest Fourier coefficient; gives up when `||f||_{U²} < min_norm`.
    Fourier { min_norm: f64 },
    /// Polynomial-phase grid search of degree `k - 2`.
    Catalog { grid: u64, threshold: f64 },
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::Fourier { min_norm: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum IncrementOutcome {
    ApFound { progression: Vec<u64> },
    Incremented {
        /// Chosen part of `[1, N]`.
        part: Progression,
        /// `A ∩ part` re-indexed to `[1, |part|]`.
        set: DenseSet,
        new_density: f64,
        witness: InverseWitness,
    },
    Inconclusive { reason: String, stage: String },
}

impl IncrementOutcome {
    fn inconclusive(reason: &str, stage: impl Into<String>) -> Self {
        IncrementOutcome::Inconclusive { reason: reason.to_string(), stage: stage.into() }
    }
}

/// Diameter target for the witness partition.
fn phase_tolerance(delta: f64) -> f64 {
    (delta / 2.0).clamp(f64::MIN_POSITIVE, 0.5)
}

/// Whether `|A'|·N >= (|A| + (δ/4 - slack)·N)·|P'|` holds exactly.
pub fn increment_holds(a_len: usize, n: u64, sub_len: usize, part_len: u64, delta: f64, slack: f64) -> bool {
    let gain = match q_from_f64(delta / 4.0 - slack) {
        Ok(g) => g,
        Err(_) => return false,
    };
    let lhs = Q::from_integer(BigInt::from(sub_len) * BigInt::from(n));
    let rhs = (q_int(a_len as i64) + gain * q_int(n as i64)) * q_int(part_len as i64);
    lhs >= rhs
}

/// Partition `[1, N]` where the witness is nearly constant and pick the
/// part on which `A` is densest.
pub fn increment_from_witness(a: &DenseSet, witness: &InverseWitness, floor: u64) -> Result<IncrementOutcome> {
    let n = a.n();
    let whole = Progression::interval(1, n as i64)?;
    let delta = witness.delta;
    let cert = match (&witness.phase(), &witness.kind) {
        (Some(phase), _) => partition_polyphase(phase, &whole, phase_tolerance(delta))?,
        (None, crate::gowers::WitnessKind::Nilsequence { manifold, sequence, function }) => {
            let f = LipschitzFunction::from_json(function)?;
            partition_nilsequence(manifold, sequence, &f, &whole, (delta / 2.0).min(0.5))?
        }
        _ => unreachable!("non-phase witnesses are nilsequences"),
    };
    let ind = a.indicator();
    let alpha = a.density();
    let floor = floor.max(2);
    let mut best: Option<(f64, Progression, usize)> = None;
    let mut short_hit = false;
    for part in &cert.parts {
        let hits = part.elements().filter(|&x| ind[x as usize]).count();
        if part.len() < floor {
            short_hit |= increment_holds(a.len(), n, hits, part.len(), delta, INCREMENT_SLACK);
            continue;
        }
        let excess = hits as f64 / part.len() as f64 - alpha;
        let better = match &best {
            None => true,
            Some((b, p, _)) => excess > *b || (excess == *b && part.base() < p.base()),
        };
        if better {
            best = Some((excess, *part, hits));
        }
    }
    let qualifies = |b: &Option<(f64, Progression, usize)>| {
        b.as_ref().is_some_and(|(_, part, hits)| increment_holds(a.len(), n, *hits, part.len(), delta, INCREMENT_SLACK))
    };
    if !qualifies(&best) {
        return Ok(if short_hit {
            IncrementOutcome::inconclusive("length-floor", format!("only parts shorter than {floor} gain density"))
        } else {
            IncrementOutcome::inconclusive("pigeonhole", "no part reaches the density gain")
        });
    }
    let (_, part, _) = best.expect("checked above");
    let members: Vec<u64> = part
        .elements()
        .enumerate()
        .filter(|(_, x)| ind[*x as usize])
        .map(|(i, _)| i as u64 + 1)
        .collect();
    let set = DenseSet::new(part.len(), members)?;
    let new_density = set.density();
    Ok(IncrementOutcome::Incremented { part, set, new_density, witness: witness.clone() })
}

/// One step: an explicit progression if `A` has one, otherwise a denser
/// subprogression obtained from an inverse witness.
pub fn density_increment_step(a: &DenseSet, k: usize, oracle: Oracle, floor: u64) -> Result<IncrementOutcome> {
    if k < 3 {
        return Err(Error::InvalidArgument("k must be at least 3".into()));
    }
    if a.n() <= floor {
        return Ok(IncrementOutcome::inconclusive("length-floor", format!("N = {} <= {floor}", a.n())));
    }
    if a.is_empty() {
        return Ok(IncrementOutcome::inconclusive("empty-set", "start"));
    }
    if ap_count(a, k, true)? > 0 {
        let progression = find_ap(a, k).expect("count is positive");
        return Ok(IncrementOutcome::ApFound { progression });
    }
    if a.len() == a.n() as usize {
        return Ok(IncrementOutcome::inconclusive("density-saturated", "start"));
    }
    let f = balanced(a, k);
    let found = match oracle {
        Oracle::Fourier { min_norm } => {
            if k != 3 {
                let _ = gowers_norm(&f, k - 1);
            }
            inverse_u2(&f, min_norm)
        }
        Oracle::Catalog { grid, threshold } => catalog_inverse(&f, k.max(4), grid, threshold),
    };
    let witness = match found {
        Ok(w) => w,
        Err(Error::NotFound(msg)) => return Ok(IncrementOutcome::inconclusive("oracle", msg)),
        Err(e) => return Err(e),
    };
    increment_from_witness(a, &witness, floor)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub density: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Chosen part in the coordinates of this iteration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part: Option<Progression>,
    /// The same part in the original coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original_part: Option<Progression>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementTrace {
    pub steps: Vec<TraceStep>,
    pub outcome: IncrementOutcome,
}

impl IncrementTrace {
    /// One JSON object per iteration followed by the outcome.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("plain data"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.outcome).expect("plain data"));
        out.push('\n');
        out
    }

    pub fn densities_increase(&self) -> bool {
        self.steps.iter().all(|s| s.new_density.is_none_or(|d| d > s.density))
            && self.steps.windows(2).all(|w| w[1].density > w[0].density)
    }
}

/// Iterate the increment step from `A ⊆ [1, N]` until a progression is
/// found or no further step is possible. A found progression is reported in
/// the original coordinates.
pub fn szemeredi_search(a: &DenseSet, k: usize, floor: u64, oracle: Oracle) -> Result<IncrementTrace> {
    let mut cur = a.clone();
    // Original coordinate of position i in the current window: base + step·(i - 1).
    let (mut base, mut step) = (1i64, 1i64);
    let mut steps = Vec::new();
    let limit = 4 * a.n() as usize + 2;
    for iteration in 0..limit {
        let out = density_increment_step(&cur, k, oracle, floor)?;
        let mut rec = TraceStep {
            iteration,
            n: cur.n(),
            density: cur.density(),
            delta: None,
            part: None,
            original_part: None,
            new_density: None,
        };
        match out {
            IncrementOutcome::Incremented { part, set, new_density, witness } => {
                let ob = base + step * (part.base() - 1);
                let os = step * part.step();
                rec.delta = Some(witness.delta);
                rec.part = Some(part);
                rec.original_part = Some(Progression::new(ob, os, part.len())?);
                rec.new_density = Some(new_density);
                steps.push(rec);
                if new_density > 1.0 {
                    return Ok(IncrementTrace {
                        steps,
                        outcome: IncrementOutcome::inconclusive("density-exceeds-one", "iteration"),
                    });
                }
                base = ob;
                step = os;
                cur = set;
            }
            IncrementOutcome::ApFound { progression } => {
                steps.push(rec);
                let progression = progression
                    .iter()
                    .map(|&i| (base + step * (i as i64 - 1)).to_u64().expect("positive"))
                    .collect();
                return Ok(IncrementTrace { steps, outcome: IncrementOutcome::ApFound { progression } });
            }
            inconclusive => {
                steps.push(rec);
                return Ok(IncrementTrace { steps, outcome: inconclusive });
            }
        }
    }
    Ok(IncrementTrace { steps, outcome: IncrementOutcome::inconclusive("iteration-limit", "iteration") })
}

/// `{n in [1, 3^digits] : base-3 digits of n all in {0, 1}}`.
pub fn digit_restricted_set(digits: u32) -> DenseSet {
    let n = 3u64.pow(digits);
    let ok = |mut x: u64| {
        while x > 0 {
            if x % 3 == 2 {
                return false;
            }
            x /= 3;
        }
        true
    };
    DenseSet::new(n, (1..=n).filter(|&x| ok(x)).collect()).expect("in range")
}
