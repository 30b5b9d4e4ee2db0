//! Partition certificates and their JSON form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nil::{Nilmanifold, PolySequence};
use crate::polyphase::PolyPhase;
use crate::progression::Progression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Polyphase,
    Nilsequence,
}

/// What the certificate is about: enough to recompute every value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Phase { phase: PolyPhase },
    Nil { manifold: Nilmanifold, sequence: PolySequence, function: serde_json::Value },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub channel: Channel,
    pub progression: Progression,
    pub epsilon: f64,
    pub min_len: u64,
    pub part_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
    pub source: Source,
    pub parts: Vec<Progression>,
    pub diam_witness: Vec<f64>,
}

impl PartitionCertificate {
    pub fn new(
        source: Source,
        progression: Progression,
        epsilon: f64,
        parts: Vec<Progression>,
        diam_witness: Vec<f64>,
        max_depth: Option<u32>,
    ) -> Self {
        let channel = match source {
            Source::Phase { .. } => Channel::Polyphase,
            Source::Nil { .. } => Channel::Nilsequence,
        };
        let min_len = parts.iter().map(|p| p.len()).min().unwrap_or(0);
        PartitionCertificate {
            channel,
            progression,
            epsilon,
            min_len,
            part_count: parts.len(),
            max_depth,
            source,
            parts,
            diam_witness,
        }
    }

    pub fn max_witness(&self) -> f64 {
        self.diam_witness.iter().cloned().fold(0.0, f64::max)
    }

    /// Whether every witness is within `eps`.
    pub fn holds_at(&self, eps: f64) -> bool {
        self.diam_witness.iter().all(|&d| d <= eps)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let c: PartitionCertificate = serde_json::from_str(s)?;
        if c.parts.len() != c.diam_witness.len() {
            return Err(Error::Parse("parts and diam_witness differ in length".into()));
        }
        Ok(c)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
