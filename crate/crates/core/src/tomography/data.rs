use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVector4;
use crate::projectors::Projector;

/// One acquisition: a projector label and its observed coincidence count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub label: String,
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
}

impl CountRecord {
    pub fn new(label: impl Into<String>, count: u64) -> Self {
        Self {
            label: label.into(),
            count,
            duration: None,
        }
    }
}

/// Counts aligned with a projector set, ready for reconstruction.
#[derive(Debug, Clone)]
pub struct TomographyData {
    projectors: Vec<Projector>,
    vectors: Vec<CVector4>,
    counts: Vec<f64>,
    total: f64,
    /// 4 / Tr(Σ P_μ): normalises the projector sum to unit average eigenvalue.
    sum_scale: f64,
}

impl TomographyData {
    /// Matches `records` to `set` by label. Every label of the set must be
    /// present exactly once.
    pub fn new(records: &[CountRecord], set: &[Projector]) -> Result<Self> {
        let index: HashMap<&str, usize> = set
            .iter()
            .enumerate()
            .map(|(i, p)| (p.label(), i))
            .collect();
        let mut counts = vec![None; set.len()];
        for r in records {
            let &i = index
                .get(r.label.as_str())
                .ok_or_else(|| Error::UnknownLabel(r.label.clone()))?;
            if counts[i].replace(r.count as f64).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate record for label `{}`",
                    r.label
                )));
            }
        }
        let missing: Vec<String> = set
            .iter()
            .zip(&counts)
            .filter(|(_, c)| c.is_none())
            .map(|(p, _)| p.label().to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingLabels(missing));
        }
        Self::from_weights(set, counts.into_iter().map(Option::unwrap).collect())
    }

    /// Builds data from real-valued weights (for example exact expected
    /// counts), in the order of `set`.
    pub fn from_weights(set: &[Projector], counts: Vec<f64>) -> Result<Self> {
        if counts.len() != set.len() {
            return Err(Error::domain(format!(
                "{} weights for {} projectors",
                counts.len(),
                set.len()
            )));
        }
        if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::domain("counts must be finite and nonnegative"));
        }
        let total: f64 = counts.iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain("at least one nonzero count is required"));
        }
        let trace_sum: f64 = set
            .iter()
            .map(|p| crate::linalg::trace(p.matrix()).re)
            .sum();
        Ok(Self {
            vectors: set.iter().map(|p| p.signal().tensor(p.idler())).collect(),
            projectors: set.to_vec(),
            counts,
            total,
            sum_scale: 4.0 / trace_sum,
        })
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub(crate) fn vectors(&self) -> &[CVector4] {
        &self.vectors
    }

    pub(crate) fn sum_scale(&self) -> f64 {
        self.sum_scale
    }

    /// N, the total number of events.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn count(&self, label: &str) -> Option<f64> {
        self.projectors
            .iter()
            .position(|p| p.label() == label)
            .map(|i| self.counts[i])
    }

    pub fn records(&self) -> Vec<CountRecord> {
        self.projectors
            .iter()
            .zip(&self.counts)
            .map(|(p, &c)| CountRecord::new(p.label(), c.round() as u64))
            .collect()
    }
}
