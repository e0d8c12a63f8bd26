//! Evidence items attached to verdicts. Every item carries enough numbers to
//! re-run the check that produced it.

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceKind {
    /// `V(x) = tail_Y(x) - tail_X(a x + b)` has a forbidden sign pattern.
    PatternWitness {
        test: String,
        direction: String,
        a: f64,
        b: f64,
        pattern: String,
        epsilon: f64,
        grid: GridSpec,
    },
    /// The sweep in one direction found no forbidden pattern.
    SweepClean {
        test: String,
        direction: String,
        candidates: usize,
        epsilon: f64,
        grid: GridSpec,
    },
    ShapeProbe {
        mode: String,
        result: String,
    },
    SmMonotone {
        direction: String,
    },
    AsymptoticLine {
        slope: f64,
        intercept: f64,
        converged: bool,
        verdict: String,
    },
    TailRatio {
        c: f64,
        limit: Option<f64>,
        converged: bool,
    },
    LeadingTerms {
        lhs: serde_json::Value,
        rhs: serde_json::Value,
    },
    VariationTag {
        side: String,
        class: String,
        origin: String,
    },
    ScaleFactor {
        k: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(flatten)]
    pub kind: EvidenceKind,
    pub note: String,
}

impl Evidence {
    pub fn new(kind: EvidenceKind, note: impl Into<String>) -> Self {
        Evidence { kind, note: note.into() }
    }
}
