//! Parallel and series systems, optionally with F-G-M dependence, plus their
//! symbolic tail expansions.

mod document;
mod eval;
mod terms;

pub use document::build_system;
pub use eval::evaluate_system;
pub use terms::{leading_asymptote, tail_expansion, ExpPart, TailLeadingTerm, Term};

use serde::Serialize;

use crate::distcore::{self, DistributionSpec};
use crate::error::{Error, Result};

/// Maximum number of operator levels above the leaves.
pub const MAX_DEPTH: usize = 2;

/// Pairwise F-G-M coefficients `c_ij`, `i < j`, stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FgmCoefficients {
    k: usize,
    upper: Vec<f64>,
}

impl FgmCoefficients {
    /// From the strict upper triangle given row by row: row `i` holds
    /// `c_{i,i+1}, ..., c_{i,k-1}`.
    pub fn from_upper(k: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let mut upper = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for i in 0..k.saturating_sub(1) {
            let row = rows.get(i).map(Vec::as_slice).unwrap_or(&[]);
            let want = k - 1 - i;
            let vals = if row.len() == want {
                row
            } else if row.len() == k {
                &row[i + 1..]
            } else {
                return Err(Error::schema(
                    format!("dependence.c[{i}]"),
                    format!("expected {want} (upper triangle) or {k} (full row) entries, got {}", row.len()),
                ));
            };
            upper.extend_from_slice(vals);
        }
        if upper.iter().any(|c| !c.is_finite()) {
            return Err(Error::schema("dependence.c", "coefficients must be finite"));
        }
        let c = FgmCoefficients { k, upper };
        let sum = c.abs_sum();
        if sum > 1.0 + 1e-12 {
            return Err(Error::FgmConstraint { sum });
        }
        Ok(c)
    }

    pub fn zeros(k: usize) -> Self {
        FgmCoefficients { k, upper: vec![0.0; k * k.saturating_sub(1) / 2] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn abs_sum(&self) -> f64 {
        self.upper.iter().map(|c| c.abs()).sum()
    }

    /// `(i, j, c_ij)` for every pair `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let k = self.k;
        (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j))).zip(self.upper.iter()).map(|((i, j), &c)| (i, j, c))
    }

    /// Upper triangle as ragged rows.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut at = 0;
        for i in 0..self.k.saturating_sub(1) {
            let n = self.k - 1 - i;
            out.push(self.upper[at..at + n].to_vec());
            at += n;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Dependence {
    Independent,
    Fgm(FgmCoefficients),
}

/// A lifetime built from components by maxima and minima.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SystemSpec {
    Component(DistributionSpec),
    Max { children: Vec<SystemSpec>, dependence: Dependence },
    Min { children: Vec<SystemSpec>, dependence: Dependence },
}

impl From<DistributionSpec> for SystemSpec {
    fn from(d: DistributionSpec) -> Self {
        SystemSpec::Component(d)
    }
}

impl SystemSpec {
    pub fn max_of(children: Vec<SystemSpec>) -> Self {
        SystemSpec::Max { children, dependence: Dependence::Independent }
    }

    pub fn min_of(children: Vec<SystemSpec>) -> Self {
        SystemSpec::Min { children, dependence: Dependence::Independent }
    }

    /// Parallel system of independent components.
    pub fn parallel(laws: impl IntoIterator<Item = DistributionSpec>) -> Self {
        Self::max_of(laws.into_iter().map(SystemSpec::Component).collect())
    }

    /// Series system of independent components.
    pub fn series(laws: impl IntoIterator<Item = DistributionSpec>) -> Self {
        Self::min_of(laws.into_iter().map(SystemSpec::Component).collect())
    }

    /// Parallel system with F-G-M dependence; validated like a document.
    pub fn fgm_parallel(laws: Vec<DistributionSpec>, c: FgmCoefficients) -> Result<Self> {
        let s = SystemSpec::Max {
            children: laws.into_iter().map(SystemSpec::Component).collect(),
            dependence: Dependence::Fgm(c),
        };
        s.validate()?;
        Ok(s)
    }

    /// Operator levels above the leaves.
    pub fn depth(&self) -> usize {
        match self {
            SystemSpec::Component(_) => 0,
            SystemSpec::Max { children, .. } | SystemSpec::Min { children, .. } => {
                1 + children.iter().map(SystemSpec::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let depth = self.depth();
        if depth > MAX_DEPTH {
            return Err(Error::Depth { depth });
        }
        self.validate_node()
    }

    fn validate_node(&self) -> Result<()> {
        match self {
            SystemSpec::Component(d) => d.validate(),
            SystemSpec::Max { children, dependence } | SystemSpec::Min { children, dependence } => {
                if children.is_empty() {
                    return Err(Error::Validation("a max/min node needs at least one component".into()));
                }
                for c in children {
                    c.validate_node()?;
                }
                if let Dependence::Fgm(c) = dependence {
                    if matches!(self, SystemSpec::Min { .. }) {
                        return Err(Error::UnsupportedDependence(
                            "F-G-M dependence is only supported on max nodes".into(),
                        ));
                    }
                    if c.k() != children.len() {
                        return Err(Error::Validation(format!(
                            "F-G-M coefficients are for {} components, node has {}",
                            c.k(),
                            children.len()
                        )));
                    }
                    for ch in children {
                        match ch {
                            SystemSpec::Component(
                                DistributionSpec::Exponential { .. } | DistributionSpec::Weibull { .. },
                            ) => {}
                            other => {
                                return Err(Error::UnsupportedDependence(format!(
                                    "F-G-M margins must be exponential or Weibull components, got {other}"
                                )))
                            }
                        }
                    }
                    let sum = c.abs_sum();
                    if sum > 1.0 + 1e-12 {
                        return Err(Error::FgmConstraint { sum });
                    }
                }
                Ok(())
            }
        }
    }

    /// Law of `k T`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Ok(match self {
            SystemSpec::Component(d) => SystemSpec::Component(d.scaled(k)?),
            SystemSpec::Max { children, dependence } => SystemSpec::Max {
                children: children.iter().map(|c| c.scaled(k)).collect::<Result<_>>()?,
                dependence: dependence.clone(),
            },
            SystemSpec::Min { children, dependence } => SystemSpec::Min {
                children: children.iter().map(|c| c.scaled(k)).collect::<Result<_>>()?,
                dependence: dependence.clone(),
            },
        })
    }

    /// The same law written as a single distribution when that is possible:
    /// a leaf, or an independent max/min of identical leaves.
    pub fn as_distribution(&self) -> Option<DistributionSpec> {
        match self {
            SystemSpec::Component(d) => Some(d.clone()),
            SystemSpec::Max { children, dependence: Dependence::Independent }
            | SystemSpec::Min { children, dependence: Dependence::Independent } => {
                let first = children.first()?.as_distribution()?;
                for c in &children[1..] {
                    if c.as_distribution()? != first {
                        return None;
                    }
                }
                let n = children.len() as f64;
                Some(match self {
                    SystemSpec::Max { .. } => DistributionSpec::power_of(first, n),
                    _ => DistributionSpec::tail_power_of(first, n),
                })
            }
            _ => None,
        }
    }

    pub fn is_exponential_type(&self) -> bool {
        match self {
            SystemSpec::Component(d) => d.is_exponential_type(),
            SystemSpec::Max { children, .. } | SystemSpec::Min { children, .. } => {
                children.iter().all(SystemSpec::is_exponential_type)
            }
        }
    }
}

impl std::fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (name, children, dep) = match self {
            SystemSpec::Component(d) => return write!(f, "{d}"),
            SystemSpec::Max { children, dependence } => ("Max", children, dependence),
            SystemSpec::Min { children, dependence } => ("Min", children, dependence),
        };
        if matches!(dep, Dependence::Fgm(_)) {
            write!(f, "FGM-")?;
        }
        write!(f, "{name}{{")?;
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// `k` with `F_a(x) = F_b(k x)`, decided structurally.
pub fn system_scale_equivalent(a: &SystemSpec, b: &SystemSpec) -> Option<f64> {
    if let (Some(da), Some(db)) = (a.as_distribution(), b.as_distribution()) {
        return distcore::scale_equivalent(&da, &db);
    }
    match (a, b) {
        (
            SystemSpec::Max { children: ca, dependence: Dependence::Independent },
            SystemSpec::Max { children: cb, dependence: Dependence::Independent },
        )
        | (
            SystemSpec::Min { children: ca, dependence: Dependence::Independent },
            SystemSpec::Min { children: cb, dependence: Dependence::Independent },
        ) => matched_factor(ca, cb),
        (
            SystemSpec::Max { children: ca, dependence: Dependence::Fgm(c1) },
            SystemSpec::Max { children: cb, dependence: Dependence::Fgm(c2) },
        ) if c1 == c2 && ca.len() == cb.len() => {
            // margins are tied to their coefficients, so compare in place
            common_factor(ca.iter().zip(cb).map(|(x, y)| system_scale_equivalent(x, y)))
        }
        _ => None,
    }
}

fn common_factor(ks: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut out: Option<f64> = None;
    for k in ks {
        let k = k?;
        match out {
            None => out = Some(k),
            Some(k0) if (k - k0).abs() <= 1e-12 * k0.abs() => {}
            Some(_) => return None,
        }
    }
    out
}

fn matched_factor(ca: &[SystemSpec], cb: &[SystemSpec]) -> Option<f64> {
    if ca.len() != cb.len() {
        return None;
    }
    // greedy matching: each child of `a` takes the first unused child of
    // `b` that is scale equivalent with the common factor
    let first = ca.first()?;
    for cand in cb {
        let Some(k) = system_scale_equivalent(first, cand) else { continue };
        let mut used = vec![false; cb.len()];
        let mut ok = true;
        for x in ca {
            let hit = cb.iter().enumerate().position(|(j, y)| {
                !used[j] && system_scale_equivalent(x, y).is_some_and(|kk| (kk - k).abs() <= 1e-12 * k)
            });
            match hit {
                Some(j) => used[j] = true,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Some(k);
        }
    }
    None
}
