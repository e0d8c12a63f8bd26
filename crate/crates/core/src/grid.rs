use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// A deterministic probe grid, reproducible from its four fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing: Spacing,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn linear(lo: f64, hi: f64, n: usize) -> Self {
        GridSpec { spacing: Spacing::Linear, lo, hi, n }
    }

    pub fn log(lo: f64, hi: f64, n: usize) -> Self {
        GridSpec { spacing: Spacing::Log, lo, hi, n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {}", self.n)));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Config(format!(
                "grid bounds must be finite with lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return Err(Error::Config(format!("log-spaced grid needs lo > 0, got {}", self.lo)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.n;
        let last = (n - 1) as f64;
        let mut pts: Vec<f64> = match self.spacing {
            Spacing::Linear => {
                let step = (self.hi - self.lo) / last;
                (0..n).map(|i| self.lo + i as f64 * step).collect()
            }
            Spacing::Log => {
                let (a, b) = (self.lo.ln(), self.hi.ln());
                let step = (b - a) / last;
                (0..n).map(|i| (a + i as f64 * step).exp()).collect()
            }
        };
        pts[0] = self.lo;
        pts[n - 1] = self.hi;
        pts
    }

    /// Same span with `factor - 1` extra points inserted in every cell.
    pub fn refined(&self, factor: usize) -> Self {
        GridSpec { n: (self.n - 1) * factor.max(1) + 1, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = GridSpec::log(1e-8, 123.0, 4096).points();
        assert_eq!(g[0], 1e-8);
        assert_eq!(g[4095], 123.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn refinement_keeps_the_coarse_nodes() {
        let coarse = GridSpec::linear(0.0, 2.0, 5);
        let fine = coarse.refined(4);
        assert_eq!(fine.n, 17);
        let (c, f) = (coarse.points(), fine.points());
        for (i, x) in c.iter().enumerate() {
            assert!((f[4 * i] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(GridSpec::log(0.0, 1.0, 10).validate().is_err());
        assert!(GridSpec::linear(1.0, 1.0, 10).validate().is_err());
        assert!(GridSpec::linear(0.0, 1.0, 1).validate().is_err());
    }
}
