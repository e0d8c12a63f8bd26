//! Run-level settings shared by the library entry points and the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{DecideConfig, LineConfig};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::orders::SweepConfig;

pub const MIN_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Fixtures reproducing published statements.
    Paper,
    /// `Paper` plus closed-form and sanity fixtures.
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Suite::Paper),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown fixture suite `{other}`, expected `paper` or `all`"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Paper => "paper",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Upper end of the asymptotic line probe.
    pub x_max: f64,
    /// Points in the sign-pattern comparison grid.
    pub grid_points: usize,
    /// Sign tolerance on normalized `V` values.
    pub epsilon: f64,
    pub a_points: usize,
    pub b_points: usize,
    pub out: Option<PathBuf>,
    pub curves: Option<PathBuf>,
    pub suite: Option<Suite>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        RunConfig {
            x_max: LineConfig::default().x_max,
            grid_points: sweep.grid_points,
            epsilon: sweep.epsilon,
            a_points: sweep.a_sweep.len(),
            b_points: sweep.b_points,
            out: None,
            curves: None,
            suite: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < MIN_GRID_POINTS {
            return Err(Error::Config(format!(
                "grid size must be at least {MIN_GRID_POINTS}, got {}",
                self.grid_points
            )));
        }
        if !(self.x_max > 1.0 && self.x_max.is_finite()) {
            return Err(Error::Config(format!("x_max must be a finite number above 1, got {}", self.x_max)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("sign tolerance must be positive, got {}", self.epsilon)));
        }
        if self.a_points < 2 || self.b_points < 1 {
            return Err(Error::Config(format!(
                "sweep sizes too small: {} slopes, {} offsets",
                self.a_points, self.b_points
            )));
        }
        Ok(())
    }

    pub fn sweep(&self) -> SweepConfig {
        let base = SweepConfig::default();
        let (lo, hi) = (base.a_sweep[0], base.a_sweep[base.a_sweep.len() - 1]);
        let a_sweep = GridSpec::log(lo, hi, self.a_points).points();
        SweepConfig { a_sweep, b_points: self.b_points, grid_points: self.grid_points, epsilon: self.epsilon, ..base }
    }

    pub fn line(&self) -> LineConfig {
        let base = LineConfig::default();
        LineConfig { x0: base.x0.min(self.x_max / 16.0), x_max: self.x_max, ..base }
    }

    pub fn decide(&self) -> DecideConfig {
        DecideConfig { sweep: self.sweep(), line: self.line(), ..DecideConfig::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_library() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!((c.x_max, c.grid_points, c.epsilon), (1e6, 4096, 1e-9));
        assert_eq!(c.sweep(), SweepConfig::default());
    }

    #[test]
    fn rejects_degenerate_settings() {
        let bad = [
            RunConfig { grid_points: 63, ..RunConfig::default() },
            RunConfig { x_max: 1.0, ..RunConfig::default() },
            RunConfig { epsilon: 0.0, ..RunConfig::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!("paper".parse::<Suite>().unwrap(), Suite::Paper);
        assert_eq!(Suite::All.to_string(), "all");
        assert!("bogus".parse::<Suite>().is_err());
    }
}
