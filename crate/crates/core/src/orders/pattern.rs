use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Collapsed sign sequence of a sampled function.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPattern {
    /// `+1` / `-1`, no two neighbours equal.
    pub signs: Vec<i8>,
    pub epsilon: f64,
    /// Samples with `|v| <= epsilon * max |v|`.
    pub suppressed: usize,
}

impl SignPattern {
    pub fn from_signs(raw: impl IntoIterator<Item = i8>, epsilon: f64, suppressed: usize) -> Self {
        let mut signs: Vec<i8> = Vec::new();
        for s in raw {
            if s != 0 && signs.last() != Some(&s) {
                signs.push(s);
            }
        }
        SignPattern { signs, epsilon, suppressed }
    }

    /// True when every sample was suppressed.
    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn changes(&self) -> usize {
        self.signs.len().saturating_sub(1)
    }

    pub fn flipped(&self) -> Self {
        SignPattern { signs: self.signs.iter().map(|s| -s).collect(), ..self.clone() }
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.signs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for SignPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Signs of `values` after suppressing `|v| <= epsilon * max |v|`.
/// Non-finite samples count as suppressed.
pub fn sign_pattern(values: &[f64], epsilon: f64) -> Result<SignPattern> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("sign tolerance must be > 0, got {epsilon}")));
    }
    let max = values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = epsilon * max;
    let mut suppressed = 0;
    let raw: Vec<i8> = values
        .iter()
        .map(|&v| {
            if v.is_finite() && v.abs() > cut {
                if v > 0.0 {
                    1
                } else {
                    -1
                }
            } else {
                suppressed += 1;
                0
            }
        })
        .collect();
    Ok(SignPattern::from_signs(raw, epsilon, suppressed))
}

/// Patterns compatible with `X <=_* Y`: at most one change, from `-` to `+`.
pub fn star_allows(p: &SignPattern) -> bool {
    matches!(p.signs.as_slice(), [] | [_] | [-1, 1])
}

/// Patterns compatible with `X <=_c Y`: subsequences of `+,-,+`.
pub fn convex_allows(p: &SignPattern) -> bool {
    matches!(p.signs.as_slice(), [] | [_] | [_, _] | [1, -1, 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_with_three_roots() {
        let v: Vec<f64> = (0..=400)
            .map(|i| {
                let x = i as f64 / 100.0;
                (x - 1.0) * (x - 2.0) * (x - 3.0)
            })
            .collect();
        let p = sign_pattern(&v, 1e-9).unwrap();
        assert_eq!(p.to_string(), "-,+,-,+");
        assert_eq!(p.suppressed, 3);
    }

    #[test]
    fn near_zeros_are_dropped() {
        assert_eq!(sign_pattern(&[0.0, 1e-15, 1.0], 1e-9).unwrap().to_string(), "+");
        assert_eq!(sign_pattern(&[2.0, 3.0], 1e-9).unwrap().to_string(), "+");
        let p = sign_pattern(&[0.0, 0.0], 1e-9).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.suppressed, 2);
        assert!(sign_pattern(&[1.0], 0.0).is_err());
    }

    #[test]
    fn allowed_sets() {
        let p = |s: &[i8]| SignPattern::from_signs(s.iter().copied(), 1e-9, 0);
        assert!(star_allows(&p(&[-1, 1])));
        assert!(!star_allows(&p(&[1, -1])));
        assert!(convex_allows(&p(&[1, -1, 1])));
        assert!(convex_allows(&p(&[-1, 1])));
        assert!(convex_allows(&p(&[-1])));
        assert!(!convex_allows(&p(&[-1, 1, -1])));
        assert!(!convex_allows(&p(&[1, -1, 1, -1])));
    }
}
