//! Tripartite behaviors `P(abc|xyz)` with binary inputs and outcomes.

use crate::error::{Error, Result};

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const NO_SIGNALING_TOL: f64 = 1e-10;

/// Flat index of `P(abc|xyz)`; the inputs select an 8-entry block.
#[inline]
pub fn index(x: usize, y: usize, z: usize, a: usize, b: usize, c: usize) -> usize {
    ((x << 2 | y << 1 | z) << 3) | (a << 2 | b << 1 | c)
}

/// Inverse of [`index`]: `([x, y, z], [a, b, c])`.
#[inline]
pub fn split_index(i: usize) -> ([usize; 3], [usize; 3]) {
    let s = i >> 3;
    let o = i & 7;
    (
        [s >> 2 & 1, s >> 1 & 1, s & 1],
        [o >> 2 & 1, o >> 1 & 1, o & 1],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTable {
    pub probs: [f64; 64],
    /// Charlie round this table was measured in (1-based; 0 when not tied to
    /// a round).
    pub round: usize,
}

impl BehaviorTable {
    pub fn from_probs(probs: [f64; 64], round: usize) -> Self {
        Self { probs, round }
    }

    /// Every outcome equally likely.
    pub fn uniform() -> Self {
        Self::from_probs([1.0 / 8.0; 64], 0)
    }

    /// Deterministic behavior with outcomes `f(x, y, z)`.
    pub fn deterministic(f: impl Fn(usize, usize, usize) -> [usize; 3]) -> Self {
        let mut probs = [0.0; 64];
        for s in 0..8 {
            let (x, y, z) = (s >> 2 & 1, s >> 1 & 1, s & 1);
            let [a, b, c] = f(x, y, z);
            probs[index(x, y, z, a, b, c)] = 1.0;
        }
        Self::from_probs(probs, 0)
    }

    #[inline]
    pub fn p(&self, x: usize, y: usize, z: usize, a: usize, b: usize, c: usize) -> f64 {
        self.probs[index(x, y, z, a, b, c)]
    }

    /// `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Self {
        let mut probs = [0.0; 64];
        for (i, p) in probs.iter_mut().enumerate() {
            *p = lambda * self.probs[i] + (1.0 - lambda) * other.probs[i];
        }
        Self::from_probs(probs, self.round)
    }

    /// Same behavior with the outcome bit of party `i` flipped wherever
    /// `flips[i]` is set.
    pub fn relabel_outcomes(&self, flips: [bool; 3]) -> Self {
        let mask = (flips[0] as usize) << 2 | (flips[1] as usize) << 1 | flips[2] as usize;
        let mut probs = [0.0; 64];
        for (i, &p) in self.probs.iter().enumerate() {
            probs[i ^ mask] = p;
        }
        Self::from_probs(probs, self.round)
    }

    /// Checks entries ≥ −tol and every input block summing to 1 ± tol; the
    /// error names the first offending entry or block.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        for (i, &p) in self.probs.iter().enumerate() {
            if !p.is_finite() || p < -tol {
                let ([x, y, z], [a, b, c]) = split_index(i);
                return Err(Error::NotNormalized(format!(
                    "P({a}{b}{c}|{x}{y}{z}) = {p}"
                )));
            }
        }
        for s in 0..8 {
            let sum: f64 = self.probs[s * 8..s * 8 + 8].iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotNormalized(format!(
                    "inputs {}{}{} sum to {sum}",
                    s >> 2 & 1,
                    s >> 1 & 1,
                    s & 1
                )));
            }
        }
        Ok(())
    }

    /// Marginal over the parties in `keep` (bitmask, A = 4, B = 2, C = 1).
    /// Returns `P(outcomes of keep | x, y, z)` indexed by the full outcome
    /// triple with discarded bits zero.
    pub fn marginal(&self, keep: usize, x: usize, y: usize, z: usize) -> [f64; 8] {
        let mut out = [0.0; 8];
        let base = (x << 2 | y << 1 | z) << 3;
        for o in 0..8 {
            out[o & keep] += self.probs[base | o];
        }
        out
    }

    pub fn no_signaling_report(&self) -> NoSignalingReport {
        let mut worst = 0.0f64;
        let mut location = None;
        for keep in 1..7usize {
            let others = 7 & !keep;
            for s in 0..8usize {
                let reference = s & keep;
                if s == reference {
                    continue;
                }
                let here = self.marginal(keep, s >> 2 & 1, s >> 1 & 1, s & 1);
                let there =
                    self.marginal(keep, reference >> 2 & 1, reference >> 1 & 1, reference & 1);
                for o in 0..8 {
                    if o & !keep != 0 {
                        continue;
                    }
                    let diff = (here[o] - there[o]).abs();
                    if diff > worst {
                        worst = diff;
                        location = Some(format!(
                            "marginal of {} at outcomes {} moves when {} switch inputs to {}",
                            party_names(keep),
                            bits(o, keep),
                            party_names(others),
                            bits(s, others),
                        ));
                    }
                }
            }
        }
        NoSignalingReport {
            residual: worst,
            location,
            passed: worst < NO_SIGNALING_TOL,
        }
    }

    /// Errors with the residual and location unless no-signaling holds.
    pub fn require_no_signaling(&self) -> Result<()> {
        let report = self.no_signaling_report();
        if report.passed {
            Ok(())
        } else {
            Err(Error::Signaling {
                residual: report.residual,
                location: report.location.unwrap_or_default(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoSignalingReport {
    pub residual: f64,
    /// Where the largest input dependence was found.
    pub location: Option<String>,
    pub passed: bool,
}

fn party_names(mask: usize) -> String {
    ["A", "B", "C"]
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> (2 - i) & 1 == 1)
        .map(|(_, n)| *n)
        .collect()
}

fn bits(value: usize, mask: usize) -> String {
    (0..3)
        .filter(|i| mask >> (2 - i) & 1 == 1)
        .map(|i| if value >> (2 - i) & 1 == 1 { '1' } else { '0' })
        .collect()
}
