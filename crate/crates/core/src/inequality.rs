//! The NS₂ᵏ expression
//! `⟨X₀Y₀⟩ + ⟨X₀Z₀⟩ + ⟨Y₀Z₁⟩ − ⟨X₁Y₁Z₀⟩ + ⟨X₁Y₁Z₁⟩ ≤ 3`
//! evaluated on behavior tables and in closed form.

use serde::Serialize;

use crate::behavior::BehaviorTable;
use crate::engine::{run_sequence, SequentialScenario};
use crate::error::{Error, Result};
use crate::measurements::Party;

/// Bound of NS₂ over the nonsignal-local set.
pub const NS2_BOUND: f64 = 3.0;
/// Values must exceed the bound by more than this to count as violations.
pub const VIOLATION_GUARD: f64 = 1e-12;

fn party_bit(p: Party) -> usize {
    match p {
        Party::A => 4,
        Party::B => 2,
        Party::C => 1,
    }
}

/// Correlator `Σ (−1)^{Σ outcomes} P(outcomes | inputs)` over the listed
/// parties. Parties left out are marginalized with their input set to 0,
/// which is only meaningful for non-signaling tables, so that is checked
/// first.
pub fn correlator(t: &BehaviorTable, terms: &[(Party, usize)]) -> Result<f64> {
    t.require_no_signaling()?;
    correlator_unchecked(t, terms)
}

fn correlator_unchecked(t: &BehaviorTable, terms: &[(Party, usize)]) -> Result<f64> {
    let mut mask = 0usize;
    let mut inputs = [0usize; 3];
    for &(party, input) in terms {
        let bit = party_bit(party);
        if mask & bit != 0 || input > 1 {
            return Err(Error::InvalidParameter(format!(
                "bad correlator term ({party:?}, {input})"
            )));
        }
        mask |= bit;
        inputs[2 - bit.trailing_zeros() as usize] = input;
    }
    let base = (inputs[0] << 2 | inputs[1] << 1 | inputs[2]) << 3;
    Ok((0..8)
        .map(|o: usize| {
            let sign = if (o & mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sign * t.probs[base | o]
        })
        .sum())
}

pub fn ns2_value(t: &BehaviorTable) -> Result<f64> {
    use Party::{A, B, C};
    t.require_no_signaling()?;
    let e = |terms: &[(Party, usize)]| correlator_unchecked(t, terms);
    Ok(
        e(&[(A, 0), (B, 0)])? + e(&[(A, 0), (C, 0)])? + e(&[(B, 0), (C, 1)])?
            - e(&[(A, 1), (B, 1), (C, 0)])?
            + e(&[(A, 1), (B, 1), (C, 1)])?,
    )
}

/// NS₂ after flipping the outcome labels of the flagged parties.
pub fn ns2_value_relabeled(t: &BehaviorTable, flips: [bool; 3]) -> Result<f64> {
    ns2_value(&t.relabel_outcomes(flips))
}

/// All eight outcome relabelings, in order `(A, B, C)` bits `000 … 111`.
pub fn outcome_relabelings() -> impl Iterator<Item = [bool; 3]> {
    (0..8usize).map(|m| [m & 4 != 0, m & 2 != 0, m & 1 != 0])
}

pub fn is_violation(value: f64) -> bool {
    value > NS2_BOUND + VIOLATION_GUARD
}

/// Closed-form NS₂ᵏ for the GGHZ protocol.
///
/// `k = 1`: `1 + (1+γ₁)(cos θ + sin θ sin 2α)`.
/// `k ≥ 2`: `1 + (cos θ + sin θ sin 2α)·[Π_{j<k}(1+√(1−γ_j²)) + γ_k]/2^{k−1}`.
pub fn closed_form_ns2(k: usize, alpha: f64, theta: f64, gammas: &[f64]) -> Result<f64> {
    if k == 0 || k > gammas.len() {
        return Err(Error::InvalidParameter(format!(
            "round {k} needs at least {k} sharpness values (got {})",
            gammas.len()
        )));
    }
    if let Some(&g) = gammas[..k].iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::SharpnessOutOfRange(g));
    }
    let angular = theta.cos() + theta.sin() * (2.0 * alpha).sin();
    if k == 1 {
        return Ok(1.0 + (1.0 + gammas[0]) * angular);
    }
    let prod: f64 = gammas[..k - 1]
        .iter()
        .map(|g| 1.0 + (1.0 - g * g).sqrt())
        .product();
    let scale = 2f64.powi(k as i32 - 1);
    Ok(1.0 + angular * (prod + gammas[k - 1]) / scale)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ns2Params {
    pub alpha: f64,
    pub theta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub gammas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ns2Report {
    pub round: usize,
    pub oracle_value: f64,
    pub closed_form_value: f64,
    pub violated: bool,
    pub discrepancy: f64,
    pub params: Ns2Params,
}

impl Ns2Report {
    pub fn from_table(
        round: usize,
        alpha: f64,
        s: &SequentialScenario,
        table: &BehaviorTable,
    ) -> Result<Self> {
        let gammas = &s.schedule.valid_gammas()[..round];
        let oracle_value = ns2_value(table)?;
        let closed_form_value = closed_form_ns2(round, alpha, s.theta, gammas)?;
        Ok(Self {
            round,
            oracle_value,
            closed_form_value,
            violated: is_violation(oracle_value),
            discrepancy: (oracle_value - closed_form_value).abs(),
            params: Ns2Params {
                alpha,
                theta: s.theta,
                delta: s.schedule.delta,
                epsilon: s.schedule.epsilon,
                gammas: gammas.to_vec(),
            },
        })
    }
}

/// Simulated versus closed-form NS₂ for round `k` of a GGHZ(`alpha`) run.
pub fn compare(k: usize, alpha: f64, s: &SequentialScenario) -> Result<Ns2Report> {
    if k == 0 || k > s.rounds {
        return Err(Error::InvalidParameter(format!(
            "round {k} outside 1..={}",
            s.rounds
        )));
    }
    let mut truncated = s.clone();
    truncated.rounds = k;
    let tables = run_sequence(&truncated)?;
    Ns2Report::from_table(k, alpha, s, &tables[k - 1])
}

/// [`compare`] for every round of the scenario from a single run.
pub fn compare_all(alpha: f64, s: &SequentialScenario) -> Result<Vec<Ns2Report>> {
    run_sequence(s)?
        .iter()
        .enumerate()
        .map(|(i, t)| Ns2Report::from_table(i + 1, alpha, s, t))
        .collect()
}
