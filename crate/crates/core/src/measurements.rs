//! Measurement settings for Alice, Bob and the sequence of Charlies, and the
//! sharpness schedule `γ_k(δ, ε)` of Charlie's unsharp setting.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{effect_matrix, BlochEffect, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

/// One two-outcome measurement: `effects[o]` is the effect of outcome `o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartySetting {
    pub party: Party,
    pub input: u8,
    pub effects: [BlochEffect; 2],
}

impl PartySetting {
    fn from_outcome0(party: Party, input: u8, outcome0: BlochEffect) -> Self {
        Self {
            party,
            input,
            effects: [outcome0, outcome0.complement()],
        }
    }

    pub fn effect_matrices(&self) -> [ComplexMatrix; 2] {
        [
            effect_matrix(&self.effects[0]),
            effect_matrix(&self.effects[1]),
        ]
    }

    /// `max |F₀ + F₁ − 𝕀|`.
    pub fn completeness_deviation(&self) -> f64 {
        let [f0, f1] = self.effect_matrices();
        f0.add(&f1)
            .unwrap()
            .max_abs_diff(&ComplexMatrix::identity(2))
            .unwrap()
    }
}

/// Alice and Bob measure σ₃ for input 0 and σ₁ for input 1, projectively.
pub fn alice_bob_setting(party: Party, input: u8) -> Result<PartySetting> {
    if party == Party::C {
        return Err(Error::InvalidParameter(
            "Charlie's settings come from charlie_setting".into(),
        ));
    }
    let direction = match input {
        0 => [0.0, 0.0, 1.0],
        1 => [1.0, 0.0, 0.0],
        _ => return Err(Error::InvalidParameter(format!("input bit {input}"))),
    };
    Ok(PartySetting::from_outcome0(
        party,
        input,
        BlochEffect::sharp(direction)?,
    ))
}

/// Charlie's input 0 is projective along `(−sin θ, 0, cos θ)`; input 1 is
/// unsharp along `(sin θ, 0, cos θ)` with sharpness `gamma_k`.
pub fn charlie_setting(theta: f64, gamma_k: f64, input: u8) -> Result<PartySetting> {
    if !(0.0..=1.0).contains(&gamma_k) {
        return Err(Error::SharpnessOutOfRange(gamma_k));
    }
    let (s, c) = theta.sin_cos();
    let outcome0 = match input {
        0 => BlochEffect::sharp([-s, 0.0, c])?,
        1 => BlochEffect::new([s, 0.0, c], gamma_k)?,
        _ => return Err(Error::InvalidParameter(format!("input bit {input}"))),
    };
    Ok(PartySetting::from_outcome0(Party::C, input, outcome0))
}

/// Which form of the sharpness recursion to evaluate.
///
/// `Printed` is `γ_k = (1+ε)[2^{k−1} − cos δ Π_{j<k}(1+√(1−γ_j²))]/sin δ`.
/// `Normalized` divides the bracket by `2^{k−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecursionVariant {
    #[default]
    Printed,
    Normalized,
}

impl fmt::Display for RecursionVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Printed => "printed",
            Self::Normalized => "normalized",
        })
    }
}

impl FromStr for RecursionVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Self::Printed),
            "normalized" => Ok(Self::Normalized),
            other => Err(Error::InvalidConfig(format!(
                "unknown recursion variant {other:?} (expected printed|normalized)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSchedule {
    pub delta: f64,
    pub epsilon: f64,
    pub variant: RecursionVariant,
    /// Computed sharpnesses; if the last one left `[0, 1]` the recursion
    /// stopped there.
    pub gammas: Vec<f64>,
    /// Largest `k` such that `γ_1 … γ_k` all lie in `[0, 1]`.
    pub valid_upto: usize,
}

impl GammaSchedule {
    /// `γ_1 … γ_{valid_upto}`.
    pub fn valid_gammas(&self) -> &[f64] {
        &self.gammas[..self.valid_upto]
    }
}

pub fn gamma_sequence(delta: f64, epsilon: f64, n: usize) -> Result<GammaSchedule> {
    gamma_sequence_with_variant(delta, epsilon, n, RecursionVariant::Printed)
}

pub fn gamma_sequence_with_variant(
    delta: f64,
    epsilon: f64,
    n: usize,
    variant: RecursionVariant,
) -> Result<GammaSchedule> {
    if !(delta > 0.0 && delta <= FRAC_PI_4) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in (0, pi/4]"
        )));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }

    // 1 − cos δ and 2^{k−1} − Π(1+√(1−γ²)) both cancel catastrophically for
    // small δ. With (1 − cos δ)/sin δ = tan(δ/2) and d_j = γ_j²/(1+√(1−γ_j²)),
    // the bracket over sin δ is 2^{k−1}[D/sin δ + tan(δ/2)(1 − D)] where
    // D = 1 − Π(1 − d_j/2).
    let half_tan = (0.5 * delta).tan();
    let sin_delta = delta.sin();
    let mut log_prod = 0.0f64; // Σ ln(1 − d_j/2)
    let mut gammas = Vec::with_capacity(n);
    let mut valid_upto = 0;
    for k in 1..=n {
        let deficit = -log_prod.exp_m1();
        let normalized = deficit / sin_delta + half_tan * (1.0 - deficit);
        let ratio = match variant {
            RecursionVariant::Printed => 2f64.powi(k as i32 - 1) * normalized,
            RecursionVariant::Normalized => normalized,
        };
        let gamma = (1.0 + epsilon) * ratio;
        gammas.push(gamma);
        if !(0.0..=1.0).contains(&gamma) {
            break;
        }
        valid_upto = k;
        let d = gamma * gamma / (1.0 + (1.0 - gamma * gamma).sqrt());
        log_prod += (-0.5 * d).ln_1p();
    }
    Ok(GammaSchedule {
        delta,
        epsilon,
        variant,
        gammas,
        valid_upto,
    })
}

const GRID_RATIO: f64 = 0.97;
const GRID_FLOOR: f64 = 1e-300;
const BISECTION_RESOLUTION: f64 = 1e-6;

/// Largest `δ ∈ (0, π/4]` for which the printed schedule keeps
/// `γ_1 … γ_n` inside `[0, 1]`, or `None` if no such `δ` is found.
pub fn validity_region(n: usize, epsilon: f64) -> Result<Option<f64>> {
    validity_region_with_variant(n, epsilon, RecursionVariant::Printed)
}

/// The endpoint `π/4` is tried first, then a geometric grid downwards; the
/// first valid grid point and its invalid upper neighbour bracket a
/// bisection that stops at `1e-6·min(1, δ)`.
pub fn validity_region_with_variant(
    n: usize,
    epsilon: f64,
    variant: RecursionVariant,
) -> Result<Option<f64>> {
    let is_valid = |delta: f64| -> Result<bool> {
        Ok(gamma_sequence_with_variant(delta, epsilon, n, variant)?.valid_upto == n)
    };
    if is_valid(FRAC_PI_4)? {
        return Ok(Some(FRAC_PI_4));
    }
    let mut hi = FRAC_PI_4;
    let mut lo = hi * GRID_RATIO;
    while lo >= GRID_FLOOR {
        if is_valid(lo)? {
            break;
        }
        hi = lo;
        lo *= GRID_RATIO;
    }
    if lo < GRID_FLOOR {
        return Ok(None);
    }
    while hi - lo > BISECTION_RESOLUTION * hi.min(1.0) {
        let mid = 0.5 * (lo + hi);
        if is_valid(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}
