//! The sequential protocol: every Charlie measures the third qubit with a
//! uniformly random input and passes the Lüders post-measurement state on.

use std::f64::consts::FRAC_PI_2;

use crate::behavior::{index, BehaviorTable};
use crate::error::{Error, Result};
use crate::linalg::{effect_sqrt, ComplexMatrix};
use crate::measurements::{alice_bob_setting, charlie_setting, GammaSchedule, Party};
use crate::state::TripartiteState;

#[derive(Debug, Clone)]
pub struct SequentialScenario {
    pub initial: TripartiteState,
    pub theta: f64,
    pub schedule: GammaSchedule,
    pub rounds: usize,
}

impl SequentialScenario {
    pub fn new(
        initial: TripartiteState,
        theta: f64,
        schedule: GammaSchedule,
        rounds: usize,
    ) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be at least 1".into()));
        }
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} must lie in (0, pi/2)"
            )));
        }
        if rounds > schedule.valid_upto {
            return Err(Error::ScheduleTruncated {
                requested: rounds,
                valid_upto: schedule.valid_upto,
            });
        }
        Ok(Self {
            initial,
            theta,
            schedule,
            rounds,
        })
    }
}

/// `ρ ↦ ½ Σ_{z,c} (𝕀⊗𝕀⊗√F_{c|z}) ρ (𝕀⊗𝕀⊗√F_{c|z})` with Charlie's two
/// settings at sharpness `gamma_k`.
pub fn luders_update(rho: &TripartiteState, theta: f64, gamma_k: f64) -> Result<TripartiteState> {
    let rho = rho.clone().validated()?;
    let id4 = ComplexMatrix::identity(4);
    let mut out = ComplexMatrix::zeros(8);
    for z in 0..2 {
        let setting = charlie_setting(theta, gamma_k, z)?;
        for effect in &setting.effects {
            let kraus = id4.kron(&effect_sqrt(effect));
            // √F is Hermitian
            let branch = kraus.matmul(rho.rho())?.matmul(&kraus)?;
            out = out.add(&branch)?;
        }
    }
    TripartiteState::new(out.scale_real(0.5), format!("after Charlie({gamma_k})"))
}

/// `P(abc|xyz) = tr[ρ (X_{a|x} ⊗ Y_{b|y} ⊗ Z_{c|z})]`.
pub fn behavior(rho: &TripartiteState, theta: f64, gamma_k: f64) -> Result<BehaviorTable> {
    let mut alice = Vec::with_capacity(2);
    let mut bob = Vec::with_capacity(2);
    let mut charlie = Vec::with_capacity(2);
    for input in 0..2 {
        alice.push(alice_bob_setting(Party::A, input)?.effect_matrices());
        bob.push(alice_bob_setting(Party::B, input)?.effect_matrices());
        charlie.push(charlie_setting(theta, gamma_k, input)?.effect_matrices());
    }
    let mut probs = [0.0; 64];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let ab = alice[x][a].kron(&bob[y][b]);
                    for z in 0..2 {
                        for c in 0..2 {
                            let op = ab.kron(&charlie[z][c]);
                            probs[index(x, y, z, a, b, c)] = rho.rho().trace_product(&op)?.re;
                        }
                    }
                }
            }
        }
    }
    Ok(BehaviorTable::from_probs(probs, 0))
}

/// States `ρ_{ABC^1} … ρ_{ABC^rounds}` seen by successive Charlies.
pub fn sequential_states(s: &SequentialScenario) -> Result<Vec<TripartiteState>> {
    if s.rounds > s.schedule.valid_upto {
        return Err(Error::ScheduleTruncated {
            requested: s.rounds,
            valid_upto: s.schedule.valid_upto,
        });
    }
    let gammas = s.schedule.valid_gammas();
    let mut states = Vec::with_capacity(s.rounds);
    let mut current = s.initial.clone().with_label("round 1");
    for k in 1..=s.rounds {
        let next = if k < s.rounds {
            Some(
                luders_update(&current, s.theta, gammas[k - 1])?
                    .with_label(format!("round {}", k + 1)),
            )
        } else {
            None
        };
        states.push(current);
        match next {
            Some(n) => current = n,
            None => break,
        }
    }
    Ok(states)
}

/// One behavior table per Charlie, table `k` taken on `ρ_{ABC^k}`.
pub fn run_sequence(s: &SequentialScenario) -> Result<Vec<BehaviorTable>> {
    let gammas = s.schedule.valid_gammas();
    sequential_states(s)?
        .iter()
        .enumerate()
        .map(|(i, rho)| {
            let mut t = behavior(rho, s.theta, gammas[i])?;
            t.round = i + 1;
            Ok(t)
        })
        .collect()
}
