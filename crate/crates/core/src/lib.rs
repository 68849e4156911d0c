//! Exact simulation of an Alice–Bob–many-Charlies sequential measurement
//! protocol on three qubits, evaluation of the NS₂ genuine-nonlocality
//! inequality round by round, and LP certification of membership in the
//! nonsignal-local (hybrid) polytope.
//!
//! The pipeline is:
//!
//! 1. [`state::build_gghz`] prepares `cos α|000⟩ + sin α|111⟩`.
//! 2. [`measurements`] provides the fixed Alice/Bob projectors, Charlie's
//!    sharp/unsharp pair and the sharpness schedule `γ_k(δ, ε)`.
//! 3. [`engine::run_sequence`] extracts one [`behavior::BehaviorTable`] per
//!    Charlie and hands the Lüders-updated state to the next one.
//! 4. [`inequality`] scores tables; [`certifier`] decides membership.
//! 5. [`experiment`] drives single runs and parameter sweeps and writes
//!    CSV/JSON reports.

pub mod behavior;
pub mod certifier;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod inequality;
pub mod io;
pub mod linalg;
pub mod measurements;
pub mod state;

pub use behavior::BehaviorTable;
pub use certifier::{hybrid_vertices, lp_feasible, DecompositionResult, VertexSet};
pub use engine::{behavior, luders_update, run_sequence, SequentialScenario};
pub use error::{Error, Result};
pub use inequality::{closed_form_ns2, compare, correlator, ns2_value, Ns2Report};
pub use linalg::{BlochEffect, ComplexMatrix};
pub use measurements::{
    alice_bob_setting, charlie_setting, gamma_sequence, gamma_sequence_with_variant,
    validity_region, validity_region_with_variant, GammaSchedule, Party, PartySetting,
    RecursionVariant,
};
pub use state::{build_gghz, validate_density, GghzParams, TripartiteState};
