//! Membership in the nonsignal-local (hybrid) polytope.
//!
//! A behavior is nonsignal-local when it is a convex mixture, over the three
//! bipartitions AB|C, AC|B and BC|A, of products of a bipartite no-signaling
//! box with a single-party behavior. The polytope's vertices are products of
//! an extremal bipartite no-signaling box (16 local deterministic plus 8
//! PR-type boxes) with one of the 4 deterministic single-party responses, so
//! membership reduces to LP feasibility over those 288 points.

mod simplex;

use std::fmt;

use serde::Serialize;

use crate::behavior::{index, BehaviorTable, NoSignalingReport};
use crate::error::{Error, Result};

pub use simplex::{phase_one, PhaseOne};

pub const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 20_000;

pub const BIPARTITE_BOXES: usize = 24;
pub const SINGLE_PARTY_POINTS: usize = 4;
pub const VERTEX_COUNT: usize = 3 * BIPARTITE_BOXES * SINGLE_PARTY_POINTS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Bipartition {
    #[serde(rename = "AB|C")]
    AbC,
    #[serde(rename = "AC|B")]
    AcB,
    #[serde(rename = "BC|A")]
    BcA,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] = [Self::AbC, Self::AcB, Self::BcA];

    pub fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AbC => "AB|C",
            Self::AcB => "AC|B",
            Self::BcA => "BC|A",
        })
    }
}

/// `P(uv|st)` of bipartite extremal box `id`.
///
/// Ids `0..16` are local deterministic: `u = f(s)`, `v = g(t)` with
/// `f = (id & 3)` and `g = (id >> 2)` read as truth tables. Ids `16..24` are
/// PR-type: `u ⊕ v = st ⊕ βs ⊕ γt ⊕ d` with `(β, γ, d)` the low three bits.
pub fn bipartite_box(id: usize, u: usize, v: usize, s: usize, t: usize) -> f64 {
    if id < 16 {
        let f = id & 3;
        let g = id >> 2;
        let fu = (f >> s) & 1;
        let gv = (g >> t) & 1;
        if u == fu && v == gv {
            1.0
        } else {
            0.0
        }
    } else {
        let bits = id - 16;
        let (beta, gamma, d) = (bits >> 2 & 1, bits >> 1 & 1, bits & 1);
        if u ^ v == (s & t) ^ (beta & s) ^ (gamma & t) ^ d {
            0.5
        } else {
            0.0
        }
    }
}

/// Deterministic single-party response `w = h(r)` with truth table `id`.
pub fn single_party_point(id: usize, w: usize, r: usize) -> f64 {
    if (id >> r) & 1 == w {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VertexProvenance {
    pub bipartition: Bipartition,
    pub bipartite_box: usize,
    pub single_party: usize,
}

#[derive(Debug, Clone)]
pub struct VertexSet {
    pub vertices: Vec<BehaviorTable>,
    pub provenance: Vec<VertexProvenance>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn hybrid_vertices() -> VertexSet {
    let mut vertices = Vec::with_capacity(VERTEX_COUNT);
    let mut provenance = Vec::with_capacity(VERTEX_COUNT);
    for bipartition in Bipartition::ALL {
        for bipartite in 0..BIPARTITE_BOXES {
            for single in 0..SINGLE_PARTY_POINTS {
                let mut probs = [0.0; 64];
                for x in 0..2 {
                    for y in 0..2 {
                        for z in 0..2 {
                            for a in 0..2 {
                                for b in 0..2 {
                                    for c in 0..2 {
                                        probs[index(x, y, z, a, b, c)] = match bipartition {
                                            Bipartition::AbC => {
                                                bipartite_box(bipartite, a, b, x, y)
                                                    * single_party_point(single, c, z)
                                            }
                                            Bipartition::AcB => {
                                                bipartite_box(bipartite, a, c, x, z)
                                                    * single_party_point(single, b, y)
                                            }
                                            Bipartition::BcA => {
                                                bipartite_box(bipartite, b, c, y, z)
                                                    * single_party_point(single, a, x)
                                            }
                                        };
                                    }
                                }
                            }
                        }
                    }
                }
                vertices.push(BehaviorTable::from_probs(probs, 0));
                provenance.push(VertexProvenance {
                    bipartition,
                    bipartite_box: bipartite,
                    single_party: single,
                });
            }
        }
    }
    VertexSet {
        vertices,
        provenance,
    }
}

pub fn check_no_signaling(t: &BehaviorTable) -> NoSignalingReport {
    t.no_signaling_report()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub feasible: bool,
    /// One weight per vertex of the set the LP was solved over.
    pub weights: Vec<f64>,
    /// Total weight on the AB|C, AC|B and BC|A families.
    pub group_weights: [f64; 3],
    /// Largest entrywise gap between the table and the weighted vertices.
    pub residual: f64,
    /// Minimized `Σ |reconstruction − table|` including the weight-sum row.
    pub l1_residual: f64,
    pub certificate: String,
}

/// Decides whether `t` is a convex combination of the vertices in `v`.
pub fn lp_feasible(t: &BehaviorTable, v: &VertexSet) -> Result<DecompositionResult> {
    t.check_normalized(FEASIBILITY_TOL)?;
    t.require_no_signaling()?;

    let n = v.len();
    let mut rows: Vec<Vec<f64>> = (0..64)
        .map(|i| v.vertices.iter().map(|vx| vx.probs[i]).collect())
        .collect();
    rows.push(vec![1.0; n]);
    let mut rhs: Vec<f64> = t.probs.to_vec();
    rhs.push(1.0);

    let solution = phase_one(&rows, &rhs, MAX_PIVOTS).map_err(Error::Solver)?;
    let weights = solution.x;

    let mut residual = 0.0f64;
    for i in 0..64 {
        let rebuilt: f64 = weights
            .iter()
            .zip(&v.vertices)
            .map(|(w, vx)| w * vx.probs[i])
            .sum();
        residual = residual.max((rebuilt - t.probs[i]).abs());
    }
    let total: f64 = weights.iter().sum();
    let mut group_weights = [0.0; 3];
    for (w, p) in weights.iter().zip(&v.provenance) {
        group_weights[p.bipartition.position()] += w;
    }
    let feasible = residual < FEASIBILITY_TOL
        && (total - 1.0).abs() < FEASIBILITY_TOL
        && weights.iter().all(|&w| w >= -1e-12);
    let certificate = if feasible {
        format!(
            "nonsignal-local: {} vertices carry weight; AB|C {:.6}, AC|B {:.6}, BC|A {:.6}; max residual {:.3e}",
            weights.iter().filter(|&&w| w > 1e-12).count(),
            group_weights[0],
            group_weights[1],
            group_weights[2],
            residual
        )
    } else {
        format!(
            "genuinely nonsignal nonlocal: minimal L1 distance to the hybrid polytope {:.6e} (max entry gap {:.3e})",
            solution.infeasibility, residual
        )
    };
    Ok(DecompositionResult {
        feasible,
        weights,
        group_weights,
        residual,
        l1_residual: solution.infeasibility,
        certificate,
    })
}
