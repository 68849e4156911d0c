//! Independent state-vector oracle.
//!
//! Works on 8-component vectors and enumerates every Kraus branch of the
//! earlier Charlies explicitly, so it shares no code with the density-matrix
//! engine.

#![allow(dead_code)]

use num_complex::Complex64 as C;

type Op2 = [[C; 2]; 2];

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// `(I + s·n·σ)/2` for a direction in the x–z plane.
fn effect_xz(nx: f64, nz: f64, s: f64) -> Op2 {
    [
        [re((1.0 + s * nz) / 2.0), re(s * nx / 2.0)],
        [re(s * nx / 2.0), re((1.0 - s * nz) / 2.0)],
    ]
}

/// Kraus operator `√((1+s)/2)·P₊ + √((1−s)/2)·P₋` built from the spectral
/// projectors `P± = (I ± n·σ)/2` of an x–z direction.
fn kraus_xz(nx: f64, nz: f64, s: f64) -> Op2 {
    let (p, m) = (effect_xz(nx, nz, 1.0), effect_xz(nx, nz, -1.0));
    let (lp, lm) = (((1.0 + s) / 2.0).sqrt(), ((1.0 - s) / 2.0).max(0.0).sqrt());
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = p[i][j] * lp + m[i][j] * lm;
        }
    }
    out
}

fn apply(op: &Op2, qubit: usize, v: &[C; 8]) -> [C; 8] {
    let shift = 2 - qubit;
    let mut out = [C::new(0.0, 0.0); 8];
    for (i, o) in out.iter_mut().enumerate() {
        let bit = (i >> shift) & 1;
        for nb in 0..2 {
            let j = (i & !(1 << shift)) | (nb << shift);
            *o += op[bit][nb] * v[j];
        }
    }
    out
}

fn expect(v: &[C; 8], w: &[C; 8]) -> f64 {
    v.iter().zip(w).map(|(a, b)| (a.conj() * b).re).sum()
}

fn projector(input: usize, outcome: usize) -> Op2 {
    // input 0 → σ_z, input 1 → σ_x; outcome 0 is the +1 eigenspace
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    if input == 0 {
        effect_xz(0.0, sign, 1.0)
    } else {
        effect_xz(sign, 0.0, 1.0)
    }
}

fn charlie_axis(theta: f64, gamma: f64, z: usize, c: usize) -> (f64, f64, f64) {
    let (nx, g) = if z == 0 {
        (-theta.sin(), 1.0)
    } else {
        (theta.sin(), gamma)
    };
    let sign = if c == 0 { 1.0 } else { -1.0 };
    (nx, theta.cos(), sign * g)
}

fn charlie_effect(theta: f64, gamma: f64, z: usize, c: usize) -> Op2 {
    let (nx, nz, s) = charlie_axis(theta, gamma, z, c);
    effect_xz(nx, nz, s)
}

pub fn gghz_vector(alpha: f64) -> [C; 8] {
    let mut v = [C::new(0.0, 0.0); 8];
    v[0] = re(alpha.cos());
    v[7] = re(alpha.sin());
    v
}

/// Weighted unnormalized branches after the listed Charlies acted, each
/// choosing its input uniformly.
pub fn branches(psi: [C; 8], theta: f64, gammas: &[f64]) -> Vec<(f64, [C; 8])> {
    let mut out = vec![(1.0, psi)];
    for &g in gammas {
        let mut next = Vec::with_capacity(out.len() * 4);
        for (w, v) in &out {
            for z in 0..2 {
                for c in 0..2 {
                    let (nx, nz, s) = charlie_axis(theta, g, z, c);
                    let k = kraus_xz(nx, nz, s);
                    next.push((w * 0.5, apply(&k, 2, v)));
                }
            }
        }
        out = next;
    }
    out
}

/// `P(abc|xyz)` seen by Charlie `k` (1-based), in the crate's index layout.
pub fn oracle_table(alpha: f64, theta: f64, gammas: &[f64], k: usize) -> [f64; 64] {
    let br = branches(gghz_vector(alpha), theta, &gammas[..k - 1]);
    let mut probs = [0.0; 64];
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        for c in 0..2 {
                            let fa = projector(x, a);
                            let fb = projector(y, b);
                            let fc = charlie_effect(theta, gammas[k - 1], z, c);
                            let p: f64 = br
                                .iter()
                                .map(|(w, v)| {
                                    let u = apply(&fa, 0, &apply(&fb, 1, &apply(&fc, 2, v)));
                                    w * expect(v, &u)
                                })
                                .sum();
                            probs[((x << 2 | y << 1 | z) << 3) | (a << 2 | b << 1 | c)] = p;
                        }
                    }
                }
            }
        }
    }
    probs
}

/// NS₂ straight from a probability array.
pub fn oracle_ns2(p: &[f64; 64]) -> f64 {
    let corr = |x: usize, y: usize, z: usize, mask: usize| -> f64 {
        (0..8)
            .map(|o: usize| {
                let s = if (o & mask).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                s * p[((x << 2 | y << 1 | z) << 3) | o]
            })
            .sum()
    };
    corr(0, 0, 0, 0b110) + corr(0, 0, 0, 0b101) + corr(0, 0, 1, 0b011) - corr(1, 1, 0, 0b111)
        + corr(1, 1, 1, 0b111)
}

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use seqshare::experiment::SweepRange;
use seqshare::{
    build_gghz, gamma_sequence_with_variant, run_sequence, BehaviorTable, GghzParams,
    RecursionVariant, SequentialScenario,
};

/// Largest NS₂ over the eight outcome relabelings.
pub fn max_relabeled_ns2(t: &BehaviorTable) -> f64 {
    seqshare::inequality::outcome_relabelings()
        .map(|f| seqshare::inequality::ns2_value_relabeled(t, f).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Protocol tables along a thinned copy of the n = 5 claim-audit grid.
pub fn audit_grid_tables(stride: usize) -> Vec<BehaviorTable> {
    let deltas = SweepRange::parse("0.01:pi/4:0.01").unwrap().points();
    let thetas = SweepRange::parse("0.01:1.57:0.01").unwrap().points();
    let mut out = Vec::new();
    for variant in [RecursionVariant::Printed, RecursionVariant::Normalized] {
        for &d in deltas.iter().step_by(stride) {
            for &t in thetas.iter().step_by(stride) {
                let s = gamma_sequence_with_variant(d, 0.001, 5, variant).unwrap();
                let rounds = s.valid_upto.min(5);
                if rounds == 0 {
                    continue;
                }
                let gghz = build_gghz(GghzParams::new(std::f64::consts::FRAC_PI_4).unwrap());
                let sc = SequentialScenario::new(gghz, t, s, rounds).unwrap();
                out.extend(run_sequence(&sc).unwrap());
            }
        }
    }
    out
}

/// Deterministic 1000-table scan: claim-audit tables, random-parameter
/// protocol tables pulled toward the NS₂ = 3 boundary by mixing with noise or
/// a hybrid vertex, and random mixtures of local deterministic points.
pub fn scan_set(seed: u64) -> Vec<BehaviorTable> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out: Vec<BehaviorTable> = audit_grid_tables(9).into_iter().take(400).collect();
    let vertices = seqshare::hybrid_vertices();
    let uniform = BehaviorTable::uniform();
    while out.len() < 750 {
        let alpha = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let theta = rng.gen_range(0.01..std::f64::consts::FRAC_PI_2 - 0.01);
        let gamma = rng.gen_range(0.0..=1.0);
        let gghz = build_gghz(GghzParams::new(alpha).unwrap());
        let t = seqshare::engine::behavior(&gghz, theta, gamma).unwrap();
        let noise = if rng.gen_bool(0.5) {
            uniform.clone()
        } else {
            vertices.vertices[rng.gen_range(0..vertices.len())].clone()
        };
        let (top, bottom) = (max_relabeled_ns2(&t), max_relabeled_ns2(&noise));
        if top <= 3.0 {
            continue;
        }
        // λ placing the mixture near the bound, jittered to both sides
        let lambda = ((3.0 - bottom) / (top - bottom) + rng.gen_range(-0.05..0.05)).clamp(0.0, 1.0);
        out.push(t.mix(&noise, lambda));
    }
    while out.len() < 1000 {
        let mut acc = BehaviorTable::from_probs([0.0; 64], 0);
        let parts = rng.gen_range(1..5);
        let mut left = 1.0;
        for i in 0..parts {
            let w = if i + 1 == parts {
                left
            } else {
                left * rng.gen_range(0.0..1.0)
            };
            left -= w;
            let code: usize = rng.gen_range(0..64);
            let d = BehaviorTable::deterministic(|x, y, z| {
                [
                    (code >> x) & 1,
                    (code >> (2 + y)) & 1,
                    (code >> (4 + z)) & 1,
                ]
            });
            for (a, p) in acc.probs.iter_mut().zip(d.probs) {
                *a += w * p;
            }
        }
        out.push(acc);
    }
    out
}
