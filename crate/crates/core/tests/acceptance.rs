//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, SQRT_2};
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use seqshare::behavior::{NORMALIZATION_TOL, NO_SIGNALING_TOL};
use seqshare::certifier::{FEASIBILITY_TOL, VERTEX_COUNT};
use seqshare::engine::{behavior, sequential_states};
use seqshare::experiment::{run_experiment, ExperimentConfig, SweepRange};
use seqshare::inequality::compare;
use seqshare::{
    build_gghz, closed_form_ns2, gamma_sequence, gamma_sequence_with_variant, hybrid_vertices,
    lp_feasible, ns2_value, run_sequence, validate_density, validity_region, BehaviorTable,
    GghzParams, RecursionVariant, SequentialScenario,
};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    check(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn gghz(alpha: f64) -> seqshare::TripartiteState {
    build_gghz(GghzParams::new(alpha).unwrap())
}

fn k1_closed_form() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let alpha = rng.gen_range(0.0..=FRAC_PI_2);
        let theta = rng.gen_range(1e-6..FRAC_PI_2);
        let gamma = rng.gen_range(0.0..=1.0);
        let t = behavior(&gghz(alpha), theta, gamma).map_err(|e| e.to_string())?;
        let sim = ns2_value(&t).map_err(|e| e.to_string())?;
        let cf = closed_form_ns2(1, alpha, theta, &[gamma]).map_err(|e| e.to_string())?;
        worst = worst.max((sim - cf).abs());
    }
    let took = start.elapsed();
    check(worst < 1e-10, || {
        format!("max |oracle - closed form| = {worst:e}")
    })?;
    within(Duration::from_secs(1), took)?;
    Ok(format!("100 random points, max gap {worst:.2e}, {took:?}"))
}

fn sharp_maximum() -> Outcome {
    let t = behavior(&gghz(FRAC_PI_4), FRAC_PI_4, 1.0).map_err(|e| e.to_string())?;
    let sim = ns2_value(&t).map_err(|e| e.to_string())?;
    let cf = closed_form_ns2(1, FRAC_PI_4, FRAC_PI_4, &[1.0]).map_err(|e| e.to_string())?;
    let want = 1.0 + 2.0 * SQRT_2;
    check((sim - want).abs() < 1e-9, || {
        format!("oracle NS2 = {sim:.12}")
    })?;
    check((cf - want).abs() < 1e-9, || {
        format!("closed form = {cf:.12}")
    })?;
    Ok(format!("NS2 = {sim:.10} (1 + 2 sqrt 2 = {want:.10})"))
}

fn two_charlie_point() -> Outcome {
    let start = Instant::now();
    let sched = gamma_sequence(FRAC_PI_4, 0.001, 3).map_err(|e| e.to_string())?;
    let scen = SequentialScenario::new(gghz(FRAC_PI_4), FRAC_PI_4, sched.clone(), 2)
        .map_err(|e| e.to_string())?;
    let tables = run_sequence(&scen).map_err(|e| e.to_string())?;
    let ns1 = ns2_value(&tables[0]).map_err(|e| e.to_string())?;
    let ns2 = ns2_value(&tables[1]).map_err(|e| e.to_string())?;
    let took = start.elapsed();

    // independently computed reference values
    let expected = [
        ("gamma_1", sched.gammas[0], 0.414_627_776),
        ("gamma_2", sched.gammas[1], 0.919_354_458),
        ("NS2^1", ns1, 3.000_585_786),
        ("NS2^2", ns2, 3.000_649_432),
    ];
    for (name, got, want) in expected {
        check((got - want).abs() < 1e-6, || {
            format!("{name} = {got:.9}, want {want:.9}")
        })?;
    }
    check(ns1 > 3.0 && ns2 > 3.0, || "no violation".into())?;
    check(sched.gammas.len() == 3 && sched.gammas[2] > 1.0, || {
        format!("gamma_3 should leave [0, 1]: {:?}", sched.gammas)
    })?;
    check(sched.valid_upto == 2, || {
        format!("valid_upto = {}", sched.valid_upto)
    })?;
    within(Duration::from_secs(1), took)?;

    let printed = [
        ("gamma_2", sched.gammas[1], 0.919_344),
        ("NS2^1", ns1, 3.000_587),
        ("NS2^2", ns2, 3.000_658),
    ];
    let notes: Vec<String> = printed
        .iter()
        .map(|(n, got, lit)| format!("{n} {got:.9} vs quoted {lit} (diff {:+.1e})", got - lit))
        .collect();
    Ok(format!(
        "gamma = {:.9}, {:.9}, gamma_3 = {:.6} out of range; NS2 = {ns1:.9}, {ns2:.9}; {}",
        sched.gammas[0],
        sched.gammas[1],
        sched.gammas[2],
        notes.join("; ")
    ))
}

fn closed_form_audit() -> Outcome {
    let sched = gamma_sequence(FRAC_PI_4, 0.001, 2).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for theta in [FRAC_PI_4, FRAC_PI_8] {
        let scen = SequentialScenario::new(gghz(FRAC_PI_4), theta, sched.clone(), 2)
            .map_err(|e| e.to_string())?;
        for k in 1..=2 {
            let r = compare(k, FRAC_PI_4, &scen).map_err(|e| e.to_string())?;
            if theta == FRAC_PI_4 {
                check(r.discrepancy < 1e-10, || {
                    format!("theta = pi/4, k = {k}: gap {:e}", r.discrepancy)
                })?;
            } else {
                check(
                    r.oracle_value.is_finite() && r.closed_form_value.is_finite(),
                    || "non-finite report".into(),
                )?;
                lines.push(format!(
                    "theta = pi/8, k = {k}: oracle {:.9}, closed form {:.9}, gap {:.3e}",
                    r.oracle_value, r.closed_form_value, r.discrepancy
                ));
            }
        }
    }
    Ok(format!(
        "theta = pi/4 agrees to 1e-10 for k = 1, 2; {}",
        lines.join("; ")
    ))
}

fn validity_property() -> Outcome {
    let start = Instant::now();
    let mut prev = f64::INFINITY;
    let mut found = Vec::new();
    for n in 1..=8 {
        let d = validity_region(n, 0.001)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("n = {n}: no valid delta"))?;
        check(d > 0.0, || format!("n = {n}: delta_max = {d}"))?;
        let s = gamma_sequence(d, 0.001, n).map_err(|e| e.to_string())?;
        check(
            s.valid_upto >= n && s.gammas[..n].iter().all(|g| (0.0..=1.0).contains(g)),
            || format!("n = {n}: schedule at delta_max {d:e} is {:?}", s.gammas),
        )?;
        check(d <= prev, || format!("delta_max increases at n = {n}"))?;
        prev = d;
        found.push(format!("{d:.3e}"));
    }
    let took = start.elapsed();
    within(Duration::from_secs(10), took)?;
    Ok(format!(
        "delta_max(1..8) = [{}], {took:?}",
        found.join(", ")
    ))
}

fn certifier_soundness() -> Outcome {
    let start = Instant::now();
    let v = hybrid_vertices();
    check(v.len() == VERTEX_COUNT && v.len() == 288, || {
        format!("{} vertices", v.len())
    })?;
    for (i, vx) in v.vertices.iter().enumerate() {
        let r = lp_feasible(vx, &v).map_err(|e| e.to_string())?;
        check(r.feasible && r.residual < FEASIBILITY_TOL, || {
            format!("vertex {i}: {}", r.certificate)
        })?;
    }
    let r = lp_feasible(&BehaviorTable::uniform(), &v).map_err(|e| e.to_string())?;
    check(r.feasible && r.residual < FEASIBILITY_TOL, || {
        r.certificate.clone()
    })?;

    let scan = common::scan_set(42);
    check(scan.len() == 1000, || {
        format!("scan has {} tables", scan.len())
    })?;
    let scan_start = Instant::now();
    let (mut violating, mut infeasible) = (0, 0);
    for (i, t) in scan.iter().enumerate() {
        let r = lp_feasible(t, &v).map_err(|e| e.to_string())?;
        if !r.feasible {
            infeasible += 1;
        }
        if common::max_relabeled_ns2(t) > 3.0 {
            violating += 1;
            check(!r.feasible, || {
                format!("scan table {i} violates NS2 but LP says feasible")
            })?;
        }
    }
    let scan_took = scan_start.elapsed();
    within(Duration::from_secs(60), scan_took)?;

    // every violating table anywhere on the full claim-audit grid
    let grid = common::audit_grid_tables(1);
    let mut grid_violating = 0;
    for t in &grid {
        if common::max_relabeled_ns2(t) > 3.0 {
            grid_violating += 1;
            let r = lp_feasible(t, &v).map_err(|e| e.to_string())?;
            check(!r.feasible, || {
                "claim-audit table violates NS2 but LP says feasible".into()
            })?;
        }
    }
    Ok(format!(
        "288 vertices + uniform feasible; scan of 1000: {violating} violating, {infeasible} infeasible in {scan_took:?}; \
         {grid_violating} violating tables of {} on the full grid all infeasible; total {:?}",
        grid.len(),
        start.elapsed()
    ))
}

fn physicality() -> Outcome {
    let deltas = SweepRange::parse("0.01:pi/4:0.01").unwrap().points();
    let thetas = SweepRange::parse("0.01:1.57:0.01").unwrap().points();
    let (mut states, mut tables) = (0, 0);
    for variant in [RecursionVariant::Printed, RecursionVariant::Normalized] {
        for &d in deltas.iter().step_by(6) {
            for &theta in thetas.iter().step_by(6) {
                for alpha in [0.0, FRAC_PI_8, FRAC_PI_4] {
                    let sched = gamma_sequence_with_variant(d, 0.001, 5, variant)
                        .map_err(|e| e.to_string())?;
                    let rounds = sched.valid_upto.min(5);
                    if rounds == 0 {
                        continue;
                    }
                    let scen = SequentialScenario::new(gghz(alpha), theta, sched, rounds)
                        .map_err(|e| e.to_string())?;
                    for st in sequential_states(&scen).map_err(|e| e.to_string())? {
                        let r = validate_density(&st);
                        check(r.passed, || format!("{variant} d={d} theta={theta}: {r}"))?;
                        states += 1;
                    }
                    let ts = run_sequence(&scen).map_err(|e| e.to_string())?;
                    for t in &ts {
                        t.check_normalized(NORMALIZATION_TOL)
                            .map_err(|e| e.to_string())?;
                        let ns = t.no_signaling_report();
                        check(ns.residual < NO_SIGNALING_TOL, || {
                            format!("no-signaling residual {:e}", ns.residual)
                        })?;
                        for s in 0..8usize {
                            let (x, y, z) = (s >> 2, s >> 1 & 1, s & 1);
                            let m0 = ts[0].marginal(0b110, x, y, z);
                            let m = t.marginal(0b110, x, y, z);
                            let gap = m0
                                .iter()
                                .zip(&m)
                                .map(|(a, b)| (a - b).abs())
                                .fold(0.0, f64::max);
                            check(gap < 1e-10, || format!("Alice/Bob marginal drift {gap:e}"))?;
                        }
                        tables += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{states} states and {tables} tables checked"))
}

fn claim_audit() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for variant in [RecursionVariant::Printed, RecursionVariant::Normalized] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let csv = dir.path().join(format!("{variant}_{run}.csv"));
            let json = dir.path().join(format!("{variant}_{run}.json"));
            let cfg = ExperimentConfig {
                n: 5,
                recursion: variant,
                sweep_delta: Some(SweepRange::parse("0.01:pi/4:0.01").unwrap()),
                sweep_theta: Some(SweepRange::parse("0.01:1.57:0.01").unwrap()),
                out_csv: Some(csv.clone()),
                out_json: Some(json.clone()),
                ..ExperimentConfig::default()
            };
            let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let c = fs::read(&csv).map_err(|e| e.to_string())?;
            let j = fs::read(&json).map_err(|e| e.to_string())?;
            check(
                c.starts_with(seqshare::experiment::CSV_HEADER.as_bytes()),
                || "bad CSV header".into(),
            )?;
            let parsed: serde_json::Value =
                serde_json::from_slice(&j).map_err(|e| e.to_string())?;
            let k = parsed["max_violating_k"]
                .as_u64()
                .ok_or("JSON lacks max_violating_k")?;
            check(k as usize == report.summary.max_violating_k(), || {
                "JSON disagrees with summary".into()
            })?;
            outputs.push((c, j, k, parsed["leading_violating_k"].as_u64()));
        }
        check(
            outputs[0].0 == outputs[1].0 && outputs[0].1 == outputs[1].1,
            || format!("{variant}: reports differ between runs"),
        )?;
        notes.push(format!(
            "{variant}: max violating k = {}, leading violating k = {}",
            outputs[0].2,
            outputs[0].3.unwrap_or(0)
        ));
    }
    Ok(format!(
        "12403-point grid, reports byte-identical across runs; {}",
        notes.join("; ")
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("k=1 closed-form equivalence", k1_closed_form),
        ("sharp-measurement maximum", sharp_maximum),
        ("two-Charlie violation point", two_charlie_point),
        ("closed-form audit", closed_form_audit),
        ("validity region property", validity_property),
        ("certifier soundness", certifier_soundness),
        ("physicality", physicality),
        ("claim audit sweep", claim_audit),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
