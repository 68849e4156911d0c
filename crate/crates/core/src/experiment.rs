//! Configuration, single runs, parameter sweeps and report files.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::BehaviorTable;
use crate::certifier::{hybrid_vertices, lp_feasible, VertexSet};
use crate::engine::{run_sequence, SequentialScenario};
use crate::error::{Error, Result};
use crate::inequality::{is_violation, ns2_value, Ns2Report};
use crate::io::{export_behavior, import_behavior, write_atomic};
use crate::measurements::{
    gamma_sequence_with_variant, validity_region_with_variant, RecursionVariant,
};
use crate::state::{build_gghz, GghzParams};

pub const CSV_HEADER: &str =
    "k,gamma_k,ns2_oracle,ns2_closed_form,discrepancy,violated,lp_feasible";

/// Parses radians, accepting `pi` literals such as `pi/4`, `-pi/8`,
/// `3pi/4`, `0.5*pi` or `2*pi/3` besides plain decimals.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let bad = || Error::InvalidConfig(format!("cannot parse angle {text:?}"));
    if let Ok(v) = s.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    }
    let (prefix, suffix) = s.split_once("pi").ok_or_else(bad)?;
    let prefix = prefix.strip_suffix('*').unwrap_or(prefix);
    let coefficient = match prefix {
        "" | "+" => 1.0,
        "-" => -1.0,
        p => p.parse::<f64>().map_err(|_| bad())?,
    };
    let value = if suffix.is_empty() {
        coefficient * PI
    } else if let Some(d) = suffix.strip_prefix('/') {
        let d: f64 = d.parse().map_err(|_| bad())?;
        if d == 0.0 {
            return Err(bad());
        }
        coefficient * PI / d
    } else if let Some(m) = suffix.strip_prefix('*') {
        coefficient * PI * m.parse::<f64>().map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Inclusive grid `start, start+step, …, stop`; `stop` is appended when the
/// step does not land on it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "sweep {text:?} must look like start:stop:step"
            )));
        }
        let r = Self {
            start: parse_angle(parts[0])?,
            stop: parse_angle(parts[1])?,
            step: parse_angle(parts[2])?,
        };
        if r.step.is_nan() || r.step <= 0.0 || r.stop < r.start {
            return Err(Error::InvalidConfig(format!(
                "sweep {text:?} needs start <= stop and a positive step"
            )));
        }
        Ok(r)
    }

    pub fn points(&self) -> Vec<f64> {
        let steps = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let mut pts: Vec<f64> = (0..=steps)
            .map(|i| self.start + i as f64 * self.step)
            .collect();
        let last = *pts.last().unwrap();
        if self.stop - last > 1e-9 * self.step {
            pts.push(self.stop);
        }
        pts
    }
}

/// An angle in a config file: a number or a literal such as `"pi/4"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Literal(String),
}

impl AngleValue {
    fn resolve(&self) -> Result<f64> {
        match self {
            Self::Radians(v) => Ok(*v),
            Self::Literal(s) => parse_angle(s),
        }
    }
}

/// Flat configuration as read from JSON or assembled from flags; every field
/// is optional so layers can be overlaid.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub n: Option<usize>,
    pub alpha: Option<AngleValue>,
    pub theta: Option<AngleValue>,
    pub delta: Option<AngleValue>,
    pub epsilon: Option<f64>,
    pub auto_delta: Option<bool>,
    pub recursion: Option<RecursionVariant>,
    pub certify: Option<bool>,
    pub sweep_delta: Option<String>,
    pub sweep_theta: Option<String>,
    pub sweep_alpha: Option<String>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub export_behaviors: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Fields set in `top` win over `self`.
    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            n: top.n.or(self.n),
            alpha: top.alpha.or(self.alpha),
            theta: top.theta.or(self.theta),
            delta: top.delta.or(self.delta),
            epsilon: top.epsilon.or(self.epsilon),
            auto_delta: top.auto_delta.or(self.auto_delta),
            recursion: top.recursion.or(self.recursion),
            certify: top.certify.or(self.certify),
            sweep_delta: top.sweep_delta.or(self.sweep_delta),
            sweep_theta: top.sweep_theta.or(self.sweep_theta),
            sweep_alpha: top.sweep_alpha.or(self.sweep_alpha),
            out_csv: top.out_csv.or(self.out_csv),
            out_json: top.out_json.or(self.out_json),
            export_behaviors: top.export_behaviors.or(self.export_behaviors),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub auto_delta: bool,
    pub recursion: RecursionVariant,
    pub certify: bool,
    pub sweep_delta: Option<SweepRange>,
    pub sweep_theta: Option<SweepRange>,
    pub sweep_alpha: Option<SweepRange>,
    #[serde(skip)]
    pub out_csv: Option<PathBuf>,
    #[serde(skip)]
    pub out_json: Option<PathBuf>,
    #[serde(skip)]
    pub export_behaviors: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1,
            alpha: FRAC_PI_4,
            theta: FRAC_PI_4,
            delta: FRAC_PI_4,
            epsilon: 0.001,
            auto_delta: false,
            recursion: RecursionVariant::Printed,
            certify: false,
            sweep_delta: None,
            sweep_theta: None,
            sweep_alpha: None,
            out_csv: None,
            out_json: None,
            export_behaviors: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_layer(layer: ConfigLayer) -> Result<Self> {
        let d = Self::default();
        let angle = |v: Option<AngleValue>, default: f64| v.map_or(Ok(default), |a| a.resolve());
        let sweep = |s: Option<String>| s.map(|s| SweepRange::parse(&s)).transpose();
        let cfg = Self {
            n: layer.n.unwrap_or(d.n),
            alpha: angle(layer.alpha, d.alpha)?,
            theta: angle(layer.theta, d.theta)?,
            delta: angle(layer.delta, d.delta)?,
            epsilon: layer.epsilon.unwrap_or(d.epsilon),
            auto_delta: layer.auto_delta.unwrap_or(d.auto_delta),
            recursion: layer.recursion.unwrap_or(d.recursion),
            certify: layer.certify.unwrap_or(d.certify),
            sweep_delta: sweep(layer.sweep_delta)?,
            sweep_theta: sweep(layer.sweep_theta)?,
            sweep_alpha: sweep(layer.sweep_alpha)?,
            out_csv: layer.out_csv,
            out_json: layer.out_json,
            export_behaviors: layer.export_behaviors,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn is_sweep(&self) -> bool {
        self.sweep_delta.is_some() || self.sweep_theta.is_some() || self.sweep_alpha.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.n == 0 {
            return fail("n must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail(format!("epsilon = {} must be positive", self.epsilon));
        }
        let alpha_ok = |a: f64| (0.0..=FRAC_PI_2).contains(&a);
        let theta_ok = |t: f64| t > 0.0 && t < FRAC_PI_2;
        let delta_ok = |d: f64| d > 0.0 && d <= FRAC_PI_4;
        let check = |name: &str,
                     sweep: &Option<SweepRange>,
                     fixed: f64,
                     ok: &dyn Fn(f64) -> bool,
                     domain: &str| {
            match sweep {
                Some(r) => match r.points().into_iter().find(|&p| !ok(p)) {
                    Some(p) => Err(Error::InvalidConfig(format!(
                        "{name} sweep point {p} is outside {domain}"
                    ))),
                    None => Ok(()),
                },
                None if ok(fixed) => Ok(()),
                None => Err(Error::InvalidConfig(format!(
                    "{name} = {fixed} is outside {domain}"
                ))),
            }
        };
        check(
            "alpha",
            &self.sweep_alpha,
            self.alpha,
            &alpha_ok,
            "[0, pi/2]",
        )?;
        check(
            "theta",
            &self.sweep_theta,
            self.theta,
            &theta_ok,
            "(0, pi/2)",
        )?;
        if self.auto_delta {
            if self.sweep_delta.is_some() {
                return fail("auto_delta and sweep_delta are mutually exclusive".into());
            }
        } else {
            check(
                "delta",
                &self.sweep_delta,
                self.delta,
                &delta_ok,
                "(0, pi/4]",
            )?;
        }
        for (name, p) in [
            ("out_csv", &self.out_csv),
            ("out_json", &self.out_json),
            ("export_behaviors", &self.export_behaviors),
        ] {
            if p.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
                return fail(format!("{name} path is empty"));
            }
        }
        if self.export_behaviors.is_some() && self.is_sweep() {
            return fail("export_behaviors is only available for single-point runs".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub k: usize,
    pub gamma_k: f64,
    pub ns2_oracle: f64,
    pub ns2_closed_form: f64,
    pub discrepancy: f64,
    pub violated: bool,
    pub lp_feasible: Option<bool>,
    pub lp_l1_residual: Option<f64>,
    pub lp_group_weights: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    pub alpha: f64,
    pub theta: f64,
    pub delta: f64,
    pub gammas: Vec<f64>,
    pub valid_upto: usize,
    pub rounds: Vec<RoundRecord>,
    /// Largest `k` whose round violates NS₂.
    pub max_violating_k: usize,
    /// Largest `k` such that rounds `1..=k` all violate.
    pub leading_violating_k: usize,
    #[serde(skip)]
    pub tables: Vec<BehaviorTable>,
}

fn evaluate_point(
    cfg: &ExperimentConfig,
    alpha: f64,
    theta: f64,
    delta: f64,
    vertices: Option<&VertexSet>,
    strict: bool,
) -> Result<PointResult> {
    let schedule = gamma_sequence_with_variant(delta, cfg.epsilon, cfg.n, cfg.recursion)?;
    if strict && schedule.valid_upto < cfg.n {
        return Err(Error::ScheduleTruncated {
            requested: cfg.n,
            valid_upto: schedule.valid_upto,
        });
    }
    let gammas = schedule.gammas.clone();
    let valid_upto = schedule.valid_upto;
    let rounds = cfg.n.min(valid_upto);
    let mut records = Vec::with_capacity(rounds);
    let mut tables = Vec::new();
    if rounds > 0 {
        let initial = build_gghz(GghzParams::new(alpha)?);
        let scenario = SequentialScenario::new(initial, theta, schedule, rounds)?;
        tables = run_sequence(&scenario)?;
        for t in &tables {
            let report = Ns2Report::from_table(t.round, alpha, &scenario, t)?;
            let lp = vertices.map(|v| lp_feasible(t, v)).transpose()?;
            records.push(RoundRecord {
                k: t.round,
                gamma_k: report.params.gammas[t.round - 1],
                ns2_oracle: report.oracle_value,
                ns2_closed_form: report.closed_form_value,
                discrepancy: report.discrepancy,
                violated: report.violated,
                lp_feasible: lp.as_ref().map(|r| r.feasible),
                lp_l1_residual: lp.as_ref().map(|r| r.l1_residual),
                lp_group_weights: lp.as_ref().filter(|r| r.feasible).map(|r| r.group_weights),
            });
        }
    }
    let max_violating_k = records
        .iter()
        .filter(|r| r.violated)
        .map(|r| r.k)
        .max()
        .unwrap_or(0);
    let leading_violating_k = records.iter().take_while(|r| r.violated).count();
    Ok(PointResult {
        alpha,
        theta,
        delta,
        gammas,
        valid_upto,
        rounds: records,
        max_violating_k,
        leading_violating_k,
        tables,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CertifierSummary {
    pub tables_certified: usize,
    pub infeasible: usize,
    pub violated_and_infeasible: usize,
    /// Tables with NS₂ > 3 that the LP still decomposed; nonzero means the
    /// certifier and the inequality disagree.
    pub violated_but_feasible: usize,
}

impl CertifierSummary {
    fn add(&mut self, point: &PointResult) {
        for r in &point.rounds {
            if let Some(feasible) = r.lp_feasible {
                self.tables_certified += 1;
                if !feasible {
                    self.infeasible += 1;
                    if r.violated {
                        self.violated_and_infeasible += 1;
                    }
                } else if r.violated {
                    self.violated_but_feasible += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub grid_sizes: GridSizes,
    pub points_evaluated: usize,
    pub truncated_points: usize,
    pub max_violating_k: usize,
    pub leading_violating_k: usize,
    /// Number of grid points whose round `k` violates, for `k = 1..=n`.
    pub violations_by_round: Vec<usize>,
    /// Grid points per value of their own `max_violating_k`.
    pub max_violating_k_histogram: BTreeMap<usize, usize>,
    pub best_point: PointResult,
    pub best_leading_point: PointResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSizes {
    pub delta: usize,
    pub theta: usize,
    pub alpha: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleSummary {
    pub point: PointResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Outcome {
    Single(SingleSummary),
    Sweep(Box<SweepSummary>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub params: ExperimentConfig,
    /// δ actually used (differs from `params.delta` under auto-delta).
    pub delta_used: Option<f64>,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub certifier: Option<CertifierSummary>,
}

impl ExperimentSummary {
    pub fn max_violating_k(&self) -> usize {
        match &self.outcome {
            Outcome::Single(s) => s.point.max_violating_k,
            Outcome::Sweep(s) => s.max_violating_k,
        }
    }

    pub fn leading_violating_k(&self) -> usize {
        match &self.outcome {
            Outcome::Single(s) => s.point.leading_violating_k,
            Outcome::Sweep(s) => s.leading_violating_k,
        }
    }

    /// Rounds written to the CSV report.
    pub fn csv_point(&self) -> &PointResult {
        match &self.outcome {
            Outcome::Single(s) => &s.point,
            Outcome::Sweep(s) => &s.best_point,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub summary: ExperimentSummary,
    pub csv: String,
    pub json: String,
}

pub fn render_csv(point: &PointResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &point.rounds {
        let lp = match r.lp_feasible {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{:.9},{:.9},{:.9},{:.9},{},{}",
            r.k, r.gamma_k, r.ns2_oracle, r.ns2_closed_form, r.discrepancy, r.violated, lp
        );
    }
    out
}

/// Runs a configured experiment and writes whichever reports are requested.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let vertices = cfg.certify.then(hybrid_vertices);
    let mut certifier = cfg.certify.then(CertifierSummary::default);
    let (outcome, delta_used) = if cfg.is_sweep() {
        let (sweep, counts) = run_sweep(cfg, vertices.as_ref())?;
        if let Some(c) = certifier.as_mut() {
            *c = counts;
        }
        (Outcome::Sweep(Box::new(sweep)), None)
    } else {
        let delta = if cfg.auto_delta {
            validity_region_with_variant(cfg.n, cfg.epsilon, cfg.recursion)?.ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "no delta in (0, pi/4] keeps {} sharpness values in [0, 1]",
                    cfg.n
                ))
            })?
        } else {
            cfg.delta
        };
        let point = evaluate_point(cfg, cfg.alpha, cfg.theta, delta, vertices.as_ref(), true)?;
        if let Some(c) = certifier.as_mut() {
            c.add(&point);
        }
        (Outcome::Single(SingleSummary { point }), Some(delta))
    };
    let summary = ExperimentSummary {
        params: cfg.clone(),
        delta_used,
        outcome,
        certifier,
    };

    let csv = render_csv(summary.csv_point());
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');

    if let Some(dir) = &cfg.export_behaviors {
        for t in &summary.csv_point().tables {
            export_behavior(t, &dir.join(format!("round_{}.json", t.round)))?;
        }
    }
    if let Some(p) = &cfg.out_csv {
        write_atomic(p, csv.as_bytes())?;
    }
    if let Some(p) = &cfg.out_json {
        write_atomic(p, json.as_bytes())?;
    }
    Ok(ExperimentReport { summary, csv, json })
}

fn run_sweep(
    cfg: &ExperimentConfig,
    vertices: Option<&VertexSet>,
) -> Result<(SweepSummary, CertifierSummary)> {
    let deltas = cfg
        .sweep_delta
        .as_ref()
        .map_or(vec![cfg.delta], SweepRange::points);
    let thetas = cfg
        .sweep_theta
        .as_ref()
        .map_or(vec![cfg.theta], SweepRange::points);
    let alphas = cfg
        .sweep_alpha
        .as_ref()
        .map_or(vec![cfg.alpha], SweepRange::points);
    let mut grid = Vec::with_capacity(deltas.len() * thetas.len() * alphas.len());
    for &d in &deltas {
        for &t in &thetas {
            for &a in &alphas {
                grid.push((d, t, a));
            }
        }
    }

    let results: Vec<PointResult> = grid
        .par_iter()
        .map(|&(d, t, a)| {
            evaluate_point(cfg, a, t, d, vertices, false).map(|mut p| {
                p.tables.clear();
                p
            })
        })
        .collect::<Result<_>>()?;

    let mut violations_by_round = vec![0; cfg.n];
    let mut histogram = BTreeMap::new();
    let mut certifier = CertifierSummary::default();
    let mut best = 0usize;
    let mut best_leading = 0usize;
    for (i, p) in results.iter().enumerate() {
        for r in p.rounds.iter().filter(|r| r.violated) {
            violations_by_round[r.k - 1] += 1;
        }
        *histogram.entry(p.max_violating_k).or_insert(0) += 1;
        if p.max_violating_k > results[best].max_violating_k {
            best = i;
        }
        if p.leading_violating_k > results[best_leading].leading_violating_k {
            best_leading = i;
        }
        certifier.add(p);
    }
    let summary = SweepSummary {
        grid_sizes: GridSizes {
            delta: deltas.len(),
            theta: thetas.len(),
            alpha: alphas.len(),
        },
        points_evaluated: results.len(),
        truncated_points: results.iter().filter(|p| p.valid_upto < cfg.n).count(),
        max_violating_k: results[best].max_violating_k,
        leading_violating_k: results[best_leading].leading_violating_k,
        violations_by_round,
        max_violating_k_histogram: histogram,
        best_point: results[best].clone(),
        best_leading_point: results[best_leading].clone(),
    };
    Ok((summary, certifier))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportReport {
    pub round: usize,
    pub no_signaling_residual: f64,
    pub ns2_value: f64,
    pub violated: bool,
    pub lp_feasible: Option<bool>,
    pub certificate: Option<String>,
}

/// Loads an external behavior table and, with `certify`, decides hybrid
/// membership. Signaling tables are refused.
pub fn certify_behavior_file(path: &Path, certify: bool) -> Result<ImportReport> {
    let t = import_behavior(path)?;
    let ns = t.no_signaling_report();
    if !ns.passed {
        return Err(Error::Signaling {
            residual: ns.residual,
            location: ns.location.unwrap_or_default(),
        });
    }
    let value = ns2_value(&t)?;
    let lp = if certify {
        Some(lp_feasible(&t, &hybrid_vertices())?)
    } else {
        None
    };
    Ok(ImportReport {
        round: t.round,
        no_signaling_residual: ns.residual,
        ns2_value: value,
        violated: is_violation(value),
        lp_feasible: lp.as_ref().map(|r| r.feasible),
        certificate: lp.map(|r| r.certificate),
    })
}
