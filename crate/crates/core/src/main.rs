use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use seqshare::experiment::{
    certify_behavior_file, run_experiment, AngleValue, ConfigLayer, ExperimentConfig, Outcome,
};
use seqshare::RecursionVariant;

/// Sequential sharing of genuine tripartite nonlocality: simulate, score NS₂
/// per Charlie and certify with the hybrid-polytope LP.
#[derive(Debug, Parser)]
#[command(name = "seqshare", version)]
struct Cli {
    /// Number of sequential Charlies.
    #[arg(long)]
    n: Option<usize>,
    /// GGHZ angle in radians (accepts e.g. `pi/4`).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Charlie's measurement angle.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Schedule parameter δ in (0, pi/4].
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Take δ from the largest value keeping γ_1..γ_n in [0, 1].
    #[arg(long)]
    auto_delta: bool,
    #[arg(long, value_parser = ["printed", "normalized"])]
    recursion: Option<String>,
    /// Run the hybrid-polytope LP on every table.
    #[arg(long)]
    certify: bool,
    /// start:stop:step (endpoint included).
    #[arg(long)]
    sweep_delta: Option<String>,
    #[arg(long)]
    sweep_theta: Option<String>,
    #[arg(long)]
    sweep_alpha: Option<String>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write each round's behavior table as JSON into this directory.
    #[arg(long)]
    export_behaviors: Option<PathBuf>,
    /// Score (and with --certify, decide membership of) a behavior table
    /// file instead of running the protocol.
    #[arg(long)]
    import_behavior: Option<PathBuf>,
}

impl Cli {
    fn layer(&self) -> Result<ConfigLayer, seqshare::Error> {
        let angle = |s: &Option<String>| s.clone().map(AngleValue::Literal);
        Ok(ConfigLayer {
            n: self.n,
            alpha: angle(&self.alpha),
            theta: angle(&self.theta),
            delta: angle(&self.delta),
            epsilon: self.epsilon,
            auto_delta: self.auto_delta.then_some(true),
            recursion: self
                .recursion
                .as_deref()
                .map(str::parse::<RecursionVariant>)
                .transpose()?,
            certify: self.certify.then_some(true),
            sweep_delta: self.sweep_delta.clone(),
            sweep_theta: self.sweep_theta.clone(),
            sweep_alpha: self.sweep_alpha.clone(),
            out_csv: self.out_csv.clone(),
            out_json: self.out_json.clone(),
            export_behaviors: self.export_behaviors.clone(),
        })
    }
}

fn run(cli: Cli) -> Result<(), seqshare::Error> {
    let base = match &cli.config {
        Some(p) => ConfigLayer::from_json_file(p)?,
        None => ConfigLayer::default(),
    };
    let layer = base.overlay(cli.layer()?);

    if let Some(path) = &cli.import_behavior {
        let report = certify_behavior_file(path, layer.certify.unwrap_or(false))?;
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }

    let cfg = ExperimentConfig::from_layer(layer)?;
    let report = run_experiment(&cfg)?;
    let s = &report.summary;
    match &s.outcome {
        Outcome::Single(single) => {
            if let Some(d) = s.delta_used {
                println!("delta = {d:.9}, valid_upto = {}", single.point.valid_upto);
            }
            print!("{}", report.csv);
        }
        Outcome::Sweep(sweep) => {
            println!(
                "{} grid points ({} truncated), recursion {}",
                sweep.points_evaluated, sweep.truncated_points, cfg.recursion
            );
            println!(
                "max violating k = {}, leading violating k = {}",
                sweep.max_violating_k, sweep.leading_violating_k
            );
        }
    }
    if let Some(c) = &s.certifier {
        println!(
            "certified {} tables: {} infeasible, {} violated-but-feasible",
            c.tables_certified, c.infeasible, c.violated_but_feasible
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
