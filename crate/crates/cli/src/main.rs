mod commands;
mod fields;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyorder::dynamics::IntegratorConfig;
use polyorder::ToleranceConfig;
use serde::Serialize;

use fields::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "polyorder", version, about = "Polyorder dominance, equilibrium classification and flows")]
struct Cli {
    /// Seed for every sampled challenger and neighbourhood set.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Equality slack for all sign tests.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tau: f64,
    /// Uniform ε-grid size for segment sweeps.
    #[arg(long, global = true, default_value_t = 1025)]
    neps: usize,
    /// Directory receiving JSON/CSV artifacts and `manifest.json`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two points under a scalar or vector polyorder.
    Compare(CompareArgs),
    /// Classify one point: critical, minimal, maximal, stability notions.
    Classify(ClassifyArgs),
    /// Check a population game state (JSON file or built-in name).
    Game(GameArgs),
    /// Integrate a flow with fixed-step RK4.
    Flow(FlowArgs),
    /// Run the x·sin(1/x) case study or the mexican-hat counterexample.
    Casestudy(CasestudyArgs),
}

#[derive(Args, Debug, Serialize)]
#[group(required = true, multiple = false)]
pub struct FieldSel {
    /// Vector field reference: a registry name or a quadratic JSON file, optionally `neg:`-prefixed.
    #[arg(long)]
    vector: Option<String>,
    /// Scalar field reference, same syntax as `--vector`.
    #[arg(long)]
    scalar: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    field: FieldSel,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    field: FieldSel,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Neighbourhood radius; defaults to 5% of the domain diameter.
    #[arg(long)]
    radius: Option<f64>,
    /// Challenger count (grid points in 1-D, random samples otherwise).
    #[arg(long)]
    challengers: Option<usize>,
    /// Neighbourhood sample count.
    #[arg(long, default_value_t = 512)]
    neighborhood: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct GameArgs {
    /// Game JSON (`{"mode": "symmetric", "C": ..}` or `{"mode": "bimatrix", "A": .., "B": ..}`)
    /// or one of `hawk_dove`, `matching_pennies`, `prisoners_dilemma`.
    game: String,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Random challengers for the Nash test (vertices are always included).
    #[arg(long, default_value_t = 2000)]
    challengers: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct FlowArgs {
    /// Vector field `F` of `ẋ = F(x)`.
    #[arg(long)]
    field: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, default_value_t = 200.0)]
    tmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1e-6)]
    convergence_eps: f64,
    /// `auto`, or points separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    candidate: Option<String>,
    /// Catalog truncation used by `--candidate auto` for x·sin(1/x).
    #[arg(long, default_value_t = 25)]
    nmax: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct CasestudyArgs {
    #[arg(long, default_value_t = 25)]
    nmax: u32,
    /// Dominance window `lo,hi`; defaults to `-1/π+0.01,2`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Grid size over the dominance window.
    #[arg(long, default_value_t = 2000)]
    grid: usize,
    /// Catalog size searched for dominating minimal elements.
    #[arg(long, default_value_t = 1000)]
    dominance_nmax: u32,
    /// Challenger grid size for catalog verification.
    #[arg(long, default_value_t = 4096)]
    challenger_grid: usize,
    /// Run the mexican-hat counterexample instead.
    #[arg(long)]
    mexican_hat: bool,
    #[arg(long, default_value_t = 16)]
    circle_points: usize,
}

/// Shared run settings.
pub struct Context {
    pub seed: u64,
    pub cfg: ToleranceConfig,
}

/// What a command produced.
pub struct Report {
    pub name: &'static str,
    pub payload: serde_json::Value,
    pub summary: String,
    /// Extra artifacts written next to the JSON report.
    pub files: Vec<(String, Vec<u8>)>,
    pub integrator: Option<IntegratorConfig>,
}

#[derive(Serialize)]
struct ManifestConfig {
    tolerance: ToleranceConfig,
    integrator: IntegratorConfig,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    args: BTreeMap<String, serde_json::Value>,
    seed: u64,
    config: ManifestConfig,
    tool_version: String,
    outputs: Vec<String>,
}

fn pretty(v: &impl Serialize) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn write_outputs(dir: &Path, report: &Report, manifest: &mut RunManifest) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    let mut files = vec![(format!("{}.json", report.name), pretty(&report.payload)?.into_bytes())];
    files.extend(report.files.iter().cloned());
    for (name, bytes) in files {
        let path = dir.join(&name);
        std::fs::write(&path, bytes)?;
        manifest.outputs.push(path.display().to_string());
    }
    std::fs::write(dir.join("manifest.json"), pretty(manifest)?)?;
    Ok(())
}

fn args_map(v: serde_json::Value) -> BTreeMap<String, serde_json::Value> {
    match v {
        serde_json::Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = ToleranceConfig::default().with_tau(cli.tau).with_n_eps(cli.neps);
    cfg.validate()?;
    let ctx = Context {
        seed: cli.seed,
        cfg,
    };
    let (command, args, report) = match &cli.command {
        Command::Compare(a) => ("compare", serde_json::to_value(a)?, commands::compare(&ctx, a)?),
        Command::Classify(a) => ("classify", serde_json::to_value(a)?, commands::classify(&ctx, a)?),
        Command::Game(a) => ("game", serde_json::to_value(a)?, commands::game(&ctx, a)?),
        Command::Flow(a) => ("flow", serde_json::to_value(a)?, commands::flow(&ctx, a)?),
        Command::Casestudy(a) => ("casestudy", serde_json::to_value(a)?, commands::casestudy(&ctx, a)?),
    };
    if let Some(dir) = &cli.out_dir {
        let mut manifest = RunManifest {
            command: command.to_string(),
            args: args_map(args),
            seed: cli.seed,
            config: ManifestConfig {
                tolerance: cfg,
                integrator: report.integrator.unwrap_or_default(),
            },
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        };
        write_outputs(dir, &report, &mut manifest)?;
    }
    if cli.json {
        print!("{}", pretty(&report.payload)?);
    } else {
        println!("{}", report.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
