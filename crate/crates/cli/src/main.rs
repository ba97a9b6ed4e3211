//! `crnlab` command-line front end.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 arrangement limit
//! exceeded, 3 a solver did not converge.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crnlab::birch::{birch_point, BirchError, BirchOptions};
use crnlab::classify::{is_w_endotactic, strong_condition_holds, ClassifyError, ClassifyOptions};
use crnlab::dynamics::export::{phase_plane_svg, to_csv};
use crnlab::dynamics::{find_steady_state, simulate, DynamicsError, RatePolicy, SimulateOptions, SteadyOptions};
use crnlab::geometry::linalg::{format_qvec, q_from_f64, Q};
use crnlab::geometry::{GeometryError, DEFAULT_MAX_HYPERPLANES};
use crnlab::jets::{
    cutoff_scan, pull_sum_svg, run_jet_experiment, BetaSchedule, DominationOptions, Frame, JetSchedule, ScanMode,
    ScanOptions, ThetaSchedule,
};
use crnlab::report::{csv_header, stamp_svg, to_json};
use crnlab::{parse_network, stoichiometric_subspace, ReactionNetwork, Tempering};

#[derive(Parser)]
#[command(name = "crnlab", version, about = "Analyses of chemical reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide weak reversibility, endotacticity and strong endotacticity.
    Classify(ClassifyArgs),
    /// Birch point of the toric pencil through alpha in the polyhedron of x0.
    Birch(BirchArgs),
    /// Integrate a trajectory of the tempered mass-action inclusion.
    Simulate(SimulateArgs),
    /// Find a positive steady state for fixed rates.
    Steady(SteadyArgs),
    /// Worst-case sum-of-pulls scan and empirical cutoff.
    Scan(ScanArgs),
    /// Reaction levels and domination along a toric jet.
    Jets(JetsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(clap::Args)]
struct ClassifyArgs {
    file: PathBuf,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Check a single rational direction, e.g. `1,0` or `1/2,-3`.
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<String>,
    /// Sample random directions when the arrangement is too large.
    #[arg(long)]
    allow_sampling: bool,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct BirchArgs {
    file: PathBuf,
    #[arg(long)]
    x0: String,
    /// Defaults to all ones.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    /// Interval midpoints throughout.
    Mid,
    /// One uniform draw per reaction.
    Sampled,
    /// Uniform redraws every `--dt`.
    Piecewise,
}

#[derive(clap::Args)]
struct RateArgs {
    /// Fixed rate constants, overriding any tempering in the file.
    #[arg(long)]
    rates: Option<String>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    file: PathBuf,
    #[arg(long)]
    x0: String,
    #[arg(long)]
    t_end: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Mid)]
    policy: PolicyArg,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    rates: RateArgs,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Minimum time between recorded states; defaults to t_end / 1000.
    #[arg(long)]
    record_dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Species pair for the SVG phase plane, e.g. `X,Y`.
    #[arg(long)]
    species: Option<String>,
}

#[derive(clap::Args)]
struct SteadyArgs {
    file: PathBuf,
    #[arg(long)]
    x0: String,
    #[command(flatten)]
    rates: RateArgs,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(clap::Args)]
struct ScanArgs {
    file: PathBuf,
    /// Values of log(theta), comma separated and increasing.
    #[arg(long)]
    theta_grid: Option<String>,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to the invariant polyhedron through this point when the
    /// network has conservation laws.
    #[arg(long)]
    x0: Option<String>,
    #[command(flatten)]
    rates: RateArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(clap::Args)]
struct JetsArgs {
    file: PathBuf,
    /// Frame vectors separated by `;`, e.g. `0,-1;-1,0`. Vectors are
    /// normalized; they must be orthogonal.
    #[arg(long, allow_hyphen_values = true)]
    frame: String,
    /// `power[:p]` for β_j(i) = i^{-p(j-1)}, or `expsq` for exp(-(j-1)i²).
    #[arg(long, default_value = "power:1")]
    schedule: String,
    #[arg(long, value_enum, default_value_t = ThetaArg::Exp)]
    theta: ThetaArg,
    #[arg(long, default_value_t = 1)]
    i_min: usize,
    #[arg(long, default_value_t = 1000)]
    i_max: usize,
    #[arg(long, default_value_t = 1e3)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaArg {
    /// θ(i) = e^i.
    Exp,
    /// θ(i) = 1 + i.
    Linear,
}

enum Failure {
    Input(String),
    Limit(String),
    NoConvergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Limit(_) => 2,
            Failure::NoConvergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Limit(m) | Failure::NoConvergence(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out = match cli.command {
        Command::Classify(a) => cmd_classify(&a),
        Command::Birch(a) => cmd_birch(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Steady(a) => cmd_steady(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Jets(a) => cmd_jets(&a),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn load(path: &PathBuf) -> Result<(ReactionNetwork, Option<Tempering>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let parsed = parse_network(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((parsed.network, parsed.tempering))
}

fn max_hyperplanes() -> Result<usize, Failure> {
    match std::env::var("CRN_MAX_HYPERPLANES") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("CRN_MAX_HYPERPLANES: not a count: {v}"))),
        Err(_) => Ok(DEFAULT_MAX_HYPERPLANES),
    }
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Failure::Input(format!("{what}: not a number: {p:?}"))))
        .collect()
}

fn sized(s: &str, what: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let v = floats(s, what)?;
    if v.len() != n {
        return Err(Failure::Input(format!("{what}: expected {n} values, got {}", v.len())));
    }
    Ok(v)
}

fn rational(s: &str) -> Result<Q, Failure> {
    let s = s.trim();
    if let Ok(q) = Q::from_str(s) {
        return Ok(q);
    }
    s.parse::<f64>()
        .ok()
        .and_then(q_from_f64)
        .ok_or_else(|| Failure::Input(format!("direction: not a rational number: {s:?}")))
}

/// Tempering from `--rates`, else from the file, else unit rates.
fn tempering(net: &ReactionNetwork, file: Option<Tempering>, rates: &RateArgs) -> Result<Tempering, Failure> {
    if let Some(r) = &rates.rates {
        let k = sized(r, "rates", net.reactions().len())?;
        return Tempering::fixed(net, &k).map_err(input);
    }
    match file {
        Some(t) => Ok(t),
        None => Tempering::fixed(net, &vec![1.0; net.reactions().len()]).map_err(input),
    }
}

fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::Geometry(g @ GeometryError::ArrangementTooLarge { .. }) => Failure::Limit(g.to_string()),
        other => input(other),
    }
}

#[derive(Serialize)]
struct DirectionReport {
    direction: Vec<String>,
    w_endotactic: bool,
    violating_reaction: Option<String>,
    strong_condition: bool,
}

fn cmd_classify(a: &ClassifyArgs) -> Result<String, Failure> {
    let (net, _) = load(&a.file)?;
    if let Some(d) = &a.direction {
        let w: Vec<Q> = d.split(',').map(rational).collect::<Result<_, _>>()?;
        let check = is_w_endotactic(&net, &w).map_err(classify_failure)?;
        let report = DirectionReport {
            direction: format_qvec(&w),
            w_endotactic: check.holds,
            violating_reaction: check.violating_reaction.map(|r| net.describe_reaction(r)),
            strong_condition: strong_condition_holds(&net, &w).map_err(classify_failure)?,
        };
        if a.json {
            return Ok(to_json("classify", None, &report));
        }
        let mut s = format!("direction: ({})\nw-endotactic: {}\n", report.direction.join(", "), report.w_endotactic);
        if let Some(r) = &report.violating_reaction {
            s.push_str(&format!("violating reaction: {r}\n"));
        }
        s.push_str(&format!("strong condition: {}\n", report.strong_condition));
        return Ok(s);
    }
    let opts = ClassifyOptions {
        max_hyperplanes: max_hyperplanes()?,
        allow_sampling: a.allow_sampling,
        samples: a.samples,
        seed: a.seed,
    };
    let report = crnlab::classify(&net, &opts).map_err(classify_failure)?;
    let seed = a.allow_sampling.then_some(a.seed);
    if a.json {
        return Ok(to_json("classify", seed, &report));
    }
    let v = serde_json::to_value(&report).expect("report serializes");
    let mut s = String::new();
    s.push_str(&format!("weakly reversible: {}\n", report.weakly_reversible));
    s.push_str(&format!("endotactic: {}\n", report.endotactic));
    s.push_str(&format!("strongly endotactic: {}\n", report.strongly_endotactic));
    s.push_str(&format!("verdict: {}\n", v["verdict"].as_str().unwrap_or("")));
    if let Some(fp) = report.fast_path {
        s.push_str(&format!("fast path: {}\n", fp.name()));
    }
    if let Some(w) = &report.witness {
        s.push_str(&format!("witness: ({})\n", format_qvec(w).join(", ")));
    }
    if let Some(r) = report.violating_reaction {
        s.push_str(&format!("violating reaction: {}\n", net.describe_reaction(r)));
    }
    s.push_str(&format!("faces: {}\n", report.face_count));
    Ok(s)
}

fn cmd_birch(a: &BirchArgs) -> Result<String, Failure> {
    let (net, _) = load(&a.file)?;
    let n = net.n_species();
    let x0 = sized(&a.x0, "x0", n)?;
    let alpha = match &a.alpha {
        Some(s) => sized(s, "alpha", n)?,
        None => vec![1.0; n],
    };
    let stoich = stoichiometric_subspace(&net);
    match birch_point(&stoich, &x0, &alpha, &BirchOptions { tol: a.tol, max_iter: a.max_iter }) {
        Ok(sol) => Ok(to_json("birch", None, &sol)),
        Err(e @ BirchError::NoConvergence { .. }) => Err(Failure::NoConvergence(e.to_string())),
        Err(e) => Err(input(e)),
    }
}

fn dynamics_failure(e: DynamicsError) -> Failure {
    match e {
        e @ DynamicsError::NoConvergence { .. } => Failure::NoConvergence(e.to_string()),
        other => input(other),
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<String, Failure> {
    let (net, file_t) = load(&a.file)?;
    let x0 = sized(&a.x0, "x0", net.n_species())?;
    let t = tempering(&net, file_t, &a.rates)?;
    let policy = match a.policy {
        PolicyArg::Mid => RatePolicy::ConstantMid,
        PolicyArg::Sampled => RatePolicy::ConstantSampled { seed: a.seed },
        PolicyArg::Piecewise => RatePolicy::PiecewiseConstant { dt: a.dt, seed: a.seed },
    };
    let mut opts = SimulateOptions::default();
    opts.control.rtol = a.rtol;
    opts.control.atol = a.atol;
    opts.record_dt = a.record_dt.unwrap_or(a.t_end / 1000.0);
    let traj = simulate(&net, &t, &policy, &x0, a.t_end, &opts).map_err(dynamics_failure)?;
    let seed = policy.seed();
    match a.format {
        Format::Json => Ok(to_json("simulate", seed, &traj)),
        Format::Csv => Ok(csv_header("simulate", seed) + &to_csv(&traj, &net).map_err(dynamics_failure)?),
        Format::Svg => {
            let (i, j) = species_pair(&net, a.species.as_deref())?;
            Ok(stamp_svg(&phase_plane_svg(&traj, &net, i, j), "simulate", seed))
        }
    }
}

fn species_pair(net: &ReactionNetwork, spec: Option<&str>) -> Result<(usize, usize), Failure> {
    match spec {
        None if net.n_species() >= 2 => Ok((0, 1)),
        None => Err(Failure::Input("phase plane needs two species".into())),
        Some(s) => {
            let names: Vec<&str> = s.split(',').map(str::trim).collect();
            let [a, b] = names[..] else {
                return Err(Failure::Input("--species takes two names".into()));
            };
            let idx = |name: &str| net.species_index(name).ok_or_else(|| Failure::Input(format!("unknown species {name}")));
            Ok((idx(a)?, idx(b)?))
        }
    }
}

fn cmd_steady(a: &SteadyArgs) -> Result<String, Failure> {
    let (net, file_t) = load(&a.file)?;
    let x0 = sized(&a.x0, "x0", net.n_species())?;
    let k = tempering(&net, file_t, &a.rates)?.midpoints();
    let opts = SteadyOptions { tol: a.tol, restarts: a.restarts, seed: a.seed, ..SteadyOptions::default() };
    let s = find_steady_state(&net, &k, &x0, &opts).map_err(dynamics_failure)?;
    Ok(to_json("steady", Some(a.seed), &s))
}

fn cmd_scan(a: &ScanArgs) -> Result<String, Failure> {
    let (net, file_t) = load(&a.file)?;
    let t = tempering(&net, file_t, &a.rates)?;
    let mut opts = ScanOptions {
        direction_samples: a.samples,
        seed: a.seed,
        max_hyperplanes: max_hyperplanes()?,
        ..ScanOptions::default()
    };
    if let Some(g) = &a.theta_grid {
        opts.log_theta_grid = floats(g, "theta-grid")?;
    }
    if let Format::Svg = a.format {
        let last = *opts.log_theta_grid.last().ok_or_else(|| Failure::Input("empty theta grid".into()))?;
        return Ok(stamp_svg(&pull_sum_svg(&net, &t, last).map_err(input)?, "scan", None));
    }
    let mode = match &a.x0 {
        Some(s) if stoichiometric_subspace(&net).dimension < net.n_species() => {
            ScanMode::Polyhedron { x0: sized(s, "x0", net.n_species())? }
        }
        _ => ScanMode::Orthant,
    };
    let report = cutoff_scan(&net, &t, mode, &opts).map_err(input)?;
    match a.format {
        Format::Csv => Err(Failure::Input("scan supports json and svg output".into())),
        _ => Ok(to_json("scan", Some(a.seed), &report)),
    }
}

fn parse_schedule(s: &str, theta: ThetaArg) -> Result<JetSchedule, Failure> {
    let beta = match s.split_once(':') {
        None if s == "power" => BetaSchedule::Power { p: 1.0 },
        None if s == "expsq" => BetaSchedule::ExpSquare,
        Some(("power", p)) => {
            BetaSchedule::Power { p: p.parse().map_err(|_| Failure::Input(format!("schedule: bad exponent {p:?}")))? }
        }
        _ => return Err(Failure::Input(format!("schedule: expected power[:p] or expsq, got {s:?}"))),
    };
    let theta = match theta {
        ThetaArg::Exp => ThetaSchedule::Exp,
        ThetaArg::Linear => ThetaSchedule::Linear,
    };
    Ok(JetSchedule { beta, theta })
}

fn parse_frame(s: &str, n: usize) -> Result<Frame, Failure> {
    let mut raw = Vec::new();
    for part in s.split(';') {
        let v = sized(part, "frame", n)?;
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Failure::Input("frame: zero vector".into()));
        }
        raw.push(v.into_iter().map(|x| x / norm).collect::<Vec<f64>>());
    }
    for (i, u) in raw.iter().enumerate() {
        for v in &raw[i + 1..] {
            if u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs() > 1e-9 {
                return Err(Failure::Input("frame: vectors are not orthogonal".into()));
            }
        }
    }
    Frame::orthonormalize(&raw).map_err(input)
}

fn cmd_jets(a: &JetsArgs) -> Result<String, Failure> {
    let (net, _) = load(&a.file)?;
    let frame = parse_frame(&a.frame, net.n_species())?;
    let schedule = parse_schedule(&a.schedule, a.theta)?;
    let opts = DominationOptions { threshold: a.threshold, ..DominationOptions::default() };
    let exp = run_jet_experiment(&net, &frame, &schedule, a.i_min, a.i_max, &opts).map_err(input)?;
    match a.format {
        Format::Json => Ok(to_json("jets", None, &exp)),
        Format::Csv => Ok(csv_header("jets", None) + &crnlab::jets::series_csv(&exp.domination)),
        Format::Svg => Err(Failure::Input("jets supports json and csv output".into())),
    }
}
