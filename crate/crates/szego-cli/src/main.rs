//! `szego`: direct and inverse spectral transforms, flow and growth scans
//! from the command line.
//!
//! Exit codes: 0 success, 1 verification or numerical failure, 2 bad input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use szego::flow::{self, log_grid, turbulence_scan};
use szego::inverse::{InverseSolution, VerificationReport};
use szego::io::{self, fmt_f64, BlaschkeJson, RationalJson};
use szego::{direct_spectral_data, RationalFunction, SpectralData, SzegoError};

/// Default tolerance of `verify` when neither `--tol` nor `SZEGO_TOL` is set.
const DEFAULT_TOL: f64 = 1e-8;
/// Step and relative threshold of the flow residual included in `verify`.
const FLOW_STEP: f64 = 1e-4;
const FLOW_TOL: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "szego", version, about = "Spectral transform and exact flow of the cubic Szegő equation on the line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symbol JSON to spectral data JSON.
    Direct {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spectral data JSON to symbol JSON.
    Inverse {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print θ, ψ_j, g_j and p_j as JSON on stdout.
        #[arg(long)]
        report: bool,
    },
    /// Advance spectral data along the flow.
    Evolve {
        input: PathBuf,
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the symbol at time t.
        #[arg(long)]
        symbol: Option<PathBuf>,
    },
    /// Run the identity suite on spectral data or on a symbol.
    Verify {
        input: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sobolev norms along the flow on a log-spaced time grid, as CSV.
    Turbulence {
        input: PathBuf,
        #[arg(long)]
        t_min: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        t_points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Append the small doubled level of size ε.
    Perturb {
        input: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Failure(String),
}

impl From<SzegoError> for CliError {
    fn from(e: SzegoError) -> Self {
        match e {
            SzegoError::InvalidInput(_) | SzegoError::NotHardy(_) | SzegoError::Json(_) | SzegoError::Io(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Returns `Ok(false)` when verification ran but did not pass.
fn run(cmd: Command) -> CliResult<bool> {
    match cmd {
        Command::Direct { input, output } => {
            let u = read_symbol(&input)?;
            let sd = direct_spectral_data(&u)?;
            emit(output.as_deref(), &io::to_json(&sd)?)?;
        }
        Command::Inverse { input, output, report } => {
            let sd = read_data(&input)?;
            let sol = InverseSolution::new(&sd)?;
            emit(output.as_deref(), &io::rational_to_json(sol.u())?)?;
            if report {
                print!("{}", io::to_json(&InverseReport::new(&sol))?);
            }
        }
        Command::Evolve { input, t, output, symbol } => {
            if !t.is_finite() {
                return Err(CliError::Input("--t must be finite".into()));
            }
            let sd = read_data(&input)?;
            let st = flow::FlowState::new(sd)?.advance(t);
            emit(output.as_deref(), &io::to_json(&st.data())?)?;
            if let Some(path) = symbol {
                write_file(&path, &io::rational_to_json(&st.symbol()?)?)?;
            }
        }
        Command::Verify { input, tol, output } => {
            let tol = resolve_tol(tol)?;
            let rep = verify_file(&input, tol)?;
            let passed = rep.passed();
            let doc = VerifyDoc { passed, tolerance: tol, checks: &rep };
            emit(output.as_deref(), &io::to_json(&doc)?)?;
            for c in rep.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: {} (threshold {}, {})", c.name, fmt_f64(c.value), fmt_f64(c.threshold), c.kind);
            }
            return Ok(passed);
        }
        Command::Turbulence { input, t_min, t_max, t_points, output } => {
            let sd = read_data(&input)?;
            let grid = log_grid(t_min, t_max, t_points)?;
            let series = turbulence_scan(&sd, &grid)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::Failure(e.to_string());
            w.write_record(["t", "l2", "h1", "residual"]).map_err(fail)?;
            for k in 0..series.len() {
                let row = [series.times[k], series.l2_norms[k], series.h1_norms[k], series.residuals[k]];
                w.write_record(row.iter().map(|&v| fmt_f64(v))).map_err(fail)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
            emit(output.as_deref(), &String::from_utf8(bytes).expect("csv output is UTF-8"))?;
            let (lo, hi) = series.growth_band();
            eprintln!(
                "slope {} (top decade), dx spread {}, dx/t in [{}, {}], max l2 drift {}",
                fmt_f64(series.slope()),
                fmt_f64(series.dx_spread()),
                fmt_f64(lo),
                fmt_f64(hi),
                fmt_f64(series.max_residual())
            );
        }
        Command::Perturb { input, epsilon, output } => {
            let sd = read_data(&input)?;
            let out = flow::perturb(&sd, epsilon)?;
            emit(output.as_deref(), &io::to_json(&out)?)?;
        }
    }
    Ok(true)
}

fn resolve_tol(flag: Option<f64>) -> CliResult<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var("SZEGO_TOL") {
            Ok(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("SZEGO_TOL is not a number: {s:?}")))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CliError::Input("tolerance must be positive and finite".into()));
    }
    Ok(tol)
}

fn verify_file(path: &Path, tol: f64) -> CliResult<VerificationReport> {
    let text = read_text(path)?;
    let value: serde_json::Value = parse_json(path, &text)?;
    if value.get("levels").is_some() {
        let sd: SpectralData = parse_json(path, &text)?;
        verify_data(&sd, tol)
    } else {
        let u = symbol_from_text(path, &text)?;
        let sd = direct_spectral_data(&u)?;
        let mut rep = verify_data(&sd, tol)?;
        let back = InverseSolution::new(&sd)?;
        rep.push("symbol_round_trip", symbol_distance(back.u(), &u), tol);
        Ok(rep)
    }
}

fn verify_data(sd: &SpectralData, tol: f64) -> CliResult<VerificationReport> {
    let sol = InverseSolution::new(sd)?;
    let mut rep = sol.verify(tol)?;
    if !sd.is_empty() {
        let res = flow::flow_residual(sd, 0.0, FLOW_STEP)?;
        let scale = flow::szego_rhs(sol.u())?.l2_norm()?;
        rep.push("flow_residual_relative", res / scale, FLOW_TOL);
    }
    Ok(rep)
}

/// Relative sup distance on a real grid scaled to the pole cloud.
fn symbol_distance(f: &RationalFunction, g: &RationalFunction) -> f64 {
    let pts = szego::inverse::probe_points(&g.pole_roots());
    let num = pts.iter().map(|&x| (f.eval(x) - g.eval(x)).norm()).fold(0.0, f64::max);
    let den = pts.iter().map(|&x| g.eval(x).norm()).fold(0.0, f64::max);
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    passed: bool,
    tolerance: f64,
    #[serde(flatten)]
    checks: &'a VerificationReport,
}

#[derive(Serialize)]
struct InverseReport {
    theta: BlaschkeJson,
    psi: Vec<BlaschkeJson>,
    g: Vec<RationalJson>,
    p: Vec<RationalJson>,
}

impl InverseReport {
    fn new(sol: &InverseSolution) -> Self {
        Self {
            theta: sol.theta().into(),
            psi: sol.psi().iter().map(Into::into).collect(),
            g: sol.g().iter().map(Into::into).collect(),
            p: (0..sol.data().len()).map(|j| (&sol.p(j)).into()).collect(),
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!(
            "{}: malformed JSON at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn symbol_from_text(path: &Path, text: &str) -> CliResult<RationalFunction> {
    let raw: RationalJson = parse_json(path, text)?;
    Ok(RationalFunction::try_from(raw)?)
}

fn read_symbol(path: &Path) -> CliResult<RationalFunction> {
    symbol_from_text(path, &read_text(path)?)
}

fn read_data(path: &Path) -> CliResult<SpectralData> {
    let sd: SpectralData = parse_json(path, &read_text(path)?)?;
    sd.validate()?;
    Ok(sd)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
