//! `vpair` subcommands. Each command returns an exit code:
//! 0 success, 1 bad flags or unreadable input, 2 no convergence, 3 validation failure.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use vpair_core::boundary::scale_to_physical;
use vpair_core::io::{BranchEntry, BranchIndex, Provenance, SCHEMA_VERSION};
use vpair_core::linearization::analytic_multipliers;
use vpair_core::solver::{continue_branch, newton_solve_with, ContinuationOptions, NewtonOptions};
use vpair_core::validation::validate;
use vpair_core::{BoundaryCoefficients, Error, Model, PairKind, PairSolution, ProblemSpec, SolutionFile, Thresholds};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "vpair", version, about = "Steady vortex-patch pairs for Euler and gSQG")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at one epsilon and write a solution file
    Solve(SolveArgs),
    /// Continue from epsilon = 0 and write one file per step plus index.json
    Continue(ContinueArgs),
    /// Print the linearized multipliers as CSV
    Spectrum(SpectrumArgs),
    /// Re-run validation on a stored solution
    Validate(ValidateArgs),
    /// Export boundary curves as CSV or SVG
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Euler,
    Gsqg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    Corotating,
    Counter,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// gSQG exponent in (0, 1); ignored for Euler
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "corotating")]
    pub pair: PairArg,
    /// half-distance between the patch centers
    #[arg(long)]
    pub d: f64,
    #[arg(long, default_value_t = ProblemSpec::DEFAULT_MODES)]
    pub modes: usize,
    /// collocation points; defaults to max(256, 4N+4)
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

impl ProblemArgs {
    pub fn spec(&self, epsilon: f64) -> anyhow::Result<ProblemSpec> {
        let (model, alpha) = match self.model {
            ModelArg::Euler => (Model::Euler, 0.0),
            ModelArg::Gsqg => match self.alpha {
                Some(a) => (Model::Gsqg, a),
                None => bail!("--alpha is required for --model gsqg"),
            },
        };
        let pair = match self.pair {
            PairArg::Corotating => PairKind::Corotating,
            PairArg::Counter => PairKind::Counter,
        };
        let grid = self.grid.unwrap_or_else(|| (4 * self.modes + 4).max(ProblemSpec::DEFAULT_GRID));
        let spec = ProblemSpec::new(model, alpha, pair, self.d, epsilon).with_resolution(self.modes, grid);
        spec.validate()?;
        if !(1e-14..=1e-6).contains(&self.tol) {
            bail!("--tol {} outside [1e-14, 1e-6]", self.tol);
        }
        Ok(spec)
    }

    fn newton(&self) -> NewtonOptions {
        NewtonOptions { tol: self.tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ContinueArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long = "eps-max", allow_hyphen_values = true)]
    pub eps_max: f64,
    #[arg(long)]
    pub steps: usize,
    /// output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "corotating")]
    pub pair: PairArg,
    #[arg(long)]
    pub nmax: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    pub path: PathBuf,
    #[arg(long, value_enum)]
    pub format: ExportFormat,
    /// boundary points per patch
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    /// write here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn provenance() -> Provenance {
    Provenance {
        tool: "vpair".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        note: Provenance::DETERMINISM_NOTE.into(),
    }
}

/// Solver failures that mean "did not converge" rather than "bad input".
fn is_convergence_failure(e: &Error) -> bool {
    !matches!(e, Error::InvalidParameter(_) | Error::LengthMismatch { .. } | Error::Io(_) | Error::Format(_))
}

/// Result of a solve: exit code and, when a solution was produced, the written file.
#[derive(Debug)]
pub struct SolveOutcome {
    pub code: i32,
    pub file: Option<SolutionFile>,
    pub message: Option<String>,
}

pub fn cmd_solve(args: &SolveArgs) -> SolveOutcome {
    let fail = |code, msg: String| SolveOutcome { code, file: None, message: Some(msg) };
    let spec = match args.problem.spec(args.eps) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_BAD_INPUT, format!("{e:#}")),
    };
    let sol = match newton_solve_with(&spec, &BoundaryCoefficients::zeros(spec.modes), &args.problem.newton()) {
        Ok(s) => s,
        Err(e) if is_convergence_failure(&e) => return fail(EXIT_NO_CONVERGENCE, e.to_string()),
        Err(e) => return fail(EXIT_BAD_INPUT, e.to_string()),
    };
    let report = match validate(&sol, &Thresholds::default()) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_VALIDATION, e.to_string()),
    };
    let pass = report.pass;
    let notes = report.notes.join("; ");
    let file = SolutionFile::new(&sol, Some(report), provenance());
    if let Err(e) = file.save(&args.out) {
        return fail(EXIT_BAD_INPUT, e.to_string());
    }
    if pass {
        SolveOutcome { code: EXIT_OK, file: Some(file), message: None }
    } else {
        SolveOutcome { code: EXIT_VALIDATION, file: Some(file), message: Some(format!("validation failed: {notes}")) }
    }
}

fn step_name(k: usize) -> String {
    format!("step_{k:03}.json")
}

pub fn cmd_continue(args: &ContinueArgs) -> anyhow::Result<i32> {
    let spec = args.problem.spec(0.0)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let opts = ContinuationOptions { newton: args.problem.newton(), ..Default::default() };
    let branch = match continue_branch(&spec, args.eps_max, args.steps, &opts) {
        Ok(b) => b,
        Err(e) if is_convergence_failure(&e) => {
            eprintln!("vpair: {e}");
            return Ok(EXIT_NO_CONVERGENCE);
        }
        Err(e) => bail!(e),
    };
    let mut entries = Vec::new();
    for (k, sol) in branch.members.iter().enumerate() {
        let report = branch.reports.get(k).cloned();
        let file = SolutionFile::new(sol, report, provenance());
        let name = step_name(k);
        file.save(&args.out.join(&name))?;
        entries.push(BranchEntry {
            file: name,
            epsilon: sol.spec.epsilon,
            velocity: sol.velocity.value,
            residual_inf: sol.residual_inf,
        });
    }
    let index = BranchIndex { schema_version: SCHEMA_VERSION, entries, failure: branch.failure.clone() };
    std::fs::write(args.out.join("index.json"), index.to_json()? + "\n")?;
    match branch.failure {
        Some(msg) => {
            eprintln!("vpair: partial branch: {msg}");
            Ok(EXIT_NO_CONVERGENCE)
        }
        None => Ok(EXIT_OK),
    }
}

pub fn spectrum_csv(args: &SpectrumArgs) -> anyhow::Result<String> {
    let problem = ProblemArgs {
        model: args.model,
        alpha: args.alpha,
        pair: args.pair,
        d: 3.0,
        modes: 1,
        grid: None,
        tol: 1e-10,
    };
    let spec = problem.spec(0.0)?;
    if args.nmax == 0 {
        bail!("--nmax must be positive");
    }
    let table = analytic_multipliers(&spec, args.nmax)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "multiplier"])?;
    for (i, v) in table.values.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format!("{v:?}")])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn cmd_validate(path: &Path) -> anyhow::Result<(i32, vpair_core::ValidationReport)> {
    let file = SolutionFile::load(path)?;
    let report = validate(&file.solution(), &Thresholds::default())?;
    Ok((if report.pass { EXIT_OK } else { EXIT_VALIDATION }, report))
}

fn physical_curves(sol: &PairSolution, points: usize) -> anyhow::Result<[Vec<(f64, f64, f64)>; 2]> {
    let n = points + points % 2;
    let (p1, p2) = scale_to_physical(&sol.coefficients, &sol.spec.rule(), n.max(4), sol.spec.d)?;
    let tag = |v: Vec<vpair_core::Complex64>| {
        v.into_iter()
            .enumerate()
            .map(|(j, z)| (2.0 * std::f64::consts::PI * j as f64 / n.max(4) as f64, z.re, z.im))
            .collect::<Vec<_>>()
    };
    Ok([tag(p1), tag(p2)])
}

pub fn export_csv(sol: &PairSolution, points: usize) -> anyhow::Result<String> {
    let curves = physical_curves(sol, points)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["curve_id", "theta", "x", "y"])?;
    for (id, c) in curves.iter().enumerate() {
        for (t, x, y) in c {
            w.write_record([(id + 1).to_string(), format!("{t:?}"), format!("{x:?}"), format!("{y:?}")])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn export_svg(sol: &PairSolution, points: usize) -> anyhow::Result<String> {
    let curves = physical_curves(sol, points)?;
    let d = sol.spec.d;
    let r = curves[0]
        .iter()
        .map(|(_, x, y)| x.hypot(*y))
        .chain(curves[1].iter().map(|(_, x, y)| (x - 2.0 * d).hypot(*y)))
        .fold(0.0, f64::max);
    let pad = r.max(0.05 * d) * 1.5;
    let (x0, x1) = (-pad, 2.0 * d + pad);
    let (w, h) = (x1 - x0, 2.0 * pad);
    let sw = w / 400.0;
    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="{:.0}" viewBox="{x0} {} {w} {h}">"#, 800.0 * h / w, -pad)?;
    // y axis points up
    writeln!(s, r#"<g transform="scale(1,-1)">"#)?;
    writeln!(s, r#"<line x1="{x0}" y1="0" x2="{x1}" y2="0" stroke="gray" stroke-width="{sw}" stroke-dasharray="{} {}"/>"#, 4.0 * sw, 4.0 * sw)?;
    for (c, color) in curves.iter().zip(["steelblue", "firebrick"]) {
        let mut path = String::new();
        for (k, (_, x, y)) in c.iter().enumerate() {
            write!(path, "{}{x:.9} {y:.9} ", if k == 0 { "M" } else { "L" })?;
        }
        path.push('Z');
        writeln!(s, r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="{sw}"/>"#)?;
    }
    writeln!(s, "</g>\n</svg>")?;
    Ok(s)
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

/// Parse arguments (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result: anyhow::Result<i32> = match &cli.command {
        Command::Solve(a) => {
            let o = cmd_solve(a);
            if let Some(m) = o.message {
                eprintln!("vpair: {m}");
            }
            Ok(o.code)
        }
        Command::Continue(a) => cmd_continue(a),
        Command::Spectrum(a) => spectrum_csv(a).and_then(|t| emit(&None, &t)).map(|_| EXIT_OK),
        Command::Validate(a) => cmd_validate(&a.path).and_then(|(code, rep)| {
            println!("{}", vpair_core::io::report_json(&rep)?);
            Ok(code)
        }),
        Command::Export(a) => SolutionFile::load(&a.path).map_err(anyhow::Error::from).and_then(|f| {
            let sol = f.solution();
            let text = match a.format {
                ExportFormat::Csv => export_csv(&sol, a.points)?,
                ExportFormat::Svg => export_svg(&sol, a.points)?,
            };
            emit(&a.out, &text).map(|_| EXIT_OK)
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("vpair: {e:#}");
        EXIT_BAD_INPUT
    })
}
