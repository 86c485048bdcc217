//! `robe-stability`: command-line front end of the stability library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical failure.

mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use robe_stability::curves::{sweep_diagram, trace_curves, uniform_grid, CurveName, DiagramConfig};
use robe_stability::monodromy::{classify_stability, integrate_monodromy};
use robe_stability::spectral::morse_index_nullity;
use robe_stability::verify::{self, VerifyConfig};
use robe_stability::{Error, ParameterPoint, UnitCirclePoint};

use config::{ConfigFile, Format, RunConfig, SolverFlags};
use output::{IndexRecord, MonodromyRecord};

const THREADS_ENV: &str = "ROBE_STABILITY_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "robe-stability",
    version,
    about = "Linear stability of the elliptic equilibrium of Robe's restricted three-body problem"
)]
struct Cli {
    #[command(flatten)]
    solver: SolverFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveArg {
    GammaL,
    GammaM,
    GammaR,
}

impl From<CurveArg> for CurveName {
    fn from(c: CurveArg) -> Self {
        match c {
            CurveArg::GammaL => CurveName::GammaL,
            CurveArg::GammaM => CurveName::GammaM,
            CurveArg::GammaR => CurveName::GammaR,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ω-index and ω-nullity at one parameter point.
    #[command(allow_negative_numbers = true)]
    Index {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        e: f64,
        /// ω as an angle in radians; ω = -1 is π.
        #[arg(long)]
        omega_angle: f64,
    },
    /// Monodromy matrix, spectrum and stability class.
    #[command(allow_negative_numbers = true)]
    Monodromy {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        e: f64,
    },
    /// Traces Γ_l, Γ_m, Γ_r over a uniform eccentricity grid.
    Trace {
        #[arg(long)]
        e_max: Option<f64>,
        /// Number of grid intervals; the grid has steps + 1 points.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, value_delimiter = ',')]
        curves: Vec<CurveArg>,
    },
    /// Samples the stability diagram on a uniform (μ, e) grid.
    #[command(allow_negative_numbers = true)]
    Diagram {
        #[arg(long)]
        mu_steps: Option<usize>,
        #[arg(long)]
        e_steps: Option<usize>,
        #[arg(long)]
        e_max: Option<f64>,
        /// Extra ω angles at which index and nullity are reported.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        omega_angles: Vec<f64>,
    },
    /// Runs the self-verification suite.
    Verify {
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
        /// Run only these checks (1-12).
        #[arg(long, value_delimiter = ',')]
        check: Vec<usize>,
    },
}

/// Invalid input; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

enum Failure {
    Usage(String),
    Numerical(String),
    Verification(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let usage = match &e {
            Error::InvalidParameter { .. } => true,
            Error::AtEccentricity { source, .. } => {
                matches!(**source, Error::InvalidParameter { .. })
            }
            _ => false,
        };
        if usage {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn io_failure(path: Option<&Path>, e: impl std::fmt::Display) -> Failure {
    match path {
        Some(p) => Failure::Usage(format!("cannot write {}: {e}", p.display())),
        None => Failure::Usage(format!("cannot write output: {e}")),
    }
}

/// Writes through `render` to `path` or standard output. A file left
/// incomplete by a failed write is removed.
fn emit<F, E>(path: Option<&Path>, render: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> Result<(), E>,
    E: std::fmt::Display,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| io_failure(path, e))?;
            let mut w = BufWriter::new(file);
            let result = render(&mut w)
                .map_err(|e| io_failure(path, e))
                .and_then(|_| w.flush().map_err(|e| io_failure(path, e)));
            if result.is_err() {
                let _ = std::fs::remove_file(p);
            }
            result
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            render(&mut w).map_err(|e| io_failure(None, e))?;
            w.flush().map_err(|e| io_failure(None, e))
        }
    }
}

fn json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    emit(path, |w| -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::Usage(format!(
            "{THREADS_ENV} must be a non-negative integer, got '{raw}'"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let file = cli.solver.file()?;
    let cfg = cli.solver.resolve(&file)?;
    let out = cfg.out.clone();
    let out = out.as_deref();

    match cli.command {
        Command::Index { mu, e, omega_angle } => {
            let p = ParameterPoint::new(mu, e)?;
            let w = UnitCirclePoint::new(omega_angle);
            let r = morse_index_nullity(&p, w, &cfg.spectral)?;
            let record = IndexRecord {
                mu,
                e,
                omega_angle: w.angle(),
                index: r.pair.index,
                nullity: r.pair.nullity,
                n_used: r.truncation_used,
            };
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => json(out, &record),
                Format::Csv => emit(out, |w| -> csv::Result<()> {
                    let mut c = csv::Writer::from_writer(w);
                    c.serialize(&record)?;
                    c.flush()?;
                    Ok(())
                }),
            }
        }
        Command::Monodromy { mu, e } => {
            if cfg.format == Some(Format::Csv) {
                return Err(Failure::Usage("monodromy output is JSON only".into()));
            }
            let m = integrate_monodromy(&ParameterPoint::new(mu, e)?, &cfg.integrator)?;
            let class = classify_stability(&m, cfg.classify_tol);
            json(out, &MonodromyRecord::new(mu, e, &m, &class))
        }
        Command::Trace {
            e_max,
            steps,
            curves,
        } => cmd_trace(&cfg, &file, e_max, steps, curves),
        Command::Diagram {
            mu_steps,
            e_steps,
            e_max,
            omega_angles,
        } => cmd_diagram(&cfg, &file, mu_steps, e_steps, e_max, omega_angles),
        Command::Verify {
            json: as_json,
            check,
        } => cmd_verify(&cfg, as_json, &check),
    }
}

fn cmd_trace(
    cfg: &RunConfig,
    file: &ConfigFile,
    e_max: Option<f64>,
    steps: Option<usize>,
    curves: Vec<CurveArg>,
) -> Result<(), Failure> {
    let e_max = file.pick("e_max", e_max)?.unwrap_or(0.95);
    let steps = file.pick("steps", steps)?.unwrap_or(19);
    if steps == 0 {
        return Err(Failure::Usage(
            "steps must be positive (the grid would be empty)".into(),
        ));
    }
    let curves: Vec<CurveName> = if curves.is_empty() {
        CurveName::ALL.to_vec()
    } else {
        curves.into_iter().map(CurveName::from).collect()
    };
    let traced = trace_curves(&uniform_grid(e_max, steps), &cfg.curves())?;
    let out: Option<PathBuf> = cfg.out.clone();
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(out.as_deref(), |w| output::trace_csv(w, &traced, &curves)),
        Format::Json => emit(out.as_deref(), |w| output::trace_json(w, &traced, &curves)),
    }
}

fn cmd_diagram(
    cfg: &RunConfig,
    file: &ConfigFile,
    mu_steps: Option<usize>,
    e_steps: Option<usize>,
    e_max: Option<f64>,
    omega_angles: Vec<f64>,
) -> Result<(), Failure> {
    let diagram = DiagramConfig {
        spectral: cfg.spectral,
        integrator: cfg.integrator,
        classify_tol: cfg.classify_tol,
        e_max: file.pick("e_max", e_max)?.unwrap_or(0.95),
        omega_angles: omega_angles.clone(),
    };
    let mu_steps = file.pick("mu_steps", mu_steps)?.unwrap_or(21);
    let e_steps = file.pick("e_steps", e_steps)?.unwrap_or(20);
    let rows = sweep_diagram(mu_steps, e_steps, &diagram)?;
    let out = cfg.out.clone();
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(out.as_deref(), |w| {
            output::diagram_csv(w, &rows, &omega_angles)
        })?,
        Format::Json => emit(out.as_deref(), |w| output::diagram_json(w, &rows))?,
    }
    let failed = rows.iter().filter(|r| !r.errors.is_empty()).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} rows have errors", rows.len());
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, as_json: bool, check: &[usize]) -> Result<(), Failure> {
    if let Some(bad) = check.iter().find(|&&id| verify::check_info(id).is_none()) {
        return Err(Failure::Usage(format!(
            "unknown check {bad} (1-{})",
            verify::CHECK_COUNT
        )));
    }
    let vcfg = VerifyConfig {
        curves: cfg.curves(),
        ..VerifyConfig::default()
    };
    let report = verify::run_all(check, &vcfg);
    let out = cfg.out.clone();
    if as_json {
        #[derive(serde::Serialize)]
        struct Report<'a> {
            passed: bool,
            #[serde(flatten)]
            report: &'a verify::VerifyReport,
        }
        json(
            out.as_deref(),
            &Report {
                passed: report.passed(),
                report: &report,
            },
        )?;
    } else {
        emit(out.as_deref(), |w| -> io::Result<()> {
            for c in &report.checks {
                writeln!(w, "{}", c.line())?;
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            writeln!(
                w,
                "{passed}/{} checks passed in {:.1} s",
                report.checks.len(),
                report.elapsed_secs
            )
        })?;
    }
    if report.passed() {
        Ok(())
    } else {
        let ids: Vec<String> = report.failed_ids().iter().map(|i| i.to_string()).collect();
        Err(Failure::Verification(format!(
            "failed checks: {}",
            ids.join(", ")
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
