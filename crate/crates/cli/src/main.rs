//! `shadow-transport` command-line interface.
//!
//! Every subcommand writes one JSON document (or CSV for `plot-data
//! --format csv`) to stdout or `--out`. Errors go to stderr as
//! `{"error": code, "detail": ...}`; the exit code is 0 on success, 1 for
//! domain errors and failed checks, 2 for usage and I/O errors.

mod output;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use shadow_transport::coupling::{irreducible_decompose, rs_curve};
use shadow_transport::experiments::stability_experiment;
use shadow_transport::tol::{self, Tolerances, TOL_ENV_VAR};
use shadow_transport::verify::{optimality_trials, spence_mirrlees_cost};
use shadow_transport::{
    json as sj, lifted_shadow_coupling, make_lift, project, shadow, CCurve, DiscreteMeasure,
    LiftKind,
};

#[derive(Parser)]
#[command(
    name = "shadow-transport",
    version,
    about = "Shadow measures and supermartingale couplings of discrete measures"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Pair {
    /// Source measure, `{"atoms": [{"x": .., "w": ..}, ...]}`.
    #[arg(long, value_name = "FILE")]
    mu: PathBuf,
    /// Target measure.
    #[arg(long, value_name = "FILE")]
    nu: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lift {
    Decreasing,
    Increasing,
    Uniform,
}

impl From<Lift> for LiftKind {
    fn from(l: Lift) -> LiftKind {
        match l {
            Lift::Decreasing => LiftKind::DecreasingQuantile,
            Lift::Increasing => LiftKind::IncreasingQuantile,
            Lift::Uniform => LiftKind::Uniform,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Coupling,
    Lifted,
    Ccurve,
    RsCurve,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotTarget {
    Potentials,
    EHull,
    RsCurve,
    CCurve,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Shadow of the source in the target, with the defect constant.
    Shadow(Pair),
    /// Lifted shadow coupling for one of the built-in lifts.
    Couple {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "decreasing")]
        lift: Lift,
        #[arg(long, value_enum, default_value = "coupling")]
        emit: Emit,
    },
    /// Supporting functions R and S of the decreasing coupling.
    RsCurve(Pair),
    /// Mean-defect curve and martingale set.
    CCurve {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "decreasing")]
        lift: Lift,
    },
    /// Split at the zeros of P_nu - P_mu.
    Decompose(Pair),
    /// Randomised optimality check of the decreasing coupling against an LP.
    Verify {
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=40))]
        max_atoms: u64,
        /// Cost x·exp(-beta·y).
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Randomised check of the Wasserstein stability bounds of the shadow.
    Stability {
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plottable series.
    PlotData {
        #[arg(value_enum)]
        target: PlotTarget,
        #[arg(long, value_name = "FILE")]
        mu: PathBuf,
        /// Required for everything except `potentials`.
        #[arg(long, value_name = "FILE")]
        nu: Option<PathBuf>,
        /// Lift time for `e-hull`.
        #[arg(long, default_value_t = 0.5)]
        u: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Domain(shadow_transport::Error),
}

impl From<shadow_transport::Error> for Failure {
    fn from(e: shadow_transport::Error) -> Failure {
        match e {
            shadow_transport::Error::Parse(_) => Failure::Usage(e.to_string()),
            e => Failure::Domain(e),
        }
    }
}

enum Rendered {
    Json(Value),
    Text(String),
}

fn read_measure(path: &Path) -> Result<DiscreteMeasure, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    sj::parse_measure(&text).map_err(|e| match e {
        shadow_transport::Error::Parse(d) => Failure::Usage(format!("{}: {d}", path.display())),
        e => Failure::Domain(e),
    })
}

fn read_pair(p: &Pair) -> Result<(DiscreteMeasure, DiscreteMeasure), Failure> {
    Ok((read_measure(&p.mu)?, read_measure(&p.nu)?))
}

fn run(command: &Command) -> Result<(Rendered, Option<String>), Failure> {
    let done = |v: Value| Ok((Rendered::Json(v), None));
    match command {
        Command::Shadow(p) => {
            let (mu, nu) = read_pair(p)?;
            let r = shadow(&mu, &nu)?;
            done(json!({ "shadow": sj::measure(&r.shadow), "defect": sj::number(r.defect) }))
        }
        Command::Couple { pair, lift, emit } => {
            let (mu, nu) = read_pair(pair)?;
            if *emit == Emit::RsCurve {
                if !matches!(lift, Lift::Decreasing) {
                    return Err(Failure::Usage(
                        "--emit rs-curve needs --lift decreasing".into(),
                    ));
                }
                return done(output::rs_rows(&rs_curve(&mu, &nu)?));
            }
            let spec = make_lift((*lift).into(), &mu)?;
            let lc = lifted_shadow_coupling(&spec, &mu, &nu)?;
            done(match emit {
                Emit::Coupling => sj::coupling(&project(&lc)),
                Emit::Lifted => output::lifted(&lc),
                Emit::Ccurve => output::c_curve(&CCurve::from_lifted(&lc)),
                Emit::RsCurve => unreachable!(),
            })
        }
        Command::RsCurve(p) => {
            let (mu, nu) = read_pair(p)?;
            done(output::rs_rows(&rs_curve(&mu, &nu)?))
        }
        Command::CCurve { pair, lift } => {
            let (mu, nu) = read_pair(pair)?;
            let spec = make_lift((*lift).into(), &mu)?;
            let lc = lifted_shadow_coupling(&spec, &mu, &nu)?;
            done(output::c_curve(&CCurve::from_lifted(&lc)))
        }
        Command::Decompose(p) => {
            let (mu, nu) = read_pair(p)?;
            done(output::decomposition(&irreducible_decompose(&mu, &nu)?))
        }
        Command::Verify {
            trials,
            seed,
            max_atoms,
            beta,
        } => {
            let r = optimality_trials(
                *trials as usize,
                *seed,
                *max_atoms as usize,
                &spence_mirrlees_cost(*beta),
            );
            let failed = (!r.passed())
                .then(|| format!("{} of {} trials failed", r.failures.len(), r.trials));
            Ok((Rendered::Json(output::optimality(&r)), failed))
        }
        Command::Stability { trials, seed } => {
            let r = stability_experiment(*trials as usize, *seed)?;
            let failed = (!r.violations.is_empty())
                .then(|| format!("{} bound violations", r.violations.len()));
            Ok((Rendered::Json(output::stability(&r)), failed))
        }
        Command::PlotData {
            target,
            mu,
            nu,
            u,
            format,
        } => {
            let mu = read_measure(mu)?;
            let nu = match nu {
                Some(p) => Some(read_measure(p)?),
                None => None,
            };
            let need_nu = || {
                nu.clone()
                    .ok_or_else(|| Failure::Usage("--nu is required for this plot".into()))
            };
            let table = match target {
                PlotTarget::Potentials => plot::potentials(&mu, nu.as_ref()),
                PlotTarget::EHull => plot::e_hull(&mu, &need_nu()?, *u)?,
                PlotTarget::RsCurve => plot::rs_curve(&mu, &need_nu()?)?,
                PlotTarget::CCurve => plot::c_curve(&mu, &need_nu()?)?,
            };
            Ok(match format {
                Format::Json => (Rendered::Json(table.to_json()), None),
                Format::Csv => (Rendered::Text(table.to_csv()), None),
            })
        }
    }
}

fn report_error(code: &str, detail: &str) {
    eprintln!("{}", json!({ "error": code, "detail": detail }));
}

fn write_output(out: Option<&Path>, r: &Rendered) -> Result<(), String> {
    let text = match r {
        Rendered::Json(v) => format!("{v}\n"),
        Rendered::Text(s) => s.clone(),
    };
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("Usage", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    match Tolerances::from_env() {
        Ok(t) => {
            tol::install(t);
        }
        Err(e) => {
            report_error("Usage", &format!("{TOL_ENV_VAR}: {e}"));
            return ExitCode::from(2);
        }
    }
    match run(&cli.command) {
        Ok((rendered, failed)) => {
            if let Err(e) = write_output(cli.out.as_deref(), &rendered) {
                report_error("Io", &e);
                return ExitCode::from(2);
            }
            match failed {
                Some(detail) => {
                    report_error("CheckFailed", &detail);
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Usage(d)) => {
            report_error("Usage", &d);
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            report_error(e.code(), &e.to_string());
            ExitCode::from(1)
        }
    }
}
