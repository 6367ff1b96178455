//! Command-line front end: `check`, `eval`, `oracle`, and `corpus`
//! subcommands over JSON spec files.
//!
//! Exit codes: 0 = CertifiedTrue, 1 = CertifiedFalse,
//! 2 = Inconclusive / NumericallySupported, 3 = input error.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::classical::{q_kernel, GridConfig};
use crate::error::{CertError, Result};
use crate::oracle::{lcm_oracle_with, DiffTestConfig};
use crate::qlattice::build_lattices;
use crate::ratio::{parse_spec, RatioSpec};
use crate::report::{run_check, CheckOptions};
use crate::specfun::{
    digamma, digamma_q, gamma_q, phi, polygamma, polygamma_q, EvalConfig, QParam,
};
use crate::verdict::{Status, Verdict};

#[derive(Parser, Debug)]
#[command(name = "gammacert", version, about = "Certification of monotonicity \
properties for ratios of gamma and q-gamma functions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full certification pipeline on a spec file.
    Check(CheckArgs),
    /// Evaluate one of the underlying special functions.
    Eval(EvalArgs),
    /// Run the numerical oracle standalone on a spec file.
    Oracle(OracleArgs),
    /// Run the built-in golden example corpus.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// JSON spec file.
    spec_file: PathBuf,
    /// Lattice scan depth (q-case); defaults to 64 periods.
    #[arg(long)]
    kmax: Option<u64>,
    /// Boundary-ratio scan depth (unused by check; accepted for parity).
    #[arg(long)]
    nmax: Option<u64>,
    /// Upper end of the classical kernel grid.
    #[arg(long)]
    umax: Option<f64>,
    /// Number of kernel grid points.
    #[arg(long, default_value_t = 2000)]
    grid_points: usize,
    /// Relative tolerance for series evaluation.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Maximum finite-difference order for the oracle.
    #[arg(long, default_value_t = 8)]
    max_order: u32,
    /// Also run the numerical oracle as cross-validation.
    #[arg(long)]
    oracle: bool,
    /// Output format.
    #[arg(long, default_value = "text")]
    report: ReportFormat,
    /// Omit timings (makes output deterministic).
    #[arg(long)]
    no_timing: bool,
    /// Write a CSV of Q(u) (classical) or lattice masses (q-case) here.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// One of: gamma_q, digamma_q, polygamma_q, digamma, polygamma, phi, Q.
    function: String,
    /// Positional numeric arguments of the chosen function.
    args: Vec<f64>,
    /// Base q for the q-functions.
    #[arg(long)]
    q: Option<f64>,
    /// Spec file (for Q).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Evaluation point for Q.
    #[arg(long)]
    u: Option<f64>,
    /// Relative tolerance for series evaluation.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    spec_file: PathBuf,
    #[arg(long, default_value_t = 8)]
    max_order: u32,
    #[arg(long, default_value = "text")]
    report: ReportFormat,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Cross-validate each corpus entry with the oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value = "text")]
    report: ReportFormat,
}

fn exit_code(status: Status) -> i32 {
    match status {
        Status::CertifiedTrue => 0,
        Status::CertifiedFalse => 1,
        Status::NumericallySupported | Status::Inconclusive => 2,
    }
}

fn load_spec(path: &PathBuf) -> Result<RatioSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| CertError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

fn eval_config(rel_tol: Option<f64>) -> EvalConfig {
    let mut cfg = EvalConfig::default();
    if let Some(t) = rel_tol {
        cfg.rel_tol = t;
    }
    cfg
}

fn need(args: &[f64], n: usize, what: &str) -> Result<()> {
    if args.len() != n {
        return Err(CertError::Input(format!(
            "{what} takes {n} positional argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

fn run_eval(a: &EvalArgs) -> Result<f64> {
    let cfg = eval_config(a.rel_tol);
    let q = || -> Result<QParam> {
        QParam::new(a.q.ok_or_else(|| CertError::Input("--q is required".into()))?)
    };
    match a.function.as_str() {
        "gamma_q" => {
            need(&a.args, 1, "gamma_q")?;
            gamma_q(a.args[0], q()?, &cfg)
        }
        "digamma_q" => {
            need(&a.args, 1, "digamma_q")?;
            digamma_q(a.args[0], q()?, &cfg)
        }
        "polygamma_q" => {
            need(&a.args, 2, "polygamma_q")?;
            polygamma_q(a.args[0] as u32, a.args[1], q()?, &cfg)
        }
        "digamma" => {
            need(&a.args, 1, "digamma")?;
            digamma(a.args[0])
        }
        "polygamma" => {
            need(&a.args, 2, "polygamma")?;
            polygamma(a.args[0] as u32, a.args[1])
        }
        "phi" => {
            need(&a.args, 3, "phi")?;
            phi(a.args[0], a.args[1], a.args[2])
        }
        "Q" => {
            let spec = load_spec(
                a.spec
                    .as_ref()
                    .ok_or_else(|| CertError::Input("Q needs --spec".into()))?,
            )?;
            let u = a
                .u
                .ok_or_else(|| CertError::Input("Q needs --u".into()))?;
            q_kernel(&spec, u)
        }
        other => Err(CertError::Input(format!("unknown function '{other}'"))),
    }
}

fn dump_csv(spec: &RatioSpec, grid: &GridConfig, k_max: u64, path: &PathBuf) -> Result<()> {
    let mut csv = String::new();
    if spec.is_classical() {
        csv.push_str("u,Q\n");
        let u_max = grid.resolve_u_max(spec);
        let ratio = (u_max / grid.u_min).ln();
        for i in 0..grid.points {
            let u = grid.u_min * (ratio * i as f64 / (grid.points - 1) as f64).exp();
            csv.push_str(&format!("{u},{}\n", q_kernel(spec, u)?));
        }
    } else {
        csv.push_str("class,k,mass\n");
        let q = spec.q().expect("q-mode").get();
        for lat in build_lattices(spec)? {
            let label = if lat.label.is_empty() { "rational" } else { &lat.label };
            for k in 1..=k_max.min(4096) {
                csv.push_str(&format!("{label},{k},{}\n", lat.mass_at(q, k)));
            }
        }
    }
    fs::write(path, csv)
        .map_err(|e| CertError::Input(format!("cannot write {}: {e}", path.display())))
}

fn print_verdict(v: &Verdict, fmt: ReportFormat) {
    match fmt {
        ReportFormat::Json => {
            println!("{}", serde_json::to_string_pretty(v).expect("serializes"))
        }
        ReportFormat::Text => {
            println!("{:?}: {}", v.status, v.detail);
            if let Some(c) = &v.condition {
                println!("condition: {c}");
            }
            if let Some(w) = &v.witness {
                println!("witness: {w:?}");
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(a) => {
            let spec = load_spec(&a.spec_file)?;
            let opts = CheckOptions {
                k_max: a.kmax,
                grid: GridConfig {
                    u_max: a.umax,
                    points: a.grid_points,
                    ..GridConfig::default()
                },
                with_oracle: a.oracle,
                oracle_max_order: a.max_order,
                with_timing: !a.no_timing,
            };
            let report = run_check(&spec, &opts)?;
            if let Some(path) = &a.dump {
                let k_max = match a.kmax {
                    Some(k) => k,
                    None if spec.is_classical() => 0,
                    None => crate::qlattice::default_k_max(&spec)?,
                };
                dump_csv(&spec, &opts.grid, k_max, path)?;
            }
            match a.report {
                ReportFormat::Json => println!("{}", report.to_json()),
                ReportFormat::Text => print!("{}", report.to_text()),
            }
            Ok(exit_code(report.overall.status))
        }
        Command::Eval(a) => {
            let v = run_eval(&a)?;
            println!("{v:.12}");
            Ok(0)
        }
        Command::Oracle(a) => {
            let spec = load_spec(&a.spec_file)?;
            let cfg = DiffTestConfig {
                max_order: a.max_order,
                ..DiffTestConfig::default()
            };
            let v = lcm_oracle_with(&spec, &cfg)?;
            print_verdict(&v, a.report);
            Ok(exit_code(v.status))
        }
        Command::Corpus(a) => {
            let entries = crate::corpus::run_corpus(a.oracle)?;
            let mut worst = 0;
            match a.report {
                ReportFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&entries).expect("serializes")
                ),
                ReportFormat::Text => {
                    for e in &entries {
                        println!("{}: {:?} — {}", e.name, e.certificate.status, e.certificate.detail);
                        if let Some(o) = &e.oracle {
                            println!("  oracle: {:?} — {}", o.status, o.detail);
                        }
                    }
                }
            }
            for e in &entries {
                if let Some(o) = &e.oracle {
                    if e.certificate.is_true() && o.is_false() {
                        worst = 1;
                    }
                }
            }
            Ok(worst)
        }
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}
