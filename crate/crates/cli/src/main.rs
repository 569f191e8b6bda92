//! `eot`: generate, solve, classify and verify entropic transport instances.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use eot_core::generate::{generate, GenKind, GenSpec};
use eot_core::problem::{parse_problem, serialize_problem, validate, Problem};
use eot_core::report::{emit_report, to_json_bytes, Report, ReportFormat};
use eot_core::sinkhorn::{potentials_document, run, write_trace_csv, RunConfig};
use eot_core::structure::classification_report;
use eot_core::theory::{
    long_run_min_psi, rate_function_estimate, rate_function_upper, verify, Analysis, Witness,
};

#[derive(Parser)]
#[command(name = "eot", version, about = "Sinkhorn diagnostics for entropic optimal transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Positive,
    Exact,
    Asymptotic,
    Soules,
}

impl From<Kind> for GenKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Positive => GenKind::Positive,
            Kind::Exact => GenKind::Exact,
            Kind::Asymptotic => GenKind::Asymptotic,
            Kind::Soules => GenKind::Soules,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify scalability and print the block decomposition.
    Classify {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the iteration and write its trace.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        /// Stop once the total marginal error drops to this value.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
        /// CSV trace destination.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// JSON destination for stored potentials.
        #[arg(long)]
        potentials: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        record_every: usize,
        /// Summary destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve, audit the trace identities and check every applicable bound.
    /// Exits with status 1 when anything is violated.
    Verify {
        /// A problem file, or a directory of them.
        path: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Estimate the rate function and its upper bound.
    Rate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block-sum infimum of the dual objective, with a long-run cross-check.
    Infpsi {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated problem document.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        cost_scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<eot_core::Error> for Failure {
    fn from(e: eot_core::Error) -> Self {
        fail(e.to_string())
    }
}

fn load(path: &Path) -> CliResult<Problem> {
    let bytes = fs::read(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let p = parse_problem(&bytes).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let report = validate(&p);
    if !report.is_valid() {
        return Err(fail(format!("{}: invalid problem\n{report}", path.display())));
    }
    Ok(p)
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| fail(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| fail(format!("stdout: {e}"))),
    }
}

fn json_out(out: Option<&Path>, v: &Value) -> CliResult<()> {
    write_out(out, &to_json_bytes(v)?)
}

fn cmd_solve(
    file: &Path,
    cfg: RunConfig,
    trace_path: Option<&Path>,
    potentials: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<()> {
    let p = load(file)?;
    let t = run(&p, &cfg);
    if let Some(path) = trace_path {
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).map_err(|e| fail(e.to_string()))?;
        write_out(Some(path), &buf)?;
    }
    if let Some(path) = potentials {
        json_out(Some(path), &potentials_document(&t))?;
    }
    let last = t.records.last();
    json_out(
        out,
        &json!({
            "iterations": t.len(),
            "e_total": last.map(|r| r.e_total),
            "psi": last.map(|r| r.psi),
            "f": t.final_potentials.f,
            "g": t.final_potentials.g,
        }),
    )
}

fn problem_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| fail(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_verify(path: &Path, max_iters: usize, out: Option<&Path>, format: Format) -> CliResult<bool> {
    if !path.is_dir() {
        let p = load(path)?;
        let report = verify(&p, max_iters)?;
        write_out(out, &emit_report(&report, format.into())?)?;
        return Ok(report.passed());
    }
    let files = problem_files(path)?;
    let results: Vec<(String, CliResult<Value>)> = files
        .par_iter()
        .map(|f| {
            let name = f.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let r = load(f).and_then(|p| Ok(verify(&p, max_iters)?.to_json()));
            (name, r)
        })
        .collect();
    let mut instances = serde_json::Map::new();
    let mut passed = true;
    for (name, r) in results {
        let doc = match r {
            Ok(doc) => doc,
            Err(e) => json!({"error": e.message, "passed": false}),
        };
        passed &= doc["passed"] == true;
        instances.insert(name, doc);
    }
    json_out(out, &json!({"instances": instances, "passed": passed}))?;
    Ok(passed)
}

fn cmd_rate(file: &Path, alphas: &[f64], out: Option<&Path>) -> CliResult<()> {
    let p = load(file)?;
    let a = Analysis::new(&p)?;
    let ell = a.decomposition.ell;
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let est = rate_function_estimate(&p, &a, alpha)?;
        let upper = if ell == 0 {
            None
        } else {
            rate_function_upper(&a.constants, ell, a.delta, p.tau(), alpha)?
        };
        let witness = match est.witness {
            Witness::Zero => json!({"kind": "zero"}),
            Witness::Epsilon(eps) => json!({"kind": "approx_minimizer", "eps": eps}),
        };
        rows.push(json!({
            "alpha": alpha,
            "q_hat": est.q_hat,
            "gap": est.gap,
            "var": est.var_norm,
            "witness": witness,
            "upper": upper,
            "within_upper": upper.map(|u| est.q_hat <= u),
        }));
    }
    json_out(out, &json!({"ell": ell, "inf_psi": a.inf_psi, "rates": rows}))
}

fn cmd_infpsi(file: &Path, iters: usize, out: Option<&Path>) -> CliResult<()> {
    let p = load(file)?;
    let a = Analysis::new(&p)?;
    let blocks: Vec<Value> = a
        .blocks
        .blocks
        .iter()
        .zip(&a.decomposition.masses)
        .map(|(b, mass)| {
            json!({
                "rows": b.rows,
                "cols": b.cols,
                "mass": mass.to_string(),
                "min_psi": b.min_psi,
                "residual": b.residual,
                "iterations": b.iterations,
            })
        })
        .collect();
    let long_run = long_run_min_psi(&p, iters);
    json_out(
        out,
        &json!({
            "inf_psi": a.inf_psi,
            "blocks": blocks,
            "long_run": {
                "iterations": iters,
                "min_psi": long_run,
                "difference": long_run - a.inf_psi,
            },
        }),
    )
}

fn execute(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Classify { file, out } => {
            let p = load(&file)?;
            json_out(out.as_deref(), &classification_report(&p)?)?;
        }
        Command::Solve {
            file,
            max_iters,
            tol,
            trace,
            potentials,
            record_every,
            out,
        } => {
            let cfg = RunConfig {
                max_iters,
                stop_tol: tol,
                g0: None,
                record_every,
            };
            cmd_solve(&file, cfg, trace.as_deref(), potentials.as_deref(), out.as_deref())?;
        }
        Command::Verify {
            path,
            max_iters,
            out,
            format,
        } => return cmd_verify(&path, max_iters, out.as_deref(), format),
        Command::Rate { file, alphas, out } => cmd_rate(&file, &alphas, out.as_deref())?,
        Command::Infpsi { file, iters, out } => cmd_infpsi(&file, iters, out.as_deref())?,
        Command::Gen {
            kind,
            m,
            n,
            depth,
            seed,
            tau,
            cost_scale,
            out,
        } => {
            let spec = GenSpec {
                kind: kind.into(),
                m,
                n,
                depth,
                seed,
                tau,
                cost_scale,
            };
            let g = generate(&spec)?;
            if g.attempts > 1 {
                eprintln!("gen: accepted after {} attempts", g.attempts);
            }
            write_out(out.as_deref(), &serialize_problem(&g.problem))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
