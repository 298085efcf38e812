//! Command line: `reproduce`, `check`, `search`, `delta`.
//!
//! Exit codes: 0 success, 1 anomaly (a theorem-backed relation failed),
//! 2 usage or input error, 3 reproduction mismatch.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::delta::{fd_table, DeltaBasis};
use crate::error::{Error, Result};
use crate::ineq::CheckerId;
use crate::lab::registry::{reproduce, CASE_IDS};
use crate::lab::search::{search, SearchConfig};
use crate::lab::trials::{run_trial_with, TrialInputs};
use crate::matcore::{parse_matrix, HermitianMatrix};
use crate::par::{self, Execution};
use crate::report::TrialReport;
use crate::specfun::PiecewiseFn;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANOMALY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

pub const WORKERS_ENV: &str = "MAJOLAB_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "majolab",
    version,
    about = "Matrix inequality checks, counterexample search and reproduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recompute a registry case (or `all`) and compare with expected values.
    Reproduce { case: String },
    /// Run seeded trials of one checker.
    Check(CheckArgs),
    /// Randomized counterexample search.
    Search(SearchArgs),
    /// Print delta(B; A) and optionally a finite-difference table as JSON.
    Delta(DeltaArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Worker threads; `MAJOLAB_WORKERS` takes precedence.
    #[arg(long)]
    workers: Option<usize>,
    /// Write JSONL reports to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    checker: String,
    #[command(flatten)]
    common: Common,
    /// Function JSON `{"c":..,"a":..,"terms":[[b,t],..]}`.
    #[arg(long = "fn")]
    function: Option<PathBuf>,
    /// First matrix operand (matrix JSON).
    #[arg(long, requires = "b")]
    a: Option<PathBuf>,
    /// Second matrix operand (matrix JSON).
    #[arg(long, requires = "a")]
    b: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    question: String,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long, default_value_t = 500)]
    restart_every: u64,
    #[arg(long, default_value_t = f64::INFINITY)]
    goal: f64,
    /// Starting `X` for the first chain.
    #[arg(long, requires = "start_y")]
    start_x: Option<PathBuf>,
    /// Starting `Y` for the first chain.
    #[arg(long, requires = "start_x")]
    start_y: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Comma-separated steps for the finite-difference table.
    #[arg(long, value_delimiter = ',')]
    fd: Vec<f64>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<HermitianMatrix> {
    parse_matrix(&read(path)?)
}

fn execution(flag: Option<usize>) -> Execution {
    let env = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok());
    Execution::from_workers(env.or(flag))
}

fn open_out(path: &Option<PathBuf>) -> Result<Option<BufWriter<File>>> {
    path.as_ref()
        .map(|p| {
            File::create(p)
                .map(BufWriter::new)
                .map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        })
        .transpose()
}

fn write_line(w: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(w, "{line}")?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Reproduce { case } => cmd_reproduce(&case, out, err),
        Command::Check(a) => cmd_check(a, out, err),
        Command::Search(a) => cmd_search(a, out, err),
        Command::Delta(a) => cmd_delta(a, out),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error [{}]: {e}", e.code());
            EXIT_USAGE
        }
    };
    let _ = out.flush();
    code
}

fn cmd_reproduce(case: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let ids: Vec<&str> = if case == "all" {
        CASE_IDS.to_vec()
    } else {
        vec![case]
    };
    let mut all_passed = true;
    for id in ids {
        let outcome = reproduce(id)?;
        for q in &outcome.quantities {
            writeln!(
                err,
                "{id} {:<24} {:>+.8e} {}",
                q.id,
                q.computed,
                if q.ok { "ok" } else { "MISMATCH" }
            )?;
        }
        writeln!(
            err,
            "{id}: {}",
            if outcome.passed { "PASS" } else { "FAIL" }
        )?;
        write_line(out, &outcome.report.to_jsonl())?;
        all_passed &= outcome.passed;
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_MISMATCH })
}

const CHECK_BATCH: u64 = 1024;

fn cmd_check(args: CheckArgs, out: &mut (dyn Write + Send), err: &mut dyn Write) -> Result<i32> {
    let checker: CheckerId = args.checker.parse()?;
    let c = &args.common;
    let pair = match (&args.a, &args.b) {
        (Some(a), Some(b)) => Some((read_matrix(a)?, read_matrix(b)?)),
        _ => None,
    };
    let dim = pair.as_ref().map_or(c.dim, |(a, _)| a.n());
    let function = args
        .function
        .as_ref()
        .map(|p| read(p).and_then(|s| PiecewiseFn::parse(&s)))
        .transpose()?;
    let inputs = TrialInputs { pair, function };
    let mut file = open_out(&c.out)?;
    let sink: &mut (dyn Write + Send) = match file.as_mut() {
        Some(f) => f,
        None => out,
    };

    let exec = execution(c.workers);
    let mut worst: Option<TrialReport> = None;
    let mut anomalies = 0u64;
    let mut start = 0;
    let status = par::scope(exec, |exec| -> Result<()> {
        while start < c.trials {
            let end = (start + CHECK_BATCH).min(c.trials);
            let batch = par::map(exec, start..end, |i| {
                let seed = c.seed.wrapping_add(i);
                run_trial_with(checker, dim, seed, c.tol, &inputs).map(|r| r.with_trial(i, seed))
            });
            for r in batch {
                let r = r?;
                write_line(sink, &r.to_jsonl())?;
                anomalies += r.anomaly as u64;
                if worst.as_ref().is_none_or(|w| !(r.margin <= w.margin)) {
                    worst = Some(r);
                }
            }
            sink.flush()?;
            start = end;
        }
        Ok(())
    });
    status?;
    let worst = worst.expect("at least one trial");
    writeln!(
        err,
        "{checker}: {} trials, max margin {:+.6e} (trial {}), anomalies {anomalies}",
        c.trials,
        worst.margin,
        worst.trial.unwrap_or(0)
    )?;
    Ok(if anomalies > 0 { EXIT_ANOMALY } else { EXIT_OK })
}

fn cmd_search(args: SearchArgs, out: &mut (dyn Write + Send), err: &mut dyn Write) -> Result<i32> {
    let c = &args.common;
    let start = match (&args.start_x, &args.start_y) {
        (Some(x), Some(y)) => Some((read_matrix(x)?, read_matrix(y)?)),
        _ => None,
    };
    let cfg = SearchConfig {
        question_id: args.question.clone(),
        dim: c.dim,
        n_trials: c.trials,
        base_seed: c.seed,
        step_scale: args.step,
        restart_every: args.restart_every,
        margin_goal: args.goal,
        tol: c.tol,
        start,
    };
    let exec = execution(c.workers);
    let mut file = open_out(&c.out)?;
    let summary = match file.as_mut() {
        Some(f) => {
            let mut sink = |r: &TrialReport| -> Result<()> { write_line(f, &r.to_jsonl()) };
            search(&cfg, exec, Some(&mut sink))?
        }
        None => search(&cfg, exec, None)?,
    };
    if let Some(f) = file.as_mut() {
        f.flush()?;
    }

    let lift = summary.lift.as_ref().map(|l| {
        json!({
            "formula_alpha": l.formula_alpha,
            "alpha": l.alpha,
            "verified": l.verified,
            "attempts": l.attempts,
            "norm_report": serde_json::to_value(&l.reports.norm).unwrap_or_default(),
        })
    });
    let best = summary
        .best
        .as_ref()
        .map(|b| serde_json::to_value(b).unwrap_or_default());
    let doc = json!({
        "question": cfg.question_id,
        "trials_run": summary.trials_run,
        "reached_goal": summary.reached_goal,
        "anomalies": summary.anomalies,
        "best": best,
        "lift": lift,
    });
    write_line(out, &doc.to_string())?;
    writeln!(
        err,
        "{}: {} trials, best margin {:+.6e}, anomalies {}{}",
        cfg.question_id,
        summary.trials_run,
        summary.best_margin(),
        summary.anomalies,
        match &summary.lift {
            Some(l) if l.verified => format!(", lifted with alpha = {}", l.alpha),
            Some(_) => ", lift not verified".to_string(),
            None => String::new(),
        }
    )?;
    Ok(if summary.anomalies > 0 {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    })
}

fn cmd_delta(args: DeltaArgs, out: &mut dyn Write) -> Result<i32> {
    let a = read_matrix(&args.a)?;
    let b = read_matrix(&args.b)?;
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let d = DeltaBasis::new(&a, args.gap_tol)?.delta(&b)?;
    let fd = if args.fd.is_empty() {
        None
    } else {
        Some(fd_table(
            &b,
            &a,
            &args.fd,
            args.gap_tol,
            Execution::Sequential,
        )?)
    };
    let doc = json!({
        "delta": d.entries,
        "partial_sums": d.partial_sums(),
        "clusters": d.clusters,
        "block_spectra": d.block_spectra,
        "near_degenerate": d.near_degenerate,
        "fd": fd,
    });
    write_line(out, &doc.to_string())?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("majolab").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn reproduce_all_passes() {
        let (code, out, _) = run_args(&["reproduce", "all"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["check", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["reproduce", "q7"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["check", "tru", "--trials", "x"]).0, EXIT_USAGE);
    }

    #[test]
    fn check_emits_one_line_per_trial() {
        let (code, out, _) = run_args(&[
            "check",
            "tru",
            "--trials",
            "5",
            "--seed",
            "1",
            "--workers",
            "1",
        ]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 5);
    }
}
