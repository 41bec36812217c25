//! Command-line front end: curve generation, dip reports, scaling sweeps,
//! and the self-verification suite.
//!
//! Exit codes: 0 success, 1 check or runtime failure, 2 usage error.

mod emit;
mod opts;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use catdip::analytic::{find_dip, scaling_sweep, EnergyCurve};
use catdip::verify::{run_all, VerifyConfig};

use emit::{fmt12, fmt_n, json_num, Table};
use opts::{Cli, Command, OutFormat, RunConfig, UsageError};

/// Post-parse failures split into usage problems (exit 2) and runtime
/// failures (exit 1).
enum RunError {
    Usage(String),
    Runtime(String),
}

type Runner = fn(&RunConfig) -> Result<ExitCode, RunError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (_, Runner) = match &cli.cmd {
        Command::Curve(a) => (a, run_curve),
        Command::Dip(a) => (a, run_dip),
        Command::Sweep(a) => (a, run_sweep),
        Command::Verify(a) => (a, run_verify),
    };
    let cfg = match opts::resolve(args) {
        Ok(cfg) => cfg,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(code) => code,
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn sorted_n(cfg: &RunConfig) -> Vec<f64> {
    let mut n = cfg.n_values.clone();
    n.sort_by(|a, b| a.partial_cmp(b).unwrap());
    n
}

fn emit_table(cfg: &RunConfig, table: &Table, extra: &[(&str, String)]) -> Result<(), RunError> {
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            RunError::Runtime(format!("cannot write {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let res = match cfg.format {
        OutFormat::Csv => table.write_csv(&mut sink),
        OutFormat::Json => table.write_json(&mut sink, extra),
    };
    match res.and_then(|()| sink.flush()) {
        Ok(()) => Ok(()),
        // a downstream pager closing the pipe is not a failure
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(RunError::Runtime(e.to_string())),
    }
}

/// Normalized energy curves, one block per particle number, rows ordered by
/// (n ascending, z ascending).
fn run_curve(cfg: &RunConfig) -> Result<ExitCode, RunError> {
    let mut table = Table {
        columns: vec!["n_avg", "z", "sep_norm", "e_norm", "de_dz"],
        rows: Vec::new(),
    };
    for n in sorted_n(cfg) {
        let curve = EnergyCurve::closed_form(n, cfg.w0, cfg.zmax_norm, cfg.steps)
            .map_err(|e| RunError::Usage(e.to_string()))?;
        for s in &curve.samples {
            table.rows.push(vec![
                fmt_n(n),
                fmt12(s.z),
                fmt12(s.sep_norm),
                fmt12(s.e_norm),
                fmt12(s.de_dz),
            ]);
        }
    }
    emit_table(cfg, &table, &[])?;
    Ok(ExitCode::SUCCESS)
}

/// Dip report rows, one per particle number.
fn run_dip(cfg: &RunConfig) -> Result<ExitCode, RunError> {
    if cfg.n_values.iter().any(|n| *n <= 0.0) {
        return Err(RunError::Usage(
            "dip reports need strictly positive particle numbers".into(),
        ));
    }
    let mut table = Table {
        columns: vec![
            "n_avg",
            "sep_norm_star",
            "e_min",
            "depth",
            "max_opposing_slope",
            "boundary_case",
        ],
        rows: Vec::new(),
    };
    for n in sorted_n(cfg) {
        let dip = find_dip(n, cfg.w0).map_err(|e| RunError::Runtime(e.to_string()))?;
        table.rows.push(vec![
            fmt_n(n),
            fmt12(dip.sep_norm_star),
            fmt12(dip.e_min),
            fmt12(dip.depth),
            fmt12(dip.max_opposing_slope),
            dip.boundary_case.to_string(),
        ]);
    }
    // JSON cannot carry inf; boundary rows encode the position as null
    if cfg.format == OutFormat::Json {
        for row in &mut table.rows {
            if row[5] == "true" {
                row[1] = "null".into();
            }
        }
    }
    emit_table(cfg, &table, &[])?;
    Ok(ExitCode::SUCCESS)
}

/// Dip systematics across particle numbers plus the log-log position fit.
fn run_sweep(cfg: &RunConfig) -> Result<ExitCode, RunError> {
    let ns = sorted_n(cfg);
    if ns.len() < 3 || ns.iter().any(|n| *n <= std::f64::consts::SQRT_2) {
        return Err(RunError::Usage(
            "scaling sweeps need at least 3 particle numbers, all above sqrt(2)".into(),
        ));
    }
    let report = scaling_sweep(&ns, cfg.w0).map_err(|e| RunError::Runtime(e.to_string()))?;
    let mut table = Table {
        columns: vec![
            "n_avg",
            "sep_norm_star",
            "e_min",
            "depth",
            "max_opposing_slope",
        ],
        rows: Vec::new(),
    };
    for (n, dip) in &report.entries {
        table.rows.push(vec![
            fmt_n(*n),
            fmt12(dip.sep_norm_star),
            fmt12(dip.e_min),
            fmt12(dip.depth),
            fmt12(dip.max_opposing_slope),
        ]);
    }
    let extra = [
        ("position_exponent", json_num(report.position_exponent)),
        ("position_intercept", json_num(report.position_intercept)),
        (
            "opposing_slope_increasing",
            report.opposing_slope_increasing.to_string(),
        ),
    ];
    emit_table(cfg, &table, &extra)?;
    if cfg.format == OutFormat::Csv {
        eprintln!(
            "position_exponent={} opposing_slope_increasing={}",
            fmt12(report.position_exponent),
            report.opposing_slope_increasing
        );
    }
    Ok(ExitCode::SUCCESS)
}

/// Oracle suite; prints one pass/fail line per check.
fn run_verify(cfg: &RunConfig) -> Result<ExitCode, RunError> {
    let vcfg = VerifyConfig {
        grid_points: cfg.grid_points,
        k_max: cfg.kmax,
        w0: cfg.w0,
        mass: cfg.mass,
        rule: cfg.rule,
    };
    let results = run_all(&vcfg);
    let mut all_ok = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status}  {} — {}", r.name, r.detail);
        all_ok &= r.passed;
    }
    if all_ok {
        println!("all {} checks passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
