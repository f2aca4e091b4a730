//! Single-problem solves and their artifacts: a JSON result record and a
//! per-generation CSV.

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use qbnb::search::{solve, SearchConfig, SolveResult};
use qbnb::Algorithm;
use serde::Serialize;

use crate::catalog;
use crate::BenchError;

/// Version of the JSON result layout and of the stats CSV columns.
pub const SCHEMA_VERSION: u32 = 1;

pub const STATS_HEADER: [&str; 6] = [
    "depth",
    "cubes_processed",
    "cumulative_cubes",
    "cumulative_time_ms",
    "lb",
    "ub",
];

/// Everything needed to reproduce one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub function: String,
    pub dim: Option<usize>,
    pub algorithm: Algorithm,
    pub eps: f64,
    pub time_limit: Option<Duration>,
    pub seed: Option<u64>,
    pub parallel: usize,
    /// Apply the rule even if the problem is not flagged unconstrained.
    pub force_unconstrained: bool,
}

impl RunSpec {
    pub fn new(function: &str, algorithm: Algorithm, eps: f64) -> Self {
        Self {
            function: function.to_string(),
            dim: None,
            algorithm,
            eps,
            time_limit: None,
            seed: None,
            parallel: 1,
            force_unconstrained: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkRecord {
    pub f_evals: u64,
    pub g_evals: u64,
    pub h_evals: u64,
    pub newton_iterations: u64,
    pub convex_iterations: u64,
}

/// Wall-clock measurements, kept apart from the deterministic fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRecord {
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub algorithm: String,
    pub function: String,
    pub dim: usize,
    pub seed: Option<u64>,
    pub eps: f64,
    pub status: String,
    /// Non-finite values serialize as `null`.
    pub f_best: f64,
    pub x_best: Vec<f64>,
    pub lb: f64,
    pub gap: f64,
    pub generations: usize,
    pub total_cubes: u64,
    pub work: WorkRecord,
    pub timing: TimingRecord,
}

impl ResultRecord {
    pub fn new(spec: &RunSpec, name: &str, res: &SolveResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            algorithm: res.algorithm.name().to_string(),
            function: name.to_string(),
            dim: res.x_best.len(),
            seed: spec.seed,
            eps: spec.eps,
            status: res.status.name().to_string(),
            f_best: res.f_best,
            x_best: res.x_best.clone(),
            lb: res.lb,
            gap: res.gap(),
            generations: res.depth(),
            total_cubes: res.total_cubes,
            work: WorkRecord {
                f_evals: res.work.f_evals,
                g_evals: res.work.g_evals,
                h_evals: res.work.h_evals,
                newton_iterations: res.work.newton_iterations,
                convex_iterations: res.work.convex_iterations,
            },
            timing: TimingRecord {
                wall_time_s: res.wall_time.as_secs_f64(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes") + "\n"
    }
}

/// Resolves the problem, checks the rule applies, and solves.
pub fn run(spec: &RunSpec) -> Result<(String, SolveResult), BenchError> {
    let t = catalog::resolve(&spec.function, spec.dim, spec.seed)?;
    let mut p = t.problem;
    if spec.force_unconstrained {
        p = p.with_unconstrained(true);
    }
    spec.algorithm
        .validate(&p)
        .map_err(|e| BenchError::Config(format!("{} cannot run on {}: {e}", spec.algorithm, p.name())))?;
    let mut cfg = SearchConfig::new(spec.eps).with_parallelism(spec.parallel);
    if let Some(t) = spec.time_limit {
        cfg = cfg.with_time_limit(t);
    }
    let res = solve(&p, spec.algorithm, &cfg)?;
    Ok((p.name().to_string(), res))
}

/// Writes the per-generation table.
pub fn write_stats<W: Write>(out: W, res: &SolveResult) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| BenchError::Config(format!("writing stats: {e}"));
    w.write_record(STATS_HEADER).map_err(csv_err)?;
    for g in &res.generations {
        w.write_record([
            g.depth.to_string(),
            g.cubes_processed.to_string(),
            g.cumulative_cubes.to_string(),
            format!("{:.3}", g.cumulative_time.as_secs_f64() * 1e3),
            format_float(g.lb),
            format_float(g.ub),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip representation, with `inf`/`-inf` spelled out.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Full `solve` subcommand: run, then write artifacts. Returns the exit code.
pub fn cmd_solve(spec: &RunSpec, stats: Option<&Path>, out: Option<&Path>) -> Result<i32, BenchError> {
    let (name, res) = run(spec)?;
    let record = ResultRecord::new(spec, &name, &res);
    match out {
        Some(path) => std::fs::write(path, record.to_json())?,
        None => print!("{}", record.to_json()),
    }
    if let Some(path) = stats {
        write_stats(std::fs::File::create(path)?, &res)?;
    }
    Ok(crate::status_exit_code(res.status))
}
