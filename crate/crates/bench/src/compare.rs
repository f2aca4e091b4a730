//! Batch comparisons driven by a TOML or JSON config.
//!
//! In `table` mode every listed algorithm runs on every listed function.
//! In `table2` mode every algorithm runs on the seeded random Rastrigin
//! problems and one row per algorithm reports seed averages.
//!
//! ```toml
//! mode = "table2"
//! eps = 1e-8
//! time_limit = 60
//! algorithms = ["lipgrad", "cqbnb2", "qbnb2"]
//! delta = -1
//! seeds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
//! ```

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use qbnb::search::SolveResult;
use qbnb::{Algorithm, Status};
use serde::Deserialize;

use crate::catalog;
use crate::report::{self, format_float, RunSpec};
use crate::BenchError;

pub const TABLE_HEADER: [&str; 7] = [
    "function",
    "algorithm",
    "d",
    "status",
    "seconds_or_accuracy",
    "iterations",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Table,
    Table2,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
    pub name: String,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub mode: Mode,
    pub eps: f64,
    /// Seconds per solve.
    pub time_limit: Option<f64>,
    #[serde(default = "one")]
    pub parallel: usize,
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub functions: Vec<FunctionEntry>,
    pub delta: Option<f64>,
    pub seeds: Option<Vec<u64>>,
}

fn one() -> usize {
    1
}

impl CompareConfig {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("reading {}: {e}", path.display())))?;
        let bad = |e: String| BenchError::Config(format!("parsing {}: {e}", path.display()));
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text).map_err(|e| bad(e.to_string())),
            Some("toml") => toml::from_str(&text).map_err(|e| bad(e.to_string())),
            _ => Err(BenchError::Config(format!(
                "{}: config must end in .toml or .json",
                path.display()
            ))),
        }
    }

    fn algorithms(&self) -> Result<Vec<Algorithm>, BenchError> {
        if self.algorithms.is_empty() {
            return Err(BenchError::Config("no algorithms listed".into()));
        }
        self.algorithms
            .iter()
            .map(|a| a.parse::<Algorithm>().map_err(|e| BenchError::Config(e.to_string())))
            .collect()
    }

    fn limit(&self) -> Result<Option<Duration>, BenchError> {
        match self.time_limit {
            None => Ok(None),
            Some(s) if s > 0.0 && s.is_finite() => Ok(Some(Duration::from_secs_f64(s))),
            Some(s) => Err(BenchError::Config(format!("time_limit must be positive, got {s}"))),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub function: String,
    pub algorithm: String,
    pub d: usize,
    pub status: String,
    /// Seconds when converged, otherwise the achieved `ub - lb`.
    pub seconds: Option<f64>,
    pub accuracy: Option<f64>,
    pub iterations: f64,
    pub error: Option<f64>,
}

impl Row {
    fn cells(&self) -> [String; 7] {
        let soa = match (self.seconds, self.accuracy) {
            (Some(s), _) => format!("{s:.3}"),
            (None, Some(a)) => format!("{} (acc)", format_float(a)),
            _ => String::new(),
        };
        [
            self.function.clone(),
            self.algorithm.clone(),
            self.d.to_string(),
            self.status.clone(),
            soa,
            format!("{}", self.iterations),
            self.error.map(format_float).unwrap_or_default(),
        ]
    }
}

pub fn write_table<W: Write>(out: W, rows: &[Row]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| BenchError::Config(format!("writing table: {e}"));
    w.write_record(TABLE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.cells()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn error_row(function: &str, algo: Algorithm, d: usize, e: &BenchError) -> Row {
    eprintln!("{function} / {algo}: {e}");
    Row {
        function: function.to_string(),
        algorithm: algo.name().to_string(),
        d,
        status: "error".into(),
        seconds: None,
        accuracy: None,
        iterations: 0.0,
        error: None,
    }
}

fn result_row(function: &str, res: &SolveResult, best: f64) -> Row {
    let converged = res.status == Status::Converged;
    Row {
        function: function.to_string(),
        algorithm: res.algorithm.name().to_string(),
        d: res.x_best.len(),
        status: res.status.name().to_string(),
        seconds: converged.then(|| res.wall_time.as_secs_f64()),
        accuracy: (!converged).then(|| res.gap()),
        iterations: res.total_cubes as f64,
        error: Some((res.f_best - best).abs()),
    }
}

/// Every algorithm on every function. The error column is measured against
/// the tabulated minimum when there is one, else the best value found.
pub fn run_table(cfg: &CompareConfig) -> Result<Vec<Row>, BenchError> {
    let algos = cfg.algorithms()?;
    let limit = cfg.limit()?;
    if cfg.functions.is_empty() {
        return Err(BenchError::Config("no functions listed".into()));
    }
    let mut rows = Vec::new();
    for f in &cfg.functions {
        let t = catalog::resolve(&f.name, f.dim, f.seed)?;
        let d = t.problem.dim();
        let mut done = Vec::new();
        for &algo in &algos {
            let spec = RunSpec {
                dim: f.dim,
                seed: f.seed,
                time_limit: limit,
                parallel: cfg.parallel,
                ..RunSpec::new(&f.name, algo, cfg.eps)
            };
            done.push((algo, report::run(&spec)));
        }
        let best = t.problem.known_minimum().map(|k| k.value).unwrap_or_else(|| {
            done.iter()
                .filter_map(|(_, r)| r.as_ref().ok())
                .map(|(_, r)| r.f_best)
                .fold(f64::INFINITY, f64::min)
        });
        for (algo, r) in done {
            rows.push(match r {
                Ok((_, res)) => result_row(&f.name, &res, best),
                Err(e) => error_row(&f.name, algo, d, &e),
            });
        }
    }
    Ok(rows)
}

/// Per-seed results of a seeded comparison.
#[derive(Debug, Clone)]
pub struct SeedRuns {
    pub seed: u64,
    /// In the order of the configured algorithms.
    pub results: Vec<(Algorithm, SolveResult)>,
}

impl SeedRuns {
    pub fn best(&self) -> f64 {
        self.results.iter().map(|(_, r)| r.f_best).fold(f64::INFINITY, f64::min)
    }

    pub fn get(&self, algo: Algorithm) -> Option<&SolveResult> {
        self.results.iter().find(|(a, _)| *a == algo).map(|(_, r)| r)
    }
}

/// Seeded random Rastrigin runs. Plain `qbnb2` is applied to the
/// constrained family too, which is what exposes its failure there.
pub fn run_seeds(cfg: &CompareConfig) -> Result<(String, Vec<SeedRuns>), BenchError> {
    let algos = cfg.algorithms()?;
    let limit = cfg.limit()?;
    let delta = cfg
        .delta
        .ok_or_else(|| BenchError::Config("table2 mode needs delta = 1 or -1".into()))?;
    let function = if delta > 0.0 {
        "random-rastrigin"
    } else if delta < 0.0 {
        "random-rastrigin-constrained"
    } else {
        return Err(BenchError::Config("delta must be nonzero".into()));
    };
    let seeds = cfg.seeds.clone().unwrap_or_else(|| (1..=10).collect());
    let mut out = Vec::new();
    for seed in seeds {
        let mut results = Vec::new();
        for &algo in &algos {
            let spec = RunSpec {
                seed: Some(seed),
                time_limit: limit,
                parallel: cfg.parallel,
                force_unconstrained: algo == Algorithm::QBnB2,
                ..RunSpec::new(function, algo, cfg.eps)
            };
            let (_, res) = report::run(&spec)?;
            results.push((algo, res));
        }
        out.push(SeedRuns { seed, results });
    }
    Ok((function.to_string(), out))
}

/// One row per algorithm: mean seconds (or worst accuracy), mean cube
/// count, and the largest deviation from the per-seed best value.
pub fn summarize_seeds(function: &str, runs: &[SeedRuns]) -> Vec<Row> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let n = runs.len() as f64;
    first
        .results
        .iter()
        .map(|(algo, r0)| {
            let all: Vec<(&SolveResult, f64)> = runs
                .iter()
                .map(|s| (s.get(*algo).expect("every seed runs every algorithm"), s.best()))
                .collect();
            let converged = all.iter().all(|(r, _)| r.status == Status::Converged);
            let status = all
                .iter()
                .map(|(r, _)| r.status)
                .find(|s| *s != Status::Converged)
                .unwrap_or(Status::Converged);
            Row {
                function: function.to_string(),
                algorithm: algo.name().to_string(),
                d: r0.x_best.len(),
                status: status.name().to_string(),
                seconds: converged
                    .then(|| all.iter().map(|(r, _)| r.wall_time.as_secs_f64()).sum::<f64>() / n),
                accuracy: (!converged)
                    .then(|| all.iter().map(|(r, _)| r.gap()).fold(0.0, f64::max)),
                iterations: all.iter().map(|(r, _)| r.total_cubes as f64).sum::<f64>() / n,
                error: Some(
                    all.iter()
                        .map(|(r, b)| (r.f_best - b).abs())
                        .fold(0.0, f64::max),
                ),
            }
        })
        .collect()
}

/// Full `compare` subcommand.
pub fn cmd_compare(config: &Path, out: &Path) -> Result<i32, BenchError> {
    let cfg = CompareConfig::load(config)?;
    if !(cfg.eps > 0.0) {
        return Err(BenchError::Config("eps must be positive".into()));
    }
    let rows = match cfg.mode {
        Mode::Table => run_table(&cfg)?,
        Mode::Table2 => {
            let (name, runs) = run_seeds(&cfg)?;
            summarize_seeds(&name, &runs)
        }
    };
    write_table(std::fs::File::create(out)?, &rows)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> CompareConfig {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn single_function_single_algorithm() {
        let c = cfg(r#"
            eps = 1e-6
            algorithms = ["qbnb2"]
            functions = [{ name = "quadratic" }]
        "#);
        let rows = run_table(&c).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, "converged");
        assert!(rows[0].error.unwrap() <= 1e-6);
    }

    #[test]
    fn inapplicable_rule_becomes_error_row() {
        let c = cfg(r#"
            eps = 1e-4
            algorithms = ["qbnb2", "cqbnb2"]
            functions = [{ name = "random-rastrigin-constrained", seed = 2 }]
        "#);
        let rows = run_table(&c).unwrap();
        assert_eq!(rows[0].status, "error");
        assert_eq!(rows[1].status, "converged");
    }

    #[test]
    fn unknown_keys_and_algorithms_rejected() {
        assert!(toml::from_str::<CompareConfig>("eps = 1\nalgorithms = []\nbogus = 3").is_err());
        let c = cfg("eps = 1e-3\nalgorithms = [\"simplex\"]\nfunctions = [{ name = \"quadratic\" }]");
        assert_eq!(run_table(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn seed_summary_shape() {
        let c = cfg(r#"
            mode = "table2"
            eps = 1e-4
            algorithms = ["cqbnb2", "lipgrad"]
            delta = -1
            seeds = [1, 2]
        "#);
        let (name, runs) = run_seeds(&c).unwrap();
        assert_eq!(name, "random-rastrigin-constrained");
        let rows = summarize_seeds(&name, &runs);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].algorithm, "cqbnb2");
        assert_eq!(rows[0].d, 3);
    }

    #[test]
    fn acc_convention() {
        let r = Row {
            function: "f".into(),
            algorithm: "a".into(),
            d: 2,
            status: "time_limit".into(),
            seconds: None,
            accuracy: Some(0.25),
            iterations: 10.0,
            error: None,
        };
        assert_eq!(r.cells()[4], "2.5e-1 (acc)");
    }
}
