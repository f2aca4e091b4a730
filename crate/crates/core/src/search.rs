//! Breadth-first branch-and-bound driver.
//!
//! Each generation walks the current list in order, keeps cubes with
//! `q <= ub`, bisects them along the longest edge and bounds both children.
//! `ub` improves on strictly smaller sample values, and `lb` is the minimum
//! quasi-bound of the new list. Children whose bound already exceeds the
//! running `ub` are dropped on insertion, which gives the same `lb` and the
//! same next generation as filtering them one generation later.
//!
//! With `parallelism > 1` children are bounded speculatively on a thread
//! pool and then folded in list order, so the result does not depend on the
//! number of workers.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Cube, PathId, MAX_DEPTH};
use crate::problem::{BoundStatus, Problem, RuleError, RuleOutcome, Work};
use crate::rules::Algorithm;

/// Relative slack when deciding whether a cube covers the tracked minimizer.
const COVER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub eps: f64,
    pub time_limit: Option<Duration>,
    pub max_generations: usize,
    pub parallelism: usize,
    /// Stop once a generation holds more cubes than this.
    pub max_frontier: usize,
    /// A known global minimizer to track through the run.
    pub instrument_minimizer: Option<Vec<f64>>,
}

impl SearchConfig {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            time_limit: None,
            max_generations: 200,
            parallelism: 1,
            max_frontier: 4_000_000,
            instrument_minimizer: None,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_max_generations(mut self, g: usize) -> Self {
        self.max_generations = g;
        self
    }

    pub fn with_parallelism(mut self, n: usize) -> Self {
        self.parallelism = n;
        self
    }

    pub fn with_max_frontier(mut self, n: usize) -> Self {
        self.max_frontier = n;
        self
    }

    pub fn with_minimizer(mut self, x: Vec<f64>) -> Self {
        self.instrument_minimizer = Some(x);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    TimeLimit,
    GenerationLimit,
    FrontierLimit,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::TimeLimit => "time_limit",
            Status::GenerationLimit => "generation_limit",
            Status::FrontierLimit => "frontier_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub depth: usize,
    /// Cubes bounded in this generation.
    pub cubes_processed: u64,
    /// Cubes discarded in this generation, by a rule or by `q > ub`.
    pub cubes_eliminated: u64,
    pub cumulative_cubes: u64,
    pub lb: f64,
    pub ub: f64,
    pub cumulative_time: Duration,
    /// False for a generation cut short by a limit.
    pub complete: bool,
}

impl GenerationRecord {
    fn same_counts(&self, o: &GenerationRecord) -> bool {
        self.depth == o.depth
            && self.cubes_processed == o.cubes_processed
            && self.cubes_eliminated == o.cubes_eliminated
            && self.cumulative_cubes == o.cumulative_cubes
            && self.lb.to_bits() == o.lb.to_bits()
            && self.ub.to_bits() == o.ub.to_bits()
            && self.complete == o.complete
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossReason {
    /// The rule returned `Eliminated`.
    Eliminated,
    /// The cube's bound exceeded the upper bound.
    PricedOut,
}

/// A cube covering the tracked minimizer that was discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerLoss {
    pub depth: usize,
    pub path: PathId,
    pub reason: LossReason,
    pub qlb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerTrace {
    pub point: Vec<f64>,
    /// Per generation: whether some listed cube covers the point.
    pub covered: Vec<bool>,
    pub losses: Vec<MinimizerLoss>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub algorithm: Algorithm,
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub lb: f64,
    pub status: Status,
    pub generations: Vec<GenerationRecord>,
    pub work: Work,
    pub total_cubes: u64,
    pub wall_time: Duration,
    pub minimizer: Option<MinimizerTrace>,
}

impl SolveResult {
    pub fn gap(&self) -> f64 {
        self.f_best - self.lb
    }

    /// Deepest generation reached.
    pub fn depth(&self) -> usize {
        self.generations.last().map_or(0, |g| g.depth)
    }

    /// Field-by-field equality ignoring wall-clock measurements.
    pub fn same_outcome(&self, o: &SolveResult) -> bool {
        self.algorithm == o.algorithm
            && self.x_best.len() == o.x_best.len()
            && self
                .x_best
                .iter()
                .zip(&o.x_best)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.f_best.to_bits() == o.f_best.to_bits()
            && self.lb.to_bits() == o.lb.to_bits()
            && self.status == o.status
            && self.generations.len() == o.generations.len()
            && self
                .generations
                .iter()
                .zip(&o.generations)
                .all(|(a, b)| a.same_counts(b))
            && self.work == o.work
            && self.total_cubes == o.total_cubes
            && self.minimizer == o.minimizer
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// Runs the search with no per-cube observer.
pub fn solve(p: &Problem, algo: Algorithm, cfg: &SearchConfig) -> Result<SolveResult, SolveError> {
    solve_with_observer(p, algo, cfg, &mut |_, _| {})
}

/// Runs the search, calling `observer` for every committed cube outcome
/// (the root and every bounded child, in list order).
pub fn solve_with_observer(
    p: &Problem,
    algo: Algorithm,
    cfg: &SearchConfig,
    observer: &mut dyn FnMut(&Cube, &RuleOutcome),
) -> Result<SolveResult, SolveError> {
    if !(cfg.eps > 0.0) {
        return Err(SolveError::InvalidConfig("eps must be positive".into()));
    }
    if cfg.parallelism == 0 {
        return Err(SolveError::InvalidConfig("parallelism must be at least 1".into()));
    }
    if cfg.max_frontier == 0 {
        return Err(SolveError::InvalidConfig("max_frontier must be positive".into()));
    }
    if let Some(x) = &cfg.instrument_minimizer {
        if x.len() != p.dim() {
            return Err(SolveError::InvalidConfig(
                "minimizer dimension does not match the problem".into(),
            ));
        }
    }
    algo.validate(p)?;

    let pool = if cfg.parallelism > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.parallelism)
                .build()
                .map_err(|e| SolveError::InvalidConfig(e.to_string()))?,
        )
    } else {
        None
    };
    let mut driver = Driver {
        p,
        algo,
        cfg,
        start: Instant::now(),
        ub: f64::INFINITY,
        x_best: Vec::new(),
        work: Work::default(),
        total: 0,
        records: Vec::new(),
        trace: cfg.instrument_minimizer.clone().map(|point| MinimizerTrace {
            point,
            covered: Vec::new(),
            losses: Vec::new(),
        }),
        observer,
        pool: pool.as_ref(),
    };
    driver.run()
}

struct Driver<'a> {
    p: &'a Problem,
    algo: Algorithm,
    cfg: &'a SearchConfig,
    start: Instant,
    ub: f64,
    x_best: Vec<f64>,
    work: Work,
    total: u64,
    records: Vec<GenerationRecord>,
    trace: Option<MinimizerTrace>,
    observer: &'a mut dyn FnMut(&Cube, &RuleOutcome),
    pool: Option<&'a rayon::ThreadPool>,
}

type Children = Result<(RuleOutcome, RuleOutcome), RuleError>;

/// Per-generation tallies.
#[derive(Default)]
struct Tally {
    processed: u64,
    eliminated: u64,
}

impl Driver<'_> {
    fn timed_out(&self) -> bool {
        self.cfg
            .time_limit
            .is_some_and(|t| self.start.elapsed() >= t)
    }

    fn covers(&self, c: &Cube) -> bool {
        self.trace
            .as_ref()
            .is_some_and(|t| c.contains(&t.point, COVER_TOL))
    }

    fn lose(&mut self, c: &Cube, reason: LossReason, qlb: f64) {
        if self.covers(c) {
            let ub = self.ub;
            if let Some(t) = self.trace.as_mut() {
                t.losses.push(MinimizerLoss {
                    depth: c.depth(),
                    path: c.path(),
                    reason,
                    qlb,
                    ub,
                });
            }
        }
    }

    /// Commits one bounded cube: observer, counters, `ub` update, and
    /// insertion into `next` unless discarded.
    fn commit(&mut self, c: Cube, o: RuleOutcome, next: &mut Vec<(Cube, f64)>, tally: &mut Tally) {
        (self.observer)(&c, &o);
        self.work += o.work;
        self.total += 1;
        tally.processed += 1;
        if o.value < self.ub {
            self.ub = o.value;
            self.x_best = o.sample.clone();
        }
        if o.status == BoundStatus::Eliminated {
            tally.eliminated += 1;
            self.lose(&c, LossReason::Eliminated, o.qlb);
        } else if o.qlb > self.ub {
            tally.eliminated += 1;
            self.lose(&c, LossReason::PricedOut, o.qlb);
        } else {
            next.push((c, o.qlb));
        }
    }

    fn record(&mut self, depth: usize, tally: &Tally, lb: f64, complete: bool) {
        self.records.push(GenerationRecord {
            depth,
            cubes_processed: tally.processed,
            cubes_eliminated: tally.eliminated,
            cumulative_cubes: self.total,
            lb,
            ub: self.ub,
            cumulative_time: self.start.elapsed(),
            complete,
        });
    }

    fn finish(&mut self, lb: f64, status: Status) -> Result<SolveResult, SolveError> {
        let lb = lb.min(self.ub);
        Ok(SolveResult {
            algorithm: self.algo,
            x_best: std::mem::take(&mut self.x_best),
            f_best: self.ub,
            lb,
            status,
            generations: std::mem::take(&mut self.records),
            work: self.work,
            total_cubes: self.total,
            wall_time: self.start.elapsed(),
            minimizer: self.trace.take(),
        })
    }

    fn run(&mut self) -> Result<SolveResult, SolveError> {
        let root = Cube::from_domain(self.p.domain())
            .map_err(|e| SolveError::InvalidConfig(e.to_string()))?;
        let o = self.algo.bound(self.p, &root, self.cfg.eps)?;
        let mut list = Vec::new();
        let mut tally = Tally::default();
        self.commit(root, o, &mut list, &mut tally);
        let mut lb = min_q(&list).min(self.ub);
        self.record(0, &tally, lb, true);
        self.note_coverage(&list);

        let max_gen = self.cfg.max_generations.min(MAX_DEPTH);
        let mut g = 0;
        loop {
            if self.ub - lb <= self.cfg.eps || list.is_empty() {
                return self.finish(lb, Status::Converged);
            }
            if g >= max_gen {
                return self.finish(lb, Status::GenerationLimit);
            }
            let mut next = Vec::with_capacity(list.len().saturating_mul(2).min(self.cfg.max_frontier));
            let mut tally = Tally::default();
            let stopped = if let Some(pool) = self.pool {
                self.generation_parallel(pool, &list, &mut next, &mut tally)?
            } else {
                self.generation_serial(&list, &mut next, &mut tally)?
            };
            g += 1;
            if let Some((status, resume)) = stopped {
                // cubes not yet split still bound the minimum from below
                let pending = list[resume..]
                    .iter()
                    .map(|(_, q)| *q)
                    .filter(|q| *q <= self.ub)
                    .fold(f64::INFINITY, f64::min);
                lb = min_q(&next).min(pending).min(self.ub);
                self.record(g, &tally, lb, false);
                if let Some(t) = self.trace.as_mut() {
                    let ub = self.ub;
                    let hit = list[resume..]
                        .iter()
                        .filter(|(_, q)| *q <= ub)
                        .chain(&next)
                        .any(|(c, _)| c.contains(&t.point, COVER_TOL));
                    t.covered.push(hit);
                }
                return self.finish(lb, status);
            }
            lb = min_q(&next).min(self.ub);
            self.record(g, &tally, lb, true);
            self.note_coverage(&next);
            list = next;
        }
    }

    fn note_coverage(&mut self, list: &[(Cube, f64)]) {
        if let Some(t) = self.trace.as_mut() {
            let hit = list.iter().any(|(c, _)| c.contains(&t.point, COVER_TOL));
            t.covered.push(hit);
        }
    }

    /// Handles a parent whose bound no longer passes `q <= ub`.
    fn drop_parent(&mut self, c: &Cube, q: f64, tally: &mut Tally) {
        tally.eliminated += 1;
        self.lose(c, LossReason::PricedOut, q);
    }

    /// Returns `Some((status, index))` when a limit stops the generation
    /// before parent `index`.
    fn generation_serial(
        &mut self,
        list: &[(Cube, f64)],
        next: &mut Vec<(Cube, f64)>,
        tally: &mut Tally,
    ) -> Result<Option<(Status, usize)>, SolveError> {
        for (idx, (c, q)) in list.iter().enumerate() {
            if let Some(s) = self.limit(next) {
                return Ok(Some((s, idx)));
            }
            if *q > self.ub {
                self.drop_parent(c, *q, tally);
                continue;
            }
            let (a, b) = c.bisect_longest();
            let oa = self.algo.bound(self.p, &a, self.cfg.eps)?;
            self.commit(a, oa, next, tally);
            let ob = self.algo.bound(self.p, &b, self.cfg.eps)?;
            self.commit(b, ob, next, tally);
        }
        Ok(None)
    }

    fn limit(&self, next: &[(Cube, f64)]) -> Option<Status> {
        if next.len() > self.cfg.max_frontier {
            Some(Status::FrontierLimit)
        } else if self.timed_out() {
            Some(Status::TimeLimit)
        } else {
            None
        }
    }

    fn generation_parallel(
        &mut self,
        pool: &rayon::ThreadPool,
        list: &[(Cube, f64)],
        next: &mut Vec<(Cube, f64)>,
        tally: &mut Tally,
    ) -> Result<Option<(Status, usize)>, SolveError> {
        const CHUNK: usize = 2048;
        let shared = AtomicMin::new(self.ub);
        for (chunk_idx, chunk) in list.chunks(CHUNK).enumerate() {
            let base = chunk_idx * CHUNK;
            if let Some(s) = self.limit(next) {
                return Ok(Some((s, base)));
            }
            shared.lower(self.ub);
            let (p, algo, eps) = (self.p, self.algo, self.cfg.eps);
            let shared = &shared;
            let speculative: Vec<Option<Children>> = pool.install(|| {
                chunk
                    .par_iter()
                    .map(|(c, q)| {
                        if *q > shared.get() {
                            return None;
                        }
                        let r = bound_pair(p, algo, eps, c);
                        if let Ok((a, b)) = &r {
                            shared.lower(a.value.min(b.value));
                        }
                        Some(r)
                    })
                    .collect()
            });
            for (off, ((c, q), spec)) in chunk.iter().zip(speculative).enumerate() {
                if off > 0 {
                    if let Some(s) = self.limit(next) {
                        return Ok(Some((s, base + off)));
                    }
                }
                if *q > self.ub {
                    self.drop_parent(c, *q, tally);
                    continue;
                }
                let (oa, ob) = match spec {
                    Some(r) => r?,
                    None => bound_pair(self.p, self.algo, self.cfg.eps, c)?,
                };
                let (a, b) = c.bisect_longest();
                self.commit(a, oa, next, tally);
                self.commit(b, ob, next, tally);
            }
        }
        Ok(None)
    }
}

fn bound_pair(p: &Problem, algo: Algorithm, eps: f64, c: &Cube) -> Children {
    let (a, b) = c.bisect_longest();
    let oa = algo.bound(p, &a, eps)?;
    let ob = algo.bound(p, &b, eps)?;
    Ok((oa, ob))
}

fn min_q(list: &[(Cube, f64)]) -> f64 {
    list.iter().map(|(_, q)| *q).fold(f64::INFINITY, f64::min)
}

/// Monotone shared minimum of `f64` values.
struct AtomicMin(AtomicU64);

impl AtomicMin {
    fn new(v: f64) -> Self {
        Self(AtomicU64::new(v.to_bits()))
    }

    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn lower(&self, v: f64) {
        let mut cur = self.0.load(Ordering::Relaxed);
        while v < f64::from_bits(cur) {
            match self
                .0
                .compare_exchange_weak(cur, v.to_bits(), Ordering::Relaxed, Ordering::Relaxed)
            {
                Ok(_) => return,
                Err(seen) => cur = seen,
            }
        }
    }
}
