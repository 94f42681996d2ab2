//! Problem dispatch, `p` schedules and the CSV benchmark driver.

use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

use crate::algo::{
    run_checked, CheckOutcome, CheckedStack, LineSource, MemorySource, Runner, StackAlgorithm,
};
use crate::error::{Error, Result};
use crate::generators::{generate_string, GenKind, GenSpec};
use crate::metrics::RunMetrics;
use crate::problems::{TestRun, UpperHull};

/// Largest size exponent `bench` accepts without `force_large`.
pub const DESK_CAP_EXP: u32 = 22;

/// Space parameter as a constant or a function of the input size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PSchedule {
    Fixed(u64),
    Sqrt,
    Root4,
    Root8,
    Log,
}

impl PSchedule {
    /// Concrete `p` for `n` elements, rounded and clamped to `[2, max(n, 2)]`.
    pub fn resolve(&self, n: u64) -> u64 {
        let nf = n.max(1) as f64;
        let raw = match self {
            PSchedule::Fixed(p) => *p as f64,
            PSchedule::Sqrt => nf.sqrt(),
            PSchedule::Root4 => nf.powf(0.25),
            PSchedule::Root8 => nf.powf(0.125),
            PSchedule::Log => nf.log2(),
        };
        (raw.round() as u64).clamp(2, n.max(2))
    }
}

impl FromStr for PSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(PSchedule::Sqrt),
            "root4" => Ok(PSchedule::Root4),
            "root8" => Ok(PSchedule::Root8),
            "log" => Ok(PSchedule::Log),
            _ => s.parse().map(PSchedule::Fixed).map_err(|_| {
                Error::InvalidParameter(format!(
                    "bad p `{s}` (expected an integer, sqrt, root4, root8 or log)"
                ))
            }),
        }
    }
}

impl fmt::Display for PSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PSchedule::Fixed(p) => write!(f, "{p}"),
            PSchedule::Sqrt => f.write_str("sqrt"),
            PSchedule::Root4 => f.write_str("root4"),
            PSchedule::Root8 => f.write_str("root8"),
            PSchedule::Log => f.write_str("log"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    TestRun,
    UpperHull,
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "testrun" => Ok(Problem::TestRun),
            "upperhull" => Ok(Problem::UpperHull),
            _ => Err(Error::InvalidParameter(format!(
                "unknown problem `{s}` (expected testrun or upperhull)"
            ))),
        }
    }
}

impl Problem {
    fn accepts(&self, kind: GenKind) -> bool {
        match self {
            Problem::TestRun => matches!(kind, GenKind::PushOnly | GenKind::Xmas),
            Problem::UpperHull => kind == GenKind::Points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackChoice {
    Classic,
    Compressed,
}

impl FromStr for StackChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(StackChoice::Classic),
            "compressed" => Ok(StackChoice::Compressed),
            _ => Err(Error::InvalidParameter(format!(
                "unknown stack `{s}` (expected classic or compressed)"
            ))),
        }
    }
}

/// Settings of a single run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub problem: Problem,
    pub stack: StackChoice,
    pub p: PSchedule,
    /// Defaults to the number of input elements.
    pub n_expect: Option<u64>,
    /// Defaults to the algorithm's access depth.
    pub k: Option<usize>,
}

/// Metrics of a run plus the resolved `p` (`None` for the classic stack).
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub p: Option<u64>,
    pub n_expect: u64,
    pub metrics: RunMetrics,
}

fn n_expect_of(cfg_n: Option<u64>, source: &Arc<dyn LineSource>) -> Result<u64> {
    match cfg_n {
        Some(0) => Err(Error::InvalidParameter(
            "n-expect must be at least 1".into(),
        )),
        Some(n) => Ok(n),
        None => Ok(source.count_elements()?.max(1)),
    }
}

fn run_algorithm<A: StackAlgorithm>(
    algo: A,
    cfg: &RunConfig,
    source: Arc<dyn LineSource>,
    out: &mut dyn Write,
) -> Result<RunSummary> {
    let algo = Arc::new(algo);
    match cfg.stack {
        StackChoice::Classic => {
            let metrics = Runner::classic(algo, source).run(out)?;
            Ok(RunSummary {
                p: None,
                n_expect: 0,
                metrics,
            })
        }
        StackChoice::Compressed => {
            let n = n_expect_of(cfg.n_expect, &source)?;
            let p = cfg.p.resolve(n);
            let metrics = Runner::compressed(algo, source, Some(n), p, cfg.k)?.run(out)?;
            Ok(RunSummary {
                p: Some(p),
                n_expect: n,
                metrics,
            })
        }
    }
}

/// Runs `cfg.problem` over `source`, writing the report to `out`.
pub fn run_problem(
    cfg: &RunConfig,
    source: Arc<dyn LineSource>,
    out: &mut dyn Write,
) -> Result<RunSummary> {
    match cfg.problem {
        Problem::TestRun => run_algorithm(TestRun, cfg, source, out),
        Problem::UpperHull => run_algorithm(UpperHull::<f64>::new(), cfg, source, out),
    }
}

fn check_algorithm<A: StackAlgorithm>(
    algo: A,
    cfg: &RunConfig,
    source: Arc<dyn LineSource>,
) -> Result<CheckOutcome> {
    let algo = Arc::new(algo);
    let n = n_expect_of(cfg.n_expect, &source)?;
    let p = cfg.p.resolve(n);
    let stack = CheckedStack::for_algorithm(&algo, &source, Some(n), p, cfg.k)?;
    run_checked(algo, source, stack)
}

/// Runs `cfg.problem` on the classic and compressed stacks in lockstep.
pub fn check_problem(cfg: &RunConfig, source: Arc<dyn LineSource>) -> Result<CheckOutcome> {
    match cfg.problem {
        Problem::TestRun => check_algorithm(TestRun, cfg, source),
        Problem::UpperHull => check_algorithm(UpperHull::<f64>::new(), cfg, source),
    }
}

/// Parses `a..b` into the inclusive exponent range `a..=b`.
pub fn parse_sizes(s: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::InvalidParameter(format!("bad sizes `{s}` (expected a..b, e.g. 10..16)"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b || b >= 63 {
        return Err(bad());
    }
    Ok(a..=b)
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub problem: Problem,
    pub kind: GenKind,
    pub rho: f64,
    pub seed: u64,
    pub stack: StackChoice,
    pub p: PSchedule,
    /// Input sizes as powers of two.
    pub exponents: RangeInclusive<u32>,
    pub force_large: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: u64,
    /// Zero for the classic stack.
    pub p: u64,
    pub time_s: f64,
    pub peak_bytes: u64,
    pub reconstructions: u64,
    pub final_stack_len: u64,
}

/// Generates and runs one input per size.
pub fn bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    if !spec.problem.accepts(spec.kind) {
        return Err(Error::InvalidParameter(format!(
            "generator {} does not produce input for this problem",
            spec.kind
        )));
    }
    if *spec.exponents.end() > DESK_CAP_EXP && !spec.force_large {
        return Err(Error::InvalidParameter(format!(
            "sizes above 2^{DESK_CAP_EXP} need --force-large"
        )));
    }
    let mut rows = Vec::new();
    for e in spec.exponents.clone() {
        let size = 1u64 << e;
        let text = generate_string(&GenSpec::new(spec.kind, size, spec.rho, spec.seed))?;
        let source: Arc<dyn LineSource> = Arc::new(MemorySource::new(text));
        let cfg = RunConfig {
            problem: spec.problem,
            stack: spec.stack,
            p: spec.p,
            n_expect: Some(size),
            k: None,
        };
        let s = run_problem(&cfg, source, &mut io::sink())?;
        rows.push(BenchRow {
            size,
            p: s.p.unwrap_or(0),
            time_s: s.metrics.wall_seconds(),
            peak_bytes: s.metrics.peak_bytes,
            reconstructions: s.metrics.reconstructions,
            final_stack_len: s.metrics.final_stack_len,
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 6] = [
    "size",
    "p",
    "time_s",
    "peak_bytes",
    "reconstructions",
    "final_stack_len",
];

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Input(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.size.to_string(),
            r.p.to_string(),
            format!("{:.6}", r.time_s),
            r.peak_bytes.to_string(),
            r.reconstructions.to_string(),
            r.final_stack_len.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
