use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use compressed_stack::bench::{
    bench, check_problem, parse_sizes, run_problem, write_csv, BenchSpec, PSchedule, Problem,
    RunConfig, StackChoice,
};
use compressed_stack::generators::{generate, GenKind, GenSpec};
use compressed_stack::{FileSource, LineSource};

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_DIVERGENCE: u8 = 3;

/// Compressed stack toolkit: generate inputs, run stack algorithms, check
/// the compressed stack against the classic one, and benchmark.
#[derive(Parser, Debug)]
#[command(name = "cstack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic input file.
    Generate {
        /// pushonly, xmas or points
        #[arg(long)]
        kind: GenKind,
        #[arg(long)]
        n: u64,
        /// Probability that a pushonly element does not pop.
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a problem once and print its report followed by metrics.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "compressed")]
        stack: StackChoice,
    },
    /// Run classic and compressed stacks in lockstep and report the first
    /// divergence.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Generate inputs of sizes 2^a..2^b, run them and write CSV.
    Bench {
        #[arg(long)]
        problem: Problem,
        /// Generator; defaults to points for upperhull and pushonly otherwise.
        #[arg(long)]
        kind: Option<GenKind>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "compressed")]
        stack: StackChoice,
        /// Integer, sqrt, root4, root8 or log.
        #[arg(long, default_value = "sqrt")]
        p: PSchedule,
        /// Exponent range, e.g. 10..16.
        #[arg(long, value_parser = sizes_arg)]
        sizes: RangeInclusive<u32>,
        /// Allow sizes above 2^22.
        #[arg(long)]
        force_large: bool,
        /// CSV file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// testrun or upperhull
    #[arg(long)]
    problem: Problem,
    #[arg(long)]
    input: PathBuf,
    /// Integer, sqrt, root4, root8 or log.
    #[arg(long, default_value = "sqrt")]
    p: PSchedule,
    /// Expected element count; defaults to the number of input lines.
    #[arg(long)]
    n_expect: Option<u64>,
    /// Top-access depth; at least the problem's own.
    #[arg(long)]
    k: Option<usize>,
}

fn sizes_arg(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    parse_sizes(s).map_err(|e| e.to_string())
}

fn open_out(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_input(path: &PathBuf) -> Result<Arc<dyn LineSource>> {
    Ok(Arc::new(FileSource::open(path)?))
}

fn config(c: &Common, stack: StackChoice) -> RunConfig {
    RunConfig {
        problem: c.problem,
        stack,
        p: c.p,
        n_expect: c.n_expect,
        k: c.k,
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            kind,
            n,
            rho,
            seed,
            out,
        } => {
            let mut w = open_out(out.as_ref())?;
            generate(&GenSpec::new(kind, n, rho, seed), &mut w)?;
            w.flush()?;
        }
        Command::Run { common, stack } => {
            let source = open_input(&common.input)?;
            let mut w = open_out(None)?;
            let s = run_problem(&config(&common, stack), source, &mut w)?;
            let m = &s.metrics;
            match s.p {
                Some(p) => writeln!(w, "# stack=compressed p={p} n_expect={}", s.n_expect)?,
                None => writeln!(w, "# stack=classic")?,
            }
            writeln!(
                w,
                "# time_s={:.6} peak_bytes={} live_bytes={} reconstructions={} report_reconstructions={} pushes={} pops={} final_stack_len={} degraded_estimate={}",
                m.wall_seconds(),
                m.peak_bytes,
                m.live_bytes,
                m.reconstructions,
                m.report_reconstructions,
                m.pushes,
                m.pops,
                m.final_stack_len,
                m.degraded_estimate
            )?;
            w.flush()?;
        }
        Command::Compare { common } => {
            let source = open_input(&common.input)?;
            let o = check_problem(&config(&common, StackChoice::Compressed), source)?;
            match o.divergence {
                None => println!("ok: {} stack operations agree", o.ops),
                Some(d) => {
                    println!("{d}");
                    return Ok(ExitCode::from(EXIT_DIVERGENCE));
                }
            }
        }
        Command::Bench {
            problem,
            kind,
            rho,
            seed,
            stack,
            p,
            sizes,
            force_large,
            out,
        } => {
            let kind = kind.unwrap_or(match problem {
                Problem::UpperHull => GenKind::Points,
                Problem::TestRun => GenKind::PushOnly,
            });
            let rows = bench(&BenchSpec {
                problem,
                kind,
                rho,
                seed,
                stack,
                p,
                exponents: sizes,
                force_large,
            })?;
            write_csv(&rows, open_out(out.as_ref())?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
