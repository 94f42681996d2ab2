//! Seeded synthetic inputs.
//!
//! Every file starts with one `#` header line recording the parameters and
//! the RNG (`chacha8`), followed by one element per line. Output is a pure
//! function of the [`GenSpec`].
//!
//! * `pushonly`: `value,pops` lines where `pops` is 1 with probability
//!   `1 - rho` and 0 otherwise.
//! * `xmas`: nested push/pop cycles. A level-0 cycle pushes 8 elements and
//!   then pops 4; a level-`l` cycle runs 8 level-`(l-1)` cycles and then
//!   pops half of what they added. Pops are attached to the next element.
//! * `points`: `x,y` points uniform in the unit square, sorted by strictly
//!   increasing `x`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    PushOnly,
    Xmas,
    Points,
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenKind::PushOnly => "pushonly",
            GenKind::Xmas => "xmas",
            GenKind::Points => "points",
        })
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pushonly" => Ok(GenKind::PushOnly),
            "xmas" => Ok(GenKind::Xmas),
            "points" => Ok(GenKind::Points),
            _ => Err(Error::InvalidParameter(format!(
                "unknown generator `{s}` (expected pushonly, xmas or points)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: u64,
    /// Push probability for `pushonly`; ignored otherwise.
    pub rho: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: u64, rho: f64, seed: u64) -> Self {
        GenSpec { kind, n, rho, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// Writes the input described by `spec`.
pub fn generate(spec: &GenSpec, out: &mut dyn Write) -> Result<()> {
    spec.validate()?;
    writeln!(
        out,
        "# kind={} n={} rho={} seed={} rng=chacha8",
        spec.kind, spec.n, spec.rho, spec.seed
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GenKind::PushOnly => {
            for _ in 0..spec.n {
                let value: u32 = rng.gen_range(1..=1_000_000_000);
                let pops = u8::from(!rng.gen_bool(spec.rho));
                writeln!(out, "{value},{pops}")?;
            }
        }
        GenKind::Xmas => {
            let mut res = Ok(());
            xmas_walk(
                spec.n,
                |pops| {
                    if res.is_ok() {
                        let value: u32 = rng.gen_range(1..=1_000_000_000);
                        res = writeln!(out, "{value},{pops}");
                    }
                },
                |_| {},
            );
            res?;
        }
        GenKind::Points => {
            let mut xs: Vec<f64> = (0..spec.n).map(|_| rng.gen::<f64>()).collect();
            xs.sort_by(f64::total_cmp);
            for i in 1..xs.len() {
                if xs[i] <= xs[i - 1] {
                    xs[i] = xs[i - 1].next_up();
                }
            }
            for x in xs {
                let y: f64 = rng.gen();
                writeln!(out, "{x},{y}")?;
            }
        }
    }
    Ok(())
}

pub fn generate_string(spec: &GenSpec) -> Result<String> {
    let mut buf = Vec::new();
    generate(spec, &mut buf)?;
    Ok(String::from_utf8(buf).expect("generated text is ASCII"))
}

/// A cycle of the xmas workload scheduling its closing pops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XmasEvent {
    /// Elements emitted when the cycle ended.
    pub processed: u64,
    pub level: u32,
    /// Pops scheduled by this cycle.
    pub pops: u64,
    /// Stack height once every pop scheduled so far has been carried out.
    pub height: u64,
}

/// Pop counts of the `n` xmas elements, in order.
pub fn xmas_pops(n: u64) -> Vec<u64> {
    let mut v = Vec::with_capacity(n as usize);
    xmas_walk(n, |p| v.push(p), |_| {});
    v
}

/// Cycle ends of the xmas workload on `n` elements.
pub fn xmas_events(n: u64) -> Vec<XmasEvent> {
    let mut v = Vec::new();
    xmas_walk(n, |_| {}, |e| v.push(e));
    v
}

struct XmasWalk<E, V> {
    n: u64,
    emitted: u64,
    pending: u64,
    height: u64,
    emit: E,
    event: V,
}

impl<E: FnMut(u64), V: FnMut(XmasEvent)> XmasWalk<E, V> {
    fn done(&self) -> bool {
        self.emitted >= self.n
    }

    /// Runs one cycle; returns the number of elements it added net.
    fn cycle(&mut self, level: u32) -> u64 {
        let mut added = 0;
        for _ in 0..8 {
            if self.done() {
                return added;
            }
            if level == 0 {
                (self.emit)(std::mem::take(&mut self.pending));
                self.emitted += 1;
                self.height += 1;
                added += 1;
            } else {
                added += self.cycle(level - 1);
            }
        }
        let pops = added / 2;
        self.pending += pops;
        self.height -= pops;
        (self.event)(XmasEvent {
            processed: self.emitted,
            level,
            pops,
            height: self.height,
        });
        added - pops
    }
}

fn xmas_walk(n: u64, emit: impl FnMut(u64), event: impl FnMut(XmasEvent)) {
    let mut level = 0;
    let mut span = 8u64;
    while span < n {
        span = span.saturating_mul(8);
        level += 1;
    }
    let mut w = XmasWalk {
        n,
        emitted: 0,
        pending: 0,
        height: 0,
        emit,
        event,
    };
    w.cycle(level);
}
