use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use super::input::{LineCursor, LineSource};
use super::{process_element, push_element, Observer, StackAlgorithm};
use crate::compressed::{CompressedStack, Replay};
use crate::error::{Error, Result};
use crate::metrics::RunMetrics;
use crate::stack::{ClassicStack, Data, Stack};

/// Hook outcome recorded by a traced run, tagged with the input index it
/// concerns (the popped entry for `Pop`, the current element otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookEvent {
    Pop(u64),
    NoPop(u64),
    Push(u64),
    NoPush(u64),
}

/// Re-executes an algorithm over a stretch of its input.
pub struct AlgorithmReplay<A> {
    algo: Arc<A>,
    source: Arc<dyn LineSource>,
}

impl<A> AlgorithmReplay<A> {
    pub fn new(algo: Arc<A>, source: Arc<dyn LineSource>) -> Self {
        AlgorithmReplay { algo, source }
    }
}

impl<A: StackAlgorithm> Replay<A::Payload, A::Context> for AlgorithmReplay<A> {
    fn replay(
        &self,
        bottom: &Data<A::Payload, A::Context>,
        last: u64,
        stack: &mut dyn Stack<A::Payload, A::Context>,
    ) -> Result<()> {
        let algo = self.algo.as_ref();
        let mut ctx = bottom.ctx().clone();
        stack.push(bottom.clone())?;
        algo.post_push(bottom.payload(), &mut ctx);
        let mut cursor = self.source.cursor(bottom.stream_pos())?;
        for index in bottom.index() + 1..=last {
            let line = cursor.next_line()?.ok_or_else(|| {
                Error::Input(format!("input ended at element {index} during replay"))
            })?;
            let a = algo
                .read_input(line, &mut ctx)
                .map_err(|message| Error::Parse {
                    location: format!("element {index}"),
                    message,
                })?;
            let pos = cursor.position();
            process_element(algo, &mut ctx, stack, a, index, pos, None)?;
        }
        Ok(())
    }
}

/// Drives one algorithm over one input on a given stack.
pub struct Runner<A: StackAlgorithm, S> {
    algo: Arc<A>,
    source: Arc<dyn LineSource>,
    stack: S,
    cursor: Option<Box<dyn LineCursor + Send>>,
    ctx: A::Context,
    index: u64,
    obs: Observer,
}

impl<A: StackAlgorithm> Runner<A, ClassicStack<A::Payload, A::Context>> {
    pub fn classic(algo: Arc<A>, source: Arc<dyn LineSource>) -> Self {
        Runner::with_stack(algo, source, ClassicStack::new())
    }
}

impl<A: StackAlgorithm> Runner<A, CompressedStack<A::Payload, A::Context>> {
    /// `n_expect` defaults to the number of input elements and `k` to the
    /// algorithm's access depth.
    pub fn compressed(
        algo: Arc<A>,
        source: Arc<dyn LineSource>,
        n_expect: Option<u64>,
        p: u64,
        k: Option<usize>,
    ) -> Result<Self> {
        let stack = compressed_stack_for(&algo, &source, n_expect, p, k)?;
        Ok(Runner::with_stack(algo, source, stack))
    }
}

/// Compressed stack wired to replay `algo` over `source`.
pub(crate) fn compressed_stack_for<A: StackAlgorithm>(
    algo: &Arc<A>,
    source: &Arc<dyn LineSource>,
    n_expect: Option<u64>,
    p: u64,
    k: Option<usize>,
) -> Result<CompressedStack<A::Payload, A::Context>> {
    let need = algo.access_depth();
    let k = k.unwrap_or(need);
    if k < need {
        return Err(Error::InvalidParameter(format!(
            "k = {k} is below the algorithm's access depth {need}"
        )));
    }
    let n_expect = match n_expect {
        Some(n) => n,
        None => source.count_elements()?.max(1),
    };
    let replay = AlgorithmReplay::new(Arc::clone(algo), Arc::clone(source));
    CompressedStack::new(n_expect, p, k, Box::new(replay))
}

impl<A: StackAlgorithm, S: Stack<A::Payload, A::Context>> Runner<A, S> {
    pub fn with_stack(algo: Arc<A>, source: Arc<dyn LineSource>, stack: S) -> Self {
        let ctx = algo.initial_context();
        Runner {
            algo,
            source,
            stack,
            cursor: None,
            ctx,
            index: 0,
            obs: Observer::default(),
        }
    }

    /// Records hook events of the main run (replays are not recorded).
    pub fn with_trace(mut self) -> Self {
        self.obs.trace = Some(Vec::new());
        self
    }

    pub fn stack(&self) -> &S {
        &self.stack
    }

    pub fn stack_mut(&mut self) -> &mut S {
        &mut self.stack
    }

    pub fn into_stack(self) -> S {
        self.stack
    }

    pub fn context(&self) -> &A::Context {
        &self.ctx
    }

    /// Index of the last element read.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn trace(&self) -> &[HookEvent] {
        self.obs.trace.as_deref().unwrap_or(&[])
    }

    pub fn pushes(&self) -> u64 {
        self.obs.pushes
    }

    pub fn pops(&self) -> u64 {
        self.obs.pops
    }

    fn read(&mut self) -> Result<Option<A::Payload>> {
        let cursor = self.cursor.as_mut().expect("runner initialized");
        let Some(line) = cursor.next_line()? else {
            return Ok(None);
        };
        let index = self.index + 1;
        let parsed = self.algo.read_input(line, &mut self.ctx);
        let location = match cursor.line_number() {
            Some(n) => format!("line {n}"),
            None => format!("element {index}"),
        };
        let a = parsed.map_err(|message| Error::Parse { location, message })?;
        self.index = index;
        Ok(Some(a))
    }

    fn position(&self) -> u64 {
        self.cursor.as_ref().map_or(0, |c| c.position())
    }

    /// Resets the context and pushes the preload elements.
    pub fn initialize(&mut self) -> Result<()> {
        self.cursor = Some(self.source.cursor(0)?);
        self.ctx = self.algo.initial_context();
        self.index = 0;
        for _ in 0..self.algo.preload() {
            let Some(a) = self.read()? else { break };
            let pos = self.position();
            push_element(
                self.algo.as_ref(),
                &mut self.ctx,
                &mut self.stack,
                a,
                self.index,
                pos,
                Some(&mut self.obs),
            )?;
        }
        Ok(())
    }

    /// Processes the next element. Returns `false` once the input is
    /// exhausted.
    pub fn step(&mut self) -> Result<bool> {
        if self.cursor.is_none() {
            self.initialize()?;
        }
        let Some(a) = self.read()? else {
            return Ok(false);
        };
        let pos = self.position();
        process_element(
            self.algo.as_ref(),
            &mut self.ctx,
            &mut self.stack,
            a,
            self.index,
            pos,
            Some(&mut self.obs),
        )?;
        Ok(true)
    }

    /// Pops every remaining entry and writes one record per line, top first.
    pub fn report(&mut self, out: &mut dyn Write) -> Result<u64> {
        let mut n = 0;
        while !self.stack.is_empty() {
            let d = self.stack.pop()?;
            writeln!(out, "{}", self.algo.format_record(&d))?;
            n += 1;
        }
        Ok(n)
    }

    /// Initialize, process the whole input, report. Wall time covers all
    /// three.
    pub fn run(&mut self, out: &mut dyn Write) -> Result<RunMetrics> {
        let start = Instant::now();
        self.initialize()?;
        while self.step()? {}
        let final_stack_len = self.stack.len();
        let reconstructions = self.stack.metrics().reconstructions;
        self.report(out)?;
        let wall = start.elapsed();
        let m = self.stack.metrics();
        Ok(RunMetrics {
            wall,
            peak_bytes: m.peak_bytes,
            live_bytes: m.live_bytes,
            reconstructions,
            report_reconstructions: m.reconstructions - reconstructions,
            pushes: self.obs.pushes,
            pops: self.obs.pops,
            degraded_estimate: m.degraded_estimate,
            final_stack_len,
        })
    }
}
