//! Lockstep comparison of the compressed stack against the classic one.

use std::fmt::{self, Debug};
use std::io;
use std::sync::Arc;

use super::input::LineSource;
use super::runner::{compressed_stack_for, Runner};
use super::StackAlgorithm;
use crate::compressed::CompressedStack;
use crate::error::Result;
use crate::metrics::{RunMetrics, StackMetrics};
use crate::stack::{ClassicStack, Data, Stack};

/// First point where the two stacks disagreed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// 1-based count of stack operations (push, pop, top) when detected.
    pub op: u64,
    pub operation: &'static str,
    /// Input index of the offending entry, when there is one.
    pub index: Option<u64>,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "divergence at operation {} ({})",
            self.op, self.operation
        )?;
        if let Some(i) = self.index {
            write!(f, " on element {i}")?;
        }
        write!(f, ": expected {}, got {}", self.expected, self.actual)
    }
}

type Fault<P, C> = Box<dyn FnMut(u64, &mut CompressedStack<P, C>) + Send>;

/// Runs every operation on both a classic and a compressed stack and checks
/// after each one that the answers agree and that every entry resident in
/// the compressed stack equals the classic entry with the same index.
///
/// Answers always come from the classic stack, so a run keeps going after
/// the first divergence; the compressed side is dropped from then on.
pub struct CheckedStack<P, C> {
    classic: ClassicStack<P, C>,
    compressed: CompressedStack<P, C>,
    ops: u64,
    divergence: Option<Divergence>,
    fault: Option<Fault<P, C>>,
}

impl<P, C> CheckedStack<P, C>
where
    P: Clone + Debug + PartialEq,
    C: Clone + Debug + PartialEq,
{
    pub fn new(compressed: CompressedStack<P, C>) -> Self {
        CheckedStack {
            classic: ClassicStack::new(),
            compressed,
            ops: 0,
            divergence: None,
            fault: None,
        }
    }

    /// Checked stack with a compressed side wired to replay `algo`.
    pub fn for_algorithm<A>(
        algo: &Arc<A>,
        source: &Arc<dyn LineSource>,
        n_expect: Option<u64>,
        p: u64,
        k: Option<usize>,
    ) -> Result<Self>
    where
        A: StackAlgorithm<Payload = P, Context = C>,
    {
        let stack = compressed_stack_for(algo, source, n_expect, p, k)?.with_space_check(true);
        Ok(Self::new(stack))
    }

    /// Calls `f(op, stack)` on the compressed side after every push and pop,
    /// before the comparison. Meant for fault injection.
    pub fn with_fault(
        mut self,
        f: impl FnMut(u64, &mut CompressedStack<P, C>) + Send + 'static,
    ) -> Self {
        self.fault = Some(Box::new(f));
        self
    }

    pub fn divergence(&self) -> Option<&Divergence> {
        self.divergence.as_ref()
    }

    pub fn classic(&self) -> &ClassicStack<P, C> {
        &self.classic
    }

    pub fn compressed(&self) -> &CompressedStack<P, C> {
        &self.compressed
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    fn active(&self) -> bool {
        self.divergence.is_none()
    }

    fn diverge(
        &mut self,
        operation: &'static str,
        index: Option<u64>,
        expected: String,
        actual: String,
    ) {
        if self.divergence.is_none() {
            self.divergence = Some(Divergence {
                op: self.ops,
                operation,
                index,
                expected,
                actual,
            });
        }
    }

    fn after_mutation(&mut self, operation: &'static str) {
        if let Some(f) = self.fault.as_mut() {
            f(self.ops, &mut self.compressed);
        }
        self.verify(operation);
    }

    fn verify(&mut self, operation: &'static str) {
        if self.classic.len() != self.compressed.len() {
            let (e, a) = (self.classic.len(), self.compressed.len());
            self.diverge(
                operation,
                None,
                format!("length {e}"),
                format!("length {a}"),
            );
            return;
        }
        let mut bad: Option<(u64, String, String)> = None;
        let classic = &self.classic;
        self.compressed.for_each_resident(|d| {
            if bad.is_some() {
                return;
            }
            match classic.find(d.index()) {
                Some(c) if c == d => {}
                Some(c) => bad = Some((d.index(), format!("{c:?}"), format!("{d:?}"))),
                None => bad = Some((d.index(), "no live entry".into(), format!("{d:?}"))),
            }
        });
        if let Some((i, e, a)) = bad {
            self.diverge(operation, Some(i), e, a);
        }
    }
}

impl<P, C> Stack<P, C> for CheckedStack<P, C>
where
    P: Clone + Debug + PartialEq,
    C: Clone + Debug + PartialEq,
{
    fn push(&mut self, d: Data<P, C>) -> Result<()> {
        self.ops += 1;
        self.classic.push(d.clone())?;
        if self.active() {
            let index = d.index();
            match self.compressed.push(d) {
                Ok(()) => self.after_mutation("push"),
                Err(e) => self.diverge("push", Some(index), "success".into(), e.to_string()),
            }
        }
        Ok(())
    }

    fn pop(&mut self) -> Result<Data<P, C>> {
        self.ops += 1;
        let expected = self.classic.pop()?;
        if self.active() {
            match self.compressed.pop() {
                Ok(got) if got == expected => self.after_mutation("pop"),
                Ok(got) => self.diverge(
                    "pop",
                    Some(expected.index()),
                    format!("{expected:?}"),
                    format!("{got:?}"),
                ),
                Err(e) => self.diverge(
                    "pop",
                    Some(expected.index()),
                    format!("{expected:?}"),
                    e.to_string(),
                ),
            }
        }
        Ok(expected)
    }

    fn top(&mut self, j: usize) -> Result<Option<&Data<P, C>>> {
        self.ops += 1;
        if self.active() {
            let expected = self.classic.top(j)?.cloned();
            match self.compressed.top(j) {
                Ok(got) => {
                    let got = got.cloned();
                    if got != expected {
                        let index = expected.as_ref().map(|d| d.index());
                        self.diverge("top", index, format!("{expected:?}"), format!("{got:?}"));
                    } else {
                        self.verify("top");
                    }
                }
                Err(e) => self.diverge("top", None, format!("{expected:?}"), e.to_string()),
            }
        }
        self.classic.top(j)
    }

    fn len(&self) -> u64 {
        self.classic.len()
    }

    fn metrics(&self) -> StackMetrics {
        self.compressed.metrics()
    }
}

/// Result of a checked run.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub ops: u64,
    pub metrics: Option<RunMetrics>,
    pub divergence: Option<Divergence>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Runs `algo` over `source` on `stack`, reporting the first divergence.
/// An error raised by the classic side (bad input, hook failure) is
/// returned as is.
pub fn run_checked<A: StackAlgorithm>(
    algo: Arc<A>,
    source: Arc<dyn LineSource>,
    stack: CheckedStack<A::Payload, A::Context>,
) -> Result<CheckOutcome> {
    let mut runner = Runner::with_stack(algo, source, stack);
    let res = runner.run(&mut io::sink());
    let stack = runner.into_stack();
    let ops = stack.ops;
    match (res, stack.divergence) {
        (res, Some(d)) => Ok(CheckOutcome {
            ops,
            metrics: res.ok(),
            divergence: Some(d),
        }),
        (Err(e), None) => Err(e),
        (Ok(m), None) => Ok(CheckOutcome {
            ops,
            metrics: Some(m),
            divergence: None,
        }),
    }
}
