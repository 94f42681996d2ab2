//! Stack algorithms as a set of hooks, and the driver that runs them.
//!
//! An algorithm reads its input one element at a time. For every element it
//! pops while [`StackAlgorithm::pop_condition`] holds, then pushes the
//! element if [`StackAlgorithm::push_condition`] holds. The hooks may inspect
//! the top `access_depth()` entries and keep private state in a context
//! value, which is snapshotted into every pushed entry so that any stretch
//! of the input can be re-executed later.

mod checker;
mod input;
mod runner;

pub use checker::{run_checked, CheckOutcome, CheckedStack, Divergence};
pub use input::{FileSource, LineCursor, LineSource, MemorySource};
pub use runner::{AlgorithmReplay, HookEvent, Runner};

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::stack::{Data, Stack, StackView};

pub trait StackAlgorithm: Send + Sync + 'static {
    type Payload: Clone + Debug + PartialEq + Send + 'static;
    type Context: Clone + Debug + PartialEq + Send + 'static;

    /// Largest `j` the conditions pass to `top(j)`.
    fn access_depth(&self) -> usize;

    /// Number of leading elements pushed unconditionally before the main loop.
    fn preload(&self) -> usize {
        0
    }

    fn initial_context(&self) -> Self::Context;

    /// Parses one input line. May update the context.
    fn read_input(
        &self,
        line: &str,
        ctx: &mut Self::Context,
    ) -> std::result::Result<Self::Payload, String>;

    fn pop_condition(
        &self,
        a: &Self::Payload,
        ctx: &Self::Context,
        stack: &mut StackView<'_, Self::Payload, Self::Context>,
    ) -> Result<bool>;

    fn push_condition(
        &self,
        _a: &Self::Payload,
        _ctx: &Self::Context,
        _stack: &mut StackView<'_, Self::Payload, Self::Context>,
    ) -> Result<bool> {
        Ok(true)
    }

    fn pre_pop(&self, _a: &Self::Payload, _ctx: &mut Self::Context) {}
    fn post_pop(
        &self,
        _a: &Self::Payload,
        _popped: &Data<Self::Payload, Self::Context>,
        _ctx: &mut Self::Context,
    ) {
    }
    fn no_pop(&self, _a: &Self::Payload, _ctx: &mut Self::Context) {}
    fn pre_push(&self, _a: &Self::Payload, _ctx: &mut Self::Context) {}
    fn post_push(&self, _a: &Self::Payload, _ctx: &mut Self::Context) {}
    fn no_push(&self, _a: &Self::Payload, _ctx: &mut Self::Context) {}

    /// One output line for an entry drained at the end of the run.
    fn format_record(&self, d: &Data<Self::Payload, Self::Context>) -> String;
}

/// Counters and optional event log of the main (non-replay) run.
#[derive(Debug, Default)]
pub(crate) struct Observer {
    pub(crate) pushes: u64,
    pub(crate) pops: u64,
    pub(crate) trace: Option<Vec<HookEvent>>,
}

impl Observer {
    fn log(&mut self, e: HookEvent) {
        if let Some(t) = self.trace.as_mut() {
            t.push(e);
        }
    }
}

/// Pop phase then push phase for element `index`, whose line ends at byte
/// `pos`.
pub(crate) fn process_element<A: StackAlgorithm>(
    algo: &A,
    ctx: &mut A::Context,
    stack: &mut dyn Stack<A::Payload, A::Context>,
    a: A::Payload,
    index: u64,
    pos: u64,
    mut obs: Option<&mut Observer>,
) -> Result<()> {
    let limit = stack.len();
    let mut popped = 0u64;
    while !stack.is_empty() {
        if !algo.pop_condition(&a, ctx, &mut StackView::new(&mut *stack))? {
            algo.no_pop(&a, ctx);
            if let Some(o) = obs.as_deref_mut() {
                o.log(HookEvent::NoPop(index));
            }
            break;
        }
        if popped == limit {
            return Err(Error::Contract(format!(
                "element {index} popped more entries than were live"
            )));
        }
        algo.pre_pop(&a, ctx);
        let d = stack.pop()?;
        algo.post_pop(&a, &d, ctx);
        popped += 1;
        if let Some(o) = obs.as_deref_mut() {
            o.pops += 1;
            o.log(HookEvent::Pop(d.index()));
        }
    }
    if algo.push_condition(&a, ctx, &mut StackView::new(&mut *stack))? {
        push_element(algo, ctx, stack, a, index, pos, obs)
    } else {
        algo.no_push(&a, ctx);
        if let Some(o) = obs {
            o.log(HookEvent::NoPush(index));
        }
        Ok(())
    }
}

pub(crate) fn push_element<A: StackAlgorithm>(
    algo: &A,
    ctx: &mut A::Context,
    stack: &mut dyn Stack<A::Payload, A::Context>,
    a: A::Payload,
    index: u64,
    pos: u64,
    obs: Option<&mut Observer>,
) -> Result<()> {
    algo.pre_push(&a, ctx);
    stack.push(Data::new(index, a.clone(), ctx.clone(), pos))?;
    algo.post_push(&a, ctx);
    if let Some(o) = obs {
        o.pushes += 1;
        o.log(HookEvent::Push(index));
    }
    Ok(())
}
