//! Stack entries, the stack interface and the classic reference stack.

use crate::error::{Error, Result};
use crate::metrics::{ByteLedger, CostTable, StackMetrics};

/// One stack entry.
///
/// Besides the payload, every entry carries the restart state needed to
/// replay the algorithm from this element: the context as it was right
/// before the entry was pushed and the input position just past its line.
#[derive(Debug, Clone, PartialEq)]
pub struct Data<P, C> {
    index: u64,
    payload: P,
    ctx: C,
    stream_pos: u64,
}

impl<P, C> Data<P, C> {
    /// `index` is the 1-based position of the element in the input.
    pub fn new(index: u64, payload: P, ctx: C, stream_pos: u64) -> Self {
        debug_assert!(index >= 1, "input indices are 1-based");
        Data {
            index,
            payload,
            ctx,
            stream_pos,
        }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn payload(&self) -> &P {
        &self.payload
    }

    pub fn ctx(&self) -> &C {
        &self.ctx
    }

    pub fn stream_pos(&self) -> u64 {
        self.stream_pos
    }

    pub fn into_payload(self) -> P {
        self.payload
    }

    #[doc(hidden)]
    pub fn payload_mut(&mut self) -> &mut P {
        &mut self.payload
    }
}

/// Operations shared by the classic and the compressed stack.
///
/// `top(j)` is 1-based (`top(1)` is the element the next `pop` returns) and
/// yields `None` when fewer than `j` entries are live.
pub trait Stack<P, C> {
    fn push(&mut self, d: Data<P, C>) -> Result<()>;
    fn pop(&mut self) -> Result<Data<P, C>>;
    fn top(&mut self, j: usize) -> Result<Option<&Data<P, C>>>;
    fn len(&self) -> u64;
    fn metrics(&self) -> StackMetrics;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Read-only window handed to algorithm hooks.
pub struct StackView<'a, P, C> {
    stack: &'a mut dyn Stack<P, C>,
}

impl<'a, P, C> StackView<'a, P, C> {
    pub fn new(stack: &'a mut dyn Stack<P, C>) -> Self {
        StackView { stack }
    }

    pub fn top(&mut self, j: usize) -> Result<Option<&Data<P, C>>> {
        self.stack.top(j)
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }
}

/// Plain vector-backed stack used as the reference implementation.
#[derive(Debug, Clone)]
pub struct ClassicStack<P, C> {
    entries: Vec<Data<P, C>>,
    ledger: ByteLedger,
    costs: CostTable,
}

impl<P, C> Default for ClassicStack<P, C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P, C> ClassicStack<P, C> {
    pub fn new() -> Self {
        ClassicStack {
            entries: Vec::new(),
            ledger: ByteLedger::new(),
            costs: CostTable::of::<P, C>(),
        }
    }

    /// k-th entry from the top, erroring when the stack is too short.
    pub fn peek(&self, k: usize) -> Result<&Data<P, C>> {
        if k == 0 {
            return Err(Error::Contract("top(0) is undefined".into()));
        }
        let len = self.entries.len();
        if k > len {
            return Err(Error::OutOfRange { requested: k, len });
        }
        Ok(&self.entries[len - k])
    }

    /// Entries bottom to top.
    pub fn entries(&self) -> &[Data<P, C>] {
        &self.entries
    }

    /// Looks up the live entry with the given input index.
    pub fn find(&self, index: u64) -> Option<&Data<P, C>> {
        self.entries
            .binary_search_by_key(&index, |d| d.index)
            .ok()
            .map(|i| &self.entries[i])
    }
}

impl<P, C> Stack<P, C> for ClassicStack<P, C> {
    fn push(&mut self, d: Data<P, C>) -> Result<()> {
        let previous = self.entries.last().map_or(0, |t| t.index);
        if d.index <= previous {
            return Err(Error::NonMonotoneIndex {
                index: d.index,
                previous,
            });
        }
        self.entries.push(d);
        self.ledger.alloc(self.costs.data, 1);
        Ok(())
    }

    fn pop(&mut self) -> Result<Data<P, C>> {
        let d = self.entries.pop().ok_or(Error::EmptyStack)?;
        self.ledger.free(self.costs.data, 1)?;
        Ok(d)
    }

    fn top(&mut self, j: usize) -> Result<Option<&Data<P, C>>> {
        match self.peek(j) {
            Ok(d) => Ok(Some(d)),
            Err(Error::OutOfRange { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    fn metrics(&self) -> StackMetrics {
        StackMetrics {
            live_bytes: self.ledger.live(),
            peak_bytes: self.ledger.peak(),
            reconstructions: 0,
            degraded_estimate: false,
        }
    }
}
