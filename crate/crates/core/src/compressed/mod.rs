//! The compressed stack.
//!
//! The input index range is partitioned hierarchically (see
//! [`PartitionGeometry`]). The level-1 block currently receiving pushes and
//! its predecessor are kept as detailed [components](component), every older
//! level-1 block is a single [`BlockSignature`] in the tail. Inside a
//! component, each finished sub-block is folded into a signature as soon as a
//! push crosses its boundary, so only the deepest active block is stored
//! entry by entry.
//!
//! Popping into a folded block rebuilds it by re-running the algorithm over
//! the block's input range through a [`Replay`] handle, starting from the
//! restart snapshot stored in the block's bottom entry.

mod buffer;
mod component;
mod signature;

pub use buffer::TopBuffer;
pub use signature::BlockSignature;

use component::Component;

use crate::error::{Error, Result};
use crate::metrics::{ByteLedger, CostTable, StackMetrics};
use crate::partition::PartitionGeometry;
use crate::stack::{Data, Stack};

/// Re-executes the owning algorithm over part of the input.
pub trait Replay<P, C> {
    /// Pushes `bottom` onto `stack`, restores its context snapshot, then
    /// processes input elements `bottom.index() + 1 ..= last` against
    /// `stack` exactly as the original run did.
    fn replay(&self, bottom: &Data<P, C>, last: u64, stack: &mut dyn Stack<P, C>) -> Result<()>;
}

/// Replay handle for stacks whose traces never pop into folded blocks.
/// Any reconstruction request fails.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoReplay;

impl<P, C> Replay<P, C> for NoReplay {
    fn replay(&self, bottom: &Data<P, C>, last: u64, _: &mut dyn Stack<P, C>) -> Result<()> {
        Err(Error::Contract(format!(
            "reconstruction of {}..={} requested without a replay handle",
            bottom.index(),
            last
        )))
    }
}

/// State shared by every component operation.
#[derive(Debug)]
pub(crate) struct Env {
    pub(crate) geometry: PartitionGeometry,
    pub(crate) k: usize,
    pub(crate) costs: CostTable,
    pub(crate) ledger: ByteLedger,
    pub(crate) reconstructions: u64,
}

pub struct CompressedStack<P, C> {
    env: Env,
    replay: Box<dyn Replay<P, C> + Send>,
    first: Component<P, C>,
    second: Component<P, C>,
    tail: Vec<BlockSignature<P, C>>,
    buffer: TopBuffer<P, C>,
    live: u64,
    high_water: u64,
    degraded: bool,
    check_cap: bool,
}

impl<P: Clone, C: Clone> CompressedStack<P, C> {
    /// Empty stack for an input of about `n_expect` elements, space
    /// parameter `p` and top-access depth `k`.
    pub fn new(
        n_expect: u64,
        p: u64,
        k: usize,
        replay: Box<dyn Replay<P, C> + Send>,
    ) -> Result<Self> {
        let geometry = PartitionGeometry::new(n_expect, p)?;
        let depth = geometry.depth();
        Ok(CompressedStack {
            env: Env {
                geometry,
                k,
                costs: CostTable::of::<P, C>(),
                ledger: ByteLedger::new(),
                reconstructions: 0,
            },
            replay,
            first: Component::new(depth),
            second: Component::new(depth),
            tail: Vec::new(),
            buffer: TopBuffer::new(k),
            live: 0,
            high_water: 0,
            degraded: false,
            check_cap: false,
        })
    }

    /// Makes every public operation verify [`Self::space_bound`] on exit.
    pub fn with_space_check(mut self, on: bool) -> Self {
        self.check_cap = on;
        self
    }

    pub fn geometry(&self) -> &PartitionGeometry {
        &self.env.geometry
    }

    pub fn access_depth(&self) -> usize {
        self.env.k
    }

    pub fn reconstructions(&self) -> u64 {
        self.env.reconstructions
    }

    /// Set once an index beyond the expected input size was pushed.
    pub fn degraded_estimate(&self) -> bool {
        self.degraded
    }

    pub fn tail(&self) -> &[BlockSignature<P, C>] {
        &self.tail
    }

    pub fn buffer(&self) -> &TopBuffer<P, C> {
        &self.buffer
    }

    /// Entries stored one by one in the push component.
    pub fn first_explicit(&self) -> &[Data<P, C>] {
        self.first.explicit()
    }

    pub fn first_lists(&self) -> Vec<&[BlockSignature<P, C>]> {
        self.first.lists().map(|l| l.as_slice()).collect()
    }

    pub fn second_live(&self) -> u64 {
        self.second.live()
    }

    /// `Data` records currently held by the structure.
    pub fn resident_records(&self) -> u64 {
        self.env.ledger.resident_records()
    }

    /// Upper bound on [`Self::resident_records`] between operations:
    /// `2 (B_h + (h-1)(p-1)(k+1)) + k` for the two components and the
    /// buffer, plus `k+1` per tail signature (at most `p-2` of them while the
    /// input stays within the estimate).
    pub fn space_bound(&self) -> u64 {
        let g = &self.env.geometry;
        let k = self.env.k as u64;
        let h = g.depth() as u64;
        let p = g.p();
        let components = 2 * (g.block_size(g.depth()) + (h - 1) * (p - 1) * (k + 1));
        let tail = (p.saturating_sub(2)).max(self.tail.len() as u64) * (k + 1);
        components + k + tail
    }

    /// Calls `f` on every stored entry: buffer mirrors, explicit entries and
    /// signature bottoms/tops.
    pub fn for_each_resident(&self, mut f: impl FnMut(&Data<P, C>)) {
        self.buffer.iter().for_each(&mut f);
        for comp in [&self.first, &self.second] {
            for list in comp.lists() {
                for s in list {
                    f(s.bottom());
                    s.top().iter().for_each(&mut f);
                }
            }
            comp.explicit().iter().for_each(&mut f);
        }
        for s in &self.tail {
            f(s.bottom());
            s.top().iter().for_each(&mut f);
        }
    }

    /// Mutable variant of [`Self::for_each_resident`], meant for fault
    /// injection in tests.
    #[doc(hidden)]
    pub fn for_each_resident_mut(&mut self, mut f: impl FnMut(&mut Data<P, C>)) {
        self.buffer.iter_mut().for_each(&mut f);
        self.first.for_each_resident_mut(&mut f);
        self.second.for_each_resident_mut(&mut f);
        for s in &mut self.tail {
            f(&mut s.bottom);
            s.top.iter_mut().for_each(&mut f);
        }
    }

    fn check_space(&self) -> Result<()> {
        if self.check_cap {
            let resident = self.resident_records();
            let bound = self.space_bound();
            if resident > bound {
                return Err(Error::SpaceCap { resident, bound });
            }
        }
        Ok(())
    }

    /// Top `want` entries of the tail, top first.
    fn tail_top(&self, want: usize, out: &mut Vec<Data<P, C>>) {
        for s in self.tail.iter().rev() {
            if out.len() >= want {
                return;
            }
            s.collect_top(want, out);
        }
    }

    /// Top `k` entries of the whole stack, top first.
    fn collect_top(&self) -> Vec<Data<P, C>> {
        let k = self.env.k;
        let mut out = Vec::with_capacity(k);
        self.first.collect_top(1, k, &mut out);
        self.second.collect_top(1, k, &mut out);
        self.tail_top(k, &mut out);
        out
    }

    /// Turns the top tail signature back into the `second` component.
    fn restore_from_tail(&mut self) -> Result<()> {
        let sig = self.tail.pop().ok_or(Error::EmptyStack)?;
        let mut floor = Vec::with_capacity(self.env.k);
        self.tail_top(self.env.k, &mut floor);
        floor.reverse();
        self.second = Component::new(self.env.geometry.depth());
        self.second.block = Some(self.env.geometry.block_start(1, sig.first_index));
        self.second
            .rebuild(sig, floor, &mut self.env, self.replay.as_ref())
    }
}

impl<P: Clone, C: Clone> Stack<P, C> for CompressedStack<P, C> {
    fn push(&mut self, d: Data<P, C>) -> Result<()> {
        if d.index() <= self.high_water {
            return Err(Error::NonMonotoneIndex {
                index: d.index(),
                previous: self.high_water,
            });
        }
        self.high_water = d.index();
        if d.index() > self.env.geometry.n_expect() {
            self.degraded = true;
        }
        let block = self.env.geometry.block_start(1, d.index());
        if self.first.block != Some(block) {
            if self.first.live() > 0 {
                if self.second.live() > 0 {
                    let sig = self.second.fold(1, &mut self.env)?;
                    self.tail.push(sig);
                }
                std::mem::swap(&mut self.first, &mut self.second);
                self.first = Component::new(self.env.geometry.depth());
            }
            self.first.block = Some(block);
        }
        self.first.push(d.clone(), 1, &mut self.env)?;
        self.buffer
            .push(d, &mut self.env.ledger, self.env.costs.data)?;
        self.live += 1;
        self.check_space()
    }

    fn pop(&mut self) -> Result<Data<P, C>> {
        if self.live == 0 {
            return Err(Error::EmptyStack);
        }
        if self.first.live() == 0 && self.second.live() == 0 {
            self.restore_from_tail()?;
        }
        let k = self.env.k;
        let d = if self.first.live() > 0 {
            let mut outer = Vec::new();
            if self.first.explicit_is_empty() {
                self.second.collect_top(1, k, &mut outer);
                self.tail_top(k, &mut outer);
                outer.reverse();
            }
            self.first
                .pop_top(1, &outer, &mut self.env, self.replay.as_ref())?
        } else {
            let mut outer = Vec::new();
            if self.second.explicit_is_empty() {
                self.tail_top(k, &mut outer);
                outer.reverse();
            }
            self.second
                .pop_top(1, &outer, &mut self.env, self.replay.as_ref())?
        };
        if let Some(mirror) = self.buffer.pop(&mut self.env.ledger, self.env.costs.data)? {
            debug_assert_eq!(mirror.index(), d.index());
        }
        self.live -= 1;
        self.check_space()?;
        Ok(d)
    }

    fn top(&mut self, j: usize) -> Result<Option<&Data<P, C>>> {
        if j == 0 {
            return Err(Error::Contract("top(0) is undefined".into()));
        }
        if j > self.env.k {
            return Err(Error::AccessDepth {
                requested: j,
                depth: self.env.k,
            });
        }
        if self.live < j as u64 {
            return Ok(None);
        }
        if self.buffer.len() < j {
            let top = self.collect_top();
            self.buffer
                .refill(top, &mut self.env.ledger, self.env.costs.data)?;
            self.check_space()?;
        }
        Ok(self.buffer.get(j))
    }

    fn len(&self) -> u64 {
        self.live
    }

    fn metrics(&self) -> StackMetrics {
        StackMetrics {
            live_bytes: self.env.ledger.live(),
            peak_bytes: self.env.ledger.peak(),
            reconstructions: self.env.reconstructions,
            degraded_estimate: self.degraded,
        }
    }
}

impl<P, C> std::fmt::Debug for CompressedStack<P, C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompressedStack")
            .field("geometry", &self.env.geometry)
            .field("k", &self.env.k)
            .field("live", &self.live)
            .field("tail", &self.tail.len())
            .field("reconstructions", &self.env.reconstructions)
            .finish()
    }
}
