//! One detailed level-1 block: per-level signature lists plus the explicit
//! entries of the active deepest block.

use super::signature::BlockSignature;
use super::{Env, Replay};
use crate::error::{Error, Result};
use crate::metrics::StackMetrics;
use crate::stack::{Data, Stack};

/// Stack order inside a component, bottom to top, is
/// `lists[level 2] ++ lists[level 3] ++ ... ++ lists[level h] ++ explicit`:
/// the list for level `l` holds finished level-`l` blocks of the active
/// level-`(l-1)` block, and `explicit` holds the active level-`h` block.
#[derive(Debug, Clone)]
pub(crate) struct Component<P, C> {
    /// Start offset of the level-1 block this component covers.
    pub(crate) block: Option<u64>,
    lists: Vec<Vec<BlockSignature<P, C>>>,
    explicit: Vec<Data<P, C>>,
    live: u64,
}

impl<P: Clone, C: Clone> Component<P, C> {
    pub(crate) fn new(depth: usize) -> Self {
        Component {
            block: None,
            lists: (2..=depth).map(|_| Vec::new()).collect(),
            explicit: Vec::new(),
            live: 0,
        }
    }

    fn depth(&self) -> usize {
        self.lists.len() + 1
    }

    fn list(&self, level: usize) -> &Vec<BlockSignature<P, C>> {
        &self.lists[level - 2]
    }

    pub(crate) fn live(&self) -> u64 {
        self.live
    }

    pub(crate) fn explicit(&self) -> &[Data<P, C>] {
        &self.explicit
    }

    pub(crate) fn explicit_is_empty(&self) -> bool {
        self.explicit.is_empty()
    }

    /// Signature lists, shallowest level first.
    pub(crate) fn lists(&self) -> impl Iterator<Item = &Vec<BlockSignature<P, C>>> {
        self.lists.iter()
    }

    pub(crate) fn for_each_resident_mut(&mut self, f: &mut dyn FnMut(&mut Data<P, C>)) {
        for list in &mut self.lists {
            for s in list {
                f(&mut s.bottom);
                s.top.iter_mut().for_each(&mut *f);
            }
        }
        self.explicit.iter_mut().for_each(f);
    }

    /// Topmost survivor stored below `from_level` (i.e. at levels deeper than
    /// it), with the level holding it; `depth + 1` stands for `explicit`.
    fn top_above(&self, from_level: usize) -> Option<(u64, usize)> {
        if let Some(d) = self.explicit.last() {
            return Some((d.index(), self.depth() + 1));
        }
        (from_level + 1..=self.depth())
            .rev()
            .find_map(|l| self.list(l).last().map(|s| (s.last_index, l)))
    }

    fn is_empty_above(&self, from_level: usize) -> bool {
        self.top_above(from_level).is_none()
    }

    fn len_above(&self, from_level: usize) -> u64 {
        let listed: u64 = (from_level + 1..=self.depth())
            .flat_map(|l| self.list(l).iter())
            .map(|s| s.len)
            .sum();
        listed + self.explicit.len() as u64
    }

    /// Appends the highest survivors at levels deeper than `from_level`, top
    /// first, until `out` holds `want` entries.
    pub(crate) fn collect_top(&self, from_level: usize, want: usize, out: &mut Vec<Data<P, C>>) {
        for d in self.explicit.iter().rev() {
            if out.len() >= want {
                return;
            }
            out.push(d.clone());
        }
        for l in (from_level + 1..=self.depth()).rev() {
            for s in self.list(l).iter().rev() {
                if out.len() >= want {
                    return;
                }
                s.collect_top(want, out);
            }
        }
    }

    /// Pushes `d`, first folding every finished block that `d` leaves
    /// behind. Only levels deeper than `from_level` are touched.
    pub(crate) fn push(&mut self, d: Data<P, C>, from_level: usize, env: &mut Env) -> Result<()> {
        if let Some((t, t_level)) = self.top_above(from_level) {
            if d.index() <= t {
                return Err(Error::NonMonotoneIndex {
                    index: d.index(),
                    previous: t,
                });
            }
            // content at level i is non-empty exactly for i < t_level
            let split = (from_level + 1..t_level).find(|&i| {
                env.geometry.block_start(i, t) != env.geometry.block_start(i, d.index())
            });
            if let Some(level) = split {
                let sig = self.fold(level, env)?;
                self.lists[level - 2].push(sig);
            }
        }
        self.explicit.push(d);
        env.ledger.alloc(env.costs.data, 1);
        self.live += 1;
        Ok(())
    }

    /// Replaces everything inside the active level-`level` block (lists of
    /// deeper levels plus `explicit`) by one signature. Live count is
    /// unchanged.
    pub(crate) fn fold(&mut self, level: usize, env: &mut Env) -> Result<BlockSignature<P, C>> {
        let depth = self.depth();
        let (last_index, _) = self
            .top_above(level)
            .ok_or_else(|| Error::Contract(format!("fold of empty level {level}")))?;
        let (first_index, bottom) = (level + 1..=depth)
            .find_map(|l| {
                self.list(l)
                    .first()
                    .map(|s| (s.first_index, s.bottom.clone()))
            })
            .or_else(|| self.explicit.first().map(|d| (d.index(), d.clone())))
            .expect("non-empty content has a bottom");
        let len = self.len_above(level);

        let mut top = Vec::with_capacity(env.k + 1);
        self.collect_top(level, env.k + 1, &mut top);
        top.retain(|d| d.index() != first_index);
        top.truncate(env.k);
        top.reverse();

        for l in level + 1..=depth {
            for s in self.lists[l - 2].drain(..) {
                env.ledger
                    .free(env.costs.signature_with(s.top.len()), s.records())?;
            }
        }
        let n = self.explicit.len() as u64;
        self.explicit.clear();
        env.ledger.free(n * env.costs.data, n)?;

        let sig = BlockSignature {
            level,
            first_index,
            last_index,
            len,
            bottom,
            top,
        };
        env.ledger
            .alloc(env.costs.signature_with(sig.top.len()), sig.records());
        Ok(sig)
    }

    /// Removes and returns the top survivor at levels deeper than
    /// `from_level`, rebuilding folded blocks as needed. `outer` holds the
    /// entries right below this region, bottom to top (at least `k` of them
    /// when that many exist).
    pub(crate) fn pop_top(
        &mut self,
        from_level: usize,
        outer: &[Data<P, C>],
        env: &mut Env,
        replay: &dyn Replay<P, C>,
    ) -> Result<Data<P, C>> {
        loop {
            if let Some(d) = self.explicit.pop() {
                env.ledger.free(env.costs.data, 1)?;
                self.live -= 1;
                return Ok(d);
            }
            let level = (from_level + 1..=self.depth())
                .rev()
                .find(|&l| !self.list(l).is_empty())
                .ok_or(Error::EmptyStack)?;
            let sig = self.lists[level - 2].pop().expect("non-empty list");
            self.live -= sig.len;
            let floor = self.floor(from_level, outer, env.k);
            self.rebuild(sig, floor, env, replay)?;
        }
    }

    /// Top `k` entries of this region followed by `outer`, bottom to top.
    fn floor(&self, from_level: usize, outer: &[Data<P, C>], k: usize) -> Vec<Data<P, C>> {
        let mut v = Vec::with_capacity(k);
        self.collect_top(from_level, k, &mut v);
        for d in outer.iter().rev() {
            if v.len() >= k {
                break;
            }
            v.push(d.clone());
        }
        v.reverse();
        v
    }

    /// Re-runs the algorithm over the signature's input range, re-folding
    /// the survivors into the levels deeper than the signature's own. The
    /// caller has already removed `sig` from its list and its count from
    /// `live`.
    pub(crate) fn rebuild(
        &mut self,
        sig: BlockSignature<P, C>,
        floor: Vec<Data<P, C>>,
        env: &mut Env,
        replay: &dyn Replay<P, C>,
    ) -> Result<()> {
        debug_assert!(self.is_empty_above(sig.level));
        let floor_records = floor.len() as u64;
        env.ledger
            .alloc(floor_records * env.costs.data, floor_records);
        let before = self.live;
        {
            let mut view = RebuildView {
                comp: self,
                from_level: sig.level,
                range: (sig.first_index, sig.last_index),
                floor: &floor,
                env: &mut *env,
                replay,
                probe: Vec::new(),
            };
            replay.replay(&sig.bottom, sig.last_index, &mut view)?;
        }
        let rebuilt_top = self.top_above(sig.level).map(|(t, _)| t);
        if rebuilt_top != Some(sig.last_index) || self.live - before != sig.len {
            return Err(Error::DeterminismViolation {
                first: sig.first_index,
                last: sig.last_index,
                reason: format!(
                    "replay left top {:?} and {} survivors, signature recorded {} and {}",
                    rebuilt_top,
                    self.live - before,
                    sig.last_index,
                    sig.len
                ),
            });
        }
        env.ledger
            .free(floor_records * env.costs.data, floor_records)?;
        env.ledger
            .free(env.costs.signature_with(sig.top.len()), sig.records())?;
        env.reconstructions += 1;
        Ok(())
    }
}

/// The stack as seen by a replay: a read-only floor under the region being
/// rebuilt.
struct RebuildView<'a, P, C> {
    comp: &'a mut Component<P, C>,
    from_level: usize,
    range: (u64, u64),
    floor: &'a [Data<P, C>],
    env: &'a mut Env,
    replay: &'a dyn Replay<P, C>,
    probe: Vec<Data<P, C>>,
}

impl<P: Clone, C: Clone> Stack<P, C> for RebuildView<'_, P, C> {
    fn push(&mut self, d: Data<P, C>) -> Result<()> {
        if d.index() < self.range.0 || d.index() > self.range.1 {
            return Err(Error::DeterminismViolation {
                first: self.range.0,
                last: self.range.1,
                reason: format!("replay pushed index {} outside the block", d.index()),
            });
        }
        self.comp.push(d, self.from_level, self.env)
    }

    fn pop(&mut self) -> Result<Data<P, C>> {
        if self.comp.is_empty_above(self.from_level) {
            return Err(Error::DeterminismViolation {
                first: self.range.0,
                last: self.range.1,
                reason: "replay popped below the block bottom".into(),
            });
        }
        self.comp
            .pop_top(self.from_level, self.floor, self.env, self.replay)
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
        let n = self.comp.explicit.len();
        if j <= n {
            return Ok(Some(&self.comp.explicit[n - j]));
        }
        self.probe.clear();
        self.comp.collect_top(self.from_level, j, &mut self.probe);
        for d in self.floor.iter().rev() {
            if self.probe.len() >= j {
                break;
            }
            self.probe.push(d.clone());
        }
        Ok(self.probe.get(j - 1))
    }

    fn len(&self) -> u64 {
        self.comp.len_above(self.from_level) + self.floor.len() as u64
    }

    fn is_empty(&self) -> bool {
        self.floor.is_empty() && self.comp.is_empty_above(self.from_level)
    }

    fn metrics(&self) -> StackMetrics {
        StackMetrics::default()
    }
}
