use std::collections::VecDeque;

use crate::error::Result;
use crate::metrics::ByteLedger;
use crate::stack::Data;

/// Mirror of the top `k` stack entries, bottom to top. Always a suffix of
/// the live stack; may hold fewer than `k` entries after pops.
#[derive(Debug, Clone)]
pub struct TopBuffer<P, C> {
    entries: VecDeque<Data<P, C>>,
    k: usize,
}

impl<P, C> TopBuffer<P, C> {
    pub fn new(k: usize) -> Self {
        TopBuffer {
            entries: VecDeque::with_capacity(k),
            k,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    /// j-th from the top, 1-based.
    pub fn get(&self, j: usize) -> Option<&Data<P, C>> {
        self.entries.len().checked_sub(j).map(|i| &self.entries[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Data<P, C>> {
        self.entries.iter()
    }

    pub(crate) fn iter_mut(&mut self) -> impl Iterator<Item = &mut Data<P, C>> {
        self.entries.iter_mut()
    }

    pub(crate) fn push(&mut self, d: Data<P, C>, ledger: &mut ByteLedger, cost: u64) -> Result<()> {
        if self.k == 0 {
            return Ok(());
        }
        self.entries.push_back(d);
        ledger.alloc(cost, 1);
        if self.entries.len() > self.k {
            self.entries.pop_front();
            ledger.free(cost, 1)?;
        }
        Ok(())
    }

    /// Drops the top mirror entry, if any.
    pub(crate) fn pop(&mut self, ledger: &mut ByteLedger, cost: u64) -> Result<Option<Data<P, C>>> {
        match self.entries.pop_back() {
            Some(d) => {
                ledger.free(cost, 1)?;
                Ok(Some(d))
            }
            None => Ok(None),
        }
    }

    /// Replaces the content with `top_down` (top entry first).
    pub(crate) fn refill(
        &mut self,
        top_down: Vec<Data<P, C>>,
        ledger: &mut ByteLedger,
        cost: u64,
    ) -> Result<()> {
        let old = self.entries.len() as u64;
        ledger.free(old * cost, old)?;
        self.entries.clear();
        for d in top_down.into_iter().take(self.k).rev() {
            self.entries.push_back(d);
        }
        let new = self.entries.len() as u64;
        ledger.alloc(new * cost, new);
        Ok(())
    }
}
