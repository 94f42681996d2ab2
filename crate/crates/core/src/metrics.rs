//! Structure-level memory accounting and run metrics.
//!
//! Memory is measured by charging every stored record against a
//! [`ByteLedger`] instead of sampling the heap. Costs come from a fixed
//! [`CostTable`] derived from the in-memory size of the record types, so the
//! numbers are deterministic across runs and do not include allocator
//! overhead or spare `Vec` capacity.

use std::mem::size_of;
use std::time::Duration;

use crate::compressed::BlockSignature;
use crate::error::{Error, Result};
use crate::stack::Data;

/// Per-record byte costs for one payload/context instantiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostTable {
    /// One stored [`Data`]: payload + context + index + stream position.
    pub data: u64,
    /// Fixed part of a [`BlockSignature`], including its inline bottom entry.
    pub signature: u64,
}

impl CostTable {
    pub fn of<P, C>() -> Self {
        CostTable {
            data: size_of::<Data<P, C>>() as u64,
            signature: size_of::<BlockSignature<P, C>>() as u64,
        }
    }

    /// Cost of a signature carrying `top` extra entries.
    pub fn signature_with(&self, top: usize) -> u64 {
        self.signature + top as u64 * self.data
    }
}

/// Live/peak byte counter plus a resident-record counter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ByteLedger {
    live: u64,
    peak: u64,
    resident_records: u64,
}

impl ByteLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self, bytes: u64, records: u64) {
        self.live += bytes;
        self.resident_records += records;
        self.peak = self.peak.max(self.live);
    }

    pub fn free(&mut self, bytes: u64, records: u64) -> Result<()> {
        if bytes > self.live || records > self.resident_records {
            return Err(Error::Accounting {
                freeing: bytes,
                live: self.live,
            });
        }
        self.live -= bytes;
        self.resident_records -= records;
        Ok(())
    }

    pub fn live(&self) -> u64 {
        self.live
    }

    pub fn peak(&self) -> u64 {
        self.peak
    }

    /// Number of `Data` records currently held (explicit entries, signature
    /// bottoms and tops, buffer mirrors, replay floors).
    pub fn resident_records(&self) -> u64 {
        self.resident_records
    }
}

/// Counters owned by a stack implementation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StackMetrics {
    pub live_bytes: u64,
    pub peak_bytes: u64,
    pub reconstructions: u64,
    pub degraded_estimate: bool,
}

/// Everything a single run reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetrics {
    pub wall: Duration,
    pub peak_bytes: u64,
    pub live_bytes: u64,
    /// Block rebuilds while processing the input.
    pub reconstructions: u64,
    /// Block rebuilds caused by draining the stack for the report.
    pub report_reconstructions: u64,
    pub pushes: u64,
    pub pops: u64,
    pub degraded_estimate: bool,
    /// Stack length after the main loop, before the report drain.
    pub final_stack_len: u64,
}

impl RunMetrics {
    pub fn wall_seconds(&self) -> f64 {
        self.wall.as_secs_f64()
    }
}
