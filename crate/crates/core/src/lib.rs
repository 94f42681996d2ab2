//! Compressed stacks for stack algorithms.
//!
//! A stack algorithm scans its input once, popping and pushing elements
//! according to conditions on the top few entries. [`CompressedStack`]
//! stores such a stack in space sublinear in the input size by
//! summarizing finished input blocks into constant-size signatures, and
//! rebuilds a block on demand by replaying the algorithm over that stretch
//! of input. [`ClassicStack`] is the plain reference implementation.
//!
//! ```
//! use std::sync::Arc;
//! use compressed_stack::{MemorySource, Runner, TestRun};
//!
//! let input = Arc::new(MemorySource::new("5,0\n7,0\n3,1\n9,2\n"));
//! let mut run = Runner::compressed(Arc::new(TestRun), input, None, 2, None).unwrap();
//! let mut out = Vec::new();
//! run.run(&mut out).unwrap();
//! assert_eq!(out, b"9\n");
//! ```

pub mod algo;
pub mod bench;
pub mod compressed;
mod error;
pub mod generators;
pub mod metrics;
pub mod partition;
pub mod problems;
pub mod stack;

pub use algo::{
    run_checked, AlgorithmReplay, CheckOutcome, CheckedStack, Divergence, FileSource, HookEvent,
    LineCursor, LineSource, MemorySource, Runner, StackAlgorithm,
};
pub use compressed::{BlockSignature, CompressedStack, NoReplay, Replay, TopBuffer};
pub use error::{Error, Result};
pub use metrics::{ByteLedger, CostTable, RunMetrics, StackMetrics};
pub use partition::PartitionGeometry;
pub use problems::{
    orientation, Coordinate, Point2D, TestRun, TestRunContext, TestRunItem, UpperHull,
};
pub use stack::{ClassicStack, Data, Stack, StackView};

pub type Point2F64 = Point2D<f64>;
pub type Point2F32 = Point2D<f32>;
pub type Point2I64 = Point2D<i64>;
pub type Point2Rational = Point2D<num_rational::Rational64>;
pub type UpperHullF64 = UpperHull<f64>;
pub type UpperHullF32 = UpperHull<f32>;
pub type UpperHullI64 = UpperHull<i64>;
pub type UpperHullRational = UpperHull<num_rational::Rational64>;
