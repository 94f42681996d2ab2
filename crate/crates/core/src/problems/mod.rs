//! Concrete stack algorithms.

mod hull;
mod point;
mod testrun;

pub use hull::UpperHull;
pub use point::{orientation, Coordinate, Point2D};
pub use testrun::{TestRun, TestRunContext, TestRunItem};
