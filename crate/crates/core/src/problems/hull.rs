use std::marker::PhantomData;

use super::point::{orientation, Coordinate, Point2D};
use crate::algo::StackAlgorithm;
use crate::error::{Error, Result};
use crate::stack::{Data, StackView};

/// Upper convex hull of points given in strictly increasing `x` order
/// (Andrew's monotone chain). Collinear middle points are kept.
///
/// The report drains the hull right to left.
#[derive(Debug, Clone, Copy)]
pub struct UpperHull<T> {
    _scalar: PhantomData<fn() -> T>,
}

impl<T> Default for UpperHull<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> UpperHull<T> {
    pub fn new() -> Self {
        UpperHull {
            _scalar: PhantomData,
        }
    }
}

impl<T: Coordinate> StackAlgorithm for UpperHull<T> {
    type Payload = Point2D<T>;
    type Context = ();

    fn access_depth(&self) -> usize {
        2
    }

    fn preload(&self) -> usize {
        2
    }

    fn initial_context(&self) {}

    fn read_input(&self, line: &str, _: &mut ()) -> std::result::Result<Point2D<T>, String> {
        line.parse()
    }

    fn pop_condition(
        &self,
        a: &Point2D<T>,
        _: &(),
        stack: &mut StackView<'_, Point2D<T>, ()>,
    ) -> Result<bool> {
        let t1 = match stack.top(1)? {
            Some(d) => *d.payload(),
            None => return Ok(false),
        };
        if t1.x.partial_cmp(&a.x) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Contract(format!(
                "points must have strictly increasing x: {a} after {t1}"
            )));
        }
        let t2 = match stack.top(2)? {
            Some(d) => *d.payload(),
            None => return Ok(false),
        };
        Ok(orientation(t2, t1, *a) == 1)
    }

    fn format_record(&self, d: &Data<Point2D<T>, ()>) -> String {
        d.payload().to_string()
    }
}
