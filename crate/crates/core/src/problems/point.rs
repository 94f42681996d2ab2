use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Signed;

/// Scalar usable as a planar coordinate.
pub trait Coordinate:
    Copy + PartialOrd + Signed + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Cross products whose magnitude is at most this value count as zero.
    /// `scale` is the sum of the magnitudes of the two products being
    /// compared. Exact types return zero.
    fn collinear_tolerance(scale: Self) -> Self;
}

impl Coordinate for f64 {
    fn collinear_tolerance(scale: Self) -> Self {
        scale * 1e-12
    }
}

impl Coordinate for f32 {
    fn collinear_tolerance(scale: Self) -> Self {
        scale * 1e-6
    }
}

impl Coordinate for i32 {
    fn collinear_tolerance(_: Self) -> Self {
        0
    }
}

impl Coordinate for i64 {
    fn collinear_tolerance(_: Self) -> Self {
        0
    }
}

impl Coordinate for Rational64 {
    fn collinear_tolerance(_: Self) -> Self {
        Rational64::from_integer(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2D<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2D { x, y }
    }
}

impl<T: Display> Display for Point2D<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl<T: Coordinate> FromStr for Point2D<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
        let coord = |t: &str| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("bad coordinate `{}`", t.trim()))
        };
        Ok(Point2D::new(coord(x)?, coord(y)?))
    }
}

/// Sign of the turn `a -> b -> c`: `1` for counter-clockwise (left),
/// `-1` for clockwise (right), `0` for collinear.
///
/// Computed as the sign of `(b - a) x (c - b)`. Integer coordinates must be
/// small enough for the products not to overflow (about 2^31 for `i64`).
pub fn orientation<T: Coordinate>(a: Point2D<T>, b: Point2D<T>, c: Point2D<T>) -> i8 {
    let l = (b.x - a.x) * (c.y - b.y);
    let r = (b.y - a.y) * (c.x - b.x);
    let cross = l - r;
    let tol = T::collinear_tolerance(l.abs() + r.abs());
    if cross > tol {
        1
    } else if cross < -tol {
        -1
    } else {
        0
    }
}
