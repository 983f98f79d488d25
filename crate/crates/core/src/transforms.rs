//! Instance transformations: hyperrectangles to hypercubes in twice the
//! dimension, the point/rectangle duality used for hitting set, and weight
//! rounding to powers of two.

use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeRecord {
    pub cube: AxisBox,
    pub source_id: usize,
    pub delta: i64,
}

/// Maps `[a, b]` in `R^d` to the cube of side `max_j (b_j - a_j)` whose
/// top-right corner is `(-a_1..-a_d, b_1..b_d)`.
///
/// A point `p` lies in the rectangle iff `point_to_dualpoint(p)` lies in
/// the cube.
pub fn rect_to_cube(rect: &AxisBox, source_id: usize) -> CubeRecord {
    let delta = rect.max_width();
    let d = rect.dim();
    let mut hi = Vec::with_capacity(2 * d);
    hi.extend(rect.lo().iter().map(|a| -a));
    hi.extend_from_slice(rect.hi());
    let lo = hi.iter().map(|c| c - delta).collect();
    CubeRecord { cube: AxisBox::from_parts(lo, hi), source_id, delta }
}

/// `p -> (-p, p)`.
pub fn point_to_dualpoint(p: &[i64]) -> Vec<i64> {
    p.iter().map(|c| -c).chain(p.iter().copied()).collect()
}

pub fn shift_box(b: &AxisBox, s: i64) -> AxisBox {
    AxisBox::from_parts(b.lo().iter().map(|c| c + s).collect(), b.hi().iter().map(|c| c + s).collect())
}

pub fn shift_point(p: &[i64], s: i64) -> Vec<i64> {
    p.iter().map(|c| c + s).collect()
}

/// Translation that moves every cube built from rectangles inside
/// `[0, r]^d` into the nonnegative orthant.
pub fn cube_shift(r: i64) -> i64 {
    2 * r
}

/// Cube of side `n` with lower-left corner `(-p, p)`.
pub fn hs_point_to_cube(p: &Point, n: i64) -> Result<AxisBox> {
    if p.coords().iter().any(|&c| c < 0 || c > n) {
        return Err(Error::OutOfGrid(p.coords().to_vec()));
    }
    let lo = point_to_dualpoint(p.coords());
    Ok(AxisBox::cube(&lo, n))
}

/// `[a, b] -> (-a, b)`, the dual point of a rectangle.
pub fn hs_rect_to_point(rect: &AxisBox) -> Vec<i64> {
    rect.lo().iter().map(|c| -c).chain(rect.hi().iter().copied()).collect()
}

/// Smallest power of two that is at least `w`.
pub fn round_weight(w: f64) -> Result<u64> {
    if w.is_nan() || w < 1.0 {
        return Err(Error::WeightBelowOne(w));
    }
    let mut p: u64 = 1;
    while (p as f64) < w {
        p = p.checked_mul(2).ok_or(Error::Precondition(format!("weight {w} too large")))?;
    }
    Ok(p)
}

/// Number of distinct rounded weights for weights in `[1, w_max]`.
pub fn weight_class_count(w_max: f64) -> Result<u32> {
    Ok(round_weight(w_max)?.trailing_zeros() + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSet {
    pub rect: AxisBox,
    pub weight: f64,
    pub rounded_weight: u64,
    pub id: usize,
}

impl WeightedSet {
    pub fn new(rect: AxisBox, weight: f64, id: usize) -> Result<Self> {
        Ok(WeightedSet { rect, weight, rounded_weight: round_weight(weight)?, id })
    }
}
