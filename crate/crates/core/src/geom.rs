//! Exact integer points and axis-aligned boxes in any fixed dimension.
//!
//! Input sets are closed boxes. Tree cells use the half-open convention.

use crate::error::{Error, Result};

/// Largest absolute coordinate accepted at construction. Leaves headroom for
/// the scalings and shifts applied by the transforms.
pub const COORD_LIMIT: i64 = 1 << 40;

fn check_coord(c: i64) -> Result<i64> {
    if c.abs() > COORD_LIMIT {
        Err(Error::CoordRange(c))
    } else {
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<i64>,
}

impl Point {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDim);
        }
        for &c in &coords {
            check_coord(c)?;
        }
        Ok(Point { coords })
    }

    pub fn xy(x: i64, y: i64) -> Self {
        Point { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }

    pub fn x(&self) -> i64 {
        self.coords[0]
    }

    pub fn y(&self) -> i64 {
        self.coords[1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bounds {
    Closed,
    HalfOpen,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl AxisBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::ZeroDim);
        }
        if lo.len() != hi.len() {
            return Err(Error::DimMismatch { expected: lo.len(), got: hi.len() });
        }
        for axis in 0..lo.len() {
            check_coord(lo[axis])?;
            check_coord(hi[axis])?;
            if lo[axis] > hi[axis] {
                return Err(Error::InvalidBox { axis });
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// Crate-internal constructor for boxes already known to be valid.
    pub(crate) fn from_parts(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        debug_assert!(lo.len() == hi.len() && lo.iter().zip(&hi).all(|(a, b)| a <= b));
        AxisBox { lo, hi }
    }

    pub fn rect(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "invalid rectangle");
        AxisBox { lo: vec![x0, y0], hi: vec![x1, y1] }
    }

    /// Square with lower-left corner `(x, y)` and side `side`.
    pub fn square(x: i64, y: i64, side: i64) -> Self {
        Self::rect(x, y, x + side, y + side)
    }

    pub fn interval(a: i64, b: i64) -> Self {
        assert!(a <= b, "invalid interval");
        AxisBox { lo: vec![a], hi: vec![b] }
    }

    /// The cube `[lo, lo+side]` in every axis of `lo`.
    pub fn cube(lo: &[i64], side: i64) -> Self {
        AxisBox { lo: lo.to_vec(), hi: lo.iter().map(|c| c + side).collect() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn width(&self, axis: usize) -> i64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn max_width(&self) -> i64 {
        (0..self.dim()).map(|a| self.width(a)).max().unwrap_or(0)
    }

    pub fn min_width(&self) -> i64 {
        (0..self.dim()).map(|a| self.width(a)).min().unwrap_or(0)
    }

    /// Product of side lengths, saturating on overflow.
    pub fn volume(&self) -> i128 {
        (0..self.dim()).map(|a| self.width(a) as i128).product()
    }

    pub fn contains(&self, p: &Point, bounds: Bounds) -> Result<bool> {
        if p.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: p.dim() });
        }
        Ok(match bounds {
            Bounds::Closed => self.contains_closed(p.coords()),
            Bounds::HalfOpen => self.contains_half_open(p.coords()),
        })
    }

    pub fn contains_closed(&self, p: &[i64]) -> bool {
        debug_assert_eq!(p.len(), self.dim());
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&c, (&l, &h))| l <= c && c <= h)
    }

    pub fn contains_half_open(&self, p: &[i64]) -> bool {
        debug_assert_eq!(p.len(), self.dim());
        p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&c, (&l, &h))| l <= c && c < h)
    }

    /// True if `other` lies inside `self` (both closed).
    pub fn contains_box(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    pub fn intersect(&self, other: &AxisBox) -> Result<Option<AxisBox>> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.intersect_unchecked(other))
    }

    pub(crate) fn intersect_unchecked(&self, other: &AxisBox) -> Option<AxisBox> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let l = self.lo[a].max(other.lo[a]);
            let h = self.hi[a].min(other.hi[a]);
            if l > h {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(AxisBox { lo, hi })
    }

    /// Area of the closed intersection, zero when disjoint or degenerate.
    pub fn overlap_volume(&self, other: &AxisBox) -> i128 {
        self.intersect_unchecked(other).map_or(0, |b| b.volume())
    }

    pub fn project(&self, keep: &[usize]) -> Result<AxisBox> {
        let keep = check_keep(keep, self.dim())?;
        Ok(AxisBox {
            lo: keep.iter().map(|&a| self.lo[a]).collect(),
            hi: keep.iter().map(|&a| self.hi[a]).collect(),
        })
    }

    pub fn corners(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d).map(|a| if mask >> a & 1 == 1 { self.hi[a] } else { self.lo[a] }).collect()
            })
            .collect()
    }
}

impl Point {
    pub fn project(&self, keep: &[usize]) -> Result<Point> {
        let keep = check_keep(keep, self.dim())?;
        Ok(Point { coords: keep.iter().map(|&a| self.coords[a]).collect() })
    }
}

/// Validates a set of kept axes and returns it sorted and deduplicated.
fn check_keep(keep: &[usize], dim: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptyDims);
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if let Some(&bad) = k.iter().find(|&&a| a >= dim) {
        return Err(Error::BadAxis(bad));
    }
    Ok(k)
}

/// Sorted distinct coordinates of one axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankMap {
    coords: Vec<i64>,
}

impl RankMap {
    pub fn from_coords(mut coords: Vec<i64>) -> Self {
        coords.sort_unstable();
        coords.dedup();
        RankMap { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Rank of an exact coordinate.
    pub fn rank(&self, x: i64) -> Option<i64> {
        self.coords.binary_search(&x).ok().map(|r| r as i64)
    }

    /// Position on the doubled rank grid: `2r` for the coordinate of rank `r`,
    /// `2r+1` strictly between ranks `r` and `r+1`, `-1` below all and
    /// `2len-1` above all coordinates.
    pub fn doubled(&self, x: i64) -> i64 {
        match self.coords.binary_search(&x) {
            Ok(r) => 2 * r as i64,
            Err(r) => 2 * r as i64 - 1,
        }
    }

    /// Rank range of the coordinates inside `[a, b]`, if any.
    pub fn snap_interval(&self, a: i64, b: i64) -> Option<(i64, i64)> {
        let lo = self.coords.partition_point(|&c| c < a);
        let hi = self.coords.partition_point(|&c| c <= b);
        if lo < hi {
            Some((lo as i64, hi as i64 - 1))
        } else {
            None
        }
    }
}

/// Per-axis rank maps produced by [`rank_space_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSpace {
    pub axes: Vec<RankMap>,
}

impl RankSpace {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn reduce_box(&self, b: &AxisBox) -> Option<AxisBox> {
        let mut lo = Vec::with_capacity(b.dim());
        let mut hi = Vec::with_capacity(b.dim());
        for (a, m) in self.axes.iter().enumerate() {
            lo.push(m.rank(b.lo()[a])?);
            hi.push(m.rank(b.hi()[a])?);
        }
        Some(AxisBox { lo, hi })
    }

    /// Box endpoints on the doubled rank grid.
    pub fn reduce_box_doubled(&self, b: &AxisBox) -> AxisBox {
        let lo = self.axes.iter().enumerate().map(|(a, m)| m.doubled(b.lo()[a])).collect();
        let hi = self.axes.iter().enumerate().map(|(a, m)| m.doubled(b.hi()[a])).collect();
        AxisBox { lo, hi }
    }

    /// A point on the doubled rank grid. Containment in any box whose corners
    /// are rank coordinates is preserved.
    pub fn reduce_point_doubled(&self, p: &[i64]) -> Vec<i64> {
        self.axes.iter().zip(p).map(|(m, &x)| m.doubled(x)).collect()
    }

    /// Snaps a box to the rank range of coordinates it spans on every axis.
    pub fn snap_box(&self, b: &AxisBox) -> Option<AxisBox> {
        let mut lo = Vec::with_capacity(b.dim());
        let mut hi = Vec::with_capacity(b.dim());
        for (a, m) in self.axes.iter().enumerate() {
            let (l, h) = m.snap_interval(b.lo()[a], b.hi()[a])?;
            lo.push(l);
            hi.push(h);
        }
        Some(AxisBox { lo, hi })
    }
}

/// Replaces each endpoint coordinate by its rank among all endpoints of
/// the same axis.
pub fn rank_space_reduce(boxes: &[AxisBox]) -> Result<(Vec<AxisBox>, RankSpace)> {
    let Some(first) = boxes.first() else {
        return Err(Error::Precondition("rank space reduction needs at least one box".into()));
    };
    let d = first.dim();
    if let Some(b) = boxes.iter().find(|b| b.dim() != d) {
        return Err(Error::DimMismatch { expected: d, got: b.dim() });
    }
    let axes: Vec<RankMap> = (0..d)
        .map(|a| RankMap::from_coords(boxes.iter().flat_map(|b| [b.lo[a], b.hi[a]]).collect()))
        .collect();
    let space = RankSpace { axes };
    let reduced = boxes
        .iter()
        .map(|b| space.reduce_box(b).expect("endpoint present in its own rank map"))
        .collect();
    Ok((reduced, space))
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceMeta {
    pub n_side: i64,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub w_max: f64,
    /// Translation applied per axis after the cube transform.
    pub shift: i64,
}

impl InstanceMeta {
    pub fn new(n_side: i64, m: usize, n: usize, d: usize, w_max: f64) -> Result<Self> {
        if n_side < 1 || n_side & (n_side - 1) != 0 {
            return Err(Error::NotPowerOfTwo(n_side));
        }
        if d == 0 {
            return Err(Error::ZeroDim);
        }
        if w_max.is_nan() || w_max < 1.0 {
            return Err(Error::WeightBelowOne(w_max));
        }
        Ok(InstanceMeta { n_side, m, n, d, w_max, shift: 0 })
    }
}

pub fn is_power_of_two(n: i64) -> bool {
    n >= 1 && n & (n - 1) == 0
}

pub fn log2_exact(n: i64) -> u32 {
    debug_assert!(is_power_of_two(n));
    n.trailing_zeros()
}
