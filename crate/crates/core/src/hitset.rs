//! Online hitting set for squares over a fixed point set in `[0, N)^2`.
//!
//! Each uncovered square is split into four quadrants around its point of
//! smallest level. Per quadrant, the coarsest cell with an edge inside the
//! square whose edge-closest points reach the square is activated, and all
//! of its edge-closest points join the solution. Cells are closed here, so a
//! point on a cell boundary belongs to every cell that touches it.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geom::{is_power_of_two, AxisBox, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrant {
    TR,
    TL,
    BR,
    BL,
}

pub const QUADRANTS: [Quadrant; 4] = [Quadrant::TR, Quadrant::TL, Quadrant::BR, Quadrant::BL];

impl Quadrant {
    /// True if the closed box lies in the closed quadrant with origin `q`.
    pub fn holds(&self, q: [i64; 2], b: &AxisBox) -> bool {
        let (x0, y0, x1, y1) = (b.lo()[0], b.lo()[1], b.hi()[0], b.hi()[1]);
        match self {
            Quadrant::TR => x0 >= q[0] && y0 >= q[1],
            Quadrant::TL => x1 <= q[0] && y0 >= q[1],
            Quadrant::BR => x0 >= q[0] && y1 <= q[1],
            Quadrant::BL => x1 <= q[0] && y1 <= q[1],
        }
    }

    pub fn contains(&self, q: [i64; 2], p: [i64; 2]) -> bool {
        match self {
            Quadrant::TR => p[0] >= q[0] && p[1] >= q[1],
            Quadrant::TL => p[0] <= q[0] && p[1] >= q[1],
            Quadrant::BR => p[0] >= q[0] && p[1] <= q[1],
            Quadrant::BL => p[0] <= q[0] && p[1] <= q[1],
        }
    }
}

/// Closed cell `[ix*s, (ix+1)*s] x [iy*s, (iy+1)*s]` with `s = N / 2^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub level: u32,
    pub ix: i64,
    pub iy: i64,
}

impl CellKey {
    pub fn region(&self, n: i64) -> AxisBox {
        let s = n >> self.level;
        AxisBox::square(self.ix * s, self.iy * s, s)
    }
}

/// Smallest-level grid point inside `s`, ties broken lexicographically,
/// with its level.
pub fn smallest_level_point(s: &AxisBox, n: i64) -> Result<([i64; 2], u32)> {
    if !is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    check_square(s, n)?;
    let log_n = n.trailing_zeros();
    for level in 0..=log_n {
        let step = n >> level;
        let up = |v: i64| (v + step - 1).div_euclid(step) * step;
        let (mx, my) = (up(s.lo()[0]), up(s.lo()[1]));
        if mx <= s.hi()[0] && my <= s.hi()[1] {
            return Ok(([mx, my], level));
        }
    }
    unreachable!("integral corners always contain a level-log N point")
}

fn check_square(s: &AxisBox, n: i64) -> Result<()> {
    if s.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: s.dim() });
    }
    if s.width(0) < 1 || s.width(1) < 1 {
        return Err(Error::Precondition("square side must be at least 1".into()));
    }
    if s.lo().iter().chain(s.hi()).any(|&c| c < 0 || c >= n) {
        return Err(Error::OutOfGrid(s.lo().iter().chain(s.hi()).copied().collect()));
    }
    Ok(())
}

/// Points of `pts` closest to the bottom, top, left and right edge of the
/// closed cell, ties broken lexicographically.
pub fn closest_points_to_edges(cell: &AxisBox, pts: &[[i64; 2]]) -> Option<[[i64; 2]; 4]> {
    let inside: Vec<[i64; 2]> = pts.iter().copied().filter(|p| cell.contains_closed(p)).collect();
    if inside.is_empty() {
        return None;
    }
    let (x0, y0, x1, y1) = (cell.lo()[0], cell.lo()[1], cell.hi()[0], cell.hi()[1]);
    let pick = |dist: &dyn Fn(&[i64; 2]) -> i64| *inside.iter().min_by_key(|p| (dist(p), **p)).unwrap();
    Some([pick(&|p| p[1] - y0), pick(&|p| y1 - p[1]), pick(&|p| p[0] - x0), pick(&|p| x1 - p[0])])
}

fn covers_an_edge(s: &AxisBox, cell: &AxisBox) -> bool {
    let (x0, y0, x1, y1) = (cell.lo()[0], cell.lo()[1], cell.hi()[0], cell.hi()[1]);
    let spans_x = s.lo()[0] <= x0 && x1 <= s.hi()[0];
    let spans_y = s.lo()[1] <= y0 && y1 <= s.hi()[1];
    let in_y = |y: i64| s.lo()[1] <= y && y <= s.hi()[1];
    let in_x = |x: i64| s.lo()[0] <= x && x <= s.hi()[0];
    (spans_x && (in_y(y0) || in_y(y1))) || (spans_y && (in_x(x0) || in_x(x1)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundOutcome {
    /// Indices into the point set, in the order they were added.
    pub added: Vec<usize>,
    pub activated: Vec<(CellKey, Quadrant)>,
}

#[derive(Clone, Debug)]
pub struct HitState {
    n: i64,
    points: Vec<[i64; 2]>,
    index: HashMap<[i64; 2], usize>,
    /// Per level, nonempty closed cells in row-major order with the indices
    /// of their bottom, top, left and right closest points.
    cells: Vec<Vec<(CellKey, [usize; 4])>>,
    chosen: Vec<usize>,
    chosen_set: HashSet<usize>,
    activated: HashMap<CellKey, Quadrant>,
    repeat_attempts: usize,
    squares: Vec<AxisBox>,
}

impl HitState {
    pub fn new(points: &[Point], n: i64) -> Result<Self> {
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo(n));
        }
        let mut pts: Vec<[i64; 2]> = Vec::new();
        let mut index = HashMap::new();
        for p in points {
            if p.dim() != 2 {
                return Err(Error::DimMismatch { expected: 2, got: p.dim() });
            }
            let c = [p.x(), p.y()];
            if c.iter().any(|&v| v < 0 || v >= n) {
                return Err(Error::OutOfGrid(c.to_vec()));
            }
            if let Entry::Vacant(e) = index.entry(c) {
                e.insert(pts.len());
                pts.push(c);
            }
        }
        let log_n = n.trailing_zeros();
        let mut cells = Vec::new();
        for level in 0..=log_n {
            let s = n >> level;
            let mut members: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
            for (i, p) in pts.iter().enumerate() {
                let xs = touching(p[0], s);
                let ys = touching(p[1], s);
                for &ix in xs.iter().flatten() {
                    for &iy in ys.iter().flatten() {
                        members.entry((iy, ix)).or_default().push(i);
                    }
                }
            }
            let mut row: Vec<(CellKey, [usize; 4])> = members
                .into_iter()
                .map(|((iy, ix), idx)| {
                    let key = CellKey { level, ix, iy };
                    let sub: Vec<[i64; 2]> = idx.iter().map(|&i| pts[i]).collect();
                    let best = closest_points_to_edges(&key.region(n), &sub).expect("nonempty");
                    (key, best.map(|c| index[&c]))
                })
                .collect();
            row.sort_unstable_by_key(|(k, _)| (k.iy, k.ix));
            cells.push(row);
        }
        Ok(HitState {
            n,
            points: pts,
            index,
            cells,
            chosen: Vec::new(),
            chosen_set: HashSet::new(),
            activated: HashMap::new(),
            repeat_attempts: 0,
            squares: Vec::new(),
        })
    }

    pub fn points(&self) -> &[[i64; 2]] {
        &self.points
    }

    pub fn point_index(&self, p: [i64; 2]) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn activated(&self) -> &HashMap<CellKey, Quadrant> {
        &self.activated
    }

    /// Times a cell qualified for activation a second time. The activation
    /// argument says this never happens.
    pub fn repeat_attempts(&self) -> usize {
        self.repeat_attempts
    }

    pub fn is_feasible(&self) -> bool {
        self.squares.iter().all(|s| self.hits(s))
    }

    pub fn hits(&self, s: &AxisBox) -> bool {
        self.chosen.iter().any(|&i| s.contains_closed(&self.points[i]))
    }

    pub fn insert_square(&mut self, s: &AxisBox) -> Result<RoundOutcome> {
        check_square(s, self.n)?;
        if self.hits(s) {
            self.squares.push(s.clone());
            return Ok(RoundOutcome::default());
        }
        if !self.points.iter().any(|p| s.contains_closed(p)) {
            return Err(Error::Unhittable(self.squares.len()));
        }
        let (q, _) = smallest_level_point(s, self.n)?;
        let mut out = RoundOutcome::default();
        for quad in QUADRANTS {
            if let Some((key, best)) = self.scan_quadrant(s, q, quad) {
                if self.activated.contains_key(&key) {
                    self.repeat_attempts += 1;
                    continue;
                }
                self.activated.insert(key, quad);
                out.activated.push((key, quad));
                for i in best {
                    if self.chosen_set.insert(i) {
                        self.chosen.push(i);
                        out.added.push(i);
                    }
                }
            }
        }
        self.squares.push(s.clone());
        if !self.hits(s) {
            return Err(Error::Precondition("round ended without hitting the square".into()));
        }
        Ok(out)
    }

    fn scan_quadrant(&self, s: &AxisBox, q: [i64; 2], quad: Quadrant) -> Option<(CellKey, [usize; 4])> {
        for row in &self.cells {
            for &(key, best) in row {
                let region = key.region(self.n);
                if !quad.holds(q, &region) || !covers_an_edge(s, &region) {
                    continue;
                }
                if best.iter().any(|&i| s.contains_closed(&self.points[i])) {
                    return Some((key, best));
                }
            }
        }
        None
    }
}

/// Indices of the closed cells of side `s` whose x-range holds `x`.
fn touching(x: i64, s: i64) -> [Option<i64>; 2] {
    let i = x / s;
    if x % s == 0 && i > 0 {
        [Some(i), Some(i - 1)]
    } else {
        [Some(i), None]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_level_examples() {
        assert_eq!(smallest_level_point(&AxisBox::square(0, 0, 2), 4).unwrap(), ([0, 0], 0));
        assert_eq!(smallest_level_point(&AxisBox::square(1, 1, 1), 4).unwrap(), ([2, 2], 1));
        assert!(smallest_level_point(&AxisBox::square(1, 1, 0), 4).map(|_| ()).is_err());
        assert_eq!(smallest_level_point(&AxisBox::rect(1, 1, 2, 3), 8).unwrap(), ([2, 2], 2));
    }

    #[test]
    fn closest_points_examples() {
        let c = AxisBox::square(0, 0, 4);
        assert_eq!(closest_points_to_edges(&c, &[[1, 1]]), Some([[1, 1]; 4]));
        let got = closest_points_to_edges(&c, &[[1, 3], [1, 1]]).unwrap();
        assert_eq!(got[0], [1, 1]);
        assert_eq!(got[1], [1, 3]);
        assert_eq!(got[2], [1, 1]);
        assert_eq!(got[3], [1, 1]);
        assert_eq!(closest_points_to_edges(&c, &[[5, 5]]), None);
    }

    #[test]
    fn insert_example() {
        let pts = [Point::xy(1, 1), Point::xy(2, 3)];
        let mut st = HitState::new(&pts, 4).unwrap();
        let out = st.insert_square(&AxisBox::square(0, 0, 2)).unwrap();
        assert_eq!(out.added, vec![0]);
        assert_eq!(out.activated.len(), 1);
        assert_eq!(out.activated[0].0, CellKey { level: 1, ix: 0, iy: 0 });
        let again = st.insert_square(&AxisBox::square(1, 0, 1)).unwrap();
        assert!(again.added.is_empty());
        assert!(st.insert_square(&AxisBox::square(3, 0, 0)).is_err());
        assert!(st.insert_square(&AxisBox::rect(3, 0, 3, 1)).map(|_| ()).is_err());
    }

    #[test]
    fn unhittable_rejected() {
        let mut st = HitState::new(&[Point::xy(0, 0)], 8).unwrap();
        assert_eq!(st.insert_square(&AxisBox::square(2, 2, 3)), Err(Error::Unhittable(0)));
    }

    #[test]
    fn corner_point_is_hit() {
        // The only point is the top-right corner of the square.
        let mut st = HitState::new(&[Point::xy(3, 3)], 8).unwrap();
        let out = st.insert_square(&AxisBox::square(1, 1, 2)).unwrap();
        assert_eq!(out.added, vec![0]);
        assert!(st.is_feasible());
    }
}
