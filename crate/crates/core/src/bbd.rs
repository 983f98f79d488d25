//! Balanced box-decomposition tree over a fixed candidate point set and the
//! online set cover for squares that runs on it.
//!
//! Cells are an outer box minus an optional inner box. Both boxes are
//! half-open for membership, so cells at the same depth are disjoint. All
//! boxes are dyadic sub-boxes of a power-of-two root square, which makes
//! every inner box sticky and keeps aspect ratios at 1 or 2.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point};
use crate::quadtree::Edge;

/// Hard cap on the squares one call of [`bbd_select_for_cell`] may pick:
/// 4 edge squares, 6 crossing squares for the outer box, 4 side regions
/// with at most 3+1 crossing squares each, and 4 corner regions.
pub const K_CELL: usize = 4 + 6 + 4 * (3 + 1) + 4;

/// Ratio constant used when comparing against the optimum: every optimal
/// square has 4 corners, each corner lies in one cell per depth, each such
/// cell has 2 children that may be explored, and an explored cell picks at
/// most `K_CELL + 1` squares for one point.
pub const C_BBD: usize = 4 * 2 * (K_CELL + 1);

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Upper bound on the tree depth enforced at build time.
pub fn depth_guard(n: usize) -> usize {
    8 * ceil_log2(n) + 8
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbdCell {
    pub outer: AxisBox,
    pub inner: Option<AxisBox>,
    pub depth: usize,
}

impl BbdCell {
    pub fn contains(&self, p: &[i64]) -> bool {
        self.outer.contains_half_open(p) && !self.inner.as_ref().is_some_and(|i| i.contains_half_open(p))
    }

    pub fn aspect_ratio_ok(&self, max: i64) -> bool {
        let b = &self.outer;
        b.max_width() <= max * b.min_width()
    }

    /// Per axis, the inner box touches the outer boundary or keeps a gap of
    /// at least its own width.
    pub fn is_sticky(&self) -> bool {
        let Some(i) = &self.inner else { return true };
        let o = &self.outer;
        (0..2).all(|a| {
            let w = i.width(a);
            let lo_gap = i.lo()[a] - o.lo()[a];
            let hi_gap = o.hi()[a] - i.hi()[a];
            lo_gap >= 0 && hi_gap >= 0 && (lo_gap == 0 || lo_gap >= w) && (hi_gap == 0 || hi_gap >= w)
        })
    }
}

#[derive(Clone, Debug)]
pub struct BbdNode {
    pub cell: BbdCell,
    pub children: Option<[usize; 2]>,
    pub parent: Option<usize>,
    /// Index into the point set for a leaf holding one point.
    pub point: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct BbdTree {
    pub nodes: Vec<BbdNode>,
    pub points: Vec<Point>,
    pub side: i64,
    index: HashMap<Vec<i64>, usize>,
}

/// Splits a dyadic box across the midpoint of its longest side, preferring
/// the x axis on ties.
fn halves(b: &AxisBox) -> (AxisBox, AxisBox) {
    let axis = if b.width(0) >= b.width(1) { 0 } else { 1 };
    let mid = b.lo()[axis] + b.width(axis) / 2;
    let mut hi1 = b.hi().to_vec();
    hi1[axis] = mid;
    let mut lo2 = b.lo().to_vec();
    lo2[axis] = mid;
    (AxisBox::from_parts(b.lo().to_vec(), hi1), AxisBox::from_parts(lo2, b.hi().to_vec()))
}

/// Child cell `h` minus `inner`, rewritten as a plain box when the inner box
/// is exactly one half of `h`.
fn holed(h: AxisBox, inner: AxisBox) -> (AxisBox, Option<AxisBox>) {
    let (g1, g2) = halves(&h);
    if g1 == inner {
        (g2, None)
    } else if g2 == inner {
        (g1, None)
    } else {
        (h, Some(inner))
    }
}

fn count_in(pts: &[usize], all: &[Point], b: &AxisBox, hole: Option<&AxisBox>) -> usize {
    pts.iter()
        .filter(|&&i| {
            let c = all[i].coords();
            b.contains_half_open(c) && !hole.is_some_and(|h| h.contains_half_open(c))
        })
        .count()
}

enum Plan {
    Leaf,
    Split([(AxisBox, Option<AxisBox>); 2]),
}

fn plan(outer: &AxisBox, inner: Option<&AxisBox>, pts: &[usize], all: &[Point]) -> Plan {
    let k = pts.len();
    if k <= 1 {
        return Plan::Leaf;
    }
    let heavy = |c: usize| 3 * c > 2 * k;
    let (h1, h2) = halves(outer);
    match inner {
        None => {
            let c1 = count_in(pts, all, &h1, None);
            let c2 = k - c1;
            if !heavy(c1) && !heavy(c2) {
                return Plan::Split([(h1, None), (h2, None)]);
            }
            let first = if heavy(c1) { h1.clone() } else { h2.clone() };
            let mut b = first.clone();
            loop {
                let (g1, g2) = halves(&b);
                let g = if count_in(pts, all, &g1, None) >= count_in(pts, all, &g2, None) { g1 } else { g2 };
                if heavy(count_in(pts, all, &g, None)) {
                    b = g;
                } else {
                    break;
                }
            }
            if b == first {
                Plan::Split([(h1, None), (h2, None)])
            } else {
                Plan::Split([(b.clone(), None), (outer.clone(), Some(b))])
            }
        }
        Some(hole) => {
            let (ha, hb) = if h1.contains_box(hole) { (h1, h2) } else { (h2, h1) };
            let ca = count_in(pts, all, &ha, Some(hole));
            let split = [holed(ha.clone(), hole.clone()), (hb, None)];
            if !heavy(ca) {
                return Plan::Split(split);
            }
            let mut b = ha.clone();
            loop {
                let (g1, g2) = halves(&b);
                let g = if g1.contains_box(hole) { g1 } else { g2 };
                if g == *hole || !heavy(count_in(pts, all, &g, Some(hole))) {
                    break;
                }
                b = g;
            }
            if b == ha {
                Plan::Split(split)
            } else {
                Plan::Split([holed(b.clone(), hole.clone()), (outer.clone(), Some(b))])
            }
        }
    }
}

pub fn build_bbd(points: &[Point]) -> Result<BbdTree> {
    if points.is_empty() {
        return Err(Error::Precondition("BBD-tree needs at least one point".into()));
    }
    let mut index = HashMap::new();
    let mut max_c = 0;
    for (i, p) in points.iter().enumerate() {
        if p.dim() != 2 {
            return Err(Error::DimMismatch { expected: 2, got: p.dim() });
        }
        if p.x() < 0 || p.y() < 0 {
            return Err(Error::OutOfGrid(p.coords().to_vec()));
        }
        max_c = max_c.max(p.x()).max(p.y());
        if index.insert(p.coords().to_vec(), i).is_some() {
            return Err(Error::DuplicatePoint(p.coords().to_vec()));
        }
    }
    let mut side = 1i64;
    while side <= max_c {
        side *= 2;
    }
    let mut nodes = vec![BbdNode {
        cell: BbdCell { outer: AxisBox::square(0, 0, side), inner: None, depth: 0 },
        children: None,
        parent: None,
        point: None,
    }];
    let mut stack = vec![(0usize, (0..points.len()).collect::<Vec<_>>())];
    let mut max_depth = 0;
    while let Some((id, pts)) = stack.pop() {
        let cell = nodes[id].cell.clone();
        max_depth = max_depth.max(cell.depth);
        match plan(&cell.outer, cell.inner.as_ref(), &pts, points) {
            Plan::Leaf => nodes[id].point = pts.first().copied(),
            Plan::Split(kids) => {
                let mut ids = [0; 2];
                let mut rest = pts;
                for (slot, (outer, inner)) in kids.into_iter().enumerate() {
                    let child = BbdCell { outer, inner, depth: cell.depth + 1 };
                    let (mine, other): (Vec<usize>, Vec<usize>) =
                        rest.into_iter().partition(|&i| child.contains(points[i].coords()));
                    rest = other;
                    ids[slot] = nodes.len();
                    nodes.push(BbdNode { cell: child, children: None, parent: Some(id), point: None });
                    stack.push((ids[slot], mine));
                }
                debug_assert!(rest.is_empty(), "children must partition the cell");
                nodes[id].children = Some(ids);
            }
        }
    }
    let guard = depth_guard(points.len());
    if max_depth + 1 > guard {
        return Err(Error::Precondition(format!("BBD-tree depth {max_depth} exceeds guard {guard}")));
    }
    Ok(BbdTree { nodes, points: points.to_vec(), side, index })
}

impl BbdTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn point_index(&self, p: &[i64]) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Nodes whose cells contain `p`, root first.
    pub fn path(&self, p: &[i64]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.root();
        if !self.nodes[cur].cell.contains(p) {
            return out;
        }
        loop {
            out.push(cur);
            let Some(kids) = self.nodes[cur].children else { break };
            match kids.iter().find(|&&k| self.nodes[k].cell.contains(p)) {
                Some(&k) => cur = k,
                None => break,
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.cell.depth).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    /// Squares meeting both horizontal edges of the region.
    Vertical,
    /// Squares meeting both vertical edges of the region.
    Horizontal,
}

fn rotate_point(p: [i64; 2]) -> [i64; 2] {
    [-p[1], p[0]]
}

fn rotate_box(b: &AxisBox) -> AxisBox {
    AxisBox::rect(-b.hi()[1], b.lo()[0], -b.lo()[1], b.hi()[0])
}

fn crosses_vertically(c: &AxisBox, r: &AxisBox) -> bool {
    c.lo()[1] <= r.lo()[1] && c.hi()[1] >= r.hi()[1] && c.lo()[0] <= r.hi()[0] && c.hi()[0] >= r.lo()[0]
}

pub fn crosses(c: &AxisBox, r: &AxisBox, dir: Crossing) -> bool {
    match dir {
        Crossing::Vertical => crosses_vertically(c, r),
        Crossing::Horizontal => crosses_vertically(&rotate_box(c), &rotate_box(r)),
    }
}

/// The `B` with `w/h <= B` for vertical crossing (`h/w` for horizontal).
pub fn crossing_bound(r: &AxisBox, dir: Crossing) -> i64 {
    let (w, h) = match dir {
        Crossing::Vertical => (r.width(0), r.width(1)),
        Crossing::Horizontal => (r.width(1), r.width(0)),
    };
    (w + h - 1) / h.max(1)
}

/// Greedy cover of `points` by squares crossing `region`: take the leftmost
/// uncovered point and pick the crossing square containing it with the
/// rightmost right edge.
pub fn greedy_crossing(
    region: &AxisBox,
    points: &[[i64; 2]],
    candidates: &[(usize, &AxisBox)],
    dir: Crossing,
) -> Result<Vec<usize>> {
    let (r, cands, mut pts): (AxisBox, Vec<(usize, AxisBox)>, Vec<[i64; 2]>) = match dir {
        Crossing::Vertical => {
            (region.clone(), candidates.iter().map(|&(i, b)| (i, b.clone())).collect(), points.to_vec())
        }
        Crossing::Horizontal => (
            rotate_box(region),
            candidates.iter().map(|&(i, b)| (i, rotate_box(b))).collect(),
            points.iter().map(|&p| rotate_point(p)).collect(),
        ),
    };
    let cands: Vec<(usize, AxisBox)> = cands.into_iter().filter(|(_, c)| crosses_vertically(c, &r)).collect();
    pts.sort_unstable();
    pts.dedup();
    let mut covered = vec![false; pts.len()];
    let mut picked = Vec::new();
    for i in 0..pts.len() {
        if covered[i] {
            continue;
        }
        let pivot = pts[i];
        let best = cands
            .iter()
            .filter(|(_, c)| c.contains_closed(&pivot))
            .min_by_key(|(id, c)| (std::cmp::Reverse(c.hi()[0]), *id));
        let Some((id, sq)) = best else {
            return Err(Error::Precondition(format!("pivot {pivot:?} has no crossing square")));
        };
        picked.push(*id);
        for (j, q) in pts.iter().enumerate().skip(i) {
            if sq.contains_closed(q) {
                covered[j] = true;
            }
        }
    }
    Ok(picked)
}

fn closed_edge(b: &AxisBox, e: Edge) -> AxisBox {
    let (x0, y0, x1, y1) = (b.lo()[0], b.lo()[1], b.hi()[0], b.hi()[1]);
    match e {
        Edge::Bottom => AxisBox::rect(x0, y0, x1, y0),
        Edge::Top => AxisBox::rect(x0, y1, x1, y1),
        Edge::Left => AxisBox::rect(x0, y0, x0, y1),
        Edge::Right => AxisBox::rect(x1, y0, x1, y1),
    }
}

fn max_area_for_box(b: &AxisBox, e: Edge, squares: &[AxisBox]) -> Option<usize> {
    let edge = closed_edge(b, e);
    let mut best: Option<(i128, usize)> = None;
    for (id, s) in squares.iter().enumerate() {
        if s.contains_box(&edge) {
            let a = s.overlap_volume(b);
            if best.is_none_or(|(ba, _)| a > ba) {
                best = Some((a, id));
            }
        }
    }
    best.map(|(_, id)| id)
}

/// One pass of the per-region greedy: feeds it the uncovered points inside
/// `region` that some crossing square can take.
fn greedy_pass(
    region: &AxisBox,
    dir: Crossing,
    squares: &[AxisBox],
    remaining: &mut Vec<[i64; 2]>,
    picks: &mut Vec<usize>,
) {
    if region.width(0) == 0 || region.width(1) == 0 {
        return;
    }
    let cands: Vec<(usize, &AxisBox)> =
        squares.iter().enumerate().filter(|(_, s)| crosses(s, region, dir)).collect();
    let pts: Vec<[i64; 2]> = remaining
        .iter()
        .copied()
        .filter(|p| region.contains_closed(p) && cands.iter().any(|(_, s)| s.contains_closed(p)))
        .collect();
    if pts.is_empty() {
        return;
    }
    let got = greedy_crossing(region, &pts, &cands, dir).expect("points filtered to crossable ones");
    for id in got {
        push_unique(picks, id);
        remaining.retain(|p| !squares[id].contains_closed(p));
    }
}

fn push_unique(v: &mut Vec<usize>, id: usize) {
    if !v.contains(&id) {
        v.push(id);
    }
}

/// Squares picked for one cell: maximal edge squares of the outer box,
/// crossing squares for the outer box in both orientations and, with an
/// inner box, crossing squares for the four side regions and one enclosing
/// square per corner region.
pub fn bbd_select_for_cell(
    cell: &BbdCell,
    squares: &[AxisBox],
    uncovered: &[[i64; 2]],
    already: &[usize],
) -> Vec<usize> {
    let o = &cell.outer;
    let mut picks = Vec::new();
    for e in [Edge::Bottom, Edge::Top, Edge::Left, Edge::Right] {
        if let Some(id) = max_area_for_box(o, e, squares) {
            push_unique(&mut picks, id);
        }
    }
    let mut remaining: Vec<[i64; 2]> = uncovered
        .iter()
        .copied()
        .filter(|p| !already.iter().chain(&picks).any(|&s| squares[s].contains_closed(p)))
        .collect();
    greedy_pass(o, Crossing::Vertical, squares, &mut remaining, &mut picks);
    greedy_pass(o, Crossing::Horizontal, squares, &mut remaining, &mut picks);
    if let Some(i) = &cell.inner {
        let xs = [o.lo()[0], i.lo()[0], i.hi()[0], o.hi()[0]];
        let ys = [o.lo()[1], i.lo()[1], i.hi()[1], o.hi()[1]];
        let region = |cx: usize, cy: usize| AxisBox::rect(xs[cx], ys[cy], xs[cx + 1], ys[cy + 1]);
        greedy_pass(&region(1, 0), Crossing::Vertical, squares, &mut remaining, &mut picks);
        greedy_pass(&region(1, 2), Crossing::Vertical, squares, &mut remaining, &mut picks);
        greedy_pass(&region(0, 1), Crossing::Horizontal, squares, &mut remaining, &mut picks);
        greedy_pass(&region(2, 1), Crossing::Horizontal, squares, &mut remaining, &mut picks);
        for (cx, cy) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
            let r = region(cx, cy);
            if r.width(0) == 0 || r.width(1) == 0 {
                continue;
            }
            let found = squares
                .iter()
                .position(|s| s.contains_box(&r) && s.corners().iter().any(|c| i.contains_closed(c)));
            if let Some(id) = found {
                push_unique(&mut picks, id);
            }
        }
    }
    assert!(picks.len() <= K_CELL, "cell selection exceeded K_CELL: {}", picks.len());
    picks
}

/// Online cover state over a fixed BBD-tree.
#[derive(Clone, Debug)]
pub struct BbdCoverState {
    tree: BbdTree,
    squares: Vec<AxisBox>,
    explored: HashMap<usize, Vec<usize>>,
    chosen: Vec<usize>,
    chosen_set: HashSet<usize>,
    inserted: Vec<usize>,
}

impl BbdCoverState {
    pub fn new(tree: BbdTree, squares: Vec<AxisBox>) -> Result<Self> {
        if let Some(s) = squares.iter().find(|s| s.dim() != 2) {
            return Err(Error::DimMismatch { expected: 2, got: s.dim() });
        }
        Ok(BbdCoverState {
            tree,
            squares,
            explored: HashMap::new(),
            chosen: Vec::new(),
            chosen_set: HashSet::new(),
            inserted: Vec::new(),
        })
    }

    pub fn tree(&self) -> &BbdTree {
        &self.tree
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn is_chosen(&self, id: usize) -> bool {
        self.chosen_set.contains(&id)
    }

    pub fn is_feasible(&self) -> bool {
        self.inserted.iter().all(|&i| {
            let p = self.tree.points[i].coords();
            self.chosen.iter().any(|&s| self.squares[s].contains_closed(p))
        })
    }

    /// Square fixed in advance for the leaf holding point `idx`.
    fn leaf_square(&self, idx: usize) -> Option<usize> {
        let p = self.tree.points[idx].coords();
        self.squares.iter().position(|s| s.contains_closed(p))
    }

    pub fn insert(&mut self, p: &Point) -> Result<Vec<usize>> {
        let idx = self.tree.point_index(p.coords()).ok_or_else(|| Error::NotCandidate(p.coords().to_vec()))?;
        let leaf_sq = self.leaf_square(idx).ok_or_else(|| Error::Uncoverable(p.coords().to_vec()))?;
        let c = [p.x(), p.y()];
        let covers = |ids: &[usize], sq: &[AxisBox]| ids.iter().any(|&s| sq[s].contains_closed(&c));
        let mut added = Vec::new();
        let mut above: Vec<usize> = Vec::new();
        for node in self.tree.path(&c) {
            if covers(&above, &self.squares) {
                break;
            }
            let mut own = self.explored.get(&node).cloned().unwrap_or_default();
            if !covers(&own, &self.squares) {
                if self.tree.nodes[node].children.is_none() {
                    push_unique(&mut own, leaf_sq);
                } else {
                    let mut ctx = above.clone();
                    ctx.extend_from_slice(&own);
                    for id in bbd_select_for_cell(&self.tree.nodes[node].cell, &self.squares, &[c], &ctx) {
                        push_unique(&mut own, id);
                    }
                }
                for &id in &own {
                    if self.chosen_set.insert(id) {
                        self.chosen.push(id);
                        added.push(id);
                    }
                }
            }
            above.extend_from_slice(&own);
            self.explored.insert(node, own);
        }
        if !self.inserted.contains(&idx) {
            self.inserted.push(idx);
        }
        Ok(added)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_tree_is_a_leaf() {
        let t = build_bbd(&[Point::xy(3, 5)]).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!(t.nodes[0].cell.inner.is_none());
        assert_eq!(t.nodes[0].point, Some(0));
    }

    #[test]
    fn duplicates_rejected() {
        let e = build_bbd(&[Point::xy(1, 1), Point::xy(1, 1)]);
        assert_eq!(e.unwrap_err(), Error::DuplicatePoint(vec![1, 1]));
    }

    #[test]
    fn clustered_points_use_shrink() {
        let mut pts: Vec<Point> = (0..6).map(|i| Point::xy(1000 + i, 1000 + 2 * i)).collect();
        pts.push(Point::xy(0, 0));
        pts.push(Point::xy(4000, 10));
        let t = build_bbd(&pts).unwrap();
        assert!(t.nodes.iter().any(|n| n.cell.inner.is_some()));
        for n in &t.nodes {
            assert!(n.cell.aspect_ratio_ok(3));
            assert!(n.cell.is_sticky());
        }
        assert!(t.depth() < depth_guard(pts.len()));
    }

    #[test]
    fn greedy_example() {
        let r = AxisBox::rect(0, 0, 6, 2);
        let v1 = AxisBox::rect(0, -2, 3, 4);
        let v2 = AxisBox::rect(2, -1, 6, 5);
        let got = greedy_crossing(&r, &[[1, 1], [4, 1]], &[(1, &v1), (2, &v2)], Crossing::Vertical).unwrap();
        assert_eq!(got, vec![1, 2]);
        assert_eq!(crossing_bound(&r, Crossing::Vertical), 3);
        assert!(greedy_crossing(&r, &[], &[(1, &v1)], Crossing::Vertical).unwrap().is_empty());
        let big = AxisBox::rect(-1, -1, 7, 7);
        let got = greedy_crossing(&r, &[[1, 1], [4, 1], [5, 0]], &[(0, &big), (1, &v1)], Crossing::Vertical);
        assert_eq!(got.unwrap(), vec![0]);
        let miss = greedy_crossing(&r, &[[5, 1]], &[(1, &v1)], Crossing::Vertical);
        assert!(matches!(miss, Err(Error::Precondition(_))));
    }

    #[test]
    fn greedy_horizontal_by_rotation() {
        let r = AxisBox::rect(0, 0, 2, 6);
        let h1 = AxisBox::rect(-2, 0, 4, 3);
        let h2 = AxisBox::rect(-1, 2, 5, 6);
        let got = greedy_crossing(&r, &[[1, 1], [1, 4]], &[(1, &h1), (2, &h2)], Crossing::Horizontal).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(crossing_bound(&r, Crossing::Horizontal), 3);
    }

    #[test]
    fn select_without_inner_is_small() {
        let cell = BbdCell { outer: AxisBox::rect(0, 0, 8, 4), inner: None, depth: 1 };
        let sq = vec![AxisBox::square(-1, -1, 10), AxisBox::square(2, -3, 9)];
        let got = bbd_select_for_cell(&cell, &sq, &[[1, 1], [5, 2]], &[]);
        assert!(!got.is_empty() && got.len() <= 4);
        for p in [[1, 1], [5, 2]] {
            assert!(got.iter().any(|&s| sq[s].contains_closed(&p)));
        }
    }

    #[test]
    fn singleton_candidate_set_picks_leaf_square() {
        let t = build_bbd(&[Point::xy(2, 2)]).unwrap();
        let sq = vec![AxisBox::square(10, 10, 1), AxisBox::square(1, 1, 2), AxisBox::square(0, 0, 8)];
        let mut st = BbdCoverState::new(t, sq).unwrap();
        assert_eq!(st.insert(&Point::xy(2, 2)).unwrap(), vec![1]);
        assert!(st.insert(&Point::xy(3, 3)).is_err());
    }
}
