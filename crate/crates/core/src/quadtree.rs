//! Quad-tree over `[0, N)^2`, the monotone offline cover and its online
//! wrapper for set cover with squares.
//!
//! A square picked at a cell only counts as covering points inside that
//! cell's subtree. Because a cell's picks depend only on whether it is
//! explored, adding a point never removes a square from the output.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadCell {
    pub x: i64,
    pub y: i64,
    pub side: i64,
    pub level: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    Bottom,
    Top,
    Left,
    Right,
}

pub const EDGES: [Edge; 4] = [Edge::Bottom, Edge::Top, Edge::Left, Edge::Right];

impl QuadCell {
    pub fn is_leaf(&self) -> bool {
        self.side == 1
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.x <= p[0] && p[0] < self.x + self.side && self.y <= p[1] && p[1] < self.y + self.side
    }

    /// Closure of the cell as a closed box.
    pub fn closure(&self) -> AxisBox {
        AxisBox::square(self.x, self.y, self.side)
    }

    /// Children in the order lower-left, upper-left, lower-right, upper-right.
    pub fn children(&self) -> [QuadCell; 4] {
        let h = self.side / 2;
        let l = self.level + 1;
        [
            QuadCell { x: self.x, y: self.y, side: h, level: l },
            QuadCell { x: self.x, y: self.y + h, side: h, level: l },
            QuadCell { x: self.x + h, y: self.y, side: h, level: l },
            QuadCell { x: self.x + h, y: self.y + h, side: h, level: l },
        ]
    }

    pub fn child_containing(&self, p: &[i64]) -> QuadCell {
        let h = self.side / 2;
        let cx = if p[0] >= self.x + h { self.x + h } else { self.x };
        let cy = if p[1] >= self.y + h { self.y + h } else { self.y };
        QuadCell { x: cx, y: cy, side: h, level: self.level + 1 }
    }

    /// The closed edge segment as a degenerate box.
    pub fn edge(&self, e: Edge) -> AxisBox {
        let (x0, y0, x1, y1) = (self.x, self.y, self.x + self.side, self.y + self.side);
        match e {
            Edge::Bottom => AxisBox::rect(x0, y0, x1, y0),
            Edge::Top => AxisBox::rect(x0, y1, x1, y1),
            Edge::Left => AxisBox::rect(x0, y0, x0, y1),
            Edge::Right => AxisBox::rect(x1, y0, x1, y1),
        }
    }
}

/// Lazy quad-tree handle: cells are computed on demand from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadTree {
    pub n: i64,
    pub depth: u32,
}

pub fn build_quadtree(n: i64) -> Result<QuadTree> {
    if !crate::geom::is_power_of_two(n) {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(QuadTree { n, depth: n.trailing_zeros() })
}

impl QuadTree {
    pub fn root(&self) -> QuadCell {
        QuadCell { x: 0, y: 0, side: self.n, level: 0 }
    }

    /// Node count of the fully expanded tree.
    pub fn full_node_count(&self) -> u128 {
        (0..=self.depth).map(|l| 1u128 << (2 * l)).sum()
    }

    /// Cells containing `p` from the root down to the leaf.
    pub fn path(&self, p: &[i64]) -> Vec<QuadCell> {
        let mut out = Vec::with_capacity(self.depth as usize + 1);
        let mut c = self.root();
        out.push(c);
        while !c.is_leaf() {
            c = c.child_containing(p);
            out.push(c);
        }
        out
    }

    pub fn in_grid(&self, p: &[i64]) -> bool {
        self.root().contains(p)
    }
}

/// Among candidates that contain the whole closed edge, the one with the
/// largest intersection with the cell; ties go to the smallest id.
pub fn max_area_covering<'a, I>(cell: &QuadCell, edge: Edge, candidates: I) -> Option<usize>
where
    I: IntoIterator<Item = (usize, &'a AxisBox)>,
{
    let e = cell.edge(edge);
    let closure = cell.closure();
    let mut best: Option<(i128, usize)> = None;
    for (id, s) in candidates {
        if !s.contains_box(&e) {
            continue;
        }
        let area = s.overlap_volume(&closure);
        match best {
            Some((a, bid)) if a > area || (a == area && bid < id) => {}
            _ => best = Some((area, id)),
        }
    }
    best.map(|(_, id)| id)
}

/// Edge picks of a cell in edge order, without duplicates.
fn edge_picks(cell: &QuadCell, squares: &[AxisBox]) -> Vec<usize> {
    let mut out = Vec::with_capacity(4);
    for e in EDGES {
        if let Some(id) = max_area_covering(cell, e, squares.iter().enumerate()) {
            if !out.contains(&id) {
                out.push(id);
            }
        }
    }
    out
}

fn smallest_covering(p: &[i64], squares: &[AxisBox]) -> Option<usize> {
    squares.iter().position(|s| s.contains_closed(p))
}

fn check_squares(squares: &[AxisBox]) -> Result<()> {
    match squares.iter().find(|s| s.dim() != 2) {
        Some(s) => Err(Error::DimMismatch { expected: 2, got: s.dim() }),
        None => Ok(()),
    }
}

fn check_point(tree: &QuadTree, p: &Point, squares: &[AxisBox]) -> Result<()> {
    if p.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: p.dim() });
    }
    if !tree.in_grid(p.coords()) {
        return Err(Error::OutOfGrid(p.coords().to_vec()));
    }
    if smallest_covering(p.coords(), squares).is_none() {
        return Err(Error::Uncoverable(p.coords().to_vec()));
    }
    Ok(())
}

/// Offline cover of `points` by breadth-first traversal. Returns the picked
/// square ids in the order they were selected.
pub fn offline_cover(points: &[Point], squares: &[AxisBox], n: i64) -> Result<Vec<usize>> {
    let tree = build_quadtree(n)?;
    check_squares(squares)?;
    for p in points {
        check_point(&tree, p, squares)?;
    }
    let mut chosen = Vec::new();
    let mut seen = HashSet::new();
    let mut pts: Vec<&[i64]> = points.iter().map(|p| p.coords()).collect();
    pts.sort_unstable();
    pts.dedup();
    // (cell, points inside, squares picked at strict ancestors)
    let mut queue = VecDeque::from([(tree.root(), pts, Vec::<usize>::new())]);
    while let Some((cell, inside, above)) = queue.pop_front() {
        let uncovered = inside.iter().any(|p| !above.iter().any(|&s| squares[s].contains_closed(p)));
        if !uncovered {
            continue;
        }
        let mut here = above.clone();
        for id in edge_picks(&cell, squares) {
            if seen.insert(id) {
                chosen.push(id);
            }
            here.push(id);
        }
        if cell.is_leaf() {
            for p in &inside {
                if !here.iter().any(|&s| squares[s].contains_closed(p)) {
                    let id = smallest_covering(p, squares).expect("checked coverable");
                    if seen.insert(id) {
                        chosen.push(id);
                    }
                }
            }
            continue;
        }
        for child in cell.children() {
            let sub: Vec<&[i64]> = inside.iter().copied().filter(|p| child.contains(p)).collect();
            if !sub.is_empty() {
                queue.push_back((child, sub, here.clone()));
            }
        }
    }
    Ok(chosen)
}

/// Online state: the explored cells, the picks made at each, and the
/// squares chosen so far.
#[derive(Clone, Debug)]
pub struct CoverState {
    tree: QuadTree,
    squares: Vec<AxisBox>,
    explored: HashMap<QuadCell, Vec<usize>>,
    chosen: Vec<usize>,
    chosen_set: HashSet<usize>,
    points: Vec<Point>,
}

impl CoverState {
    pub fn new(squares: Vec<AxisBox>, n: i64) -> Result<Self> {
        let tree = build_quadtree(n)?;
        check_squares(&squares)?;
        Ok(CoverState {
            tree,
            squares,
            explored: HashMap::new(),
            chosen: Vec::new(),
            chosen_set: HashSet::new(),
            points: Vec::new(),
        })
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn squares(&self) -> &[AxisBox] {
        &self.squares
    }

    pub fn tree(&self) -> QuadTree {
        self.tree
    }

    pub fn explored_cells(&self) -> usize {
        self.explored.len()
    }

    pub fn is_chosen(&self, id: usize) -> bool {
        self.chosen_set.contains(&id)
    }

    pub fn is_feasible(&self) -> bool {
        self.points.iter().all(|p| self.chosen.iter().any(|&s| self.squares[s].contains_closed(p.coords())))
    }

    fn pick(&mut self, id: usize, added: &mut Vec<usize>) {
        if self.chosen_set.insert(id) {
            self.chosen.push(id);
            added.push(id);
        }
    }

    /// Inserts `p` and returns the squares that the offline cover of the
    /// enlarged point set has in addition to the current one.
    pub fn online_insert(&mut self, p: Point) -> Result<Vec<usize>> {
        check_point(&self.tree, &p, &self.squares)?;
        let mut added = Vec::new();
        let mut above: Vec<usize> = Vec::new();
        for cell in self.tree.path(p.coords()) {
            if let Some(picks) = self.explored.get(&cell) {
                above.extend_from_slice(picks);
                continue;
            }
            // The cell was unexplored, so every earlier point inside it is
            // covered by the picks above; only p can change that.
            if above.iter().any(|&s| self.squares[s].contains_closed(p.coords())) {
                break;
            }
            let mut picks = edge_picks(&cell, &self.squares);
            if cell.is_leaf() && !picks.iter().any(|&s| self.squares[s].contains_closed(p.coords())) {
                picks.push(smallest_covering(p.coords(), &self.squares).expect("checked coverable"));
            }
            for &id in &picks {
                self.pick(id, &mut added);
            }
            above.extend_from_slice(&picks);
            self.explored.insert(cell, picks);
        }
        self.points.push(p);
        Ok(added)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_shapes() {
        let t = build_quadtree(1).unwrap();
        assert!(t.root().is_leaf());
        assert_eq!(t.depth, 0);
        let t = build_quadtree(4).unwrap();
        assert_eq!(t.depth, 2);
        assert_eq!(t.full_node_count(), 21);
        let t = build_quadtree(1024).unwrap();
        assert_eq!(t.depth, 10);
        assert_eq!(t.path(&[5, 900]).len(), 11);
        assert_eq!(build_quadtree(6), Err(Error::NotPowerOfTwo(6)));
    }

    #[test]
    fn max_area_example() {
        let cell = QuadCell { x: 0, y: 0, side: 2, level: 1 };
        let sa = AxisBox::rect(0, 0, 4, 1);
        let sb = AxisBox::rect(-1, 0, 3, 2);
        assert_eq!(max_area_covering(&cell, Edge::Bottom, [(0, &sa), (1, &sb)]), Some(1));
        assert_eq!(max_area_covering(&cell, Edge::Top, [(0, &sa)]), None);
        let sc = AxisBox::rect(-1, -1, 3, 1);
        let sd = AxisBox::rect(-2, -1, 2, 1);
        assert_eq!(max_area_covering(&cell, Edge::Bottom, [(5, &sc), (3, &sd)]), Some(3));
    }

    #[test]
    fn offline_examples() {
        let s = vec![AxisBox::square(0, 0, 4)];
        assert_eq!(offline_cover(&[], &s, 4).unwrap(), Vec::<usize>::new());
        let p = [Point::xy(1, 1), Point::xy(3, 2)];
        assert_eq!(offline_cover(&p, &s, 4).unwrap(), vec![0]);
        let far = [Point::xy(3, 3)];
        let small = vec![AxisBox::square(0, 0, 1)];
        assert_eq!(offline_cover(&far, &small, 4), Err(Error::Uncoverable(vec![3, 3])));
    }

    #[test]
    fn leaf_fallback_picks_covering_square() {
        // Only a unit square around (2,2) covers it; no cell edge above the
        // leaf is covered by it.
        let s = vec![AxisBox::rect(2, 2, 2, 2)];
        let got = offline_cover(&[Point::xy(2, 2)], &s, 4).unwrap();
        assert_eq!(got, vec![0]);
    }

    #[test]
    fn online_matches_offline_singleton_and_repeat() {
        let s = vec![AxisBox::square(0, 0, 2), AxisBox::square(1, 1, 3), AxisBox::square(2, 0, 2)];
        let mut st = CoverState::new(s.clone(), 4).unwrap();
        let p = Point::xy(3, 1);
        let added = st.online_insert(p.clone()).unwrap();
        let mut off = offline_cover(std::slice::from_ref(&p), &s, 4).unwrap();
        let mut a = added.clone();
        a.sort();
        off.sort();
        assert_eq!(a, off);
        assert!(st.online_insert(p).unwrap().is_empty());
        assert!(st.is_feasible());
    }
}
