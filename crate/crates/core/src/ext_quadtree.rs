//! Extended quad-tree over `D`-dimensional cubes and the bounded-frequency
//! family of clipped cubes it induces.
//!
//! Coordinates are perturbed before building: a cube `[a, b]` becomes
//! `[2a, 2b + 2]` and a point `p` becomes `2p + 1`. Cube faces and cell
//! walls are then even while points are odd, so no point ever sits on a
//! wall and containment of integer points is unchanged.
//!
//! A cell is subdivided while some cube has a corner strictly inside it.
//! At each node `v` and axis `i`, the cubes that are `i`-long at `v` get a
//! secondary structure over the remaining axes, rooted at the projection of
//! `C_v`. One-dimensional structures keep, per node, the assigned interval
//! with maximum overlap on each side of the cell.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::geom::AxisBox;
use crate::transforms::CubeRecord;

type NodeKey = (u32, Vec<i64>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatSet {
    pub id: usize,
    /// Closed integer box in the input coordinates.
    pub region: AxisBox,
    /// Index of the source cube in the build list.
    pub source: usize,
    pub source_id: usize,
    /// Chain of primary cells the region was clipped to.
    pub origin_cell: AxisBox,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreqMetrics {
    pub max_frequency: usize,
    pub max_decomposition: usize,
    pub construction_time: Duration,
    /// Frequency to number of probe points with that frequency.
    pub histogram: BTreeMap<usize, usize>,
    pub long_incidences: usize,
}

#[derive(Clone, Debug)]
struct IBox {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IBox {
    fn to_raw(&self) -> AxisBox {
        AxisBox::from_parts(self.lo.iter().map(|c| c / 2).collect(), self.hi.iter().map(|c| c / 2 - 1).collect())
    }
}

#[derive(Clone, Debug, Default)]
struct Slots {
    assigned: Vec<usize>,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Clone, Debug)]
enum Body {
    Multi(HashMap<(NodeKey, usize), Level>),
    Base(HashMap<NodeKey, Slots>),
}

#[derive(Clone, Debug)]
struct Level {
    axes: Vec<usize>,
    root_lo: Vec<i64>,
    root_side: i64,
    internal: HashSet<NodeKey>,
    body: Body,
}

struct Ctx<'a> {
    cubes: &'a [IBox],
    records: &'a [CubeRecord],
    hats: Vec<HatSet>,
    by_region: HashMap<(Vec<i64>, Vec<i64>), usize>,
    long_incidences: usize,
}

impl Ctx<'_> {
    fn emit(&mut self, cube: usize, clip: &IBox) -> usize {
        let c = &self.cubes[cube];
        let lo: Vec<i64> = c.lo.iter().zip(&clip.lo).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = c.hi.iter().zip(&clip.hi).map(|(a, b)| *a.min(b)).collect();
        let key = (lo.clone(), hi.clone());
        let sid = self.records[cube].source_id;
        if let Some(&h) = self.by_region.get(&key) {
            let hat = &mut self.hats[h];
            if (sid, cube) < (hat.source_id, hat.source) {
                hat.source = cube;
                hat.source_id = sid;
            }
            return h;
        }
        let id = self.hats.len();
        self.hats.push(HatSet {
            id,
            region: IBox { lo, hi }.to_raw(),
            source: cube,
            source_id: sid,
            origin_cell: clip.to_raw(),
        });
        self.by_region.insert(key, id);
        id
    }
}

impl Level {
    fn side(&self, depth: u32) -> i64 {
        self.root_side >> depth
    }

    fn is_leaf(&self, key: &NodeKey) -> bool {
        self.side(key.0) <= 2 || !self.internal.contains(key)
    }

    fn root_key(&self) -> NodeKey {
        (0, self.root_lo.clone())
    }

    fn children_overlapping(&self, key: &NodeKey, c: &IBox) -> Vec<NodeKey> {
        let half = self.side(key.0) / 2;
        let mut out = vec![Vec::with_capacity(self.axes.len())];
        for (k, &ax) in self.axes.iter().enumerate() {
            let mut next = Vec::new();
            for start in [key.1[k], key.1[k] + half] {
                if c.lo[ax] < start + half && c.hi[ax] > start {
                    for v in &out {
                        let mut v: Vec<i64> = v.clone();
                        v.push(start);
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out.into_iter().map(|lo| (key.0 + 1, lo)).collect()
    }

    fn child_containing(&self, key: &NodeKey, q: &[i64]) -> NodeKey {
        let half = self.side(key.0) / 2;
        let lo = self
            .axes
            .iter()
            .enumerate()
            .map(|(k, &ax)| if q[ax] >= key.1[k] + half { key.1[k] + half } else { key.1[k] })
            .collect();
        (key.0 + 1, lo)
    }

    fn contains(&self, key: &NodeKey, q: &[i64]) -> bool {
        let s = self.side(key.0);
        self.axes.iter().enumerate().all(|(k, &ax)| key.1[k] <= q[ax] && q[ax] < key.1[k] + s)
    }

    fn build_internal(&mut self, cubes: &[IBox], members: &[usize]) {
        let corner_inside = |c: &IBox, lo: &[i64], s: i64| {
            self.axes.iter().enumerate().all(|(k, &ax)| {
                let (l, h) = (lo[k], lo[k] + s);
                (c.lo[ax] > l && c.lo[ax] < h) || (c.hi[ax] > l && c.hi[ax] < h)
            })
        };
        let mut internal = HashSet::new();
        let mut stack = vec![(self.root_key(), members.to_vec())];
        let k = self.axes.len();
        while let Some((key, cand)) = stack.pop() {
            let s = self.side(key.0);
            if s <= 2 {
                continue;
            }
            let inside: Vec<usize> = cand.into_iter().filter(|&i| corner_inside(&cubes[i], &key.1, s)).collect();
            if inside.is_empty() {
                continue;
            }
            let half = s / 2;
            for bits in 0..(1u32 << k) {
                let lo = (0..k).map(|j| key.1[j] + if bits >> j & 1 == 1 { half } else { 0 }).collect();
                stack.push(((key.0 + 1, lo), inside.clone()));
            }
            internal.insert(key);
        }
        self.internal = internal;
    }

    /// Nodes where `c` is long, with the position of the long axis.
    fn longs(&self, c: &IBox) -> Vec<(NodeKey, usize)> {
        let k = self.axes.len();
        let mut out = Vec::new();
        let root = self.root_key();
        if !self.overlaps(&root, c) {
            return out;
        }
        let mut stack = vec![(root, vec![false; k])];
        while let Some((key, parent_cover)) = stack.pop() {
            let s = self.side(key.0);
            let cover: Vec<bool> = self
                .axes
                .iter()
                .enumerate()
                .map(|(j, &ax)| c.lo[ax] <= key.1[j] && key.1[j] + s <= c.hi[ax])
                .collect();
            for j in 0..k {
                if cover[j] && !parent_cover[j] {
                    out.push((key.clone(), j));
                }
            }
            if cover.iter().all(|&b| b) || self.is_leaf(&key) {
                continue;
            }
            for ch in self.children_overlapping(&key, c) {
                stack.push((ch, cover.clone()));
            }
        }
        out
    }

    fn overlaps(&self, key: &NodeKey, c: &IBox) -> bool {
        let s = self.side(key.0);
        self.axes.iter().enumerate().all(|(j, &ax)| c.lo[ax] < key.1[j] + s && c.hi[ax] > key.1[j])
    }

    /// One-dimensional assignment: nodes of smallest depth whose cell has an
    /// endpoint inside the interval, with which endpoints are touched.
    fn assigned_nodes(&self, a: i64, b: i64) -> Vec<(NodeKey, bool, bool)> {
        let mut out = Vec::new();
        let mut stack = vec![self.root_key()];
        while let Some(key) = stack.pop() {
            let lo = key.1[0];
            let hi = lo + self.side(key.0);
            if !(a < hi && b > lo) {
                continue;
            }
            let left = a <= lo && lo < b;
            let right = a < hi && hi <= b;
            if left || right {
                out.push((key, left, right));
            } else if !self.is_leaf(&key) {
                let ax = self.axes[0];
                let mut probe = IBox { lo: vec![0; ax + 1], hi: vec![0; ax + 1] };
                probe.lo[ax] = a;
                probe.hi[ax] = b;
                stack.extend(self.children_overlapping(&key, &probe));
            }
        }
        out
    }

    fn build(axes: Vec<usize>, root_lo: Vec<i64>, root_side: i64, clip: IBox, members: Vec<usize>, ctx: &mut Ctx) -> Level {
        let mut level = Level {
            axes,
            root_lo,
            root_side,
            internal: HashSet::new(),
            body: Body::Base(HashMap::new()),
        };
        level.build_internal(ctx.cubes, &members);
        if level.axes.len() == 1 {
            let ax = level.axes[0];
            let mut nodes: HashMap<NodeKey, Slots> = HashMap::new();
            for &m in &members {
                let c = &ctx.cubes[m];
                for (key, _, _) in level.assigned_nodes(c.lo[ax], c.hi[ax]) {
                    nodes.entry(key).or_default().assigned.push(m);
                }
            }
            let records = ctx.records;
            for (key, slots) in nodes.iter_mut() {
                let lo = key.1[0];
                let hi = lo + level.side(key.0);
                let intervals: Vec<(usize, [i64; 2])> =
                    slots.assigned.iter().map(|&m| (m, [ctx.cubes[m].lo[ax], ctx.cubes[m].hi[ax]])).collect();
                let (l, r) = pick_maximal(lo, hi, &intervals, |m| records[m].source_id);
                slots.left = l.map(|m| ctx.emit(m, &clip));
                slots.right = r.map(|m| ctx.emit(m, &clip));
            }
            level.body = Body::Base(nodes);
            return level;
        }
        let mut groups: HashMap<(NodeKey, usize), Vec<usize>> = HashMap::new();
        for &m in &members {
            for (key, j) in level.longs(&ctx.cubes[m]) {
                groups.entry((key, level.axes[j])).or_default().push(m);
                ctx.long_incidences += 1;
            }
        }
        let mut subs = HashMap::new();
        let mut keys: Vec<(NodeKey, usize)> = groups.keys().cloned().collect();
        keys.sort();
        for gk in keys {
            let members = groups.remove(&gk).unwrap();
            let (key, axis) = &gk;
            let s = level.side(key.0);
            let mut sub_clip = clip.clone();
            let mut sub_axes = Vec::new();
            let mut sub_lo = Vec::new();
            for (j, &ax) in level.axes.iter().enumerate() {
                sub_clip.lo[ax] = sub_clip.lo[ax].max(key.1[j]);
                sub_clip.hi[ax] = sub_clip.hi[ax].min(key.1[j] + s);
                if ax != *axis {
                    sub_axes.push(ax);
                    sub_lo.push(key.1[j]);
                }
            }
            let sub = Level::build(sub_axes, sub_lo, s, sub_clip, members, ctx);
            subs.insert(gk, sub);
        }
        level.body = Body::Multi(subs);
        level
    }

    fn query(&self, q: &[i64], raw: &[i64], hats: &[HatSet], out: &mut Vec<usize>) {
        let mut key = self.root_key();
        if !self.contains(&key, q) {
            return;
        }
        loop {
            match &self.body {
                Body::Multi(subs) => {
                    for &ax in &self.axes {
                        if let Some(sub) = subs.get(&(key.clone(), ax)) {
                            sub.query(q, raw, hats, out);
                        }
                    }
                }
                Body::Base(nodes) => {
                    if let Some(slots) = nodes.get(&key) {
                        for h in [slots.left, slots.right].into_iter().flatten() {
                            if hats[h].region.contains_closed(raw) {
                                out.push(h);
                            }
                        }
                    }
                }
            }
            if self.is_leaf(&key) {
                break;
            }
            key = self.child_containing(&key, q);
        }
    }

    fn decompose(&self, c: &IBox, out: &mut Vec<usize>) {
        match &self.body {
            Body::Multi(subs) => {
                for (key, j) in self.longs(c) {
                    if let Some(sub) = subs.get(&(key, self.axes[j])) {
                        sub.decompose(c, out);
                    }
                }
            }
            Body::Base(nodes) => {
                let ax = self.axes[0];
                for (key, l, r) in self.assigned_nodes(c.lo[ax], c.hi[ax]) {
                    if let Some(slots) = nodes.get(&key) {
                        if l {
                            out.extend(slots.left);
                        }
                        if r {
                            out.extend(slots.right);
                        }
                    }
                }
            }
        }
    }
}

/// Among intervals with positive overlap on the half-open cell `[lo, hi)`,
/// the one holding `lo` and the one holding `hi` with the largest overlap,
/// ties to the smallest key.
fn pick_maximal<K: Ord>(
    lo: i64,
    hi: i64,
    intervals: &[(usize, [i64; 2])],
    key: impl Fn(usize) -> K,
) -> (Option<usize>, Option<usize>) {
    let overlap = |iv: &[i64; 2]| iv[1].min(hi) - iv[0].max(lo);
    let best = |touch: &dyn Fn(&[i64; 2]) -> bool| {
        intervals
            .iter()
            .filter(|(_, iv)| touch(iv))
            .max_by(|x, y| overlap(&x.1).cmp(&overlap(&y.1)).then_with(|| key(y.0).cmp(&key(x.0))))
            .map(|x| x.0)
    };
    (best(&|iv| iv[0] <= lo && lo < iv[1]), best(&|iv| iv[0] < hi && hi <= iv[1]))
}

/// Maximal selections on a 1-D cell `[lo, hi)` for closed intervals given as
/// `(id, interval)` pairs, ties by smallest id.
pub fn maximal_intervals(lo: i64, hi: i64, assigned: &[(usize, AxisBox)]) -> (Option<usize>, Option<usize>) {
    let ivs: Vec<(usize, [i64; 2])> = assigned.iter().map(|(id, b)| (*id, [b.lo()[0], b.hi()[0]])).collect();
    pick_maximal(lo, hi, &ivs, |id| id)
}

#[derive(Clone, Debug)]
pub struct ExtQuadTree {
    dims: usize,
    side: i64,
    cubes: Vec<IBox>,
    records: Vec<CubeRecord>,
    root: Option<Level>,
    hats: Vec<HatSet>,
    metrics: FreqMetrics,
}

/// Builds the structure over cubes with nonnegative integral corners.
pub fn build_extended(cubes: &[CubeRecord], dims: usize) -> Result<ExtQuadTree> {
    let start = Instant::now();
    if dims == 0 {
        return Err(Error::ZeroDim);
    }
    let mut max_c = 0i64;
    let mut internal = Vec::with_capacity(cubes.len());
    for rec in cubes {
        let b = &rec.cube;
        if b.dim() != dims {
            return Err(Error::DimMismatch { expected: dims, got: b.dim() });
        }
        if b.lo().iter().any(|&c| c < 0) {
            return Err(Error::OutOfGrid(b.lo().to_vec()));
        }
        max_c = max_c.max(b.hi().iter().copied().max().unwrap());
        internal.push(IBox {
            lo: b.lo().iter().map(|c| 2 * c).collect(),
            hi: b.hi().iter().map(|c| 2 * c + 2).collect(),
        });
    }
    let side = ((2 * max_c + 2).max(2) as u64).next_power_of_two() as i64;
    let mut ctx = Ctx { cubes: &internal, records: cubes, hats: Vec::new(), by_region: HashMap::new(), long_incidences: 0 };
    let root = if cubes.is_empty() {
        None
    } else {
        let clip = IBox { lo: vec![0; dims], hi: vec![side; dims] };
        Some(Level::build((0..dims).collect(), vec![0; dims], side, clip, (0..cubes.len()).collect(), &mut ctx))
    };
    let hats = ctx.hats;
    let long_incidences = ctx.long_incidences;
    let mut tree = ExtQuadTree {
        dims,
        side,
        cubes: internal,
        records: cubes.to_vec(),
        root,
        hats,
        metrics: FreqMetrics::default(),
    };
    let mut mu = 0;
    for i in 0..tree.cubes.len() {
        mu = mu.max(tree.cover_decomposition(i)?.len());
    }
    let probes: Vec<Vec<i64>> = tree.hats.iter().map(|h| h.region.lo().to_vec()).collect();
    let mut histogram = BTreeMap::new();
    for p in &probes {
        *histogram.entry(tree.sets_containing(p).len()).or_insert(0) += 1;
    }
    tree.metrics = FreqMetrics {
        max_frequency: histogram.keys().next_back().copied().unwrap_or(0),
        max_decomposition: mu,
        construction_time: start.elapsed(),
        histogram,
        long_incidences,
    };
    Ok(tree)
}

impl ExtQuadTree {
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Side of the padded grid in input coordinates.
    pub fn grid_side(&self) -> i64 {
        self.side / 2
    }

    pub fn hat_sets(&self) -> &[HatSet] {
        &self.hats
    }

    pub fn records(&self) -> &[CubeRecord] {
        &self.records
    }

    /// Frequency measured on one probe point per hat set (its lower corner)
    /// and decomposition sizes over every input cube.
    pub fn metrics(&self) -> &FreqMetrics {
        &self.metrics
    }

    /// Ids of hat sets containing the integer point `p`, sorted.
    pub fn sets_containing(&self, p: &[i64]) -> Vec<usize> {
        let mut out = Vec::new();
        if p.len() != self.dims {
            return out;
        }
        if let Some(root) = &self.root {
            let q: Vec<i64> = p.iter().map(|c| 2 * c + 1).collect();
            root.query(&q, p, &self.hats, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Hat sets whose union covers cube `index` of the build list.
    pub fn cover_decomposition(&self, index: usize) -> Result<Vec<usize>> {
        let c = self.cubes.get(index).ok_or(Error::Unknown(index as u64))?;
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            root.decompose(c, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Largest number of hat sets containing any of the given points.
    pub fn frequency_over<'a>(&self, points: impl IntoIterator<Item = &'a [i64]>) -> usize {
        points.into_iter().map(|p| self.sets_containing(p).len()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rec(b: AxisBox, id: usize) -> CubeRecord {
        let delta = b.max_width();
        CubeRecord { cube: b, source_id: id, delta }
    }

    fn random_squares(rng: &mut ChaCha8Rng, m: usize, g: i64) -> Vec<CubeRecord> {
        (0..m)
            .map(|i| {
                let s = rng.gen_range(0..g / 2);
                rec(AxisBox::square(rng.gen_range(0..g - s), rng.gen_range(0..g - s), s), i)
            })
            .collect()
    }

    #[test]
    fn single_square_example() {
        // Internal square [0,6]^2 in an 8-grid: the root splits once and the
        // square is long at all four children.
        let t = build_extended(&[rec(AxisBox::square(0, 0, 2), 0)], 2).unwrap();
        let regions: Vec<AxisBox> = t.hat_sets().iter().map(|h| h.region.clone()).collect();
        assert_eq!(
            regions,
            vec![
                AxisBox::rect(0, 0, 1, 1),
                AxisBox::rect(0, 2, 1, 2),
                AxisBox::rect(2, 0, 2, 1),
                AxisBox::rect(2, 2, 2, 2),
            ]
        );
        assert_eq!(t.sets_containing(&[1, 1]), vec![0]);
        assert_eq!(t.sets_containing(&[2, 2]), vec![3]);
        assert_eq!(t.sets_containing(&[3, 1]), Vec::<usize>::new());
        assert_eq!(t.cover_decomposition(0).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(t.metrics().max_frequency, 1);
        assert!(t.cover_decomposition(1).is_err());
    }

    #[test]
    fn empty_build() {
        let t = build_extended(&[], 2).unwrap();
        assert!(t.hat_sets().is_empty());
        assert_eq!(t.metrics().max_frequency, 0);
        assert!(t.sets_containing(&[0, 0]).is_empty());
    }

    #[test]
    fn negative_corner_rejected() {
        assert!(build_extended(&[rec(AxisBox::square(-1, 0, 2), 0)], 2).is_err());
    }

    #[test]
    fn maximal_interval_examples() {
        let a = [(0, AxisBox::interval(0, 2)), (1, AxisBox::interval(0, 3))];
        assert_eq!(maximal_intervals(0, 4, &a), (Some(1), None));
        assert_eq!(maximal_intervals(0, 4, &[]), (None, None));
        let both = [(5, AxisBox::interval(-1, 9))];
        assert_eq!(maximal_intervals(0, 4, &both), (Some(5), Some(5)));
        let tie = [(3, AxisBox::interval(0, 2)), (1, AxisBox::interval(-5, 2))];
        assert_eq!(maximal_intervals(0, 4, &tie), (Some(1), None));
    }

    #[test]
    fn hats_inside_sources_and_queries_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let recs = random_squares(&mut rng, 12, 40);
            let t = build_extended(&recs, 2).unwrap();
            for h in t.hat_sets() {
                assert!(recs[h.source].cube.contains_box(&h.region));
            }
            for x in 0..42 {
                for y in 0..42 {
                    let scan: Vec<usize> =
                        t.hat_sets().iter().filter(|h| h.region.contains_closed(&[x, y])).map(|h| h.id).collect();
                    assert_eq!(t.sets_containing(&[x, y]), scan);
                }
            }
        }
    }

    #[test]
    fn four_dim_decomposition_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let recs: Vec<CubeRecord> = (0..5)
                .map(|i| {
                    let s = rng.gen_range(0..5);
                    let lo: Vec<i64> = (0..4).map(|_| rng.gen_range(0..9 - s)).collect();
                    rec(AxisBox::cube(&lo, s), i)
                })
                .collect();
            let t = build_extended(&recs, 4).unwrap();
            for (i, r) in recs.iter().enumerate() {
                let dec = t.cover_decomposition(i).unwrap();
                for p in lattice(r.cube.lo(), r.cube.hi()) {
                    assert!(dec.iter().any(|&h| t.hat_sets()[h].region.contains_closed(&p)), "{p:?}");
                }
            }
        }
    }

    fn lattice(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for (a, b) in lo.iter().zip(hi) {
            out = out.into_iter().flat_map(|v| (*a..=*b).map(move |c| [v.clone(), vec![c]].concat())).collect();
        }
        out
    }
}
