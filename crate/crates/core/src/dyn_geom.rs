//! Dynamic set cover for hyperrectangles with moving points, and dynamic
//! hitting set for a fixed point set with moving rectangles.
//!
//! Both go through the same pipeline: map every static object to a cube in
//! twice the dimension on a rank grid, build one extended quad-tree per
//! rounded weight, and feed the clipped cubes containing each dynamic
//! element to the [`Engine`]. Solutions are reported in the caller's ids.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use crate::dyn_sc::{CoverDelta, Engine};
use crate::error::{Error, Result};
use crate::ext_quadtree::{build_extended, ExtQuadTree};
use crate::geom::{AxisBox, Point, RankMap, RankSpace};
use crate::transforms::{
    cube_shift, hs_point_to_cube, hs_rect_to_point, point_to_dualpoint, rect_to_cube, round_weight, shift_box,
    shift_point, CubeRecord,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionDelta {
    pub added: Vec<usize>,
    pub removed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynMetrics {
    /// Largest number of clipped cubes incident to a live element.
    pub f_meas: usize,
    /// Largest decomposition of a static cube into clipped cubes.
    pub mu_meas: usize,
    pub classes: usize,
    pub hat_sets: usize,
    pub preprocessing: Duration,
    pub mean_touched: f64,
}

#[derive(Clone, Debug)]
struct Class {
    weight: u64,
    tree: ExtQuadTree,
    /// Input index of each cube in the class tree.
    members: Vec<usize>,
    offset: usize,
}

/// Extended trees per weight class feeding one engine.
#[derive(Clone, Debug)]
struct Pipeline {
    classes: Vec<Class>,
    engine: Engine,
    refs: HashMap<usize, usize>,
    preprocessing: Duration,
}

impl Pipeline {
    fn build(cubes: Vec<AxisBox>, rounded: &[u64], dims: usize, eps: f64, start: Instant) -> Result<Self> {
        let mut by_weight: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, &w) in rounded.iter().enumerate() {
            by_weight.entry(w).or_default().push(i);
        }
        let mut classes = Vec::new();
        let mut offset = 0;
        for (weight, members) in by_weight {
            let recs: Vec<CubeRecord> = members
                .iter()
                .map(|&i| CubeRecord { cube: cubes[i].clone(), source_id: i, delta: cubes[i].max_width() })
                .collect();
            let tree = build_extended(&recs, dims)?;
            let n = tree.hat_sets().len();
            classes.push(Class { weight, tree, members, offset });
            offset += n;
        }
        Ok(Pipeline { classes, engine: Engine::new(eps), refs: HashMap::new(), preprocessing: start.elapsed() })
    }

    fn incident(&self, q: &[i64]) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for c in &self.classes {
            out.extend(c.tree.sets_containing(q).into_iter().map(|h| (c.offset + h, c.weight)));
        }
        out
    }

    fn source(&self, global: usize) -> usize {
        let c = self.classes.iter().rev().find(|c| c.offset <= global).expect("global id in range");
        c.members[c.tree.hat_sets()[global - c.offset].source]
    }

    fn translate(&mut self, d: CoverDelta) -> SolutionDelta {
        let mut out = SolutionDelta::default();
        for h in d.removed {
            let s = self.source(h);
            let r = self.refs.get_mut(&s).expect("removed set was referenced");
            *r -= 1;
            if *r == 0 {
                self.refs.remove(&s);
                out.removed.push(s);
            }
        }
        for h in d.added {
            let s = self.source(h);
            let r = self.refs.entry(s).or_insert(0);
            *r += 1;
            if *r == 1 {
                out.added.push(s);
            }
        }
        let back: BTreeSet<usize> = out.added.iter().copied().filter(|s| out.removed.contains(s)).collect();
        out.added.retain(|s| !back.contains(s));
        out.removed.retain(|s| !back.contains(s));
        out.added.sort_unstable();
        out.removed.sort_unstable();
        out
    }

    fn solution(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.refs.keys().copied().collect();
        v.sort_unstable();
        v
    }

    fn metrics(&self) -> DynMetrics {
        DynMetrics {
            f_meas: self.engine.frequency(),
            mu_meas: self.classes.iter().map(|c| c.tree.metrics().max_decomposition).max().unwrap_or(0),
            classes: self.classes.len(),
            hat_sets: self.classes.iter().map(|c| c.tree.hat_sets().len()).sum(),
            preprocessing: self.preprocessing,
            mean_touched: self.engine.mean_touched(),
        }
    }

    fn check_weights(weights: Option<&[f64]>, n: usize) -> Result<(Vec<f64>, Vec<u64>)> {
        let w: Vec<f64> = match weights {
            Some(w) if w.len() != n => {
                return Err(Error::Precondition(format!("{} weights for {n} objects", w.len())));
            }
            Some(w) => w.to_vec(),
            None => vec![1.0; n],
        };
        let r = w.iter().map(|&x| round_weight(x)).collect::<Result<Vec<u64>>>()?;
        Ok((w, r))
    }
}

/// Set cover over fixed rectangles as points come and go.
#[derive(Clone, Debug)]
pub struct DynSetCover {
    rects: Vec<AxisBox>,
    weights: Vec<f64>,
    rounded: Vec<u64>,
    ranks: RankSpace,
    shift: i64,
    pipe: Pipeline,
    live: BTreeMap<u64, Vec<i64>>,
}

impl DynSetCover {
    pub fn new(rects: &[AxisBox], weights: Option<&[f64]>, eps: f64) -> Result<Self> {
        let start = Instant::now();
        let first = rects.first().ok_or(Error::Precondition("no rectangles".into()))?;
        let d = first.dim();
        if let Some(b) = rects.iter().find(|b| b.dim() != d) {
            return Err(Error::DimMismatch { expected: d, got: b.dim() });
        }
        let (weights, rounded) = Pipeline::check_weights(weights, rects.len())?;
        let axes = (0..d)
            .map(|a| RankMap::from_coords(rects.iter().flat_map(|b| [b.lo()[a], b.hi()[a]]).collect()))
            .collect();
        let ranks = RankSpace { axes };
        let reduced: Vec<AxisBox> = rects.iter().map(|b| ranks.reduce_box_doubled(b)).collect();
        let r = reduced.iter().flat_map(|b| b.hi().to_vec()).max().unwrap_or(0);
        let shift = cube_shift(r);
        let cubes = reduced.iter().map(|b| shift_box(&rect_to_cube(b, 0).cube, shift)).collect();
        let pipe = Pipeline::build(cubes, &rounded, 2 * d, eps, start)?;
        Ok(DynSetCover { rects: rects.to_vec(), weights, rounded, ranks, shift, pipe, live: BTreeMap::new() })
    }

    pub fn dim(&self) -> usize {
        self.ranks.dim()
    }

    pub fn rects(&self) -> &[AxisBox] {
        &self.rects
    }

    pub fn rounded_weights(&self) -> &[u64] {
        &self.rounded
    }

    pub fn class_weights(&self) -> Vec<u64> {
        self.pipe.classes.iter().map(|c| c.weight).collect()
    }

    fn dual(&self, p: &[i64]) -> Vec<i64> {
        shift_point(&point_to_dualpoint(&self.ranks.reduce_point_doubled(p)), self.shift)
    }

    /// Clipped cubes containing the transformed point, as engine set ids.
    pub fn incident(&self, p: &[i64]) -> Vec<usize> {
        self.pipe.incident(&self.dual(p)).into_iter().map(|(h, _)| h).collect()
    }

    pub fn insert_point(&mut self, id: u64, p: &Point) -> Result<SolutionDelta> {
        if p.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: p.dim() });
        }
        if self.live.contains_key(&id) {
            return Err(Error::Duplicate(id));
        }
        let inc = self.pipe.incident(&self.dual(p.coords()));
        if inc.is_empty() {
            return Err(Error::Uncoverable(p.coords().to_vec()));
        }
        let d = self.pipe.engine.insert_element(id, &inc)?;
        self.live.insert(id, p.coords().to_vec());
        Ok(self.pipe.translate(d))
    }

    pub fn delete_point(&mut self, id: u64) -> Result<SolutionDelta> {
        if self.live.remove(&id).is_none() {
            return Err(Error::Unknown(id));
        }
        let d = self.pipe.engine.delete_element(id)?;
        Ok(self.pipe.translate(d))
    }

    pub fn live_points(&self) -> impl Iterator<Item = (u64, &[i64])> {
        self.live.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    /// Chosen rectangle ids.
    pub fn cover(&self) -> Vec<usize> {
        self.pipe.solution()
    }

    pub fn cover_weight(&self) -> f64 {
        self.cover().iter().map(|&i| self.weights[i]).sum()
    }

    pub fn is_feasible(&self) -> bool {
        let c = self.cover();
        self.live.values().all(|p| c.iter().any(|&i| self.rects[i].contains_closed(p)))
    }

    pub fn last_touched(&self) -> usize {
        self.pipe.engine.last_touched()
    }

    pub fn engine(&self) -> &Engine {
        &self.pipe.engine
    }

    pub fn metrics(&self) -> DynMetrics {
        self.pipe.metrics()
    }
}

/// Hitting set over fixed points as rectangles come and go.
#[derive(Clone, Debug)]
pub struct DynHitSet {
    points: Vec<Point>,
    weights: Vec<f64>,
    ranks: RankSpace,
    side: i64,
    pipe: Pipeline,
    live: BTreeMap<u64, AxisBox>,
}

impl DynHitSet {
    pub fn new(points: &[Point], weights: Option<&[f64]>, eps: f64) -> Result<Self> {
        let start = Instant::now();
        let first = points.first().ok_or(Error::Precondition("no points".into()))?;
        let d = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimMismatch { expected: d, got: p.dim() });
        }
        let (weights, rounded) = Pipeline::check_weights(weights, points.len())?;
        let axes: Vec<RankMap> =
            (0..d).map(|a| RankMap::from_coords(points.iter().map(|p| p.coords()[a]).collect())).collect();
        let side = axes.iter().map(|m| m.len() as i64 - 1).max().unwrap();
        let ranks = RankSpace { axes };
        let mut cubes = Vec::with_capacity(points.len());
        for p in points {
            let r: Vec<i64> = ranks.axes.iter().zip(p.coords()).map(|(m, &x)| m.rank(x).unwrap()).collect();
            cubes.push(shift_box(&hs_point_to_cube(&Point::new(r)?, side)?, side));
        }
        let pipe = Pipeline::build(cubes, &rounded, 2 * d, eps, start)?;
        Ok(DynHitSet { points: points.to_vec(), weights, ranks, side, pipe, live: BTreeMap::new() })
    }

    pub fn dim(&self) -> usize {
        self.ranks.dim()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn class_weights(&self) -> Vec<u64> {
        self.pipe.classes.iter().map(|c| c.weight).collect()
    }

    fn dual(&self, s: &AxisBox) -> Option<Vec<i64>> {
        let snapped = self.ranks.snap_box(s)?;
        Some(shift_point(&hs_rect_to_point(&snapped), self.side))
    }

    pub fn insert_rect(&mut self, id: u64, s: &AxisBox) -> Result<SolutionDelta> {
        if s.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: s.dim() });
        }
        if self.live.contains_key(&id) {
            return Err(Error::Duplicate(id));
        }
        let inc = self.dual(s).map(|q| self.pipe.incident(&q)).unwrap_or_default();
        if inc.is_empty() {
            return Err(Error::Unhittable(id as usize));
        }
        let d = self.pipe.engine.insert_element(id, &inc)?;
        self.live.insert(id, s.clone());
        Ok(self.pipe.translate(d))
    }

    pub fn delete_rect(&mut self, id: u64) -> Result<SolutionDelta> {
        if self.live.remove(&id).is_none() {
            return Err(Error::Unknown(id));
        }
        let d = self.pipe.engine.delete_element(id)?;
        Ok(self.pipe.translate(d))
    }

    pub fn live_rects(&self) -> impl Iterator<Item = (u64, &AxisBox)> {
        self.live.iter().map(|(k, v)| (*k, v))
    }

    /// Chosen point indices.
    pub fn hitting_set(&self) -> Vec<usize> {
        self.pipe.solution()
    }

    pub fn hitting_weight(&self) -> f64 {
        self.hitting_set().iter().map(|&i| self.weights[i]).sum()
    }

    pub fn is_feasible(&self) -> bool {
        let h = self.hitting_set();
        self.live.values().all(|s| h.iter().any(|&i| s.contains_closed(self.points[i].coords())))
    }

    pub fn last_touched(&self) -> usize {
        self.pipe.engine.last_touched()
    }

    pub fn metrics(&self) -> DynMetrics {
        self.pipe.metrics()
    }
}
