//! Exact oracles, the interval baseline and lower-bound instances.

use std::time::{Duration, Instant};

use crate::bbd::BbdCoverState;
use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point};
use crate::quadtree::CoverState;

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: 10_000_000, max_time: Duration::from_secs(10) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub opt_value: u64,
    pub opt_ids: Vec<usize>,
    pub nodes_explored: u64,
    pub timed_out: bool,
}

struct Search<'a> {
    elems: &'a [Vec<usize>],
    weights: &'a [u64],
    covers: Vec<Vec<usize>>,
    best: u64,
    best_ids: Vec<usize>,
    nodes: u64,
    budget: Budget,
    start: Instant,
    timed_out: bool,
}

impl Search<'_> {
    fn run(&mut self, chosen: &mut Vec<usize>, cost: u64, hit: &mut [u32], uncovered: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes >= self.budget.max_nodes || (self.nodes.is_multiple_of(4096) && self.start.elapsed() > self.budget.max_time) {
            self.timed_out = true;
            return;
        }
        if uncovered == 0 {
            if cost < self.best {
                self.best = cost;
                self.best_ids = chosen.clone();
            }
            return;
        }
        // Each further set covers at most `widest` of the uncovered elements.
        let mut widest = 0;
        let mut branch = usize::MAX;
        let mut fewest = usize::MAX;
        for (e, inc) in self.elems.iter().enumerate() {
            if hit[e] > 0 {
                continue;
            }
            if inc.len() < fewest {
                fewest = inc.len();
                branch = e;
            }
        }
        let min_w = self.elems[branch].iter().map(|&s| self.weights[s]).min().unwrap();
        for (s, cov) in self.covers.iter().enumerate() {
            if chosen.contains(&s) {
                continue;
            }
            widest = widest.max(cov.iter().filter(|&&e| hit[e] == 0).count());
        }
        let need = uncovered.div_ceil(widest.max(1)) as u64;
        let cheapest = self.weights.iter().copied().min().unwrap_or(1);
        if cost + min_w.max(need * cheapest) >= self.best {
            return;
        }
        let mut opts = self.elems[branch].clone();
        opts.sort_by_key(|&s| (self.weights[s], std::cmp::Reverse(self.covers[s].len()), s));
        for s in opts {
            let mut newly = 0;
            for &e in &self.covers[s] {
                if hit[e] == 0 {
                    newly += 1;
                }
                hit[e] += 1;
            }
            chosen.push(s);
            self.run(chosen, cost + self.weights[s], hit, uncovered - newly);
            chosen.pop();
            for &e in &self.covers[s] {
                hit[e] -= 1;
            }
        }
    }
}

/// Minimum weight cover of elements given by their incident set lists.
pub fn opt_cover(elems: &[Vec<usize>], weights: &[u64], budget: Budget) -> Result<OracleResult> {
    let mut covers = vec![Vec::new(); weights.len()];
    for (e, inc) in elems.iter().enumerate() {
        if inc.is_empty() {
            return Err(Error::Uncoverable(vec![e as i64]));
        }
        for &s in inc {
            if s >= weights.len() {
                return Err(Error::Unknown(s as u64));
            }
            covers[s].push(e);
        }
    }
    if elems.is_empty() {
        return Ok(OracleResult { opt_value: 0, opt_ids: vec![], nodes_explored: 0, timed_out: false });
    }
    let greedy = greedy_cover(elems, weights, &covers);
    let mut search = Search {
        elems,
        weights,
        covers,
        best: greedy.iter().map(|&s| weights[s]).sum::<u64>() + 1,
        best_ids: greedy.clone(),
        nodes: 0,
        budget,
        start: Instant::now(),
        timed_out: false,
    };
    let mut hit = vec![0u32; elems.len()];
    search.run(&mut Vec::new(), 0, &mut hit, elems.len());
    let mut ids = search.best_ids;
    ids.sort_unstable();
    let value = ids.iter().map(|&s| weights[s]).sum();
    Ok(OracleResult { opt_value: value, opt_ids: ids, nodes_explored: search.nodes, timed_out: search.timed_out })
}

fn greedy_cover(elems: &[Vec<usize>], weights: &[u64], covers: &[Vec<usize>]) -> Vec<usize> {
    let mut hit = vec![false; elems.len()];
    let mut left = elems.len();
    let mut out = Vec::new();
    while left > 0 {
        let s = (0..weights.len())
            .filter(|&s| covers[s].iter().any(|&e| !hit[e]))
            .max_by(|&a, &b| {
                let ga = covers[a].iter().filter(|&&e| !hit[e]).count() as u64 * weights[b];
                let gb = covers[b].iter().filter(|&&e| !hit[e]).count() as u64 * weights[a];
                ga.cmp(&gb).then(b.cmp(&a))
            })
            .unwrap();
        for &e in &covers[s] {
            if !hit[e] {
                hit[e] = true;
                left -= 1;
            }
        }
        out.push(s);
    }
    out
}

/// Exhaustive minimum over all `2^m` subfamilies.
pub fn enumerate_opt(elems: &[Vec<usize>], weights: &[u64]) -> Option<u64> {
    let m = weights.len();
    assert!(m <= 24, "too many sets to enumerate");
    let masks: Vec<u32> = elems.iter().map(|inc| inc.iter().fold(0u32, |a, &s| a | 1 << s)).collect();
    (0u32..1 << m)
        .filter(|sub| masks.iter().all(|&mk| mk & sub != 0))
        .map(|sub| (0..m).filter(|&s| sub >> s & 1 == 1).map(|s| weights[s]).sum())
        .min()
}

fn incidence(points: &[Point], sets: &[AxisBox]) -> Vec<Vec<usize>> {
    points
        .iter()
        .map(|p| (0..sets.len()).filter(|&s| sets[s].contains_closed(p.coords())).collect())
        .collect()
}

pub fn opt_set_cover(points: &[Point], sets: &[AxisBox], budget: Budget) -> Result<OracleResult> {
    let elems = incidence(points, sets);
    if let Some(i) = elems.iter().position(|e| e.is_empty()) {
        return Err(Error::Uncoverable(points[i].coords().to_vec()));
    }
    opt_cover(&elems, &vec![1; sets.len()], budget)
}

/// Smallest subset of `points` hitting every box; ids index `points`.
pub fn opt_hitting_set(points: &[Point], sets: &[AxisBox], budget: Budget) -> Result<OracleResult> {
    let elems: Vec<Vec<usize>> =
        sets.iter().map(|s| (0..points.len()).filter(|&i| s.contains_closed(points[i].coords())).collect()).collect();
    if let Some(i) = elems.iter().position(|e| e.is_empty()) {
        return Err(Error::Unhittable(i));
    }
    opt_cover(&elems, &vec![1; points.len()], budget)
}

/// The 2-competitive online algorithm for points and intervals.
#[derive(Clone, Debug)]
pub struct IntervalOnline {
    intervals: Vec<(i64, i64)>,
    chosen: Vec<usize>,
}

impl IntervalOnline {
    pub fn new(intervals: &[AxisBox]) -> Result<Self> {
        let mut iv = Vec::with_capacity(intervals.len());
        for b in intervals {
            if b.dim() != 1 {
                return Err(Error::DimMismatch { expected: 1, got: b.dim() });
            }
            iv.push((b.lo()[0], b.hi()[0]));
        }
        Ok(IntervalOnline { intervals: iv, chosen: Vec::new() })
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.intervals
    }

    /// If `p` is uncovered, adds the covering interval reaching furthest
    /// right and the one reaching furthest left.
    pub fn insert(&mut self, p: i64) -> Result<Vec<usize>> {
        let inside = |&(a, b): &(i64, i64)| a <= p && p <= b;
        if self.chosen.iter().any(|&i| inside(&self.intervals[i])) {
            return Ok(vec![]);
        }
        let cov: Vec<usize> = (0..self.intervals.len()).filter(|&i| inside(&self.intervals[i])).collect();
        if cov.is_empty() {
            return Err(Error::Uncoverable(vec![p]));
        }
        let r = *cov.iter().max_by_key(|&&i| (self.intervals[i].1, std::cmp::Reverse(i))).unwrap();
        let l = *cov.iter().min_by_key(|&&i| (self.intervals[i].0, i)).unwrap();
        let mut added = vec![l];
        if r != l {
            added.push(r);
        }
        self.chosen.extend(&added);
        Ok(added)
    }
}

/// The four-interval instance that forces the baseline to pay twice the
/// optimum, with the two points presented to it.
pub fn interval_adversary_instance() -> (Vec<AxisBox>, Vec<i64>) {
    let sets = (0..4).map(|i| AxisBox::interval(i, i + 1)).collect();
    (sets, vec![2, 3])
}

/// A generated lower-bound instance. All coordinates are doubled so the
/// probe points are integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundInstance {
    pub m: usize,
    pub sets: Vec<AxisBox>,
    /// Grid side that holds every set and probe point.
    pub n_side: i64,
    offset: i64,
}

impl LowerBoundInstance {
    /// The point that lies in exactly sets `i..=j` (1-based).
    pub fn probe(&self, i: usize, j: usize) -> Point {
        let m = self.m as i64;
        Point::xy(2 * i as i64 - 1 + self.offset, 2 * (m - j as i64) + 1 + self.offset)
    }
}

fn check_pow2(m: usize) -> Result<()> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m as i64));
    }
    Ok(())
}

/// Quadrants with top-right corners `(k, m - k + 1)`.
pub fn gen_quadrant_lb(m: usize) -> Result<LowerBoundInstance> {
    check_pow2(m)?;
    let mi = m as i64;
    let sets = (1..=mi).map(|k| AxisBox::rect(0, 0, 2 * k, 2 * (mi - k + 1))).collect();
    Ok(LowerBoundInstance { m, sets, n_side: (4 * mi as u64).next_power_of_two() as i64, offset: 0 })
}

/// Squares of side `m` with bottom-left corners `(k - m, 1 - k)`, doubled and
/// translated by `2m` into the nonnegative quadrant.
pub fn gen_unitsquare_lb(m: usize) -> Result<LowerBoundInstance> {
    check_pow2(m)?;
    let mi = m as i64;
    let off = 2 * mi;
    let sets = (1..=mi).map(|k| AxisBox::square(2 * (k - mi) + off, 2 * (1 - k) + off, 2 * mi)).collect();
    Ok(LowerBoundInstance { m, sets, n_side: (8 * mi as u64).next_power_of_two() as i64, offset: off })
}

/// An online cover algorithm that the adversary can play against.
pub trait OnlineCover {
    fn present(&mut self, p: &Point) -> Result<Vec<usize>>;
    fn is_chosen(&self, id: usize) -> bool;
    fn cost(&self) -> usize;
}

impl OnlineCover for CoverState {
    fn present(&mut self, p: &Point) -> Result<Vec<usize>> {
        self.online_insert(p.clone())
    }
    fn is_chosen(&self, id: usize) -> bool {
        CoverState::is_chosen(self, id)
    }
    fn cost(&self) -> usize {
        self.chosen().len()
    }
}

impl OnlineCover for BbdCoverState {
    fn present(&mut self, p: &Point) -> Result<Vec<usize>> {
        self.insert(p)
    }
    fn is_chosen(&self, id: usize) -> bool {
        BbdCoverState::is_chosen(self, id)
    }
    fn cost(&self) -> usize {
        self.chosen().len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub point: Point,
    pub range: (usize, usize),
    pub added: Vec<usize>,
    pub cost: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryTrace {
    pub rounds: Vec<Round>,
    pub opt: u64,
    pub ratio: f64,
}

/// Presents the probe for the whole range, then repeatedly keeps the half
/// on which the algorithm has bought fewer sets, down to a single set.
pub fn play_halving_adversary(alg: &mut dyn OnlineCover, inst: &LowerBoundInstance) -> Result<AdversaryTrace> {
    let (mut i, mut j) = (1usize, inst.m);
    let mut rounds = Vec::new();
    let mut presented = Vec::new();
    loop {
        let p = inst.probe(i, j);
        let added = alg.present(&p)?;
        presented.push(p.clone());
        rounds.push(Round { point: p, range: (i, j), added, cost: alg.cost() });
        if i == j {
            break;
        }
        let mid = (i + j) / 2;
        let mass = |a: usize, b: usize| (a..=b).filter(|&k| alg.is_chosen(k - 1)).count();
        if mass(i, mid) >= mass(mid + 1, j) {
            i = mid + 1;
        } else {
            j = mid;
        }
    }
    let opt = opt_set_cover(&presented, &inst.sets, Budget::default())?.opt_value;
    let cost = alg.cost();
    Ok(AdversaryTrace { rounds, opt, ratio: cost as f64 / opt as f64 })
}
