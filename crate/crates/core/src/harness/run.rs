//! Replays an instance against one algorithm, checking feasibility after
//! every event.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use crate::bbd::{build_bbd, BbdCoverState};
use crate::dyn_geom::{DynHitSet, DynSetCover};
use crate::eval::{opt_cover, Budget, IntervalOnline};
use crate::geom::{AxisBox, Point};
use crate::hitset::HitState;
use crate::quadtree::{offline_cover, CoverState};

use super::format::{Event, Instance, Mode};
use super::{Algo, HarnessError};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub oracle: bool,
    /// Number of evenly spaced events at which the oracle runs.
    pub checkpoints: usize,
    /// Record wall time per event. Off keeps the CSV byte-identical across
    /// replays.
    pub timing: bool,
    pub budget: Budget,
    pub eps: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { oracle: false, checkpoints: 20, timing: false, budget: Budget::default(), eps: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Row {
    pub run_id: String,
    pub algo: String,
    pub event_idx: usize,
    pub op: String,
    pub cost: f64,
    pub delta: usize,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub f_meas: Option<usize>,
    pub mu_meas: Option<usize>,
    pub micros: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub run_id: String,
    pub algo: String,
    pub events: usize,
    pub final_cost: f64,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub f_meas: Option<usize>,
    pub mu_meas: Option<usize>,
    /// Largest cost-over-optimum seen at any checkpoint.
    pub max_ratio: Option<f64>,
    /// 50th, 90th and 99th percentile of per-event wall time.
    pub latency_micros: Option<[u64; 3]>,
}

enum State {
    Interval(IntervalOnline),
    Quadtree(CoverState),
    Offline(Vec<AxisBox>, i64, Vec<usize>),
    Bbd(BbdCoverState),
    Hitset(HitState),
    DynSc(DynSetCover),
    DynHs(DynHitSet),
}

struct Runner<'a> {
    inst: &'a Instance,
    state: State,
    live_points: BTreeMap<u64, Point>,
    live_sets: BTreeMap<u64, AxisBox>,
    hs_index: BTreeMap<u64, usize>,
}

fn unsupported(algo: Algo, what: &str) -> HarnessError {
    HarnessError::Unsupported(format!("{} does not support {what}", algo.name()))
}

impl<'a> Runner<'a> {
    fn new(inst: &'a Instance, algo: Algo, eps: f64) -> Result<Self, HarnessError> {
        if inst.mode != algo.mode() {
            return Err(unsupported(algo, &format!("{} instances", inst.mode.as_str())));
        }
        let wrap = |e| HarnessError::Algo { event_idx: 0, source: e };
        let rects: Vec<AxisBox> = inst.sets.iter().map(|s| s.rect.clone()).collect();
        let pts: Vec<Point> = inst.points.iter().map(|(_, p)| p.clone()).collect();
        let need_dim = |d: usize| {
            if inst.dim != d {
                Err(unsupported(algo, &format!("dimension {}", inst.dim)))
            } else {
                Ok(())
            }
        };
        let state = match algo {
            Algo::Interval => {
                need_dim(1)?;
                State::Interval(IntervalOnline::new(&rects).map_err(wrap)?)
            }
            Algo::Quadtree => {
                need_dim(2)?;
                State::Quadtree(CoverState::new(rects, inst.n_side).map_err(wrap)?)
            }
            Algo::Offline => {
                need_dim(2)?;
                State::Offline(rects, inst.n_side, vec![])
            }
            Algo::Bbd => {
                need_dim(2)?;
                State::Bbd(BbdCoverState::new(build_bbd(&pts).map_err(wrap)?, rects).map_err(wrap)?)
            }
            Algo::Hitset => {
                need_dim(2)?;
                State::Hitset(HitState::new(&pts, inst.n_side).map_err(wrap)?)
            }
            Algo::DynSc => {
                let w: Vec<f64> = inst.sets.iter().map(|s| s.weight_or_one()).collect();
                State::DynSc(DynSetCover::new(&rects, Some(&w), eps).map_err(wrap)?)
            }
            Algo::DynHs => {
                let w: Vec<f64> = inst.point_weights.iter().map(|w| w.unwrap_or(1.0)).collect();
                State::DynHs(DynHitSet::new(&pts, Some(&w), eps).map_err(wrap)?)
            }
        };
        Ok(Runner { inst, state, live_points: BTreeMap::new(), live_sets: BTreeMap::new(), hs_index: BTreeMap::new() })
    }

    fn apply(&mut self, idx: usize, e: &Event, algo: Algo) -> Result<usize, HarnessError> {
        let wrap = |source| HarnessError::Algo { event_idx: idx, source };
        let delta = match (&mut self.state, e) {
            (State::Interval(s), Event::AddPoint(_, p)) => s.insert(p.coords()[0]).map_err(wrap)?.len(),
            (State::Quadtree(s), Event::AddPoint(_, p)) => s.online_insert(p.clone()).map_err(wrap)?.len(),
            (State::Offline(..), Event::AddPoint(..)) => 0,
            (State::Bbd(s), Event::AddPoint(_, p)) => s.insert(p).map_err(wrap)?.len(),
            (State::Hitset(s), Event::AddSet(_, b)) => s.insert_square(b).map_err(wrap)?.added.len(),
            (State::DynSc(s), Event::AddPoint(id, p)) => s.insert_point(*id, p).map_err(wrap)?.added.len(),
            (State::DynSc(s), Event::RemovePoint(id)) => {
                let d = s.delete_point(*id).map_err(wrap)?;
                d.added.len() + d.removed.len()
            }
            (State::DynHs(s), Event::AddSet(id, b)) => {
                let d = s.insert_rect(*id, b).map_err(wrap)?;
                d.added.len() + d.removed.len()
            }
            (State::DynHs(s), Event::RemoveSet(id)) => {
                let d = s.delete_rect(*id).map_err(wrap)?;
                d.added.len() + d.removed.len()
            }
            _ => return Err(unsupported(algo, &format!("`{}` events", e.op()))),
        };
        match e {
            Event::AddPoint(id, p) => {
                self.live_points.insert(*id, p.clone());
            }
            Event::RemovePoint(id) => {
                self.live_points.remove(id);
            }
            Event::AddSet(id, b) => {
                self.hs_index.insert(*id, self.hs_index.len());
                self.live_sets.insert(*id, b.clone());
            }
            Event::RemoveSet(id) => {
                self.live_sets.remove(id);
            }
        }
        if let State::Offline(rects, n, chosen) = &mut self.state {
            let pts: Vec<Point> = self.live_points.values().cloned().collect();
            let next = offline_cover(&pts, rects, *n).map_err(wrap)?;
            let d = next.iter().filter(|s| !chosen.contains(s)).count() + chosen.iter().filter(|s| !next.contains(s)).count();
            *chosen = next;
            return Ok(d);
        }
        Ok(delta)
    }

    fn chosen_sets(&self) -> Vec<usize> {
        match &self.state {
            State::Interval(s) => s.chosen().to_vec(),
            State::Quadtree(s) => s.chosen().to_vec(),
            State::Offline(_, _, c) => c.clone(),
            State::Bbd(s) => s.chosen().to_vec(),
            State::Hitset(s) => s.chosen().to_vec(),
            State::DynSc(s) => s.cover(),
            State::DynHs(s) => s.hitting_set(),
        }
    }

    fn weight_of(&self, i: usize) -> f64 {
        match self.inst.mode {
            Mode::SetCover => self.inst.sets[i].weight_or_one(),
            Mode::HittingSet => self.inst.point_weights[i].unwrap_or(1.0),
        }
    }

    fn cost(&self) -> f64 {
        match &self.state {
            State::Hitset(s) => s.chosen().len() as f64,
            State::Interval(_) | State::Quadtree(_) | State::Offline(..) | State::Bbd(_) => self.chosen_sets().len() as f64,
            _ => self.chosen_sets().iter().map(|&i| self.weight_of(i)).sum(),
        }
    }

    /// Checks the reported solution against the live elements geometrically.
    fn feasible(&self) -> bool {
        let chosen = self.chosen_sets();
        match self.inst.mode {
            Mode::SetCover => self
                .live_points
                .values()
                .all(|p| chosen.iter().any(|&s| self.inst.sets[s].rect.contains_closed(p.coords()))),
            Mode::HittingSet => {
                let pts: Vec<&Point> = match &self.state {
                    State::Hitset(s) => {
                        return self
                            .live_sets
                            .values()
                            .all(|b| chosen.iter().any(|&i| b.contains_closed(&s.points()[i])));
                    }
                    _ => chosen.iter().map(|&i| &self.inst.points[i].1).collect(),
                };
                self.live_sets.values().all(|b| pts.iter().any(|p| b.contains_closed(p.coords())))
            }
        }
    }

    fn weighted(&self) -> bool {
        matches!(self.state, State::DynSc(_) | State::DynHs(_))
    }

    /// Optimum over live elements, weights scaled to thousandths.
    fn opt(&self, budget: Budget) -> Option<f64> {
        let (elems, weights): (Vec<Vec<usize>>, Vec<u64>) = match (&self.state, self.inst.mode) {
            (State::Hitset(s), _) => {
                let pts = s.points();
                let e = self.live_sets.values().map(|b| (0..pts.len()).filter(|&i| b.contains_closed(&pts[i])).collect()).collect();
                (e, vec![1; pts.len()])
            }
            (_, Mode::SetCover) => {
                let e = self
                    .live_points
                    .values()
                    .map(|p| (0..self.inst.sets.len()).filter(|&s| self.inst.sets[s].rect.contains_closed(p.coords())).collect())
                    .collect();
                (e, (0..self.inst.sets.len()).map(|i| self.scaled(i)).collect())
            }
            (_, Mode::HittingSet) => {
                let pts = &self.inst.points;
                let e = self
                    .live_sets
                    .values()
                    .map(|b| (0..pts.len()).filter(|&i| b.contains_closed(pts[i].1.coords())).collect())
                    .collect();
                (e, (0..pts.len()).map(|i| self.scaled(i)).collect())
            }
        };
        let r = opt_cover(&elems, &weights, budget).ok()?;
        (!r.timed_out).then(|| if self.weighted() { r.opt_value as f64 / 1000.0 } else { r.opt_value as f64 })
    }

    fn scaled(&self, i: usize) -> u64 {
        if self.weighted() {
            (self.weight_of(i) * 1000.0).round() as u64
        } else {
            1
        }
    }

    fn f_mu(&self) -> (Option<usize>, Option<usize>) {
        let m = match &self.state {
            State::DynSc(s) => s.metrics(),
            State::DynHs(s) => s.metrics(),
            _ => return (None, None),
        };
        (Some(m.f_meas), Some(m.mu_meas))
    }
}

fn checkpoint_set(total: usize, k: usize) -> Vec<bool> {
    let mut v = vec![false; total];
    if total == 0 || k == 0 {
        return v;
    }
    for c in 1..=k.min(total) {
        v[c * total / k.min(total) - 1] = true;
    }
    v
}

pub fn run_experiment(inst: &Instance, algo: Algo, cfg: &RunConfig, run_id: &str) -> Result<(RunMetrics, Vec<Row>), HarnessError> {
    let mut runner = Runner::new(inst, algo, cfg.eps)?;
    let checks = checkpoint_set(inst.events.len(), cfg.checkpoints);
    let mut rows = Vec::with_capacity(inst.events.len());
    let mut times = Vec::new();
    let mut max_ratio: Option<f64> = None;
    for (i, e) in inst.events.iter().enumerate() {
        let t0 = Instant::now();
        let delta = runner.apply(i, e, algo)?;
        let micros = if cfg.timing { t0.elapsed().as_micros() as u64 } else { 0 };
        times.push(micros);
        if !runner.feasible() {
            return Err(HarnessError::Feasibility { algo: algo.name().into(), event_idx: i });
        }
        let cost = runner.cost();
        let opt = if cfg.oracle && checks[i] { runner.opt(cfg.budget) } else { None };
        let ratio = opt.map(|o| if o == 0.0 { if cost == 0.0 { 1.0 } else { f64::INFINITY } } else { cost / o });
        if let Some(r) = ratio {
            max_ratio = Some(max_ratio.map_or(r, |m: f64| m.max(r)));
        }
        let (f_meas, mu_meas) = runner.f_mu();
        rows.push(Row {
            run_id: run_id.into(),
            algo: algo.name().into(),
            event_idx: i,
            op: e.op().into(),
            cost,
            delta,
            opt,
            ratio,
            f_meas,
            mu_meas,
            micros,
        });
    }
    let last = rows.last();
    let (f_meas, mu_meas) = runner.f_mu();
    let latency_micros = cfg.timing.then(|| {
        let mut t = times.clone();
        t.sort_unstable();
        let q = |f: f64| t.get(((t.len() as f64 - 1.0) * f).round() as usize).copied().unwrap_or(0);
        [q(0.5), q(0.9), q(0.99)]
    });
    let metrics = RunMetrics {
        run_id: run_id.into(),
        algo: algo.name().into(),
        events: rows.len(),
        final_cost: runner.cost(),
        opt: last.and_then(|r| r.opt),
        ratio: last.and_then(|r| r.ratio),
        f_meas,
        mu_meas,
        max_ratio,
        latency_micros,
    };
    Ok((metrics, rows))
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["run_id", "algo", "event_idx", "op", "cost", "delta", "opt", "ratio", "f_meas", "mu_meas", "micros"])
            .map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::interval_adversary_instance;
    use crate::harness::format::SetRecord;

    fn interval_instance() -> Instance {
        let (sets, pts) = interval_adversary_instance();
        let mut inst = Instance::new(1, 4, Mode::SetCover);
        inst.sets = sets.into_iter().enumerate().map(|(i, r)| SetRecord { id: i as u64, rect: r, weight: None }).collect();
        inst.events = pts.into_iter().enumerate().map(|(i, x)| Event::AddPoint(i as u64, Point::new(vec![x]).unwrap())).collect();
        inst
    }

    #[test]
    fn interval_ratio_two() {
        let cfg = RunConfig { oracle: true, ..RunConfig::default() };
        let (m, rows) = run_experiment(&interval_instance(), Algo::Interval, &cfg, "r0").unwrap();
        assert_eq!(m.final_cost, 2.0);
        assert_eq!(m.opt, Some(1.0));
        assert_eq!(m.ratio, Some(2.0));
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].delta, 2);
    }

    #[test]
    fn rejects_mismatched_algorithms() {
        let inst = interval_instance();
        assert!(matches!(run_experiment(&inst, Algo::Quadtree, &RunConfig::default(), "r"), Err(HarnessError::Unsupported(_))));
        assert!(matches!(run_experiment(&inst, Algo::Hitset, &RunConfig::default(), "r"), Err(HarnessError::Unsupported(_))));
    }

    #[test]
    fn csv_is_deterministic() {
        let inst = interval_instance();
        let cfg = RunConfig { oracle: true, ..RunConfig::default() };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_experiment(&inst, Algo::DynSc, &cfg, "x").unwrap().1, &mut a).unwrap();
        write_csv(&run_experiment(&inst, Algo::DynSc, &cfg, "x").unwrap().1, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("run_id,algo,event_idx,op,cost,delta,opt,ratio,f_meas,mu_meas,micros\n"));
    }

    #[test]
    fn checkpoints_spread() {
        assert_eq!(checkpoint_set(4, 2), vec![false, true, false, true]);
        assert_eq!(checkpoint_set(2, 20), vec![true, true]);
        assert!(checkpoint_set(0, 5).is_empty());
    }
}
