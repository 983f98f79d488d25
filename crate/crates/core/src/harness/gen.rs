//! Instance generators: lower-bound constructions and seeded random
//! workloads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{gen_quadrant_lb, gen_unitsquare_lb, interval_adversary_instance};
use crate::geom::{AxisBox, Point};
use crate::Result;

use super::format::{Event, Instance, Mode, SetRecord};

fn set_records(rects: Vec<AxisBox>) -> Vec<SetRecord> {
    rects.into_iter().enumerate().map(|(i, rect)| SetRecord { id: i as u64, rect, weight: None }).collect()
}

pub fn interval_lb() -> Instance {
    let (sets, pts) = interval_adversary_instance();
    let mut inst = Instance::new(1, 4, Mode::SetCover);
    inst.sets = set_records(sets);
    inst.events = pts.into_iter().enumerate().map(|(i, x)| Event::AddPoint(i as u64, Point::new(vec![x]).unwrap())).collect();
    inst
}

/// Sets of a lower-bound construction; points are chosen adaptively by the
/// adversary, so the event log is empty.
pub fn quadrant_lb(m: usize) -> Result<Instance> {
    let lb = gen_quadrant_lb(m)?;
    let mut inst = Instance::new(2, lb.n_side, Mode::SetCover);
    inst.sets = set_records(lb.sets);
    Ok(inst)
}

pub fn unitsquare_lb(m: usize) -> Result<Instance> {
    let lb = gen_unitsquare_lb(m)?;
    let mut inst = Instance::new(2, lb.n_side, Mode::SetCover);
    inst.sets = set_records(lb.sets);
    Ok(inst)
}

fn random_square(rng: &mut ChaCha8Rng, n: i64, max_side: i64) -> AxisBox {
    let s = rng.gen_range(0..=max_side.min(n - 1));
    AxisBox::square(rng.gen_range(0..n - s), rng.gen_range(0..n - s), s)
}

fn point_in(rng: &mut ChaCha8Rng, b: &AxisBox) -> Point {
    Point::new(b.lo().iter().zip(b.hi()).map(|(&a, &c)| rng.gen_range(a..=c)).collect()).unwrap()
}

/// `m` squares in `[0, n)^2` and up to `pts` distinct insertions, each inside
/// some square.
/// Candidate points are recorded too, so the instance also suits the
/// BBD-tree algorithm.
pub fn random_squares(n: i64, m: usize, pts: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rects: Vec<AxisBox> = (0..m).map(|_| random_square(&mut rng, n, (n / 2).max(1))).collect();
    let mut inst = Instance::new(2, n, Mode::SetCover);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..pts * 50 {
        if inst.points.len() == pts {
            break;
        }
        let r = &rects[rng.gen_range(0..rects.len())];
        let p = point_in(&mut rng, r);
        if p.coords().iter().all(|&c| c < n) && seen.insert(p.clone()) {
            let id = inst.points.len() as u64;
            inst.points.push((id, p.clone()));
            inst.point_weights.push(None);
            inst.events.push(Event::AddPoint(id, p));
        }
    }
    inst.sets = set_records(rects);
    inst
}

/// `m` boxes in `[0, n]^d` with optional integer weights in `[1, w_max]`,
/// then `ops` insertions and deletions of covered points.
pub fn random_dynamic(d: usize, n: i64, m: usize, ops: usize, w_max: u32, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = Instance::new(d, n, Mode::SetCover);
    let rects: Vec<AxisBox> = (0..m)
        .map(|_| {
            let lo: Vec<i64> = (0..d).map(|_| rng.gen_range(0..n)).collect();
            let hi = lo.iter().map(|&a| (a + rng.gen_range(0..=n / 4)).min(n)).collect();
            AxisBox::new(lo, hi).unwrap()
        })
        .collect();
    inst.sets = rects
        .iter()
        .enumerate()
        .map(|(i, r)| SetRecord {
            id: i as u64,
            rect: r.clone(),
            weight: (w_max > 1).then(|| rng.gen_range(1..=w_max) as f64),
        })
        .collect();
    let mut live: Vec<u64> = Vec::new();
    for id in 0..ops as u64 {
        if live.is_empty() || rng.gen_bool(0.6) {
            let r = &rects[rng.gen_range(0..rects.len())];
            inst.events.push(Event::AddPoint(id, point_in(&mut rng, r)));
            live.push(id);
        } else {
            let k = rng.gen_range(0..live.len());
            inst.events.push(Event::RemovePoint(live.swap_remove(k)));
        }
    }
    inst
}

/// `pts` fixed points in `[0, n)^d` and `ops` insertions and deletions of
/// squares, each holding at least one point.
pub fn random_hitting(d: usize, n: i64, pts: usize, ops: usize, deletions: bool, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = Instance::new(d, n, Mode::HittingSet);
    let mut seen = std::collections::HashSet::new();
    while inst.points.len() < pts && (seen.len() as i64) < n.pow(d as u32) {
        let p = Point::new((0..d).map(|_| rng.gen_range(0..n)).collect()).unwrap();
        if seen.insert(p.clone()) {
            inst.points.push((inst.points.len() as u64, p));
            inst.point_weights.push(None);
        }
    }
    let mut live: Vec<u64> = Vec::new();
    for id in 0..ops as u64 {
        if !deletions || live.is_empty() || rng.gen_bool(0.6) {
            let p = &inst.points.choose(&mut rng).unwrap().1;
            let side = rng.gen_range(1..=(n / 4).max(1));
            let lo: Vec<i64> = p.coords().iter().map(|&c| rng.gen_range((c - side).max(0)..=c)).collect();
            let lo: Vec<i64> = lo.iter().map(|&a| a.min(n - 1 - side).max(0)).collect();
            let side = lo.iter().map(|&a| (n - 1 - a).min(side)).min().unwrap().max(1);
            let mut b = AxisBox::cube(&lo, side);
            if !b.contains_closed(p.coords()) {
                b = AxisBox::cube(&p.coords().iter().map(|&c| c.min(n - 2).max(0)).collect::<Vec<_>>(), 1);
            }
            inst.events.push(Event::AddSet(id, b));
            live.push(id);
        } else {
            let k = rng.gen_range(0..live.len());
            inst.events.push(Event::RemoveSet(live.swap_remove(k)));
        }
    }
    inst
}
