//! Update-cost sweeps for the dynamic set cover and lower-bound games.

use std::time::Instant;

use crate::dyn_geom::DynSetCover;
use crate::eval::{gen_unitsquare_lb, play_halving_adversary};
use crate::quadtree::CoverState;

use super::format::Event;
use super::gen::random_dynamic;
use super::HarnessError;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BenchRow {
    pub m: usize,
    pub d: usize,
    pub ops: usize,
    pub mean_touched: f64,
    pub max_touched: usize,
    pub mean_micros: f64,
    pub preprocess_micros: u64,
    pub f_meas: usize,
    pub mu_meas: usize,
    pub hat_sets: usize,
}

/// Replays a random workload with `ops_per_set * m` operations for each `m`.
/// Runs fan out over threads; rows come back in the order of `ms`.
pub fn bench_dynamic(d: usize, ms: &[usize], ops_per_set: usize, seed: u64) -> Result<Vec<BenchRow>, HarnessError> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = ms
            .iter()
            .map(|&m| scope.spawn(move || bench_one(d, m, ops_per_set * m, seed.wrapping_add(m as u64))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    })
}

fn bench_one(d: usize, m: usize, ops: usize, seed: u64) -> Result<BenchRow, HarnessError> {
    let n = 8 * m as i64;
    let inst = random_dynamic(d, n, m, ops, 1, seed);
    let rects: Vec<_> = inst.sets.iter().map(|s| s.rect.clone()).collect();
    let t0 = Instant::now();
    let mut h = DynSetCover::new(&rects, None, 1.0).map_err(|e| HarnessError::Algo { event_idx: 0, source: e })?;
    let preprocess_micros = t0.elapsed().as_micros() as u64;
    let mut touched = 0usize;
    let mut max_touched = 0;
    let t1 = Instant::now();
    for (i, e) in inst.events.iter().enumerate() {
        let r = match e {
            Event::AddPoint(id, p) => h.insert_point(*id, p),
            Event::RemovePoint(id) => h.delete_point(*id),
            _ => unreachable!("set cover workload"),
        };
        r.map_err(|source| HarnessError::Algo { event_idx: i, source })?;
        touched += h.last_touched();
        max_touched = max_touched.max(h.last_touched());
    }
    let m_ = h.metrics();
    let k = inst.events.len().max(1) as f64;
    Ok(BenchRow {
        m,
        d,
        ops: inst.events.len(),
        mean_touched: touched as f64 / k,
        max_touched,
        mean_micros: t1.elapsed().as_micros() as f64 / k,
        preprocess_micros,
        f_meas: m_.f_meas,
        mu_meas: m_.mu_meas,
        hat_sets: m_.hat_sets,
    })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AdversaryRow {
    pub m: usize,
    pub rounds: usize,
    pub cost: usize,
    pub opt: u64,
    pub ratio: f64,
}

/// Halving adversary against the quad-tree algorithm on the unit-square
/// construction.
pub fn adversary_growth(ms: &[usize]) -> Result<Vec<AdversaryRow>, HarnessError> {
    let wrap = |source| HarnessError::Algo { event_idx: 0, source };
    ms.iter()
        .map(|&m| {
            let inst = gen_unitsquare_lb(m).map_err(wrap)?;
            let mut alg = CoverState::new(inst.sets.clone(), inst.n_side).map_err(wrap)?;
            let t = play_halving_adversary(&mut alg, &inst).map_err(wrap)?;
            Ok(AdversaryRow {
                m,
                rounds: t.rounds.len(),
                cost: t.rounds.last().map_or(0, |r| r.cost),
                opt: t.opt,
                ratio: t.ratio,
            })
        })
        .collect()
}

pub fn write_rows<T: serde::Serialize, W: std::io::Write>(rows: &[T], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep() {
        let rows = bench_dynamic(1, &[4, 8], 4, 1).unwrap();
        assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![4, 8]);
        assert!(rows.iter().all(|r| r.mean_touched > 0.0 && r.f_meas >= 1));
        let adv = adversary_growth(&[2, 4]).unwrap();
        assert!(adv.iter().all(|r| r.opt == 1));
        assert_eq!(adv[1].rounds, 3);
    }
}
