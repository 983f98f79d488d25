//! Acceptance suite. Each test prints one `PASS` or `FAIL` line; run with
//! `cargo test -p geocover --test acceptance -- --nocapture --test-threads 1`
//! to see them in order.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geocover::bbd::{build_bbd, crossing_bound, crosses, depth_guard, greedy_crossing, Crossing};
use geocover::eval::{interval_adversary_instance, opt_hitting_set, opt_set_cover, Budget, IntervalOnline};
use geocover::ext_quadtree::build_extended;
use geocover::geom::{AxisBox, Point};
use geocover::harness::bench::{adversary_growth, bench_dynamic, write_rows};
use geocover::harness::gen::{random_dynamic, random_hitting, random_squares};
use geocover::harness::{run_experiment, Algo, Instance, RunConfig};
use geocover::hitset::HitState;
use geocover::quadtree::{offline_cover, CoverState};
use geocover::transforms::{
    cube_shift, hs_point_to_cube, hs_rect_to_point, point_to_dualpoint, rect_to_cube, round_weight, shift_box,
    shift_point, weight_class_count, CubeRecord,
};

fn report(n: u32, name: &str, ok: bool, detail: impl std::fmt::Display) {
    println!("{} criterion {n:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn log2(n: i64) -> f64 {
    (n as f64).log2()
}

fn random_points(rng: &mut ChaCha8Rng, n: i64, k: usize) -> Vec<Point> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < k && (seen.len() as i64) < n * n {
        let p = Point::xy(rng.gen_range(0..n), rng.gen_range(0..n));
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

#[test]
fn c01_interval_tightness() {
    let (sets, pts) = interval_adversary_instance();
    let t0 = Instant::now();
    let mut alg = IntervalOnline::new(&sets).unwrap();
    for &x in &pts {
        alg.insert(x).unwrap();
    }
    let elapsed = t0.elapsed();
    let cost = alg.chosen().len();
    let points: Vec<Point> = pts.iter().map(|&x| Point::new(vec![x]).unwrap()).collect();
    let opt = opt_set_cover(&points, &sets, Budget::default()).unwrap().opt_value;
    let ratio = cost as f64 / opt as f64;
    report(
        1,
        "interval tightness",
        cost == 2 && opt == 1 && ratio == 2.0 && elapsed < Duration::from_millis(1),
        format!("alg={cost} opt={opt} ratio={ratio} in {elapsed:?}"),
    );
}

#[test]
fn c02_monotone_insertions() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut prefixes = 0;
    let mut violations = 0;
    for k in 0..200 {
        let n = 1i64 << rng.gen_range(3..=8);
        let m = rng.gen_range(1..=50);
        let pts = rng.gen_range(1..=40);
        let inst = random_squares(n, m, pts, 1000 + k);
        let squares: Vec<AxisBox> = inst.sets.iter().map(|s| s.rect.clone()).collect();
        let mut online = CoverState::new(squares.clone(), n).unwrap();
        let mut prev: BTreeSet<usize> = BTreeSet::new();
        let mut inserted = Vec::new();
        for (_, p) in &inst.points {
            online.online_insert(p.clone()).unwrap();
            inserted.push(p.clone());
            let now: BTreeSet<usize> = online.chosen().iter().copied().collect();
            let offline: BTreeSet<usize> = offline_cover(&inserted, &squares, n).unwrap().into_iter().collect();
            if !prev.is_subset(&now) || now != offline {
                violations += 1;
            }
            prev = now;
            prefixes += 1;
        }
    }
    let elapsed = t0.elapsed();
    report(
        2,
        "monotone insertions",
        violations == 0 && elapsed < Duration::from_secs(30),
        format!("{prefixes} prefixes over 200 instances, {violations} violations, {elapsed:?}"),
    );
}

fn replay_until(target: usize, algo: Algo, mut next: impl FnMut(u64) -> Instance) -> (usize, Vec<String>) {
    let mut events = 0;
    let mut failures = Vec::new();
    let mut seed = 0;
    while events < target {
        let inst = next(seed);
        match run_experiment(&inst, algo, &RunConfig::default(), "fuzz") {
            Ok((m, _)) => events += m.events,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                events += inst.events.len();
            }
        }
        seed += 1;
    }
    (events, failures)
}

#[test]
fn c03_feasibility_after_every_event() {
    let target = 10_000;
    type Gen = Box<dyn FnMut(u64) -> Instance>;
    let runs: Vec<(Algo, Gen)> = vec![
        (Algo::Quadtree, Box::new(|s| random_squares(64, 20, 40, s))),
        (Algo::Bbd, Box::new(|s| random_squares(64, 20, 40, 7_000 + s))),
        (Algo::Hitset, Box::new(|s| random_hitting(2, 64, 30, 50, false, s))),
        (Algo::DynSc, Box::new(|s| random_dynamic(1 + (s % 2) as usize, 64, 16, 100, 1 + (s % 3) as u32 * 4, s))),
        (Algo::DynHs, Box::new(|s| random_hitting(1 + (s % 2) as usize, 32, 16, 100, true, s))),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (algo, gen) in runs {
        let (events, failures) = replay_until(target, algo, gen);
        if !failures.is_empty() {
            println!("  {}: {:?}", algo.name(), &failures[..failures.len().min(3)]);
        }
        ok &= failures.is_empty() && events >= target;
        parts.push(format!("{}={events}/{} bad", algo.name(), failures.len()));
    }
    report(3, "feasibility after every event", ok, parts.join(" "));
}

#[test]
fn c04_offline_constant_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    let mut solved = 0;
    while solved < 200 {
        let n = 1i64 << rng.gen_range(2..=8);
        let inst = random_squares(n, rng.gen_range(1..=15), rng.gen_range(1..=20), rng.gen());
        let squares: Vec<AxisBox> = inst.sets.iter().map(|s| s.rect.clone()).collect();
        let pts: Vec<Point> = inst.points.iter().map(|(_, p)| p.clone()).collect();
        let opt = opt_set_cover(&pts, &squares, Budget::default()).unwrap();
        if opt.timed_out {
            continue;
        }
        solved += 1;
        let alg = offline_cover(&pts, &squares, n).unwrap();
        let bound = 80.0 * log2(n) * opt.opt_value as f64;
        if alg.len() as f64 > bound {
            violations += 1;
        }
        worst = worst.max(alg.len() as f64 / (log2(n) * opt.opt_value.max(1) as f64));
    }
    let elapsed = t0.elapsed();
    report(
        4,
        "offline constant bound",
        violations == 0 && elapsed < Duration::from_secs(120),
        format!("{solved} instances, {violations} violations, worst |A|/(log N * OPT) = {worst:.3}, {elapsed:?}"),
    );
}

fn hitting_runs(count: usize, seed: u64) -> Vec<(i64, Vec<Point>, Vec<AxisBox>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = 1i64 << rng.gen_range(2..=8);
            let inst = random_hitting(2, n, rng.gen_range(1..=20), rng.gen_range(1..=30), false, rng.gen());
            let pts = inst.points.iter().map(|(_, p)| p.clone()).collect();
            let sq = inst
                .events
                .iter()
                .map(|e| match e {
                    geocover::harness::Event::AddSet(_, b) => b.clone(),
                    _ => unreachable!(),
                })
                .collect();
            (n, pts, sq)
        })
        .collect()
}

#[test]
fn c05_hitting_round_bound() {
    let mut rounds = 0;
    let (mut max_added, mut max_cells, mut repeats) = (0, 0, 0);
    for (n, pts, squares) in hitting_runs(300, 5) {
        let mut st = HitState::new(&pts, n).unwrap();
        let mut seen = HashSet::new();
        for s in &squares {
            let out = st.insert_square(s).unwrap();
            rounds += 1;
            max_added = max_added.max(out.added.len());
            max_cells = max_cells.max(out.activated.len());
            for (key, _) in &out.activated {
                if !seen.insert(*key) {
                    repeats += 1;
                }
            }
        }
    }
    report(
        5,
        "hitting-set round bound",
        max_added <= 16 && max_cells <= 4 && repeats == 0,
        format!("{rounds} rounds, max points/round {max_added}, max cells/round {max_cells}, repeated cells {repeats}"),
    );
}

#[test]
fn c06_hitting_total_bound() {
    let mut violations = 0;
    let mut solved = 0;
    let mut worst: f64 = 0.0;
    for (n, pts, squares) in hitting_runs(300, 6) {
        let mut st = HitState::new(&pts, n).unwrap();
        for s in &squares {
            st.insert_square(s).unwrap();
        }
        let opt = opt_hitting_set(&pts, &squares, Budget::default()).unwrap();
        if opt.timed_out {
            continue;
        }
        solved += 1;
        let size = st.chosen().len() as f64;
        if size > 320.0 * log2(n) * opt.opt_value as f64 {
            violations += 1;
        }
        if opt.opt_value > 0 {
            worst = worst.max(size / (log2(n) * opt.opt_value as f64));
        }
    }
    report(
        6,
        "hitting-set total bound",
        violations == 0 && solved >= 250,
        format!("{solved} instances, {violations} violations, worst |P'|/(log N * OPT) = {worst:.3}"),
    );
}

fn inside(p: &[i64], b: &AxisBox) -> bool {
    p.iter().zip(b.lo()).zip(b.hi()).all(|((&x, &a), &c)| a <= x && x <= c)
}

/// Mismatches between direct containment and the two transformed tests.
fn transform_mismatches(p: &[i64], r: &AxisBox, n: i64) -> u64 {
    let want = inside(p, r);
    let cube = rect_to_cube(r, 0).cube;
    let mut bad = 0;
    if inside(&point_to_dualpoint(p), &cube) != want {
        bad += 1;
    }
    let s = cube_shift(n);
    if inside(&shift_point(&point_to_dualpoint(p), s), &shift_box(&cube, s)) != want {
        bad += 1;
    }
    if p.iter().all(|&c| (0..=n).contains(&c)) {
        let pc = hs_point_to_cube(&Point::new(p.to_vec()).unwrap(), n).unwrap();
        if inside(&hs_rect_to_point(r), &pc) != want {
            bad += 1;
        }
    }
    bad
}

#[test]
fn c07_transform_equivalence() {
    let mut checks = 0u64;
    let mut failures = 0u64;
    let mut check = |p: &[i64], r: &AxisBox, n: i64| {
        failures += transform_mismatches(p, r, n);
        checks += 1;
    };
    let n = 4;
    for a in 0..=n {
        for b in a..=n {
            for x in -1..=n + 1 {
                check(&[x], &AxisBox::interval(a, b), n);
            }
        }
    }
    let n = 3;
    for x0 in 0..=n {
        for x1 in x0..=n {
            for y0 in 0..=n {
                for y1 in y0..=n {
                    let r = AxisBox::rect(x0, y0, x1, y1);
                    for px in -1..=n + 1 {
                        for py in -1..=n + 1 {
                            check(&[px, py], &r, n);
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random = 0u64;
    for _ in 0..100_000 {
        let d = rng.gen_range(1..=4);
        let n = 1i64 << rng.gen_range(1..=12);
        let lo: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=n)).collect();
        let hi: Vec<i64> = lo.iter().map(|&a| rng.gen_range(a..=n)).collect();
        let r = AxisBox::new(lo.clone(), hi.clone()).unwrap();
        let p: Vec<i64> = if rng.gen_bool(0.5) {
            lo.iter().zip(&hi).map(|(&a, &b)| rng.gen_range(a - 1..=b + 1).clamp(0, n)).collect()
        } else {
            (0..d).map(|_| rng.gen_range(-1..=n + 1)).collect()
        };
        check(&p, &r, n);
        random += 1;
    }
    let exhaustive = checks - random;
    report(
        7,
        "transform equivalence",
        failures == 0 && random >= 100_000,
        format!("{exhaustive} exhaustive + {random} random checks, {failures} failures"),
    );
}

fn random_cubes(rng: &mut ChaCha8Rng, m: usize, dims: usize, span: i64, max_side: i64) -> Vec<CubeRecord> {
    (0..m)
        .map(|i| {
            let side = rng.gen_range(0..=max_side);
            let lo: Vec<i64> = (0..dims).map(|_| rng.gen_range(0..=span - side)).collect();
            CubeRecord { cube: AxisBox::cube(&lo, side), source_id: i, delta: side }
        })
        .collect()
}

fn lattice(b: &AxisBox) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for (&a, &c) in b.lo().iter().zip(b.hi()) {
        out = out.into_iter().flat_map(|p| (a..=c).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

#[test]
fn c08_extended_quadtree() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut probes, mut uncovered, mut unsound) = (0u64, 0u64, 0u64);
    let (mut cubes_checked, mut decomposition_gaps) = (0u64, 0u64);
    let mut instances: Vec<(usize, Vec<CubeRecord>)> = Vec::new();
    for k in 0..40 {
        let span = [8, 16, 32][k % 3];
        let m = rng.gen_range(1..=12);
        instances.push((2, random_cubes(&mut rng, m, 2, span, span / 2)));
    }
    for _ in 0..20 {
        let rects: Vec<AxisBox> = (0..rng.gen_range(1..=12))
            .map(|_| {
                let a = rng.gen_range(0..=16);
                AxisBox::interval(a, rng.gen_range(a..=16))
            })
            .collect();
        let cubes = rects.iter().enumerate().map(|(i, r)| {
            let c = rect_to_cube(r, i);
            CubeRecord { cube: shift_box(&c.cube, cube_shift(16)), ..c }
        });
        instances.push((2, cubes.collect()));
    }
    for _ in 0..6 {
        let m = rng.gen_range(1..=6);
        instances.push((4, random_cubes(&mut rng, m, 4, 8, 4)));
    }
    for (dims, cubes) in &instances {
        let t = build_extended(cubes, *dims).unwrap();
        if *dims == 2 {
            let top = cubes.iter().map(|c| c.cube.hi().iter().copied().max().unwrap()).max().unwrap() + 1;
            for p in lattice(&AxisBox::cube(&[0, 0], top)) {
                probes += 1;
                let hats = t.sets_containing(&p);
                if cubes.iter().any(|c| inside(&p, &c.cube)) && hats.is_empty() {
                    uncovered += 1;
                }
                for h in hats {
                    let hat = &t.hat_sets()[h];
                    if !inside(&p, &hat.region) || !inside(&p, &cubes[hat.source].cube) {
                        unsound += 1;
                    }
                }
            }
        }
        for (i, c) in cubes.iter().enumerate() {
            cubes_checked += 1;
            let dec = t.cover_decomposition(i).unwrap();
            let regions: Vec<&AxisBox> = dec.iter().map(|&h| &t.hat_sets()[h].region).collect();
            if lattice(&c.cube).iter().any(|p| !regions.iter().any(|r| inside(p, r))) {
                decomposition_gaps += 1;
            }
        }
    }
    let f_at = |m: usize| {
        let n = 8 * m as i64;
        let inst = random_dynamic(1, n, m, 0, 1, 88);
        let cubes: Vec<CubeRecord> = inst
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let c = rect_to_cube(&s.rect, i);
                CubeRecord { cube: shift_box(&c.cube, cube_shift(n)), ..c }
            })
            .collect();
        build_extended(&cubes, 2).unwrap().metrics().max_frequency
    };
    let (f128, f512) = (f_at(128), f_at(512));
    let ok_a = uncovered == 0 && unsound == 0;
    let ok_b = decomposition_gaps == 0;
    let ok_c = f512 <= 4 * f128;
    report(
        8,
        "extended quad-tree",
        ok_a && ok_b && ok_c,
        format!(
            "(a) {probes} probes, {uncovered} uncovered, {unsound} unsound; (b) {cubes_checked} cubes, {decomposition_gaps} gaps; (c) f(128)={f128} f(512)={f512}"
        ),
    );
}

#[test]
fn c09_dynamic_ratio() {
    let cfg = RunConfig { oracle: true, checkpoints: 20, ..RunConfig::default() };
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in 0..24u64 {
        let d = 1 + (seed % 2) as usize;
        let (algo, inst) = if seed % 4 < 2 {
            (Algo::DynSc, random_dynamic(d, 32, 12, 80, 1 + (seed % 3) as u32 * 3, seed))
        } else {
            (Algo::DynHs, random_hitting(d, 16, 12, 80, true, seed))
        };
        let (_, rows) = run_experiment(&inst, algo, &cfg, "c9").unwrap();
        for r in rows.iter().filter(|r| r.opt.is_some()) {
            let opt = r.opt.unwrap();
            let bound = (1.0 + cfg.eps) * r.f_meas.unwrap() as f64 * r.mu_meas.unwrap() as f64 * opt;
            checked += 1;
            if r.cost > bound + 1e-9 {
                violations.push(format!("{} seed {seed} event {}", algo.name(), r.event_idx));
            }
            if opt > 0.0 {
                worst = worst.max(r.cost / opt);
            }
        }
    }
    report(
        9,
        "dynamic ratio bound",
        violations.is_empty() && checked >= 24 * 20,
        format!("{checked} checkpoints, {} violations, worst cost/OPT {worst:.3}", violations.len()),
    );
}

fn classes_oracle(w: f64) -> u32 {
    let mut k = 0u32;
    while ((1u64 << k) as f64) < w {
        k += 1;
    }
    k + 1
}

#[test]
fn c10_weight_rounding() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    let mut weights: Vec<f64> = (0..9_980).map(|_| 2f64.powf(rng.gen_range(0.0..30.0))).collect();
    weights.extend((0..20).map(|k| (1u64 << k) as f64));
    for &w in &weights {
        let r = round_weight(w).unwrap();
        let q = r as f64 / w;
        if !r.is_power_of_two() || !(1.0..=2.0).contains(&q) || weight_class_count(w).unwrap() != classes_oracle(w) {
            bad += 1;
        }
    }
    report(10, "weight rounding", bad == 0 && weights.len() == 10_000, format!("{} weights, {bad} failures", weights.len()));
}

#[test]
fn c11_bbd_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut issues: HashMap<&str, usize> = HashMap::new();
    let mut largest = 0;
    for k in 0..100 {
        let n = if k % 10 == 0 { 2000 } else { rng.gen_range(1..=2000) };
        let pts = if k % 3 == 0 {
            let mut c = random_points(&mut rng, 4096, n / 2);
            let base = c.clone();
            for p in base.iter().take(n - c.len()) {
                let q = Point::xy(p.x() / 64, p.y() / 64 + 4096);
                if !c.contains(&q) {
                    c.push(q);
                }
            }
            c
        } else {
            let side = 1 << rng.gen_range(6..=12);
            random_points(&mut rng, side, n)
        };
        largest = largest.max(pts.len());
        let t = build_bbd(&pts).unwrap();
        let guard = depth_guard(pts.len());
        let mut per_leaf = vec![0usize; t.nodes.len()];
        for node in &t.nodes {
            if !node.cell.aspect_ratio_ok(3) {
                *issues.entry("aspect").or_default() += 1;
            }
            if !node.cell.is_sticky() {
                *issues.entry("sticky").or_default() += 1;
            }
        }
        let mut probes: Vec<[i64; 2]> = pts.iter().map(|p| [p.x(), p.y()]).collect();
        probes.extend((0..200).map(|_| [rng.gen_range(0..t.side), rng.gen_range(0..t.side)]));
        for (pi, p) in probes.iter().enumerate() {
            let mut per_depth: HashMap<usize, usize> = HashMap::new();
            let mut total = 0;
            for (i, node) in t.nodes.iter().enumerate() {
                if node.cell.contains(p) {
                    total += 1;
                    *per_depth.entry(node.cell.depth).or_default() += 1;
                    if node.children.is_none() && pi < pts.len() {
                        per_leaf[i] += 1;
                    }
                }
            }
            if per_depth.values().any(|&c| c > 1) {
                *issues.entry("overlap").or_default() += 1;
            }
            if pi < pts.len() && (total > guard || total != t.path(p).len()) {
                *issues.entry("depth").or_default() += 1;
            }
        }
        if per_leaf.iter().any(|&c| c > 1) {
            *issues.entry("leaf").or_default() += 1;
        }
    }
    let (runs, greedy_over, worst) = greedy_crossing_trials();
    let ok = issues.is_empty() && greedy_over == 0;
    report(
        11,
        "BBD structure",
        ok,
        format!(
            "100 trees up to n={largest}, issues {issues:?}; crossing greedy {runs} runs, {greedy_over} above B+1 (worst excess {worst})"
        ),
    );
}

/// Random regions with crossing squares; returns (runs, runs above B+1,
/// largest `picks - (B+1)`).
fn greedy_crossing_trials() -> (usize, usize, i64) {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let (mut runs, mut over, mut worst) = (0, 0, 0i64);
    while runs < 2000 {
        let h = rng.gen_range(1..=16);
        let w = h * rng.gen_range(1..=6) - rng.gen_range(0..h);
        let (region, dir) = if rng.gen_bool(0.5) {
            (AxisBox::rect(0, 0, w, h), Crossing::Vertical)
        } else {
            (AxisBox::rect(0, 0, h, w), Crossing::Horizontal)
        };
        let squares: Vec<AxisBox> = (0..rng.gen_range(1..=20))
            .map(|_| {
                let s = rng.gen_range(h..=2 * h + 4);
                let (cx, cy) = (rng.gen_range(-s..=w.max(h)), rng.gen_range(-s..=w.max(h)));
                AxisBox::square(cx, cy, s)
            })
            .filter(|s| crosses(s, &region, dir))
            .collect();
        if squares.is_empty() {
            continue;
        }
        let cand: Vec<(usize, &AxisBox)> = squares.iter().enumerate().collect();
        let pts: Vec<[i64; 2]> = (0..rng.gen_range(1..=30))
            .map(|_| [rng.gen_range(0..=region.hi()[0]), rng.gen_range(0..=region.hi()[1])])
            .filter(|p| squares.iter().any(|s| s.contains_closed(p)))
            .collect();
        let picks = greedy_crossing(&region, &pts, &cand, dir).unwrap();
        let b = crossing_bound(&region, dir);
        runs += 1;
        let excess = picks.len() as i64 - (b + 1);
        if excess > 0 {
            over += 1;
            worst = worst.max(excess);
        }
    }
    (runs, over, worst)
}

#[test]
fn c12_lower_bound_growth() {
    let ms = [4, 16, 64, 256];
    let rows = adversary_growth(&ms).unwrap();
    let costs: Vec<usize> = rows.iter().map(|r| r.cost).collect();
    let ok = rows.iter().all(|r| r.opt == 1) && costs.windows(2).all(|w| w[0] <= w[1]);
    report(12, "lower-bound growth", ok, format!("m={ms:?} forced cost={costs:?} opt=1"));
}

#[test]
fn c13_update_cost_trend() {
    let ms = [32, 64, 128, 256];
    let rows = bench_dynamic(1, &ms, 8, 13).unwrap();
    let mut csv = Vec::new();
    write_rows(&rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let header = text.lines().next().unwrap();
    let col = header.split(',').position(|h| h == "mean_touched").unwrap();
    let touched: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    let growth: Vec<f64> = touched.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = touched.len() == ms.len() && growth.iter().all(|&g| g <= 2.0);
    report(
        13,
        "update-cost trend",
        ok,
        format!("m={ms:?} mean touched={:?} growth={:?}", touched.iter().map(|t| format!("{t:.2}")).collect::<Vec<_>>(), growth.iter().map(|g| format!("{g:.2}")).collect::<Vec<_>>()),
    );
}
