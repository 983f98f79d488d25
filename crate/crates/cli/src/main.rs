use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use geocover::eval::{opt_cover, Budget};
use geocover::harness::bench::{adversary_growth, bench_dynamic, write_rows};
use geocover::harness::plot::{line_chart, series_from_csv};
use geocover::harness::{gen, parse_instance, run_experiment, serialize_instance, write_csv, Algo, HarnessError, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "geocover", version, about = "Online and dynamic geometric set cover experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay an instance against one or more algorithms and write per-event CSV.
    Run {
        instance: PathBuf,
        /// interval, quadtree, offline, bbd, hitset, dyn-sc or dyn-hs. Repeatable.
        #[arg(short, long = "algo", required = true)]
        algos: Vec<Algo>,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 20)]
        checkpoints: usize,
        /// Record per-event wall time. Rows are no longer byte-stable.
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance file.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Construction size, or number of sets for random kinds.
        #[arg(short, long, default_value_t = 16)]
        m: usize,
        #[arg(short = 'N', long = "grid", default_value_t = 256)]
        n_side: i64,
        /// Points for `squares` and `hitting`.
        #[arg(short, long, default_value_t = 40)]
        points: usize,
        /// Events for `dynamic` and `hitting`.
        #[arg(long, default_value_t = 200)]
        ops: usize,
        #[arg(short, long, default_value_t = 2)]
        dim: usize,
        /// Largest integer weight for `dynamic`. 1 leaves sets unweighted.
        #[arg(long, default_value_t = 1)]
        max_weight: u32,
        /// Mix `-S` events into `hitting`. Only dyn-hs accepts them.
        #[arg(long)]
        deletions: bool,
        #[arg(long, env = "GEOCOVER_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum of the state left after the whole event log.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        max_nodes: u64,
        #[arg(long, default_value_t = 10.0)]
        max_secs: f64,
    },
    /// Halving adversary against the quad-tree algorithm on unit squares.
    Adversary {
        #[arg(short, long, value_delimiter = ',', default_value = "4,16,64,256")]
        ms: Vec<usize>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Per-operation cost of the dynamic set cover as m grows.
    Bench {
        #[arg(short, long, default_value_t = 1)]
        dim: usize,
        #[arg(short, long, value_delimiter = ',', default_value = "16,32,64,128")]
        ms: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        ops_per_set: usize,
        #[arg(long, env = "GEOCOVER_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render an SVG line chart from two CSV columns.
    Plot {
        csv: PathBuf,
        #[arg(short, long, default_value = "m")]
        x: String,
        #[arg(short, long, default_value = "ratio")]
        y: String,
        #[arg(short, long)]
        group: Option<String>,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        title: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    IntervalLb,
    QuadrantLb,
    UnitsquareLb,
    Squares,
    Dynamic,
    Hitting,
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(path: &Path) -> Result<geocover::harness::Instance, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

fn cmd_run(
    path: &Path,
    algos: &[Algo],
    cfg: RunConfig,
    out: &Option<PathBuf>,
) -> Result<(), HarnessError> {
    let inst = load(path)?;
    let results: Vec<_> = std::thread::scope(|s| {
        let hs: Vec<_> = algos
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let (inst, cfg) = (&inst, &cfg);
                s.spawn(move || run_experiment(inst, a, cfg, &format!("r{i}-{}", a.name())))
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("run worker panicked")).collect()
    });
    let mut rows = Vec::new();
    for r in results {
        let (m, rs) = r?;
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v}"));
        eprintln!(
            "{}: events={} cost={} opt={} ratio={} max_ratio={} f={} mu={}{}",
            m.algo,
            m.events,
            m.final_cost,
            fmt(m.opt),
            fmt(m.ratio),
            fmt(m.max_ratio),
            m.f_meas.map_or("-".into(), |v| v.to_string()),
            m.mu_meas.map_or("-".into(), |v| v.to_string()),
            m.latency_micros.map_or(String::new(), |[a, b, c]| format!(" p50={a}us p90={b}us p99={c}us")),
        );
        rows.extend(rs);
    }
    let w = sink(out).map_err(|e| HarnessError::Io(e.to_string()))?;
    write_csv(&rows, w)
}

fn cmd_oracle(path: &Path, budget: Budget) -> Result<(), HarnessError> {
    let inst = load(path)?;
    let (pts, rects) = inst.final_state();
    let weights: std::collections::HashMap<u64, f64> = match inst.mode {
        Mode::SetCover => inst.sets.iter().map(|s| (s.id, s.weight_or_one())).collect(),
        Mode::HittingSet => inst.points.iter().zip(&inst.point_weights).map(|((id, _), w)| (*id, w.unwrap_or(1.0))).collect(),
    };
    let (elems, cands): (Vec<Vec<usize>>, Vec<u64>) = match inst.mode {
        Mode::SetCover => (
            pts.iter().map(|(_, p)| (0..rects.len()).filter(|&j| rects[j].1.contains_closed(p.coords())).collect()).collect(),
            rects.iter().map(|(id, _)| *id).collect(),
        ),
        Mode::HittingSet => (
            rects.iter().map(|(_, b)| (0..pts.len()).filter(|&j| b.contains_closed(pts[j].1.coords())).collect()).collect(),
            pts.iter().map(|(id, _)| *id).collect(),
        ),
    };
    let w: Vec<u64> = cands.iter().map(|id| (weights.get(id).copied().unwrap_or(1.0) * 1000.0).round() as u64).collect();
    let r = opt_cover(&elems, &w, budget).map_err(|source| HarnessError::Algo { event_idx: inst.events.len(), source })?;
    let ids: Vec<String> = r.opt_ids.iter().map(|&i| cands[i].to_string()).collect();
    println!("opt={}", r.opt_value as f64 / 1000.0);
    println!("ids={}", ids.join(","));
    println!("nodes={} timed_out={}", r.nodes_explored, r.timed_out);
    Ok(())
}

fn real_main(cli: Cli) -> Result<(), HarnessError> {
    let io_err = |e: anyhow::Error| HarnessError::Io(format!("{e:#}"));
    let wrap = |source| HarnessError::Algo { event_idx: 0, source };
    match cli.cmd {
        Cmd::Run { instance, algos, oracle, checkpoints, timing, eps, out } => {
            let cfg = RunConfig { oracle, checkpoints, timing, eps, ..RunConfig::default() };
            cmd_run(&instance, &algos, cfg, &out)
        }
        Cmd::Gen { kind, m, n_side, points, ops, dim, max_weight, deletions, seed, out } => {
            let inst = match kind {
                GenKind::IntervalLb => gen::interval_lb(),
                GenKind::QuadrantLb => gen::quadrant_lb(m).map_err(wrap)?,
                GenKind::UnitsquareLb => gen::unitsquare_lb(m).map_err(wrap)?,
                GenKind::Squares => gen::random_squares(n_side, m, points, seed),
                GenKind::Dynamic => gen::random_dynamic(dim, n_side, m, ops, max_weight, seed),
                GenKind::Hitting => gen::random_hitting(dim, n_side, points, ops, deletions, seed),
            };
            let mut w = sink(&out).map_err(io_err)?;
            w.write_all(serialize_instance(&inst).as_bytes()).map_err(|e| HarnessError::Io(e.to_string()))
        }
        Cmd::Oracle { instance, max_nodes, max_secs } => {
            cmd_oracle(&instance, Budget { max_nodes, max_time: std::time::Duration::from_secs_f64(max_secs) })
        }
        Cmd::Adversary { ms, out } => write_rows(&adversary_growth(&ms)?, sink(&out).map_err(io_err)?),
        Cmd::Bench { dim, ms, ops_per_set, seed, out } => {
            write_rows(&bench_dynamic(dim, &ms, ops_per_set, seed)?, sink(&out).map_err(io_err)?)
        }
        Cmd::Plot { csv, x, y, group, log_x, title, out } => {
            let text = fs::read_to_string(&csv).map_err(|e| HarnessError::Io(format!("{}: {e}", csv.display())))?;
            let series = series_from_csv(&text, &x, &y, group.as_deref())?;
            let title = title.unwrap_or_else(|| format!("{y} vs {x}"));
            fs::write(&out, line_chart(&series, &title, &x, &y, log_x)).map_err(|e| HarnessError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
