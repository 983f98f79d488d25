//! Instance files, experiment replay, generators, benchmarks and charts.

pub mod bench;
pub mod format;
pub mod gen;
pub mod plot;
pub mod run;

use std::str::FromStr;

use thiserror::Error;

pub use format::{parse_instance, serialize_instance, Event, Instance, Mode, SetRecord};
pub use run::{run_experiment, write_csv, Row, RunConfig, RunMetrics};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{algo}: solution infeasible after event {event_idx}")]
    Feasibility { algo: String, event_idx: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("event {event_idx}: {source}")]
    Algo { event_idx: usize, source: crate::Error },
    #[error("{0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Feasibility { .. } => 2,
            HarnessError::Parse { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Interval,
    Quadtree,
    Offline,
    Bbd,
    Hitset,
    DynSc,
    DynHs,
}

pub const ALGOS: [Algo; 7] = [Algo::Interval, Algo::Quadtree, Algo::Offline, Algo::Bbd, Algo::Hitset, Algo::DynSc, Algo::DynHs];

impl Algo {
    pub fn name(&self) -> &'static str {
        match self {
            Algo::Interval => "interval",
            Algo::Quadtree => "quadtree",
            Algo::Offline => "offline",
            Algo::Bbd => "bbd",
            Algo::Hitset => "hitset",
            Algo::DynSc => "dyn-sc",
            Algo::DynHs => "dyn-hs",
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Algo::Hitset | Algo::DynHs => Mode::HittingSet,
            _ => Mode::SetCover,
        }
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ALGOS.iter().copied().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ALGOS.iter().map(|a| a.name()).collect();
            format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Feasibility { algo: "bbd".into(), event_idx: 3 }.exit_code(), 2);
        assert_eq!(HarnessError::Parse { line: 1, msg: String::new() }.exit_code(), 3);
        assert_eq!(HarnessError::Io(String::new()).exit_code(), 1);
        assert_eq!("dyn-hs".parse::<Algo>(), Ok(Algo::DynHs));
        assert!("greedy".parse::<Algo>().is_err());
    }
}
