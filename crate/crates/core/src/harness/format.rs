//! Line-oriented instance files.
//!
//! ```text
//! META dim=2 N=16 mode=set_cover
//! SET 0 0 0 4 4 w=2
//! POINT 0 1 1
//! +P 7 2 3
//! -P 7
//! +S 3 0 0 2 2
//! -S 3
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::geom::{AxisBox, InstanceMeta, Point};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    SetCover,
    HittingSet,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::SetCover => "set_cover",
            Mode::HittingSet => "hitting_set",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "set_cover" => Ok(Mode::SetCover),
            "hitting_set" => Ok(Mode::HittingSet),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetRecord {
    pub id: u64,
    pub rect: AxisBox,
    pub weight: Option<f64>,
}

impl SetRecord {
    pub fn weight_or_one(&self) -> f64 {
        self.weight.unwrap_or(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    AddPoint(u64, Point),
    RemovePoint(u64),
    AddSet(u64, AxisBox),
    RemoveSet(u64),
}

impl Event {
    pub fn op(&self) -> &'static str {
        match self {
            Event::AddPoint(..) => "+P",
            Event::RemovePoint(_) => "-P",
            Event::AddSet(..) => "+S",
            Event::RemoveSet(_) => "-S",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub dim: usize,
    pub n_side: i64,
    pub mode: Mode,
    pub sets: Vec<SetRecord>,
    pub points: Vec<(u64, Point)>,
    pub point_weights: Vec<Option<f64>>,
    pub events: Vec<Event>,
}

/// Live `(id, point)` and `(id, box)` pairs.
pub type FinalState = (Vec<(u64, Point)>, Vec<(u64, AxisBox)>);

impl Instance {
    pub fn new(dim: usize, n_side: i64, mode: Mode) -> Self {
        Instance { dim, n_side, mode, sets: vec![], points: vec![], point_weights: vec![], events: vec![] }
    }

    pub fn meta(&self) -> Result<InstanceMeta, crate::Error> {
        let w = self.sets.iter().map(|s| s.weight_or_one()).fold(1.0, f64::max);
        let n = self.points.len() + self.events.iter().filter(|e| matches!(e, Event::AddPoint(..))).count();
        InstanceMeta::new(self.n_side, self.sets.len(), n, self.dim, w)
    }

    /// Points and boxes live after the whole event log, each keyed by id.
    /// Set cover keeps every SET record; hitting set keeps every POINT.
    pub fn final_state(&self) -> FinalState {
        let mut pts: BTreeMap<u64, Point> = BTreeMap::new();
        let mut rects: BTreeMap<u64, AxisBox> = BTreeMap::new();
        match self.mode {
            Mode::SetCover => rects.extend(self.sets.iter().map(|s| (s.id, s.rect.clone()))),
            Mode::HittingSet => pts.extend(self.points.iter().cloned()),
        }
        for e in &self.events {
            match e {
                Event::AddPoint(id, p) => {
                    pts.insert(*id, p.clone());
                }
                Event::RemovePoint(id) => {
                    pts.remove(id);
                }
                Event::AddSet(id, b) => {
                    rects.insert(*id, b.clone());
                }
                Event::RemoveSet(id) => {
                    rects.remove(id);
                }
            }
        }
        (pts.into_iter().collect(), rects.into_iter().collect())
    }
}

fn err(line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse { line, msg: msg.into() }
}

fn ints(line: usize, toks: &[&str]) -> Result<Vec<i64>, HarnessError> {
    toks.iter().map(|t| t.parse::<i64>().map_err(|_| err(line, format!("bad integer `{t}`")))).collect()
}

fn id(line: usize, t: Option<&&str>) -> Result<u64, HarnessError> {
    let t = t.ok_or_else(|| err(line, "missing id"))?;
    t.parse().map_err(|_| err(line, format!("bad id `{t}`")))
}

fn split_weight<'a>(line: usize, toks: &'a [&'a str]) -> Result<(&'a [&'a str], Option<f64>), HarnessError> {
    match toks.last() {
        Some(t) if t.starts_with("w=") => {
            let w: f64 = t[2..].parse().map_err(|_| err(line, format!("bad weight `{t}`")))?;
            if w.is_nan() || w < 1.0 || w.is_infinite() {
                return Err(err(line, format!("weight {w} is below 1")));
            }
            Ok((&toks[..toks.len() - 1], Some(w)))
        }
        _ => Ok((toks, None)),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, HarnessError> {
    let mut inst: Option<Instance> = None;
    let mut set_ids = HashSet::new();
    let mut point_ids = HashSet::new();
    let mut live_p = HashSet::new();
    let mut live_s = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks[0] == "META" {
            if inst.is_some() {
                return Err(err(ln, "second META record"));
            }
            let (mut dim, mut n, mut mode) = (None, None, None);
            for t in &toks[1..] {
                let (k, v) = t.split_once('=').ok_or_else(|| err(ln, format!("expected key=value, got `{t}`")))?;
                match k {
                    "dim" => dim = Some(v.parse::<usize>().map_err(|_| err(ln, "bad dim"))?),
                    "N" => n = Some(v.parse::<i64>().map_err(|_| err(ln, "bad N"))?),
                    "mode" => mode = Some(v.parse::<Mode>().map_err(|e| err(ln, e))?),
                    _ => return Err(err(ln, format!("unknown META key `{k}`"))),
                }
            }
            let dim = dim.filter(|&d| d > 0).ok_or_else(|| err(ln, "META needs dim >= 1"))?;
            let n = n.filter(|&n| n >= 1).ok_or_else(|| err(ln, "META needs N >= 1"))?;
            inst = Some(Instance::new(dim, n, mode.ok_or_else(|| err(ln, "META needs mode"))?));
            continue;
        }
        let inst = inst.as_mut().ok_or_else(|| err(ln, "record before META"))?;
        let d = inst.dim;
        let n = inst.n_side;
        let in_grid = |c: &[i64]| c.iter().all(|&x| (0..=n).contains(&x));
        let read_box = |toks: &[&str]| -> Result<AxisBox, HarnessError> {
            if toks.len() != 2 * d {
                return Err(err(ln, format!("expected {} coordinates, got {}", 2 * d, toks.len())));
            }
            let c = ints(ln, toks)?;
            if !in_grid(&c) {
                return Err(err(ln, format!("box outside grid [0,{n}]")));
            }
            AxisBox::new(c[..d].to_vec(), c[d..].to_vec()).map_err(|e| err(ln, e.to_string()))
        };
        let read_point = |toks: &[&str]| -> Result<Point, HarnessError> {
            if toks.len() != d {
                return Err(err(ln, format!("expected {d} coordinates, got {}", toks.len())));
            }
            let c = ints(ln, toks)?;
            if !in_grid(&c) {
                return Err(err(ln, format!("point outside grid [0,{n}]")));
            }
            Point::new(c).map_err(|e| err(ln, e.to_string()))
        };
        match toks[0] {
            "SET" => {
                let sid = id(ln, toks.get(1))?;
                let (coords, w) = split_weight(ln, &toks[2..])?;
                if !set_ids.insert(sid) {
                    return Err(err(ln, format!("duplicate set id {sid}")));
                }
                inst.sets.push(SetRecord { id: sid, rect: read_box(coords)?, weight: w });
            }
            "POINT" => {
                let pid = id(ln, toks.get(1))?;
                let (coords, w) = split_weight(ln, &toks[2..])?;
                if !point_ids.insert(pid) {
                    return Err(err(ln, format!("duplicate point id {pid}")));
                }
                inst.points.push((pid, read_point(coords)?));
                inst.point_weights.push(w);
            }
            "+P" => {
                let pid = id(ln, toks.get(1))?;
                if !live_p.insert(pid) {
                    return Err(err(ln, format!("point {pid} already live")));
                }
                inst.events.push(Event::AddPoint(pid, read_point(&toks[2..])?));
            }
            "-P" => {
                let pid = id(ln, toks.get(1))?;
                if toks.len() != 2 || !live_p.remove(&pid) {
                    return Err(err(ln, format!("point {pid} is not live")));
                }
                inst.events.push(Event::RemovePoint(pid));
            }
            "+S" => {
                let sid = id(ln, toks.get(1))?;
                if !live_s.insert(sid) {
                    return Err(err(ln, format!("set {sid} already live")));
                }
                inst.events.push(Event::AddSet(sid, read_box(&toks[2..])?));
            }
            "-S" => {
                let sid = id(ln, toks.get(1))?;
                if toks.len() != 2 || !live_s.remove(&sid) {
                    return Err(err(ln, format!("set {sid} is not live")));
                }
                inst.events.push(Event::RemoveSet(sid));
            }
            other => return Err(err(ln, format!("unknown record type `{other}`"))),
        }
    }
    inst.ok_or_else(|| err(0, "missing META record"))
}

fn push_coords(out: &mut String, c: &[i64]) {
    for x in c {
        write!(out, " {x}").unwrap();
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "META dim={} N={} mode={}", inst.dim, inst.n_side, inst.mode.as_str()).unwrap();
    for s in &inst.sets {
        write!(out, "SET {}", s.id).unwrap();
        push_coords(&mut out, s.rect.lo());
        push_coords(&mut out, s.rect.hi());
        if let Some(w) = s.weight {
            write!(out, " w={w}").unwrap();
        }
        out.push('\n');
    }
    for (i, (pid, p)) in inst.points.iter().enumerate() {
        write!(out, "POINT {pid}").unwrap();
        push_coords(&mut out, p.coords());
        if let Some(Some(w)) = inst.point_weights.get(i) {
            write!(out, " w={w}").unwrap();
        }
        out.push('\n');
    }
    for e in &inst.events {
        match e {
            Event::AddPoint(id, p) => {
                write!(out, "+P {id}").unwrap();
                push_coords(&mut out, p.coords());
            }
            Event::RemovePoint(id) => write!(out, "-P {id}").unwrap(),
            Event::AddSet(id, b) => {
                write!(out, "+S {id}").unwrap();
                push_coords(&mut out, b.lo());
                push_coords(&mut out, b.hi());
            }
            Event::RemoveSet(id) => write!(out, "-S {id}").unwrap(),
        }
        out.push('\n');
    }
    out
}
