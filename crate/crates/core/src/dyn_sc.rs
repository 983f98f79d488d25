//! Dynamic set cover for abstract instances of bounded frequency.
//!
//! Primal-dual with integer duals. Each live element holds a dual value, a
//! set's load is the sum of duals of its live elements, and the cover is
//! exactly the set of tight sets (load equal to weight). Loads never exceed
//! weights, so the cover weight is at most `f` times any cover's weight.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverDelta {
    pub added: Vec<usize>,
    pub removed: Vec<usize>,
}

impl CoverDelta {
    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
struct SetInfo {
    weight: u64,
    load: u64,
    elements: BTreeSet<u64>,
}

#[derive(Clone, Debug)]
struct ElemInfo {
    incident: Vec<usize>,
    dual: u64,
}

#[derive(Clone, Debug)]
pub struct Engine {
    eps: f64,
    sets: HashMap<usize, SetInfo>,
    elems: BTreeMap<u64, ElemInfo>,
    cover: BTreeSet<usize>,
    last_touched: usize,
    total_touched: u64,
    ops: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(1.0)
    }
}

impl Engine {
    pub fn new(eps: f64) -> Self {
        Engine {
            eps,
            sets: HashMap::new(),
            elems: BTreeMap::new(),
            cover: BTreeSet::new(),
            last_touched: 0,
            total_touched: 0,
            ops: 0,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Covers `e`. Sets seen for the first time are registered with the
    /// given weight; later weights for a known set must agree.
    pub fn insert_element(&mut self, e: u64, incident: &[(usize, u64)]) -> Result<CoverDelta> {
        if self.elems.contains_key(&e) {
            return Err(Error::Duplicate(e));
        }
        if incident.is_empty() {
            return Err(Error::Precondition(format!("element {e} has no incident set")));
        }
        for &(s, w) in incident {
            if w == 0 {
                return Err(Error::Precondition(format!("set {s} has zero weight")));
            }
            if let Some(info) = self.sets.get(&s) {
                if info.weight != w {
                    return Err(Error::Precondition(format!("set {s} registered with weight {}", info.weight)));
                }
            }
        }
        let mut ids: Vec<usize> = incident.iter().map(|&(s, _)| s).collect();
        ids.sort_unstable();
        ids.dedup();
        for &(s, w) in incident {
            self.sets.entry(s).or_insert_with(|| SetInfo { weight: w, load: 0, elements: BTreeSet::new() });
        }
        for &s in &ids {
            self.sets.get_mut(&s).unwrap().elements.insert(e);
        }
        self.elems.insert(e, ElemInfo { incident: ids.clone(), dual: 0 });
        let mut touched = ids.len();
        let mut added = Vec::new();
        self.raise(e, &mut added, &mut touched);
        self.finish(touched);
        Ok(CoverDelta { added, removed: vec![] })
    }

    pub fn delete_element(&mut self, e: u64) -> Result<CoverDelta> {
        let info = self.elems.remove(&e).ok_or(Error::Unknown(e))?;
        let mut touched = info.incident.len();
        let mut slack = Vec::new();
        for &s in &info.incident {
            let set = self.sets.get_mut(&s).unwrap();
            set.elements.remove(&e);
            if info.dual > 0 {
                set.load -= info.dual;
                if self.cover.remove(&s) {
                    slack.push(s);
                }
            }
        }
        let mut orphans = BTreeSet::new();
        for &s in &slack {
            orphans.extend(self.sets[&s].elements.iter().copied());
        }
        let mut added = Vec::new();
        for o in orphans {
            touched += self.elems[&o].incident.len();
            self.raise(o, &mut added, &mut touched);
        }
        let back: BTreeSet<usize> = added.iter().copied().filter(|s| slack.contains(s)).collect();
        let removed = slack.into_iter().filter(|s| !back.contains(s)).collect();
        added.retain(|s| !back.contains(s));
        self.finish(touched);
        Ok(CoverDelta { added, removed })
    }

    fn raise(&mut self, e: u64, added: &mut Vec<usize>, touched: &mut usize) {
        let inc = &self.elems[&e].incident;
        if inc.iter().any(|s| self.cover.contains(s)) {
            return;
        }
        let slack = inc.iter().map(|s| self.sets[s].weight - self.sets[s].load).min().unwrap();
        let inc = inc.clone();
        self.elems.get_mut(&e).unwrap().dual += slack;
        for s in inc {
            let set = self.sets.get_mut(&s).unwrap();
            set.load += slack;
            if set.load == set.weight {
                self.cover.insert(s);
                added.push(s);
                *touched += 1;
            }
        }
    }

    fn finish(&mut self, touched: usize) {
        self.last_touched = touched;
        self.total_touched += touched as u64;
        self.ops += 1;
    }

    pub fn current_cover(&self) -> (Vec<usize>, u64) {
        let ids: Vec<usize> = self.cover.iter().copied().collect();
        let w = ids.iter().map(|s| self.sets[s].weight).sum();
        (ids, w)
    }

    pub fn in_cover(&self, s: usize) -> bool {
        self.cover.contains(&s)
    }

    pub fn dual(&self, e: u64) -> Option<u64> {
        self.elems.get(&e).map(|i| i.dual)
    }

    pub fn incident(&self, e: u64) -> Option<&[usize]> {
        self.elems.get(&e).map(|i| i.incident.as_slice())
    }

    pub fn live_elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.elems.keys().copied()
    }

    pub fn frequency(&self) -> usize {
        self.elems.values().map(|i| i.incident.len()).max().unwrap_or(0)
    }

    pub fn weight(&self, s: usize) -> Option<u64> {
        self.sets.get(&s).map(|i| i.weight)
    }

    pub fn is_feasible(&self) -> bool {
        self.elems.values().all(|i| i.incident.iter().any(|s| self.cover.contains(s)))
    }

    /// Sets scanned or changed by the last operation.
    pub fn last_touched(&self) -> usize {
        self.last_touched
    }

    pub fn mean_touched(&self) -> f64 {
        if self.ops == 0 {
            0.0
        } else {
            self.total_touched as f64 / self.ops as f64
        }
    }
}
