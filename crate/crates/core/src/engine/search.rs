// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use super::solution::{Lightpath, Mode, Pairing, Solution};
use crate::netgraph::{LinkId, NodeId, Path, Topology};
use crate::traffic::{DemandId, DemandSet};

struct Candidate {
    path: Path,
    /// Positions of the path's links in `Topology::links()`.
    slots: Vec<usize>,
}

struct Terminal {
    links: Vec<usize>,
}

/// Immutable search data shared by all workers.
pub(super) struct Instance {
    mode: Mode,
    ids: Vec<DemandId>,
    dst: Vec<NodeId>,
    pools: Vec<Vec<Candidate>>,
    /// `rest_min[i]`: sum of shortest route lengths of demands `i..`.
    rest_min: Vec<usize>,
    link_count: usize,
    /// Incoming links of each distinct destination; `dst_group[i]` indexes it.
    sinks: Vec<Terminal>,
    dst_group: Vec<usize>,
    sources: Vec<Terminal>,
    src_group: Vec<usize>,
}

#[derive(Clone, Copy, Default)]
struct Slot {
    count: u8,
    /// First demand occupying the slot; meaningful while `count > 0`.
    holder: u16,
}

struct Best {
    hops: usize,
    choice: Vec<(u32, usize)>,
}

struct Worker<'a> {
    inst: &'a Instance,
    k: u32,
    occ: Vec<Slot>,
    choice: Vec<(u32, usize)>,
    partner: Vec<Option<usize>>,
    hops: usize,
    max_w: u32,
    sink_left: Vec<usize>,
    source_left: Vec<usize>,
    best: Option<Best>,
    shared: &'a AtomicUsize,
    deterministic: bool,
    nodes: u64,
}

impl Instance {
    pub(super) fn new(t: &Topology, d: &DemandSet, mode: Mode, paths: Vec<Vec<Path>>) -> Self {
        let index: HashMap<LinkId, usize> = t.links().iter().enumerate().map(|(i, l)| (l.id, i)).collect();
        let pools: Vec<Vec<Candidate>> = paths
            .into_iter()
            .map(|ps| {
                ps.into_iter()
                    .map(|path| Candidate {
                        slots: path.links.iter().map(|l| index[l]).collect(),
                        path,
                    })
                    .collect()
            })
            .collect();
        let mut rest_min = vec![0; pools.len() + 1];
        for i in (0..pools.len()).rev() {
            rest_min[i] = rest_min[i + 1] + pools[i][0].path.hops();
        }
        let group = |pick: fn(&crate::traffic::Demand) -> NodeId, incoming: bool| {
            let mut nodes: Vec<NodeId> = Vec::new();
            let mut of = Vec::new();
            for x in d.iter() {
                let v = pick(x);
                let g = nodes.iter().position(|&n| n == v).unwrap_or_else(|| {
                    nodes.push(v);
                    nodes.len() - 1
                });
                of.push(g);
            }
            let terms = nodes
                .iter()
                .map(|&v| {
                    let links = if incoming { t.in_links(v) } else { t.out_links(v) };
                    Terminal {
                        links: links.iter().map(|l| index[&l.id]).collect(),
                    }
                })
                .collect();
            (terms, of)
        };
        let (sinks, dst_group) = group(|x| x.dst, true);
        let (sources, src_group) = group(|x| x.src, false);
        Self {
            mode,
            ids: d.iter().map(|x| x.id).collect(),
            dst: d.iter().map(|x| x.dst).collect(),
            pools,
            rest_min,
            link_count: t.links().len(),
            sinks,
            dst_group,
            sources,
            src_group,
        }
    }

    /// Best design using at most `k` wavelengths, and the number of search
    /// nodes expanded.
    pub(super) fn search(&self, k: u32, jobs: usize, deterministic: bool) -> (Option<Solution>, u64) {
        let shared = AtomicUsize::new(usize::MAX);
        let explored = AtomicU64::new(0);
        // Demand 0 always takes wavelength 1; each of its routes roots an
        // independent subtree.
        // Sequentially, earlier roots finish first and win ties anyway.
        let strict = deterministic && jobs > 1;
        let run = |root: usize| -> Option<Best> {
            let mut w = Worker::new(self, k, &shared, strict);
            let found = w.run_root(root);
            explored.fetch_add(w.nodes, Ordering::Relaxed);
            found
        };
        let roots = 0..self.pools[0].len();
        let results: Vec<Option<Best>> = if jobs <= 1 {
            roots.map(run).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool");
            pool.install(|| roots.into_par_iter().map(run).collect())
        };
        // Ties go to the earliest root, which is what the sequential search
        // would have kept.
        let best = results
            .into_iter()
            .flatten()
            .reduce(|a, b| if b.hops < a.hops { b } else { a });
        (best.map(|b| self.build(&b.choice)), explored.into_inner())
    }

    fn build(&self, choice: &[(u32, usize)]) -> Solution {
        let lightpaths: Vec<Lightpath> = choice
            .iter()
            .enumerate()
            .map(|(i, &(w, p))| Lightpath {
                demand: self.ids[i],
                path: self.pools[i][p].path.clone(),
                wavelength: w,
            })
            .collect();
        let mut pairings = Vec::new();
        if self.mode == Mode::Aggregation {
            for i in 0..lightpaths.len() {
                for j in i + 1..lightpaths.len() {
                    let (a, b) = (&lightpaths[i], &lightpaths[j]);
                    if a.wavelength != b.wavelength || self.dst[i] != self.dst[j] {
                        continue;
                    }
                    if let Some(v) = super::merge_node(&a.path, &b.path) {
                        pairings.push(Pairing {
                            d1: a.demand,
                            d2: b.demand,
                            agg_node: v,
                            shared_suffix: a.path.suffix_from(v).expect("merge node on path"),
                        });
                    }
                }
            }
        }
        let objective = choice.iter().map(|&(w, _)| w).max().unwrap_or(0) as usize;
        Solution {
            mode: self.mode,
            lightpaths,
            pairings,
            objective,
        }
    }
}

enum Placement {
    Alone,
    PairedWith(usize),
}

struct Undo {
    paired: bool,
    prev_max_w: u32,
}

impl<'a> Worker<'a> {
    fn new(inst: &'a Instance, k: u32, shared: &'a AtomicUsize, deterministic: bool) -> Self {
        let n = inst.ids.len();
        let mut sink_left = vec![0; inst.sinks.len()];
        for &g in &inst.dst_group {
            sink_left[g] += 1;
        }
        let mut source_left = vec![0; inst.sources.len()];
        for &g in &inst.src_group {
            source_left[g] += 1;
        }
        Self {
            inst,
            k,
            occ: vec![Slot::default(); k as usize * inst.link_count],
            choice: Vec::with_capacity(n),
            partner: vec![None; n],
            hops: 0,
            max_w: 0,
            sink_left,
            source_left,
            best: None,
            shared,
            deterministic,
            nodes: 0,
        }
    }

    /// Solutions whose hop total reaches this value are not worth exploring.
    fn limit(&self) -> usize {
        let local = self.best.as_ref().map_or(usize::MAX, |b| b.hops);
        let shared = self.shared.load(Ordering::Relaxed);
        // Another subtree's equal-hop design may lose the tie to one here, so
        // a deterministic search only prunes on strictly worse totals.
        let shared = if self.deterministic {
            shared.saturating_add(1)
        } else {
            shared
        };
        local.min(shared)
    }

    fn run_root(&mut self, root: usize) -> Option<Best> {
        let cand_hops = self.inst.pools[0][root].path.hops();
        if cand_hops + self.inst.rest_min[1] < self.limit() {
            if let Some(placed) = self.try_place(0, 1, root) {
                if self.capacity_ok() {
                    self.descend(1);
                }
                self.unplace(0, placed);
            }
        }
        self.best.take()
    }

    fn descend(&mut self, i: usize) {
        self.nodes += 1;
        let n = self.inst.ids.len();
        if i == n {
            if self.hops < self.limit() {
                self.shared.fetch_min(self.hops, Ordering::Relaxed);
                self.best = Some(Best {
                    hops: self.hops,
                    choice: self.choice.clone(),
                });
            }
            return;
        }
        let top = self.k.min(self.max_w + 1);
        for w in 1..=top {
            for p in 0..self.inst.pools[i].len() {
                let h = self.inst.pools[i][p].path.hops();
                if self.hops + h + self.inst.rest_min[i + 1] >= self.limit() {
                    break;
                }
                let Some(placed) = self.try_place(i, w, p) else {
                    continue;
                };
                if self.capacity_ok() {
                    self.descend(i + 1);
                }
                self.unplace(i, placed);
            }
        }
    }

    fn slot(&self, w: u32, link: usize) -> usize {
        (w as usize - 1) * self.inst.link_count + link
    }

    fn try_place(&mut self, i: usize, w: u32, p: usize) -> Option<Undo> {
        let inst = self.inst;
        let cand = &inst.pools[i][p];
        let mut overlap = 0usize;
        let mut other = None;
        for &l in &cand.slots {
            let s = self.occ[self.slot(w, l)];
            if s.count == 0 {
                continue;
            }
            if inst.mode == Mode::Bypass || s.count > 1 {
                return None;
            }
            let h = s.holder as usize;
            match other {
                None => other = Some(h),
                Some(o) if o != h => return None,
                _ => {}
            }
            overlap += 1;
        }
        let placement = match other {
            None => Placement::Alone,
            Some(o) => {
                if self.partner[o].is_some() || inst.dst[o] != inst.dst[i] {
                    return None;
                }
                // Every shared link must lie on the common suffix.
                let theirs = &inst.pools[o][self.choice[o].1].slots;
                let common = cand
                    .slots
                    .iter()
                    .rev()
                    .zip(theirs.iter().rev())
                    .take_while(|(a, b)| a == b)
                    .count();
                if common != overlap {
                    return None;
                }
                Placement::PairedWith(o)
            }
        };
        for &l in &cand.slots {
            let idx = self.slot(w, l);
            let s = &mut self.occ[idx];
            if s.count == 0 {
                s.holder = i as u16;
            }
            s.count += 1;
        }
        if let Placement::PairedWith(o) = placement {
            self.partner[o] = Some(i);
            self.partner[i] = Some(o);
        }
        self.choice.push((w, p));
        self.hops += cand.path.hops();
        self.sink_left[inst.dst_group[i]] -= 1;
        self.source_left[inst.src_group[i]] -= 1;
        let undo = Undo {
            paired: matches!(placement, Placement::PairedWith(_)),
            prev_max_w: self.max_w,
        };
        self.max_w = self.max_w.max(w);
        Some(undo)
    }

    fn unplace(&mut self, i: usize, undo: Undo) {
        let inst = self.inst;
        let (w, p) = self.choice.pop().expect("placed demand");
        let cand = &inst.pools[i][p];
        for &l in &cand.slots {
            let idx = self.slot(w, l);
            self.occ[idx].count -= 1;
        }
        if undo.paired {
            if let Some(o) = self.partner[i].take() {
                self.partner[o] = None;
            }
        }
        self.hops -= cand.path.hops();
        self.sink_left[inst.dst_group[i]] += 1;
        self.source_left[inst.src_group[i]] += 1;
        self.max_w = undo.prev_max_w;
    }

    /// Channel counting at every terminal that still has demands to place.
    fn capacity_ok(&self) -> bool {
        let inst = self.inst;
        let per_free = match inst.mode {
            Mode::Bypass => 1,
            Mode::Aggregation => 2,
        };
        for (g, term) in inst.sinks.iter().enumerate() {
            let need = self.sink_left[g];
            if need == 0 {
                continue;
            }
            let mut room = 0;
            for w in 1..=self.k {
                for &l in &term.links {
                    let s = self.occ[self.slot(w, l)];
                    room += match s.count {
                        0 => per_free,
                        1 if inst.mode == Mode::Aggregation => {
                            let h = s.holder as usize;
                            usize::from(self.partner[h].is_none() && inst.dst_group[h] == g)
                        }
                        _ => 0,
                    };
                }
            }
            if room < need {
                return false;
            }
        }
        for (g, term) in inst.sources.iter().enumerate() {
            let need = self.source_left[g];
            if need == 0 {
                continue;
            }
            let mut room = 0;
            for w in 1..=self.k {
                for &l in &term.links {
                    let s = self.occ[self.slot(w, l)];
                    room += match s.count {
                        0 => per_free,
                        1 if inst.mode == Mode::Aggregation => usize::from(self.partner[s.holder as usize].is_none()),
                        _ => 0,
                    };
                }
            }
            if room < need {
                return false;
            }
        }
        true
    }
}
