// SPDX-License-Identifier: Apache-2.0

//! Seeded random instances shared by the integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rwaa_core::netgraph::enumerate_simple_paths;
use rwaa_core::{DemandId, DemandSet, Lightpath, Mode, NodeId, Pairing, Solution, Topology};

/// Connected undirected graph on `1..=n`: a random spanning tree plus each
/// remaining pair with probability `extra`.
pub fn random_topology(rng: &mut impl Rng, n: u32, extra: f64) -> Topology {
    let mut edges = Vec::new();
    for v in 2..=n {
        edges.push((rng.gen_range(1..v), v));
    }
    for u in 1..=n {
        for v in u + 1..=n {
            if !edges.contains(&(u, v)) && rng.gen_bool(extra) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(rng);
    Topology::from_undirected("random", n, &edges).expect("valid random topology")
}

/// Up to `max` unit demands; most instances send everything to one
/// destination so that aggregation has something to do.
pub fn random_demands(rng: &mut impl Rng, t: &Topology, max: usize) -> DemandSet {
    let nodes = t.nodes();
    let count = rng.gen_range(1..=max);
    let shared = rng.gen_bool(0.7).then(|| *nodes.choose(rng).unwrap());
    let pairs: Vec<(NodeId, NodeId)> = (0..count)
        .map(|_| {
            let dst = shared.unwrap_or_else(|| *nodes.choose(rng).unwrap());
            let src = *nodes
                .iter()
                .filter(|&&v| v != dst)
                .collect::<Vec<_>>()
                .choose(rng)
                .unwrap();
            (*src, dst)
        })
        .collect();
    DemandSet::from_pairs(&pairs).unwrap()
}

pub fn random_instance(rng: &mut impl Rng, max_nodes: u32, max_demands: usize) -> (Topology, DemandSet) {
    let n = rng.gen_range(3..=max_nodes);
    let t = random_topology(rng, n, 0.3);
    let d = random_demands(rng, &t, max_demands);
    (t, d)
}

/// An arbitrary design over real simple routes: random routes, wavelengths
/// in `1..=max_w`, and (in aggregation mode) a random matching with a random
/// aggregation node on the first partner's route. The objective field is
/// always the true count of used wavelengths.
pub fn random_candidate(rng: &mut impl Rng, t: &Topology, d: &DemandSet, mode: Mode, max_w: u32) -> Solution {
    let lightpaths: Vec<Lightpath> = d
        .iter()
        .map(|x| {
            let routes = enumerate_simple_paths(t, x.src, x.dst, None);
            Lightpath {
                demand: x.id,
                path: routes.choose(rng).expect("connected").clone(),
                wavelength: rng.gen_range(1..=max_w),
            }
        })
        .collect();
    let mut pairings = Vec::new();
    if mode == Mode::Aggregation {
        let mut ids: Vec<DemandId> = d.iter().map(|x| x.id).collect();
        ids.shuffle(rng);
        for pair in ids.chunks(2) {
            if pair.len() < 2 || !rng.gen_bool(0.6) {
                continue;
            }
            let (d1, d2) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            let route = &lightpaths[d1.0 as usize - 1].path;
            let agg_node = *route.nodes[..route.nodes.len() - 1].choose(rng).unwrap();
            pairings.push(Pairing {
                d1,
                d2,
                agg_node,
                shared_suffix: route.suffix_from(agg_node).unwrap(),
            });
        }
    }
    let objective = lightpaths
        .iter()
        .map(|l| l.wavelength)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    Solution {
        mode,
        lightpaths,
        pairings,
        objective,
    }
}

/// Nudges a design so it is more likely to sit near the feasibility edge:
/// aligns partner wavelengths and sometimes copies one route's wavelength
/// onto another demand.
pub fn near_miss(rng: &mut impl Rng, mut s: Solution) -> Solution {
    for p in s.pairings.clone() {
        if rng.gen_bool(0.8) {
            let w = s.lightpath(p.d1).unwrap().wavelength;
            let i = p.d2.0 as usize - 1;
            s.lightpaths[i].wavelength = w;
        }
    }
    if s.lightpaths.len() > 1 && rng.gen_bool(0.3) {
        let a = rng.gen_range(0..s.lightpaths.len());
        let b = rng.gen_range(0..s.lightpaths.len());
        s.lightpaths[b].wavelength = s.lightpaths[a].wavelength;
    }
    s.objective = s.used_wavelengths().len();
    s
}
