// SPDX-License-Identifier: Apache-2.0

//! Exact minimum-wavelength design for both architectures.
//!
//! The solver deepens on the number of allowed wavelengths `K`, starting at
//! [`lower_bound`]. For each `K` a depth-first search assigns every demand,
//! in id order, a `(wavelength, route)` pair. In aggregation mode a route may
//! overlap exactly one unpaired earlier demand on the same wavelength, and
//! only along their common suffix, which makes the two a pairing merged at the
//! first node of that suffix. Among all feasible designs at the minimal `K`
//! the search keeps the one with the fewest total hops, breaking ties by the
//! smallest `(wavelength, hops, node sequence)` encoding in demand order.

mod search;
mod solution;

use thiserror::Error;

use crate::netgraph::{enumerate_simple_paths, NodeId, Topology};
use crate::traffic::{DemandError, DemandId, DemandSet};

pub use solution::{canonicalize, Lightpath, Mode, Pairing, Solution};

/// Largest topology for which an unlimited hop limit is accepted.
pub const UNLIMITED_HOPS_MAX_NODES: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("max_wavelengths must be at least 1")]
    NoWavelengths,
    #[error("demand {0} requests rate {1}; only unit-rate demands are supported")]
    UnsupportedRate(DemandId, u32),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error("topology has {0} nodes; an explicit hop limit is required above {UNLIMITED_HOPS_MAX_NODES}")]
    HopLimitRequired(usize),
    #[error("demand {0} has no route within the hop limit")]
    NoRoute(DemandId),
    #[error("infeasible: no design with at most {max_wavelengths} wavelengths")]
    Infeasible { max_wavelengths: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_wavelengths: u32,
    pub hop_limit: Option<usize>,
    /// Worker threads for the top-level fan-out; 1 runs sequentially.
    pub jobs: usize,
    /// Return the same design as the sequential search regardless of `jobs`.
    pub deterministic: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_wavelengths: 8,
            hop_limit: None,
            jobs: 1,
            deterministic: true,
        }
    }
}

/// A solved instance plus the facts needed to qualify the optimality claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub lower_bound: usize,
    /// Optimality holds over routes of at most this many hops.
    pub hop_limit: Option<usize>,
    /// Search nodes expanded over all deepening rounds.
    pub nodes_explored: u64,
}

/// Optimal design with default options besides the wavelength cap and hop
/// limit.
pub fn solve(
    t: &Topology,
    d: &DemandSet,
    mode: Mode,
    max_wavelengths: u32,
    hop_limit: Option<usize>,
) -> Result<Solution, SolveError> {
    let opts = SolveOptions {
        max_wavelengths,
        hop_limit,
        ..SolveOptions::default()
    };
    solve_with(t, d, mode, &opts).map(|o| o.solution)
}

pub fn solve_with(t: &Topology, d: &DemandSet, mode: Mode, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    if opts.max_wavelengths == 0 {
        return Err(SolveError::NoWavelengths);
    }
    d.validate_against(t)?;
    if let Some(bad) = d.iter().find(|x| x.rate != 1) {
        return Err(SolveError::UnsupportedRate(bad.id, bad.rate));
    }
    if opts.hop_limit.is_none() && t.nodes().len() > UNLIMITED_HOPS_MAX_NODES {
        return Err(SolveError::HopLimitRequired(t.nodes().len()));
    }
    let bound = lower_bound(t, d, mode);
    if d.is_empty() {
        return Ok(SolveOutcome {
            solution: Solution {
                mode,
                lightpaths: Vec::new(),
                pairings: Vec::new(),
                objective: 0,
            },
            lower_bound: 0,
            hop_limit: opts.hop_limit,
            nodes_explored: 0,
        });
    }
    let pools = d
        .iter()
        .map(|x| {
            let paths = enumerate_simple_paths(t, x.src, x.dst, opts.hop_limit);
            if paths.is_empty() {
                Err(SolveError::NoRoute(x.id))
            } else {
                Ok(paths)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let instance = search::Instance::new(t, d, mode, pools);
    let mut explored = 0;
    for k in (bound.max(1) as u32)..=opts.max_wavelengths {
        let (found, nodes) = instance.search(k, opts.jobs.max(1), opts.deterministic);
        explored += nodes;
        if let Some(solution) = found {
            return Ok(SolveOutcome {
                solution: canonicalize(&solution),
                lower_bound: bound,
                hop_limit: opts.hop_limit,
                nodes_explored: explored,
            });
        }
    }
    Err(SolveError::Infeasible {
        max_wavelengths: opts.max_wavelengths,
    })
}

/// Wavelength lower bound from channel counting at every node.
///
/// Demands ending at `v` need that many channels on `v`'s incoming links in
/// bypass mode and half as many (rounded up) with aggregation; each incoming
/// link carries one channel per wavelength. Sources are bounded the same way
/// over outgoing links.
pub fn lower_bound(t: &Topology, d: &DemandSet, mode: Mode) -> usize {
    if d.is_empty() {
        return 0;
    }
    let channels = |n: usize| match mode {
        Mode::Bypass => n,
        Mode::Aggregation => n.div_ceil(2),
    };
    let mut bound = 1;
    for &v in t.nodes() {
        let ending = d.iter().filter(|x| x.dst == v).count();
        let starting = d.iter().filter(|x| x.src == v).count();
        for (demands, fibers) in [(ending, t.in_links(v).len()), (starting, t.out_links(v).len())] {
            if demands > 0 && fibers > 0 {
                bound = bound.max(channels(demands).div_ceil(fibers));
            }
        }
    }
    bound
}

/// Node where two routes merge for good: the first node of their longest
/// common suffix, if that suffix has at least one link.
pub(crate) fn merge_node(a: &crate::netgraph::Path, b: &crate::netgraph::Path) -> Option<NodeId> {
    let common = a
        .links
        .iter()
        .rev()
        .zip(b.links.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    (common > 0).then(|| a.nodes[a.nodes.len() - 1 - common])
}
