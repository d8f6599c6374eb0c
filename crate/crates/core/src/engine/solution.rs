// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::netgraph::{NodeId, Path};
use crate::traffic::DemandId;

/// Network architecture the design is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// In-transit lightpaths stay separate; one channel per demand per link.
    Bypass,
    /// Two same-destination lightpaths on one wavelength may merge at an
    /// intermediate node and share a single channel from there on.
    Aggregation,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bypass => "bypass",
            Mode::Aggregation => "aggregation",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bypass" => Ok(Mode::Bypass),
            "aggregation" => Ok(Mode::Aggregation),
            other => Err(format!("unknown mode `{other}` (expected bypass|aggregation)")),
        }
    }
}

/// Route and wavelength serving one demand end to end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lightpath {
    pub demand: DemandId,
    pub path: Path,
    pub wavelength: u32,
}

/// Two same-destination demands merged at `agg_node`; from there both ride
/// `shared_suffix` as one channel.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pairing {
    pub d1: DemandId,
    pub d2: DemandId,
    pub agg_node: NodeId,
    pub shared_suffix: Path,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub mode: Mode,
    pub lightpaths: Vec<Lightpath>,
    pub pairings: Vec<Pairing>,
    /// Number of distinct wavelengths used anywhere in the network.
    pub objective: usize,
}

impl Solution {
    pub fn lightpath(&self, d: DemandId) -> Option<&Lightpath> {
        self.lightpaths.iter().find(|lp| lp.demand == d)
    }

    pub fn used_wavelengths(&self) -> BTreeSet<u32> {
        self.lightpaths.iter().map(|lp| lp.wavelength).collect()
    }

    /// Sum of per-demand route lengths.
    pub fn total_hops(&self) -> usize {
        self.lightpaths.iter().map(|lp| lp.path.hops()).sum()
    }

    pub fn pairing_of(&self, d: DemandId) -> Option<&Pairing> {
        self.pairings.iter().find(|p| p.d1 == d || p.d2 == d)
    }
}

/// Relabels wavelengths in first-use order over demands sorted by id and
/// sorts lightpaths and pairings. Idempotent.
pub fn canonicalize(s: &Solution) -> Solution {
    let mut lightpaths = s.lightpaths.clone();
    lightpaths.sort_by_key(|lp| lp.demand);
    let mut relabel = BTreeMap::new();
    for lp in &lightpaths {
        let next = relabel.len() as u32 + 1;
        relabel.entry(lp.wavelength).or_insert(next);
    }
    for lp in &mut lightpaths {
        lp.wavelength = relabel[&lp.wavelength];
    }
    let mut pairings: Vec<Pairing> = s
        .pairings
        .iter()
        .map(|p| {
            let mut p = p.clone();
            if p.d2 < p.d1 {
                std::mem::swap(&mut p.d1, &mut p.d2);
            }
            p
        })
        .collect();
    pairings.sort();
    Solution {
        mode: s.mode,
        lightpaths,
        pairings,
        objective: s.objective,
    }
}
