// SPDX-License-Identifier: Apache-2.0

//! Topologies shipped with the crate.

use crate::netgraph::{load_topology, Topology};

/// COST239 pan-European network, 11 nodes and 26 fibers.
pub const COST239_TOPO: &str = include_str!("../data/cost239.topo");

/// Four-node star: sources 1 and 2 reach destination 4 through node 3.
pub const FIG2_TOY_TOPO: &str = include_str!("../data/fig2toy.topo");

/// The two demands of the star example, `1 -> 4` and `2 -> 4`.
pub const FIG2_DEMANDS: &str = include_str!("../data/fig2.dem");

pub fn cost239() -> Topology {
    load_topology(COST239_TOPO).expect("shipped dataset parses")
}

pub fn fig2toy() -> Topology {
    load_topology(FIG2_TOY_TOPO).expect("shipped dataset parses")
}
