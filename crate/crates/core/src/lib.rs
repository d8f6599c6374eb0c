// SPDX-License-Identifier: Apache-2.0

//! Routing, wavelength and aggregation assignment (RWAA) for optical networks
//! whose nodes can merge two in-transit lightpaths into one channel, next to
//! classical optical-bypass routing and wavelength assignment.
//!
//! * [`netgraph`]: topologies, the topology file format, simple paths.
//! * [`traffic`]: demand sets and the all-to-one generator.
//! * [`ilpcore`]: the exact ILP model, LP-file export, assignment import.
//! * [`engine`]: built-in exact solver and lower bound.
//! * [`oracle`]: independent validator and brute-force optimum.
//! * [`record`]: the `rwaa-solution/1` text record.

pub mod datasets;
pub mod engine;
pub mod ilpcore;
pub mod netgraph;
pub mod oracle;
pub mod record;
pub mod traffic;

pub use engine::{lower_bound, solve, solve_with, Lightpath, Mode, Pairing, Solution, SolveError, SolveOptions};
pub use netgraph::{enumerate_simple_paths, load_topology, LinkId, NodeId, Path, Topology};
pub use traffic::{all_to_one, load_demands, Demand, DemandId, DemandSet};
