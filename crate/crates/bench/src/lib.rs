// SPDX-License-Identifier: Apache-2.0

//! Benchmark fixtures for `rwaa-core`. The benchmarks live in `benches/`;
//! run them with `cargo bench -p rwaa-bench`.

use rwaa_core::{all_to_one, datasets, DemandSet, NodeId, Topology};

/// COST239 with all-to-one traffic towards `dest`.
pub fn cost239_all_to(dest: u32) -> (Topology, DemandSet) {
    let t = datasets::cost239();
    let d = all_to_one(&t, NodeId(dest)).expect("node in COST239");
    (t, d)
}
