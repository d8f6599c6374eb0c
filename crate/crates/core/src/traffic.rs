// SPDX-License-Identifier: Apache-2.0

//! Unit-rate connection requests and demand-set generators.

use std::fmt;

use thiserror::Error;

use crate::netgraph::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DemandId(pub u32);

impl fmt::Display for DemandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Demand {
    pub id: DemandId,
    pub src: NodeId,
    pub dst: NodeId,
    /// Requested capacity in traffic units. Only unit-rate demands are
    /// solvable; the field exists so demand files can carry other rates.
    pub rate: u32,
}

impl fmt::Display for Demand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}->{})", self.src, self.dst)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DemandError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("demand {0} has identical source and destination")]
    SameEndpoints(DemandId),
    #[error("demand {demand} references node {node} which is not in the topology")]
    UnknownEndpoint { demand: DemandId, node: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// Ordered demands with ids `1..=len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DemandSet {
    demands: Vec<Demand>,
}

impl DemandSet {
    /// Unit-rate demands in the given order, numbered from 1.
    pub fn from_pairs(pairs: &[(NodeId, NodeId)]) -> Result<Self, DemandError> {
        let demands = pairs
            .iter()
            .enumerate()
            .map(|(i, &(src, dst))| Demand {
                id: DemandId(i as u32 + 1),
                src,
                dst,
                rate: 1,
            })
            .collect();
        Self::from_demands(demands)
    }

    /// Re-numbers `demands` from 1 in the given order.
    pub fn from_demands(mut demands: Vec<Demand>) -> Result<Self, DemandError> {
        for (i, d) in demands.iter_mut().enumerate() {
            d.id = DemandId(i as u32 + 1);
            if d.src == d.dst {
                return Err(DemandError::SameEndpoints(d.id));
            }
        }
        Ok(Self { demands })
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn get(&self, id: DemandId) -> Option<&Demand> {
        let idx = (id.0 as usize).checked_sub(1)?;
        self.demands.get(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Demand> {
        self.demands.iter()
    }

    /// Every endpoint must be a node of `t`.
    pub fn validate_against(&self, t: &Topology) -> Result<(), DemandError> {
        for d in &self.demands {
            for node in [d.src, d.dst] {
                if !t.contains(node) {
                    return Err(DemandError::UnknownEndpoint { demand: d.id, node });
                }
            }
        }
        Ok(())
    }
}

/// One demand from every node other than `dest` to `dest`, ordered by source.
pub fn all_to_one(t: &Topology, dest: NodeId) -> Result<DemandSet, DemandError> {
    if !t.contains(dest) {
        return Err(DemandError::UnknownNode(dest));
    }
    let mut sources: Vec<NodeId> = t.nodes().iter().copied().filter(|&v| v != dest).collect();
    sources.sort();
    let pairs: Vec<_> = sources.into_iter().map(|s| (s, dest)).collect();
    DemandSet::from_pairs(&pairs)
}

/// Parses a demand file: one `<src> <dst> [rate]` per line, `#` comments.
pub fn load_demands(text: &str) -> Result<DemandSet, DemandError> {
    let mut demands = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| DemandError::Parse { line: idx + 1, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `<src> <dst> [rate]`, got `{line}`")));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|e| err(format!("`{s}`: {e}")));
        let src = NodeId(num(fields[0])?);
        let dst = NodeId(num(fields[1])?);
        let rate = fields.get(2).map(|r| num(r)).transpose()?.unwrap_or(1);
        if src == dst {
            return Err(err(format!("source equals destination ({src})")));
        }
        demands.push(Demand {
            id: DemandId(0),
            src,
            dst,
            rate,
        });
    }
    DemandSet::from_demands(demands)
}
