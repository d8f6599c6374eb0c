// SPDX-License-Identifier: Apache-2.0

//! Self-contained text record of a solved instance.
//!
//! ```text
//! rwaa-solution/1
//! topology fig2toy
//! destination -
//! demands 2
//! max-wavelengths 8
//! mode aggregation
//! hop-limit none
//! objective 1
//! lightpath 1 1 4 1 1-3-4
//! lightpath 2 2 4 1 2-3-4
//! pairing 1 2 3 3-4
//! end
//! ```
//!
//! `lightpath` lines are `<demand> <src> <dst> <wavelength> <route>`;
//! `pairing` lines are `<d1> <d2> <aggregation-node> <shared-route>`.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::engine::{Lightpath, Mode, Pairing, Solution};
use crate::netgraph::{parse_node_sequence, LinkId, NodeId, Path, Topology};
use crate::traffic::DemandId;

pub const RECORD_VERSION: &str = "rwaa-solution/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordMeta {
    pub topology: String,
    /// Set when the demands were generated all-to-one.
    pub destination: Option<NodeId>,
    pub demands: usize,
    pub max_wavelengths: u32,
    pub mode: Mode,
    pub hop_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionRecord {
    pub meta: RecordMeta,
    pub solution: Solution,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("not a {RECORD_VERSION} record")]
    Version,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing `{0}` field")]
    Missing(&'static str),
    #[error("missing `end` line")]
    Unterminated,
}

impl fmt::Display for SolutionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.meta;
        let s = &self.solution;
        writeln!(f, "{RECORD_VERSION}")?;
        writeln!(f, "topology {}", m.topology)?;
        match m.destination {
            Some(v) => writeln!(f, "destination {v}")?,
            None => writeln!(f, "destination -")?,
        }
        writeln!(f, "demands {}", m.demands)?;
        writeln!(f, "max-wavelengths {}", m.max_wavelengths)?;
        writeln!(f, "mode {}", m.mode)?;
        match m.hop_limit {
            Some(h) => writeln!(f, "hop-limit {h}")?,
            None => writeln!(f, "hop-limit none")?,
        }
        writeln!(f, "objective {}", s.objective)?;
        for lp in &s.lightpaths {
            let (src, dst) = (lp.path.source(), lp.path.target());
            let show = |n: Option<NodeId>| n.map_or("-".to_string(), |n| n.to_string());
            writeln!(
                f,
                "lightpath {} {} {} {} {}",
                lp.demand,
                show(src),
                show(dst),
                lp.wavelength,
                lp.path
            )?;
        }
        for p in &s.pairings {
            writeln!(f, "pairing {} {} {} {}", p.d1, p.d2, p.agg_node, p.shared_suffix)?;
        }
        writeln!(f, "end")
    }
}

/// Route from a node sequence; hops without a link get id 0 so validation
/// can report them instead of the parser.
fn lenient_path(t: &Topology, nodes: Vec<NodeId>) -> Path {
    let links = nodes
        .windows(2)
        .map(|w| t.link_between(w[0], w[1]).unwrap_or(LinkId(0)))
        .collect();
    Path { nodes, links }
}

impl SolutionRecord {
    pub fn parse(t: &Topology, text: &str) -> Result<Self, RecordError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, RECORD_VERSION)) => {}
            _ => return Err(RecordError::Version),
        }
        let mut topology = None;
        let mut destination = None;
        let mut demands = None;
        let mut max_wavelengths = None;
        let mut mode = None;
        let mut hop_limit = None;
        let mut objective = None;
        let mut lightpaths = Vec::new();
        let mut pairings = Vec::new();
        let mut ended = false;
        for (line, text) in lines {
            let err = |msg: String| RecordError::Parse { line, msg };
            let fields: Vec<&str> = text.split_whitespace().collect();
            let num = |s: &str| s.parse::<u64>().map_err(|_| err(format!("`{s}` is not a number")));
            let route = |s: &str| parse_node_sequence(s).map_err(|e| err(e.to_string()));
            let arity = |n: usize| {
                if fields.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("`{}` expects {} field(s)", fields[0], n - 1)))
                }
            };
            match fields[0] {
                "topology" => {
                    arity(2)?;
                    topology = Some(fields[1].to_string());
                }
                "destination" => {
                    arity(2)?;
                    destination = Some(match fields[1] {
                        "-" => None,
                        v => Some(NodeId(num(v)? as u32)),
                    });
                }
                "demands" => {
                    arity(2)?;
                    demands = Some(num(fields[1])? as usize);
                }
                "max-wavelengths" => {
                    arity(2)?;
                    max_wavelengths = Some(num(fields[1])? as u32);
                }
                "mode" => {
                    arity(2)?;
                    mode = Some(fields[1].parse::<Mode>().map_err(err)?);
                }
                "hop-limit" => {
                    arity(2)?;
                    hop_limit = Some(match fields[1] {
                        "none" => None,
                        h => Some(num(h)? as usize),
                    });
                }
                "objective" => {
                    arity(2)?;
                    objective = Some(num(fields[1])? as usize);
                }
                "lightpath" => {
                    arity(6)?;
                    let nodes = route(fields[5])?;
                    let (src, dst) = (NodeId(num(fields[2])? as u32), NodeId(num(fields[3])? as u32));
                    if nodes.first() != Some(&src) || nodes.last() != Some(&dst) {
                        return Err(err(format!("route {} does not run {src}->{dst}", fields[5])));
                    }
                    lightpaths.push(Lightpath {
                        demand: DemandId(num(fields[1])? as u32),
                        path: lenient_path(t, nodes),
                        wavelength: num(fields[4])? as u32,
                    });
                }
                "pairing" => {
                    arity(5)?;
                    pairings.push(Pairing {
                        d1: DemandId(num(fields[1])? as u32),
                        d2: DemandId(num(fields[2])? as u32),
                        agg_node: NodeId(num(fields[3])? as u32),
                        shared_suffix: lenient_path(t, route(fields[4])?),
                    });
                }
                "end" => {
                    arity(1)?;
                    ended = true;
                    break;
                }
                other => return Err(err(format!("unknown field `{other}`"))),
            }
        }
        if !ended {
            return Err(RecordError::Unterminated);
        }
        let mode = mode.ok_or(RecordError::Missing("mode"))?;
        Ok(Self {
            meta: RecordMeta {
                topology: topology.ok_or(RecordError::Missing("topology"))?,
                destination: destination.ok_or(RecordError::Missing("destination"))?,
                demands: demands.ok_or(RecordError::Missing("demands"))?,
                max_wavelengths: max_wavelengths.ok_or(RecordError::Missing("max-wavelengths"))?,
                mode,
                hop_limit: hop_limit.ok_or(RecordError::Missing("hop-limit"))?,
            },
            solution: Solution {
                mode,
                lightpaths,
                pairings,
                objective: objective.ok_or(RecordError::Missing("objective"))?,
            },
        })
    }

    /// Rendered record text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{self}");
        s
    }
}
