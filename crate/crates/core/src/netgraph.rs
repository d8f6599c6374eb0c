// SPDX-License-Identifier: Apache-2.0

//! Directed fiber topology, the line-oriented topology file format, and
//! simple-path enumeration.
//!
//! Topology files describe undirected fibers; every fiber `u v` becomes two
//! directed links `u -> v` and `v -> u`, numbered consecutively from 1 in file
//! order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Optical node identifier (positive integer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Directed link identifier (positive integer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub id: LinkId,
    pub src: NodeId,
    pub dst: NodeId,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate link {0} -> {1}")]
    DuplicateLink(NodeId, NodeId),
    #[error("link {link} references undeclared node {node}")]
    DanglingNode { link: LinkId, node: NodeId },
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// A directed graph of optical nodes and fiber links. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    name: String,
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    /// Outgoing links per node, sorted by destination node.
    out: BTreeMap<NodeId, Vec<Link>>,
    incoming: BTreeMap<NodeId, Vec<Link>>,
    by_ends: HashMap<(NodeId, NodeId), LinkId>,
}

impl Topology {
    /// Builds a topology from explicit directed links, checking every
    /// structural invariant.
    pub fn from_links(name: impl Into<String>, nodes: Vec<NodeId>, links: Vec<Link>) -> Result<Self, TopologyError> {
        let mut seen = BTreeSet::new();
        for &n in &nodes {
            if !seen.insert(n) {
                return Err(TopologyError::DuplicateNode(n));
            }
        }
        let mut out: BTreeMap<NodeId, Vec<Link>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
        let mut incoming = out.clone();
        let mut by_ends = HashMap::new();
        for link in &links {
            if link.src == link.dst {
                return Err(TopologyError::SelfLoop(link.src));
            }
            for node in [link.src, link.dst] {
                if !seen.contains(&node) {
                    return Err(TopologyError::DanglingNode { link: link.id, node });
                }
            }
            if by_ends.insert((link.src, link.dst), link.id).is_some() {
                return Err(TopologyError::DuplicateLink(link.src, link.dst));
            }
            out.get_mut(&link.src).unwrap().push(*link);
            incoming.get_mut(&link.dst).unwrap().push(*link);
        }
        for adj in out.values_mut() {
            adj.sort_by_key(|l| l.dst);
        }
        for adj in incoming.values_mut() {
            adj.sort_by_key(|l| l.src);
        }
        Ok(Self {
            name: name.into(),
            nodes,
            links,
            out,
            incoming,
            by_ends,
        })
    }

    /// Nodes `1..=node_count`, each undirected edge expanded to the pair
    /// `(u, v)`, `(v, u)` with consecutive link ids.
    pub fn from_undirected(
        name: impl Into<String>,
        node_count: u32,
        edges: &[(u32, u32)],
    ) -> Result<Self, TopologyError> {
        let nodes = (1..=node_count).map(NodeId).collect();
        let mut links = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            for (src, dst) in [(u, v), (v, u)] {
                links.push(Link {
                    id: LinkId(links.len() as u32 + 1),
                    src: NodeId(src),
                    dst: NodeId(dst),
                });
            }
        }
        Self::from_links(name, nodes, links)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.out.contains_key(&v)
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        // Ids are dense for file-loaded topologies; fall back to a scan otherwise.
        let idx = (id.0 as usize).wrapping_sub(1);
        match self.links.get(idx) {
            Some(l) if l.id == id => Some(l),
            _ => self.links.iter().find(|l| l.id == id),
        }
    }

    pub fn link_between(&self, src: NodeId, dst: NodeId) -> Option<LinkId> {
        self.by_ends.get(&(src, dst)).copied()
    }

    /// Outgoing links of `v`, ordered by destination node.
    pub fn out_links(&self, v: NodeId) -> &[Link] {
        self.out.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Incoming links of `v`, ordered by source node.
    pub fn in_links(&self, v: NodeId) -> &[Link] {
        self.incoming.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of distinct undirected neighbours of `v`.
    pub fn degree(&self, v: NodeId) -> Result<usize, TopologyError> {
        if !self.contains(v) {
            return Err(TopologyError::UnknownNode(v));
        }
        let neighbours: BTreeSet<NodeId> = self
            .out_links(v)
            .iter()
            .map(|l| l.dst)
            .chain(self.in_links(v).iter().map(|l| l.src))
            .collect();
        Ok(neighbours.len())
    }
}

/// Undirected degree of `v` in `t`.
pub fn degree(t: &Topology, v: NodeId) -> Result<usize, TopologyError> {
    t.degree(v)
}

/// Parses the topology file format:
///
/// ```text
/// # comment
/// name cost239      (optional)
/// nodes 11
/// 1 2
/// 1 6
/// ```
pub fn load_topology(text: &str) -> Result<Topology, TopologyError> {
    let mut name = None;
    let mut node_count = None;
    let mut edges = Vec::new();
    let mut seen_edges = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |msg: String| TopologyError::Parse { line: line_no, msg };
        match fields[0] {
            "name" => {
                if fields.len() != 2 {
                    return Err(parse_err("expected `name <identifier>`".into()));
                }
                name = Some(fields[1].to_string());
            }
            "nodes" => {
                if node_count.is_some() {
                    return Err(parse_err("repeated `nodes` header".into()));
                }
                let n = match fields.as_slice() {
                    [_, n] => n.parse::<u32>().map_err(|e| parse_err(format!("node count: {e}")))?,
                    _ => return Err(parse_err("expected `nodes <N>`".into())),
                };
                if n == 0 {
                    return Err(parse_err("node count must be positive".into()));
                }
                node_count = Some(n);
            }
            _ => {
                let Some(n) = node_count else {
                    return Err(parse_err("edge before `nodes <N>` header".into()));
                };
                let [u, v] = fields.as_slice() else {
                    return Err(parse_err(format!("expected `<u> <v>`, got `{line}`")));
                };
                let u: u32 = u.parse().map_err(|e| parse_err(format!("node id `{u}`: {e}")))?;
                let v: u32 = v.parse().map_err(|e| parse_err(format!("node id `{v}`: {e}")))?;
                if u == v {
                    return Err(parse_err(format!("self-loop on node {u}")));
                }
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_err(format!("node {x} outside 1..={n}")));
                    }
                }
                if !seen_edges.insert((u.min(v), u.max(v))) {
                    return Err(parse_err(format!("duplicate edge {u} {v}")));
                }
                edges.push((u, v));
            }
        }
    }
    let Some(n) = node_count else {
        return Err(TopologyError::Parse {
            line: text.lines().count().max(1),
            msg: "missing `nodes <N>` header".into(),
        });
    };
    Topology::from_undirected(name.unwrap_or_else(|| "unnamed".into()), n, &edges)
}

/// A simple directed route through a topology.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
}

impl Path {
    /// Resolves a node sequence against `t`, rejecting missing links and
    /// repeated nodes.
    pub fn from_nodes(t: &Topology, nodes: &[NodeId]) -> Result<Self, PathError> {
        if nodes.len() < 2 {
            return Err(PathError::TooShort);
        }
        let mut seen = BTreeSet::new();
        for &n in nodes {
            if !seen.insert(n) {
                return Err(PathError::RepeatedNode(n));
            }
        }
        let links = nodes
            .windows(2)
            .map(|w| t.link_between(w[0], w[1]).ok_or(PathError::MissingLink(w[0], w[1])))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            nodes: nodes.to_vec(),
            links,
        })
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn source(&self) -> Option<NodeId> {
        self.nodes.first().copied()
    }

    pub fn target(&self) -> Option<NodeId> {
        self.nodes.last().copied()
    }

    /// The sub-path starting at node `v`, if `v` lies on this path.
    pub fn suffix_from(&self, v: NodeId) -> Option<Path> {
        let pos = self.nodes.iter().position(|&n| n == v)?;
        Some(Path {
            nodes: self.nodes[pos..].to_vec(),
            links: self.links[pos..].to_vec(),
        })
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("a path needs at least two nodes")]
    TooShort,
    #[error("node {0} repeats")]
    RepeatedNode(NodeId),
    #[error("no link {0} -> {1}")]
    MissingLink(NodeId, NodeId),
    #[error("malformed node sequence `{0}`")]
    Malformed(String),
}

/// Parses `"4-10-2-1"` into node ids (no topology lookup).
pub fn parse_node_sequence(s: &str) -> Result<Vec<NodeId>, PathError> {
    s.split('-')
        .map(|p| p.trim().parse::<u32>().map(NodeId))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| PathError::Malformed(s.to_string()))
}

/// All simple directed paths from `src` to `dst` with at most `hop_limit`
/// links, ordered by hop count and then lexicographically by node sequence.
pub fn enumerate_simple_paths(t: &Topology, src: NodeId, dst: NodeId, hop_limit: Option<usize>) -> Vec<Path> {
    let mut found = Vec::new();
    if src == dst || !t.contains(src) || !t.contains(dst) || hop_limit == Some(0) {
        return found;
    }
    let limit = hop_limit.unwrap_or(usize::MAX);
    let mut on_path = BTreeSet::from([src]);
    let mut nodes = vec![src];
    let mut links = Vec::new();
    extend(t, dst, limit, &mut on_path, &mut nodes, &mut links, &mut found);
    // DFS over sorted adjacency yields lexicographic order; a stable sort by
    // length keeps it within each length class.
    found.sort_by_key(Path::hops);
    found
}

fn extend(
    t: &Topology,
    dst: NodeId,
    limit: usize,
    on_path: &mut BTreeSet<NodeId>,
    nodes: &mut Vec<NodeId>,
    links: &mut Vec<LinkId>,
    found: &mut Vec<Path>,
) {
    if links.len() == limit {
        return;
    }
    let here = *nodes.last().unwrap();
    for link in t.out_links(here) {
        if on_path.contains(&link.dst) {
            continue;
        }
        nodes.push(link.dst);
        links.push(link.id);
        if link.dst == dst {
            found.push(Path {
                nodes: nodes.clone(),
                links: links.clone(),
            });
        } else {
            on_path.insert(link.dst);
            extend(t, dst, limit, on_path, nodes, links, found);
            on_path.remove(&link.dst);
        }
        nodes.pop();
        links.pop();
    }
}
