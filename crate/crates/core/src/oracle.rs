// SPDX-License-Identifier: Apache-2.0

//! Semantic validation of designs, written straight from the channel rules
//! and sharing no code with the ILP builder or the solver, plus a brute-force
//! optimum for tiny instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::engine::{Lightpath, Mode, Pairing, Solution};
use crate::netgraph::{LinkId, NodeId, Path, Topology};
use crate::traffic::{DemandId, DemandSet};

/// One failed rule. `rule` is a constraint label (`c1` … `c21`) or a
/// semantic rule name such as `mode`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub detail: String,
    pub indices: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.rule, self.detail)?;
        if !self.indices.is_empty() {
            write!(f, " ({})", self.indices.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// Whether some violation carries this rule label.
    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    fn push(&mut self, rule: &str, detail: String, indices: Vec<String>) {
        self.violations.push(Violation {
            rule: rule.to_string(),
            detail,
            indices,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "PASS: all rules satisfied");
        }
        writeln!(f, "FAIL: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Demands occupying one wavelength on one link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelUse {
    pub demands: Vec<DemandId>,
    /// The occupants are a pairing riding its merged segment.
    pub shared: bool,
}

pub type ChannelOccupancy = BTreeMap<(LinkId, u32), ChannelUse>;

/// Links of a node sequence, resolved through the topology. `None` for a hop
/// without a link.
fn resolve_links(t: &Topology, nodes: &[NodeId]) -> Vec<Option<LinkId>> {
    nodes.windows(2).map(|w| t.link_between(w[0], w[1])).collect()
}

/// Node sequence of `path` from `v` on, if `v` is on it.
fn tail_from(path: &Path, v: NodeId) -> Option<&[NodeId]> {
    path.nodes.iter().position(|&n| n == v).map(|i| &path.nodes[i..])
}

/// Links a pairing legitimately shares: the hops of the first demand's route
/// from the aggregation node, when both routes continue identically from it.
fn merged_links(t: &Topology, s: &Solution, p: &Pairing) -> BTreeSet<LinkId> {
    let (Some(a), Some(b)) = (s.lightpath(p.d1), s.lightpath(p.d2)) else {
        return BTreeSet::new();
    };
    match (tail_from(&a.path, p.agg_node), tail_from(&b.path, p.agg_node)) {
        (Some(x), Some(y)) if x == y && x.len() >= 2 => resolve_links(t, x).into_iter().flatten().collect(),
        _ => BTreeSet::new(),
    }
}

pub fn channel_occupancy(t: &Topology, s: &Solution) -> ChannelOccupancy {
    let mut occ: ChannelOccupancy = BTreeMap::new();
    for lp in &s.lightpaths {
        for link in resolve_links(t, &lp.path.nodes).into_iter().flatten() {
            occ.entry((link, lp.wavelength))
                .or_insert_with(|| ChannelUse {
                    demands: Vec::new(),
                    shared: false,
                })
                .demands
                .push(lp.demand);
        }
    }
    for p in &s.pairings {
        let merged = merged_links(t, s, p);
        let Some(w) = s.lightpath(p.d1).map(|lp| lp.wavelength) else {
            continue;
        };
        for link in merged {
            if let Some(use_) = occ.get_mut(&(link, w)) {
                let mut ds = use_.demands.clone();
                ds.sort();
                let mut pair = [p.d1, p.d2];
                pair.sort();
                if ds == pair {
                    use_.shared = true;
                }
            }
        }
    }
    occ
}

fn tag_d(d: DemandId) -> String {
    format!("d{d}")
}

/// Checks every rule and reports all failures.
pub fn check(t: &Topology, d: &DemandSet, s: &Solution) -> ValidationReport {
    let mut r = ValidationReport::default();

    // c1: exactly one lightpath per demand, on a real wavelength.
    let mut per_demand: BTreeMap<DemandId, Vec<&Lightpath>> = BTreeMap::new();
    for lp in &s.lightpaths {
        per_demand.entry(lp.demand).or_default().push(lp);
    }
    for dem in d.iter() {
        match per_demand.get(&dem.id).map(Vec::len).unwrap_or(0) {
            1 => {}
            0 => r.push(
                "c1",
                format!("demand {} {dem} is not served", dem.id),
                vec![tag_d(dem.id)],
            ),
            n => r.push(
                "c1",
                format!("demand {} has {n} lightpaths", dem.id),
                vec![tag_d(dem.id)],
            ),
        }
    }
    for lp in &s.lightpaths {
        if d.get(lp.demand).is_none() {
            r.push(
                "c1",
                format!("lightpath for unknown demand {}", lp.demand),
                vec![tag_d(lp.demand)],
            );
        }
        if lp.wavelength == 0 {
            r.push(
                "c1",
                format!("demand {} on wavelength 0", lp.demand),
                vec![tag_d(lp.demand)],
            );
        }
    }

    // c2: each route is a simple path from the demand's source to its
    // destination over existing links.
    for lp in &s.lightpaths {
        let Some(dem) = d.get(lp.demand) else { continue };
        let nodes = &lp.path.nodes;
        let idx = vec![tag_d(lp.demand)];
        if nodes.len() < 2 {
            r.push("c2", format!("demand {} has an empty route", lp.demand), idx);
            continue;
        }
        if nodes[0] != dem.src || nodes[nodes.len() - 1] != dem.dst {
            r.push(
                "c2",
                format!(
                    "route {} of demand {} does not run {}->{}",
                    lp.path, lp.demand, dem.src, dem.dst
                ),
                idx.clone(),
            );
        }
        let links = resolve_links(t, nodes);
        if links.iter().any(Option::is_none) {
            r.push("c2", format!("route {} uses a missing link", lp.path), idx.clone());
        } else if links.iter().map(|l| l.unwrap()).ne(lp.path.links.iter().copied()) {
            r.push(
                "c2",
                format!("route {} lists inconsistent link ids", lp.path),
                idx.clone(),
            );
        }
        let distinct: BTreeSet<_> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            r.push("c2", format!("route {} revisits a node", lp.path), idx);
        }
    }

    if s.mode == Mode::Bypass && !s.pairings.is_empty() {
        r.push("mode", "bypass design contains pairings".into(), Vec::new());
    }

    // Pairing structure.
    let mut times_paired: BTreeMap<DemandId, usize> = BTreeMap::new();
    for p in &s.pairings {
        let idx = vec![tag_d(p.d1), tag_d(p.d2)];
        *times_paired.entry(p.d1).or_default() += 1;
        if p.d2 != p.d1 {
            *times_paired.entry(p.d2).or_default() += 1;
        }
        if p.d1 == p.d2 {
            r.push("c8", format!("demand {} paired with itself", p.d1), idx.clone());
            continue;
        }
        let (Some(a), Some(b)) = (d.get(p.d1), d.get(p.d2)) else {
            r.push("c8", format!("pairing {}+{} names an unknown demand", p.d1, p.d2), idx);
            continue;
        };
        if a.dst != b.dst {
            r.push(
                "c8",
                format!("pairing {}+{} joins destinations {} and {}", p.d1, p.d2, a.dst, b.dst),
                idx.clone(),
            );
        }
        if p.agg_node == a.dst || p.agg_node == b.dst {
            r.push(
                "c6",
                format!("pairing {}+{} aggregates at its destination", p.d1, p.d2),
                idx.clone(),
            );
        }
        let (Some(la), Some(lb)) = (s.lightpath(p.d1), s.lightpath(p.d2)) else {
            continue;
        };
        if la.wavelength != lb.wavelength {
            r.push(
                "c15",
                format!(
                    "pairing {}+{} uses wavelengths {} and {}",
                    p.d1, p.d2, la.wavelength, lb.wavelength
                ),
                idx.clone(),
            );
        }
        let ta = tail_from(&la.path, p.agg_node);
        let tb = tail_from(&lb.path, p.agg_node);
        if ta.is_none() || tb.is_none() {
            r.push(
                "c19",
                format!(
                    "aggregation node {} is not on both routes of {}+{}",
                    p.agg_node, p.d1, p.d2
                ),
                idx.clone(),
            );
        } else if ta != tb {
            r.push(
                "c20",
                format!(
                    "routes of {}+{} diverge after aggregation node {}",
                    p.d1, p.d2, p.agg_node
                ),
                idx.clone(),
            );
        } else if ta.map(<[NodeId]>::to_vec) != Some(p.shared_suffix.nodes.clone()) {
            r.push(
                "c20",
                format!(
                    "recorded shared route {} differs from the merged segment of {}+{}",
                    p.shared_suffix, p.d1, p.d2
                ),
                idx.clone(),
            );
        }
    }
    for (dem, n) in times_paired {
        if n > 1 {
            r.push("c7", format!("demand {dem} appears in {n} pairings"), vec![tag_d(dem)]);
        }
    }

    // c4: one channel per link and wavelength, except on a pairing's merged
    // segment where exactly that pair rides together.
    for ((link, w), use_) in channel_occupancy(t, s) {
        if use_.demands.len() > 1 && !use_.shared {
            let names: Vec<String> = use_.demands.iter().map(|&x| tag_d(x)).collect();
            r.push(
                "c4",
                format!(
                    "link {link} wavelength {w} is claimed by {} demands that are not one aggregated pair",
                    use_.demands.len()
                ),
                [vec![format!("e{link}"), format!("w{w}")], names].concat(),
            );
        }
    }

    // c21: the objective counts used wavelengths.
    let used: BTreeSet<u32> = s.lightpaths.iter().map(|lp| lp.wavelength).collect();
    if used.len() != s.objective {
        r.push(
            "c21",
            format!("objective {} but {} wavelengths in use", s.objective, used.len()),
            Vec::new(),
        );
    }
    r
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GuardError {
    #[error("brute force limited to {max} nodes, instance has {got}")]
    TooManyNodes { max: usize, got: usize },
    #[error("brute force limited to {max} demands, instance has {got}")]
    TooManyDemands { max: usize, got: usize },
    #[error("brute force limited to {max} wavelengths, asked for {got}")]
    TooManyWavelengths { max: u32, got: u32 },
}

pub const BRUTE_MAX_NODES: usize = 6;
pub const BRUTE_MAX_DEMANDS: usize = 4;
pub const BRUTE_MAX_WAVELENGTHS: u32 = 3;

/// Every simple route, built by trying all orderings of intermediate nodes.
fn all_routes(t: &Topology, src: NodeId, dst: NodeId) -> Vec<Path> {
    let middle: Vec<NodeId> = t.nodes().iter().copied().filter(|&v| v != src && v != dst).collect();
    let mut out = Vec::new();
    let mut seq = vec![src];
    let mut used = vec![false; middle.len()];
    fn go(t: &Topology, dst: NodeId, middle: &[NodeId], used: &mut [bool], seq: &mut Vec<NodeId>, out: &mut Vec<Path>) {
        seq.push(dst);
        if let Ok(p) = Path::from_nodes(t, seq) {
            out.push(p);
        }
        seq.pop();
        for i in 0..middle.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            seq.push(middle[i]);
            go(t, dst, middle, used, seq, out);
            seq.pop();
            used[i] = false;
        }
    }
    go(t, dst, &middle, &mut used, &mut seq, &mut out);
    out
}

/// All ways to pick disjoint pairs from `0..n` (including none).
fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, rest)) = free.split_first() else {
            out.push(acc.clone());
            return;
        };
        go(rest, acc, out);
        for (k, &other) in rest.iter().enumerate() {
            let remaining: Vec<usize> = rest
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &x)| x)
                .collect();
            acc.push((first, other));
            go(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

/// Minimum objective over every combination of routes, wavelengths,
/// pairings and aggregation nodes that passes [`check`]. `Ok(None)` when
/// nothing fits in `max_wavelengths`.
pub fn brute_force_optimum(
    t: &Topology,
    d: &DemandSet,
    mode: Mode,
    max_wavelengths: u32,
) -> Result<Option<usize>, GuardError> {
    if t.nodes().len() > BRUTE_MAX_NODES {
        return Err(GuardError::TooManyNodes {
            max: BRUTE_MAX_NODES,
            got: t.nodes().len(),
        });
    }
    if d.len() > BRUTE_MAX_DEMANDS {
        return Err(GuardError::TooManyDemands {
            max: BRUTE_MAX_DEMANDS,
            got: d.len(),
        });
    }
    if max_wavelengths > BRUTE_MAX_WAVELENGTHS {
        return Err(GuardError::TooManyWavelengths {
            max: BRUTE_MAX_WAVELENGTHS,
            got: max_wavelengths,
        });
    }
    if d.is_empty() {
        return Ok(Some(0));
    }
    let routes: Vec<Vec<Path>> = d.iter().map(|x| all_routes(t, x.src, x.dst)).collect();
    if routes.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let pairings_menu = match mode {
        Mode::Bypass => vec![Vec::new()],
        Mode::Aggregation => matchings(d.len()),
    };
    let ids: Vec<DemandId> = d.iter().map(|x| x.id).collect();
    let n = ids.len();
    let mut best: Option<usize> = None;

    let mut route_pick = vec![0usize; n];
    loop {
        // Wavelength of demand i is colour[i] + 1.
        let mut colour = vec![0usize; n];
        loop {
            let lightpaths: Vec<Lightpath> = (0..n)
                .map(|i| Lightpath {
                    demand: ids[i],
                    path: routes[i][route_pick[i]].clone(),
                    wavelength: colour[i] as u32 + 1,
                })
                .collect();
            let objective = colour.iter().collect::<BTreeSet<_>>().len();
            if !best.is_some_and(|b| objective >= b) {
                'menu: for pairs in &pairings_menu {
                    // Each pair may aggregate at any non-final node of its
                    // first demand's route.
                    let options: Vec<Vec<NodeId>> = pairs
                        .iter()
                        .map(|&(a, _)| {
                            let nodes = &lightpaths[a].path.nodes;
                            nodes[..nodes.len() - 1].to_vec()
                        })
                        .collect();
                    let mut at = vec![0usize; pairs.len()];
                    loop {
                        let pairings = pairs
                            .iter()
                            .zip(&at)
                            .zip(&options)
                            .map(|((&(a, b), &k), opts)| {
                                let v = opts[k];
                                Pairing {
                                    d1: ids[a],
                                    d2: ids[b],
                                    agg_node: v,
                                    shared_suffix: lightpaths[a].path.suffix_from(v).expect("node on route"),
                                }
                            })
                            .collect();
                        let candidate = Solution {
                            mode,
                            lightpaths: lightpaths.clone(),
                            pairings,
                            objective,
                        };
                        if check(t, d, &candidate).passed() {
                            best = Some(objective);
                            break 'menu;
                        }
                        if !odometer(&mut at, |i| options[i].len()) {
                            break;
                        }
                    }
                }
            }
            if !odometer(&mut colour, |_| max_wavelengths as usize) {
                break;
            }
        }
        if !odometer(&mut route_pick, |i| routes[i].len()) {
            break;
        }
    }
    Ok(best)
}

/// Advances a mixed-radix counter; false once it wraps to all zeros.
fn odometer(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for (i, digit) in digits.iter_mut().enumerate() {
        *digit += 1;
        if *digit < radix(i) {
            return true;
        }
        *digit = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::traffic::load_demands;

    fn path(t: &Topology, nodes: &[u32]) -> Path {
        Path::from_nodes(t, &nodes.iter().map(|&n| NodeId(n)).collect::<Vec<_>>()).unwrap()
    }

    fn lp(t: &Topology, d: u32, nodes: &[u32], w: u32) -> Lightpath {
        Lightpath {
            demand: DemandId(d),
            path: path(t, nodes),
            wavelength: w,
        }
    }

    fn star() -> (Topology, DemandSet) {
        (datasets::fig2toy(), load_demands(datasets::FIG2_DEMANDS).unwrap())
    }

    fn merged_design(t: &Topology) -> Solution {
        Solution {
            mode: Mode::Aggregation,
            lightpaths: vec![lp(t, 1, &[1, 3, 4], 1), lp(t, 2, &[2, 3, 4], 1)],
            pairings: vec![Pairing {
                d1: DemandId(1),
                d2: DemandId(2),
                agg_node: NodeId(3),
                shared_suffix: path(t, &[3, 4]),
            }],
            objective: 1,
        }
    }

    #[test]
    fn merged_star_design_passes() {
        let (t, d) = star();
        let s = merged_design(&t);
        let r = check(&t, &d, &s);
        assert!(r.passed(), "{r}");
        let occ = channel_occupancy(&t, &s);
        let xc = t.link_between(NodeId(3), NodeId(4)).unwrap();
        let use_ = &occ[&(xc, 1)];
        assert!(use_.shared);
        assert_eq!(use_.demands, vec![DemandId(1), DemandId(2)]);
        assert_eq!(occ.values().filter(|u| u.shared).count(), 1);
    }

    #[test]
    fn separate_star_design_occupancy() {
        let (t, d) = star();
        let s = Solution {
            mode: Mode::Bypass,
            lightpaths: vec![lp(&t, 1, &[1, 3, 4], 1), lp(&t, 2, &[2, 3, 4], 2)],
            pairings: vec![],
            objective: 2,
        };
        assert!(check(&t, &d, &s).passed());
        let occ = channel_occupancy(&t, &s);
        let xc = t.link_between(NodeId(3), NodeId(4)).unwrap();
        for w in [1, 2] {
            assert_eq!(occ[&(xc, w)].demands.len(), 1);
            assert!(!occ[&(xc, w)].shared);
        }
        let empty = Solution {
            mode: Mode::Bypass,
            lightpaths: vec![],
            pairings: vec![],
            objective: 0,
        };
        assert!(channel_occupancy(&t, &empty).is_empty());
    }

    #[test]
    fn collision_is_c4() {
        let (t, d) = star();
        let s = Solution {
            mode: Mode::Bypass,
            lightpaths: vec![lp(&t, 1, &[1, 3, 4], 1), lp(&t, 2, &[2, 3, 4], 1)],
            pairings: vec![],
            objective: 1,
        };
        let r = check(&t, &d, &s);
        assert!(r.has_rule("c4"), "{r}");
        assert_eq!(r.violations().len(), 1);
    }

    #[test]
    fn cross_destination_pairing_is_c8() {
        let t = datasets::cost239();
        let d = load_demands("2 1\n3 8").unwrap();
        let s = Solution {
            mode: Mode::Aggregation,
            lightpaths: vec![lp(&t, 1, &[2, 1], 1), lp(&t, 2, &[3, 8], 1)],
            pairings: vec![Pairing {
                d1: DemandId(1),
                d2: DemandId(2),
                agg_node: NodeId(2),
                shared_suffix: path(&t, &[2, 1]),
            }],
            objective: 1,
        };
        let r = check(&t, &d, &s);
        assert!(r.has_rule("c8"), "{r}");
    }

    #[test]
    fn reports_every_broken_rule() {
        let (t, d) = star();
        let mut s = merged_design(&t);
        s.lightpaths[1].wavelength = 2;
        s.pairings[0].agg_node = NodeId(4);
        s.pairings.push(s.pairings[0].clone());
        s.objective = 5;
        let r = check(&t, &d, &s);
        for rule in ["c6", "c7", "c15", "c21"] {
            assert!(r.has_rule(rule), "missing {rule}: {r}");
        }
        let mut bypass = merged_design(&t);
        bypass.mode = Mode::Bypass;
        assert!(check(&t, &d, &bypass).has_rule("mode"));
    }

    #[test]
    fn broken_routes_are_c2_and_missing_is_c1() {
        let (t, d) = star();
        let mut s = merged_design(&t);
        s.lightpaths[0].path.nodes = vec![NodeId(1), NodeId(4)];
        s.lightpaths[0].path.links = vec![LinkId(99)];
        s.lightpaths.pop();
        s.pairings.clear();
        let r = check(&t, &d, &s);
        assert!(r.has_rule("c1") && r.has_rule("c2"), "{r}");
    }

    #[test]
    fn prefix_overlap_is_a_conflict() {
        // Both demands leave node 1 together and merge only at node 3.
        let t = Topology::from_undirected("y", 4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let d = load_demands("1 4\n2 4").unwrap();
        let s = Solution {
            mode: Mode::Aggregation,
            lightpaths: vec![lp(&t, 1, &[1, 2, 3, 4], 1), lp(&t, 2, &[2, 3, 4], 1)],
            pairings: vec![Pairing {
                d1: DemandId(1),
                d2: DemandId(2),
                agg_node: NodeId(3),
                shared_suffix: path(&t, &[3, 4]),
            }],
            objective: 1,
        };
        assert!(check(&t, &d, &s).has_rule("c4"));
        let mut at_two = s.clone();
        at_two.pairings[0].agg_node = NodeId(2);
        at_two.pairings[0].shared_suffix = path(&t, &[2, 3, 4]);
        assert!(check(&t, &d, &at_two).passed());
    }

    #[test]
    fn brute_force_star() {
        let (t, d) = star();
        assert_eq!(brute_force_optimum(&t, &d, Mode::Bypass, 3), Ok(Some(2)));
        assert_eq!(brute_force_optimum(&t, &d, Mode::Aggregation, 3), Ok(Some(1)));
        assert_eq!(brute_force_optimum(&t, &d, Mode::Bypass, 1), Ok(None));
        let one = load_demands("2 4").unwrap();
        for mode in [Mode::Bypass, Mode::Aggregation] {
            assert_eq!(brute_force_optimum(&t, &one, mode, 2), Ok(Some(1)));
        }
    }

    #[test]
    fn brute_force_guards() {
        let t = datasets::cost239();
        let d = load_demands("2 1").unwrap();
        assert!(matches!(
            brute_force_optimum(&t, &d, Mode::Bypass, 2),
            Err(GuardError::TooManyNodes { .. })
        ));
        let (toy, _) = star();
        let many = load_demands("1 4\n2 4\n3 4\n1 2\n2 1").unwrap();
        assert!(matches!(
            brute_force_optimum(&toy, &many, Mode::Bypass, 2),
            Err(GuardError::TooManyDemands { .. })
        ));
        let d = load_demands("1 4").unwrap();
        assert!(matches!(
            brute_force_optimum(&toy, &d, Mode::Bypass, 4),
            Err(GuardError::TooManyWavelengths { .. })
        ));
    }

    #[test]
    fn helpers() {
        assert_eq!(matchings(4).len(), 10);
        assert_eq!(matchings(1), vec![Vec::<(usize, usize)>::new()]);
        let k4 = Topology::from_undirected("k4", 4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(all_routes(&k4, NodeId(1), NodeId(4)).len(), 5);
    }
}
