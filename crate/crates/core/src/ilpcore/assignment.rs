// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::{IlpModel, RowViolation, VarRef};
use crate::engine::{Lightpath, Mode, Pairing, Solution};
use crate::netgraph::{LinkId, NodeId, Path};
use crate::traffic::DemandId;

/// Values within this distance of 0 or 1 are rounded.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-6;

/// A 0/1 value for every column of one model, in column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<u8>,
}

#[derive(Debug, Error, PartialEq)]
pub enum AssignmentError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unknown variable `{name}`")]
    UnknownVariable { line: usize, name: String },
    #[error("line {line}: `{name}` = {value} is not binary")]
    NotBinary { line: usize, name: String, value: f64 },
    #[error("variable `{0}` assigned twice")]
    Duplicate(String),
    #[error("{count} variable(s) unassigned, first `{first}`")]
    Missing { count: usize, first: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("demand {0} is not in the model")]
    UnknownDemand(DemandId),
    #[error("column `{0}` does not exist in this model")]
    MissingColumn(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseSolutionError {
    #[error("{} constraint(s) violated, first {} ({})", .0.len(), .0[0].row, .0[0].tag)]
    Violated(Vec<RowViolation>),
    #[error("demand {0}: route columns hold no path from source to destination")]
    NotAPath(DemandId),
    #[error("demand {0} has no wavelength")]
    NoWavelength(DemandId),
}

impl Assignment {
    pub fn zeros(m: &IlpModel) -> Self {
        Self {
            values: vec![0; m.vars().len()],
        }
    }

    pub fn get(&self, m: &IlpModel, v: &VarRef) -> Option<u8> {
        m.var_index(v).and_then(|i| self.values.get(i).copied())
    }

    pub fn set(&mut self, m: &IlpModel, v: VarRef, value: bool) -> Result<(), EncodeError> {
        let i = m
            .var_index(&v)
            .ok_or_else(|| EncodeError::MissingColumn(v.to_string()))?;
        self.values[i] = u8::from(value);
        Ok(())
    }

    fn is_set(&self, m: &IlpModel, v: VarRef) -> bool {
        self.get(m, &v) == Some(1)
    }

    /// Parses `<var-name> <value>` lines. Blank lines and `#` comments are
    /// skipped; every model column must appear exactly once.
    pub fn parse(m: &IlpModel, text: &str) -> Result<Self, AssignmentError> {
        let by_name: HashMap<String, usize> = m.vars().iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect();
        let mut values: Vec<Option<u8>> = vec![None; m.vars().len()];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let [name, value] = line.split_whitespace().collect::<Vec<_>>()[..] else {
                return Err(AssignmentError::Parse {
                    line: line_no,
                    msg: format!("expected `<var-name> <value>`, got `{line}`"),
                });
            };
            let Some(&i) = by_name.get(name) else {
                return Err(AssignmentError::UnknownVariable {
                    line: line_no,
                    name: name.to_string(),
                });
            };
            let x: f64 = value.parse().map_err(|_| AssignmentError::Parse {
                line: line_no,
                msg: format!("`{value}` is not a number"),
            })?;
            let bit = if (x - 0.0).abs() <= INTEGRALITY_TOLERANCE {
                0
            } else if (x - 1.0).abs() <= INTEGRALITY_TOLERANCE {
                1
            } else {
                return Err(AssignmentError::NotBinary {
                    line: line_no,
                    name: name.to_string(),
                    value: x,
                });
            };
            if values[i].replace(bit).is_some() {
                return Err(AssignmentError::Duplicate(name.to_string()));
            }
        }
        let missing: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_none()).collect();
        if let Some(&first) = missing.first() {
            return Err(AssignmentError::Missing {
                count: missing.len(),
                first: m.vars()[first].to_string(),
            });
        }
        Ok(Self {
            values: values.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// One `<var-name> <value>` line per column, in column order.
    pub fn to_text(&self, m: &IlpModel) -> String {
        let mut out = String::new();
        for (v, x) in m.vars().iter().zip(&self.values) {
            let _ = writeln!(out, "{v} {x}");
        }
        out
    }
}

/// Column values describing `s` in model `m`.
///
/// Routes set x and theta; each pairing sets f both ways, delta at its
/// aggregation node and y along each partner's own route from that node;
/// gamma marks occupied channels and alpha used wavelengths.
pub fn encode_solution(m: &IlpModel, s: &Solution) -> Result<Assignment, EncodeError> {
    let mut a = Assignment::zeros(m);
    for lp in &s.lightpaths {
        let (d, w) = (lp.demand, lp.wavelength);
        if m.demands.get(d).is_none() {
            return Err(EncodeError::UnknownDemand(d));
        }
        a.set(m, VarRef::Theta { d, w }, true)?;
        for &e in &lp.path.links {
            a.set(m, VarRef::X { d, e, w }, true)?;
            a.set(m, VarRef::Gamma { e, w }, true)?;
        }
        a.set(m, VarRef::Alpha { w }, true)?;
    }
    for p in &s.pairings {
        a.set(m, VarRef::F { d1: p.d1, d2: p.d2 }, true)?;
        a.set(m, VarRef::F { d1: p.d2, d2: p.d1 }, true)?;
        for d in [p.d1, p.d2] {
            let v = p.agg_node;
            a.set(m, VarRef::Delta { d, v }, true)?;
            let Some(lp) = s.lightpath(d) else { continue };
            if let Some(tail) = lp.path.suffix_from(v) {
                for &e in &tail.links {
                    a.set(
                        m,
                        VarRef::Y {
                            d,
                            e,
                            w: lp.wavelength,
                            v,
                        },
                        true,
                    )?;
                }
            }
        }
    }
    Ok(a)
}

/// Simple path from `from` to `to` using only `links`, never entering a
/// node in `blocked`. The first such path in link order.
fn route_within(
    m: &IlpModel,
    links: &BTreeSet<LinkId>,
    from: NodeId,
    to: NodeId,
    blocked: &BTreeSet<NodeId>,
) -> Option<Path> {
    fn go(
        m: &IlpModel,
        links: &BTreeSet<LinkId>,
        to: NodeId,
        blocked: &BTreeSet<NodeId>,
        nodes: &mut Vec<NodeId>,
        hops: &mut Vec<LinkId>,
    ) -> bool {
        let here = *nodes.last().unwrap();
        if here == to {
            return true;
        }
        for l in m.topology.out_links(here) {
            if !links.contains(&l.id) || blocked.contains(&l.dst) || nodes.contains(&l.dst) {
                continue;
            }
            nodes.push(l.dst);
            hops.push(l.id);
            if go(m, links, to, blocked, nodes, hops) {
                return true;
            }
            nodes.pop();
            hops.pop();
        }
        false
    }
    let mut nodes = vec![from];
    let mut hops = Vec::new();
    go(m, links, to, blocked, &mut nodes, &mut hops).then_some(Path { nodes, links: hops })
}

/// Links whose `column` is set.
fn support(m: &IlpModel, a: &Assignment, column: impl Fn(LinkId) -> VarRef) -> BTreeSet<LinkId> {
    m.topology
        .links()
        .iter()
        .map(|l| l.id)
        .filter(|&e| a.is_set(m, column(e)))
        .collect()
}

/// Partner named by the pairing columns, if any.
fn partner(m: &IlpModel, a: &Assignment, d: DemandId) -> Option<DemandId> {
    m.demands
        .iter()
        .map(|o| o.id)
        .find(|&o| o != d && a.is_set(m, VarRef::F { d1: d, d2: o }))
}

/// Rebuilds the design encoded by a feasible assignment.
///
/// Flow rows admit closed loops of route and merged columns that carry no
/// traffic, on any wavelength. Each route is read as a simple
/// source-to-destination path through the set route columns of the demand's
/// wavelength. For a paired demand the path runs to the aggregation node and
/// then along links where both partners have merged columns on that
/// wavelength, when such a continuation exists. Other routes prefer links no
/// other demand claims on the same wavelength. Pairings are then taken from
/// the decoded routes: two partners form a pairing at the first node of
/// their longest common suffix. Leftover loops are reported by
/// [`ignored_route_columns`] and pairings without a common suffix by
/// [`unrealised_pairings`]. The returned objective counts the wavelengths
/// the decoded routes use.
pub fn parse_solution(m: &IlpModel, a: &Assignment) -> Result<Solution, ParseSolutionError> {
    let violated = m.evaluate(a);
    if !violated.is_empty() {
        return Err(ParseSolutionError::Violated(violated));
    }
    let t = &m.topology;
    let ws = 1..=m.meta.wavelengths;
    let aggregation = m.meta.mode == Mode::Aggregation;
    let agg_node = |d: DemandId| {
        if aggregation {
            t.nodes().iter().copied().find(|&v| a.is_set(m, VarRef::Delta { d, v }))
        } else {
            None
        }
    };
    let mut lightpaths = Vec::new();
    for dem in m.demands.iter() {
        let d = dem.id;
        let w = ws
            .clone()
            .find(|&w| a.is_set(m, VarRef::Theta { d, w }))
            .ok_or(ParseSolutionError::NoWavelength(d))?;
        let own = support(m, a, |e| VarRef::X { d, e, w });
        let merged_route = agg_node(d).zip(partner(m, a, d)).and_then(|(v, p)| {
            let mine = support(m, a, |e| VarRef::Y { d, e, w, v });
            let theirs = support(m, a, |e| VarRef::Y { d: p, e, w, v });
            let shared: BTreeSet<LinkId> = mine.intersection(&theirs).copied().collect();
            let tail = route_within(m, &shared, v, dem.dst, &BTreeSet::new())?;
            let blocked: BTreeSet<NodeId> = tail.nodes[1..].iter().copied().collect();
            let head = route_within(m, &own, dem.src, v, &blocked)?;
            let mut nodes = head.nodes;
            nodes.extend(&tail.nodes[1..]);
            let mut links = head.links;
            links.extend(tail.links);
            Some(Path { nodes, links })
        });
        let path = match merged_route {
            Some(path) => path,
            None => {
                let others = m.demands.iter().map(|o| o.id).filter(|&o| o != d);
                let contested: BTreeSet<LinkId> = others
                    .flat_map(|o| support(m, a, |e| VarRef::X { d: o, e, w }))
                    .collect();
                let exclusive: BTreeSet<LinkId> = own.difference(&contested).copied().collect();
                route_within(m, &exclusive, dem.src, dem.dst, &BTreeSet::new())
                    .or_else(|| route_within(m, &own, dem.src, dem.dst, &BTreeSet::new()))
                    .ok_or(ParseSolutionError::NotAPath(d))?
            }
        };
        lightpaths.push(Lightpath {
            demand: d,
            path,
            wavelength: w,
        });
    }
    let mut pairings = Vec::new();
    if aggregation {
        for a1 in m.demands.iter() {
            let Some(p) = partner(m, a, a1.id).filter(|&p| p > a1.id) else {
                continue;
            };
            let r1 = &lightpaths[a1.id.0 as usize - 1];
            let r2 = &lightpaths[p.0 as usize - 1];
            let common = r1
                .path
                .links
                .iter()
                .rev()
                .zip(r2.path.links.iter().rev())
                .take_while(|(x, y)| x == y)
                .count();
            if common == 0 || r1.wavelength != r2.wavelength {
                continue;
            }
            let v = r1.path.nodes[r1.path.nodes.len() - 1 - common];
            pairings.push(Pairing {
                d1: a1.id,
                d2: p,
                agg_node: v,
                shared_suffix: r1.path.suffix_from(v).expect("node is on the route"),
            });
        }
    }
    let objective = lightpaths.iter().map(|l| l.wavelength).collect::<BTreeSet<_>>().len();
    Ok(Solution {
        mode: m.meta.mode,
        lightpaths,
        pairings,
        objective,
    })
}

/// Pairings chosen in `a` that `s` does not contain with the same
/// aggregation node.
pub fn unrealised_pairings(m: &IlpModel, a: &Assignment, s: &Solution) -> usize {
    m.demands
        .iter()
        .filter_map(|d| partner(m, a, d.id).filter(|&p| p > d.id).map(|p| (d.id, p)))
        .filter(|&(d1, d2)| {
            !s.pairings
                .iter()
                .any(|q| q.d1 == d1 && q.d2 == d2 && a.is_set(m, VarRef::Delta { d: d1, v: q.agg_node }))
        })
        .count()
}

/// Route columns set in `a` that lie outside the routes of `s`.
pub fn ignored_route_columns(m: &IlpModel, a: &Assignment, s: &Solution) -> usize {
    let mut on_route: BTreeSet<VarRef> = BTreeSet::new();
    for lp in &s.lightpaths {
        for &e in &lp.path.links {
            on_route.insert(VarRef::X {
                d: lp.demand,
                e,
                w: lp.wavelength,
            });
        }
    }
    m.vars()
        .iter()
        .filter(|v| matches!(v, VarRef::X { .. }) && a.is_set(m, **v) && !on_route.contains(v))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets;
    use crate::engine::solve;
    use crate::ilpcore::{build_bypass_model, build_rwaa_model};
    use crate::traffic::{all_to_one, load_demands};

    #[test]
    fn solver_design_round_trips() {
        let t = datasets::fig2toy();
        let d = load_demands(datasets::FIG2_DEMANDS).unwrap();
        let s = solve(&t, &d, Mode::Aggregation, 2, None).unwrap();
        let m = build_rwaa_model(&t, &d, 2).unwrap();
        let a = encode_solution(&m, &s).unwrap();
        assert!(m.evaluate(&a).is_empty());
        assert_eq!(parse_solution(&m, &a).unwrap(), s);
        let text = a.to_text(&m);
        assert_eq!(Assignment::parse(&m, &text).unwrap(), a);
    }

    #[test]
    fn all_zero_breaks_c1() {
        let t = datasets::fig2toy();
        let d = load_demands(datasets::FIG2_DEMANDS).unwrap();
        let m = build_bypass_model(&t, &d, 2).unwrap();
        let Err(ParseSolutionError::Violated(rows)) = parse_solution(&m, &Assignment::zeros(&m)) else {
            panic!("expected violations");
        };
        assert_eq!(rows[0].tag, "c1");
    }

    #[test]
    fn reference_cost239_design_decodes() {
        // Routes and wavelengths of the reference aggregation design towards
        // node 1, with its five pairings.
        let t = datasets::cost239();
        let d = all_to_one(&t, NodeId(1)).unwrap();
        let routes: [(&str, u32); 10] = [
            ("2-1", 1),
            ("3-2-1", 1),
            ("4-10-2-1", 2),
            ("5-7-1", 1),
            ("6-1", 1),
            ("7-1", 1),
            ("8-1", 1),
            ("9-8-1", 1),
            ("10-2-1", 2),
            ("11-6-1", 1),
        ];
        let pairs: [(u32, u32, u32); 5] = [(1, 2, 2), (3, 9, 10), (4, 6, 7), (5, 10, 6), (7, 8, 8)];
        let lightpaths: Vec<Lightpath> = routes
            .iter()
            .enumerate()
            .map(|(i, (r, w))| Lightpath {
                demand: DemandId(i as u32 + 1),
                path: Path::from_nodes(&t, &crate::netgraph::parse_node_sequence(r).unwrap()).unwrap(),
                wavelength: *w,
            })
            .collect();
        let pairings = pairs
            .iter()
            .map(|&(a, b, v)| Pairing {
                d1: DemandId(a),
                d2: DemandId(b),
                agg_node: NodeId(v),
                shared_suffix: lightpaths[a as usize - 1].path.suffix_from(NodeId(v)).unwrap(),
            })
            .collect();
        let s = Solution {
            mode: Mode::Aggregation,
            lightpaths,
            pairings,
            objective: 2,
        };
        let m = build_rwaa_model(&t, &d, 2).unwrap();
        let a = encode_solution(&m, &s).unwrap();
        assert_eq!(m.evaluate(&a), vec![]);
        let back = parse_solution(&m, &a).unwrap();
        assert_eq!(back.objective, 2);
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_malformed_text() {
        let t = datasets::fig2toy();
        let d = load_demands("1 4").unwrap();
        let m = build_bypass_model(&t, &d, 1).unwrap();
        let full = Assignment::zeros(&m).to_text(&m);
        assert!(matches!(
            Assignment::parse(&m, &full.replacen(" 0", " 0.5", 1)),
            Err(AssignmentError::NotBinary { line: 1, .. })
        ));
        let near = full
            .replacen(" 0", " 0.0000001", 1)
            .replacen("alpha_w1 0", "alpha_w1 0.9999995", 1);
        assert!(Assignment::parse(&m, &near).is_ok());
        assert!(matches!(
            Assignment::parse(&m, &format!("{full}bogus 1\n")),
            Err(AssignmentError::UnknownVariable { .. })
        ));
        assert!(matches!(
            Assignment::parse(&m, "alpha_w1 1\n"),
            Err(AssignmentError::Missing { .. })
        ));
        assert!(matches!(
            Assignment::parse(&m, &format!("{full}alpha_w1 1\n")),
            Err(AssignmentError::Duplicate(_))
        ));
    }

    #[test]
    fn detached_cycles_are_ignored() {
        let t = datasets::fig2toy();
        let d = load_demands("1 4").unwrap();
        let m = build_bypass_model(&t, &d, 1).unwrap();
        let s = solve(&t, &d, Mode::Bypass, 1, None).unwrap();
        let mut a = encode_solution(&m, &s).unwrap();
        // A 2-3-2 loop on the same wavelength keeps flow conservation.
        let l23 = t.link_between(NodeId(2), NodeId(3)).unwrap();
        let l32 = t.link_between(NodeId(3), NodeId(2)).unwrap();
        for e in [l23, l32] {
            a.set(
                &m,
                VarRef::X {
                    d: DemandId(1),
                    e,
                    w: 1,
                },
                true,
            )
            .unwrap();
            a.set(&m, VarRef::Gamma { e, w: 1 }, true).unwrap();
        }
        assert!(m.evaluate(&a).is_empty());
        let back = parse_solution(&m, &a).unwrap();
        assert_eq!(back, s);
        assert_eq!(ignored_route_columns(&m, &a, &back), 2);
    }

    #[test]
    fn pairing_on_a_ghost_loop_is_not_realised() {
        // Direct routes 1-4 and 2-4. The partners also run loops 3-4-5-3 and
        // 3-4-6-3 that merge on 3-4, which satisfies every pairing row.
        let t = crate::netgraph::Topology::from_undirected(
            "ghost",
            6,
            &[(1, 4), (2, 4), (3, 4), (4, 5), (5, 3), (4, 6), (6, 3)],
        )
        .unwrap();
        let d = load_demands("1 4\n2 4").unwrap();
        let m = build_rwaa_model(&t, &d, 1).unwrap();
        let path = |nodes: &[u32]| Path::from_nodes(&t, &nodes.iter().map(|&n| NodeId(n)).collect::<Vec<_>>()).unwrap();
        let s = Solution {
            mode: Mode::Aggregation,
            lightpaths: vec![
                Lightpath {
                    demand: DemandId(1),
                    path: path(&[1, 4]),
                    wavelength: 1,
                },
                Lightpath {
                    demand: DemandId(2),
                    path: path(&[2, 4]),
                    wavelength: 1,
                },
            ],
            pairings: vec![],
            objective: 1,
        };
        let mut a = encode_solution(&m, &s).unwrap();
        let link = |u: u32, v: u32| t.link_between(NodeId(u), NodeId(v)).unwrap();
        let (v, w) = (NodeId(3), 1);
        for (d, via) in [(DemandId(1), 5), (DemandId(2), 6)] {
            for e in [link(3, 4), link(4, via), link(via, 3)] {
                a.set(&m, VarRef::X { d, e, w }, true).unwrap();
                a.set(&m, VarRef::Gamma { e, w }, true).unwrap();
            }
            a.set(&m, VarRef::Y { d, e: link(3, 4), w, v }, true).unwrap();
            a.set(&m, VarRef::Delta { d, v }, true).unwrap();
        }
        a.set(
            &m,
            VarRef::F {
                d1: DemandId(1),
                d2: DemandId(2),
            },
            true,
        )
        .unwrap();
        a.set(
            &m,
            VarRef::F {
                d1: DemandId(2),
                d2: DemandId(1),
            },
            true,
        )
        .unwrap();
        assert!(m.evaluate(&a).is_empty());
        let back = parse_solution(&m, &a).unwrap();
        assert_eq!(back, s);
        assert_eq!(ignored_route_columns(&m, &a, &back), 6);
        assert_eq!(unrealised_pairings(&m, &a, &back), 1);
        assert!(crate::oracle::check(&t, &d, &back).passed());
    }
}
