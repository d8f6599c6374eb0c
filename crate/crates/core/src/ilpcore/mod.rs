// SPDX-License-Identifier: Apache-2.0

//! The exact integer program for routing, wavelength and aggregation
//! assignment, its bypass restriction, LP-file export and re-import of
//! solver assignments.
//!
//! Every variable is binary. Constraint families carry the labels `c1`, `c2`,
//! `c4`, `c6` to `c12` and `c15` to `c21`, shared with the checker's rules.
//! Rows are named `<family>_<indices>`, e.g. `c4_e12_w2`.

mod assignment;
mod lp;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::engine::Mode;
use crate::netgraph::{LinkId, NodeId, Topology};
use crate::traffic::{DemandError, DemandId, DemandSet};

pub use assignment::{
    encode_solution, ignored_route_columns, parse_solution, unrealised_pairings, Assignment, AssignmentError,
    ParseSolutionError,
};
pub use lp::export_lp;

/// A binary decision variable.
///
/// Variants are declared in export order so the derived ordering sorts
/// columns by family, then indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRef {
    /// Demand `d` uses link `e` on wavelength `w`.
    X { d: DemandId, e: LinkId, w: u32 },
    /// Demand `d` is carried on wavelength `w`.
    Theta { d: DemandId, w: u32 },
    /// Demand `d`, aggregated at `v` on wavelength `w`, routes the merged
    /// lightpath over link `e`.
    Y { d: DemandId, e: LinkId, w: u32, v: NodeId },
    /// `v` is the aggregation node of demand `d`.
    Delta { d: DemandId, v: NodeId },
    /// Demands `d1` and `d2` are aggregated with each other.
    F { d1: DemandId, d2: DemandId },
    /// Wavelength `w` is occupied on link `e`.
    Gamma { e: LinkId, w: u32 },
    /// Wavelength `w` is used somewhere.
    Alpha { w: u32 },
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarRef::X { d, e, w } => write!(f, "x_d{d}_e{e}_w{w}"),
            VarRef::Theta { d, w } => write!(f, "theta_d{d}_w{w}"),
            VarRef::Y { d, e, w, v } => write!(f, "y_d{d}_e{e}_w{w}_v{v}"),
            VarRef::Delta { d, v } => write!(f, "delta_d{d}_v{v}"),
            VarRef::F { d1, d2 } => write!(f, "f_d{d1}_d{d2}"),
            VarRef::Gamma { e, w } => write!(f, "gamma_e{e}_w{w}"),
            VarRef::Alpha { w } => write!(f, "alpha_w{w}"),
        }
    }
}

impl VarRef {
    pub fn family(&self) -> &'static str {
        match self {
            VarRef::X { .. } => "x",
            VarRef::Theta { .. } => "theta",
            VarRef::Y { .. } => "y",
            VarRef::Delta { .. } => "delta",
            VarRef::F { .. } => "f",
            VarRef::Gamma { .. } => "gamma",
            VarRef::Alpha { .. } => "alpha",
        }
    }
}

/// Exact coefficient stored in half units; `½` is the only fraction the
/// model needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coef {
    halves: i64,
}

impl Coef {
    pub const ONE: Coef = Coef { halves: 2 };
    pub const HALF: Coef = Coef { halves: 1 };

    pub const fn int(v: i64) -> Self {
        Coef { halves: 2 * v }
    }

    pub fn halves(self) -> i64 {
        self.halves
    }

    pub fn is_integer(self) -> bool {
        self.halves % 2 == 0
    }

    pub fn abs(self) -> Self {
        Coef {
            halves: self.halves.abs(),
        }
    }
}

impl std::ops::Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        Coef { halves: -self.halves }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.halves / 2)
        } else {
            let sign = if self.halves < 0 { "-" } else { "" };
            write!(f, "{sign}{}.5", self.halves.abs() / 2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    /// Row name, `<tag>_<indices>`.
    pub name: String,
    /// Constraint family label, `c1` … `c21`.
    pub tag: &'static str,
    pub terms: Vec<(Coef, VarRef)>,
    pub sense: Sense,
    pub rhs: Coef,
}

impl LinearConstraint {
    /// Left-hand side in half units under `value`.
    fn lhs_halves(&self, value: impl Fn(&VarRef) -> i64) -> i64 {
        self.terms.iter().map(|(c, v)| c.halves * value(v)).sum()
    }

    pub fn holds(&self, value: impl Fn(&VarRef) -> i64) -> bool {
        let lhs = self.lhs_halves(value);
        match self.sense {
            Sense::Le => lhs <= self.rhs.halves,
            Sense::Eq => lhs == self.rhs.halves,
            Sense::Ge => lhs >= self.rhs.halves,
        }
    }
}

/// Accumulates terms, merging repeated variables and keeping first-insertion
/// order.
struct RowBuilder {
    terms: Vec<(Coef, VarRef)>,
    at: HashMap<VarRef, usize>,
}

impl RowBuilder {
    fn new() -> Self {
        Self {
            terms: Vec::new(),
            at: HashMap::new(),
        }
    }

    fn add(&mut self, c: Coef, v: VarRef) -> &mut Self {
        match self.at.get(&v) {
            Some(&i) => self.terms[i].0.halves += c.halves,
            None => {
                self.at.insert(v, self.terms.len());
                self.terms.push((c, v));
            }
        }
        self
    }

    fn finish(&mut self, tag: &'static str, name: String, sense: Sense, rhs: i64) -> LinearConstraint {
        let terms = std::mem::take(&mut self.terms)
            .into_iter()
            .filter(|(c, _)| c.halves != 0)
            .collect();
        self.at.clear();
        LinearConstraint {
            name,
            tag,
            terms,
            sense,
            rhs: Coef::int(rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelMeta {
    pub topology: String,
    pub demands: usize,
    pub wavelengths: u32,
    pub mode: Mode,
}

#[derive(Debug, Clone)]
pub struct IlpModel {
    pub meta: ModelMeta,
    vars: Vec<VarRef>,
    index: HashMap<VarRef, usize>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(Coef, VarRef)>,
    /// Instance data needed to turn assignments back into routes.
    pub(crate) demands: DemandSet,
    pub(crate) topology: Topology,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("at least one wavelength is required")]
    NoWavelengths,
    #[error(transparent)]
    Demand(#[from] DemandError),
}

/// A row that fails under an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowViolation {
    pub row: String,
    pub tag: &'static str,
}

impl IlpModel {
    pub fn vars(&self) -> &[VarRef] {
        &self.vars
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(Coef, VarRef)] {
        &self.objective
    }

    pub fn var_index(&self, v: &VarRef) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn count_family(&self, family: &str) -> usize {
        self.vars.iter().filter(|v| v.family() == family).count()
    }

    pub fn count_rows(&self, tag: &str) -> usize {
        self.constraints.iter().filter(|c| c.tag == tag).count()
    }

    /// Rows violated by `a`, in model order.
    pub fn evaluate(&self, a: &Assignment) -> Vec<RowViolation> {
        let value = |v: &VarRef| i64::from(a.get(self, v).unwrap_or(0));
        self.constraints
            .iter()
            .filter(|c| !c.holds(value))
            .map(|c| RowViolation {
                row: c.name.clone(),
                tag: c.tag,
            })
            .collect()
    }

    pub fn objective_value(&self, a: &Assignment) -> i64 {
        let halves: i64 = self
            .objective
            .iter()
            .map(|(c, v)| c.halves * i64::from(a.get(self, v).unwrap_or(0)))
            .sum();
        halves / 2
    }

    fn new(meta: ModelMeta, t: &Topology, d: &DemandSet, vars: Vec<VarRef>) -> Self {
        let index = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Self {
            meta,
            vars,
            index,
            constraints: Vec::new(),
            objective: Vec::new(),
            demands: d.clone(),
            topology: t.clone(),
        }
    }
}

fn check_inputs(t: &Topology, d: &DemandSet, wavelengths: u32) -> Result<(), ModelError> {
    if wavelengths < 1 {
        return Err(ModelError::NoWavelengths);
    }
    d.validate_against(t)?;
    Ok(())
}

/// Variable families shared by both models: x, theta (and with aggregation
/// y, delta, f), then gamma and alpha.
fn declare(t: &Topology, d: &DemandSet, ws: &[u32], aggregation: bool) -> Vec<VarRef> {
    let mut vars = Vec::new();
    for dem in d.iter() {
        for link in t.links() {
            for &w in ws {
                vars.push(VarRef::X {
                    d: dem.id,
                    e: link.id,
                    w,
                });
            }
        }
    }
    for dem in d.iter() {
        for &w in ws {
            vars.push(VarRef::Theta { d: dem.id, w });
        }
    }
    if aggregation {
        for dem in d.iter() {
            for link in t.links() {
                for &w in ws {
                    for &v in t.nodes() {
                        vars.push(VarRef::Y {
                            d: dem.id,
                            e: link.id,
                            w,
                            v,
                        });
                    }
                }
            }
        }
        for dem in d.iter() {
            for &v in t.nodes() {
                vars.push(VarRef::Delta { d: dem.id, v });
            }
        }
        for a in d.iter() {
            for b in d.iter() {
                vars.push(VarRef::F { d1: a.id, d2: b.id });
            }
        }
    }
    for link in t.links() {
        for &w in ws {
            vars.push(VarRef::Gamma { e: link.id, w });
        }
    }
    for &w in ws {
        vars.push(VarRef::Alpha { w });
    }
    vars
}

/// c1 and c2: one wavelength per demand and per-wavelength flow
/// conservation.
fn routing_rows(t: &Topology, d: &DemandSet, ws: &[u32], out: &mut Vec<LinearConstraint>) {
    let mut row = RowBuilder::new();
    for dem in d.iter() {
        for &w in ws {
            row.add(Coef::ONE, VarRef::Theta { d: dem.id, w });
        }
        out.push(row.finish("c1", format!("c1_d{}", dem.id), Sense::Eq, 1));
    }
    for dem in d.iter() {
        for &w in ws {
            for &v in t.nodes() {
                for l in t.out_links(v) {
                    row.add(Coef::ONE, VarRef::X { d: dem.id, e: l.id, w });
                }
                for l in t.in_links(v) {
                    row.add(-Coef::ONE, VarRef::X { d: dem.id, e: l.id, w });
                }
                let theta = VarRef::Theta { d: dem.id, w };
                if v == dem.src {
                    row.add(-Coef::ONE, theta);
                } else if v == dem.dst {
                    row.add(Coef::ONE, theta);
                }
                out.push(row.finish("c2", format!("c2_d{}_w{w}_v{v}", dem.id), Sense::Eq, 0));
            }
        }
    }
}

/// c21 with big-M equal to the number of links, and the objective.
fn usage_rows(t: &Topology, ws: &[u32], m: &mut IlpModel) {
    let mut row = RowBuilder::new();
    let big_m = t.links().len() as i64;
    for &w in ws {
        for link in t.links() {
            row.add(Coef::ONE, VarRef::Gamma { e: link.id, w });
        }
        row.add(Coef::int(-big_m), VarRef::Alpha { w });
        m.constraints.push(row.finish("c21", format!("c21_w{w}"), Sense::Le, 0));
    }
    m.objective = ws.iter().map(|&w| (Coef::ONE, VarRef::Alpha { w })).collect();
}

/// The full aggregation-aware model.
pub fn build_rwaa_model(t: &Topology, d: &DemandSet, wavelengths: u32) -> Result<IlpModel, ModelError> {
    check_inputs(t, d, wavelengths)?;
    let ws: Vec<u32> = (1..=wavelengths).collect();
    let meta = ModelMeta {
        topology: t.name().to_string(),
        demands: d.len(),
        wavelengths,
        mode: Mode::Aggregation,
    };
    let mut m = IlpModel::new(meta, t, d, declare(t, d, &ws, true));
    let nodes = t.nodes();
    let rows = &mut m.constraints;
    routing_rows(t, d, &ws, rows);
    let mut row = RowBuilder::new();
    let f = |a: DemandId, b: DemandId| VarRef::F { d1: a, d2: b };

    // c4: an aggregated pair on a link counts as one channel.
    for link in t.links() {
        for &w in &ws {
            for dem in d.iter() {
                row.add(
                    Coef::ONE,
                    VarRef::X {
                        d: dem.id,
                        e: link.id,
                        w,
                    },
                );
            }
            for dem in d.iter() {
                for &v in nodes {
                    row.add(
                        -Coef::HALF,
                        VarRef::Y {
                            d: dem.id,
                            e: link.id,
                            w,
                            v,
                        },
                    );
                }
            }
            row.add(-Coef::ONE, VarRef::Gamma { e: link.id, w });
            rows.push(row.finish("c4", format!("c4_e{}_w{w}", link.id), Sense::Eq, 0));
        }
    }
    // c6: at most one aggregation node, never the destination.
    for dem in d.iter() {
        for &v in nodes {
            row.add(Coef::ONE, VarRef::Delta { d: dem.id, v });
        }
        rows.push(row.finish("c6", format!("c6_d{}", dem.id), Sense::Le, 1));
        row.add(Coef::ONE, VarRef::Delta { d: dem.id, v: dem.dst });
        rows.push(row.finish("c6", format!("c6_d{}_v{}", dem.id, dem.dst), Sense::Eq, 0));
    }
    // c7: at most one partner.
    for a in d.iter() {
        for b in d.iter() {
            row.add(Coef::ONE, f(a.id, b.id));
        }
        rows.push(row.finish("c7", format!("c7_d{}", a.id), Sense::Le, 1));
    }
    // c8: no self-pairing, partners share the destination.
    for a in d.iter() {
        row.add(Coef::ONE, f(a.id, a.id));
        for b in d.iter().filter(|b| b.dst != a.dst) {
            row.add(Coef::ONE, f(a.id, b.id));
        }
        rows.push(row.finish("c8", format!("c8_d{}", a.id), Sense::Eq, 0));
    }
    // c9: symmetric pairing, one row per unordered pair.
    for a in d.iter() {
        for b in d.iter().filter(|b| b.id > a.id) {
            row.add(Coef::ONE, f(a.id, b.id)).add(-Coef::ONE, f(b.id, a.id));
            rows.push(row.finish("c9", format!("c9_d{}_d{}", a.id, b.id), Sense::Eq, 0));
        }
    }
    // c10: paired iff an aggregation node is chosen.
    for a in d.iter() {
        for b in d.iter() {
            row.add(Coef::ONE, f(a.id, b.id));
        }
        for &v in nodes {
            row.add(-Coef::ONE, VarRef::Delta { d: a.id, v });
        }
        rows.push(row.finish("c10", format!("c10_d{}", a.id), Sense::Eq, 0));
    }
    // c11: merged routing only for paired demands.
    for a in d.iter() {
        for link in t.links() {
            for &w in &ws {
                for &v in nodes {
                    row.add(
                        Coef::ONE,
                        VarRef::Y {
                            d: a.id,
                            e: link.id,
                            w,
                            v,
                        },
                    );
                }
            }
            for b in d.iter() {
                row.add(-Coef::ONE, f(a.id, b.id));
            }
            rows.push(row.finish("c11", format!("c11_d{}_e{}", a.id, link.id), Sense::Le, 0));
        }
    }
    // c12: merged routing only from the chosen aggregation node.
    for dem in d.iter() {
        for link in t.links() {
            for &v in nodes {
                for &w in &ws {
                    row.add(
                        Coef::ONE,
                        VarRef::Y {
                            d: dem.id,
                            e: link.id,
                            w,
                            v,
                        },
                    );
                }
                row.add(-Coef::ONE, VarRef::Delta { d: dem.id, v });
                rows.push(row.finish("c12", format!("c12_d{}_e{}_v{v}", dem.id, link.id), Sense::Le, 0));
            }
        }
    }
    // c15, c16: partners share the wavelength (single shared index).
    for (tag, flip) in [("c15", false), ("c16", true)] {
        for a in d.iter() {
            for b in d.iter().filter(|b| b.id != a.id) {
                for &w in &ws {
                    let (plus, minus) = if flip { (b.id, a.id) } else { (a.id, b.id) };
                    row.add(Coef::ONE, VarRef::Theta { d: plus, w })
                        .add(-Coef::ONE, VarRef::Theta { d: minus, w })
                        .add(Coef::ONE, f(a.id, b.id));
                    rows.push(row.finish(tag, format!("{tag}_d{}_d{}_w{w}", a.id, b.id), Sense::Le, 1));
                }
            }
        }
    }
    // c17, c18: partners share the aggregation node.
    for (tag, flip) in [("c17", false), ("c18", true)] {
        for a in d.iter() {
            for b in d.iter().filter(|b| b.id != a.id) {
                for &v in nodes {
                    let (plus, minus) = if flip { (b.id, a.id) } else { (a.id, b.id) };
                    row.add(Coef::ONE, VarRef::Delta { d: plus, v })
                        .add(-Coef::ONE, VarRef::Delta { d: minus, v })
                        .add(Coef::ONE, f(a.id, b.id));
                    rows.push(row.finish(tag, format!("{tag}_d{}_d{}_v{v}", a.id, b.id), Sense::Le, 1));
                }
            }
        }
    }
    // c19: the merged route follows the demand's own route.
    for dem in d.iter() {
        for link in t.links() {
            for &w in &ws {
                for &v in nodes {
                    row.add(
                        Coef::ONE,
                        VarRef::Y {
                            d: dem.id,
                            e: link.id,
                            w,
                            v,
                        },
                    )
                    .add(
                        -Coef::ONE,
                        VarRef::X {
                            d: dem.id,
                            e: link.id,
                            w,
                        },
                    );
                    rows.push(row.finish("c19", format!("c19_d{}_e{}_w{w}_v{v}", dem.id, link.id), Sense::Le, 0));
                }
            }
        }
    }
    // c20: merged flow runs from the aggregation node to the destination.
    for dem in d.iter() {
        for &v in nodes {
            for &i in nodes {
                for &w in &ws {
                    for l in t.out_links(i) {
                        row.add(
                            Coef::ONE,
                            VarRef::Y {
                                d: dem.id,
                                e: l.id,
                                w,
                                v,
                            },
                        );
                    }
                    for l in t.in_links(i) {
                        row.add(
                            -Coef::ONE,
                            VarRef::Y {
                                d: dem.id,
                                e: l.id,
                                w,
                                v,
                            },
                        );
                    }
                }
                let delta = VarRef::Delta { d: dem.id, v };
                if i == v {
                    row.add(-Coef::ONE, delta);
                }
                if i == dem.dst {
                    row.add(Coef::ONE, delta);
                }
                rows.push(row.finish("c20", format!("c20_d{}_v{v}_i{i}", dem.id), Sense::Eq, 0));
            }
        }
    }
    usage_rows(t, &ws, &mut m);
    Ok(m)
}

/// Classical minimum-wavelength RWA: the aggregation model with every y,
/// delta and f fixed to zero, so those columns and the rows that only bind
/// them disappear.
pub fn build_bypass_model(t: &Topology, d: &DemandSet, wavelengths: u32) -> Result<IlpModel, ModelError> {
    check_inputs(t, d, wavelengths)?;
    let ws: Vec<u32> = (1..=wavelengths).collect();
    let meta = ModelMeta {
        topology: t.name().to_string(),
        demands: d.len(),
        wavelengths,
        mode: Mode::Bypass,
    };
    let mut m = IlpModel::new(meta, t, d, declare(t, d, &ws, false));
    routing_rows(t, d, &ws, &mut m.constraints);
    let mut row = RowBuilder::new();
    for link in t.links() {
        for &w in &ws {
            for dem in d.iter() {
                row.add(
                    Coef::ONE,
                    VarRef::X {
                        d: dem.id,
                        e: link.id,
                        w,
                    },
                );
            }
            row.add(-Coef::ONE, VarRef::Gamma { e: link.id, w });
            m.constraints
                .push(row.finish("c4", format!("c4_e{}_w{w}", link.id), Sense::Eq, 0));
        }
    }
    usage_rows(t, &ws, &mut m);
    Ok(m)
}

/// Builds the model matching `mode`.
pub fn build_model(t: &Topology, d: &DemandSet, mode: Mode, wavelengths: u32) -> Result<IlpModel, ModelError> {
    match mode {
        Mode::Bypass => build_bypass_model(t, d, wavelengths),
        Mode::Aggregation => build_rwaa_model(t, d, wavelengths),
    }
}
