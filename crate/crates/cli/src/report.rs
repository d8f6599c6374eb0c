// SPDX-License-Identifier: Apache-2.0

//! Renderings of solved instances: aligned text tables, CSV and the
//! self-contained solution record.

use std::fmt::Write as _;
use std::time::Duration;

use rwaa_core::record::{RecordMeta, SolutionRecord};
use rwaa_core::{NodeId, Solution};

/// One solved instance as shown to the user. Every table cell is read
/// off the embedded [`SolutionRecord`].
pub struct RunReport {
    pub record: SolutionRecord,
    pub elapsed: Duration,
}

fn pad_table(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c + 1 == r.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
}

fn hop_limit_text(h: Option<usize>) -> String {
    h.map_or_else(|| "none".to_string(), |h| h.to_string())
}

fn destination_text(d: Option<NodeId>) -> String {
    d.map_or_else(|| "-".to_string(), |d| d.to_string())
}

/// `(a->b)` labels for the demand of each lightpath.
fn demand_label(s: &Solution, lp: usize) -> String {
    let path = &s.lightpaths[lp].path;
    match (path.source(), path.target()) {
        (Some(a), Some(b)) => format!("{}: ({a}->{b})", s.lightpaths[lp].demand),
        _ => s.lightpaths[lp].demand.to_string(),
    }
}

impl RunReport {
    fn meta(&self) -> &RecordMeta {
        &self.record.meta
    }

    fn solution(&self) -> &Solution {
        &self.record.solution
    }

    pub fn to_text(&self) -> String {
        let m = self.meta();
        let s = self.solution();
        let mut out = String::new();
        let head = vec![
            vec!["topology".into(), m.topology.clone()],
            vec!["destination".into(), destination_text(m.destination)],
            vec!["demands".into(), m.demands.to_string()],
            vec!["wavelengths".into(), format!("{} available", m.max_wavelengths)],
            vec!["mode".into(), m.mode.to_string()],
            vec!["hop limit".into(), hop_limit_text(m.hop_limit)],
            vec!["objective".into(), format!("{} wavelength(s)", s.objective)],
            vec!["time".into(), format!("{:.3?}", self.elapsed)],
        ];
        pad_table(&mut out, &head);

        out.push('\n');
        let mut routes = vec![vec!["demand".to_string(), "route".into(), "wavelength".into()]];
        for (i, lp) in s.lightpaths.iter().enumerate() {
            routes.push(vec![
                demand_label(s, i),
                lp.path.to_string(),
                format!("w{}", lp.wavelength),
            ]);
        }
        pad_table(&mut out, &routes);

        if !s.pairings.is_empty() {
            out.push('\n');
            let mut pairs = vec![vec![
                "pair".to_string(),
                "aggregation node".into(),
                "shared route".into(),
                "wavelength".into(),
            ]];
            for p in &s.pairings {
                let w = s
                    .lightpath(p.d1)
                    .map_or_else(|| "?".to_string(), |l| format!("w{}", l.wavelength));
                pairs.push(vec![
                    format!("{} + {}", p.d1, p.d2),
                    p.agg_node.to_string(),
                    p.shared_suffix.to_string(),
                    w,
                ]);
            }
            pad_table(&mut out, &pairs);
        }
        out
    }

    pub const CSV_HEADER: &'static str =
        "topology,destination,mode,objective,demand,source,target,route,wavelength,partner,aggregation_node";

    /// One row per demand, instance columns repeated so each row stands alone.
    pub fn to_csv(&self) -> String {
        let m = self.meta();
        let s = self.solution();
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for lp in &s.lightpaths {
            let (partner, node) = match s.pairing_of(lp.demand) {
                Some(p) => {
                    let other = if p.d1 == lp.demand { p.d2 } else { p.d1 };
                    (other.to_string(), p.agg_node.to_string())
                }
                None => (String::new(), String::new()),
            };
            let show = |n: Option<NodeId>| n.map_or(String::new(), |n| n.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                m.topology,
                destination_text(m.destination),
                m.mode,
                s.objective,
                lp.demand,
                show(lp.path.source()),
                show(lp.path.target()),
                lp.path,
                lp.wavelength,
                partner,
                node
            );
        }
        out
    }
}

/// One destination of a bypass versus aggregation comparison.
pub struct ComparisonRow {
    pub destination: NodeId,
    pub degree: usize,
    pub bypass: usize,
    pub aggregation: usize,
}

pub fn comparison_text(rows: &[ComparisonRow]) -> String {
    let mut table = vec![vec![
        "destination".to_string(),
        "degree".into(),
        "bypass".into(),
        "aggregation".into(),
    ]];
    for r in rows {
        table.push(vec![
            r.destination.to_string(),
            r.degree.to_string(),
            r.bypass.to_string(),
            r.aggregation.to_string(),
        ]);
    }
    let mut out = String::new();
    pad_table(&mut out, &table);
    out
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("destination,degree,bypass,aggregation\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.destination, r.degree, r.bypass, r.aggregation);
    }
    out
}
