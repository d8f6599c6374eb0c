// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use super::{Coef, IlpModel, VarRef};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[(Coef, VarRef)], fallback: &VarRef) {
    if terms.is_empty() {
        // LP readers need at least one term per row.
        let _ = write!(out, " 0 {fallback}");
        return;
    }
    for (i, (c, v)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.halves() < 0 {
            "-"
        } else if i == 0 {
            ""
        } else {
            "+"
        };
        let mag = c.abs();
        let sep = if sign.is_empty() { "" } else { " " };
        if mag == Coef::ONE {
            let _ = write!(out, " {sign}{sep}{v}");
        } else {
            let _ = write!(out, " {sign}{sep}{mag} {v}");
        }
    }
}

/// Writes the model in LP-file format (`Minimize`, `Subject To`, `Binary`,
/// `End`). Output is a pure function of the model.
pub fn export_lp(m: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ rwaa {} model: topology {}, {} demands, {} wavelengths",
        m.meta.mode, m.meta.topology, m.meta.demands, m.meta.wavelengths
    );
    let _ = writeln!(
        out,
        "\\ {} variables, {} constraints",
        m.vars().len(),
        m.constraints().len()
    );
    let fallback = VarRef::Alpha { w: 1 };
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, m.objective(), &fallback);
    out.push_str("\nSubject To\n");
    for c in m.constraints() {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, &c.terms, &fallback);
        let _ = writeln!(out, " {} {}", c.sense, c.rhs);
    }
    out.push_str("Binary\n");
    for chunk in m.vars().chunks(TERMS_PER_LINE) {
        out.push(' ');
        let names: Vec<String> = chunk.iter().map(ToString::to_string).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}
