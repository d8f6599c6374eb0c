// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use rwaa_core::engine::SolveOutcome;
use rwaa_core::ilpcore::{
    build_model, export_lp as render_lp, ignored_route_columns, parse_solution, unrealised_pairings, Assignment,
    ModelError,
};
use rwaa_core::oracle::check;
use rwaa_core::record::{RecordMeta, SolutionRecord, RECORD_VERSION};
use rwaa_core::{
    all_to_one, load_demands, load_topology, solve_with, DemandSet, Mode, NodeId, SolveError, SolveOptions, Topology,
};

use crate::exit::{self, Failure};
use crate::report::{comparison_csv, comparison_text, ComparisonRow, RunReport};
use crate::{CompareArgs, ExportArgs, Format, SearchArgs, SolveArgs, Traffic, VerifyArgs};

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::unreadable(path, e))
}

fn topology(path: &Path) -> Result<Topology, Failure> {
    load_topology(&read(path)?).map_err(|e| Failure::data(path, e))
}

fn traffic(t: &Topology, traffic: &Traffic) -> Result<(DemandSet, Option<NodeId>), Failure> {
    match (&traffic.demands, traffic.all_to_one) {
        (Some(path), _) => {
            let d = load_demands(&read(path)?).map_err(|e| Failure::data(path, e))?;
            d.validate_against(t).map_err(|e| Failure::data(path, e))?;
            Ok((d, None))
        }
        (None, Some(v)) => destination(t, v),
        (None, None) => Err(Failure::usage("one of --demands or --all-to-one is required")),
    }
}

fn destination(t: &Topology, v: u32) -> Result<(DemandSet, Option<NodeId>), Failure> {
    let v = NodeId(v);
    let d = all_to_one(t, v).map_err(|_| Failure::usage(format!("node {v} is not in topology {}", t.name())))?;
    Ok((d, Some(v)))
}

/// Writes `text` to `out`, or standard output when absent.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::uncreatable(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn solve_failure(e: SolveError) -> Failure {
    let code = match e {
        SolveError::Infeasible { .. } | SolveError::NoRoute(_) => exit::INFEASIBLE,
        SolveError::NoWavelengths | SolveError::HopLimitRequired(_) => exit::USAGE,
        SolveError::UnsupportedRate(..) | SolveError::Demand(_) => exit::DATA,
    };
    Failure::new(code, e.to_string())
}

fn run(
    t: &Topology,
    d: &DemandSet,
    destination: Option<NodeId>,
    mode: Mode,
    search: &SearchArgs,
) -> Result<(RunReport, SolveOutcome), Failure> {
    let opts = SolveOptions {
        max_wavelengths: search.max_wavelengths,
        hop_limit: search.hop_limit,
        jobs: search.jobs.max(1),
        deterministic: search.deterministic,
    };
    let start = Instant::now();
    let outcome = solve_with(t, d, mode, &opts).map_err(solve_failure)?;
    let report = RunReport {
        record: SolutionRecord {
            meta: RecordMeta {
                topology: t.name().to_string(),
                destination,
                demands: d.len(),
                max_wavelengths: search.max_wavelengths,
                mode,
                hop_limit: outcome.hop_limit,
            },
            solution: outcome.solution.clone(),
        },
        elapsed: start.elapsed(),
    };
    Ok((report, outcome))
}

pub fn solve(a: SolveArgs) -> Result<u8, Failure> {
    let t = topology(&a.instance.topology)?;
    let (d, dest) = traffic(&t, &a.instance.traffic)?;
    let (report, _) = run(&t, &d, dest, a.mode.into(), &a.search)?;
    let text = match a.output.format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Record => report.record.to_text(),
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(exit::OK)
}

pub fn compare(a: CompareArgs) -> Result<u8, Failure> {
    let t = topology(&a.topology)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &v in &a.destinations {
        let (d, dest) = destination(&t, v)?;
        let (bypass, _) = run(&t, &d, dest, Mode::Bypass, &a.search)?;
        let (agg, _) = run(&t, &d, dest, Mode::Aggregation, &a.search)?;
        let node = NodeId(v);
        rows.push(ComparisonRow {
            destination: node,
            degree: t.degree(node).expect("node checked above"),
            bypass: bypass.record.solution.objective,
            aggregation: agg.record.solution.objective,
        });
        records.push((node, [bypass, agg]));
    }
    rows.sort_by_key(|r| (r.degree, r.destination));
    let text = match a.output.format {
        Format::Text => comparison_text(&rows),
        Format::Csv => comparison_csv(&rows),
        Format::Record => rows
            .iter()
            .flat_map(|r| {
                let (_, pair) = records.iter().find(|(n, _)| *n == r.destination).unwrap();
                pair.iter().map(|rep| rep.record.to_text())
            })
            .collect(),
    };
    emit(a.output.out.as_deref(), &text)?;
    Ok(exit::OK)
}

/// Family names in first-appearance order with their sizes.
fn tally<'a>(names: impl Iterator<Item = &'a str>) -> Vec<(&'a str, usize)> {
    let mut out: Vec<(&str, usize)> = Vec::new();
    for n in names {
        match out.iter_mut().find(|(k, _)| *k == n) {
            Some((_, c)) => *c += 1,
            None => out.push((n, 1)),
        }
    }
    out
}

fn model_failure(path: &Path, e: ModelError) -> Failure {
    match e {
        ModelError::NoWavelengths => Failure::usage(e),
        ModelError::Demand(_) => Failure::data(path, e),
    }
}

pub fn export_lp(a: ExportArgs) -> Result<u8, Failure> {
    let t = topology(&a.instance.topology)?;
    let (d, _) = traffic(&t, &a.instance.traffic)?;
    let model =
        build_model(&t, &d, a.mode.into(), a.max_wavelengths).map_err(|e| model_failure(&a.instance.topology, e))?;
    emit(a.out.as_deref(), &render_lp(&model))?;

    let mut summary = String::new();
    if let Some(path) = &a.out {
        summary.push_str(&format!("wrote {}\n", path.display()));
    }
    summary.push_str(&format!("variables {}\n", model.vars().len()));
    for family in ["x", "theta", "y", "delta", "f", "gamma", "alpha"] {
        summary.push_str(&format!("  {family:<6} {}\n", model.count_family(family)));
    }
    summary.push_str(&format!("constraints {}\n", model.constraints().len()));
    for (tag, n) in tally(model.constraints().iter().map(|c| c.tag)) {
        summary.push_str(&format!("  {tag:<6} {n}\n"));
    }
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(exit::OK)
}

pub fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    let t = topology(&a.instance.topology)?;
    let (d, _) = traffic(&t, &a.instance.traffic)?;
    let path = &a.solution;
    let text = read(path)?;
    let is_record = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with(RECORD_VERSION.split('/').next().unwrap()));

    let mut notes = Vec::new();
    let (solution, kind) = if is_record {
        let rec = SolutionRecord::parse(&t, &text).map_err(|e| Failure::data(path, e))?;
        (rec.solution, "record")
    } else {
        let model = build_model(&t, &d, a.mode.into(), a.max_wavelengths).map_err(|e| model_failure(path, e))?;
        let asg = Assignment::parse(&model, &text).map_err(|e| Failure::data(path, e))?;
        let violated = model.evaluate(&asg);
        if !violated.is_empty() {
            println!("solution     {} (assignment)", path.display());
            println!("FAIL: {} model row(s) violated", violated.len());
            for v in violated.iter().take(20) {
                println!("  [{}] {}", v.tag, v.row);
            }
            if violated.len() > 20 {
                println!("  ... {} more", violated.len() - 20);
            }
            return Ok(exit::VERIFY_FAILED);
        }
        match parse_solution(&model, &asg) {
            Ok(s) => {
                let stray = ignored_route_columns(&model, &asg, &s);
                if stray > 0 {
                    notes.push(format!(
                        "ignored      {stray} route column(s) on closed loops off the routes"
                    ));
                }
                let unrealised = unrealised_pairings(&model, &asg, &s);
                if unrealised > 0 {
                    notes.push(format!(
                        "unrealised   {unrealised} pairing(s) whose partners share no merged route"
                    ));
                }
                notes.push(format!("model value  {}", model.objective_value(&asg)));
                (s, "assignment")
            }
            Err(e) => {
                println!("solution     {} (assignment)", path.display());
                println!("FAIL: {e}");
                return Ok(exit::VERIFY_FAILED);
            }
        }
    };
    let report = check(&t, &d, &solution);
    println!("solution     {} ({kind})", path.display());
    println!("mode         {}", solution.mode);
    println!("objective    {}", solution.objective);
    for n in notes {
        println!("{n}");
    }
    print!("{report}");
    Ok(if report.passed() { exit::OK } else { exit::VERIFY_FAILED })
}
