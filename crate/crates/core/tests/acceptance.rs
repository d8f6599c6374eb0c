// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit
//! when a gating criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwaa_core::engine::SolveOutcome;
use rwaa_core::ilpcore::{
    build_model, encode_solution, export_lp, ignored_route_columns, parse_solution, unrealised_pairings, Assignment,
};
use rwaa_core::oracle::{brute_force_optimum, check, BRUTE_MAX_DEMANDS, BRUTE_MAX_NODES, BRUTE_MAX_WAVELENGTHS};
use rwaa_core::{all_to_one, datasets, lower_bound, solve, solve_with, Mode, NodeId, SolveOptions, Topology};

const SEED: u64 = 0x5eed_2023;
const ORACLE_INSTANCES: usize = 120;
const SOUNDNESS_INSTANCES: usize = 500;
const FIDELITY_ASSIGNMENTS: usize = 1000;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

/// Both modes on every COST239 destination, grouped by degree.
struct Cost239Run {
    by_degree: BTreeMap<usize, Vec<(NodeId, SolveOutcome, SolveOutcome, Duration)>>,
}

fn run_cost239(t: &Topology) -> Cost239Run {
    let mut by_degree: BTreeMap<usize, Vec<_>> = BTreeMap::new();
    for &v in t.nodes() {
        let d = all_to_one(t, v).unwrap();
        let opts = SolveOptions::default();
        let start = Instant::now();
        let bypass = solve_with(t, &d, Mode::Bypass, &opts).unwrap();
        let agg = solve_with(t, &d, Mode::Aggregation, &opts).unwrap();
        let elapsed = start.elapsed();
        by_degree
            .entry(t.degree(v).unwrap())
            .or_default()
            .push((v, bypass, agg, elapsed));
    }
    Cost239Run { by_degree }
}

fn criterion_1(run: &Cost239Run) -> Verdict {
    let expected = [(4, 3, 2), (5, 2, 1), (6, 2, 1)];
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut total = 0;
    for (deg, by, ag) in expected {
        let Some(rows) = run.by_degree.get(&deg) else {
            bad.push(format!("no destination of degree {deg}"));
            continue;
        };
        for (v, b, a, el) in rows {
            total += 1;
            slowest = slowest.max(*el);
            if (b.solution.objective, a.solution.objective) != (by, ag) {
                bad.push(format!(
                    "dest {v} (degree {deg}): got {}/{}, want {by}/{ag}",
                    b.solution.objective, a.solution.objective
                ));
            }
            if *el > Duration::from_secs(60) {
                bad.push(format!("dest {v} took {el:?}"));
            }
        }
    }
    if bad.is_empty() {
        Verdict::Pass(format!(
            "{total} destinations, degree 4/5/6 -> bypass 3/2/2, aggregation 2/1/1; slowest {slowest:.2?}"
        ))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn criterion_2() -> Verdict {
    let t = datasets::fig2toy();
    let d = rwaa_core::load_demands(datasets::FIG2_DEMANDS).unwrap();
    let start = Instant::now();
    let b = solve(&t, &d, Mode::Bypass, 8, None).unwrap();
    let a = solve(&t, &d, Mode::Aggregation, 8, None).unwrap();
    let el = start.elapsed();
    let x = NodeId(3);
    let paired_at_x = a.pairings.len() == 1 && a.pairings[0].agg_node == x;
    if b.objective == 2 && a.objective == 1 && paired_at_x && el < Duration::from_secs(1) {
        Verdict::Pass(format!(
            "bypass 2, aggregation 1 with one pairing at node {x}; {el:.2?}"
        ))
    } else {
        Verdict::Fail(format!(
            "bypass {}, aggregation {}, pairings {:?}, {el:?}",
            b.objective,
            a.objective,
            a.pairings.iter().map(|p| p.agg_node).collect::<Vec<_>>()
        ))
    }
}

/// Shared facts gathered while running criteria 3 and 4.
#[derive(Default)]
struct PropertyRun {
    oracle_checked: usize,
    oracle_mismatch: Vec<String>,
    bound_violations: Vec<String>,
    sound_checked: usize,
    unsound: Vec<String>,
    dominance_checked: usize,
    dominance_violations: Vec<String>,
}

fn run_properties() -> PropertyRun {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = PropertyRun::default();
    let max_w = BRUTE_MAX_WAVELENGTHS;
    // Oracle instances also count towards soundness and dominance.
    for i in 0..SOUNDNESS_INSTANCES {
        let oracle_sized = i < ORACLE_INSTANCES;
        let (t, d) = if oracle_sized {
            common::random_instance(&mut rng, BRUTE_MAX_NODES as u32, BRUTE_MAX_DEMANDS)
        } else {
            common::random_instance(&mut rng, 8, 6)
        };
        let cap = if oracle_sized { max_w } else { 8 };
        let mut objectives = Vec::new();
        for mode in [Mode::Bypass, Mode::Aggregation] {
            let got = solve(&t, &d, mode, cap, None);
            let engine = got.as_ref().ok().map(|s| s.objective);
            if let Ok(s) = &got {
                out.sound_checked += 1;
                let report = check(&t, &d, s);
                if !report.passed() {
                    out.unsound.push(format!("instance {i} {mode}: {report}"));
                }
            }
            if oracle_sized {
                out.oracle_checked += 1;
                let brute = brute_force_optimum(&t, &d, mode, max_w).unwrap();
                if brute != engine {
                    out.oracle_mismatch
                        .push(format!("instance {i} {mode}: engine {engine:?}, brute {brute:?}"));
                }
                let lb = lower_bound(&t, &d, mode);
                if let Some(opt) = brute {
                    if lb > opt {
                        out.bound_violations
                            .push(format!("instance {i} {mode}: bound {lb} > {opt}"));
                    }
                }
            }
            objectives.push(engine);
        }
        if let [Some(b), Some(a)] = objectives[..] {
            out.dominance_checked += 1;
            if a > b {
                out.dominance_violations
                    .push(format!("instance {i}: aggregation {a} > bypass {b}"));
            }
        }
    }
    out
}

fn criterion_3(p: &PropertyRun) -> Verdict {
    if p.oracle_mismatch.is_empty() {
        Verdict::Pass(format!(
            "{} instances x 2 modes ({} solves) agree with brute force",
            ORACLE_INSTANCES, p.oracle_checked
        ))
    } else {
        Verdict::Fail(p.oracle_mismatch.join("; "))
    }
}

fn criterion_4(p: &PropertyRun) -> Verdict {
    if p.unsound.is_empty() && p.sound_checked >= SOUNDNESS_INSTANCES {
        Verdict::Pass(format!(
            "{SOUNDNESS_INSTANCES} instances, {} solutions with zero violations",
            p.sound_checked
        ))
    } else {
        Verdict::Fail(format!("{} checked; {}", p.sound_checked, p.unsound.join("; ")))
    }
}

fn criterion_5(p: &PropertyRun) -> Verdict {
    if p.dominance_violations.is_empty() {
        Verdict::Pass(format!("aggregation <= bypass on {} instances", p.dominance_checked))
    } else {
        Verdict::Fail(p.dominance_violations.join("; "))
    }
}

fn criterion_6(p: &PropertyRun, run: &Cost239Run) -> Verdict {
    let mut bad = p.bound_violations.clone();
    let mut tight = 0;
    for rows in run.by_degree.values() {
        for (v, b, a, _) in rows {
            for o in [b, a] {
                tight += 1;
                if o.lower_bound != o.solution.objective {
                    bad.push(format!(
                        "COST239 dest {v} {}: bound {} vs optimum {}",
                        o.solution.mode, o.lower_bound, o.solution.objective
                    ));
                }
            }
        }
    }
    if bad.is_empty() {
        Verdict::Pass(format!(
            "bound <= optimum on {} oracle solves; bound tight on all {tight} COST239 solves",
            p.oracle_checked
        ))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let w = BRUTE_MAX_WAVELENGTHS;
    let (mut feasible, mut infeasible) = (0, 0);
    let mut disagreements = Vec::new();
    for i in 0..FIDELITY_ASSIGNMENTS {
        let (t, d) = common::random_instance(&mut rng, 5, 4);
        let mode = if rng.gen_bool(0.5) {
            Mode::Aggregation
        } else {
            Mode::Bypass
        };
        let model = build_model(&t, &d, mode, w).unwrap();
        let candidate = match rng.gen_range(0..4) {
            0 => match solve(&t, &d, mode, w, None) {
                Ok(s) => s,
                Err(_) => common::random_candidate(&mut rng, &t, &d, mode, w),
            },
            1 => {
                let s = common::random_candidate(&mut rng, &t, &d, mode, w);
                common::near_miss(&mut rng, s)
            }
            _ => common::random_candidate(&mut rng, &t, &d, mode, w),
        };
        let ilp_ok = match encode_solution(&model, &candidate) {
            Ok(a) => {
                let ok = model.evaluate(&a).is_empty();
                if ok && parse_solution(&model, &a).is_err() {
                    disagreements.push(format!("assignment {i}: feasible but not decodable"));
                }
                ok
            }
            Err(_) => false,
        };
        let oracle_ok = check(&t, &d, &candidate).passed();
        if ilp_ok {
            feasible += 1
        } else {
            infeasible += 1
        }
        if ilp_ok != oracle_ok {
            disagreements.push(format!("assignment {i}: ilp {ilp_ok}, oracle {oracle_ok}"));
        }
    }
    if disagreements.is_empty() && feasible > 0 && infeasible > 0 {
        Verdict::Pass(format!(
            "{FIDELITY_ASSIGNMENTS} assignments ({feasible} feasible, {infeasible} infeasible), full agreement"
        ))
    } else {
        Verdict::Fail(format!(
            "{feasible} feasible, {infeasible} infeasible; {}",
            disagreements.join("; ")
        ))
    }
}

const HIGHS_SCRIPT: &str = r#"
import sys, highspy
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.setOptionValue("time_limit", float(sys.argv[3]))
h.readModel(sys.argv[1])
h.run()
if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
    sys.exit(3)
lp = h.getLp()
vals = h.getSolution().col_value
with open(sys.argv[2], "w") as f:
    for name, v in zip(lp.col_names_, vals):
        f.write(f"{name} {v}\n")
"#;

/// Solves the exported models for one destination per degree class with
/// HiGHS and checks the imported assignments. The model gets exactly as many
/// wavelength columns as the engine's optimum, which still lets the solver
/// find any cheaper design.
fn criterion_8(run: &Cost239Run) -> Verdict {
    if std::env::var_os("RWAA_EXTERNAL_MILP").is_none() {
        return Verdict::Skip("set RWAA_EXTERNAL_MILP=1 to run HiGHS on the exported models".into());
    }
    let probe = Command::new("python3").args(["-c", "import highspy"]).output();
    if !matches!(probe, Ok(ref o) if o.status.success()) {
        return Verdict::Skip("python3 with highspy not available".into());
    }
    let t = datasets::cost239();
    let dir = std::env::temp_dir().join(format!("rwaa-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let script = dir.join("solve.py");
    std::fs::write(&script, HIGHS_SCRIPT).unwrap();
    let mut lines = Vec::new();
    let mut failed = false;
    for (deg, rows) in &run.by_degree {
        let (v, b, a, _) = &rows[0];
        let d = all_to_one(&t, *v).unwrap();
        for want in [b, a] {
            let mode = want.solution.mode;
            let model = build_model(&t, &d, mode, want.solution.objective as u32).unwrap();
            let lp_path = dir.join(format!("d{v}_{mode}.lp"));
            let sol_path = dir.join(format!("d{v}_{mode}.sol"));
            std::fs::write(&lp_path, export_lp(&model)).unwrap();
            let start = Instant::now();
            let status = Command::new("python3")
                .arg(&script)
                .arg(&lp_path)
                .arg(&sol_path)
                .arg("600")
                .status();
            let el = start.elapsed();
            let verdict = match status {
                Ok(s) if s.success() => {
                    let text = std::fs::read_to_string(&sol_path).unwrap();
                    let decoded = Assignment::parse(&model, &text)
                        .map_err(|e| e.to_string())
                        .and_then(|asg| {
                            let obj = model.objective_value(&asg) as usize;
                            let s = parse_solution(&model, &asg).map_err(|e| e.to_string())?;
                            let notes = (
                                ignored_route_columns(&model, &asg, &s),
                                unrealised_pairings(&model, &asg, &s),
                            );
                            Ok((obj, notes, s))
                        });
                    match decoded {
                        Ok((obj, (stray, unrealised), s))
                            if obj == want.solution.objective && s.objective == obj && check(&t, &d, &s).passed() =>
                        {
                            format!("dest {v} (degree {deg}) {mode}: {obj} in {el:.1?}, {stray} loop column(s) ignored, {unrealised} pairing(s) unrealised")
                        }
                        Ok((obj, (_, unrealised), s)) => {
                            failed = true;
                            let report = check(&t, &d, &s);
                            let rules: BTreeSet<&str> = report.violations().iter().map(|x| x.rule.as_str()).collect();
                            format!(
                                "dest {v} (degree {deg}) {mode}: objective external {obj} engine {} decoded {}, \
                                 verify fails with {} violation(s) {rules:?}, {unrealised} pairing(s) unrealised",
                                want.solution.objective,
                                s.objective,
                                report.violations().len(),
                            )
                        }
                        Err(e) => {
                            failed = true;
                            format!("dest {v} {mode}: {e}")
                        }
                    }
                }
                _ => {
                    failed = true;
                    format!("dest {v} {mode}: solver did not finish in {el:.1?}")
                }
            };
            lines.push(verdict);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    if failed {
        Verdict::Fail(lines.join("; "))
    } else {
        Verdict::Pass(lines.join("; "))
    }
}

fn main() -> ExitCode {
    let t = datasets::cost239();
    let cost = run_cost239(&t);
    let props = run_properties();
    let results: Vec<(u8, &str, bool, Verdict)> = vec![
        (1, "COST239 all-to-one wavelength counts", true, criterion_1(&cost)),
        (2, "two-demand toy scenario", true, criterion_2()),
        (3, "engine equals brute force", true, criterion_3(&props)),
        (4, "solutions pass the checker", true, criterion_4(&props)),
        (5, "aggregation never worse than bypass", true, criterion_5(&props)),
        (6, "lower bound validity", true, criterion_6(&props, &cost)),
        (7, "model rows agree with the checker", true, criterion_7()),
        (8, "external MILP cross-check", false, criterion_8(&cost)),
    ];
    let mut gating_failed = false;
    for (n, title, gating, verdict) in &results {
        let (tag, detail) = match verdict {
            Verdict::Pass(s) => ("PASS", s),
            Verdict::Fail(s) => {
                gating_failed |= *gating;
                ("FAIL", s)
            }
            Verdict::Skip(s) => ("SKIP", s),
        };
        let note = if *gating { "" } else { " (optional)" };
        println!("{tag} criterion {n}{note}: {title} -- {detail}");
    }
    if gating_failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
