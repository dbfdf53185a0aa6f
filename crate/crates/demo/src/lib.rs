//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export takes and returns plain strings so the page needs no glue
//! beyond the generated module.

use std::fmt::Write;

use wasm_bindgen::prelude::*;

use setbranch::clustering::xmeans;
use setbranch::generators::GenSpec;
use setbranch::instance_io::{parse_instance, serialize_instance};
use setbranch::search::solve_traced;
use setbranch::{Limits, Scheme, SchemeKind, SolveConfig, Status};

/// Traces longer than this are cut in the page.
const TRACE_LINES: usize = 200;

/// Instance text for a spec line such as `qwh order=6 holes=18 seed=1`.
#[wasm_bindgen]
pub fn generate(spec: &str) -> Result<String, JsError> {
    generate_text(spec).map_err(|e| JsError::new(&e))
}

/// Solves `instance` under one scheme, or every scheme when `scheme` is
/// `all`, and reports outcome, counters and the start of the trace.
#[wasm_bindgen]
pub fn solve(instance: &str, scheme: &str, threshold: f64, kmax: usize, max_nodes: u32) -> Result<String, JsError> {
    solve_text(instance, scheme, threshold, kmax, max_nodes).map_err(|e| JsError::new(&e))
}

/// Clusters whitespace or comma separated scores with x-means.
#[wasm_bindgen]
pub fn cluster(scores: &str, kmax: usize) -> Result<String, JsError> {
    cluster_text(scores, kmax).map_err(|e| JsError::new(&e))
}

pub fn generate_text(spec: &str) -> Result<String, String> {
    let spec: GenSpec = spec.trim().parse().map_err(|e| format!("{e}"))?;
    let g = spec.generate().map_err(|e| format!("{e}"))?;
    Ok(format!("# {}\n{}", spec.name(), serialize_instance(&g.problem)))
}

pub fn solve_text(instance: &str, scheme: &str, threshold: f64, kmax: usize, max_nodes: u32) -> Result<String, String> {
    let problem = parse_instance(instance).map_err(|e| format!("{e}"))?;
    let kinds: Vec<SchemeKind> = if scheme == "all" {
        SchemeKind::ALL.to_vec()
    } else {
        vec![scheme.parse().map_err(|e| format!("{e}"))?]
    };
    if !(0.0..=1.0).contains(&threshold) || kmax == 0 {
        return Err("threshold must lie in [0, 1] and kmax be at least 1".into());
    }
    let limits = Limits { wall_time_ms: None, max_nodes: (max_nodes > 0).then_some(u64::from(max_nodes)) };
    let mut out = String::new();
    if kinds.len() > 1 {
        writeln!(out, "{:<11} {:>6} {:>9} {:>9} {:>9} {:>10}", "scheme", "status", "nodes", "decisions", "wipeouts", "time_ms")
            .unwrap();
    }
    for kind in &kinds {
        let config = SolveConfig::new(Scheme::new(*kind).with_threshold(threshold).with_kmax(kmax)).with_limits(limits);
        let config = if kinds.len() == 1 { config.with_trace() } else { config };
        let (outcome, trace) = solve_traced(&problem, &config);
        let s = outcome.stats;
        if kinds.len() > 1 {
            writeln!(
                out,
                "{:<11} {:>6} {:>9} {:>9} {:>9} {:>10.3}",
                kind.name(),
                outcome.status.label(),
                s.nodes,
                s.decisions,
                s.wipeouts,
                s.elapsed_ms
            )
            .unwrap();
            continue;
        }
        writeln!(out, "{}", outcome.status.label().to_uppercase()).unwrap();
        if let Status::Sat(values) = &outcome.status {
            let pairs: Vec<String> = problem.names().iter().zip(values).map(|(n, v)| format!("{n}={v}")).collect();
            writeln!(out, "{}", pairs.join(" ")).unwrap();
        }
        writeln!(
            out,
            "nodes {} decisions {} backtracks {} wipeouts {} choice points {} (tied {}) time_ms {:.3}\n",
            s.nodes, s.decisions, s.backtracks, s.wipeouts, s.choice_points, s.tied_choice_points, s.elapsed_ms
        )
        .unwrap();
        for e in trace.iter().take(TRACE_LINES) {
            writeln!(out, "{e}").unwrap();
        }
        if trace.len() > TRACE_LINES {
            writeln!(out, "... {} more", trace.len() - TRACE_LINES).unwrap();
        }
    }
    Ok(out)
}

pub fn cluster_text(scores: &str, kmax: usize) -> Result<String, String> {
    let values: Vec<f64> = scores
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: {t}")))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("no scores".into());
    }
    if values.iter().any(|v| !v.is_finite()) || kmax == 0 {
        return Err("scores must be finite and kmax at least 1".into());
    }
    let c = xmeans(&values, kmax);
    let mut out = format!("k = {}\n", c.k());
    for (group, centre) in c.clusters.iter().zip(&c.centroids) {
        let members: Vec<String> = group.iter().map(|&i| values[i].to_string()).collect();
        writeln!(out, "mean {centre:>10.3}  {{{}}}", members.join(", ")).unwrap();
    }
    Ok(out)
}
