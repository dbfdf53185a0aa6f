//! Batch runs of every (instance, scheme) pair and their CSV persistence.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branching::Scheme;
use crate::generators::{GenError, GenSpec};
use crate::instance_io::{parse_instance, ParseError};
use crate::model::Problem;
use crate::search::{solve, Limits, SolveConfig};

/// Stack for worker threads; the search recurses once per left branch.
const WORKER_STACK: usize = 64 << 20;

/// One CSV row: `instance,scheme,status,nodes,decisions,wipeouts,elapsed_ms,seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub scheme: String,
    /// `sat`, `unsat` or `limit`.
    pub status: String,
    pub nodes: u64,
    pub decisions: u64,
    pub wipeouts: u64,
    pub elapsed_ms: f64,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("manifest line {line}: {source}")]
    Gen { line: usize, source: GenError },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifestEntry {
    /// Instance file, resolved against the manifest's directory.
    File(PathBuf),
    Gen(GenSpec),
}

/// One entry per non-blank line; `#` starts a comment. A line containing
/// `=` is a generator spec such as `qwh order=5 holes=10 seed=2`,
/// anything else a path.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestEntry>, BenchError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.contains('=') {
            let spec = line.parse().map_err(|source| BenchError::Gen { line: i + 1, source })?;
            entries.push(ManifestEntry::Gen(spec));
        } else {
            entries.push(ManifestEntry::File(base_dir.join(line)));
        }
    }
    Ok(entries)
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub problem: Problem,
}

pub fn load_instance_file(path: &Path) -> Result<Instance, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.into(), source })?;
    let problem = parse_instance(&text).map_err(|source| BenchError::Parse { path: path.into(), source })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Instance { name, problem })
}

pub fn load_entries(entries: &[ManifestEntry]) -> Result<Vec<Instance>, BenchError> {
    entries
        .iter()
        .enumerate()
        .map(|(i, e)| match e {
            ManifestEntry::File(path) => load_instance_file(path),
            ManifestEntry::Gen(spec) => spec
                .generate()
                .map(|g| Instance { name: spec.name(), problem: g.problem })
                .map_err(|source| BenchError::Gen { line: i + 1, source }),
        })
        .collect()
}

/// Reads a manifest file and loads or generates its instances.
pub fn load_manifest(path: &Path) -> Result<Vec<Instance>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io { path: path.into(), source })?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_entries(&parse_manifest(&text, base)?)
}

/// Solves every instance under every scheme with the same limits, on up to
/// `jobs` threads. Rows come back instance-major in input order regardless
/// of scheduling.
pub fn run_bench(instances: &[Instance], schemes: &[Scheme], limits: Limits, seed: u64, jobs: usize) -> Vec<RunRecord> {
    let tasks: Vec<(usize, usize)> =
        (0..instances.len()).flat_map(|i| (0..schemes.len()).map(move |s| (i, s))).collect();
    let slots: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    let work = || loop {
        let t = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(i, s)) = tasks.get(t) else { break };
        let inst = &instances[i];
        let config = SolveConfig::new(schemes[s]).with_limits(limits).with_seed(seed);
        let out = solve(&inst.problem, &config);
        log::info!("{} {} {} nodes={}", inst.name, schemes[s].kind, out.status.label(), out.stats.nodes);
        let row = RunRecord {
            instance: inst.name.clone(),
            scheme: schemes[s].kind.name().to_string(),
            status: out.status.label().to_string(),
            nodes: out.stats.nodes,
            decisions: out.stats.decisions,
            wipeouts: out.stats.wipeouts,
            elapsed_ms: out.stats.elapsed_ms,
            seed,
        };
        slots.lock().expect("no worker panicked")[t] = Some(row);
    };
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs.max(1).min(tasks.len().max(1)))
            .map(|_| {
                std::thread::Builder::new()
                    .stack_size(WORKER_STACK)
                    .spawn_scoped(scope, work)
                    .expect("spawn bench worker")
            })
            .collect();
        for h in handles {
            if let Err(panic) = h.join() {
                std::panic::resume_unwind(panic);
            }
        }
    });
    slots.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every task ran")).collect()
}

pub fn write_records(writer: impl Write, records: &[RunRecord]) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(writer);
    if records.is_empty() {
        w.write_record(["instance", "scheme", "status", "nodes", "decisions", "wipeouts", "elapsed_ms", "seed"])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_records(reader: impl Read) -> Result<Vec<RunRecord>, BenchError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}
