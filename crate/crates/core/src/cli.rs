//! Command-line front end: `gen`, `solve`, `bench` and `stats`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{load_instance_file, load_manifest, read_records, run_bench, write_records};
use crate::branching::{Scheme, SchemeKind, DEFAULT_THRESHOLD};
use crate::clustering::DEFAULT_KMAX;
use crate::generators::GenSpec;
use crate::instance_io::serialize_instance;
use crate::search::{solve_traced, Limits, SolveConfig, Status};
use crate::stats::{render_report, ReportSections};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "setbranch", version, about = "Compare CSP branching schemes under MAC search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated instance
    Gen(GenArgs),
    /// Solve one instance file
    Solve(SolveArgs),
    /// Run schemes over a manifest of instances and write a CSV
    Bench(BenchArgs),
    /// Summarize a results CSV against a baseline scheme
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    /// pigeons, langford, randomb, forced, qwh or coloring
    #[arg(long)]
    family: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    #[arg(long)]
    p1: Option<u64>,
    #[arg(long)]
    p2: Option<u64>,
    #[arg(long)]
    order: Option<u64>,
    #[arg(long)]
    holes: Option<u64>,
    #[arg(long)]
    edges: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err("must lie in [0, 1]".into())
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("{e}")),
    }
}

#[derive(Debug, Args)]
struct SchemeArgs {
    /// Fraction of the original domain size above which set and split
    /// branching apply
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = fraction)]
    threshold: f64,
    /// Maximum cluster count for the clustering schemes
    #[arg(long, default_value_t = DEFAULT_KMAX, value_parser = positive)]
    kmax: usize,
}

impl SchemeArgs {
    fn scheme(&self, kind: SchemeKind) -> Scheme {
        Scheme::new(kind).with_threshold(self.threshold).with_kmax(self.kmax)
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// dway, 2way, split, ties-dway, ties-2way, clust-dway or clust-2way
    #[arg(long)]
    scheme: SchemeKind,
    #[command(flatten)]
    params: SchemeArgs,
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write one line per decision to this file
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Comma-separated scheme names
    #[arg(long, value_delimiter = ',', required = true)]
    schemes: Vec<SchemeKind>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    params: SchemeArgs,
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism)
    #[arg(long, value_parser = positive)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    baseline: SchemeKind,
    #[arg(long)]
    ttest: bool,
    #[arg(long)]
    categorize: bool,
    #[arg(long)]
    speedups: bool,
}

type Failure = Box<dyn std::error::Error>;

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| format!("cannot create {}: {e}", path.display()).into())
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    let spec = GenSpec::from_params(&a.family, |k| match k {
        "n" => a.n,
        "d" => a.d,
        "p1" => a.p1,
        "p2" => a.p2,
        "order" => a.order,
        "holes" => a.holes,
        "edges" => a.edges,
        "k" => a.k,
        "seed" => Some(a.seed),
        _ => None,
    })?;
    let generated = spec.generate()?;
    let mut out = create(&a.out)?;
    out.write_all(serialize_instance(&generated.problem).as_bytes())?;
    out.flush()?;
    println!("{} -> {}", spec.name(), a.out.display());
    Ok(())
}

fn limits(timeout_ms: Option<u64>, max_nodes: Option<u64>) -> Limits {
    Limits { wall_time_ms: timeout_ms, max_nodes }
}

fn solve_cmd(a: SolveArgs) -> Result<(), Failure> {
    let inst = load_instance_file(&a.instance)?;
    let mut config = SolveConfig::new(a.params.scheme(a.scheme))
        .with_limits(limits(a.timeout_ms, a.max_nodes))
        .with_seed(a.seed);
    config.trace = a.trace.is_some();
    let (out, trace) = solve_traced(&inst.problem, &config);
    if let Some(path) = &a.trace {
        let mut w = create(path)?;
        for e in &trace {
            writeln!(w, "{e}")?;
        }
        w.flush()?;
    }
    println!("{}", out.status.label().to_uppercase());
    if let Status::Sat(values) = &out.status {
        for (name, v) in inst.problem.names().iter().zip(values) {
            println!("{name} = {v}");
        }
    }
    let s = out.stats;
    println!(
        "nodes {} decisions {} backtracks {} wipeouts {} time_ms {:.3}",
        s.nodes, s.decisions, s.backtracks, s.wipeouts, s.elapsed_ms
    );
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let instances = load_manifest(&a.manifest)?;
    let schemes: Vec<Scheme> = a.schemes.iter().map(|&k| a.params.scheme(k)).collect();
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_bench(&instances, &schemes, limits(a.timeout_ms, a.max_nodes), a.seed, jobs);
    write_records(create(&a.out)?, &rows)?;
    eprintln!("{} runs ({} instances x {} schemes) -> {}", rows.len(), instances.len(), schemes.len(), a.out.display());
    Ok(())
}

fn stats(a: StatsArgs) -> Result<(), Failure> {
    let file = File::open(&a.results).map_err(|e| format!("cannot read {}: {e}", a.results.display()))?;
    let records = read_records(BufReader::new(file))?;
    let mut sections = ReportSections { speedups: a.speedups, categorize: a.categorize, ttest: a.ttest };
    if !(a.speedups || a.categorize || a.ttest) {
        sections = ReportSections::all();
    }
    print!("{}", render_report(&records, a.baseline.name(), sections)?);
    Ok(())
}
