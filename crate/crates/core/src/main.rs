use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use sharedp::bench::{bench_scaling, generate_queries, run_engine, Aggregate, Engine, QueryRecord, SAMPLING};
use sharedp::oracle::{max_disjoint_count, verify_disjoint, ORACLE_LIMIT};
use sharedp::{load_queries, Graph};

#[derive(Parser)]
#[command(name = "sharedp", version, about = "Batch k vertex-disjoint paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer a query file (or a generated workload) and write a JSONL report.
    Run(RunArgs),
    /// Sample solvable query pairs and write them as "s t" lines.
    Generate(GenerateArgs),
    /// Re-check a JSONL report against the graph.
    Verify(VerifyArgs),
    /// Mean per-query time of the shared engine at several batch sizes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, one "u v" pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Insert every edge in both directions.
    #[arg(long)]
    undirected: bool,
}

#[derive(Args)]
struct WorkloadArgs {
    /// Query file, one "s t" pair per line. Without it, --count pairs are generated.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Disjoint paths wanted per query.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Pairs to generate when no query file is given.
    #[arg(long)]
    count: Option<usize>,
    /// Seed for query generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-query limit in seconds; the shared engine gets limit x |Q| per batch.
    #[arg(long, default_value_t = 200.0)]
    timeout: f64,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    work: WorkloadArgs,
    /// sharedp, maxflow or oracle.
    #[arg(long, default_value = "sharedp")]
    engine: Engine,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Starting k; lowered along the schedule when too few pairs qualify.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Pairs to emit.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Query file to write; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Report to check; stdin when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Overrides the k recorded in the report's aggregate line.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    work: WorkloadArgs,
    /// Ascending batch sizes.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
    sizes: Vec<usize>,
}

/// A failure and the exit status it maps to.
struct Fail(u8, String);

fn usage(e: impl ToString) -> Fail {
    Fail(2, e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load_graph(a: &GraphArgs) -> Result<Graph, Fail> {
    Graph::load(&a.graph, a.undirected).map_err(usage)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Fail> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| usage(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn timeout(w: &WorkloadArgs) -> Result<Duration, Fail> {
    Duration::try_from_secs_f64(w.timeout)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| usage("--timeout must be a positive number of seconds"))
}

fn workload(g: &Graph, w: &WorkloadArgs) -> Result<sharedp::Batch, Fail> {
    let k = w.k as usize;
    match (&w.queries, w.count) {
        (Some(path), _) => load_queries(path, g, k).map_err(usage),
        (None, Some(count)) => Ok(generate_queries(g, k, count, w.seed).map_err(usage)?.batch),
        (None, None) => Err(usage("either --queries or --count is required")),
    }
}

fn run(a: RunArgs) -> Result<(), Fail> {
    let g = load_graph(&a.graph)?;
    let batch = workload(&g, &a.work)?;
    let report = run_engine(&g, &batch, a.engine, timeout(&a.work)?).map_err(|e| Fail(1, e.to_string()))?;
    let mut out = sink(&a.work.out)?;
    report.write_jsonl(&mut out).and_then(|_| out.flush()).map_err(usage)?;
    if report.verified() {
        Ok(())
    } else {
        Err(Fail(1, "some results failed verification".into()))
    }
}

fn generate(a: GenerateArgs) -> Result<(), Fail> {
    let g = load_graph(&a.graph)?;
    let gen = generate_queries(&g, a.k as usize, a.count as usize, a.seed).map_err(usage)?;
    let mut out = sink(&a.out)?;
    let write = |out: &mut dyn Write| -> io::Result<()> {
        writeln!(out, "# k={} requested_k={} seed={} attempts={}", gen.k, a.k, a.seed, gen.attempts)?;
        writeln!(out, "# sampling: {SAMPLING}")?;
        for (s, t) in gen.batch.pairs() {
            writeln!(out, "{s} {t}")?;
        }
        out.flush()
    };
    write(&mut out).map_err(usage)
}

fn verify(a: VerifyArgs) -> Result<(), Fail> {
    let g = load_graph(&a.graph)?;
    let reader: Box<dyn BufRead> = match &a.report {
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(|e| usage(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufReader::new(io::stdin().lock())),
    };
    let mut records = Vec::new();
    let mut k = a.k;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(usage)?;
        if line.trim().is_empty() {
            continue;
        }
        if line.contains("\"aggregate\"") {
            let agg: Aggregate = serde_json::from_str(&line).map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
            k.get_or_insert(agg.k);
        } else {
            let r: QueryRecord = serde_json::from_str(&line).map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
            records.push(r);
        }
    }
    let k = k.ok_or_else(|| usage("report has no aggregate line; pass --k"))?;
    let check_count = g.vertex_count() <= ORACLE_LIMIT;
    let mut bad = 0;
    for r in &records {
        let mut problems = verify_disjoint(&g, r.s, r.t, &r.paths).violations;
        if r.found != r.paths.len() {
            problems.push(format!("found={} but {} paths listed", r.found, r.paths.len()));
        }
        if check_count && !r.timed_out {
            let best = max_disjoint_count(&g, r.s, r.t, k).map_err(usage)?;
            if r.found != best {
                problems.push(format!("found={} but the oracle finds {best}", r.found));
            }
        }
        for p in &problems {
            println!("query {} ({} -> {}): {p}", r.id, r.s, r.t);
        }
        bad += usize::from(!problems.is_empty());
    }
    println!("checked {} queries, {} failed", records.len(), bad);
    if bad == 0 {
        Ok(())
    } else {
        Err(Fail(1, format!("{bad} queries failed verification")))
    }
}

fn bench(a: BenchArgs) -> Result<(), Fail> {
    let g = load_graph(&a.graph)?;
    let batch = workload(&g, &a.work)?;
    let reports = bench_scaling(&g, &batch, &a.sizes, timeout(&a.work)?).map_err(|e| match e {
        sharedp::bench::RunError::Usage(u) => usage(u),
        other => Fail(1, other.to_string()),
    })?;
    let mut out = sink(&a.work.out)?;
    for r in &reports {
        serde_json::to_writer(&mut out, &r.aggregate).map_err(usage)?;
        writeln!(out).map_err(usage)?;
    }
    out.flush().map_err(usage)?;
    if reports.iter().all(|r| r.verified()) {
        Ok(())
    } else {
        Err(Fail(1, "some results failed verification".into()))
    }
}
