//! Workload generation, engine runs and reporting.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engines::{maxflow_single, maxflow_single_until, LevelStats, QueryResult, ShareDp};
use crate::error::{ConsistencyError, UsageError};
use crate::graph::{Graph, VertexId};
use crate::oracle::{max_disjoint_count, max_disjoint_paths, verify_disjoint, ORACLE_LIMIT};
use crate::query::Batch;

/// k values tried in turn when too few sampled pairs are solvable.
pub const K_SCHEDULE: [usize; 7] = [50, 20, 15, 10, 8, 5, 2];

/// Fraction of sampled pairs that must be solvable before a k is accepted.
pub const MIN_SUCCESS_RATE: f64 = 0.2;

/// Attempts allowed per requested query.
pub const ATTEMPTS_PER_QUERY: usize = 50;

/// How candidate pairs are drawn; recorded in reports.
pub const SAMPLING: &str = "uniform over vertices with out-degree >= k (source) and in-degree >= k (target)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Sharedp,
    Maxflow,
    Oracle,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Sharedp => "sharedp",
            Engine::Maxflow => "maxflow",
            Engine::Oracle => "oracle",
        })
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sharedp" => Ok(Engine::Sharedp),
            "maxflow" => Ok(Engine::Maxflow),
            "oracle" => Ok(Engine::Oracle),
            other => Err(format!("unknown engine {other:?}")),
        }
    }
}

/// A generated workload and the k it was validated for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub batch: Batch,
    pub k: usize,
    pub attempts: usize,
}

fn solvable(g: &Graph, s: VertexId, t: VertexId, k: usize) -> bool {
    if g.vertex_count() <= ORACLE_LIMIT {
        max_disjoint_count(g, s, t, k).expect("within oracle limit") >= k
    } else {
        maxflow_single(g, &crate::query::Query { id: 0, s, t }, k).found >= k
    }
}

/// Samples `count` pairs with at least `k` disjoint paths, reducing `k`
/// along [`K_SCHEDULE`] when fewer than [`MIN_SUCCESS_RATE`] of the
/// attempts succeed. At the smallest k any nonempty set of solvable pairs
/// is returned.
pub fn generate_queries(g: &Graph, k: usize, count: usize, seed: u64) -> Result<Generated, UsageError> {
    if count == 0 {
        return Err(UsageError::Config("query count must be at least 1".into()));
    }
    let mut ks = vec![k];
    ks.extend(K_SCHEDULE.iter().copied().filter(|&x| x < k));
    let last = ks.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.vertex_count() as VertexId;

    for (round, &kk) in ks.iter().enumerate() {
        if kk < 2 && round > 0 {
            break;
        }
        let sources: Vec<VertexId> = (0..n).filter(|&v| g.out_degree(v) >= kk).collect();
        let targets: Vec<VertexId> = (0..n).filter(|&v| g.in_degree(v) >= kk).collect();
        if sources.is_empty() || targets.is_empty() {
            continue;
        }
        let mut pairs = Vec::new();
        let mut attempts = 0;
        while pairs.len() < count && attempts < count * ATTEMPTS_PER_QUERY {
            attempts += 1;
            let s = sources[rng.gen_range(0..sources.len())];
            let t = targets[rng.gen_range(0..targets.len())];
            if s != t && solvable(g, s, t, kk) {
                pairs.push((s, t));
            }
        }
        let rate = pairs.len() as f64 / attempts as f64;
        let accepted = if round == last { !pairs.is_empty() } else { pairs.len() == count && rate >= MIN_SUCCESS_RATE };
        if accepted {
            return Ok(Generated { batch: Batch::new(kk, pairs), k: kk, attempts });
        }
    }
    Err(UsageError::GenerationFailed)
}

/// One line of a run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub id: usize,
    pub s: VertexId,
    pub t: VertexId,
    pub found: usize,
    pub paths: Vec<Vec<VertexId>>,
    pub elapsed_ms: f64,
    pub timed_out: bool,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelShare {
    pub iteration: usize,
    pub direction: String,
    pub level: usize,
    pub expanded: usize,
    pub shared: usize,
    pub query_visits: usize,
    pub words_ored: usize,
    pub ratio: f64,
}

impl From<&LevelStats> for LevelShare {
    fn from(s: &LevelStats) -> Self {
        LevelShare {
            iteration: s.iteration,
            direction: if s.backward { "backward" } else { "forward" }.into(),
            level: s.level,
            expanded: s.expanded,
            shared: s.shared,
            query_visits: s.query_visits,
            words_ored: s.words_ored,
            ratio: s.share_ratio(),
        }
    }
}

/// Trailing summary line of a run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub aggregate: bool,
    pub engine: Engine,
    pub k: usize,
    pub queries: usize,
    pub mean_query_ms: f64,
    pub total_ms: f64,
    pub timed_out: usize,
    pub verified: bool,
    /// Shared expansions over all expansions, across every level.
    pub share_ratio: Option<f64>,
    pub levels: Vec<LevelShare>,
    pub sampling: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub records: Vec<QueryRecord>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn verified(&self) -> bool {
        self.aggregate.verified
    }

    /// Newline-delimited JSON: one record per query, then the aggregate.
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut out, &self.aggregate)?;
        out.write_all(b"\n")
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error("internal consistency failure: {0}")]
    Consistency(#[from] ConsistencyError),
}

/// Runs `engine` over `batch`. Independent engines get `timeout` per query;
/// the shared engine gets `timeout * |Q|` for the whole batch. Every result
/// is checked with [`verify_disjoint`].
pub fn run_engine(g: &Graph, batch: &Batch, engine: Engine, timeout: Duration) -> Result<RunReport, RunError> {
    let k = batch.k();
    let start = Instant::now();
    let mut levels = Vec::new();
    let results: Vec<QueryResult> = match engine {
        Engine::Sharedp => {
            let deadline = start + timeout.saturating_mul(batch.len().max(1) as u32);
            let mut shared = ShareDp::new(g, batch.clone());
            shared.run(&mut |s: &LevelStats| levels.push(s.clone()), Some(deadline))?;
            let mut results = shared.results()?;
            let each = start.elapsed() / batch.len().max(1) as u32;
            results.iter_mut().for_each(|r| r.elapsed = each);
            results
        }
        Engine::Maxflow => {
            batch.queries().iter().map(|q| maxflow_single_until(g, q, k, Some(Instant::now() + timeout))).collect()
        }
        Engine::Oracle => batch
            .queries()
            .iter()
            .map(|q| {
                let t0 = Instant::now();
                let paths = max_disjoint_paths(g, q.s, q.t, k)?;
                Ok(QueryResult { id: q.id, found: paths.len(), paths, elapsed: t0.elapsed(), timed_out: false })
            })
            .collect::<Result<_, UsageError>>()?,
    };
    let total = start.elapsed();

    let records: Vec<QueryRecord> = results
        .into_iter()
        .map(|r| {
            let q = batch.query(r.id);
            let verified = r.found <= k && verify_disjoint(g, q.s, q.t, &r.paths).ok;
            QueryRecord {
                id: r.id,
                s: q.s,
                t: q.t,
                found: r.found,
                paths: r.paths,
                elapsed_ms: r.elapsed.as_secs_f64() * 1e3,
                timed_out: r.timed_out,
                verified,
            }
        })
        .collect();

    let (shared, expanded) = levels.iter().fold((0, 0), |(s, e), l| (s + l.shared, e + l.expanded));
    let aggregate = Aggregate {
        aggregate: true,
        engine,
        k,
        queries: batch.len(),
        mean_query_ms: if records.is_empty() {
            0.0
        } else {
            records.iter().map(|r| r.elapsed_ms).sum::<f64>() / records.len() as f64
        },
        total_ms: total.as_secs_f64() * 1e3,
        timed_out: records.iter().filter(|r| r.timed_out).count(),
        verified: records.iter().all(|r| r.verified),
        share_ratio: (engine == Engine::Sharedp && expanded > 0).then(|| shared as f64 / expanded as f64),
        levels: levels.iter().map(LevelShare::from).collect(),
        sampling: SAMPLING.into(),
    };
    Ok(RunReport { records, aggregate })
}

/// Mean per-query cost of the shared engine at several batch sizes.
///
/// The first `max(sizes)` queries form a fixed pool. For each size the pool
/// is cut into consecutive batches of that size and every batch is run, so
/// all sizes answer the same queries and the mean covers the whole pool.
pub fn bench_scaling(g: &Graph, batch: &Batch, sizes: &[usize], timeout: Duration) -> Result<Vec<RunReport>, RunError> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(UsageError::Config("sizes must be positive and strictly ascending".into()).into());
    }
    let pool = sizes.last().copied().unwrap_or(0).min(batch.len());
    let mut reports = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mut records = Vec::with_capacity(pool);
        let mut levels = Vec::new();
        let mut total_ms = 0.0;
        let mut start = 0;
        while start < pool {
            let chunk = batch.slice(start, size.min(pool - start));
            let report = run_engine(g, &chunk, Engine::Sharedp, timeout)?;
            for mut r in report.records {
                r.id += start;
                records.push(r);
            }
            levels.extend(report.aggregate.levels);
            total_ms += report.aggregate.total_ms;
            start += size;
        }
        let (shared, expanded) = levels.iter().fold((0, 0), |(s, e), l: &LevelShare| (s + l.shared, e + l.expanded));
        let aggregate = Aggregate {
            aggregate: true,
            engine: Engine::Sharedp,
            k: batch.k(),
            queries: size,
            mean_query_ms: if pool == 0 { 0.0 } else { total_ms / pool as f64 },
            total_ms,
            timed_out: records.iter().filter(|r| r.timed_out).count(),
            verified: records.iter().all(|r| r.verified),
            share_ratio: (expanded > 0).then(|| shared as f64 / expanded as f64),
            levels: Vec::new(),
            sampling: SAMPLING.into(),
        };
        reports.push(RunReport { records, aggregate });
    }
    Ok(reports)
}
