//! `walk stats`: distribution of the number of marked vertices discovered
//! after several independent search runs.

use num::{BigRational, ToPrimitive};
use serde::Serialize;

use scatterwalk::stats::{expected_runs_to_cover_exact, McParams, SearchEngine};
use scatterwalk::{coverage_distribution, CoverageDistribution, CoverageMode};

use crate::args::{Engine, Format, StatsArgs, StatsMode};
use crate::output::{emit, fmt_float, to_json, Table};
use crate::{CliError, Result};

pub const STATS_COLUMNS: [&str; 4] = ["quantity", "j", "value", "exact"];

/// One output record. `j` is set for per-count probabilities only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub quantity: &'static str,
    pub j: Option<usize>,
    pub value: f64,
    pub exact: Option<String>,
}

fn to_search_engine(engine: Engine) -> Result<SearchEngine> {
    match engine {
        Engine::Reduced => Ok(SearchEngine::Reduced),
        Engine::Oracle => Ok(SearchEngine::Oracle),
        Engine::Full => Err(CliError::invalid(
            "--engine",
            "stats supports the reduced and oracle engines",
        )),
    }
}

pub fn coverage_mode(args: &StatsArgs) -> Result<CoverageMode> {
    match args.mode {
        StatsMode::Exact => Ok(CoverageMode::exact()),
        StatsMode::Mc => {
            let n = args
                .n
                .ok_or_else(|| CliError::invalid("--n", "required with --mode mc"))?;
            if args.k + 2 > n {
                return Err(CliError::invalid(
                    "--n",
                    format!("need N >= K+2, got K={} N={n}", args.k),
                ));
            }
            if args.trials == 0 {
                return Err(CliError::invalid("--trials", "must be at least 1"));
            }
            Ok(CoverageMode::MonteCarlo(McParams {
                n_vertices: n,
                trials: args.trials,
                seed: args.seed,
                engine: to_search_engine(args.engine)?,
            }))
        }
    }
}

fn rational_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn collect_rows(dist: &CoverageDistribution) -> Result<Vec<StatsRow>> {
    let mut rows: Vec<StatsRow> = (0..=dist.k_marked)
        .map(|j| StatsRow {
            quantity: "p_discovered",
            j: Some(j),
            value: dist.probability(j),
            exact: dist.exact_probability(j).map(|q| q.to_string()),
        })
        .collect();
    let runs = expected_runs_to_cover_exact(dist.k_marked)?;
    rows.push(StatsRow {
        quantity: "expected_runs_to_cover",
        j: None,
        value: rational_f64(&runs),
        exact: Some(runs.to_string()),
    });
    if let Some(sim) = &dist.simulation {
        rows.extend([
            StatsRow {
                quantity: "success_rate",
                j: None,
                value: sim.success_rate,
                exact: None,
            },
            StatsRow {
                quantity: "run_success_probability",
                j: None,
                value: sim.run_success_probability,
                exact: None,
            },
            StatsRow {
                quantity: "oracle_calls",
                j: None,
                value: sim.oracle_calls as f64,
                exact: Some(sim.oracle_calls.to_string()),
            },
        ]);
    }
    Ok(rows)
}

pub fn stats_table(rows: &[StatsRow]) -> Table {
    let mut t = Table::new(STATS_COLUMNS.to_vec());
    for r in rows {
        t.push(vec![
            r.quantity.to_string(),
            r.j.map_or_else(String::new, |j| j.to_string()),
            fmt_float(r.value),
            r.exact.clone().unwrap_or_default(),
        ]);
    }
    t
}

/// Human readable lines such as `j=3: 0.66666666666666663 (2/3)`.
pub fn describe(dist: &CoverageDistribution, rows: &[StatsRow]) -> String {
    let mut s = format!(
        "K={} runs={} ({})\n",
        dist.k_marked,
        dist.runs,
        dist.kind.label()
    );
    for r in rows {
        let exact = r.exact.as_ref().map_or_else(String::new, |e| format!(" ({e})"));
        match r.j {
            Some(j) => s.push_str(&format!("j={j}: {:.17}{exact}\n", r.value)),
            None => s.push_str(&format!("{}: {:.17}{exact}\n", r.quantity, r.value)),
        }
    }
    s
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    spec: JsonSpec,
    rows: &'a [StatsRow],
}

#[derive(Serialize)]
struct JsonSpec {
    command: &'static str,
    k_marked: usize,
    runs: usize,
    mode: StatsMode,
    kind: &'static str,
    n_vertices: Option<usize>,
    trials: Option<usize>,
    engine: Option<Engine>,
    seed: u64,
}

pub fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let mode = coverage_mode(args)?;
    let dist = coverage_distribution(args.k, args.runs, &mode)?;
    let rows = collect_rows(&dist)?;
    let mc = args.mode == StatsMode::Mc;
    let bytes = match args.format {
        Format::Csv => stats_table(&rows).to_csv(),
        Format::Json => to_json(&JsonDocument {
            spec: JsonSpec {
                command: "stats",
                k_marked: args.k,
                runs: args.runs,
                mode: args.mode,
                kind: dist.kind.label(),
                n_vertices: args.n.filter(|_| mc),
                trials: mc.then_some(args.trials),
                engine: mc.then_some(args.engine),
                seed: args.seed,
            },
            rows: &rows,
        }),
    };
    match &args.out {
        Some(path) => {
            emit(Some(path), &bytes)?;
            emit(None, describe(&dist, &rows).as_bytes())
        }
        None => emit(None, &bytes),
    }
}
