//! `walk run`: per-step localization curves and per-N summaries.

use rayon::prelude::*;
use serde::Serialize;

use scatterwalk::oracle::random_pairs_expected_queries;
use scatterwalk::reduced::{asymptotic_params, spectral_decompose};
use scatterwalk::walk::{apply_step, initial_state, marked_probability};
use scatterwalk::{
    oracle_step, project, reduced_initial_state, reduced_operator, OracleFunction, QueryLedger,
    WalkConfig,
};

use crate::args::{Engine, Format};
use crate::output::{emit, fmt_float, fmt_opt, summary_path, to_json, Table};
use crate::spec::{ExperimentSpec, Steps};
use crate::Result;

pub const STEP_COLUMNS: [&str; 8] = [
    "step", "p_marked", "p_w1", "p_w2", "p_w3", "p_w4", "residual", "norm_error",
];

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "n",
    "k",
    "phase",
    "engine",
    "steps",
    "n_opt",
    "peak_probability",
    "peak_step",
    "final_p_marked",
    "quantum_oracle_calls",
    "classical_queries",
];

/// One row per step. `p_w` and `residual` are `None` when the reduced basis
/// is undefined (K outside 2..=N-2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRow {
    pub step: u64,
    pub p_marked: f64,
    pub p_w: Option<[f64; 4]>,
    pub residual: Option<f64>,
    pub norm_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub n: usize,
    pub k: usize,
    pub phase: f64,
    pub engine: Engine,
    pub steps: u64,
    pub n_opt: Option<u64>,
    pub peak_probability: f64,
    pub peak_step: u64,
    pub final_p_marked: f64,
    pub quantum_oracle_calls: u64,
    /// Expected classical queries with random pairs, `(M+1)/(S+1)`.
    pub classical_queries: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub rows: Vec<StepRow>,
    pub summary: RunSummary,
}

fn resolve_steps(spec: &ExperimentSpec, n: usize) -> Result<u64> {
    Ok(match spec.steps {
        Steps::Fixed(s) => s,
        Steps::Auto => asymptotic_params(n, spec.k_marked)?.n_opt,
    })
}

/// Evolves one graph size with the requested engine.
pub fn simulate(spec: &ExperimentSpec, n: usize) -> Result<RunResult> {
    let k = spec.k_marked;
    let steps = resolve_steps(spec, n)?;
    let config = WalkConfig::new(n, spec.marked(), spec.phase)?;
    let reducible = k >= 2 && k + 2 <= n;
    let mut oracle_calls = 2 * steps;

    let rows = match spec.engine {
        Engine::Reduced => {
            let op = reduced_operator(n, k, spec.phase)?;
            let spectral = spectral_decompose(&op)?;
            let init = reduced_initial_state(n, k)?;
            (0..=steps)
                .map(|step| {
                    let s = spectral.evolve(&init, step);
                    StepRow {
                        step,
                        p_marked: s.marked_weight(),
                        p_w: Some(s.weights()),
                        residual: Some(0.0),
                        norm_error: (s.norm_sqr().sqrt() - 1.0).abs(),
                    }
                })
                .collect()
        }
        Engine::Full | Engine::Oracle => {
            let f = OracleFunction::from_config(&config);
            let mut ledger = QueryLedger::default();
            let mut state = initial_state(n)?;
            let mut rows = Vec::with_capacity(steps as usize + 1);
            for step in 0..=steps {
                if step > 0 {
                    state = match spec.engine {
                        Engine::Oracle => oracle_step(&state, &f, &mut ledger)?,
                        _ => apply_step(&state, &config)?,
                    };
                }
                let (p_w, residual) = if reducible {
                    let (r, res) = project(&state, &config)?;
                    (Some(r.weights()), Some(res))
                } else {
                    (None, None)
                };
                rows.push(StepRow {
                    step,
                    p_marked: marked_probability(&state, &config)?,
                    p_w,
                    residual,
                    norm_error: (state.norm() - 1.0).abs(),
                });
            }
            if spec.engine == Engine::Oracle {
                oracle_calls = ledger.quantum_calls;
            }
            rows
        }
    };

    let (peak_step, peak_probability) = rows
        .iter()
        .fold((0, f64::NEG_INFINITY), |best, r| {
            if r.p_marked > best.1 {
                (r.step, r.p_marked)
            } else {
                best
            }
        });
    let summary = RunSummary {
        n,
        k,
        phase: spec.phase,
        engine: spec.engine,
        steps,
        n_opt: asymptotic_params(n, k).ok().map(|p| p.n_opt),
        peak_probability,
        peak_step,
        final_p_marked: rows.last().map_or(f64::NAN, |r| r.p_marked),
        quantum_oracle_calls: oracle_calls,
        classical_queries: random_pairs_expected_queries(n, k).ok(),
    };
    Ok(RunResult { rows, summary })
}

pub fn step_table(rows: &[StepRow]) -> Table {
    let mut t = Table::new(STEP_COLUMNS.to_vec());
    for r in rows {
        let w = r.p_w.map_or([None; 4], |w| w.map(Some));
        t.push(vec![
            r.step.to_string(),
            fmt_float(r.p_marked),
            fmt_opt(w[0]),
            fmt_opt(w[1]),
            fmt_opt(w[2]),
            fmt_opt(w[3]),
            fmt_opt(r.residual),
            fmt_float(r.norm_error),
        ]);
    }
    t
}

pub fn summary_table(summaries: &[RunSummary]) -> Table {
    let mut t = Table::new(SUMMARY_COLUMNS.to_vec());
    for s in summaries {
        t.push(vec![
            s.n.to_string(),
            s.k.to_string(),
            fmt_float(s.phase),
            format!("{:?}", s.engine).to_lowercase(),
            s.steps.to_string(),
            s.n_opt.map_or_else(|| "NaN".to_string(), |v| v.to_string()),
            fmt_float(s.peak_probability),
            s.peak_step.to_string(),
            fmt_float(s.final_p_marked),
            s.quantum_oracle_calls.to_string(),
            fmt_opt(s.classical_queries),
        ]);
    }
    t
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    spec: &'a ExperimentSpec,
    rows: &'a [StepRow],
    summary: &'a [RunSummary],
}

pub fn cmd_run(spec: &ExperimentSpec) -> Result<()> {
    // sweep points are independent; collect keeps them in N order
    let results: Vec<RunResult> = spec
        .n_values
        .par_iter()
        .map(|&n| simulate(spec, n))
        .collect::<Result<_>>()?;
    let summaries: Vec<RunSummary> = results.iter().map(|r| r.summary.clone()).collect();
    let rows: &[StepRow] = if spec.sweep { &[] } else { &results[0].rows };
    let out = spec.out.as_deref();

    match spec.format {
        Format::Json => emit(
            out,
            &to_json(&JsonDocument {
                spec,
                rows,
                summary: &summaries,
            }),
        ),
        Format::Csv if spec.sweep => emit(out, &summary_table(&summaries).to_csv()),
        Format::Csv => match out {
            Some(path) => {
                emit(Some(path), &step_table(rows).to_csv())?;
                emit(Some(&summary_path(path)), &summary_table(&summaries).to_csv())
            }
            None => {
                let mut bytes = step_table(rows).to_csv();
                bytes.push(b'\n');
                bytes.extend(summary_table(&summaries).to_csv());
                emit(None, &bytes)
            }
        },
    }
}
