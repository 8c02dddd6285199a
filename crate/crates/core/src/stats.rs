//! Measurement sampling, complete search runs and multi-run coverage.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, WalkError};
use crate::oracle::{oracle_step, OracleFunction, QueryLedger};
use crate::reduced::{
    asymptotic_params, evolve_reduced, reduced_initial_state, reduced_operator,
};
use crate::walk::{edge_endpoints, initial_state, StateVector, WalkConfig};

/// Largest `|norm^2 - 1|` accepted by the samplers.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Default bound on `K` for exact coverage enumeration.
pub const DEFAULT_EXACT_MAX_K: usize = 12;

/// Inverse-CDF sampler over directed edges.
#[derive(Debug, Clone)]
pub struct MeasurementSampler {
    n_vertices: usize,
    cumulative: Vec<f64>,
}

impl MeasurementSampler {
    pub fn new(state: &StateVector) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = state
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        if !acc.is_finite() || (acc - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::NotNormalized(acc));
        }
        Ok(MeasurementSampler {
            n_vertices: state.n_vertices(),
            cumulative,
        })
    }

    /// Samples an ordered edge `(from, to)`.
    pub fn sample(&self, rng: &mut impl Rng) -> (usize, usize) {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        edge_endpoints(self.n_vertices, idx)
    }
}

/// Position measurement with a seeded generator.
pub fn sample_measurement(state: &StateVector, seed: u64) -> Result<(usize, usize)> {
    let sampler = MeasurementSampler::new(state)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub edge: (usize, usize),
    pub success: bool,
    pub steps_used: u64,
    pub oracle_calls: u64,
}

/// How the post-search state is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchEngine {
    /// Full edge-space evolution through the oracle circuit.
    Oracle,
    /// Four-dimensional model; edges sampled class by class.
    Reduced,
}

#[derive(Debug, Clone)]
enum OutcomeSampler {
    Full(MeasurementSampler),
    Classes {
        cumulative: [f64; 4],
        marked: Vec<usize>,
        unmarked: Vec<usize>,
    },
}

/// A search whose final state has been computed once; each call to
/// [`PreparedSearch::run`] is one independent measurement of a fresh run.
#[derive(Debug, Clone)]
pub struct PreparedSearch {
    config: WalkConfig,
    steps: u64,
    success_probability: f64,
    sampler: OutcomeSampler,
}

fn check_search(config: &WalkConfig) -> Result<()> {
    let (n, k) = (config.n_vertices(), config.k_marked());
    if k < 2 {
        return Err(WalkError::NoMarkedPair(k));
    }
    if n < 4 || k + 2 > n {
        return Err(WalkError::ReducedRange {
            n_vertices: n,
            k_marked: k,
        });
    }
    if (config.phase() - FRAC_PI_2).abs() > 1e-12 {
        return Err(WalkError::invalid(
            "phase",
            format!("search runs use pi/2, got {}", config.phase()),
        ));
    }
    Ok(())
}

impl PreparedSearch {
    pub fn new(config: &WalkConfig, engine: SearchEngine) -> Result<Self> {
        check_search(config)?;
        let (n, k) = (config.n_vertices(), config.k_marked());
        let steps = asymptotic_params(n, k)?.n_opt;
        let (sampler, success_probability) = match engine {
            SearchEngine::Oracle => {
                let f = OracleFunction::from_config(config);
                let mut ledger = QueryLedger::default();
                let mut state = initial_state(n)?;
                for _ in 0..steps {
                    state = oracle_step(&state, &f, &mut ledger)?;
                }
                let p = crate::walk::marked_probability(&state, config)?;
                (OutcomeSampler::Full(MeasurementSampler::new(&state)?), p)
            }
            SearchEngine::Reduced => {
                let op = reduced_operator(n, k, config.phase())?;
                let fin = evolve_reduced(&reduced_initial_state(n, k)?, &op, steps)?;
                let w = fin.weights();
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > NORM_TOLERANCE {
                    return Err(WalkError::NotNormalized(total));
                }
                let mut cumulative = [0.0; 4];
                let mut acc = 0.0;
                for i in 0..4 {
                    acc += w[i] / total;
                    cumulative[i] = acc;
                }
                let unmarked = (0..n).filter(|&v| !config.is_marked(v)).collect();
                (
                    OutcomeSampler::Classes {
                        cumulative,
                        marked: config.marked().to_vec(),
                        unmarked,
                    },
                    w[3],
                )
            }
        };
        Ok(PreparedSearch {
            config: config.clone(),
            steps,
            success_probability,
            sampler,
        })
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Exact probability that a single run lands on a marked edge.
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    pub fn run(&self, rng: &mut impl Rng, ledger: &mut QueryLedger) -> RunOutcome {
        let edge = match &self.sampler {
            OutcomeSampler::Full(s) => s.sample(rng),
            OutcomeSampler::Classes {
                cumulative,
                marked,
                unmarked,
            } => {
                let u = rng.random::<f64>();
                let class = cumulative.iter().position(|&c| u < c).unwrap_or(3);
                let pick = |rng: &mut dyn rand::RngCore, set: &[usize]| set[rng.random_range(0..set.len())];
                let distinct = |rng: &mut dyn rand::RngCore, set: &[usize]| {
                    let a = rng.random_range(0..set.len());
                    let mut b = rng.random_range(0..set.len() - 1);
                    if b >= a {
                        b += 1;
                    }
                    (set[a], set[b])
                };
                match class {
                    0 => (pick(rng, unmarked), pick(rng, marked)),
                    1 => (pick(rng, marked), pick(rng, unmarked)),
                    2 => distinct(rng, unmarked),
                    _ => distinct(rng, marked),
                }
            }
        };
        ledger.quantum_calls += 2 * self.steps;
        RunOutcome {
            edge,
            success: self.config.is_marked_edge(edge.0, edge.1),
            steps_used: self.steps,
            oracle_calls: 2 * self.steps,
        }
    }
}

/// Evolves the uniform state for the optimal number of steps through the
/// oracle circuit and measures the walker's edge once.
pub fn run_search(config: &WalkConfig, seed: u64, ledger: &mut QueryLedger) -> Result<RunOutcome> {
    let prepared = PreparedSearch::new(config, SearchEngine::Oracle)?;
    Ok(prepared.run(&mut ChaCha8Rng::seed_from_u64(seed), ledger))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McParams {
    pub n_vertices: usize,
    pub trials: usize,
    pub seed: u64,
    pub engine: SearchEngine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverageMode {
    /// Every run returns a uniformly random marked directed edge.
    Exact { max_k: usize },
    /// Simulated search runs, failures included.
    MonteCarlo(McParams),
}

impl CoverageMode {
    pub fn exact() -> Self {
        CoverageMode::Exact {
            max_k: DEFAULT_EXACT_MAX_K,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageKind {
    Idealized,
    Simulated,
}

impl CoverageKind {
    pub fn label(self) -> &'static str {
        match self {
            CoverageKind::Idealized => "idealized",
            CoverageKind::Simulated => "simulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub trials: usize,
    /// Fraction of individual runs that measured a marked edge.
    pub success_rate: f64,
    /// Exact single-run success probability of the prepared search.
    pub run_success_probability: f64,
    pub oracle_calls: u64,
}

/// Probability of having discovered `j` distinct marked vertices after
/// `runs` searches.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageDistribution {
    pub k_marked: usize,
    pub runs: usize,
    pub kind: CoverageKind,
    pub probabilities: BTreeMap<usize, f64>,
    /// Exact rationals in idealized mode.
    pub exact: Option<BTreeMap<usize, BigRational>>,
    pub simulation: Option<SimulationSummary>,
}

impl CoverageDistribution {
    pub fn probability(&self, discovered: usize) -> f64 {
        self.probabilities.get(&discovered).copied().unwrap_or(0.0)
    }

    pub fn exact_probability(&self, discovered: usize) -> Option<BigRational> {
        self.exact
            .as_ref()
            .map(|m| m.get(&discovered).cloned().unwrap_or_else(BigRational::zero))
    }
}

pub fn coverage_distribution(
    k_marked: usize,
    runs: usize,
    mode: &CoverageMode,
) -> Result<CoverageDistribution> {
    if k_marked < 2 {
        return Err(WalkError::NoMarkedPair(k_marked));
    }
    if runs == 0 {
        return Err(WalkError::invalid("runs", "must be at least 1"));
    }
    match mode {
        CoverageMode::Exact { max_k } => exact_coverage(k_marked, runs, *max_k),
        CoverageMode::MonteCarlo(params) => simulated_coverage(k_marked, runs, params),
    }
}

/// Weighted enumeration of all `K(K-1)`-ary outcome sequences, grouped by the
/// set of vertices discovered so far.
fn exact_coverage(k: usize, runs: usize, max_k: usize) -> Result<CoverageDistribution> {
    if k > max_k || k > 20 {
        return Err(WalkError::EnumerationTooLarge {
            k_marked: k,
            limit: max_k.min(20),
        });
    }
    let mut counts: Vec<BigUint> = vec![BigUint::zero(); 1 << k];
    counts[0] = BigUint::one();
    for _ in 0..runs {
        let mut next = vec![BigUint::zero(); 1 << k];
        for (mask, count) in counts.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            for a in 0..k {
                for b in 0..k {
                    if a != b {
                        next[mask | (1 << a) | (1 << b)] += count;
                    }
                }
            }
        }
        counts = next;
    }
    let sequences = BigUint::from(k * (k - 1)).pow(runs as u32);
    let mut by_size: BTreeMap<usize, BigUint> = BTreeMap::new();
    for (mask, count) in counts.into_iter().enumerate() {
        if !count.is_zero() {
            *by_size.entry(mask.count_ones() as usize).or_default() += count;
        }
    }
    let exact: BTreeMap<usize, BigRational> = by_size
        .into_iter()
        .map(|(j, c)| {
            (
                j,
                BigRational::new(BigInt::from(c), BigInt::from(sequences.clone())),
            )
        })
        .collect();
    let probabilities = exact
        .iter()
        .map(|(&j, p)| (j, p.to_f64().unwrap_or(f64::NAN)))
        .collect();
    Ok(CoverageDistribution {
        k_marked: k,
        runs,
        kind: CoverageKind::Idealized,
        probabilities,
        exact: Some(exact),
        simulation: None,
    })
}

fn simulated_coverage(k: usize, runs: usize, params: &McParams) -> Result<CoverageDistribution> {
    if params.trials == 0 {
        return Err(WalkError::invalid("trials", "must be positive"));
    }
    let config = WalkConfig::with_first_marked(params.n_vertices, k, FRAC_PI_2)?;
    let prepared = PreparedSearch::new(&config, params.engine)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut ledger = QueryLedger::default();
    let mut tally = vec![0u64; k + 1];
    let mut successes = 0u64;
    let mut found = vec![false; k];
    for _ in 0..params.trials {
        found.iter_mut().for_each(|f| *f = false);
        for _ in 0..runs {
            let outcome = prepared.run(&mut rng, &mut ledger);
            if outcome.success {
                successes += 1;
                // marked set is 0..k, so labels index `found` directly
                found[outcome.edge.0] = true;
                found[outcome.edge.1] = true;
            }
        }
        tally[found.iter().filter(|&&f| f).count()] += 1;
    }
    let probabilities = tally
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(j, &c)| (j, c as f64 / params.trials as f64))
        .collect();
    Ok(CoverageDistribution {
        k_marked: k,
        runs,
        kind: CoverageKind::Simulated,
        probabilities,
        exact: None,
        simulation: Some(SimulationSummary {
            trials: params.trials,
            success_rate: successes as f64 / (params.trials * runs) as f64,
            run_success_probability: prepared.success_probability(),
            oracle_calls: ledger.quantum_calls,
        }),
    })
}

/// Expected number of idealized runs until all `K` marked vertices are seen,
/// from the absorbing chain on the number of discovered vertices.
pub fn expected_runs_to_cover_exact(k_marked: usize) -> Result<BigRational> {
    if k_marked < 2 {
        return Err(WalkError::NoMarkedPair(k_marked));
    }
    let k = k_marked as i64;
    let choose2 = |m: i64| BigInt::from(m * (m - 1) / 2);
    let pairs = choose2(k);
    let ratio = |num: BigInt| BigRational::new(num, pairs.clone());
    let mut expected: Vec<BigRational> = vec![BigRational::zero(); k_marked + 1];
    for d in (0..k_marked).rev() {
        let di = d as i64;
        let stay = ratio(choose2(di));
        let one_new = ratio(BigInt::from(di * (k - di)));
        let two_new = ratio(choose2(k - di));
        let mut acc = BigRational::one() + one_new * expected[d + 1].clone();
        if d + 2 <= k_marked {
            acc += two_new * expected[d + 2].clone();
        }
        expected[d] = acc / (BigRational::one() - stay);
    }
    Ok(expected[0].clone())
}

pub fn expected_runs_to_cover(k_marked: usize) -> Result<f64> {
    Ok(expected_runs_to_cover_exact(k_marked)?
        .to_f64()
        .unwrap_or(f64::NAN))
}
