//! Oracle-circuit form of the walk step.
//!
//! A step is `O^dagger CU_f O`, then the unmarked scattering, then
//! `O^dagger CU_f O` again. `O` copies the endpoints of the walker's edge
//! into two blank vertex registers; `CU_f` adds `f(k,l)` modulo four to an
//! ancilla prepared in the phase-graded state
//! `(1/2) sum_q e^{-i pi q/2} |q>`, which kicks back the phase `e^{i pi f/2}`
//! and leaves every register as it was.
//!
//! Vertex registers hold `N+1` levels: level 0 is blank and level `v+1` is
//! vertex `v`. `O` adds `endpoint + 1` modulo `N+1`, so it is a permutation.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, WalkError};
use crate::walk::{apply_unmarked_scattering, edge_endpoints, StateVector, WalkConfig};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pair-membership oracle: `f(k,l) = 1` iff both `k` and `l` are marked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFunction {
    marked: Vec<bool>,
}

impl OracleFunction {
    pub fn new(n_vertices: usize, marked: impl IntoIterator<Item = usize>) -> Self {
        let mut flags = vec![false; n_vertices];
        for v in marked {
            if let Some(f) = flags.get_mut(v) {
                *f = true;
            }
        }
        OracleFunction { marked: flags }
    }

    pub fn from_config(config: &WalkConfig) -> Self {
        Self::new(config.n_vertices(), config.marked().iter().copied())
    }

    pub fn n_vertices(&self) -> usize {
        self.marked.len()
    }

    /// `k == l` follows the same rule; the walk never asks.
    pub fn eval(&self, k: usize, l: usize) -> u8 {
        let m = |v: usize| self.marked.get(v).copied().unwrap_or(false);
        u8::from(m(k) && m(l))
    }
}

/// Four-level ancilla register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ancilla(pub [Complex64; 4]);

impl Ancilla {
    pub fn basis(level: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[level % 4] = Complex64::new(1.0, 0.0);
        Ancilla(amps)
    }

    /// `(1/2) sum_q e^{-i pi q / 2} |q>`, an eigenvector of the mod-4 shift.
    pub fn kickback() -> Self {
        Ancilla([0, 1, 2, 3].map(|q| Complex64::from_polar(0.5, -std::f64::consts::FRAC_PI_2 * q as f64)))
    }

    /// `|m> -> |m + by mod 4>`.
    pub fn shifted(&self, by: u8) -> Self {
        let mut out = [ZERO; 4];
        for (m, amp) in self.0.iter().enumerate() {
            out[(m + by as usize) % 4] = *amp;
        }
        Ancilla(out)
    }

    pub fn inner(&self, other: &Ancilla) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }
}

/// One basis edge of the walker with its registers in a product state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub edge: (usize, usize),
    pub amplitude: Complex64,
    /// Register levels: 0 is blank, `v + 1` is vertex `v`.
    pub first: usize,
    pub second: usize,
    pub ancilla: Ancilla,
}

impl Branch {
    fn label(level: usize) -> Option<usize> {
        level.checked_sub(1)
    }

    pub fn first_vertex(&self) -> Option<usize> {
        Self::label(self.first)
    }

    pub fn second_vertex(&self) -> Option<usize> {
        Self::label(self.second)
    }
}

/// Walker register entangled only through the edge label with two vertex
/// registers and an ancilla; each edge branch carries its own product state.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    n_vertices: usize,
    branches: Vec<Branch>,
}

impl CompositeState {
    /// `|state> (x) |blank> (x) |blank> (x) |ancilla>`.
    pub fn from_walker(state: &StateVector, ancilla: Ancilla) -> Self {
        let n = state.n_vertices();
        let branches = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, &amplitude)| Branch {
                edge: edge_endpoints(n, i),
                amplitude,
                first: 0,
                second: 0,
                ancilla,
            })
            .collect();
        CompositeState { n_vertices: n, branches }
    }

    pub fn from_branches(n_vertices: usize, branches: Vec<Branch>) -> Self {
        CompositeState { n_vertices, branches }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.amplitude.norm_sqr() * b.ancilla.inner(&b.ancilla).re)
            .sum()
    }

    fn levels(&self) -> usize {
        self.n_vertices + 1
    }
}

impl Branch {
    fn copy_endpoints(&mut self, levels: usize) {
        self.first = (self.first + self.edge.0 + 1) % levels;
        self.second = (self.second + self.edge.1 + 1) % levels;
    }

    fn uncopy_endpoints(&mut self, levels: usize) {
        self.first = (self.first + levels - (self.edge.0 + 1) % levels) % levels;
        self.second = (self.second + levels - (self.edge.1 + 1) % levels) % levels;
    }

    fn query(&mut self, f: &OracleFunction) -> Result<()> {
        let (Some(k), Some(l)) = (self.first_vertex(), self.second_vertex()) else {
            return Err(WalkError::BlankRegister);
        };
        self.ancilla = self.ancilla.shifted(f.eval(k, l));
        Ok(())
    }
}

/// The `O` gate: adds each endpoint label into its vertex register.
pub fn apply_copy_gate(state: &CompositeState) -> CompositeState {
    let levels = state.levels();
    let mut out = state.clone();
    out.branches.iter_mut().for_each(|b| b.copy_endpoints(levels));
    out
}

/// `O^dagger`.
pub fn apply_copy_gate_inverse(state: &CompositeState) -> CompositeState {
    let levels = state.levels();
    let mut out = state.clone();
    out.branches.iter_mut().for_each(|b| b.uncopy_endpoints(levels));
    out
}

/// `|k>|l>|m> -> |k>|l>|m + f(k,l) mod 4>`.
pub fn apply_oracle(state: &CompositeState, f: &OracleFunction) -> Result<CompositeState> {
    let mut out = state.clone();
    for b in &mut out.branches {
        b.query(f)?;
    }
    Ok(out)
}

/// Phase that `O^dagger CU_f O` imprints on edge state `edge_index` when the
/// ancilla starts in [`Ancilla::kickback`]; checks that all registers are
/// restored.
pub fn conjugated_oracle(edge_index: usize, f: &OracleFunction) -> Result<Complex64> {
    let n = f.n_vertices();
    if n < 3 || edge_index >= n * (n - 1) {
        return Err(WalkError::invalid(
            "edge_index",
            format!("{edge_index} is not an edge of K_{n}"),
        ));
    }
    let mu = Ancilla::kickback();
    let mut branch = Branch {
        edge: edge_endpoints(n, edge_index),
        amplitude: Complex64::new(1.0, 0.0),
        first: 0,
        second: 0,
        ancilla: mu,
    };
    branch.copy_endpoints(n + 1);
    branch.query(f)?;
    branch.uncopy_endpoints(n + 1);
    if branch.first != 0 || branch.second != 0 {
        return Err(WalkError::AncillaNotRestored);
    }
    // ancilla = phase * mu exactly when |<mu|ancilla>| = 1
    let phase = mu.inner(&branch.ancilla);
    if (phase.norm() - 1.0).abs() > 1e-14 {
        return Err(WalkError::AncillaNotRestored);
    }
    Ok(phase * branch.amplitude)
}

/// Oracle-call bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryLedger {
    pub quantum_calls: u64,
    pub classical_calls: u64,
}

/// One superposed oracle call: kickback phase on every edge amplitude.
fn oracle_call(state: &mut StateVector, f: &OracleFunction, ledger: &mut QueryLedger) -> Result<()> {
    for (i, amp) in state.amplitudes_mut().iter_mut().enumerate() {
        *amp *= conjugated_oracle(i, f)?;
    }
    ledger.quantum_calls += 1;
    Ok(())
}

/// One walk step as a circuit: oracle call, unmarked scattering, oracle call.
pub fn oracle_step(
    state: &StateVector,
    f: &OracleFunction,
    ledger: &mut QueryLedger,
) -> Result<StateVector> {
    if state.n_vertices() != f.n_vertices() {
        return Err(WalkError::DimensionMismatch {
            expected: f.n_vertices() * f.n_vertices().saturating_sub(1),
            got: state.len(),
        });
    }
    let mut current = state.clone();
    oracle_call(&mut current, f, ledger)?;
    let mut next = apply_unmarked_scattering(&current)?;
    oracle_call(&mut next, f, ledger)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalStrategy {
    /// Query uniformly random unordered pairs without replacement.
    RandomPairs,
    /// Query unordered pairs in lexicographic order `(0,1), (0,2), ...`.
    DeterministicScan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalEstimate {
    /// Monte Carlo mean for random pairs, exact for the scan.
    pub expected_queries: f64,
    /// Standard error of the Monte Carlo mean (0 when exact).
    pub std_error: f64,
    /// Queries needed in the worst case.
    pub worst_case: u64,
}

fn pair_count(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Exact mean number of random-pair queries until the first marked pair:
/// `(M+1)/(S+1)` for `S` marked among `M` pairs.
pub fn random_pairs_expected_queries(n_vertices: usize, k_marked: usize) -> Result<f64> {
    if k_marked < 2 || k_marked > n_vertices {
        return Err(WalkError::NoMarkedPair(k_marked));
    }
    let m = pair_count(n_vertices as u64) as f64;
    let s = pair_count(k_marked as u64) as f64;
    Ok((m + 1.0) / (s + 1.0))
}

/// `C(pool, k) / C(n, k)`.
fn binomial_ratio(pool: usize, n: usize, k: usize) -> f64 {
    if pool < k {
        return 0.0;
    }
    (0..k).map(|j| (pool - j) as f64 / (n - j) as f64).product()
}

/// Exact mean number of lexicographic-scan queries when the `K` marked
/// vertices are a uniformly random subset.
///
/// `E[T] = sum_i P(first i pairs unmarked)`. After `a` complete rows and `b`
/// pairs of row `a`, vertices `0..a` are adjacent to everything, so a marked
/// set avoiding the prefix lies in `a..N` and may contain `a` only if it
/// avoids `a+1..=a+b`.
pub fn deterministic_scan_expected_queries(n_vertices: usize, k_marked: usize) -> Result<f64> {
    if k_marked < 2 || k_marked > n_vertices {
        return Err(WalkError::NoMarkedPair(k_marked));
    }
    let (n, k) = (n_vertices, k_marked);
    // C(n, k-1) / C(n, k)
    let lower_order = k as f64 / (n - k + 1) as f64;
    let mut total = 0.0;
    for row in 0..n {
        let remaining = n - row;
        for b in 0..remaining - 1 {
            let p = binomial_ratio(remaining - 1, n, k)
                + binomial_ratio(remaining - 1 - b, n, k - 1) * lower_order;
            if p <= 0.0 {
                return Ok(total);
            }
            total += p;
        }
    }
    Ok(total)
}

pub fn classical_query_baseline(
    n_vertices: usize,
    k_marked: usize,
    strategy: ClassicalStrategy,
    trials: usize,
    seed: u64,
) -> Result<ClassicalEstimate> {
    if k_marked < 2 || k_marked > n_vertices {
        return Err(WalkError::NoMarkedPair(k_marked));
    }
    let worst_case =
        pair_count(n_vertices as u64) - pair_count(k_marked as u64) + 1;
    match strategy {
        ClassicalStrategy::DeterministicScan => Ok(ClassicalEstimate {
            expected_queries: deterministic_scan_expected_queries(n_vertices, k_marked)?,
            std_error: 0.0,
            worst_case,
        }),
        ClassicalStrategy::RandomPairs => {
            if trials == 0 {
                return Err(WalkError::invalid("trials", "must be positive"));
            }
            let f = OracleFunction::new(n_vertices, 0..k_marked);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ledger = QueryLedger::default();
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..trials {
                let q = random_pair_search(&f, &mut rng, &mut ledger) as f64;
                sum += q;
                sum_sq += q * q;
            }
            let mean = sum / trials as f64;
            let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
            Ok(ClassicalEstimate {
                expected_queries: mean,
                std_error: (var / trials as f64).sqrt(),
                worst_case,
            })
        }
    }
}

/// Decodes the `index`-th unordered pair `(a, b)`, `a < b`, in row-major order.
fn pair_at(n: usize, index: u64) -> (usize, usize) {
    let mut a = 0;
    let mut offset = index;
    loop {
        let row = (n - 1 - a) as u64;
        if offset < row {
            return (a, a + 1 + offset as usize);
        }
        offset -= row;
        a += 1;
    }
}

/// Queries distinct random pairs (lazy Fisher-Yates) until `f` returns 1.
/// Returns the number of queries made.
pub fn random_pair_search(f: &OracleFunction, rng: &mut impl Rng, ledger: &mut QueryLedger) -> u64 {
    let n = f.n_vertices();
    let total = pair_count(n as u64);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    for i in 0..total {
        let j = rng.random_range(i..total);
        let pick = *swapped.get(&j).unwrap_or(&j);
        let displaced = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, displaced);
        let (a, b) = pair_at(n, pick);
        ledger.classical_calls += 1;
        if f.eval(a, b) == 1 {
            return i + 1;
        }
    }
    total
}
