//! Exact four-dimensional model of the walk started from the uniform state.
//!
//! The span of
//!
//! * `w1`: edges from unmarked to marked vertices,
//! * `w2`: edges from marked to unmarked vertices,
//! * `w3`: edges between unmarked vertices,
//! * `w4`: edges between marked vertices,
//!
//! each a normalized uniform superposition, is invariant under the step
//! operator and contains the initial state. Requires `N >= 4` and
//! `2 <= K <= N-2` so that every class is nonempty.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::walk::{coefficients, edge_endpoints, StateVector, WalkConfig};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Above this value of `sqrt(x)` the asymptotic formula is flagged unreliable.
pub const ASYMPTOTIC_WARN_SQRT_X: f64 = 0.2;

fn check_range(n_vertices: usize, k_marked: usize) -> Result<()> {
    if n_vertices < 4 || k_marked < 2 || k_marked + 2 > n_vertices {
        return Err(WalkError::ReducedRange {
            n_vertices,
            k_marked,
        });
    }
    Ok(())
}

/// Which basis vector an edge contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    IntoMarked,
    OutOfMarked,
    Unmarked,
    Marked,
}

impl EdgeClass {
    pub fn of(config: &WalkConfig, from: usize, to: usize) -> Self {
        match (config.is_marked(from), config.is_marked(to)) {
            (false, true) => EdgeClass::IntoMarked,
            (true, false) => EdgeClass::OutOfMarked,
            (false, false) => EdgeClass::Unmarked,
            (true, true) => EdgeClass::Marked,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Number of directed edges in each class, in `w1..w4` order.
pub fn class_sizes(n_vertices: usize, k_marked: usize) -> [usize; 4] {
    let (n, k) = (n_vertices, k_marked);
    [
        k * (n - k),
        k * (n - k),
        (n - k) * (n - k).saturating_sub(1),
        k * k.saturating_sub(1),
    ]
}

/// Amplitudes `(c1, c2, c3, c4)` on `w1..w4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub amplitudes: Vector4<Complex64>,
}

impl ReducedState {
    pub fn new(c: [Complex64; 4]) -> Self {
        ReducedState {
            amplitudes: Vector4::from(c),
        }
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Self::new(c.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn component(&self, i: usize) -> Complex64 {
        self.amplitudes[i]
    }

    /// `|c_i|^2` for each basis vector.
    pub fn weights(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.amplitudes[i].norm_sqr())
    }

    /// Weight on `w4`, i.e. the probability of measuring a marked edge.
    pub fn marked_weight(&self) -> f64 {
        self.amplitudes[3].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.weights().iter().sum()
    }

    pub fn max_abs_diff(&self, other: &ReducedState) -> f64 {
        (self.amplitudes - other.amplitudes)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// The step operator restricted to the invariant subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOperator {
    pub matrix: Matrix4<Complex64>,
    pub n_vertices: usize,
    pub k_marked: usize,
    pub phase: f64,
}

impl ReducedOperator {
    pub fn apply(&self, state: &ReducedState) -> ReducedState {
        ReducedState {
            amplitudes: self.matrix * state.amplitudes,
        }
    }

    /// Largest entry of `M^dagger M - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

fn unitarity_deviation(m: &Matrix4<Complex64>) -> f64 {
    (m.adjoint() * m - Matrix4::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Builds the 4x4 reduced step operator; column `i` is `U w_{i+1}`.
pub fn reduced_operator(n_vertices: usize, k_marked: usize, phase: f64) -> Result<ReducedOperator> {
    check_range(n_vertices, k_marked)?;
    let cf = coefficients(n_vertices)?;
    let (t, r) = (cf.transmission, cf.reflection);
    let (n, k) = (n_vertices as f64, k_marked as f64);
    let e1 = Complex64::from_polar(1.0, phase);
    let e2 = Complex64::from_polar(1.0, 2.0 * phase);
    let to_marked = t * ((k - 1.0) * (n - k)).sqrt();
    let to_unmarked = t * (k * (n - k - 1.0)).sqrt();
    let re = |x: f64| Complex64::new(x, 0.0);

    let mut m = Matrix4::from_element(ZERO);
    // U w1
    m[(1, 0)] = re(r - (k - 2.0) * t);
    m[(3, 0)] = e1 * to_marked;
    // U w2
    m[(0, 1)] = re((k - 1.0) * t - r);
    m[(2, 1)] = re(to_unmarked);
    // U w3
    m[(0, 2)] = re(to_unmarked);
    m[(2, 2)] = re(r - t * (k - 1.0));
    // U w4
    m[(1, 3)] = e1 * to_marked;
    m[(3, 3)] = e2 * (t * (k - 2.0) - r);

    Ok(ReducedOperator {
        matrix: m,
        n_vertices,
        k_marked,
        phase,
    })
}

/// Coordinates of the uniform initial state in the `w` basis.
pub fn reduced_initial_state(n_vertices: usize, k_marked: usize) -> Result<ReducedState> {
    check_range(n_vertices, k_marked)?;
    let (n, k) = (n_vertices as f64, k_marked as f64);
    let total = n * (n - 1.0);
    let cross = (k * (n - k) / total).sqrt();
    Ok(ReducedState::from_real([
        cross,
        cross,
        ((n - k) * (n - k - 1.0) / total).sqrt(),
        (k * (k - 1.0) / total).sqrt(),
    ]))
}

/// Overlaps `<w_i|state>` and the norm of the component outside the subspace.
pub fn project(state: &StateVector, config: &WalkConfig) -> Result<(ReducedState, f64)> {
    check_range(config.n_vertices(), config.k_marked())?;
    if state.n_vertices() != config.n_vertices() {
        return Err(WalkError::DimensionMismatch {
            expected: config.dimension(),
            got: state.len(),
        });
    }
    let n = config.n_vertices();
    let sizes = class_sizes(n, config.k_marked());
    let mut sums = [ZERO; 4];
    let classes: Vec<usize> = (0..state.len())
        .map(|i| {
            let (a, b) = edge_endpoints(n, i);
            EdgeClass::of(config, a, b).index()
        })
        .collect();
    for (amp, &class) in state.amplitudes().iter().zip(&classes) {
        sums[class] += amp;
    }
    let norms = sizes.map(|s| (s as f64).sqrt());
    let coords = [0, 1, 2, 3].map(|i| sums[i] / norms[i]);
    // per-edge amplitude of the in-subspace part of each class
    let uniform = [0, 1, 2, 3].map(|i| coords[i] / norms[i]);
    let residual = state
        .amplitudes()
        .iter()
        .zip(&classes)
        .map(|(amp, &class)| (amp - uniform[class]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((ReducedState::new(coords), residual))
}

/// `sum_i c_i |w_i>` as a full edge-space state.
pub fn embed(reduced: &ReducedState, config: &WalkConfig) -> Result<StateVector> {
    check_range(config.n_vertices(), config.k_marked())?;
    let n = config.n_vertices();
    let sizes = class_sizes(n, config.k_marked());
    let per_edge = [0, 1, 2, 3].map(|i| reduced.amplitudes[i] / (sizes[i] as f64).sqrt());
    let amps = (0..config.dimension())
        .map(|i| {
            let (a, b) = edge_endpoints(n, i);
            per_edge[EdgeClass::of(config, a, b).index()]
        })
        .collect();
    StateVector::from_amplitudes(n, amps)
}

/// Eigen-decomposition of a reduced step operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// Unit-modulus eigenvalues.
    pub eigenvalues: [Complex64; 4],
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: Matrix4<Complex64>,
    /// `<eigenvector_mu | psi_init>` for the uniform initial state, when the
    /// operator came from a valid `(N, K)`.
    pub overlaps: Option<[Complex64; 4]>,
}

impl SpectralDecomposition {
    /// `U^steps * state` as `sum_mu lambda_mu^steps <mu|state> |mu>`.
    pub fn evolve(&self, state: &ReducedState, steps: u64) -> ReducedState {
        let coeffs = self.eigenvectors.adjoint() * state.amplitudes;
        let mut scaled = coeffs;
        for mu in 0..4 {
            let lambda = self.eigenvalues[mu];
            let power = Complex64::from_polar(
                lambda.norm().powf(steps as f64),
                lambda.arg() * steps as f64,
            );
            scaled[mu] = coeffs[mu] * power;
        }
        ReducedState {
            amplitudes: self.eigenvectors * scaled,
        }
    }
}

/// Tolerance on `|lambda| - 1` (and on the Schur off-diagonal) before an
/// input is rejected as non-unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-8;

pub fn spectral_decompose(op: &ReducedOperator) -> Result<SpectralDecomposition> {
    let mut spectral = decompose_matrix(&op.matrix)?;
    spectral.overlaps = reduced_initial_state(op.n_vertices, op.k_marked)
        .ok()
        .map(|init| {
            let o = spectral.eigenvectors.adjoint() * init.amplitudes;
            [o[0], o[1], o[2], o[3]]
        });
    Ok(spectral)
}

/// Schur form of a normal matrix is diagonal with a unitary `Q`, which also
/// gives an orthonormal basis inside degenerate eigenspaces.
pub fn decompose_matrix(matrix: &Matrix4<Complex64>) -> Result<SpectralDecomposition> {
    if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(WalkError::NotUnitary(f64::NAN));
    }
    let (q, t) = matrix.schur().unpack();
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        worst = worst.max((t[(i, i)].norm() - 1.0).abs());
        for j in (i + 1)..4 {
            worst = worst.max(t[(i, j)].norm());
        }
    }
    if worst > UNITARY_TOLERANCE {
        return Err(WalkError::NotUnitary(worst));
    }
    Ok(SpectralDecomposition {
        eigenvalues: [t[(0, 0)], t[(1, 1)], t[(2, 2)], t[(3, 3)]],
        eigenvectors: q,
        overlaps: None,
    })
}

/// `op^steps * state` through the spectral decomposition.
pub fn evolve_reduced(
    state: &ReducedState,
    op: &ReducedOperator,
    steps: u64,
) -> Result<ReducedState> {
    if steps == 0 {
        return Ok(*state);
    }
    Ok(spectral_decompose(op)?.evolve(state, steps))
}

/// `|c4|^2` for steps `0..=steps` from the uniform initial state.
pub fn marked_curve(n_vertices: usize, k_marked: usize, phase: f64, steps: u64) -> Result<Vec<f64>> {
    let op = reduced_operator(n_vertices, k_marked, phase)?;
    let spectral = spectral_decompose(&op)?;
    let init = reduced_initial_state(n_vertices, k_marked)?;
    Ok((0..=steps)
        .map(|n| spectral.evolve(&init, n).marked_weight())
        .collect())
}

/// `x = sqrt(K(K-1))/(N-1)` and the localization time `round(pi/(4x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub x: f64,
    pub n_opt: u64,
}

pub fn asymptotic_params(n_vertices: usize, k_marked: usize) -> Result<AsymptoticParams> {
    check_range(n_vertices, k_marked)?;
    let x = ((k_marked * (k_marked - 1)) as f64).sqrt() / (n_vertices as f64 - 1.0);
    let n_opt = (PI / (4.0 * x)).round_ties_even() as u64;
    Ok(AsymptoticParams { x, n_opt })
}

/// Large-`N` approximation `(0, 0, cos 2xn, i sin 2xn)` at phase `pi/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimate {
    pub state: ReducedState,
    pub x: f64,
    /// `false` when `sqrt(x)` exceeds [`ASYMPTOTIC_WARN_SQRT_X`].
    pub reliable: bool,
}

pub fn asymptotic_amplitudes(n_vertices: usize, k_marked: usize, steps: u64) -> AsymptoticEstimate {
    let x = ((k_marked * k_marked.saturating_sub(1)) as f64).sqrt()
        / (n_vertices.max(2) as f64 - 1.0);
    let angle = 2.0 * x * steps as f64;
    AsymptoticEstimate {
        state: ReducedState::new([
            ZERO,
            ZERO,
            Complex64::new(angle.cos(), 0.0),
            Complex64::new(0.0, angle.sin()),
        ]),
        x,
        reliable: x.sqrt() <= ASYMPTOTIC_WARN_SQRT_X,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// `round(pi/(4x))`, ties to even.
    Formula,
    /// Brute-force argmax of `|c4(n)|^2` at phase `pi/2` for `n <= horizon`
    /// (default `2 * formula`).
    Scan { horizon: Option<u64> },
}

pub fn optimal_steps(n_vertices: usize, k_marked: usize, mode: StepMode) -> Result<u64> {
    let formula = asymptotic_params(n_vertices, k_marked)?.n_opt;
    match mode {
        StepMode::Formula => Ok(formula),
        StepMode::Scan { horizon } => {
            let horizon = horizon.unwrap_or(2 * formula);
            if horizon < 2 * formula {
                return Err(WalkError::invalid(
                    "scan_horizon",
                    format!("must be at least {}, got {horizon}", 2 * formula),
                ));
            }
            Ok(scan_peak(n_vertices, k_marked, FRAC_PI_2, horizon)?.0)
        }
    }
}

/// First step in `0..=horizon` maximizing `|c4|^2`, with that probability.
pub fn scan_peak(n_vertices: usize, k_marked: usize, phase: f64, horizon: u64) -> Result<(u64, f64)> {
    let curve = marked_curve(n_vertices, k_marked, phase, horizon)?;
    let mut best = (0, curve[0]);
    for (n, &p) in curve.iter().enumerate() {
        if p > best.1 {
            best = (n as u64, p);
        }
    }
    Ok(best)
}
