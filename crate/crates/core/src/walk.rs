//! Full edge-space scattering walk on the complete graph `K_N`.
//!
//! Basis states are directed edges `|m,l>` (walker travelling from `m` to
//! `l`), stored at canonical index `m*(N-1) + (l if l < m else l-1)`.
//!
//! One step is `D * U0 * D`, where `U0` applies the Grover-type local
//! scattering at every vertex and `D` multiplies each marked directed edge by
//! `e^{i phi}`. Entering or leaving a marked edge therefore picks up
//! `e^{i phi}` and reflecting back into one picks up `e^{2 i phi}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Canonical index of the directed edge `from -> to`.
#[inline]
pub fn edge_index(n_vertices: usize, from: usize, to: usize) -> usize {
    debug_assert!(from != to && from < n_vertices && to < n_vertices);
    from * (n_vertices - 1) + if to < from { to } else { to - 1 }
}

/// Inverse of [`edge_index`].
#[inline]
pub fn edge_endpoints(n_vertices: usize, index: usize) -> (usize, usize) {
    let from = index / (n_vertices - 1);
    let slot = index % (n_vertices - 1);
    let to = if slot < from { slot } else { slot + 1 };
    (from, to)
}

fn check_vertices(n_vertices: usize) -> Result<()> {
    if n_vertices < 3 {
        return Err(WalkError::TooFewVertices(n_vertices));
    }
    Ok(())
}

/// Graph size, marked vertex set and phase shift.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    n_vertices: usize,
    marked: Vec<usize>,
    is_marked: Vec<bool>,
    phase: f64,
}

impl WalkConfig {
    pub fn new(
        n_vertices: usize,
        marked: impl IntoIterator<Item = usize>,
        phase: f64,
    ) -> Result<Self> {
        check_vertices(n_vertices)?;
        if !phase.is_finite() {
            return Err(WalkError::invalid("phase", "must be finite"));
        }
        let mut is_marked = vec![false; n_vertices];
        let mut list = Vec::new();
        for v in marked {
            if v >= n_vertices {
                return Err(WalkError::MarkedOutOfRange {
                    vertex: v,
                    n_vertices,
                });
            }
            if is_marked[v] {
                return Err(WalkError::DuplicateMarked(v));
            }
            is_marked[v] = true;
            list.push(v);
        }
        list.sort_unstable();
        Ok(WalkConfig {
            n_vertices,
            marked: list,
            is_marked,
            phase,
        })
    }

    /// Marks vertices `0..k_marked`.
    pub fn with_first_marked(n_vertices: usize, k_marked: usize, phase: f64) -> Result<Self> {
        if k_marked > n_vertices {
            return Err(WalkError::MarkedOutOfRange {
                vertex: k_marked.saturating_sub(1),
                n_vertices,
            });
        }
        Self::new(n_vertices, 0..k_marked, phase)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn k_marked(&self) -> usize {
        self.marked.len()
    }

    /// Marked vertices in ascending order.
    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn is_marked(&self, vertex: usize) -> bool {
        self.is_marked.get(vertex).copied().unwrap_or(false)
    }

    pub fn is_marked_edge(&self, from: usize, to: usize) -> bool {
        self.is_marked(from) && self.is_marked(to)
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn dimension(&self) -> usize {
        self.n_vertices * (self.n_vertices - 1)
    }
}

/// Real transmission and reflection amplitudes of the local scattering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoefficients {
    pub transmission: f64,
    pub reflection: f64,
}

/// `t = 2/(N-1)`, `r = 1 - t`.
pub fn coefficients(n_vertices: usize) -> Result<ScatteringCoefficients> {
    check_vertices(n_vertices)?;
    let transmission = 2.0 / (n_vertices as f64 - 1.0);
    Ok(ScatteringCoefficients {
        transmission,
        reflection: 1.0 - transmission,
    })
}

/// Complex amplitudes over all `N(N-1)` directed edge states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_vertices: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(n_vertices: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_vertices(n_vertices)?;
        let expected = n_vertices * (n_vertices - 1);
        if amplitudes.len() != expected {
            return Err(WalkError::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(StateVector {
            n_vertices,
            amplitudes,
        })
    }

    pub fn zeros(n_vertices: usize) -> Result<Self> {
        check_vertices(n_vertices)?;
        Ok(StateVector {
            n_vertices,
            amplitudes: vec![Complex64::new(0.0, 0.0); n_vertices * (n_vertices - 1)],
        })
    }

    /// The single edge state `|from,to>`.
    pub fn basis(n_vertices: usize, from: usize, to: usize) -> Result<Self> {
        let mut state = Self::zeros(n_vertices)?;
        if from == to || from >= n_vertices || to >= n_vertices {
            return Err(WalkError::invalid(
                "edge",
                format!("({from},{to}) is not an edge of K_{n_vertices}"),
            ));
        }
        state.amplitudes[edge_index(n_vertices, from, to)] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, from: usize, to: usize) -> Complex64 {
        self.amplitudes[edge_index(self.n_vertices, from, to)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            for a in &mut self.amplitudes {
                *a /= norm;
            }
        }
    }

    /// Largest componentwise distance to `other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_against(&self, config: &WalkConfig) -> Result<()> {
        if self.n_vertices != config.n_vertices {
            return Err(WalkError::DimensionMismatch {
                expected: config.dimension(),
                got: self.amplitudes.len(),
            });
        }
        if self.amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(WalkError::NonFinite);
        }
        Ok(())
    }
}

/// Uniform superposition of every directed edge state.
pub fn initial_state(n_vertices: usize) -> Result<StateVector> {
    check_vertices(n_vertices)?;
    let dim = n_vertices * (n_vertices - 1);
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    Ok(StateVector {
        n_vertices,
        amplitudes: vec![amp; dim],
    })
}

/// Multiplies the amplitude of every marked directed edge by `e^{i phi}`.
pub fn apply_phase_shifts(state: &mut StateVector, config: &WalkConfig) {
    let factor = Complex64::from_polar(1.0, config.phase);
    let n = config.n_vertices;
    for &a in &config.marked {
        for &b in &config.marked {
            if a != b {
                state.amplitudes[edge_index(n, a, b)] *= factor;
            }
        }
    }
}

/// Matrix-free unmarked scattering `out = U0 * input`.
///
/// With `A_l` the total amplitude arriving at `l`,
/// `out[l,m] = t*A_l - (r+t)*in[m,l]`.
fn scatter_into(
    input: &[Complex64],
    output: &mut [Complex64],
    arriving: &mut [Complex64],
    n: usize,
    coeffs: ScatteringCoefficients,
) {
    let t = coeffs.transmission;
    let back = coeffs.reflection + coeffs.transmission;
    arriving.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    for from in 0..n {
        let row = &input[from * (n - 1)..(from + 1) * (n - 1)];
        for (slot, amp) in row.iter().enumerate() {
            let to = if slot < from { slot } else { slot + 1 };
            arriving[to] += amp;
        }
    }
    for at in 0..n {
        let total = arriving[at] * t;
        let row = &mut output[at * (n - 1)..(at + 1) * (n - 1)];
        for (slot, out) in row.iter_mut().enumerate() {
            let next = if slot < at { slot } else { slot + 1 };
            *out = total - input[edge_index(n, next, at)] * back;
        }
    }
}

/// `U0 * state` for the walk without any phase shifters.
pub fn apply_unmarked_scattering(state: &StateVector) -> Result<StateVector> {
    let coeffs = coefficients(state.n_vertices)?;
    let mut out = StateVector::zeros(state.n_vertices)?;
    let mut arriving = vec![Complex64::new(0.0, 0.0); state.n_vertices];
    scatter_into(
        &state.amplitudes,
        &mut out.amplitudes,
        &mut arriving,
        state.n_vertices,
        coeffs,
    );
    Ok(out)
}

/// One step `D * U0 * D` with explicitly supplied scattering coefficients.
///
/// Only [`apply_step`] is guaranteed unitary; this entry point exists so that
/// verification suites can exercise perturbed coefficients.
pub fn apply_step_with(
    state: &StateVector,
    config: &WalkConfig,
    coeffs: ScatteringCoefficients,
) -> Result<StateVector> {
    state.check_against(config)?;
    let mut shifted = state.clone();
    apply_phase_shifts(&mut shifted, config);
    let mut out = StateVector::zeros(config.n_vertices)?;
    let mut arriving = vec![Complex64::new(0.0, 0.0); config.n_vertices];
    scatter_into(
        &shifted.amplitudes,
        &mut out.amplitudes,
        &mut arriving,
        config.n_vertices,
        coeffs,
    );
    apply_phase_shifts(&mut out, config);
    Ok(out)
}

/// One step of the marked walk.
pub fn apply_step(state: &StateVector, config: &WalkConfig) -> Result<StateVector> {
    apply_step_with(state, config, coefficients(config.n_vertices)?)
}

/// `U^steps * state`.
pub fn evolve(state: &StateVector, config: &WalkConfig, steps: usize) -> Result<StateVector> {
    state.check_against(config)?;
    let coeffs = coefficients(config.n_vertices)?;
    let n = config.n_vertices;
    let mut current = state.clone();
    let mut next = StateVector::zeros(n)?;
    let mut arriving = vec![Complex64::new(0.0, 0.0); n];
    // D*U0*D applied repeatedly: the inner D*D pairs collapse into one pass
    // with twice the phase, so only the two ends need a single shift.
    let mut doubled = config.clone();
    doubled.phase = 2.0 * config.phase;
    for step in 0..steps {
        if step == 0 {
            apply_phase_shifts(&mut current, config);
        } else {
            apply_phase_shifts(&mut current, &doubled);
        }
        scatter_into(
            &current.amplitudes,
            &mut next.amplitudes,
            &mut arriving,
            n,
            coeffs,
        );
        std::mem::swap(&mut current, &mut next);
    }
    if steps > 0 {
        apply_phase_shifts(&mut current, config);
    }
    Ok(current)
}

/// Probability that a position measurement finds the walker on a marked edge.
pub fn marked_probability(state: &StateVector, config: &WalkConfig) -> Result<f64> {
    state.check_against(config)?;
    let n = config.n_vertices;
    let mut total = 0.0;
    for &a in &config.marked {
        for &b in &config.marked {
            if a != b {
                total += state.amplitudes[edge_index(n, a, b)].norm_sqr();
            }
        }
    }
    Ok(total)
}

/// Assembles the dense matrix of a linear map on the edge space by applying
/// it to every basis state.
pub fn assemble_dense<F>(n_vertices: usize, mut map: F) -> Result<DMatrix<Complex64>>
where
    F: FnMut(&StateVector) -> Result<StateVector>,
{
    check_vertices(n_vertices)?;
    let dim = n_vertices * (n_vertices - 1);
    let mut matrix = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (from, to) = edge_endpoints(n_vertices, col);
        let image = map(&StateVector::basis(n_vertices, from, to)?)?;
        for (row, amp) in image.amplitudes.iter().enumerate() {
            matrix[(row, col)] = *amp;
        }
    }
    Ok(matrix)
}

/// Dense `N(N-1) x N(N-1)` matrix of [`apply_step`].
pub fn dense_operator(config: &WalkConfig) -> Result<DMatrix<Complex64>> {
    assemble_dense(config.n_vertices, |s| apply_step(s, config))
}
