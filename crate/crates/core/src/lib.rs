//! Scattering quantum walk search on complete graphs.
//!
//! The walker lives on the directed edges of the complete graph `K_N`. Edges
//! internal to a marked vertex set carry phase shifters, and with a phase of
//! `pi/2` the walker localizes on the marked edges after `O(N/K)` steps.
//!
//! * [`walk`]: full edge-space state and the matrix-free step operator.
//! * [`reduced`]: the exact four-dimensional invariant-subspace model.
//! * [`oracle`]: the oracle circuit (phase kickback, two calls per step) and
//!   classical query baselines.
//! * [`stats`]: measurement sampling, search runs and multi-run coverage.

pub mod error;
pub mod oracle;
pub mod reduced;
pub mod stats;
pub mod walk;

pub use error::{Result, WalkError};
pub use num_complex::Complex64;
pub use oracle::{
    apply_oracle, classical_query_baseline, conjugated_oracle, oracle_step, Ancilla,
    ClassicalEstimate, ClassicalStrategy, CompositeState, OracleFunction, QueryLedger,
};
pub use reduced::{
    asymptotic_amplitudes, embed, evolve_reduced, optimal_steps, project, reduced_initial_state,
    reduced_operator, spectral_decompose, ReducedOperator, ReducedState, SpectralDecomposition,
    StepMode,
};
pub use stats::{
    coverage_distribution, expected_runs_to_cover, run_search, sample_measurement,
    CoverageDistribution, CoverageMode, RunOutcome,
};
pub use walk::{
    apply_step, coefficients, evolve, initial_state, marked_probability, ScatteringCoefficients,
    StateVector, WalkConfig,
};
