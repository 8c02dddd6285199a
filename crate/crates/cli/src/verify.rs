//! `walk verify`: runs the invariant suites and reports pass/fail per suite.

use std::f64::consts::{FRAC_PI_2, PI};

use num::{BigInt, BigRational};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use scatterwalk::reduced::{embed, ReducedState};
use scatterwalk::stats::expected_runs_to_cover_exact;
use scatterwalk::walk::{apply_step_with, assemble_dense, coefficients, ScatteringCoefficients};
use scatterwalk::{
    coverage_distribution, evolve_reduced, initial_state, optimal_steps, oracle_step, project,
    reduced_initial_state, reduced_operator, CoverageMode, OracleFunction, QueryLedger,
    StateVector, StepMode, WalkConfig,
};

use crate::args::{Fault, Profile, VerifyArgs};
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub unitarity: f64,
    pub fixed_point: f64,
    pub dense: f64,
    pub projection: f64,
    pub closure: f64,
    pub circuit: f64,
    pub max_dense_n: usize,
    pub max_circuit_n: usize,
}

impl Tolerances {
    pub fn for_profile(profile: Profile) -> Self {
        let base = Tolerances {
            unitarity: 1e-12,
            fixed_point: 1e-13,
            dense: 1e-12,
            projection: 1e-12,
            closure: 1e-10,
            circuit: 1e-13,
            max_dense_n: 8,
            max_circuit_n: 8,
        };
        match profile {
            Profile::Default => base,
            Profile::Strict => Tolerances {
                unitarity: base.unitarity / 10.0,
                fixed_point: base.fixed_point / 10.0,
                dense: base.dense / 10.0,
                projection: base.projection / 10.0,
                closure: base.closure / 10.0,
                circuit: base.circuit / 10.0,
                max_dense_n: 12,
                max_circuit_n: 10,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The step operator under test, optionally with a deliberate defect.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    fault: Option<Fault>,
}

impl Stepper {
    fn coefficients(&self, n: usize) -> ScatteringCoefficients {
        let mut c = coefficients(n).expect("n >= 3");
        if let Some(Fault::ReflectionSum) = self.fault {
            c.reflection += 1e-3;
        }
        c
    }

    fn step(&self, state: &StateVector, config: &WalkConfig) -> StateVector {
        apply_step_with(state, config, self.coefficients(config.n_vertices())).expect("valid state")
    }
}

fn phase_name(phi: f64) -> &'static str {
    if phi == 0.0 {
        "0"
    } else if phi == FRAC_PI_2 {
        "pi/2"
    } else if phi == PI {
        "pi"
    } else {
        "other"
    }
}

fn case(n: usize, k: usize, phi: f64) -> String {
    format!("N={n} K={k} phi={}", phase_name(phi))
}

fn max_norm<'a>(it: impl Iterator<Item = &'a Complex64>) -> f64 {
    it.map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..n * (n - 1))
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let mut s = StateVector::from_amplitudes(n, amps).expect("dimension");
    s.normalize();
    s
}

const PHASES: [f64; 3] = [0.0, FRAC_PI_2, PI];

/// Checks cases in order and stops at the first failure.
fn suite<I>(name: &'static str, cases: I) -> SuiteReport
where
    I: IntoIterator<Item = (String, f64, f64)>,
{
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (label, deviation, tol) in cases {
        count += 1;
        if deviation.is_nan() || deviation > tol {
            return SuiteReport {
                name,
                passed: false,
                detail: format!("{label}: deviation {deviation:.3e} exceeds {tol:.0e}"),
            };
        }
        worst = worst.max(deviation);
    }
    SuiteReport {
        name,
        passed: true,
        detail: format!("{count} cases, worst deviation {worst:.3e}"),
    }
}

fn unitarity(stepper: Stepper, tol: &Tolerances) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x756e);
    let mut cases = Vec::new();
    for n in [3, 5, 10, 50, 200] {
        for k in [0, 2, 3] {
            for phi in PHASES {
                let cfg = WalkConfig::with_first_marked(n, k, phi).expect("valid config");
                let worst = (0..100)
                    .map(|_| (stepper.step(&random_state(n, &mut rng), &cfg).norm() - 1.0).abs())
                    .fold(0.0, f64::max);
                cases.push((case(n, k, phi), worst, tol.unitarity));
            }
        }
    }
    suite("unitarity", cases)
}

fn fixed_point(stepper: Stepper, tol: &Tolerances) -> SuiteReport {
    let cases = [3, 5, 10, 50, 200].map(|n| {
        let cfg = WalkConfig::with_first_marked(n, 0, 0.0).expect("valid config");
        let s = initial_state(n).expect("n >= 3");
        (case(n, 0, 0.0), stepper.step(&s, &cfg).max_abs_diff(&s), tol.fixed_point)
    });
    suite("fixed_point", cases)
}

fn dense_unitarity(stepper: Stepper, tol: &Tolerances) -> SuiteReport {
    let mut cases = Vec::new();
    for n in 3..=tol.max_dense_n {
        for k in [0, 2, 3] {
            for phi in PHASES {
                let cfg = WalkConfig::with_first_marked(n, k, phi).expect("valid config");
                let u = assemble_dense(n, |s| Ok(stepper.step(s, &cfg))).expect("dense");
                let gram = u.adjoint() * &u;
                let deviation = gram
                    .iter()
                    .enumerate()
                    .map(|(idx, z)| {
                        let diagonal = idx % gram.nrows() == idx / gram.nrows();
                        (z - if diagonal { 1.0 } else { 0.0 }).norm()
                    })
                    .fold(0.0, f64::max);
                cases.push((case(n, k, phi), deviation, tol.dense));
            }
        }
    }
    suite("dense_unitarity", cases)
}

fn projection_consistency(stepper: Stepper, tol: &Tolerances) -> SuiteReport {
    let mut cases = Vec::new();
    for n in 4..=tol.max_dense_n.max(9) {
        for k in 2..=n - 2 {
            for phi in PHASES {
                let cfg = WalkConfig::with_first_marked(n, k, phi).expect("valid config");
                let op = reduced_operator(n, k, phi).expect("valid range");
                let mut worst: f64 = 0.0;
                for col in 0..4 {
                    let mut e = [0.0; 4];
                    e[col] = 1.0;
                    let w = embed(&ReducedState::from_real(e), &cfg).expect("embed");
                    let (image, residual) = project(&stepper.step(&w, &cfg), &cfg).expect("project");
                    worst = worst.max(residual);
                    for row in 0..4 {
                        worst = worst.max((image.component(row) - op.matrix[(row, col)]).norm());
                    }
                }
                cases.push((case(n, k, phi), worst, tol.projection));
            }
        }
    }
    suite("projection_consistency", cases)
}

fn subspace_closure(stepper: Stepper, tol: &Tolerances) -> SuiteReport {
    let (n, k, phi) = (30, 3, FRAC_PI_2);
    let cfg = WalkConfig::with_first_marked(n, k, phi).expect("valid config");
    let op = reduced_operator(n, k, phi).expect("valid range");
    let init = reduced_initial_state(n, k).expect("valid range");
    let mut state = initial_state(n).expect("n >= 3");
    let mut cases = Vec::new();
    for step in 1..=200u64 {
        state = stepper.step(&state, &cfg);
        if step % 20 == 0 {
            let (proj, residual) = project(&state, &cfg).expect("project");
            let reduced = evolve_reduced(&init, &op, step).expect("spectral");
            let deviation = residual.max(proj.max_abs_diff(&reduced));
            cases.push((format!("{} step={step}", case(n, k, phi)), deviation, tol.closure));
        }
    }
    suite("subspace_closure", cases)
}

fn circuit_isomorphism(stepper: Stepper, tol: &Tolerances) -> SuiteReport {
    let mut cases = Vec::new();
    for n in 3..=tol.max_circuit_n {
        for k in [0, 2, 3] {
            let cfg = WalkConfig::with_first_marked(n, k, FRAC_PI_2).expect("valid config");
            let f = OracleFunction::from_config(&cfg);
            let mut ledger = QueryLedger::default();
            let circuit = assemble_dense(n, |s| oracle_step(s, &f, &mut ledger)).expect("dense");
            let walk = assemble_dense(n, |s| Ok(stepper.step(s, &cfg))).expect("dense");
            let calls_ok = ledger.quantum_calls == 2 * (n * (n - 1)) as u64;
            let deviation = if calls_ok {
                max_norm((circuit - walk).iter())
            } else {
                f64::INFINITY
            };
            cases.push((case(n, k, FRAC_PI_2), deviation, tol.circuit));
        }
    }
    suite("circuit_isomorphism", cases)
}

fn reference_numbers() -> SuiteReport {
    let frac = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let mut failures = Vec::new();
    let coverage = [
        (3, 2, 3, frac(2, 3)),
        (3, 3, 3, frac(8, 9)),
        (4, 2, 4, frac(1, 6)),
        (4, 2, 3, frac(2, 3)),
        (4, 3, 4, frac(19, 36)),
        (4, 3, 3, frac(4, 9)),
    ];
    for (k, runs, j, expected) in coverage {
        let got = coverage_distribution(k, runs, &CoverageMode::exact())
            .ok()
            .and_then(|d| d.exact_probability(j));
        if got.as_ref() != Some(&expected) {
            failures.push(format!("K={k} runs={runs} j={j}: got {got:?}, expected {expected}"));
        }
    }
    if expected_runs_to_cover_exact(3).ok() != Some(frac(5, 2)) {
        failures.push("expected runs K=3 != 5/2".to_string());
    }
    for (n, expected) in [(101, 56), (1000, 555), (50, 27)] {
        let got = optimal_steps(n, 2, StepMode::Formula).ok();
        if got != Some(expected) {
            failures.push(format!("n_opt N={n} K=2: got {got:?}, expected {expected}"));
        }
    }
    SuiteReport {
        name: "reference_numbers",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "coverage 2/3 8/9 1/6 2/3 19/36 4/9, expected runs 5/2, n_opt 56/555/27".to_string()
        } else {
            failures.join("; ")
        },
    }
}

pub fn run_suites(profile: Profile, fault: Option<Fault>) -> Vec<SuiteReport> {
    let tol = Tolerances::for_profile(profile);
    let stepper = Stepper { fault };
    vec![
        unitarity(stepper, &tol),
        fixed_point(stepper, &tol),
        dense_unitarity(stepper, &tol),
        projection_consistency(stepper, &tol),
        subspace_closure(stepper, &tol),
        circuit_isomorphism(stepper, &tol),
        reference_numbers(),
    ]
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let reports = run_suites(args.profile, args.inject_fault);
    for r in &reports {
        println!(
            "{} {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    match reports.iter().find(|r| !r.passed) {
        Some(first) => Err(CliError::Verification(format!("{}: {}", first.name, first.detail))),
        None => Ok(()),
    }
}
