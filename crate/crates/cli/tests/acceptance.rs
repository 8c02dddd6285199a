//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num::{BigInt, BigRational, ToPrimitive};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use scatterwalk::oracle::random_pairs_expected_queries;
use scatterwalk::reduced::{asymptotic_params, embed, marked_curve, scan_peak, ReducedState};
use scatterwalk::stats::{expected_runs_to_cover_exact, PreparedSearch, SearchEngine};
use scatterwalk::walk::{apply_unmarked_scattering, assemble_dense, dense_operator};
use scatterwalk::{
    apply_step, asymptotic_amplitudes, classical_query_baseline, coverage_distribution, evolve,
    evolve_reduced, initial_state, marked_probability, optimal_steps, oracle_step,
    reduced_initial_state, reduced_operator, run_search, ClassicalStrategy, CoverageMode,
    OracleFunction, QueryLedger, StateVector, StepMode, WalkConfig,
};

// Pre-registered with an independent numpy implementation of the reduced model.
const P_1000_AT_555: f64 = 0.998_003_255_701_086_5;
const ASYMPTOTIC_ERRORS: [(usize, f64); 4] = [
    (100, 0.029141),
    (300, 0.009806),
    (1000, 0.002952),
    (3000, 0.000985),
];
const PEAK_200_HALF_PI: f64 = 0.990195;
const PEAK_200_PI: f64 = 0.000452;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..n * (n - 1))
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let mut s = StateVector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

fn unitarity_and_fixed_point() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for n in [3, 5, 10, 50, 200] {
        for k in [0, 2, 3] {
            for phi in [0.0, FRAC_PI_2, PI] {
                let cfg = WalkConfig::with_first_marked(n, k, phi).unwrap();
                for _ in 0..100 {
                    let out = apply_step(&random_state(n, &mut rng), &cfg).unwrap();
                    let dev = (out.norm() - 1.0).abs();
                    ensure(dev <= 1e-12, || format!("norm deviation {dev:e} at N={n} K={k} phi={phi}"))?;
                    worst = worst.max(dev);
                }
            }
        }
    }
    let mut fixed: f64 = 0.0;
    for n in [3, 5, 10, 50, 200] {
        let s = initial_state(n).unwrap();
        let dev = apply_unmarked_scattering(&s).unwrap().max_abs_diff(&s);
        ensure(dev <= 1e-13, || format!("uniform state moved by {dev:e} at N={n}"))?;
        fixed = fixed.max(dev);
    }
    Ok(format!("norm deviation {worst:.1e}, fixed point deviation {fixed:.1e}"))
}

fn reduction_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 4..=12 {
        for k in 2..=n - 2 {
            for phi in [0.0, FRAC_PI_2, PI] {
                let cfg = WalkConfig::with_first_marked(n, k, phi).unwrap();
                let u = dense_operator(&cfg).unwrap();
                let op = reduced_operator(n, k, phi).unwrap();
                let w: Vec<StateVector> = (0..4)
                    .map(|i| {
                        let mut e = [0.0; 4];
                        e[i] = 1.0;
                        embed(&ReducedState::from_real(e), &cfg).unwrap()
                    })
                    .collect();
                let dim = n * (n - 1);
                for c in 0..4 {
                    let uw: Vec<Complex64> = (0..dim)
                        .map(|i| (0..dim).map(|j| u[(i, j)] * w[c].amplitudes()[j]).sum())
                        .collect();
                    for (r, wr) in w.iter().enumerate() {
                        let entry: Complex64 = wr
                            .amplitudes()
                            .iter()
                            .zip(&uw)
                            .map(|(a, b)| a.conj() * b)
                            .sum();
                        let dev = (entry - op.matrix[(r, c)]).norm();
                        ensure(dev <= 1e-12, || format!("entry ({r},{c}) off by {dev:e} at N={n} K={k} phi={phi}"))?;
                        worst = worst.max(dev);
                    }
                }
            }
        }
    }
    let cfg = WalkConfig::with_first_marked(30, 3, FRAC_PI_2).unwrap();
    let mut state = initial_state(30).unwrap();
    let mut residual: f64 = 0.0;
    for step in 1..=200 {
        state = apply_step(&state, &cfg).unwrap();
        let (_, r) = scatterwalk::project(&state, &cfg).unwrap();
        ensure(r < 1e-10, || format!("residual {r:e} at step {step}"))?;
        residual = residual.max(r);
    }
    Ok(format!("projection deviation {worst:.1e}, max residual {residual:.1e}"))
}

fn three_way_equivalence() -> Outcome {
    let (n, k) = (10, 2);
    let cfg = WalkConfig::with_first_marked(n, k, FRAC_PI_2).unwrap();
    let f = OracleFunction::from_config(&cfg);
    let mut ledger = QueryLedger::default();
    let walk = dense_operator(&cfg).unwrap();
    let circuit = assemble_dense(n, |s| oracle_step(s, &f, &mut ledger)).unwrap();
    let dense_dev = (&walk - &circuit).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure(dense_dev <= 1e-13, || format!("operators differ by {dense_dev:e}"))?;

    let op = reduced_operator(n, k, FRAC_PI_2).unwrap();
    let init = reduced_initial_state(n, k).unwrap();
    let mut state = initial_state(n).unwrap();
    let mut curve_dev: f64 = 0.0;
    for step in 1..=100u64 {
        state = evolve(&state, &cfg, 1).unwrap();
        let full = marked_probability(&state, &cfg).unwrap();
        let reduced = evolve_reduced(&init, &op, step).unwrap().marked_weight();
        let dev = (full - reduced).abs();
        ensure(dev <= 1e-10, || format!("p_marked differs by {dev:e} at step {step}"))?;
        curve_dev = curve_dev.max(dev);
    }
    Ok(format!("operator deviation {dense_dev:.1e}, p_marked deviation {curve_dev:.1e}"))
}

fn localization_and_optimal_steps() -> Outcome {
    let n_opt = optimal_steps(1000, 2, StepMode::Formula).unwrap();
    ensure(n_opt == 555, || format!("n_opt {n_opt} != 555"))?;
    let op = reduced_operator(1000, 2, FRAC_PI_2).unwrap();
    let p = evolve_reduced(&reduced_initial_state(1000, 2).unwrap(), &op, n_opt)
        .unwrap()
        .marked_weight();
    ensure(p > P_1000_AT_555 - 1e-9, || format!("p(555) = {p}"))?;
    let scan = optimal_steps(1000, 2, StepMode::Scan { horizon: None }).unwrap();
    ensure(scan.abs_diff(n_opt) <= 2, || format!("scan optimum {scan} vs formula {n_opt}"))?;

    let mut errors = Vec::new();
    for (n, frozen) in ASYMPTOTIC_ERRORS {
        let n_opt = asymptotic_params(n, 2).unwrap().n_opt;
        let curve = marked_curve(n, 2, FRAC_PI_2, 2 * n_opt).unwrap();
        let err = curve
            .iter()
            .enumerate()
            .map(|(step, p)| (p - asymptotic_amplitudes(n, 2, step as u64).state.marked_weight()).abs())
            .fold(0.0, f64::max);
        ensure((err - frozen).abs() < 1e-6, || format!("asymptotic error {err} at N={n}, expected {frozen}"))?;
        errors.push(err);
    }
    ensure(errors.windows(2).all(|w| w[1] < w[0]), || format!("errors not decreasing: {errors:?}"))?;
    Ok(format!("p(555) = {p:.16}, scan optimum {scan}, errors {errors:.6?}"))
}

fn exact_coverage_probabilities() -> Outcome {
    let frac = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let cases = [
        (3, 2, 3, frac(2, 3)),
        (3, 3, 3, frac(8, 9)),
        (4, 2, 4, frac(1, 6)),
        (4, 2, 3, frac(2, 3)),
        (4, 3, 4, frac(19, 36)),
        (4, 3, 3, frac(4, 9)),
    ];
    for (k, runs, j, expected) in cases {
        let dist = coverage_distribution(k, runs, &CoverageMode::exact()).unwrap();
        let exact = dist.exact_probability(j).unwrap();
        ensure(exact == expected, || format!("K={k} runs={runs} j={j}: {exact} != {expected}"))?;
        let dev = (dist.probability(j) - expected.to_f64().unwrap()).abs();
        ensure(dev <= 1e-12, || format!("K={k} runs={runs} j={j}: float off by {dev:e}"))?;
    }
    let runs = expected_runs_to_cover_exact(3).unwrap();
    ensure(runs == frac(5, 2), || format!("expected runs {runs} != 5/2"))?;
    Ok("2/3, 8/9, 5/2, 1/6, 2/3, 19/36, 4/9 exact".to_string())
}

fn quadratic_separation() -> Outcome {
    // Oracle calls through the full circuit engine at a small size.
    let cfg = WalkConfig::with_first_marked(60, 2, FRAC_PI_2).unwrap();
    let mut ledger = QueryLedger::default();
    let outcome = run_search(&cfg, 3, &mut ledger).unwrap();
    let expected = 2 * asymptotic_params(60, 2).unwrap().n_opt;
    ensure(
        ledger.quantum_calls == expected && outcome.oracle_calls == expected,
        || format!("circuit used {} calls, expected {expected}", ledger.quantum_calls),
    )?;

    let mut calls = Vec::new();
    for n in [500, 1000, 2000] {
        let cfg = WalkConfig::with_first_marked(n, 2, FRAC_PI_2).unwrap();
        let search = PreparedSearch::new(&cfg, SearchEngine::Reduced).unwrap();
        let mut ledger = QueryLedger::default();
        search.run(&mut ChaCha8Rng::seed_from_u64(n as u64), &mut ledger);
        let n_opt = optimal_steps(n, 2, StepMode::Formula).unwrap();
        ensure(ledger.quantum_calls == 2 * n_opt, || format!("N={n}: {} calls", ledger.quantum_calls))?;
        calls.push((n_opt, ledger.quantum_calls));
    }
    let mut report = Vec::new();
    for i in 0..2 {
        let (n, doubled) = ([500, 1000][i], [1000, 2000][i]);
        let quantum = calls[i + 1].0 as f64 / calls[i].0 as f64;
        ensure((1.98..=2.02).contains(&quantum), || format!("n_opt ratio {quantum} at N={n}"))?;
        let scan = |m| {
            classical_query_baseline(m, 2, ClassicalStrategy::DeterministicScan, 1, 0)
                .unwrap()
                .expected_queries
        };
        let scan_ratio = scan(doubled) / scan(n);
        let random_ratio = random_pairs_expected_queries(doubled, 2).unwrap()
            / random_pairs_expected_queries(n, 2).unwrap();
        for ratio in [scan_ratio, random_ratio] {
            ensure((3.9..=4.1).contains(&ratio), || format!("classical ratio {ratio} at N={n}"))?;
        }
        report.push(format!(
            "N={n}: quantum x{quantum:.3}, classical x{scan_ratio:.3} (scan) x{random_ratio:.3} (random)"
        ));
    }
    Ok(report.join("; "))
}

fn phase_dependence() -> Outcome {
    let horizon = 5 * asymptotic_params(200, 2).unwrap().n_opt;
    let (_, good) = scan_peak(200, 2, FRAC_PI_2, horizon).unwrap();
    let (_, bad) = scan_peak(200, 2, PI, horizon).unwrap();
    ensure(good >= 0.9 && (good - PEAK_200_HALF_PI).abs() < 1e-6, || format!("peak at pi/2 is {good}"))?;
    ensure(bad <= 0.1 && (bad - PEAK_200_PI).abs() < 1e-6, || format!("peak at pi is {bad}"))?;
    Ok(format!("peak {good:.6} at pi/2, {bad:.6} at pi"))
}

fn full_engine_scale() -> Outcome {
    let (n, k, steps) = (1000, 2, 555u64);
    let start = Instant::now();
    let cfg = WalkConfig::with_first_marked(n, k, FRAC_PI_2).unwrap();
    let op = reduced_operator(n, k, FRAC_PI_2).unwrap();
    let init = reduced_initial_state(n, k).unwrap();
    let mut state = initial_state(n).unwrap();
    let mut done = 0;
    let mut worst: f64 = 0.0;
    for chunk in [111u64; 5] {
        state = evolve(&state, &cfg, chunk as usize).unwrap();
        done += chunk;
        let full = marked_probability(&state, &cfg).unwrap();
        let reduced = evolve_reduced(&init, &op, done).unwrap().marked_weight();
        let dev = (full - reduced).abs();
        ensure(dev <= 1e-8, || format!("p_marked differs by {dev:e} at step {done}"))?;
        worst = worst.max(dev);
    }
    assert_eq!(done, steps);
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{steps} steps in {secs:.1} s, deviation {worst:.1e}"))
}

fn walk(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_walk")).args(args).output().unwrap()
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for attempt in 0..2 {
        let run = dir.path().join(format!("run{attempt}.csv"));
        let stats = dir.path().join(format!("stats{attempt}.csv"));
        let r = walk(&["run", "--n", "40", "--k", "3", "--engine", "full", "--seed", "7", "--out", run.to_str().unwrap()]);
        let s = walk(&[
            "stats", "--k", "3", "--runs", "3", "--mode", "mc", "--n", "40", "--trials", "500", "--seed", "7",
            "--out", stats.to_str().unwrap(),
        ]);
        ensure(r.status.success() && s.status.success(), || "run or stats failed".to_string())?;
        outputs.push([
            std::fs::read(&run).unwrap(),
            std::fs::read(run.with_extension("summary.csv")).unwrap(),
            std::fs::read(&stats).unwrap(),
        ]);
    }
    ensure(outputs[0] == outputs[1], || "CSV output differs between runs".to_string())?;
    let ok = walk(&["verify"]).status.code();
    let broken = walk(&["verify", "--inject-fault", "reflection-sum"]).status.code();
    ensure(ok == Some(0), || format!("verify exited {ok:?}"))?;
    ensure(broken == Some(1), || format!("verify with fault exited {broken:?}"))?;
    Ok("byte-identical CSV; verify exits 0, and 1 with an injected fault".to_string())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("unitarity and fixed point", unitarity_and_fixed_point),
        ("reduction exactness", reduction_exactness),
        ("full/reduced/circuit equivalence", three_way_equivalence),
        ("localization and optimal steps", localization_and_optimal_steps),
        ("exact coverage probabilities", exact_coverage_probabilities),
        ("quadratic separation", quadratic_separation),
        ("phase dependence", phase_dependence),
        ("full-engine scale check", full_engine_scale),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
