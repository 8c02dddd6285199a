//! Validated experiment configuration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::path::PathBuf;

use serde::Serialize;

use crate::args::{Engine, Format, RunArgs};
use crate::{CliError, Result};

/// Resolves `pi`, `pi/2`, `pi/4` (optionally negated) exactly; anything else
/// is parsed as radians.
pub fn parse_phase(token: &str) -> Result<f64> {
    let t = token.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let value = match body {
        "pi" => PI,
        "pi/2" => FRAC_PI_2,
        "pi/4" => FRAC_PI_4,
        other => other
            .parse::<f64>()
            .map_err(|_| CliError::invalid("--phase", format!("cannot parse `{token}`")))?,
    };
    if !value.is_finite() {
        return Err(CliError::invalid("--phase", "must be finite"));
    }
    Ok(sign * value)
}

/// `start:end:step`, end inclusive.
pub fn parse_range(token: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = token.split(':').collect();
    let bad = || CliError::invalid("--n-range", format!("expected start:end:step, got `{token}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step == 0 || end < start {
        return Err(bad());
    }
    Ok((start..=end).step_by(step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum Steps {
    Auto,
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub command: &'static str,
    pub n_values: Vec<usize>,
    pub sweep: bool,
    pub k_marked: usize,
    /// `None` means the default set `0..K`.
    pub marked_list: Option<Vec<usize>>,
    pub phase: f64,
    pub phase_token: String,
    pub steps: Steps,
    pub engine: Engine,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentSpec {
    pub fn from_run_args(args: &RunArgs) -> Result<Self> {
        let (n_values, sweep) = match (&args.n, &args.n_range) {
            (Some(n), None) => (vec![*n], false),
            (None, Some(range)) => (parse_range(range)?, true),
            (None, None) => return Err(CliError::invalid("--n", "one of --n or --n-range is required")),
            (Some(_), Some(_)) => {
                return Err(CliError::invalid("--n-range", "cannot be combined with --n"))
            }
        };
        let k_marked = match (&args.k, &args.marked_list) {
            (Some(k), Some(list)) if *k != list.len() => {
                return Err(CliError::invalid(
                    "--marked-list",
                    format!("has {} vertices but --k is {k}", list.len()),
                ))
            }
            (Some(k), _) => *k,
            (None, Some(list)) => list.len(),
            (None, None) => return Err(CliError::invalid("--k", "one of --k or --marked-list is required")),
        };
        let phase = parse_phase(&args.phase)?;
        let steps = match args.steps.trim() {
            "auto" => Steps::Auto,
            s => Steps::Fixed(
                s.parse()
                    .map_err(|_| CliError::invalid("--steps", format!("expected integer or `auto`, got `{s}`")))?,
            ),
        };
        let spec = ExperimentSpec {
            command: "run",
            n_values,
            sweep,
            k_marked,
            marked_list: args.marked_list.clone(),
            phase,
            phase_token: args.phase.clone(),
            steps,
            engine: args.engine,
            seed: args.seed,
            out: args.out.clone(),
            format: args.format,
        };
        for &n in &spec.n_values {
            spec.validate_for(n)?;
        }
        Ok(spec)
    }

    fn validate_for(&self, n: usize) -> Result<()> {
        if n < 3 {
            return Err(CliError::invalid("--n", format!("need at least 3 vertices, got {n}")));
        }
        let k = self.k_marked;
        if k > n {
            return Err(CliError::invalid("--k", format!("K={k} exceeds N={n}")));
        }
        if let Some(list) = &self.marked_list {
            let mut seen = vec![false; n];
            for &v in list {
                if v >= n {
                    return Err(CliError::invalid("--marked-list", format!("vertex {v} out of range for N={n}")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(CliError::invalid("--marked-list", format!("vertex {v} repeated")));
                }
            }
        }
        if matches!(self.engine, Engine::Reduced | Engine::Oracle) && (k < 2 || k + 2 > n) {
            return Err(CliError::invalid(
                "--k",
                format!("the {:?} engine needs 2 <= K <= N-2, got K={k} N={n}", self.engine).to_lowercase(),
            ));
        }
        if self.engine == Engine::Oracle && self.phase != FRAC_PI_2 {
            return Err(CliError::invalid("--phase", "the oracle engine implements phase pi/2 only"));
        }
        if self.steps == Steps::Auto {
            if self.phase != FRAC_PI_2 {
                return Err(CliError::invalid("--steps", "`auto` requires --phase pi/2"));
            }
            if k < 2 || k + 2 > n {
                return Err(CliError::invalid("--steps", format!("`auto` needs 2 <= K <= N-2, got K={k} N={n}")));
            }
        }
        Ok(())
    }

    pub fn marked(&self) -> Vec<usize> {
        match &self.marked_list {
            Some(list) => list.clone(),
            None => (0..self.k_marked).collect(),
        }
    }
}
