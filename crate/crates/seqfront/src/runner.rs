//! Parallel execution of experiment specs.

use rayon::prelude::*;

use seqfront_core::experiments::{assemble_report, prepare_points, ExperimentSpec, SeReport};

use crate::config::spec_to_toml;
use crate::error::{CliError, Result};

/// Runs every `(point, trial)` pair on a rayon pool with `jobs` workers (all
/// cores when `None`). Results are gathered in point/trial order, so the
/// report does not depend on the worker count.
pub fn run_parallel(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<SeReport> {
    let points = prepare_points(spec)?;
    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..spec.num_trials).map(move |t| (p, t)))
        .collect();
    let work = || {
        tasks
            .par_iter()
            .map(|&(p, t)| points[p].run_trial(spec.base_seed, t))
            .collect::<Result<Vec<_>, _>>()
    };
    let flat = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::config(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    }?;
    let mut outcomes = Vec::with_capacity(points.len());
    let mut it = flat.into_iter();
    for _ in &points {
        outcomes.push(it.by_ref().take(spec.num_trials).collect());
    }
    let mut report = assemble_report(spec, &points, &outcomes);
    report.metadata.config = spec_to_toml(spec);
    Ok(report)
}
