//! The multi-start norm estimator with starts spread over the rayon pool.
//! Starts are pure functions of `(φ, p, seed, index)` and merging keeps the
//! lowest index on ties, so the result does not depend on the pool size.

use rayon::prelude::*;
use schatten_core::schur::{merge_outcomes, run_start, start_matrix, StartOutcome};
use schatten_core::{ComplexMatrix, EstimatorConfig, NormEstimate, Result, SchurSymbol};

pub fn estimate_norm(phi: &SchurSymbol, p: f64, config: &EstimatorConfig) -> Result<NormEstimate> {
    estimate_norm_with_starts(phi, p, config, &[])
}

pub fn estimate_norm_with_starts(
    phi: &SchurSymbol,
    p: f64,
    config: &EstimatorConfig,
    extra: &[ComplexMatrix],
) -> Result<NormEstimate> {
    let total = config.starts + extra.len();
    let outcomes: Vec<StartOutcome> = (0..total)
        .into_par_iter()
        .map(|index| {
            if index < config.starts {
                run_start(phi, p, config, &start_matrix(phi, config, index))
            } else {
                run_start(phi, p, config, &extra[index - config.starts])
            }
        })
        .collect::<Result<_>>()?;
    merge_outcomes(phi, p, outcomes)
}
