//! Norm estimates for divided-difference multipliers of strictly increasing
//! 1-Lipschitz functions.

use rayon::prelude::*;
use schatten_core::funcalc::{divided_difference_symbol, ScalarFunction};
use schatten_core::schur::exact_norm_p2;
use schatten_core::{EstimatorConfig, NormEstimate, Result};

use super::{
    cell_estimator, cell_seed, function_kind, random_spectrum, stream, strictly_increasing_parts,
};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::estimate::estimate_norm;
use crate::report::{json_float, Cell, ExperimentReport, Table};

/// Rounding allowance on the `[0, 1]` range of the divided differences.
pub const SYMBOL_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Outcome {
    pub estimate: NormEstimate,
    /// `max φ_kl`, the exact `p = 2` norm.
    pub exact_p2: f64,
    /// Smallest off-diagonal entry (0 for `n = 1`).
    pub min_entry: f64,
}

pub fn theorem2_experiment(
    f: &ScalarFunction,
    lambdas: &[f64],
    p: f64,
    config: &EstimatorConfig,
) -> Result<Theorem2Outcome> {
    if !f.is_strictly_increasing() {
        return Err(schatten_core::Error::NotStrictlyIncreasing);
    }
    let phi = divided_difference_symbol(f, lambdas)?;
    let n = phi.dim();
    let mut min_entry = if n > 1 { f64::INFINITY } else { 0.0 };
    for k in 0..n {
        for l in 0..n {
            if k != l {
                min_entry = min_entry.min(phi.get(k, l).re);
            }
        }
    }
    Ok(Theorem2Outcome {
        estimate: estimate_norm(&phi, p, config)?,
        exact_p2: exact_norm_p2(&phi),
        min_entry,
    })
}

pub struct PartRow {
    pub function_index: usize,
    pub part: &'static str,
    pub p: f64,
    pub n: usize,
    pub outcome: Theorem2Outcome,
}

pub struct Theorem2Suite {
    pub report: ExperimentReport,
    pub rows: Vec<PartRow>,
}

impl Theorem2Suite {
    /// Sum over the parts of one `(f, p, n)` cell: a bound for `f` itself
    /// through `f = g₁ − g₂`.
    pub fn cell_total(&self, function_index: usize, p: f64, n: usize) -> Option<f64> {
        let parts: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.function_index == function_index && r.p == p && r.n == n)
            .map(|r| r.outcome.estimate.value)
            .collect();
        (!parts.is_empty()).then(|| parts.iter().sum())
    }
}

pub fn run(config: &RunConfig) -> LabResult<Theorem2Suite> {
    let suite = &config.suite;
    let mut keys = Vec::new();
    for fi in 0..suite.functions.len() {
        for &p in &suite.interior_p_grid() {
            for &n in &suite.n_grid {
                keys.push((fi, p, n));
            }
        }
    }
    let cells: Vec<Vec<PartRow>> = keys
        .par_iter()
        .map(|&(fi, p, n)| -> Result<Vec<PartRow>> {
            let seed = cell_seed(
                config.seed,
                stream::THEOREM2,
                &[fi as u64, p.to_bits(), n as u64],
            );
            let f = ScalarFunction::new(suite.functions[fi].clone())?;
            let lambdas = random_spectrum(n, seed)?;
            let estimator = cell_estimator(&config.estimator, seed);
            strictly_increasing_parts(&f, suite.strictify_epsilon)?
                .into_iter()
                .map(|(part, g)| {
                    Ok(PartRow {
                        function_index: fi,
                        part,
                        p,
                        n,
                        outcome: theorem2_experiment(&g, &lambdas, p, &estimator)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<PartRow> = cells.into_iter().flatten().collect();

    let mut table = Table::new(&[
        "function_index",
        "function",
        "part",
        "p",
        "n",
        "estimate_lower_bound",
        "exact_p2_norm",
        "min_symbol_entry",
        "iterations",
        "converged",
    ]);
    for r in &rows {
        table.push(vec![
            Cell::from(r.function_index),
            Cell::from(function_kind(&suite.functions[r.function_index])),
            Cell::from(r.part),
            Cell::from(r.p),
            Cell::from(r.n),
            Cell::from(r.outcome.estimate.value),
            Cell::from(r.outcome.exact_p2),
            Cell::from(r.outcome.min_entry),
            Cell::from(r.outcome.estimate.iterations),
            Cell::from(r.outcome.estimate.converged),
        ]);
    }
    let mut report = ExperimentReport::new("theorem2", config.echo(), table);
    for (i, r) in rows.iter().enumerate() {
        let o = &r.outcome;
        report.check(
            o.min_entry >= -SYMBOL_ROUNDING && o.exact_p2 <= 1.0 + SYMBOL_ROUNDING,
            Some(i),
            "symbol in [0, 1]",
            || format!("entries span [{}, {}]", o.min_entry, o.exact_p2),
        );
        report.check(
            o.estimate.value >= o.exact_p2 - 1e-12,
            Some(i),
            "dominates max entry",
            || {
                format!(
                    "estimate {} below max entry {}",
                    o.estimate.value, o.exact_p2
                )
            },
        );
        if r.p == 2.0 {
            report.check(
                (o.estimate.value - o.exact_p2).abs() <= 1e-6,
                Some(i),
                "p = 2 exactness",
                || format!("estimate {} vs max entry {}", o.estimate.value, o.exact_p2),
            );
        }
    }
    let mut by_p = Vec::new();
    for p in suite.interior_p_grid() {
        let max = rows
            .iter()
            .filter(|r| r.p == p)
            .map(|r| r.outcome.estimate.value)
            .fold(0.0, f64::max);
        by_p.push(serde_json::json!({"p": json_float(p), "max_estimate_lower_bound": max}));
    }
    report.summary = serde_json::json!({ "by_p": by_p });
    Ok(Theorem2Suite { report, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use schatten_core::funcalc::strictify;

    fn quick() -> EstimatorConfig {
        EstimatorConfig {
            starts: 6,
            ..EstimatorConfig::default()
        }
    }

    #[test]
    fn identity_gives_the_off_diagonal_mask() {
        let out =
            theorem2_experiment(&ScalarFunction::identity(), &[-1.0, 0.5], 4.0, &quick()).unwrap();
        assert_eq!(out.exact_p2, 1.0);
        assert_eq!(out.min_entry, 1.0);
        assert!(out.estimate.value >= 1.0);
    }

    #[test]
    fn p2_value_is_max_entry() {
        let f = strictify(&ScalarFunction::positive_part(), 1e-3).unwrap();
        let out = theorem2_experiment(&f, &[-2.0, -1.0, 1.0, 3.0], 2.0, &quick()).unwrap();
        assert!((out.estimate.value - out.exact_p2).abs() < 1e-6);
        assert!(out.exact_p2 <= 1.0);
    }

    #[test]
    fn requires_strict_increase() {
        let err = theorem2_experiment(
            &ScalarFunction::absolute_value(),
            &[0.0, 1.0],
            3.0,
            &quick(),
        );
        assert!(matches!(
            err,
            Err(schatten_core::Error::NotStrictlyIncreasing)
        ));
    }
}
