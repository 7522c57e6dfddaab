//! Growth in `s` of the oscillatory multipliers `|k − l|^{is}` and the
//! fitted constants `K̂_p(n)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use schatten_core::decomposition::{fit_growth, FitResult};
use schatten_core::schur::{oscillatory_symbol, OscillatorySpec};
use schatten_core::{EstimatorConfig, Result};

use super::{cell_estimator, cell_seed, stream};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::estimate::estimate_norm;
use crate::report::{json_float, Cell, ExperimentReport, Table};

/// Allowed relative increase of `K̂_p` between the two largest sizes.
pub const GROWTH_TOLERANCE: f64 = 0.10;

/// Sizes from which the growth check is enforced.
pub const GROWTH_CHECK_MIN_N: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub s: f64,
    pub estimate: f64,
    pub iterations: usize,
}

/// Estimates `‖M(s)‖` with `μ_k = k` for every `s` and fits `K̂_p(n)`.
pub fn lemma_growth_experiment(
    p: f64,
    n: usize,
    s_grid: &[f64],
    config: &EstimatorConfig,
) -> Result<(Vec<GrowthRow>, FitResult)> {
    let rows: Vec<GrowthRow> = s_grid
        .par_iter()
        .map(|&s| {
            let phi = oscillatory_symbol(&OscillatorySpec::integers(n, s)?);
            let est = estimate_norm(&phi, p, config)?;
            Ok(GrowthRow {
                s,
                estimate: est.value,
                iterations: est.iterations,
            })
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.s, r.estimate)).collect();
    Ok((rows, fit_growth(&pairs)))
}

/// Key of a growth fit: `(p bits, n)`.
pub type FitKey = (u64, usize);

pub fn fit_seed(config: &RunConfig, p: f64, n: usize) -> u64 {
    cell_seed(config.seed, stream::GROWTH, &[p.to_bits(), n as u64])
}

/// Runs the fits for all `(p, n)` pairs, in parallel.
pub fn run_fits(
    config: &RunConfig,
    pairs: &[(f64, usize)],
) -> Result<BTreeMap<FitKey, (Vec<GrowthRow>, FitResult)>> {
    let results: Vec<(FitKey, (Vec<GrowthRow>, FitResult))> = pairs
        .par_iter()
        .map(|&(p, n)| {
            let estimator = cell_estimator(&config.estimator, fit_seed(config, p, n));
            lemma_growth_experiment(p, n, &config.suite.s_grid, &estimator)
                .map(|r| ((p.to_bits(), n), r))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().collect())
}

/// Report over already computed fits, in the order of `pairs`.
pub fn report(
    config: &RunConfig,
    id: &str,
    pairs: &[(f64, usize)],
    fits: &BTreeMap<FitKey, (Vec<GrowthRow>, FitResult)>,
) -> ExperimentReport {
    let mut table = Table::new(&[
        "p",
        "n",
        "s",
        "estimate_lower_bound",
        "ratio_to_1_plus_abs_s",
        "iterations",
    ]);
    let mut checks = Vec::new();
    for &(p, n) in pairs {
        let (rows, _) = &fits[&(p.to_bits(), n)];
        for r in rows {
            checks.push((table.rows.len(), p, n, r.clone()));
            table.push(vec![
                Cell::from(p),
                Cell::from(n),
                Cell::from(r.s),
                Cell::from(r.estimate),
                Cell::from(r.estimate / (1.0 + r.s.abs())),
                Cell::from(r.iterations),
            ]);
        }
    }
    let mut report = ExperimentReport::new(id, config.echo(), table);
    for (i, p, n, r) in checks {
        if n < 2 {
            continue;
        }
        if p == 2.0 {
            report.check(
                (r.estimate - 1.0).abs() <= 1e-6,
                Some(i),
                "p = 2 unimodular",
                || format!("estimate {} differs from 1", r.estimate),
            );
        }
        if r.s == 0.0 {
            report.check(
                r.estimate >= 1.0 - 1e-9 && r.estimate <= 2.0 + 1e-9,
                Some(i),
                "s = 0 within [1, 2]",
                || format!("estimate {}", r.estimate),
            );
        }
    }

    let mut fits_json = Vec::new();
    let mut by_p: BTreeMap<u64, Vec<(usize, f64)>> = BTreeMap::new();
    for &(p, n) in pairs {
        let (rows, fit) = &fits[&(p.to_bits(), n)];
        let row_max = rows
            .iter()
            .map(|r| r.estimate / (1.0 + r.s.abs()))
            .fold(0.0, f64::max);
        report.check(
            fit.max_ratio == row_max,
            None,
            "fit equals row maximum",
            || format!("p {p}, n {n}: fit {} vs rows {row_max}", fit.max_ratio),
        );
        by_p.entry(p.to_bits())
            .or_default()
            .push((n, fit.slope_constant));
        fits_json.push(serde_json::json!({
            "p": json_float(p),
            "n": n,
            "k_hat": fit.slope_constant,
            "max_ratio": fit.max_ratio,
        }));
    }
    let mut growth_json = Vec::new();
    for (bits, mut sizes) in by_p {
        let p = f64::from_bits(bits);
        sizes.sort_by_key(|e| e.0);
        if let [.., (n0, k0), (n1, k1)] = sizes[..] {
            let relative = k1 / k0 - 1.0;
            growth_json.push(serde_json::json!({
                "p": json_float(p), "from_n": n0, "to_n": n1, "relative_growth": relative,
            }));
            if n0 >= GROWTH_CHECK_MIN_N {
                report.check(relative < GROWTH_TOLERANCE, None, "bounded growth", || {
                    format!(
                        "p {p}: K̂ grows by {:.2}% from n = {n0} to n = {n1}",
                        100.0 * relative
                    )
                });
            }
        }
    }
    report.summary = serde_json::json!({ "fits": fits_json, "growth": growth_json });
    report
}

pub fn suite_pairs(config: &RunConfig) -> Vec<(f64, usize)> {
    let mut pairs = Vec::new();
    for &p in &config.suite.growth_p_grid {
        for &n in &config.suite.growth_n_grid {
            pairs.push((p, n));
        }
    }
    pairs
}

pub struct GrowthSuite {
    pub report: ExperimentReport,
    pub fits: BTreeMap<FitKey, (Vec<GrowthRow>, FitResult)>,
}

pub fn run(config: &RunConfig) -> LabResult<GrowthSuite> {
    let pairs = suite_pairs(config);
    let fits = run_fits(config, &pairs)?;
    Ok(GrowthSuite {
        report: report(config, "lemma-growth", &pairs, &fits),
        fits,
    })
}
