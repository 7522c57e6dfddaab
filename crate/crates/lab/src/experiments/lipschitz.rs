//! Ratios `‖f(A) − f(B)‖_p / ‖A − B‖_p` over seeded perturbation ensembles.

use rayon::prelude::*;
use schatten_core::funcalc::{apply_function, ScalarFunction};
use schatten_core::linalg::{hermitian_eig, random_hermitian, schatten_norm};
use schatten_core::rng::{derive_seed, SeededRng};
use schatten_core::{ComplexMatrix, Error, HermitianMatrix, C64};

use super::{cell_seed, entry_scale, function_kind, stream};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::report::{Cell, ExperimentReport, Table};

/// Perturbations below this Schatten norm are skipped.
pub const MIN_PERTURBATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Both spectra inside an interval where `f` has slope `±1`.
    IdentityDirection,
    FullRank,
    RankOne,
    /// `D` a polynomial in `A`.
    Commuting,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::IdentityDirection => "identity-direction",
            Ensemble::FullRank => "full-rank",
            Ensemble::RankOne => "rank-one",
            Ensemble::Commuting => "commuting",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub ensemble: Ensemble,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub ensemble: Ensemble,
    pub perturbation_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCell {
    pub p: f64,
    pub n: usize,
    pub rows: Vec<TrialRow>,
    pub skipped: usize,
    /// `p` outside `(1, ∞)`.
    pub contrast: bool,
}

impl LipschitzCell {
    /// Largest ratio and the trial it came from.
    pub fn max_ratio(&self) -> Option<(usize, f64)> {
        self.rows
            .iter()
            .fold(None, |best: Option<(usize, f64)>, r| match best {
                Some((_, v)) if v >= r.ratio => best,
                _ => Some((r.trial, r.ratio)),
            })
    }
}

fn spectral_radius(a: &HermitianMatrix) -> schatten_core::Result<f64> {
    let e = hermitian_eig(a)?.eigenvalues;
    Ok(e.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Trial `index` of a cell. Trial 0 is the identity-direction trial whenever
/// `f` has a region of unit slope; the others cycle through the full-rank,
/// rank-one and commuting ensembles.
pub fn draw_trial(
    f: &ScalarFunction,
    n: usize,
    seed: u64,
    index: usize,
    scale: f64,
) -> schatten_core::Result<Trial> {
    let mut rng = SeededRng::new(derive_seed(seed, index as u64));
    let size = scale * 10f64.powf(rng.uniform_range(-2.0, 0.0));
    if index == 0 {
        if let Some((center, half_width)) = f.unit_slope_region() {
            let h1 = random_hermitian(n, rng.next_u64(), 1.0);
            let h2 = random_hermitian(n, rng.next_u64(), 1.0);
            let (r1, r2) = (spectral_radius(&h1)?, spectral_radius(&h2)?);
            let reach = half_width / 3.0;
            let a = h1.scale(reach / r1.max(f64::MIN_POSITIVE)).shifted(center);
            let d = h2.scale(size.min(1.0) * reach / r2.max(f64::MIN_POSITIVE));
            let b = a.add(&d)?;
            return Ok(Trial {
                a,
                b,
                ensemble: Ensemble::IdentityDirection,
            });
        }
    }
    let a = random_hermitian(n, rng.next_u64(), entry_scale(n));
    let ensemble = [Ensemble::FullRank, Ensemble::RankOne, Ensemble::Commuting][index % 3];
    let d = match ensemble {
        Ensemble::FullRank => random_hermitian(n, rng.next_u64(), size * entry_scale(n)),
        Ensemble::RankOne => {
            let v: Vec<C64> = (0..n).map(|_| rng.complex_normal(1.0)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            let m = ComplexMatrix::from_fn(n, n, |r, c| {
                v[r] * v[c].conj() * (sign * size / (norm * norm))
            });
            HermitianMatrix::symmetrized(m)
        }
        Ensemble::Commuting => {
            let c: [f64; 3] = [
                rng.standard_normal(),
                rng.standard_normal(),
                rng.standard_normal(),
            ];
            let am = a.as_matrix();
            let a2 = am.matmul(am)?;
            let poly = ComplexMatrix::identity(n)
                .scale(C64::new(c[0], 0.0))
                .add(&am.scale(C64::new(c[1], 0.0)))?
                .add(&a2.scale(C64::new(c[2], 0.0)))?;
            let frob = poly.frobenius_norm().max(f64::MIN_POSITIVE);
            HermitianMatrix::symmetrized(poly.scale(C64::new(
                size * (n as f64).sqrt() / frob * entry_scale(n),
                0.0,
            )))
        }
        Ensemble::IdentityDirection => unreachable!(),
    };
    let b = a.add(&d)?;
    Ok(Trial { a, b, ensemble })
}

/// Ratio `‖f(A) − f(B)‖_p / ‖A − B‖_p`, or `None` below the skip threshold.
pub fn lipschitz_ratio(
    f: &ScalarFunction,
    trial: &Trial,
    p: f64,
) -> schatten_core::Result<Option<(f64, f64)>> {
    let diff = trial.a.sub(&trial.b)?;
    let denominator = schatten_norm(diff.as_matrix(), p)?;
    if denominator < MIN_PERTURBATION {
        return Ok(None);
    }
    let fa = apply_function(f, &trial.a)?;
    let fb = apply_function(f, &trial.b)?;
    let numerator = schatten_norm(fa.sub(&fb)?.as_matrix(), p)?;
    Ok(Some((denominator, numerator / denominator)))
}

pub fn lipschitz_ratio_experiment(
    f: &ScalarFunction,
    p: f64,
    n: usize,
    trials: usize,
    seed: u64,
    scale: f64,
) -> schatten_core::Result<LipschitzCell> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    let mut rows = Vec::with_capacity(trials);
    let mut skipped = 0;
    for index in 0..trials {
        let trial = draw_trial(f, n, seed, index, scale)?;
        match lipschitz_ratio(f, &trial, p)? {
            Some((perturbation_norm, ratio)) => rows.push(TrialRow {
                trial: index,
                ensemble: trial.ensemble,
                perturbation_norm,
                ratio,
            }),
            None => skipped += 1,
        }
    }
    Ok(LipschitzCell {
        p,
        n,
        rows,
        skipped,
        contrast: !(p > 1.0 && p.is_finite()),
    })
}

/// Cell keys `(function index, p, n)` in report order.
pub fn cell_keys(config: &RunConfig) -> Vec<(usize, f64, usize)> {
    let suite = &config.suite;
    let mut keys = Vec::new();
    for fi in 0..suite.functions.len() {
        for &p in &suite.p_grid {
            for &n in &suite.n_grid {
                keys.push((fi, p, n));
            }
        }
    }
    keys
}

pub fn cell_seed_for(config: &RunConfig, fi: usize, p: f64, n: usize) -> u64 {
    cell_seed(
        config.seed,
        stream::LIPSCHITZ,
        &[fi as u64, p.to_bits(), n as u64],
    )
}

pub struct LipschitzSuite {
    pub report: ExperimentReport,
    /// Cells in the order of [`cell_keys`].
    pub cells: Vec<((usize, f64, usize), LipschitzCell)>,
}

pub fn run(config: &RunConfig) -> LabResult<LipschitzSuite> {
    let suite = &config.suite;
    let functions: Vec<ScalarFunction> = suite
        .functions
        .iter()
        .map(|d| ScalarFunction::new(d.clone()))
        .collect::<schatten_core::Result<_>>()?;
    let keys = cell_keys(config);
    let cells: Vec<((usize, f64, usize), LipschitzCell)> = keys
        .par_iter()
        .map(|&(fi, p, n)| {
            let seed = cell_seed_for(config, fi, p, n);
            lipschitz_ratio_experiment(
                &functions[fi],
                p,
                n,
                suite.trials,
                seed,
                suite.perturbation_scale,
            )
            .map(|cell| ((fi, p, n), cell))
        })
        .collect::<schatten_core::Result<_>>()?;

    let mut table = Table::new(&[
        "function_index",
        "function",
        "p",
        "n",
        "trial",
        "ensemble",
        "perturbation_norm",
        "ratio",
        "contrast",
    ]);
    let mut report_rows = Vec::new();
    for ((fi, p, n), cell) in &cells {
        for row in &cell.rows {
            report_rows.push((*fi, *p, *n, row.clone(), cell.contrast));
        }
    }
    for (fi, p, n, row, contrast) in &report_rows {
        table.push(vec![
            Cell::from(*fi),
            Cell::from(function_kind(&suite.functions[*fi])),
            Cell::from(*p),
            Cell::from(*n),
            Cell::from(row.trial),
            Cell::from(row.ensemble.name()),
            Cell::from(row.perturbation_norm),
            Cell::from(row.ratio),
            Cell::from(*contrast),
        ]);
    }
    let mut report = ExperimentReport::new("lipschitz", config.echo(), table);

    for (index, (fi, p, _, row, _)) in report_rows.iter().enumerate() {
        report.check(row.ratio.is_finite(), Some(index), "finite ratio", || {
            format!("ratio {}", row.ratio)
        });
        if *p == 2.0 {
            report.check(
                row.ratio <= 1.0 + 1e-9,
                Some(index),
                "p = 2 contraction",
                || format!("ratio {} exceeds 1 + 1e-9", row.ratio),
            );
        }
        if functions[*fi].descriptor() == &schatten_core::funcalc::Descriptor::Identity {
            report.check(
                (row.ratio - 1.0).abs() <= 1e-12,
                Some(index),
                "identity ratio",
                || format!("ratio {} differs from 1", row.ratio),
            );
        }
    }

    let mut cell_summaries = Vec::new();
    for ((fi, p, n), cell) in &cells {
        let max = cell.max_ratio();
        let coherent = functions[*fi].unit_slope_region().is_some();
        if coherent {
            let value = max.map_or(0.0, |m| m.1);
            report.check(value >= 1.0 - 1e-9, None, "ordering coherence", || {
                format!("function {fi}, p {p}, n {n}: max ratio {value} below 1 despite a unit-slope region")
            });
        }
        cell_summaries.push(serde_json::json!({
            "function_index": fi,
            "p": crate::report::json_float(*p),
            "n": n,
            "max_ratio": max.map(|m| m.1),
            "argmax_trial": max.map(|m| m.0),
            "trials": cell.rows.len(),
            "skipped": cell.skipped,
            "contrast": cell.contrast,
        }));
    }
    report.summary = serde_json::json!({
        "cells": cell_summaries,
        "max_ratio": report_rows.iter().filter(|r| !r.4).map(|r| r.3.ratio).fold(0.0, f64::max),
    });
    Ok(LipschitzSuite { report, cells })
}
