//! The chain `max Lipschitz ratio ≤ theorem2 estimate ≤ cp bound`, per
//! `(f, p, n)` cell.
//!
//! The worst trial `(A, B)` of a Lipschitz cell is moved to the union
//! spectrum: with `A = U diag(α) U*`, `B = V diag(β) V*` and `ψ` the
//! divided-difference symbol of `f` on the sorted union of `α` and `β`,
//! `U*(f(A) − f(B))V = ψ ∘ X` where `X` is `U*(A − B)V` placed at rows `α`
//! and columns `β`. Starting the estimator at `X` makes every part estimate at
//! least the matching part of the observed ratio.

use std::collections::BTreeMap;

use rayon::prelude::*;
use schatten_core::decomposition::{cp_bound_from_kernel, FitResult};
use schatten_core::funcalc::{check_spectrum, divided_difference_symbol};
use schatten_core::linalg::{hermitian_eig, schatten_norm};
use schatten_core::{ComplexMatrix, KernelG, Result, ScalarFunction};

use super::growth::{FitKey, GrowthRow};
use super::lipschitz::{cell_seed_for, draw_trial, LipschitzSuite};
use super::theorem2::Theorem2Suite;
use super::{cell_estimator, cell_seed, function_kind, stream, strictly_increasing_parts};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::estimate::estimate_norm_with_starts;
use crate::report::{json_float, Cell, ExperimentReport, Table};

/// Relative slack on each link of the chain.
pub const CHAIN_SLACK: f64 = 0.05;
/// Allowed relative residual of `ψ ∘ X` against `U*(f(A) − f(B))V`.
pub const EMBEDDING_TOLERANCE: f64 = 1e-6;

/// A Lipschitz trial moved to the union spectrum.
#[derive(Debug, Clone)]
pub struct UnionEmbedding {
    pub points: Vec<f64>,
    /// `U*(A − B)V` at rows `α`, columns `β`.
    pub start: ComplexMatrix,
    /// `‖ψ_f ∘ X − U*(f(A) − f(B))V‖_F / ‖U*(f(A) − f(B))V‖_F`.
    pub residual: f64,
    /// `‖ψ_f ∘ X‖_p / ‖X‖_p`, the trial's ratio recomputed on the union.
    pub ratio: f64,
}

/// `None` when the union of the two spectra is degenerate.
pub fn union_embedding(
    f: &ScalarFunction,
    a: &schatten_core::HermitianMatrix,
    b: &schatten_core::HermitianMatrix,
    p: f64,
) -> Result<Option<UnionEmbedding>> {
    let n = a.dim();
    let ea = hermitian_eig(a)?;
    let eb = hermitian_eig(b)?;
    let mut tagged: Vec<(f64, bool, usize)> = ea
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, false, k))
        .chain(
            eb.eigenvalues
                .iter()
                .enumerate()
                .map(|(l, &x)| (x, true, l)),
        )
        .collect();
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let points: Vec<f64> = tagged.iter().map(|t| t.0).collect();
    if check_spectrum(&points).is_err() {
        return Ok(None);
    }
    let mut row_of = vec![0; n];
    let mut col_of = vec![0; n];
    for (position, &(_, from_b, k)) in tagged.iter().enumerate() {
        if from_b {
            col_of[k] = position;
        } else {
            row_of[k] = position;
        }
    }

    let u = &ea.eigenvectors;
    let v = &eb.eigenvectors;
    let rotate = |m: &ComplexMatrix| u.adjoint().matmul(m)?.matmul(v);
    let x = rotate(a.sub(b)?.as_matrix())?;
    let mut start = ComplexMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for l in 0..n {
            start[(row_of[k], col_of[l])] = x[(k, l)];
        }
    }

    let psi = divided_difference_symbol(f, &points)?;
    let image = psi.apply(&start)?;
    let fa: Vec<f64> = ea.eigenvalues.iter().map(|&t| f.eval(t)).collect();
    let fb: Vec<f64> = eb.eigenvalues.iter().map(|&t| f.eval(t)).collect();
    let target = rotate(&ea.compose(&fa).sub(&eb.compose(&fb))?)?;
    let picked = ComplexMatrix::from_fn(n, n, |k, l| image[(row_of[k], col_of[l])]);
    let scale = target.frobenius_norm();
    let diff = picked.sub(&target)?.frobenius_norm();
    let residual = if scale == 0.0 { diff } else { diff / scale };
    let ratio = schatten_norm(&image, p)? / schatten_norm(&start, p)?;
    Ok(Some(UnionEmbedding {
        points,
        start,
        residual,
        ratio,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRow {
    pub function_index: usize,
    pub p: f64,
    pub n: usize,
    pub max_lipschitz_ratio: f64,
    pub argmax_trial: Option<usize>,
    /// Sum of the part estimates on the union spectrum, if it was usable.
    pub union_estimate: Option<f64>,
    /// Sum of the part estimates of the theorem2 cell.
    pub cell_estimate: f64,
    pub theorem2_lower_bound: f64,
    pub cp_bound: f64,
    pub embedding_residual: Option<f64>,
}

/// `cp_bound_from_kernel` at every interior `p`, from the fit at
/// `bound_growth_n`.
pub fn cp_bounds(
    config: &RunConfig,
    kernel: &KernelG,
    fits: &BTreeMap<FitKey, (Vec<GrowthRow>, FitResult)>,
) -> BTreeMap<u64, f64> {
    let n = config.suite.bound_growth_n;
    config
        .suite
        .interior_p_grid()
        .into_iter()
        .filter_map(|p| {
            fits.get(&(p.to_bits(), n))
                .map(|(_, fit)| (p.to_bits(), cp_bound_from_kernel(kernel, fit)))
        })
        .collect()
}

/// `(p, bound_growth_n)` for every interior `p`: the fits the chain needs.
pub fn bound_pairs(config: &RunConfig) -> Vec<(f64, usize)> {
    config
        .suite
        .interior_p_grid()
        .into_iter()
        .map(|p| (p, config.suite.bound_growth_n))
        .collect()
}

fn chain_row(
    config: &RunConfig,
    lipschitz: &LipschitzSuite,
    theorem2: &Theorem2Suite,
    cp: &BTreeMap<u64, f64>,
    (fi, p, n): (usize, f64, usize),
) -> Result<ChainRow> {
    let suite = &config.suite;
    let f = ScalarFunction::new(suite.functions[fi].clone())?;
    let cell = lipschitz
        .cells
        .iter()
        .find(|(key, _)| *key == (fi, p, n))
        .map(|(_, c)| c);
    let max = cell.and_then(|c| c.max_ratio());
    let cell_estimate = theorem2.cell_total(fi, p, n).unwrap_or(0.0);

    let mut union_estimate = None;
    let mut embedding_residual = None;
    if let Some((trial_index, _)) = max {
        let trial = draw_trial(
            &f,
            n,
            cell_seed_for(config, fi, p, n),
            trial_index,
            suite.perturbation_scale,
        )?;
        if let Some(embedding) = union_embedding(&f, &trial.a, &trial.b, p)? {
            let seed = cell_seed(
                config.seed,
                stream::CHAIN,
                &[fi as u64, p.to_bits(), n as u64],
            );
            let estimator = cell_estimator(&config.estimator, seed);
            let mut total = 0.0;
            for (_, g) in strictly_increasing_parts(&f, suite.strictify_epsilon)? {
                let psi = divided_difference_symbol(&g, &embedding.points)?;
                total +=
                    estimate_norm_with_starts(&psi, p, &estimator, &[embedding.start.clone()])?
                        .value;
            }
            union_estimate = Some(total);
            embedding_residual = Some(embedding.residual);
        }
    }
    Ok(ChainRow {
        function_index: fi,
        p,
        n,
        max_lipschitz_ratio: max.map_or(0.0, |m| m.1),
        argmax_trial: max.map(|m| m.0),
        union_estimate,
        cell_estimate,
        theorem2_lower_bound: union_estimate.unwrap_or(0.0).max(cell_estimate),
        cp_bound: cp.get(&p.to_bits()).copied().unwrap_or(f64::NAN),
        embedding_residual,
    })
}

pub fn run(
    config: &RunConfig,
    lipschitz: &LipschitzSuite,
    theorem2: &Theorem2Suite,
    kernel: &KernelG,
    fits: &BTreeMap<FitKey, (Vec<GrowthRow>, FitResult)>,
) -> LabResult<ExperimentReport> {
    let suite = &config.suite;
    let cp = cp_bounds(config, kernel, fits);
    let mut keys = Vec::new();
    for fi in 0..suite.functions.len() {
        for p in suite.interior_p_grid() {
            for &n in &suite.n_grid {
                keys.push((fi, p, n));
            }
        }
    }
    let rows: Vec<ChainRow> = keys
        .par_iter()
        .map(|&key| chain_row(config, lipschitz, theorem2, &cp, key))
        .collect::<Result<_>>()?;

    let optional = |v: Option<f64>| v.map_or(Cell::Text(String::new()), Cell::from);
    let mut table = Table::new(&[
        "function_index",
        "function",
        "p",
        "n",
        "max_lipschitz_ratio",
        "argmax_trial",
        "union_estimate",
        "cell_estimate",
        "theorem2_lower_bound",
        "cp_bound",
        "embedding_residual",
    ]);
    for r in &rows {
        table.push(vec![
            Cell::from(r.function_index),
            Cell::from(function_kind(&suite.functions[r.function_index])),
            Cell::from(r.p),
            Cell::from(r.n),
            Cell::from(r.max_lipschitz_ratio),
            r.argmax_trial.map_or(Cell::Text(String::new()), Cell::from),
            optional(r.union_estimate),
            Cell::from(r.cell_estimate),
            Cell::from(r.theorem2_lower_bound),
            Cell::from(r.cp_bound),
            optional(r.embedding_residual),
        ]);
    }
    let mut report = ExperimentReport::new("chain", config.echo(), table);
    for (i, r) in rows.iter().enumerate() {
        let label = format!("function {}, p {}, n {}", r.function_index, r.p, r.n);
        report.check(
            r.max_lipschitz_ratio <= r.theorem2_lower_bound * (1.0 + CHAIN_SLACK),
            Some(i),
            "ratio below theorem2 estimate",
            || {
                format!(
                    "{label}: ratio {} vs estimate {}",
                    r.max_lipschitz_ratio, r.theorem2_lower_bound
                )
            },
        );
        report.check(
            r.theorem2_lower_bound <= r.cp_bound * (1.0 + CHAIN_SLACK),
            Some(i),
            "theorem2 estimate below cp bound",
            || {
                format!(
                    "{label}: estimate {} vs bound {}",
                    r.theorem2_lower_bound, r.cp_bound
                )
            },
        );
        if let Some(residual) = r.embedding_residual {
            report.check(
                residual <= EMBEDDING_TOLERANCE,
                Some(i),
                "union embedding",
                || format!("{label}: residual {residual:e}"),
            );
        }
    }
    let bounds: Vec<_> = cp
        .iter()
        .map(
            |(&bits, &b)| serde_json::json!({"p": json_float(f64::from_bits(bits)), "cp_bound": b}),
        )
        .collect();
    report.summary = serde_json::json!({
        "cp_bounds": bounds,
        "bound_growth_n": suite.bound_growth_n,
        "weighted_moment": kernel.weighted_moment(),
        "cells_without_embedding": rows.iter().filter(|r| r.union_estimate.is_none()).count(),
        "max_ratio_over_estimate": rows
            .iter()
            .filter(|r| r.theorem2_lower_bound > 0.0)
            .map(|r| r.max_lipschitz_ratio / r.theorem2_lower_bound)
            .fold(0.0, f64::max),
    });
    Ok(report)
}
