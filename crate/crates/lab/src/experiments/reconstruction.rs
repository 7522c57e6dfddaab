//! The quadrature `Σ w g(s) M(s, f(λ)) M(−s, λ)` against direct Schur
//! multiplication by the divided-difference symbol.

use rayon::prelude::*;
use schatten_core::decomposition::{reconstruct_multiplier, reconstructed_symbol, relative_error};
use schatten_core::funcalc::{divided_difference_symbol, ScalarFunction};
use schatten_core::linalg::random_complex;
use schatten_core::rng::SeededRng;
use schatten_core::{KernelG, Result};

use super::{cell_seed, function_kind, stream, strictly_increasing_parts};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::report::{Cell, ExperimentReport, Table};

pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-3;
/// `ε` of the strictified parts used as test functions.
pub const RECONSTRUCTION_EPSILON: f64 = 0.1;
pub const MAX_SIZE: usize = 8;
const MIN_GAP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub case: usize,
    pub label: String,
    pub n: usize,
    pub relative_error: f64,
    /// `max_kl |reconstructed φ_kl − φ_kl|`.
    pub symbol_error: f64,
}

/// Sorted uniform points in `[-3, 3]` with gaps of at least `MIN_GAP`.
fn ascending_points(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.uniform_range(-3.0, 3.0)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= MIN_GAP) {
            return v;
        }
    }
}

pub fn run_case(
    f: &ScalarFunction,
    label: String,
    case: usize,
    n: usize,
    seed: u64,
    kernel: &KernelG,
) -> Result<CaseOutcome> {
    let mut rng = SeededRng::new(seed);
    let lambdas = ascending_points(&mut rng, n);
    let x = random_complex(n, n, &mut rng, 1.0);
    let direct_symbol = divided_difference_symbol(f, &lambdas)?;
    let direct = direct_symbol.apply(&x)?;
    let reconstructed = reconstruct_multiplier(f, &lambdas, kernel, &x)?;
    let symbol = reconstructed_symbol(f, &lambdas, kernel)?;
    Ok(CaseOutcome {
        case,
        label,
        n,
        relative_error: relative_error(&reconstructed, &direct)?,
        symbol_error: symbol
            .coefficients()
            .max_abs_diff(direct_symbol.coefficients())?,
    })
}

/// Test functions: every strictly increasing part of every configured function.
pub fn test_functions(config: &RunConfig) -> Result<Vec<(String, ScalarFunction)>> {
    let mut out = Vec::new();
    for (fi, d) in config.suite.functions.iter().enumerate() {
        let f = ScalarFunction::new(d.clone())?;
        for (part, g) in strictly_increasing_parts(&f, RECONSTRUCTION_EPSILON)? {
            out.push((format!("{}:{}:{part}", fi, function_kind(d)), g));
        }
    }
    Ok(out)
}

pub fn run(config: &RunConfig, kernel: &KernelG) -> LabResult<ExperimentReport> {
    let functions = test_functions(config)?;
    let cases: Vec<CaseOutcome> = (0..config.suite.reconstruction_cases)
        .into_par_iter()
        .map(|case| {
            let (label, f) = &functions[case % functions.len()];
            let n = 1 + case % MAX_SIZE;
            let seed = cell_seed(config.seed, stream::RECONSTRUCTION, &[case as u64]);
            run_case(f, label.clone(), case, n, seed, kernel)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["case", "function", "n", "relative_error", "symbol_error"]);
    for c in &cases {
        table.push(vec![
            Cell::from(c.case),
            Cell::from(c.label.clone()),
            Cell::from(c.n),
            Cell::from(c.relative_error),
            Cell::from(c.symbol_error),
        ]);
    }
    let mut report = ExperimentReport::new("reconstruction", config.echo(), table);
    for (i, c) in cases.iter().enumerate() {
        report.check(
            c.relative_error <= RECONSTRUCTION_TOLERANCE,
            Some(i),
            "decomposition fidelity",
            || format!("relative error {:e}", c.relative_error),
        );
    }
    report.summary = serde_json::json!({
        "max_relative_error": cases.iter().map(|c| c.relative_error).fold(0.0, f64::max),
        "max_symbol_error": cases.iter().map(|c| c.symbol_error).fold(0.0, f64::max),
        "kernel_points": kernel.len(),
    });
    Ok(report)
}
