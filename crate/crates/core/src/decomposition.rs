//! Decomposition of a divided-difference multiplier into oscillatory ones:
//!
//! ```text
//! M_φ = ∫ g(s) M(s, (f(λ_k))_k) M(−s, (λ_k)_k) ds
//! ```
//!
//! and the resulting constant `K_p² ∫ |g(s)| (1 + |s|)² ds`.

use alloc::vec::Vec;

use crate::funcalc::{check_spectrum, ScalarFunction};
use crate::kernel::{check_log_ratio, KernelG};
use crate::linalg::ComplexMatrix;
use crate::schur::{oscillatory_symbol, OscillatorySpec, SchurSymbol};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Symbol `Σ_i w_i g(s_i) · |f(λ_k) − f(λ_l)|^{i s_i} · |λ_k − λ_l|^{−i s_i}`,
/// accumulated as the entrywise product of the two oscillatory symbols at
/// each node.
///
/// `f` must be strictly increasing so that `f(λ_k)` is again strictly
/// ascending, and every `log(|λ_k − λ_l| / |f(λ_k) − f(λ_l)|)` must lie in the
/// kernel's `x` range.
pub fn reconstructed_symbol(
    f: &ScalarFunction,
    lambdas: &[f64],
    kernel: &KernelG,
) -> Result<SchurSymbol> {
    check_spectrum(lambdas)?;
    let n = lambdas.len();
    if n == 1 {
        return SchurSymbol::new(ComplexMatrix::zeros(1, 1));
    }
    if !f.is_strictly_increasing() {
        return Err(Error::NotStrictlyIncreasing);
    }
    let images: Vec<f64> = lambdas.iter().map(|&l| f.eval(l)).collect();
    if let Some(index) = images.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NotAscending { index: index + 1 });
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let x = ((lambdas[l] - lambdas[k]) / (images[l] - images[k])).ln();
            check_log_ratio(kernel, x)?;
        }
    }

    let mut acc = ComplexMatrix::zeros(n, n);
    for ((&s, &g), &w) in kernel
        .s_points
        .iter()
        .zip(&kernel.values)
        .zip(&kernel.weights)
    {
        let outer = oscillatory_symbol(&OscillatorySpec::new(images.clone(), s)?);
        let inner = oscillatory_symbol(&OscillatorySpec::new(lambdas.to_vec(), -s)?);
        let factor = g * w;
        for ((a, &o), &i) in acc
            .as_mut_slice()
            .iter_mut()
            .zip(outer.coefficients().as_slice())
            .zip(inner.coefficients().as_slice())
        {
            *a += factor * o * i;
        }
    }
    SchurSymbol::new(acc)
}

/// `Σ_i w_i g(s_i) M(s_i, f(λ)) M(−s_i, λ) X`, an approximation of
/// `M_φ X` for the divided-difference symbol `φ` of `f` on `λ`.
pub fn reconstruct_multiplier(
    f: &ScalarFunction,
    lambdas: &[f64],
    kernel: &KernelG,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    reconstructed_symbol(f, lambdas, kernel)?.apply(x)
}

/// Empirical growth constant of `‖M(s)‖ ≤ K (1 + |s|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted `K̂_p`; with max-ratio fitting this equals `max_ratio`.
    pub slope_constant: f64,
    /// `max_s estimate(s) / (1 + |s|)`.
    pub max_ratio: f64,
    /// `estimate(s) − K̂_p (1 + |s|)` per row; never positive.
    pub residuals: Vec<f64>,
}

/// Fits `K̂` to `(s, estimate)` pairs by the maximum of `estimate / (1+|s|)`.
pub fn fit_growth(rows: &[(f64, f64)]) -> FitResult {
    let max_ratio = rows
        .iter()
        .map(|&(s, e)| e / (1.0 + s.abs()))
        .fold(0.0, f64::max);
    FitResult {
        slope_constant: max_ratio,
        max_ratio,
        residuals: rows
            .iter()
            .map(|&(s, e)| e - max_ratio * (1.0 + s.abs()))
            .collect(),
    }
}

/// `K̂_p² · Σ w_i |g(s_i)| (1 + |s_i|)²`.
pub fn cp_bound_from_kernel(kernel: &KernelG, growth: &FitResult) -> f64 {
    growth.slope_constant.powi(2) * kernel.weighted_moment()
}

/// Relative Frobenius error of the reconstruction against direct
/// multiplication.
pub fn relative_error(reconstructed: &ComplexMatrix, direct: &ComplexMatrix) -> Result<f64> {
    let diff = reconstructed.sub(direct)?.frobenius_norm();
    let scale = direct.frobenius_norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}
