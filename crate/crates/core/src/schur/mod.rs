//! Schur multipliers `M_φ(a) = (φ_kl a_kl)` and their `S^p → S^p` norms.

mod estimate;

pub use estimate::{
    estimate_norm, estimate_norm_with_starts, merge_outcomes, run_start, start_matrix,
    EstimatorConfig, NormEstimate, StartOutcome,
};

use alloc::vec::Vec;

use crate::linalg::ComplexMatrix;
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Square matrix of multiplier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurSymbol {
    coefficients: ComplexMatrix,
}

impl SchurSymbol {
    pub fn new(coefficients: ComplexMatrix) -> Result<Self> {
        if !coefficients.is_square() {
            return Err(Error::NotSquare {
                rows: coefficients.rows(),
                cols: coefficients.cols(),
            });
        }
        if coefficients.rows() == 0 {
            return Err(Error::BadShape {
                rows: 0,
                cols: 0,
                len: 0,
            });
        }
        if !coefficients.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { coefficients })
    }

    /// All-ones symbol: the identity map.
    pub fn ones(n: usize) -> Self {
        Self {
            coefficients: ComplexMatrix::filled(n, n, C64::new(1.0, 0.0)),
        }
    }

    /// `1_{k≠l}`.
    pub fn off_diagonal_mask(n: usize) -> Self {
        Self {
            coefficients: ComplexMatrix::from_fn(n, n, |k, l| {
                C64::new(if k == l { 0.0 } else { 1.0 }, 0.0)
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.coefficients.rows()
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.coefficients[(k, l)]
    }

    pub fn coefficients(&self) -> &ComplexMatrix {
        &self.coefficients
    }

    /// Adjoint symbol under the trace pairing `⟨A, B⟩ = Tr(AB)`.
    pub fn transpose(&self) -> Self {
        Self {
            coefficients: self.coefficients.transpose(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            coefficients: self.coefficients.scale(factor),
        }
    }

    /// `φ · 1_{k>l}`.
    pub fn strictly_lower(&self) -> Self {
        self.masked(|k, l| k > l)
    }

    /// `φ · 1_{k<l}`.
    pub fn strictly_upper(&self) -> Self {
        self.masked(|k, l| k < l)
    }

    fn masked(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let n = self.dim();
        Self {
            coefficients: ComplexMatrix::from_fn(n, n, |k, l| {
                if keep(k, l) {
                    self.get(k, l)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coefficients.max_abs()
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.coefficients.hadamard(x)
    }
}

/// Entrywise product `(φ_kl x_kl)`.
pub fn apply_multiplier(phi: &SchurSymbol, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    phi.apply(x)
}

/// Strictly ascending points `μ_k` and a real frequency `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorySpec {
    mus: Vec<f64>,
    s: f64,
}

impl OscillatorySpec {
    pub fn new(mus: Vec<f64>, s: f64) -> Result<Self> {
        if mus.is_empty() {
            return Err(Error::BadShape {
                rows: 0,
                cols: 0,
                len: 0,
            });
        }
        if !s.is_finite() || mus.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(index) = mus.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NotAscending { index: index + 1 });
        }
        Ok(Self { mus, s })
    }

    /// `μ_k = 1, …, n`.
    pub fn integers(n: usize, s: f64) -> Result<Self> {
        Self::new((1..=n).map(|k| k as f64).collect(), s)
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// `φ_kl = |μ_k − μ_l|^{is} = exp(i s log|μ_k − μ_l|)` for `k ≠ l`, with
/// `0^{is} = 0` on the diagonal.
pub fn oscillatory_symbol(spec: &OscillatorySpec) -> SchurSymbol {
    let mus = &spec.mus;
    let n = mus.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in (k + 1)..n {
            let z = C64::from_polar(1.0, spec.s * (mus[l] - mus[k]).ln());
            m[(k, l)] = z;
            m[(l, k)] = z;
        }
    }
    SchurSymbol { coefficients: m }
}

/// Principal submatrix of the coefficients at the given ascending indices.
pub fn restrict_symbol(phi: &SchurSymbol, indices: &[usize]) -> Result<SchurSymbol> {
    let n = phi.dim();
    if let Some(&index) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, dim: n });
    }
    if let Some(pos) = indices.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NotAscending { index: pos + 1 });
    }
    SchurSymbol::new(ComplexMatrix::from_fn(
        indices.len(),
        indices.len(),
        |a, b| phi.get(indices[a], indices[b]),
    ))
}

/// `‖M_φ‖_{S²→S²} = max |φ_kl|`, since `S²` is entrywise Euclidean.
pub fn exact_norm_p2(phi: &SchurSymbol) -> f64 {
    phi.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_complex;
    use crate::rng::SeededRng;
    use alloc::vec;
    use core::f64::consts::{LN_2, PI};

    #[test]
    fn identity_and_mask_multipliers() {
        let mut rng = SeededRng::new(1);
        let x = random_complex(4, 4, &mut rng, 1.0);
        assert_eq!(apply_multiplier(&SchurSymbol::ones(4), &x).unwrap(), x);
        let masked = apply_multiplier(&SchurSymbol::off_diagonal_mask(4), &x).unwrap();
        assert_eq!(masked, x.sub(&x.diagonal_part()).unwrap());
        let wrong = ComplexMatrix::zeros(3, 3);
        assert!(matches!(
            apply_multiplier(&SchurSymbol::ones(4), &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_diagonal_annihilates_identity() {
        let phi = SchurSymbol::off_diagonal_mask(3);
        let y = apply_multiplier(&phi, &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(y, ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn oscillatory_at_zero_frequency_is_mask() {
        let spec = OscillatorySpec::new(vec![0.5, 1.0, 4.0], 0.0).unwrap();
        assert_eq!(oscillatory_symbol(&spec), SchurSymbol::off_diagonal_mask(3));
    }

    #[test]
    fn oscillatory_closed_form() {
        let spec = OscillatorySpec::new(vec![1.0, 3.0], PI / LN_2).unwrap();
        let phi = oscillatory_symbol(&spec);
        assert!((phi.get(0, 1) - C64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn oscillatory_matches_scalar_evaluation() {
        let mus = [1.0f64, 2.0, 4.0];
        let phi = oscillatory_symbol(&OscillatorySpec::new(mus.to_vec(), 1.0).unwrap());
        for k in 0..3 {
            for l in 0..3 {
                let expected = if k == l {
                    C64::new(0.0, 0.0)
                } else {
                    let d = (mus[k] - mus[l]).abs();
                    C64::new(0.0, d.ln()).exp()
                };
                assert!((phi.get(k, l) - expected).norm() < 1e-15);
                if k != l {
                    assert!((phi.get(k, l).norm() - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(OscillatorySpec::new(vec![1.0, 1.0], 1.0).is_err());
        assert!(OscillatorySpec::new(vec![], 1.0).is_err());
        assert!(OscillatorySpec::new(vec![1.0, 2.0], f64::NAN).is_err());
    }

    #[test]
    fn restriction_cases() {
        let phi = oscillatory_symbol(&OscillatorySpec::new(vec![1.0, 2.0, 3.0, 5.0], 2.5).unwrap());
        assert_eq!(restrict_symbol(&phi, &[0, 1, 2, 3]).unwrap(), phi);
        let single = restrict_symbol(&phi, &[2]).unwrap();
        assert_eq!(single.get(0, 0), C64::new(0.0, 0.0));

        let sub = restrict_symbol(&phi, &[0, 1, 3]).unwrap();
        let rebuilt = oscillatory_symbol(&OscillatorySpec::new(vec![1.0, 2.0, 5.0], 2.5).unwrap());
        assert!(
            sub.coefficients()
                .max_abs_diff(rebuilt.coefficients())
                .unwrap()
                < 1e-15
        );

        assert_eq!(
            restrict_symbol(&phi, &[0, 4]),
            Err(Error::IndexOutOfRange { index: 4, dim: 4 })
        );
        assert!(restrict_symbol(&phi, &[2, 1]).is_err());
    }

    #[test]
    fn triangular_parts_sum_to_off_diagonal() {
        let mut rng = SeededRng::new(2);
        let phi = SchurSymbol::new(random_complex(5, 5, &mut rng, 1.0)).unwrap();
        let lower = phi.strictly_lower();
        let upper = phi.strictly_upper();
        let sum = lower.coefficients().add(upper.coefficients()).unwrap();
        let off = phi
            .coefficients()
            .sub(&phi.coefficients().diagonal_part())
            .unwrap();
        assert_eq!(sum, off);
    }

    #[test]
    fn exact_p2_values() {
        assert_eq!(exact_norm_p2(&SchurSymbol::ones(3)), 1.0);
        let phi = SchurSymbol::new(ComplexMatrix::from_real(2, 2, &[0.0, -3.0, 0.5, 1.0]).unwrap())
            .unwrap();
        assert_eq!(exact_norm_p2(&phi), 3.0);
    }
}
