//! Lower bounds for `‖M_φ‖_{S^p→S^p}` by alternating duality iteration.
//!
//! With the bilinear trace pairing `⟨A, B⟩ = Tr(AB)` the adjoint of `M_φ` is
//! `M_{φᵀ}`, and the element of the unit `S^q` ball norming `Y = UΣV*` is
//! `V Σ^{p−1} U* / ‖Σ^{p−1}‖_q`. One step of the iteration is
//!
//! ```text
//! Y = M_φ(X),  Z = J_p(Y),  W = M_{φᵀ}(Z),  X' = J_q(W)
//! ```
//!
//! and `‖M_φ X‖_p ≤ ‖W‖_q ≤ ‖M_φ X'‖_p`, so the ratio never decreases. The
//! reported value is always the ratio realised by the returned witness; it
//! is a lower bound, never a claim about the true norm.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use super::SchurSymbol;
use crate::linalg::{
    conjugate_exponent, random_complex, schatten_norm, schatten_norm_of_singular_values, svd,
    svd_warm, ComplexMatrix, Svd,
};
use crate::rng::{derive_seed, SeededRng};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Singular values are clamped below at this value before powering.
const SIGMA_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EstimatorConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iters: 500,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidConfig("starts must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig("tol must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Certified lower bound on a multiplier norm together with the unit-norm
/// input that realises it.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: ComplexMatrix,
    pub p: f64,
    pub iterations: usize,
    pub starts: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub ratio: f64,
    pub witness: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
}

/// `estimate_norm_with_starts` without extra starts.
pub fn estimate_norm(phi: &SchurSymbol, p: f64, config: &EstimatorConfig) -> Result<NormEstimate> {
    estimate_norm_with_starts(phi, p, config, &[])
}

/// Runs `config.starts` deterministic starts followed by the caller's
/// `extra` starting matrices and keeps the best ratio (lowest start index on
/// ties).
pub fn estimate_norm_with_starts(
    phi: &SchurSymbol,
    p: f64,
    config: &EstimatorConfig,
    extra: &[ComplexMatrix],
) -> Result<NormEstimate> {
    check_inputs(phi, p, config)?;
    let n = phi.dim();
    if let Some(bad) = extra.iter().find(|m| m.shape() != (n, n)) {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            found: bad.shape(),
        });
    }
    let mut outcomes = Vec::with_capacity(config.starts + extra.len());
    for index in 0..config.starts {
        outcomes.push(run_start(
            phi,
            p,
            config,
            &start_matrix(phi, config, index),
        )?);
    }
    for start in extra {
        outcomes.push(run_start(phi, p, config, start)?);
    }
    merge_outcomes(phi, p, outcomes)
}

/// The `index`-th deterministic start: the elementary matrix at the largest
/// `|φ_kl|`, then the all-ones matrix, then seeded Gaussian matrices.
pub fn start_matrix(phi: &SchurSymbol, config: &EstimatorConfig, index: usize) -> ComplexMatrix {
    let n = phi.dim();
    match index {
        0 => {
            let (mut best, mut at) = (-1.0, (0, 0));
            for k in 0..n {
                for l in 0..n {
                    let v = phi.get(k, l).norm();
                    if v > best {
                        best = v;
                        at = (k, l);
                    }
                }
            }
            let mut e = ComplexMatrix::zeros(n, n);
            e[at] = C64::new(1.0, 0.0);
            e
        }
        1 => ComplexMatrix::filled(n, n, C64::new(1.0, 0.0)),
        _ => {
            let mut rng = SeededRng::new(derive_seed(config.seed, index as u64));
            random_complex(n, n, &mut rng, 1.0)
        }
    }
}

fn check_inputs(phi: &SchurSymbol, p: f64, config: &EstimatorConfig) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    if !phi.coefficients().is_finite() {
        return Err(Error::NonFinite);
    }
    config.validate()
}

/// One start of the duality iteration.
pub fn run_start(
    phi: &SchurSymbol,
    p: f64,
    config: &EstimatorConfig,
    start: &ComplexMatrix,
) -> Result<StartOutcome> {
    check_inputs(phi, p, config)?;
    let n = phi.dim();
    let q = conjugate_exponent(p);
    let adjoint = phi.transpose();

    let start_norm = schatten_norm(start, p)?;
    if start_norm == 0.0 {
        let mut e = ComplexMatrix::zeros(n, n);
        e[(0, 0)] = C64::new(1.0, 0.0);
        let ratio = schatten_norm(&phi.apply(&e)?, p)?;
        return Ok(StartOutcome {
            ratio,
            witness: e,
            iterations: 0,
            converged: true,
        });
    }
    let mut x = start.scale(C64::new(1.0 / start_norm, 0.0));
    let mut y_svd = svd(&phi.apply(&x)?)?;
    let mut ratio = schatten_norm_of_singular_values(&y_svd.singular_values, p);
    let mut best = (ratio, x.clone());
    let mut iterations = 0;
    let mut converged = false;
    let mut w_right: Option<ComplexMatrix> = None;

    while iterations < config.max_iters {
        if ratio == 0.0 {
            converged = true;
            break;
        }
        iterations += 1;
        let z = norming_element(&y_svd, p);
        let w = adjoint.apply(&z)?;
        let w_svd = match &w_right {
            Some(v0) => svd_warm(&w, v0)?,
            None => svd(&w)?,
        };
        if w_svd.singular_values[0] == 0.0 {
            converged = true;
            break;
        }
        x = norming_element(&w_svd, q);
        y_svd = svd_warm(&phi.apply(&x)?, &y_svd.v)?;
        w_right = Some(w_svd.v);
        let next = schatten_norm_of_singular_values(&y_svd.singular_values, p);
        if next > best.0 {
            best = (next, x.clone());
        }
        let improvement = next - ratio;
        ratio = next;
        if improvement <= config.tol * ratio {
            converged = true;
            break;
        }
    }

    let witness = best.1;
    let value = schatten_norm(&phi.apply(&witness)?, p)? / schatten_norm(&witness, p)?;
    Ok(StartOutcome {
        ratio: value,
        witness,
        iterations,
        converged,
    })
}

/// Best outcome, earliest on ties.
pub fn merge_outcomes(
    phi: &SchurSymbol,
    p: f64,
    outcomes: Vec<StartOutcome>,
) -> Result<NormEstimate> {
    let starts = outcomes.len();
    let mut best: Option<StartOutcome> = None;
    for outcome in outcomes {
        if best.as_ref().is_none_or(|b| outcome.ratio > b.ratio) {
            best = Some(outcome);
        }
    }
    let best = best.ok_or(Error::InvalidConfig("no starts"))?;
    debug_assert_eq!(best.witness.rows(), phi.dim());
    Ok(NormEstimate {
        value: best.ratio,
        witness: best.witness,
        p,
        iterations: best.iterations,
        starts,
        converged: best.converged,
    })
}

/// `V Σ^{r−1} U*` scaled to unit Schatten norm in the exponent dual to `r`.
fn norming_element(d: &Svd, r: f64) -> ComplexMatrix {
    let sigma_max = d.singular_values[0].max(SIGMA_FLOOR);
    let powered: Vec<f64> = d
        .singular_values
        .iter()
        .map(|&s| (s.max(SIGMA_FLOOR) / sigma_max).powf(r - 1.0))
        .collect();
    let dual = conjugate_exponent(r);
    let norm = schatten_norm_of_singular_values(&powered, dual);
    let (rows, cols) = (d.v.rows(), d.u.rows());
    let k = powered.len();
    ComplexMatrix::from_fn(rows, cols, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..k {
            acc += d.v[(a, j)] * powered[j] * d.u[(b, j)].conj();
        }
        acc / norm
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::{exact_norm_p2, oscillatory_symbol, OscillatorySpec};
    use alloc::vec;

    fn quick() -> EstimatorConfig {
        EstimatorConfig {
            starts: 6,
            ..EstimatorConfig::default()
        }
    }

    fn random_symbol(n: usize, seed: u64) -> SchurSymbol {
        let mut rng = SeededRng::new(seed);
        SchurSymbol::new(random_complex(n, n, &mut rng, 1.0)).unwrap()
    }

    #[test]
    fn identity_multiplier_has_norm_one() {
        for &p in &[1.2, 3.0, 7.0] {
            let e = estimate_norm(&SchurSymbol::ones(4), p, &quick()).unwrap();
            assert!((e.value - 1.0).abs() < 1e-9, "{p}: {}", e.value);
        }
    }

    #[test]
    fn p2_is_max_entry() {
        for seed in 0..5 {
            let phi = random_symbol(5, 11 + seed);
            let e = estimate_norm(&phi, 2.0, &quick()).unwrap();
            assert!((e.value - exact_norm_p2(&phi)).abs() < 1e-6);
        }
    }

    #[test]
    fn witness_reproduces_value() {
        let phi = random_symbol(4, 3);
        let e = estimate_norm(&phi, 3.0, &quick()).unwrap();
        let ratio = schatten_norm(&phi.apply(&e.witness).unwrap(), 3.0).unwrap()
            / schatten_norm(&e.witness, 3.0).unwrap();
        assert!((ratio - e.value).abs() <= 1e-9 * e.value);
        assert!((schatten_norm(&e.witness, 3.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_exponents_and_configs() {
        let phi = SchurSymbol::ones(2);
        for p in [1.0, 0.5, f64::INFINITY, f64::NAN] {
            assert!(matches!(
                estimate_norm(&phi, p, &quick()),
                Err(Error::InvalidExponent(_))
            ));
        }
        let bad = EstimatorConfig {
            starts: 0,
            ..EstimatorConfig::default()
        };
        assert!(estimate_norm(&phi, 2.0, &bad).is_err());
    }

    #[test]
    fn zero_symbol() {
        let phi = SchurSymbol::new(ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(estimate_norm(&phi, 1.5, &quick()).unwrap().value, 0.0);
    }

    #[test]
    fn unimodular_rescaling_same_seed() {
        let phi = oscillatory_symbol(&OscillatorySpec::new(vec![1.0, 2.5, 3.0, 7.0], 3.0).unwrap());
        let c = C64::from_polar(1.0, 0.7);
        let a = estimate_norm(&phi, 4.0, &quick()).unwrap().value;
        let b = estimate_norm(&phi.scale(c), 4.0, &quick()).unwrap().value;
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn extra_starts_never_lower_the_value() {
        let phi = random_symbol(3, 21);
        let cfg = EstimatorConfig {
            starts: 2,
            ..EstimatorConfig::default()
        };
        let base = estimate_norm(&phi, 1.5, &cfg).unwrap();
        let extra = vec![random_complex(3, 3, &mut SeededRng::new(5), 1.0)];
        let more = estimate_norm_with_starts(&phi, 1.5, &cfg, &extra).unwrap();
        assert!(more.value >= base.value);
        assert_eq!(more.starts, 3);
        let wrong = vec![ComplexMatrix::zeros(2, 2)];
        assert!(estimate_norm_with_starts(&phi, 1.5, &cfg, &wrong).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let phi = random_symbol(4, 8);
        let a = estimate_norm(&phi, 1.7, &quick()).unwrap();
        let b = estimate_norm(&phi, 1.7, &quick()).unwrap();
        assert_eq!(a, b);
    }
}
