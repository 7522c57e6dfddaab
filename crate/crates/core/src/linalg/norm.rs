use super::{singular_values, ComplexMatrix};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Schatten p-norm `(Σ σ_i^p)^{1/p}`; `p = ∞` gives the operator norm.
///
/// Any `p ≥ 1` (including `f64::INFINITY`) is accepted; `p < 1` is not a norm.
pub fn schatten_norm(x: &ComplexMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let sv = singular_values(x)?;
    Ok(schatten_norm_of_singular_values(&sv, p))
}

/// Same as [`schatten_norm`] for precomputed singular values; does not
/// validate `p`.
pub fn schatten_norm_of_singular_values(sv: &[f64], p: f64) -> f64 {
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    // Scaled to avoid overflow of σ^p for large p.
    let sum: f64 = sv.iter().map(|&s| (s / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// `q` with `1/p + 1/q = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_complex;
    use crate::rng::SeededRng;
    use crate::C64;

    #[test]
    fn identity_norms() {
        let i = ComplexMatrix::identity(5);
        for &p in &[1.0, 1.5, 2.0, 3.0, 8.0] {
            let v = schatten_norm(&i, p).unwrap();
            assert!((v - 5f64.powf(1.0 / p)).abs() < 1e-14);
        }
        assert_eq!(schatten_norm(&i, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn pythagorean() {
        let x = ComplexMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((schatten_norm(&x, 2.0).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_exponent() {
        let x = ComplexMatrix::identity(2);
        assert_eq!(schatten_norm(&x, 0.5), Err(Error::InvalidExponent(0.5)));
        assert!(schatten_norm(&x, f64::NAN).is_err());
    }

    #[test]
    fn frobenius_agreement() {
        let mut rng = SeededRng::new(12);
        for _ in 0..10 {
            let x = random_complex(7, 7, &mut rng, 1.0);
            let a = schatten_norm(&x, 2.0).unwrap();
            let b = x.frobenius_norm();
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn holder_inequality() {
        // |Tr(X Y*)| ≤ ‖X‖_{1.5} ‖Y‖_3 for conjugate exponents 1.5 and 3.
        let mut rng = SeededRng::new(3);
        let x = random_complex(6, 6, &mut rng, 1.0);
        let nx = schatten_norm(&x, 1.5).unwrap();
        for _ in 0..100 {
            let y = random_complex(6, 6, &mut rng, 1.0);
            let pairing: C64 = x.matmul(&y.adjoint()).unwrap().trace();
            assert!(pairing.norm() <= nx * schatten_norm(&y, 3.0).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(2.0), 2.0);
        assert_eq!(conjugate_exponent(4.0), 4.0 / 3.0);
        assert_eq!(conjugate_exponent(1.0), f64::INFINITY);
        assert_eq!(conjugate_exponent(f64::INFINITY), 1.0);
    }
}
