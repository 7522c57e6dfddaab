use super::{hermitian_eig, ComplexMatrix, HermitianMatrix};
use crate::rng::SeededRng;
use crate::Result;

/// Matrix with independent complex Gaussian entries, `E|x_kl|² = std_dev²`.
pub fn random_complex(
    rows: usize,
    cols: usize,
    rng: &mut SeededRng,
    std_dev: f64,
) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_normal(std_dev))
}

/// `(G + G*)/2` where `G` has independent complex Gaussian entries of standard
/// deviation `scale`, drawn row-major from `SeededRng::new(seed)`.
pub fn random_hermitian(n: usize, seed: u64, scale: f64) -> HermitianMatrix {
    let mut rng = SeededRng::new(seed);
    HermitianMatrix::symmetrized(random_complex(n, n, &mut rng, scale))
}

/// Eigenvector matrix of a random Hermitian matrix.
pub fn random_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(&random_hermitian(n, seed, 1.0))?.eigenvectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_is_real() {
        for seed in 0..5 {
            let h = random_hermitian(1, seed, 1.0);
            assert_eq!(h.as_matrix()[(0, 0)].im, 0.0);
        }
    }

    #[test]
    fn reproducible() {
        let a = random_hermitian(4, 1, 1.0);
        let b = random_hermitian(4, 1, 1.0);
        assert_eq!(a, b);
        assert_ne!(a, random_hermitian(4, 2, 1.0));
    }

    #[test]
    fn semicircle_support() {
        let n = 64;
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let d = hermitian_eig(&random_hermitian(n, 9 + seed, 1.0)).unwrap();
            let r = d.eigenvalues[0].abs().max(d.eigenvalues[n - 1].abs());
            worst = worst.max(r);
        }
        assert!(worst <= 2.5 * (n as f64).sqrt(), "max |λ| = {worst}");
    }
}
