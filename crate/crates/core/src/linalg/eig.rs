use alloc::vec::Vec;

use super::{ComplexMatrix, HermitianMatrix, Rotation};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Sweep cap of the cyclic Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

/// Stop once the off-diagonal Frobenius mass falls below this fraction of `‖A‖_F`.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;

/// `A = U · diag(λ) · U*` with ascending `λ` and unitary `U` (eigenvectors in columns).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U · diag(values) · U*`.
    pub fn compose(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(values.len(), n);
        let u = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| u[(r, k)] * values[k] * u[(c, k)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.compose(&self.eigenvalues)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi with complex rotations.
///
/// Each rotation first removes the phase of `a_pq` and then applies the real
/// symmetric Jacobi rotation, so the diagonal stays real throughout.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = m.frobenius_norm();
    let target = OFF_DIAGONAL_TOLERANCE * norm;
    // Entries this small are left alone; they cannot matter against `target`.
    let negligible = 1e-18 * norm;

    let mut converged = norm == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= negligible {
                    continue;
                }
                let rot = Rotation::annihilating(m[(p, p)].re, m[(q, q)].re, apq);
                for k in 0..n {
                    let (x, y) = rot.apply_right(m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x;
                    m[(k, q)] = y;
                }
                for k in 0..n {
                    let (x, y) = rot.apply_left_adjoint(m[(p, k)], m[(q, k)]);
                    m[(p, k)] = x;
                    m[(q, k)] = y;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let (x, y) = rot.apply_right(v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x;
                    v[(k, q)] = y;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "hermitian_eig",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += m[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}
