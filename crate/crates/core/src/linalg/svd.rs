use alloc::vec;
use alloc::vec::Vec;

use super::{ComplexMatrix, Rotation};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `X = U · diag(σ) · V*`.
///
/// With `k = min(rows, cols)`, `u` is `rows × k`, `v` is `cols × k` and the
/// singular values are sorted in descending order. Columns of `u` belonging
/// to zero singular values are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Pairs of columns are rotated until they are numerically orthogonal; the
/// 2×2 problem on each pair is the Hermitian Jacobi step applied to the Gram
/// block, so this reuses the eigensolver rotation.
pub fn svd(x: &ComplexMatrix) -> Result<Svd> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if x.rows() < x.cols() {
        let t = svd(&x.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let n = x.cols();
    let w: Vec<Vec<C64>> = (0..n).map(|c| x.column(c)).collect();
    let v: Vec<Vec<C64>> = (0..n)
        .map(|c| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[c] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    jacobi(x.rows(), w, v)
}

/// Same as [`svd`] but starts the rotations from `x · v0`, where `v0` is a
/// unitary guess for the right singular vectors (typically those of a nearby
/// matrix). A good guess cuts the number of sweeps; any unitary `v0` gives
/// the same decomposition up to rounding.
///
/// Requires `rows >= cols` and `v0` of size `cols × cols`.
pub fn svd_warm(x: &ComplexMatrix, v0: &ComplexMatrix) -> Result<Svd> {
    if !x.is_finite() || !v0.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = x.cols();
    if x.rows() < n {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            found: x.shape(),
        });
    }
    if v0.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            expected: (n, n),
            found: v0.shape(),
        });
    }
    let xv = x.matmul(v0)?;
    let w: Vec<Vec<C64>> = (0..n).map(|c| xv.column(c)).collect();
    let v: Vec<Vec<C64>> = (0..n).map(|c| v0.column(c)).collect();
    jacobi(x.rows(), w, v)
}

fn jacobi(m: usize, mut w: Vec<Vec<C64>>, v: Vec<Vec<C64>>) -> Result<Svd> {
    let n = w.len();
    // Work at unit scale so squared column norms neither overflow nor
    // underflow; a power of two keeps the rescaling exact.
    let largest = w
        .iter()
        .flatten()
        .fold(0.0f64, |acc, z| acc.max(z.re.abs()).max(z.im.abs()));
    let scale = if largest > 0.0 {
        2f64.powi(largest.log2().ceil() as i32)
    } else {
        1.0
    };
    if scale != 1.0 {
        for z in w.iter_mut().flatten() {
            *z /= scale;
        }
    }
    // Column j of X·V stacked on column j of V, so one rotation pass updates both.
    let len = m + n;
    let mut cols: Vec<C64> = Vec::with_capacity(n * len);
    for (wc, vc) in w.iter().zip(&v) {
        cols.extend_from_slice(wc);
        cols.extend_from_slice(vc);
    }
    let mut norms: Vec<f64> = w.iter().map(|col| norm_sqr(col)).collect();
    let tol = (m as f64) * f64::EPSILON;
    // Columns below this squared norm are far under rounding noise; rotating
    // them only churns denormals.
    let negligible = f64::EPSILON.powi(4) * norms.iter().sum::<f64>();

    let mut converged = n == 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let (head, tail) = cols.split_at_mut(q * len);
                let a = &mut head[p * len..(p + 1) * len];
                let b = &mut tail[..len];
                let gamma = dot(&a[..m], &b[..m]);
                if gamma.norm() <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let rot = Rotation::annihilating(alpha, beta, gamma);
                let (c, sn, phase) = (rot.pp.re, rot.pq.re, rot.qq / rot.pp.re);
                let (mut na, mut nb) = (0.0, 0.0);
                for (i, (x, y)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                    let yt = phase * *y;
                    let nx = *x * c - yt * sn;
                    let ny = *x * sn + yt * c;
                    *x = nx;
                    *y = ny;
                    if i < m {
                        na += nx.norm_sqr();
                        nb += ny.norm_sqr();
                    }
                }
                norms[p] = na;
                norms[q] = nb;
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "svd",
            sweeps: MAX_SWEEPS,
        });
    }

    let sigma: Vec<f64> = norms.iter().map(|s| s.sqrt()).collect();
    let unscaled: Vec<f64> = sigma.iter().map(|s| s * scale).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| unscaled[i]).collect();
    let u = ComplexMatrix::from_fn(m, n, |r, c| {
        let s = sigma[order[c]];
        if s > 0.0 {
            cols[order[c] * len + r] / s
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = ComplexMatrix::from_fn(n, n, |r, c| cols[order[c] * len + m + r]);
    Ok(Svd {
        u,
        singular_values,
        v,
    })
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(x)?.singular_values)
}

#[inline]
fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, random_complex, HermitianMatrix};
    use crate::rng::SeededRng;

    #[test]
    fn diagonal_values() {
        let x = ComplexMatrix::from_real(2, 2, &[3.0, 0.0, 0.0, -4.0]).unwrap();
        assert_eq!(singular_values(&x).unwrap(), vec![4.0, 3.0]);
    }

    #[test]
    fn rank_one() {
        let mut rng = SeededRng::new(1);
        let mut u: Vec<C64> = (0..4).map(|_| rng.complex_normal(1.0)).collect();
        let mut v: Vec<C64> = (0..4).map(|_| rng.complex_normal(1.0)).collect();
        let nu = norm_sqr(&u).sqrt();
        let nv = norm_sqr(&v).sqrt();
        u.iter_mut().for_each(|z| *z /= nu);
        v.iter_mut().for_each(|z| *z /= nv);
        let x = ComplexMatrix::from_fn(4, 4, |r, c| u[r] * v[c].conj());
        let s = singular_values(&x).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-14);
        assert!(s[1..].iter().all(|&t| t < 1e-14), "{s:?}");
    }

    #[test]
    fn matches_gram_eigenvalues() {
        let mut rng = SeededRng::new(7);
        let x = random_complex(5, 5, &mut rng, 1.0);
        let s = singular_values(&x).unwrap();
        let gram = HermitianMatrix::symmetrized(x.adjoint().matmul(&x).unwrap());
        let mut via_gram: Vec<f64> = hermitian_eig(&gram)
            .unwrap()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect();
        via_gram.reverse();
        for (a, b) in s.iter().zip(&via_gram) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn factors_reconstruct_rectangular() {
        let mut rng = SeededRng::new(9);
        for &(r, c) in &[(5usize, 3usize), (3, 5), (4, 4), (1, 3)] {
            let x = random_complex(r, c, &mut rng, 1.0);
            let d = svd(&x).unwrap();
            let k = r.min(c);
            assert_eq!(d.singular_values.len(), k);
            let us = ComplexMatrix::from_fn(r, k, |i, j| d.u[(i, j)] * d.singular_values[j]);
            let back = us.matmul(&d.v.adjoint()).unwrap();
            assert!(back.sub(&x).unwrap().frobenius_norm() < 1e-12 * x.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn warm_start_agrees_with_cold() {
        let mut rng = SeededRng::new(11);
        let x = random_complex(6, 6, &mut rng, 1.0);
        let near = x.add(&random_complex(6, 6, &mut rng, 1e-3)).unwrap();
        let cold = svd(&x).unwrap();
        let warm = svd_warm(&x, &svd(&near).unwrap().v).unwrap();
        for (a, b) in cold.singular_values.iter().zip(&warm.singular_values) {
            assert!((a - b).abs() < 1e-12);
        }
        let s = ComplexMatrix::from_diagonal(&warm.singular_values);
        let back = warm
            .u
            .matmul(&s)
            .unwrap()
            .matmul(&warm.v.adjoint())
            .unwrap();
        assert!(back.max_abs_diff(&x).unwrap() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let d = svd(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(d.singular_values, vec![0.0; 3]);
    }

    fn graded(sigma: &[f64], seed: u64, factor: f64) -> ComplexMatrix {
        let n = sigma.len();
        let u = crate::linalg::random_unitary(n, seed).unwrap();
        let v = crate::linalg::random_unitary(n, seed + 1).unwrap();
        let s: Vec<f64> = sigma.iter().map(|x| x * factor).collect();
        u.matmul(&ComplexMatrix::from_diagonal(&s))
            .unwrap()
            .matmul(&v.adjoint())
            .unwrap()
    }

    #[test]
    fn widely_graded_columns_converge() {
        // Column norms near the underflow edge used to stall the sweeps.
        let sigma = [1.0, 3e-4, 1.5e-73, 8e-90, 1e-200, 0.0, 0.0, 0.0];
        let x = graded(&sigma, 40, 1.0);
        let mut w = x.clone();
        for c in 2..8 {
            for r in 0..8 {
                w[(r, c)] = x[(r, 0)] * sigma[c];
            }
        }
        for m in [x, w] {
            let d = svd(&m).unwrap();
            let back =
                d.u.matmul(&ComplexMatrix::from_diagonal(&d.singular_values))
                    .unwrap()
                    .matmul(&d.v.adjoint())
                    .unwrap();
            assert!(back.max_abs_diff(&m).unwrap() < 1e-13);
        }
    }

    #[test]
    fn tiny_and_huge_scales() {
        let sigma = [3.0, 2.0, 0.5, 0.25];
        for factor in [1e-300, 1e-160, 1e160, 1e300] {
            let d = svd(&graded(&sigma, 7, factor)).unwrap();
            for (a, b) in d.singular_values.iter().zip(&sigma) {
                assert!((a / factor - b).abs() < 1e-12 * b, "{factor}: {a}");
            }
        }
    }
}
