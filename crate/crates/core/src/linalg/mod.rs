//! Dense complex linear algebra: matrices, Hermitian eigendecomposition,
//! singular values and Schatten norms.

mod eig;
mod matrix;
mod norm;
mod random;
mod svd;

pub use eig::{hermitian_eig, SpectralDecomposition};
pub use matrix::{ComplexMatrix, HermitianMatrix};
pub use norm::{conjugate_exponent, schatten_norm, schatten_norm_of_singular_values};
pub use random::{random_complex, random_hermitian, random_unitary};
pub use svd::{singular_values, svd, svd_warm, Svd};

use crate::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Unitary 2×2 block `G` (acting on coordinates `p < q`) such that
/// `G* [[a_pp, a_pq], [conj(a_pq), a_qq]] G` is diagonal.
///
/// `G = diag(1, e^{-iα}) · [[c, s], [-s, c]]` where `a_pq = r e^{iα}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rotation {
    pub pp: C64,
    pub pq: C64,
    pub qp: C64,
    pub qq: C64,
}

impl Rotation {
    /// Requires `a_pq != 0`.
    pub(crate) fn annihilating(app: f64, aqq: f64, apq: C64) -> Self {
        let r = apq.norm();
        let phase = (apq / r).conj();
        let theta = (aqq - app) / (2.0 * r);
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        let t = sign / (theta.abs() + theta.hypot(1.0));
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        Rotation {
            pp: C64::new(c, 0.0),
            pq: C64::new(s, 0.0),
            qp: phase * (-s),
            qq: phase * c,
        }
    }

    /// `(x, y) ← (x g_pp + y g_qp, x g_pq + y g_qq)`: right multiplication of
    /// the pair of columns `[x y]` by `G`.
    #[inline]
    pub(crate) fn apply_right(&self, x: C64, y: C64) -> (C64, C64) {
        (x * self.pp + y * self.qp, x * self.pq + y * self.qq)
    }

    /// Left multiplication of the pair of rows by `G*`.
    #[inline]
    pub(crate) fn apply_left_adjoint(&self, x: C64, y: C64) -> (C64, C64) {
        (
            self.pp.conj() * x + self.qp.conj() * y,
            self.pq.conj() * x + self.qq.conj() * y,
        )
    }
}
