//! An explicit kernel `g` with `λ/μ = ∫ g(s) λ^{is} μ^{-is} ds` for `0 < λ ≤ μ`.
//!
//! Writing `x = log(μ/λ) ≥ 0` the identity reads `e^{-x} = ∫ g(s) e^{-isx} ds`,
//! so `g` is the inverse Fourier transform of any profile `h` that equals
//! `e^{-x}` on `x ≥ 0`. We take `h(x) = e^{-x} · smooth_step(x / w)`, which is
//! C^∞, vanishes for `x ≤ −w` and decays exponentially to the right; its
//! transform therefore decays faster than any power of `|s|`, which gives
//! every moment `∫ |s|^m |g(s)| ds` a finite value.
//!
//! `g(s) = (1/2π) ∫ h(x) e^{isx} dx` is sampled on a symmetric `s` grid by
//! composite Simpson quadrature in `x`, and integrals over `s` use trapezoid
//! weights.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Threshold used by [`ResidualTable::check`] and the CLI.
pub const REPRESENTATION_TOLERANCE: f64 = 1e-6;

/// Smallest allowed `x_extent`: `e^{-x_extent}` must be below `1e-14`.
pub const MIN_X_EXTENT: f64 = 32.236_191_301_916_64;

const HIGHEST_MOMENT: u32 = 8;

/// Exact phases are recomputed every this many recurrence steps.
const REANCHOR_EVERY: usize = 256;

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// C^∞ step: 0 on `x ≤ −1`, 1 on `x ≥ 0`, `b(x+1)/(b(x+1) + b(−x))` in
/// between with `b(t) = e^{-1/t}` for `t > 0`.
pub fn smooth_step(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else if x <= -1.0 {
        0.0
    } else {
        let a = bump(x + 1.0);
        a / (a + bump(-x))
    }
}

/// `h(x) = e^{-x} · smooth_step(x)`.
pub fn profile_h(x: f64) -> f64 {
    profile_with_width(x, 1.0)
}

fn profile_with_width(x: f64, width: f64) -> f64 {
    let step = smooth_step(x / width);
    if step == 0.0 {
        0.0
    } else {
        (-x).exp() * step
    }
}

/// Grid parameters of [`build_kernel`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct KernelParams {
    /// Width of the left cutoff of the profile.
    pub cutoff_width: f64,
    pub x_extent: f64,
    pub x_step: f64,
    pub s_extent: f64,
    pub s_step: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            cutoff_width: 1.0,
            x_extent: 40.0,
            x_step: 1e-3,
            s_extent: 240.0,
            s_step: 0.05,
        }
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.cutoff_width,
            self.x_extent,
            self.x_step,
            self.s_extent,
            self.s_step,
        ];
        if !all.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidKernelParams(
                "all grid parameters must be positive and finite",
            ));
        }
        if self.x_extent < MIN_X_EXTENT {
            return Err(Error::InvalidKernelParams(
                "x_extent too small: exp(-x_extent) must be below 1e-14",
            ));
        }
        if self.x_step > self.x_extent + self.cutoff_width {
            return Err(Error::InvalidKernelParams("x_step exceeds the x range"));
        }
        if self.s_step > self.s_extent {
            return Err(Error::InvalidKernelParams("s_step exceeds s_extent"));
        }
        Ok(())
    }

    /// Grid with `s_step` halved and `s_extent` doubled.
    pub fn refined(&self) -> Self {
        Self {
            s_extent: 2.0 * self.s_extent,
            s_step: 0.5 * self.s_step,
            ..*self
        }
    }
}

/// Sampled kernel: points `s_i` (symmetric about 0), values `g(s_i)` and
/// quadrature weights `w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelG {
    pub s_points: Vec<f64>,
    pub values: Vec<C64>,
    pub weights: Vec<f64>,
    /// Parameters as realised on the grid (steps adjusted to divide the ranges).
    pub params: KernelParams,
}

/// Samples `g` on `s = −S, …, S`.
///
/// The `x` range `[−cutoff_width, x_extent]` is split into an even number of
/// Simpson intervals no longer than `x_step`; `s_extent` is rounded to a whole
/// number of `s_step`s.
pub fn build_kernel(params: &KernelParams) -> Result<KernelG> {
    params.validate()?;
    let x0 = -params.cutoff_width;
    let span = params.x_extent - x0;
    let mut intervals = (span / params.x_step).ceil() as usize;
    if intervals % 2 == 1 {
        intervals += 1;
    }
    let dx = span / intervals as f64;
    let weighted_profile: Vec<f64> = (0..=intervals)
        .map(|j| {
            let w = if j == 0 || j == intervals {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * dx / 3.0 * profile_with_width(x0 + j as f64 * dx, params.cutoff_width)
        })
        .collect();

    let half = (params.s_extent / params.s_step).round().max(1.0) as usize;
    let ds = params.s_step;
    let count = 2 * half + 1;
    let mut values = alloc::vec![C64::new(0.0, 0.0); count];
    for j in 0..=half {
        let s = j as f64 * ds;
        let g = fourier_sample(&weighted_profile, x0, dx, s) / (2.0 * PI);
        values[half + j] = g;
        values[half - j] = g.conj();
    }
    let s_points = (0..count).map(|i| (i as f64 - half as f64) * ds).collect();
    let weights = (0..count)
        .map(|i| {
            if i == 0 || i == count - 1 {
                0.5 * ds
            } else {
                ds
            }
        })
        .collect();
    Ok(KernelG {
        s_points,
        values,
        weights,
        params: KernelParams {
            x_step: dx,
            s_extent: half as f64 * ds,
            ..*params
        },
    })
}

/// `Σ_j c_j e^{i s x_j}` with `x_j = x0 + j dx`, by a phase recurrence that is
/// re-anchored to exact values periodically.
fn fourier_sample(weighted: &[f64], x0: f64, dx: f64, s: f64) -> C64 {
    let step = C64::from_polar(1.0, s * dx);
    let mut acc = C64::new(0.0, 0.0);
    let mut phase = C64::new(1.0, 0.0);
    for (j, &c) in weighted.iter().enumerate() {
        if j % REANCHOR_EVERY == 0 {
            phase = C64::from_polar(1.0, s * (x0 + j as f64 * dx));
        }
        if c != 0.0 {
            acc += phase * c;
        }
        phase *= step;
    }
    acc
}

impl KernelG {
    pub fn len(&self) -> usize {
        self.s_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_points.is_empty()
    }

    /// `Σ w_i g(s_i)`: the representation at ratio 1.
    pub fn integral(&self) -> C64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(g, w)| g * *w)
            .sum()
    }

    /// `max_i |g(−s_i) − conj(g(s_i))|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| (self.values[n - 1 - i] - self.values[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `max(|g(s_0)|, |g(s_last)|) / max_i |g(s_i)|`.
    pub fn tail_ratio(&self) -> f64 {
        let peak = self.values.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let ends = self.values[0]
            .norm()
            .max(self.values[self.len() - 1].norm());
        if peak == 0.0 {
            0.0
        } else {
            ends / peak
        }
    }

    /// `Σ w_i |g(s_i)| (1 + |s_i|)²`, the kernel factor of the `C_p` bound.
    pub fn weighted_moment(&self) -> f64 {
        self.iter()
            .map(|(s, g, w)| w * g.norm() * (1.0 + s.abs()).powi(2))
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = (f64, C64, f64)> + '_ {
        self.s_points
            .iter()
            .zip(&self.values)
            .zip(&self.weights)
            .map(|((&s, &g), &w)| (s, g, w))
    }
}

/// `Σ w_i |s_i|^m |g(s_i)|` for `m ≤ 8`.
pub fn kernel_moment(kernel: &KernelG, m: u32) -> Result<f64> {
    if m > HIGHEST_MOMENT {
        return Err(Error::InvalidConfig(
            "moment order above 8 is dominated by the truncated tails",
        ));
    }
    Ok(kernel
        .iter()
        .map(|(s, g, w)| w * s.abs().powi(m as i32) * g.norm())
        .sum())
}

/// `Σ w_i g(s_i) λ^{i s_i} μ^{-i s_i}`, an approximation of `λ/μ`.
///
/// Requires `0 < λ ≤ μ` with `log(μ/λ)` inside the kernel's `x` range.
pub fn evaluate_representation(kernel: &KernelG, lambda: f64, mu: f64) -> Result<C64> {
    for v in [lambda, mu] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NotPositive(v));
        }
    }
    let x = (mu / lambda).ln();
    check_log_ratio(kernel, x)?;
    Ok(representation_at(kernel, x))
}

/// `Σ w_i g(s_i) e^{-i s_i x}`.
pub fn representation_at(kernel: &KernelG, x: f64) -> C64 {
    kernel
        .iter()
        .map(|(s, g, w)| g * C64::from_polar(w, -s * x))
        .sum()
}

pub(crate) fn check_log_ratio(kernel: &KernelG, x: f64) -> Result<()> {
    // A hair of negative slack absorbs rounding at ratio 1.
    if x < -1e-12 || x > kernel.params.x_extent || x.is_nan() {
        return Err(Error::RatioOutOfRange {
            log_ratio: x,
            x_extent: kernel.params.x_extent,
        });
    }
    Ok(())
}

/// 50 log-spaced ratios `λ/μ` from `1e-2` to `1 − 1e-3`.
pub fn standard_ratio_grid() -> Vec<f64> {
    let (a, b) = (1e-2f64.log10(), (1.0 - 1e-3f64).log10());
    (0..50)
        .map(|j| 10f64.powf(a + (b - a) * j as f64 / 49.0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub ratio: f64,
    pub value: C64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualTable {
    pub rows: Vec<ResidualRow>,
}

impl ResidualTable {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.value.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn check(&self, threshold: f64) -> Result<()> {
        let residual = self.max_residual();
        if residual <= threshold {
            Ok(())
        } else {
            Err(Error::KernelTooCoarse {
                residual,
                threshold,
            })
        }
    }
}

/// Representation residuals `|Σ w g λ^{is} μ^{-is} − λ/μ|` at the given
/// ratios (taking `μ = 1`).
pub fn representation_residuals(kernel: &KernelG, ratios: &[f64]) -> Result<ResidualTable> {
    let rows = ratios
        .iter()
        .map(|&ratio| {
            let value = evaluate_representation(kernel, ratio, 1.0)?;
            Ok(ResidualRow {
                ratio,
                value,
                residual: (value - ratio).norm(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ResidualTable { rows })
}
