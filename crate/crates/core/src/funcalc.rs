//! Scalar 1-Lipschitz functions, matrix functional calculus and
//! divided-difference Schur symbols.

use alloc::boxed::Box;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianMatrix};
use crate::schur::SchurSymbol;
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Slack used when comparing Lipschitz bounds against 1.
const LIPSCHITZ_SLACK: f64 = 1e-12;

/// Relative gap below which two eigenvalues count as coincident.
pub const DEGENERATE_GAP: f64 = 1e-10;

/// Structured description of a real function of one real variable.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Descriptor {
    Identity,
    AbsoluteValue,
    Constant {
        value: f64,
    },
    /// Continuous, with `slopes[j]` on the `j`-th piece (`slopes.len() ==
    /// breakpoints.len() + 1`) and value `offset` at the first breakpoint (at
    /// 0 when there are none). Slopes are clamped to `[-1, 1]`.
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
        #[cfg_attr(feature = "serde", serde(default))]
        offset: f64,
    },
    /// `amplitude · sin(frequency · x)`.
    ScaledSine {
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        amplitude: f64,
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        frequency: f64,
    },
    /// `inner(x − shift) + offset`.
    Shifted {
        inner: Box<Descriptor>,
        #[cfg_attr(feature = "serde", serde(default))]
        shift: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        offset: f64,
    },
    /// `identity_weight · x + inner_weight · inner(x)`.
    Combination {
        identity_weight: f64,
        inner_weight: f64,
        inner: Box<Descriptor>,
    },
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MonotoneFlag {
    General,
    Nondecreasing,
    StrictlyIncreasing,
}

/// A linear piece `(lo, hi, slope)` of a piecewise-linear function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
}

impl Descriptor {
    fn validate(&self) -> Result<()> {
        match self {
            Descriptor::Identity | Descriptor::AbsoluteValue => Ok(()),
            Descriptor::Constant { value } => finite(&[*value]),
            Descriptor::PiecewiseLinear {
                breakpoints,
                slopes,
                offset,
            } => {
                finite(breakpoints)?;
                finite(slopes)?;
                finite(&[*offset])?;
                if slopes.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidDescriptor(
                        "piecewise-linear needs exactly one more slope than breakpoints",
                    ));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidDescriptor(
                        "breakpoints must be strictly ascending",
                    ));
                }
                Ok(())
            }
            Descriptor::ScaledSine {
                amplitude,
                frequency,
            } => finite(&[*amplitude, *frequency]),
            Descriptor::Shifted {
                inner,
                shift,
                offset,
            } => {
                finite(&[*shift, *offset])?;
                inner.validate()
            }
            Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner,
            } => {
                finite(&[*identity_weight, *inner_weight])?;
                inner.validate()
            }
        }
    }

    /// Clamps piecewise-linear slopes into `[-1, 1]`, recursively.
    fn clamped(self) -> Self {
        match self {
            Descriptor::PiecewiseLinear {
                breakpoints,
                slopes,
                offset,
            } => Descriptor::PiecewiseLinear {
                breakpoints,
                slopes: slopes.into_iter().map(|s| s.clamp(-1.0, 1.0)).collect(),
                offset,
            },
            Descriptor::Shifted {
                inner,
                shift,
                offset,
            } => Descriptor::Shifted {
                inner: Box::new(inner.clamped()),
                shift,
                offset,
            },
            Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner,
            } => Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner: Box::new(inner.clamped()),
            },
            other => other,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Descriptor::Identity => x,
            Descriptor::AbsoluteValue => x.abs(),
            Descriptor::Constant { value } => *value,
            Descriptor::PiecewiseLinear {
                breakpoints,
                slopes,
                offset,
            } => eval_piecewise(breakpoints, slopes, *offset, x),
            Descriptor::ScaledSine {
                amplitude,
                frequency,
            } => amplitude * (frequency * x).sin(),
            Descriptor::Shifted {
                inner,
                shift,
                offset,
            } => inner.eval(x - shift) + offset,
            Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner,
            } => identity_weight * x + inner_weight * inner.eval(x),
        }
    }

    /// Bounds `(min, max)` on the derivative wherever it exists.
    fn slope_range(&self) -> (f64, f64) {
        match self {
            Descriptor::Identity => (1.0, 1.0),
            Descriptor::AbsoluteValue => (-1.0, 1.0),
            Descriptor::Constant { .. } => (0.0, 0.0),
            Descriptor::PiecewiseLinear { slopes, .. } => slopes
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
                    (lo.min(s), hi.max(s))
                }),
            Descriptor::ScaledSine {
                amplitude,
                frequency,
            } => {
                let l = (amplitude * frequency).abs();
                (-l, l)
            }
            Descriptor::Shifted { inner, .. } => inner.slope_range(),
            Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner,
            } => {
                let (lo, hi) = inner.slope_range();
                let (a, b) = (inner_weight * lo, inner_weight * hi);
                (identity_weight + a.min(b), identity_weight + a.max(b))
            }
        }
    }

    fn monotone_flag(&self) -> MonotoneFlag {
        let (lo, _) = self.slope_range();
        let strict_by_parts = match self {
            Descriptor::Identity => true,
            Descriptor::Shifted { inner, .. } => {
                inner.monotone_flag() == MonotoneFlag::StrictlyIncreasing
            }
            Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner,
            } => {
                let inner_flag = inner.monotone_flag();
                *identity_weight >= 0.0
                    && *inner_weight >= 0.0
                    && inner_flag >= MonotoneFlag::Nondecreasing
                    && (*identity_weight > 0.0
                        || (*inner_weight > 0.0 && inner_flag == MonotoneFlag::StrictlyIncreasing))
            }
            _ => false,
        };
        if lo > 0.0 || strict_by_parts {
            MonotoneFlag::StrictlyIncreasing
        } else if lo >= 0.0 {
            MonotoneFlag::Nondecreasing
        } else {
            MonotoneFlag::General
        }
    }

    /// Linear pieces covering the real line, or `None` for functions that are
    /// not piecewise linear.
    pub fn pieces(&self) -> Option<Vec<Piece>> {
        let whole = |slope| {
            Some(alloc::vec![Piece {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                slope,
            }])
        };
        match self {
            Descriptor::Identity => whole(1.0),
            Descriptor::Constant { .. } => whole(0.0),
            Descriptor::AbsoluteValue => Some(alloc::vec![
                Piece {
                    lo: f64::NEG_INFINITY,
                    hi: 0.0,
                    slope: -1.0
                },
                Piece {
                    lo: 0.0,
                    hi: f64::INFINITY,
                    slope: 1.0
                },
            ]),
            Descriptor::PiecewiseLinear {
                breakpoints,
                slopes,
                ..
            } => Some(
                slopes
                    .iter()
                    .enumerate()
                    .map(|(j, &slope)| Piece {
                        lo: if j == 0 {
                            f64::NEG_INFINITY
                        } else {
                            breakpoints[j - 1]
                        },
                        hi: breakpoints.get(j).copied().unwrap_or(f64::INFINITY),
                        slope,
                    })
                    .collect(),
            ),
            Descriptor::ScaledSine {
                amplitude,
                frequency,
            } if *amplitude == 0.0 || *frequency == 0.0 => whole(0.0),
            Descriptor::ScaledSine { .. } => None,
            Descriptor::Shifted { inner, shift, .. } => Some(
                inner
                    .pieces()?
                    .into_iter()
                    .map(|p| Piece {
                        lo: p.lo + shift,
                        hi: p.hi + shift,
                        slope: p.slope,
                    })
                    .collect(),
            ),
            Descriptor::Combination {
                identity_weight,
                inner_weight,
                inner,
            } => Some(
                inner
                    .pieces()?
                    .into_iter()
                    .map(|p| Piece {
                        slope: identity_weight + inner_weight * p.slope,
                        ..p
                    })
                    .collect(),
            ),
        }
    }
}

fn finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn eval_piecewise(breakpoints: &[f64], slopes: &[f64], offset: f64, x: f64) -> f64 {
    let Some(&first) = breakpoints.first() else {
        return offset + slopes[0] * x;
    };
    if x <= first {
        return offset + slopes[0] * (x - first);
    }
    let mut value = offset;
    for (j, w) in breakpoints.windows(2).enumerate() {
        if x <= w[1] {
            return value + slopes[j + 1] * (x - w[0]);
        }
        value += slopes[j + 1] * (w[1] - w[0]);
    }
    let last = breakpoints[breakpoints.len() - 1];
    value + slopes[slopes.len() - 1] * (x - last)
}

/// A real function of a real variable with a Lipschitz bound and
/// monotonicity tag derived from its descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    descriptor: Descriptor,
    lipschitz_bound: f64,
    monotone: MonotoneFlag,
}

impl ScalarFunction {
    pub fn new(descriptor: Descriptor) -> Result<Self> {
        descriptor.validate()?;
        let descriptor = descriptor.clamped();
        let (lo, hi) = descriptor.slope_range();
        Ok(Self {
            lipschitz_bound: lo.abs().max(hi.abs()),
            monotone: descriptor.monotone_flag(),
            descriptor,
        })
    }

    pub fn identity() -> Self {
        Self::new(Descriptor::Identity).unwrap()
    }

    pub fn absolute_value() -> Self {
        Self::new(Descriptor::AbsoluteValue).unwrap()
    }

    pub fn sine() -> Self {
        Self::new(Descriptor::ScaledSine {
            amplitude: 1.0,
            frequency: 1.0,
        })
        .unwrap()
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(Descriptor::Constant { value })
    }

    /// `max(x, 0)`.
    pub fn positive_part() -> Self {
        Self::new(Descriptor::PiecewiseLinear {
            breakpoints: alloc::vec![0.0],
            slopes: alloc::vec![0.0, 1.0],
            offset: 0.0,
        })
        .unwrap()
    }

    pub fn piecewise_linear(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        Self::new(Descriptor::PiecewiseLinear {
            breakpoints,
            slopes,
            offset: 0.0,
        })
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn monotone(&self) -> MonotoneFlag {
        self.monotone
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.monotone >= MonotoneFlag::Nondecreasing
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.monotone == MonotoneFlag::StrictlyIncreasing
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.descriptor.eval(x)
    }

    /// A point inside an interval where `|f'| = 1`, with the half-width of a
    /// neighbourhood (capped at 1) on which that slope holds.
    pub fn unit_slope_region(&self) -> Option<(f64, f64)> {
        let pieces = self.descriptor.pieces()?;
        let piece = pieces
            .iter()
            .find(|p| (p.slope.abs() - 1.0).abs() <= LIPSCHITZ_SLACK && p.hi > p.lo)?;
        Some(match (piece.lo.is_finite(), piece.hi.is_finite()) {
            (false, false) => (0.0, 1.0),
            (false, true) => (piece.hi - 2.0, 1.0),
            (true, false) => (piece.lo + 2.0, 1.0),
            (true, true) => {
                let half = 0.5 * (piece.hi - piece.lo);
                (piece.lo + half, half.min(1.0))
            }
        })
    }
}

/// `f(A) = U · diag(f(λ_1), …, f(λ_n)) · U*`.
pub fn apply_function(f: &ScalarFunction, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    if f.descriptor == Descriptor::Identity {
        return Ok(a.clone());
    }
    let decomposition = hermitian_eig(a)?;
    let values: Vec<f64> = decomposition
        .eigenvalues
        .iter()
        .map(|&l| f.eval(l))
        .collect();
    Ok(HermitianMatrix::symmetrized(decomposition.compose(&values)))
}

/// Splits a 1-Lipschitz `f` into nondecreasing 1-Lipschitz parts
/// `g₁ = (x + f)/2`, `g₂ = (x − f)/2` with `f = g₁ − g₂`.
pub fn split_monotone(f: &ScalarFunction) -> Result<(ScalarFunction, ScalarFunction)> {
    if f.lipschitz_bound > 1.0 + LIPSCHITZ_SLACK {
        return Err(Error::LipschitzTooLarge(f.lipschitz_bound));
    }
    let part = |sign: f64| {
        ScalarFunction::new(Descriptor::Combination {
            identity_weight: 0.5,
            inner_weight: 0.5 * sign,
            inner: Box::new(f.descriptor.clone()),
        })
    };
    Ok((part(1.0)?, part(-1.0)?))
}

/// `x ↦ (f(x) + ε x)/(1 + ε)`: strictly increasing whenever `f` is
/// nondecreasing, 1-Lipschitz when `f` is, and within `2εR/(1+ε)` of `f` on
/// `[-R, R]`.
pub fn strictify(f: &ScalarFunction, epsilon: f64) -> Result<ScalarFunction> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if !f.is_nondecreasing() {
        return Err(Error::NotMonotone);
    }
    if f.descriptor == Descriptor::Identity {
        return Ok(f.clone());
    }
    ScalarFunction::new(Descriptor::Combination {
        identity_weight: epsilon / (1.0 + epsilon),
        inner_weight: 1.0 / (1.0 + epsilon),
        inner: Box::new(f.descriptor.clone()),
    })
}

/// Rejects sequences that are not strictly ascending with gaps of at least
/// `DEGENERATE_GAP · max(1, |λ_1|, |λ_n|)`.
pub fn check_spectrum(lambdas: &[f64]) -> Result<()> {
    finite(lambdas)?;
    let Some((&first, &last)) = lambdas.first().zip(lambdas.last()) else {
        return Err(Error::BadShape {
            rows: 0,
            cols: 0,
            len: 0,
        });
    };
    let tolerance = DEGENERATE_GAP * 1f64.max(first.abs()).max(last.abs());
    for (index, w) in lambdas.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap <= 0.0 {
            return Err(Error::NotAscending { index: index + 1 });
        }
        if gap < tolerance {
            return Err(Error::DegenerateSpectrum {
                index: index + 1,
                gap,
                tolerance,
            });
        }
    }
    Ok(())
}

/// `φ_kl = (f(λ_k) − f(λ_l))/(λ_k − λ_l)` off the diagonal, `φ_kk = 0`.
pub fn divided_difference_symbol(f: &ScalarFunction, lambdas: &[f64]) -> Result<SchurSymbol> {
    check_spectrum(lambdas)?;
    let n = lambdas.len();
    let values: Vec<f64> = lambdas.iter().map(|&l| f.eval(l)).collect();
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        for l in (k + 1)..n {
            let q = (values[k] - values[l]) / (lambdas[k] - lambdas[l]);
            m[(k, l)] = C64::new(q, 0.0);
            m[(l, k)] = C64::new(q, 0.0);
        }
    }
    SchurSymbol::new(m)
}
