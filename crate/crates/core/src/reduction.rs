//! Reduction of oscillatory multipliers on rational points to integer points.
//!
//! For rationals `μ_k` with common denominator `N`,
//! `|μ_k − μ_l|^{is} = N^{−is} |Nμ_k − Nμ_l|^{is}`: the two symbols differ by
//! a unimodular constant, so they have the same multiplier norm. After a
//! shift the integers `Nμ_k` index a principal submatrix of `(|k−l|^{is})`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;

use crate::schur::{
    estimate_norm, oscillatory_symbol, restrict_symbol, EstimatorConfig, OscillatorySpec,
};
use crate::{Error, Result, C64};
#[allow(unused_imports)]
use num_traits::Float;

/// Largest shifted integer for which the restriction check builds the full
/// `(|k−l|^{is})` symbol.
pub const RESTRICTION_LIMIT: i64 = 256;

/// Exact fraction with positive denominator, in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::NotRational);
        }
        let g = num.gcd(&den);
        let sign = if den < 0 { -1 } else { 1 };
        Ok(Self {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `a/b`, integers and finite decimals such as `-0.125`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse::<i64>().map_err(|_| Error::NotRational)?;
            let den = b.trim().parse::<i64>().map_err(|_| Error::NotRational)?;
            return Rational::new(num, den);
        }
        if let Ok(n) = s.parse::<i64>() {
            return Rational::new(n, 1);
        }
        let (int_part, frac_part) = s.split_once('.').ok_or(Error::NotRational)?;
        if frac_part.is_empty()
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 15
        {
            return Err(Error::NotRational);
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::NotRational);
        }
        let den = 10i64.pow(frac_part.len() as u32);
        let whole: i64 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| Error::NotRational)?
        };
        let frac: i64 = frac_part.parse().map_err(|_| Error::NotRational)?;
        let magnitude = whole
            .checked_mul(den)
            .and_then(|w| w.checked_add(frac))
            .ok_or(Error::NotRational)?;
        Rational::new(if negative { -magnitude } else { magnitude }, den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    /// Common denominator `N`.
    pub scale: i64,
    /// `N μ_k`.
    pub integers: Vec<i64>,
    /// `max |(|μ_k − μ_l|^{is}) − N^{−is} |Nμ_k − Nμ_l|^{is}|`.
    pub identity_residual: f64,
    pub estimate_rational: f64,
    pub estimate_integer: f64,
    /// `|estimate_rational − estimate_integer| / max(both)`.
    pub estimate_gap: f64,
    /// Entrywise distance between the integer symbol and the matching
    /// principal submatrix of `(|k−l|^{is})_{k,l ≤ max}`; `None` when the
    /// shifted range exceeds [`RESTRICTION_LIMIT`].
    pub restriction_residual: Option<f64>,
}

/// Checks the rational-to-integer reduction for strictly ascending `mus`.
pub fn integer_reduction_check(
    mus: &[Rational],
    s: f64,
    p: f64,
    config: &EstimatorConfig,
) -> Result<ReductionReport> {
    if mus.is_empty() {
        return Err(Error::BadShape {
            rows: 0,
            cols: 0,
            len: 0,
        });
    }
    if let Some(index) = mus.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NotAscending { index: index + 1 });
    }
    let overflow = Error::InvalidConfig("denominators too large");
    let scale = mus
        .iter()
        .try_fold(1i64, |acc, m| acc.checked_mul(m.den / acc.gcd(&m.den)))
        .ok_or(overflow.clone())?;
    let integers: Vec<i64> = mus
        .iter()
        .map(|m| m.num.checked_mul(scale / m.den))
        .collect::<Option<_>>()
        .ok_or(overflow)?;

    let rational_spec = OscillatorySpec::new(mus.iter().map(|m| m.to_f64()).collect(), s)?;
    let integer_spec = OscillatorySpec::new(integers.iter().map(|&k| k as f64).collect(), s)?;
    let rational = oscillatory_symbol(&rational_spec);
    let integer = oscillatory_symbol(&integer_spec);

    let factor = C64::from_polar(1.0, -s * (scale as f64).ln());
    let identity_residual = rational
        .coefficients()
        .max_abs_diff(&integer.coefficients().scale(factor))?;

    let estimate_rational = estimate_norm(&rational, p, config)?.value;
    let estimate_integer = estimate_norm(&integer, p, config)?.value;
    let top = estimate_rational.max(estimate_integer);
    let estimate_gap = if top == 0.0 {
        0.0
    } else {
        (estimate_rational - estimate_integer).abs() / top
    };

    let shifted_max = integers[integers.len() - 1] - integers[0] + 1;
    let restriction_residual = if shifted_max <= RESTRICTION_LIMIT {
        let full = oscillatory_symbol(&OscillatorySpec::integers(shifted_max as usize, s)?);
        let indices: Vec<usize> = integers
            .iter()
            .map(|&k| (k - integers[0]) as usize)
            .collect();
        let sub = restrict_symbol(&full, &indices)?;
        Some(sub.coefficients().max_abs_diff(integer.coefficients())?)
    } else {
        None
    };

    Ok(ReductionReport {
        scale,
        integers,
        identity_residual,
        estimate_rational,
        estimate_integer,
        estimate_gap,
        restriction_residual,
    })
}
