//! Rational-to-integer reduction of oscillatory symbols, and monotonicity of
//! the multiplier norm under restriction to principal submatrices.

use rayon::prelude::*;
use schatten_core::funcalc::{divided_difference_symbol, strictify};
use schatten_core::linalg::random_complex;
use schatten_core::reduction::{integer_reduction_check, Rational, ReductionReport};
use schatten_core::rng::SeededRng;
use schatten_core::schur::{oscillatory_symbol, restrict_symbol, OscillatorySpec};
use schatten_core::{ComplexMatrix, Result, ScalarFunction, SchurSymbol};

use super::{cell_estimator, cell_seed, random_spectrum, stream};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::estimate::estimate_norm_with_starts;
use crate::report::{Cell, ExperimentReport, Table};

pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const ESTIMATE_TOLERANCE: f64 = 1e-9;
pub const RESTRICTION_RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Allowed excess of the restricted estimate over the full one.
pub const RESTRICTION_SLACK: f64 = 0.02;
pub const MAX_DENOMINATOR: i64 = 9;
pub const MAX_RESTRICTION_SIZE: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCase {
    pub mus: Vec<Rational>,
    pub s: f64,
    pub p: f64,
}

/// The two fixed cases followed by random ones.
pub fn reduction_cases(config: &RunConfig) -> Result<Vec<ReductionCase>> {
    let r = |a, b| Rational::new(a, b);
    let mut cases = vec![
        ReductionCase {
            mus: vec![r(1, 2)?, r(3, 2)?],
            s: 1.0,
            p: 1.5,
        },
        ReductionCase {
            mus: vec![r(1, 3)?, r(1, 2)?, r(1, 1)?],
            s: 5.0,
            p: 3.0,
        },
    ];
    let p_grid = config.suite.interior_p_grid();
    for index in cases.len()..config.suite.reduction_cases {
        let mut rng = SeededRng::new(cell_seed(config.seed, stream::REDUCTION, &[index as u64]));
        let len = 2 + rng.below(5) as usize;
        let mut mus: Vec<Rational> = Vec::with_capacity(len);
        while mus.len() < len {
            let den = 1 + rng.below(MAX_DENOMINATOR as u64) as i64;
            let num = rng.below(8 * den as u64) as i64 - 4 * den;
            let m = r(num, den)?;
            if !mus.contains(&m) {
                mus.push(m);
            }
        }
        mus.sort();
        let s = rng.uniform_range(-20.0, 20.0);
        let p = p_grid[rng.below(p_grid.len() as u64) as usize];
        cases.push(ReductionCase { mus, s, p });
    }
    cases.truncate(config.suite.reduction_cases);
    Ok(cases)
}

fn format_mus(mus: &[Rational]) -> String {
    mus.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run_reduction(config: &RunConfig) -> LabResult<ExperimentReport> {
    let cases = reduction_cases(config)?;
    let outcomes: Vec<ReductionReport> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let estimator = cell_estimator(
                &config.estimator,
                cell_seed(config.seed, stream::REDUCTION, &[i as u64]),
            );
            integer_reduction_check(&c.mus, c.s, c.p, &estimator)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "case",
        "mus",
        "s",
        "p",
        "scale",
        "identity_residual",
        "estimate_rational",
        "estimate_integer",
        "estimate_gap",
        "restriction_residual",
    ]);
    for (i, (c, o)) in cases.iter().zip(&outcomes).enumerate() {
        table.push(vec![
            Cell::from(i),
            Cell::from(format_mus(&c.mus)),
            Cell::from(c.s),
            Cell::from(c.p),
            Cell::Int(o.scale),
            Cell::from(o.identity_residual),
            Cell::from(o.estimate_rational),
            Cell::from(o.estimate_integer),
            Cell::from(o.estimate_gap),
            o.restriction_residual
                .map_or(Cell::Text(String::new()), Cell::from),
        ]);
    }
    let mut report = ExperimentReport::new("integer-reduction", config.echo(), table);
    for (i, o) in outcomes.iter().enumerate() {
        report.check(
            o.identity_residual <= IDENTITY_TOLERANCE,
            Some(i),
            "entrywise identity",
            || format!("residual {:e}", o.identity_residual),
        );
        let difference = (o.estimate_rational - o.estimate_integer).abs();
        report.check(
            difference <= ESTIMATE_TOLERANCE,
            Some(i),
            "estimate equality",
            || format!("{} vs {}", o.estimate_rational, o.estimate_integer),
        );
        if let Some(r) = o.restriction_residual {
            report.check(
                r <= RESTRICTION_RESIDUAL_TOLERANCE,
                Some(i),
                "integer restriction",
                || format!("residual {r:e}"),
            );
        }
    }
    report.summary = serde_json::json!({
        "max_identity_residual": outcomes.iter().map(|o| o.identity_residual).fold(0.0, f64::max),
        "max_estimate_difference": outcomes
            .iter()
            .map(|o| (o.estimate_rational - o.estimate_integer).abs())
            .fold(0.0, f64::max),
    });
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionOutcome {
    pub kind: &'static str,
    pub n: usize,
    pub subset: Vec<usize>,
    pub p: f64,
    pub full: f64,
    pub restricted: f64,
}

/// Copy of `x` (indexed by `subset`) inside an `n × n` zero matrix.
pub fn embed(x: &ComplexMatrix, n: usize, subset: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, &r) in subset.iter().enumerate() {
        for (j, &c) in subset.iter().enumerate() {
            out[(r, c)] = x[(i, j)];
        }
    }
    out
}

fn random_symbol(
    rng: &mut SeededRng,
    index: usize,
    n: usize,
) -> Result<(&'static str, SchurSymbol)> {
    Ok(match index % 3 {
        0 => {
            let mut mus: Vec<f64> = Vec::with_capacity(n);
            while mus.len() < n {
                let m = (1 + rng.below(4 * n as u64)) as f64;
                if !mus.contains(&m) {
                    mus.push(m);
                }
            }
            mus.sort_by(f64::total_cmp);
            let s = rng.uniform_range(-20.0, 20.0);
            (
                "oscillatory",
                oscillatory_symbol(&OscillatorySpec::new(mus, s)?),
            )
        }
        1 => (
            "gaussian",
            SchurSymbol::new(random_complex(n, n, rng, 1.0))?,
        ),
        _ => {
            let f = strictify(&ScalarFunction::positive_part(), 0.1)?;
            let lambdas = random_spectrum(n, rng.next_u64())?;
            (
                "divided-difference",
                divided_difference_symbol(&f, &lambdas)?,
            )
        }
    })
}

/// One `(symbol, subset)` pair. The full estimate also starts from the
/// restricted witness, so it can only lose to the restricted one through
/// the slack.
pub fn restriction_pair(config: &RunConfig, index: usize) -> Result<RestrictionOutcome> {
    let seed = cell_seed(config.seed, stream::RESTRICTION, &[index as u64]);
    let mut rng = SeededRng::new(seed);
    let n = 3 + rng.below(MAX_RESTRICTION_SIZE as u64 - 2) as usize;
    let (kind, phi) = random_symbol(&mut rng, index, n)?;
    let size = 2 + rng.below(n as u64 - 2) as usize;
    let mut subset: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = i + rng.below((n - i) as u64) as usize;
        subset.swap(i, j);
    }
    subset.truncate(size);
    subset.sort_unstable();
    let p_grid = config.suite.interior_p_grid();
    let p = p_grid[rng.below(p_grid.len() as u64) as usize];

    let estimator = cell_estimator(&config.estimator, seed);
    let sub = restrict_symbol(&phi, &subset)?;
    let restricted = estimate_norm_with_starts(&sub, p, &estimator, &[])?;
    let full = estimate_norm_with_starts(
        &phi,
        p,
        &estimator,
        &[embed(&restricted.witness, n, &subset)],
    )?;
    Ok(RestrictionOutcome {
        kind,
        n,
        subset,
        p,
        full: full.value,
        restricted: restricted.value,
    })
}

pub fn run_restriction(config: &RunConfig) -> LabResult<ExperimentReport> {
    let outcomes: Vec<RestrictionOutcome> = (0..config.suite.restriction_pairs)
        .into_par_iter()
        .map(|i| restriction_pair(config, i))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "pair",
        "symbol",
        "n",
        "subset",
        "p",
        "full_estimate",
        "restricted_estimate",
    ]);
    for (i, o) in outcomes.iter().enumerate() {
        let subset = o
            .subset
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        table.push(vec![
            Cell::from(i),
            Cell::from(o.kind),
            Cell::from(o.n),
            Cell::from(subset),
            Cell::from(o.p),
            Cell::from(o.full),
            Cell::from(o.restricted),
        ]);
    }
    let mut report = ExperimentReport::new("restriction", config.echo(), table);
    for (i, o) in outcomes.iter().enumerate() {
        report.check(
            o.restricted <= o.full * (1.0 + RESTRICTION_SLACK),
            Some(i),
            "restriction monotone",
            || format!("restricted {} exceeds full {}", o.restricted, o.full),
        );
    }
    report.summary = serde_json::json!({
        "max_restricted_over_full": outcomes.iter().map(|o| o.restricted / o.full).fold(0.0, f64::max),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        let mut config = RunConfig::default();
        config.estimator.starts = 4;
        config.suite.reduction_cases = 4;
        config.suite.restriction_pairs = 3;
        config
    }

    #[test]
    fn fixed_cases_lead() {
        let cases = reduction_cases(&quick()).unwrap();
        assert_eq!(cases.len(), 4);
        assert_eq!(format_mus(&cases[0].mus), "1/2 3/2");
        assert_eq!(cases[1].s, 5.0);
        assert!(cases.iter().all(|c| c.mus.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn reports_pass() {
        let config = quick();
        let reduction = run_reduction(&config).unwrap();
        assert!(reduction.passed(), "{:?}", reduction.failures);
        let restriction = run_restriction(&config).unwrap();
        assert!(restriction.passed(), "{:?}", restriction.failures);
    }

    #[test]
    fn embedding_places_entries() {
        let x = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let e = embed(&x, 4, &[1, 3]);
        assert_eq!(e[(1, 3)].re, 2.0);
        assert_eq!(e[(3, 1)].re, 3.0);
        assert_eq!(e[(0, 0)].re, 0.0);
    }
}
