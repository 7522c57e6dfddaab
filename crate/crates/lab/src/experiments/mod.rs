//! Experiment drivers. Every cell is a pure function of its parameters and a
//! seed derived from the root seed and the cell's own coordinates, so cells
//! can run in any order on any number of threads.

pub mod chain;
pub mod full;
pub mod growth;
pub mod kernel;
pub mod lipschitz;
pub mod reconstruction;
pub mod reduction;
pub mod theorem2;

use schatten_core::funcalc::{split_monotone, strictify, Descriptor, ScalarFunction};
use schatten_core::linalg::{hermitian_eig, random_hermitian};
use schatten_core::rng::derive_seed;
use schatten_core::{EstimatorConfig, Result};

/// Seed streams, one per suite.
pub(crate) mod stream {
    pub const LIPSCHITZ: u64 = 1;
    pub const THEOREM2: u64 = 2;
    pub const GROWTH: u64 = 3;
    pub const RECONSTRUCTION: u64 = 4;
    pub const REDUCTION: u64 = 5;
    pub const RESTRICTION: u64 = 6;
    pub const CHAIN: u64 = 7;
}

/// Seed of the cell at `coordinates` within `stream`.
pub fn cell_seed(root: u64, stream: u64, coordinates: &[u64]) -> u64 {
    coordinates
        .iter()
        .fold(derive_seed(root, stream), |acc, &c| derive_seed(acc, c))
}

/// Estimator settings for one cell: the configured seed mixed with the cell's.
pub fn cell_estimator(config: &EstimatorConfig, seed: u64) -> EstimatorConfig {
    EstimatorConfig {
        seed: derive_seed(config.seed, seed),
        ..*config
    }
}

/// The `kind` tag of a descriptor, e.g. `piecewise-linear`.
pub fn function_kind(descriptor: &Descriptor) -> String {
    serde_json::to_value(descriptor)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_owned))
        .unwrap_or_else(|| "unknown".into())
}

/// Strictly increasing parts whose divided differences stand in for `f`:
/// `f` itself when it is strictly increasing, the strictified `f` when it is
/// nondecreasing, and the strictified `(x ± f)/2` otherwise.
pub fn strictly_increasing_parts(
    f: &ScalarFunction,
    epsilon: f64,
) -> Result<Vec<(&'static str, ScalarFunction)>> {
    if f.is_strictly_increasing() {
        Ok(vec![("f", f.clone())])
    } else if f.is_nondecreasing() {
        Ok(vec![("f", strictify(f, epsilon)?)])
    } else {
        let (g1, g2) = split_monotone(f)?;
        Ok(vec![
            ("g1", strictify(&g1, epsilon)?),
            ("g2", strictify(&g2, epsilon)?),
        ])
    }
}

/// Spectral scale of the sampled Hermitian matrices: eigenvalues land
/// roughly in `[-2, 2]`, where the stock functions have their kinks.
pub fn entry_scale(n: usize) -> f64 {
    1.5 / (n as f64).sqrt()
}

/// Eigenvalues of a seeded random Hermitian matrix, resampled until the
/// spectrum is non-degenerate.
pub fn random_spectrum(n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut attempt = 0;
    loop {
        let a = random_hermitian(n, derive_seed(seed, attempt), entry_scale(n));
        let lambdas = hermitian_eig(&a)?.eigenvalues;
        match schatten_core::funcalc::check_spectrum(&lambdas) {
            Err(schatten_core::Error::DegenerateSpectrum { .. }) if attempt < 16 => attempt += 1,
            Err(e) => return Err(e),
            Ok(()) => return Ok(lambdas),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seeds_depend_on_every_coordinate() {
        let a = cell_seed(1, stream::LIPSCHITZ, &[0, 2]);
        assert_eq!(a, cell_seed(1, stream::LIPSCHITZ, &[0, 2]));
        assert_ne!(a, cell_seed(1, stream::LIPSCHITZ, &[2, 0]));
        assert_ne!(a, cell_seed(1, stream::THEOREM2, &[0, 2]));
        assert_ne!(a, cell_seed(2, stream::LIPSCHITZ, &[0, 2]));
    }

    #[test]
    fn parts_of_the_stock_functions() {
        let parts = strictly_increasing_parts(&ScalarFunction::identity(), 1e-3).unwrap();
        assert_eq!(parts.len(), 1);
        let parts = strictly_increasing_parts(&ScalarFunction::absolute_value(), 1e-3).unwrap();
        assert_eq!(parts.iter().map(|p| p.0).collect::<Vec<_>>(), ["g1", "g2"]);
        assert!(parts.iter().all(|p| p.1.is_strictly_increasing()));
        let parts = strictly_increasing_parts(&ScalarFunction::positive_part(), 1e-3).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].1.is_strictly_increasing());
    }

    #[test]
    fn kinds() {
        assert_eq!(function_kind(&Descriptor::AbsoluteValue), "absolute-value");
        assert_eq!(
            function_kind(&Descriptor::ScaledSine {
                amplitude: 1.0,
                frequency: 1.0
            }),
            "scaled-sine"
        );
    }

    #[test]
    fn spectra_are_ascending() {
        let l = random_spectrum(6, 4).unwrap();
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert!(l.iter().all(|x| x.abs() < 4.0));
    }
}
