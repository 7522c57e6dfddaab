use proptest::prelude::*;

use schatten_core::linalg::{conjugate_exponent, random_complex, schatten_norm};
use schatten_core::rng::SeededRng;
use schatten_core::schur::{
    estimate_norm, exact_norm_p2, oscillatory_symbol, restrict_symbol, EstimatorConfig,
    OscillatorySpec, SchurSymbol,
};
use schatten_core::C64;

fn config(seed: u64) -> EstimatorConfig {
    EstimatorConfig {
        starts: 8,
        max_iters: 300,
        tol: 1e-9,
        seed,
    }
}

fn symbol(n: usize, seed: u64) -> SchurSymbol {
    let mut rng = SeededRng::new(seed);
    SchurSymbol::new(random_complex(n, n, &mut rng, 1.0)).unwrap()
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.25), Just(1.5), Just(3.0), Just(4.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witness_reproduces_value(n in 1usize..7, seed in any::<u64>(), p in exponent()) {
        let phi = symbol(n, seed);
        let est = estimate_norm(&phi, p, &config(seed)).unwrap();
        let w = &est.witness;
        let ratio = schatten_norm(&phi.apply(w).unwrap(), p).unwrap() / schatten_norm(w, p).unwrap();
        prop_assert!((ratio - est.value).abs() <= 1e-9 * est.value.max(1e-300));
        prop_assert!((schatten_norm(w, p).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn p2_matches_max_entry(n in 1usize..9, seed in any::<u64>()) {
        let phi = symbol(n, seed);
        let est = estimate_norm(&phi, 2.0, &config(seed)).unwrap();
        prop_assert!((est.value - exact_norm_p2(&phi)).abs() <= 1e-6);
    }

    #[test]
    fn duality_consistency(n in 2usize..7, seed in any::<u64>(), p in exponent()) {
        let phi = symbol(n, seed);
        let q = conjugate_exponent(p);
        let a = estimate_norm(&phi, p, &config(seed)).unwrap().value;
        let b = estimate_norm(&phi.transpose(), q, &config(seed)).unwrap().value;
        prop_assert!((a - b).abs() <= 0.05 * a.max(b), "{a} vs {b}");
    }

    #[test]
    fn restriction_monotone(n in 2usize..7, seed in any::<u64>(), mask in 1u32..64, p in exponent()) {
        let phi = symbol(n, seed);
        let mut indices: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        if indices.is_empty() {
            indices.push(0);
        }
        let sub = restrict_symbol(&phi, &indices).unwrap();
        let full = estimate_norm(&phi, p, &config(seed)).unwrap().value;
        let part = estimate_norm(&sub, p, &config(seed)).unwrap().value;
        prop_assert!(part <= full * 1.02, "{part} > {full}");
    }

    #[test]
    fn triangular_split(n in 2usize..7, seed in any::<u64>(), p in exponent()) {
        let phi = symbol(n, seed);
        let cfg = config(seed);
        let whole = estimate_norm(&phi, p, &cfg).unwrap().value;
        let lower = estimate_norm(&phi.strictly_lower(), p, &cfg).unwrap().value;
        let upper = estimate_norm(&phi.strictly_upper(), p, &cfg).unwrap().value;
        let diag = SchurSymbol::new(phi.coefficients().diagonal_part()).unwrap();
        let diag = estimate_norm(&diag, p, &cfg).unwrap().value;
        prop_assert!(whole <= (lower + upper + diag) * 1.02);
    }

    #[test]
    fn unimodular_factor_is_invisible(n in 1usize..7, seed in any::<u64>(), angle in 0.0f64..6.3, p in exponent()) {
        let phi = symbol(n, seed);
        let rotated = phi.scale(C64::from_polar(1.0, angle));
        let a = estimate_norm(&phi, p, &config(seed)).unwrap().value;
        let b = estimate_norm(&rotated, p, &config(seed)).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }
}

#[test]
fn oscillatory_triangular_split() {
    for &s in &[0.0, 1.0, 5.0] {
        for &p in &[1.5, 4.0] {
            let phi = oscillatory_symbol(&OscillatorySpec::integers(6, s).unwrap());
            let cfg = config(3);
            let whole = estimate_norm(&phi, p, &cfg).unwrap().value;
            let lower = estimate_norm(&phi.strictly_lower(), p, &cfg).unwrap().value;
            let upper = estimate_norm(&phi.strictly_upper(), p, &cfg).unwrap().value;
            assert!(whole <= (lower + upper) * 1.02, "s={s} p={p}");
        }
    }
}

#[test]
fn all_ones_is_identity_map() {
    for &p in &[1.1, 1.5, 3.0, 8.0] {
        let est = estimate_norm(&SchurSymbol::ones(5), p, &config(0)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "p={p}: {}", est.value);
    }
}
