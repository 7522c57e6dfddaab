use proptest::prelude::*;

use schatten_core::linalg::{random_complex, random_unitary, schatten_norm};
use schatten_core::rng::SeededRng;
use schatten_core::ComplexMatrix;

const P_GRID: [f64; 7] = [1.0, 1.1, 1.5, 2.0, 3.0, 8.0, f64::INFINITY];

fn matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SeededRng::new(seed);
    random_complex(n, n, &mut rng, 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unitary_invariance(n in 1usize..7, seed in any::<u64>()) {
        let x = matrix(n, seed);
        let u = random_unitary(n, seed ^ 0x5555).unwrap();
        let v = random_unitary(n, seed ^ 0xaaaa).unwrap();
        let uxv = u.matmul(&x).unwrap().matmul(&v).unwrap();
        for &p in &P_GRID {
            let a = schatten_norm(&x, p).unwrap();
            let b = schatten_norm(&uxv, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a, "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn triangle_inequality(n in 1usize..7, seed in any::<u64>()) {
        let x = matrix(n, seed);
        let y = matrix(n, seed.wrapping_add(1)).scale(0.3.into());
        let sum = x.add(&y).unwrap();
        for &p in &P_GRID {
            let lhs = schatten_norm(&sum, p).unwrap();
            let rhs = schatten_norm(&x, p).unwrap() + schatten_norm(&y, p).unwrap();
            prop_assert!(lhs <= rhs + 1e-9, "p={p}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn nonincreasing_in_p(n in 1usize..7, seed in any::<u64>()) {
        let x = matrix(n, seed);
        let norms: Vec<f64> = P_GRID.iter().map(|&p| schatten_norm(&x, p).unwrap()).collect();
        for pair in norms.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{:?}", norms);
        }
    }

    #[test]
    fn diagonal_projection_contracts(n in 1usize..7, seed in any::<u64>()) {
        let x = matrix(n, seed);
        let d = x.diagonal_part();
        for &p in &P_GRID {
            prop_assert!(schatten_norm(&d, p).unwrap() <= schatten_norm(&x, p).unwrap() + 1e-12);
        }
    }
}

#[test]
fn p2_is_frobenius() {
    for seed in 0..20 {
        let x = matrix(5, seed);
        let a = schatten_norm(&x, 2.0).unwrap();
        let b = x.frobenius_norm();
        assert!((a - b).abs() <= 1e-12 * b);
    }
}

#[test]
fn rejects_sub_unit_exponent() {
    assert!(schatten_norm(&matrix(2, 0), 0.5).is_err());
}
