//! Randomized search over small matrices as an independent check on the
//! duality iteration. Singular values come from closed forms for 2×2 and
//! 3×3 Gram matrices, so none of the crate's decompositions are involved.

use std::f64::consts::PI;

use schatten_core::rng::SeededRng;
use schatten_core::schur::SchurSymbol;
use schatten_core::C64;

fn gram(x: &[C64], n: usize) -> Vec<C64> {
    let mut g = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = (0..n).map(|k| x[k * n + i].conj() * x[k * n + j]).sum();
        }
    }
    g
}

/// Eigenvalues of the Gram matrix `X*X`.
pub fn gram_eigenvalues(x: &[C64], n: usize) -> Vec<f64> {
    let g = gram(x, n);
    match n {
        2 => {
            let (a, d, b) = (g[0].re, g[3].re, g[1]);
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean + r, (mean - r).max(0.0)]
        }
        3 => {
            let off = g[1].norm_sqr() + g[2].norm_sqr() + g[5].norm_sqr();
            let q = (g[0].re + g[4].re + g[8].re) / 3.0;
            let p2 =
                (g[0].re - q).powi(2) + (g[4].re - q).powi(2) + (g[8].re - q).powi(2) + 2.0 * off;
            let p = (p2 / 6.0).sqrt();
            if p == 0.0 {
                return vec![q; 3];
            }
            let b: Vec<C64> = (0..9)
                .map(|k| {
                    (g[k]
                        - if k % 4 == 0 {
                            C64::new(q, 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        })
                        / p
                })
                .collect();
            let det = b[0] * (b[4] * b[8] - b[5] * b[7]) - b[1] * (b[3] * b[8] - b[5] * b[6])
                + b[2] * (b[3] * b[7] - b[4] * b[6]);
            let r = (0.5 * det.re).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let e1 = q + 2.0 * p * phi.cos();
            let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
            vec![e1, (3.0 * q - e1 - e3).max(0.0), e3.max(0.0)]
        }
        _ => unreachable!(),
    }
}

fn pnorm(x: &[C64], n: usize, p: f64) -> f64 {
    gram_eigenvalues(x, n)
        .iter()
        .map(|&e| e.sqrt().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

fn ratio(phi: &SchurSymbol, x: &[C64], p: f64) -> f64 {
    let n = phi.dim();
    let y: Vec<C64> = (0..n * n).map(|k| phi.get(k / n, k % n) * x[k]).collect();
    pnorm(&y, n, p) / pnorm(x, n, p)
}

fn sample(rng: &mut SeededRng, len: usize) -> Vec<C64> {
    (0..len).map(|_| rng.complex_normal(1.0)).collect()
}

/// Best ratio over `samples` Gaussian matrices, then a shrinking-step random
/// hill climb from the ten best.
pub fn brute_force(phi: &SchurSymbol, p: f64, samples: usize, seed: u64) -> f64 {
    let n = phi.dim();
    let mut rng = SeededRng::new(seed);
    let mut top: Vec<(f64, Vec<C64>)> = Vec::new();
    for _ in 0..samples {
        let x = sample(&mut rng, n * n);
        let r = ratio(phi, &x, p);
        if top.len() < 10 || r > top[top.len() - 1].0 {
            top.push((r, x));
            top.sort_by(|a, b| b.0.total_cmp(&a.0));
            top.truncate(10);
        }
    }
    let mut best = 0.0f64;
    for (mut r, mut x) in top {
        let mut step = 0.3;
        let mut misses = 0;
        while step > 1e-7 {
            let scale = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let trial: Vec<C64> = x
                .iter()
                .map(|z| z + rng.complex_normal(step * scale))
                .collect();
            let t = ratio(phi, &trial, p);
            if t > r {
                r = t;
                x = trial;
                misses = 0;
            } else {
                misses += 1;
                if misses > 60 {
                    step *= 0.5;
                    misses = 0;
                }
            }
        }
        best = best.max(r);
    }
    best
}
