//! Random model generators shared by unit tests.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMatrix, RMatrix};
use crate::model::QuadraticLindbladSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_spec(rng: &mut impl Rng, l: usize) -> QuadraticLindbladSpec {
    let a = CMatrix::from_fn(l, l, |_, _| normal_c(rng));
    let h = CMatrix::from_fn(l, l, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let b = CMatrix::from_fn(l, l, |_, _| normal_c(rng));
    let g = CMatrix::from_fn(l, l, |i, j| (b[(i, j)] - b[(j, i)]) * 0.5);
    let lp = random_psd(rng, l);
    let lm = random_psd(rng, l);
    QuadraticLindbladSpec::new(h, g, lp, lm).unwrap()
}

pub fn random_psd(rng: &mut impl Rng, l: usize) -> RMatrix {
    let a = RMatrix::from_fn(l, l, |_, _| rng.gen_range(-1.0..1.0));
    let mut m = &a * &a.transpose();
    m = m.scale(1.0 / l as f64);
    // Exact symmetry, not just up to rounding.
    RMatrix::from_fn(l, l, |i, j| if i <= j { m[(i, j)] } else { m[(j, i)] })
}

/// Greedy multiset distance: max over `a` of the distance to its matched,
/// not yet used partner in `b`. Infinite when lengths differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used: Vec<bool> = alloc::vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = (usize::MAX, f64::INFINITY);
        for (k, y) in b.iter().enumerate() {
            let d = (x - y).norm();
            if !used[k] && d < best.1 {
                best = (k, d);
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    worst
}
