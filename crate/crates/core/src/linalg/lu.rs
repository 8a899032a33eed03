use alloc::vec::Vec;

use num_complex::Complex64;

use super::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// LU factorization with partial pivoting, `P A = L U`, stored in place.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn new(mut a: CMatrix) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut multipliers = Vec::with_capacity(n);
        for k in 0..n {
            let (mut p, mut best) = (k, a[(k, k)].norm());
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[(k, k)];
            if pivot == ZERO {
                continue;
            }
            multipliers.clear();
            for i in k + 1..n {
                let m = a[(i, k)] / pivot;
                a[(i, k)] = m;
                multipliers.push(m);
            }
            for j in k + 1..n {
                let akj = a[(k, j)];
                if akj == ZERO {
                    continue;
                }
                let col = &mut a.col_mut(j)[k + 1..];
                for (aij, &m) in col.iter_mut().zip(&multipliers) {
                    *aij -= m * akj;
                }
            }
        }
        Self {
            factors: a,
            perm,
            swaps,
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Smallest pivot modulus, the usual singularity indicator.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.factors[(i, i)].norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn determinant(&self) -> Complex64 {
        let mut det = if self.swaps % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        for i in 0..self.dim() {
            det *= self.factors[(i, i)];
        }
        det
    }

    /// Solves `A x = b` in place of a copy of `b`. Zero pivots produce
    /// non-finite entries; callers check `min_pivot` first.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            let col = &self.factors.col(j)[j + 1..];
            for (xi, &l) in x[j + 1..].iter_mut().zip(col) {
                *xi -= l * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.factors[(j, j)];
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            let col = &self.factors.col(j)[..j];
            for (xi, &u) in x[..j].iter_mut().zip(col) {
                *xi -= u * xj;
            }
        }
        x
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &CMatrix) -> Complex64 {
    Lu::new(a.clone()).determinant()
}
