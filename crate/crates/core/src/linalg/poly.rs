use alloc::vec::Vec;

use num_complex::Complex64;

use super::eigen::{eigenvalues, EigenError};
use super::matrix::CMatrix;

/// Roots of `Σ coeffs[k] z^k` from the eigenvalues of the companion matrix.
///
/// Leading coefficients that are exactly zero are dropped; the caller is
/// responsible for trimming numerically negligible ones.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, EigenError> {
    let zero = Complex64::new(0.0, 0.0);
    let Some(top) = coeffs.iter().rposition(|&c| c != zero) else {
        return Ok(Vec::new());
    };
    let degree = top;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[top];
    let mut companion = CMatrix::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for (i, &c) in coeffs[..degree].iter().enumerate() {
        companion[(i, degree - 1)] = -c / lead;
    }
    eigenvalues(&companion)
}
