//! Steady-state covariance from the Lyapunov equation `P Ω + Ω P† = J Z`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{complex_schur, CMatrix, EigenError, Lu};
use crate::model::QuadraticLindbladSpec;
use crate::structure::build_p;

/// Spectra with some `Re λ` above this are refused.
pub const MARGINAL_RE: f64 = -1e-12;
/// Largest matrix dimension accepted by the Kronecker solver.
pub const KRON_MAX_DIM: usize = 40;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SteadyStateError {
    #[error("marginal spectrum: λ_{i} + conj(λ_{j}) = {divisor} (λ_{i} = {lambda_i}, λ_{j} = {lambda_j})")]
    MarginalSpectrum {
        i: usize,
        j: usize,
        lambda_i: Complex64,
        lambda_j: Complex64,
        divisor: Complex64,
    },
    #[error("vectorized Lyapunov system is singular (min pivot {min_pivot:e})")]
    Singular { min_pivot: f64 },
    #[error("Kronecker solver limited to dimension {KRON_MAX_DIM}, got {dim}")]
    TooLarge { dim: usize },
    #[error("P is {p_rows}x{p_rows} but the right-hand side is {rhs_rows}x{rhs_cols}")]
    DimensionMismatch { p_rows: usize, rhs_rows: usize, rhs_cols: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// `J Z = blockdiag(Λ⁺, Λ⁻)`.
pub fn build_rhs(spec: &QuadraticLindbladSpec) -> CMatrix {
    let l = spec.sites();
    let z = CMatrix::zeros(l, l);
    CMatrix::from_blocks(&[
        &[&spec.lambda_plus().to_complex(), &z],
        &[&z, &spec.lambda_minus().to_complex()],
    ])
}

fn check_dims(p: &CMatrix, rhs: &CMatrix) -> Result<(), SteadyStateError> {
    if !p.is_square() || rhs.rows() != p.rows() || rhs.cols() != p.rows() {
        return Err(SteadyStateError::DimensionMismatch {
            p_rows: p.rows(),
            rhs_rows: rhs.rows(),
            rhs_cols: rhs.cols(),
        });
    }
    Ok(())
}

fn marginal_pair(lambda: &[Complex64]) -> Option<SteadyStateError> {
    let max_re = lambda.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re.is_nan() || max_re <= MARGINAL_RE {
        return None;
    }
    let mut best = (0, 0, f64::INFINITY);
    for (i, a) in lambda.iter().enumerate() {
        for (j, b) in lambda.iter().enumerate() {
            let d = (a + b.conj()).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    let (i, j, _) = best;
    Some(SteadyStateError::MarginalSpectrum {
        i,
        j,
        lambda_i: lambda[i],
        lambda_j: lambda[j],
        divisor: lambda[i] + lambda[j].conj(),
    })
}

/// Solves `P Ω + Ω P† = C` through the complex Schur form of `P`.
///
/// With `P = U T U†` the equation becomes `T Y + Y T† = U† C U`, solved
/// entry by entry from the bottom-right corner, and `Ω = U Y U†`.
pub fn solve_lyapunov(p: &CMatrix, rhs: &CMatrix) -> Result<CMatrix, SteadyStateError> {
    check_dims(p, rhs)?;
    let n = p.rows();
    let schur = complex_schur(p)?;
    let (t, u) = (&schur.t, &schur.z);
    if let Some(err) = marginal_pair(&t.diagonal()) {
        return Err(err);
    }
    let f = &(&u.adjoint() * rhs) * u;
    let mut y = CMatrix::zeros(n, n);
    for j in (0..n).rev() {
        let tjj = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut acc = f[(i, j)];
            for k in i + 1..n {
                acc -= t[(i, k)] * y[(k, j)];
            }
            for k in j + 1..n {
                acc -= y[(i, k)] * t[(j, k)].conj();
            }
            y[(i, j)] = acc / (t[(i, i)] + tjj);
        }
    }
    Ok(&(u * &y) * &u.adjoint())
}

/// Solves `P Ω + Ω P† = C` as the dense linear system
/// `(1 ⊗ P + conj(P) ⊗ 1) vec Ω = vec C`.
pub fn solve_lyapunov_kron(p: &CMatrix, rhs: &CMatrix) -> Result<CMatrix, SteadyStateError> {
    check_dims(p, rhs)?;
    let n = p.rows();
    if n > KRON_MAX_DIM {
        return Err(SteadyStateError::TooLarge { dim: n });
    }
    let e = CMatrix::identity(n);
    let k = &e.kron(p) + &p.conj().kron(&e);
    let scale = k.max_abs().max(f64::MIN_POSITIVE);
    let lu = Lu::new(k);
    let min_pivot = lu.min_pivot();
    if min_pivot <= 1e-13 * scale {
        return Err(SteadyStateError::Singular { min_pivot });
    }
    let x = lu.solve(rhs.as_slice());
    Ok(CMatrix::from_col_major(n, n, x))
}

/// `‖P Ω + Ω P† - C‖_max`.
pub fn lyapunov_residual(p: &CMatrix, omega: &CMatrix, rhs: &CMatrix) -> f64 {
    let lhs = &(p * omega) + &(omega * &p.adjoint());
    (&lhs - rhs).max_abs()
}

/// Quadratic steady-state expectations of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState {
    pub omega: CMatrix,
    /// `O = -Ωᵗ`.
    pub obs: CMatrix,
    /// `⟨α†ᵢ αⱼ⟩`, the top-left block of `O`.
    pub correlations: CMatrix,
    /// `⟨α†ᵢ αᵢ⟩`.
    pub occupations: Vec<f64>,
    /// `⟨αᵢ αⱼ⟩`, the bottom-left block of `O`.
    pub pairings: CMatrix,
    /// `⟨σᶻᵢ⟩ = 2 nᵢ - 1`.
    pub magnetization_z: Vec<f64>,
    /// `‖P Ω + Ω P† - J Z‖_max`.
    pub residual: f64,
    /// `max(‖P‖_max, ‖J Z‖_max)`, the scale for `residual`.
    pub residual_scale: f64,
    /// `max |O_{i,j} + O_{L+j,L+i} - δᵢⱼ|`.
    pub anticommutation_defect: f64,
}

impl SteadyState {
    pub fn relative_residual(&self) -> f64 {
        if self.residual_scale > 0.0 {
            self.residual / self.residual_scale
        } else {
            self.residual
        }
    }
}

/// Solves for the steady state and reads off the physical blocks of `O`.
pub fn observables(spec: &QuadraticLindbladSpec) -> Result<SteadyState, SteadyStateError> {
    let l = spec.sites();
    let p = build_p(spec);
    let rhs = build_rhs(spec);
    let omega = solve_lyapunov(&p, &rhs)?;
    let residual = lyapunov_residual(&p, &omega, &rhs);
    let obs = -&omega.transpose();
    let correlations = obs.block(0, 0, l, l);
    let pairings = obs.block(l, 0, l, l);
    let occupations: Vec<f64> = (0..l).map(|i| correlations[(i, i)].re).collect();
    let magnetization_z = occupations.iter().map(|n| 2.0 * n - 1.0).collect();
    let mut defect: f64 = 0.0;
    for i in 0..l {
        for j in 0..l {
            let delta = if i == j { 1.0 } else { 0.0 };
            let s = obs[(i, j)] + obs[(l + j, l + i)] - delta;
            defect = defect.max(s.norm());
        }
    }
    Ok(SteadyState {
        omega,
        obs,
        correlations,
        occupations,
        pairings,
        magnetization_z,
        residual,
        residual_scale: p.max_abs().max(rhs.max_abs()),
        anticommutation_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::model::{xy_chain_spec, XYChainParams};
    use crate::testutil::{random_spec, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn xx_equal_baths() -> QuadraticLindbladSpec {
        let p = XYChainParams {
            l: 3,
            j: 1.0,
            gamma: 0.0,
            hz: 0.0,
            lp1: 0.3,
            lm1: 0.7,
            lp_l: 0.3,
            lm_l: 0.7,
        };
        xy_chain_spec(&p).unwrap()
    }

    #[test]
    fn rhs_is_block_diagonal() {
        let s = xx_equal_baths();
        let r = build_rhs(&s);
        let d = [0.3, 0.0, 0.3, 0.7, 0.0, 0.7];
        assert_eq!(r, CMatrix::from_diag(&d.map(|x| c(x, 0.0))));
        assert_eq!(build_rhs(&QuadraticLindbladSpec::zero(2)).max_abs(), 0.0);
    }

    #[test]
    fn scalar_equation() {
        let p = CMatrix::from_diag(&[c(-0.4, 1.3)]);
        let rhs = CMatrix::from_diag(&[c(0.2, 0.0)]);
        let om = solve_lyapunov(&p, &rhs).unwrap();
        assert!((om[(0, 0)] - c(0.2 / -0.8, 0.0)).norm() < 1e-15);
        let om = solve_lyapunov_kron(&p, &rhs).unwrap();
        assert!((om[(0, 0)] - c(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn equal_baths_fill_uniformly() {
        let ss = observables(&xx_equal_baths()).unwrap();
        for (n, m) in ss.occupations.iter().zip(&ss.magnetization_z) {
            assert!((n - 0.3).abs() < 1e-12);
            assert!((m + 0.4).abs() < 1e-12);
        }
        assert!(ss.pairings.max_abs() < 1e-12);
        assert!(ss.anticommutation_defect < 1e-12);
        assert!(ss.relative_residual() < 1e-12);
    }

    #[test]
    fn no_injection_without_pairing_gives_vacuum() {
        let p = XYChainParams {
            l: 5,
            j: 1.0,
            gamma: 0.0,
            hz: 0.3,
            lp1: 0.0,
            lm1: 1.0,
            lp_l: 0.0,
            lm_l: 0.5,
        };
        let ss = observables(&xy_chain_spec(&p).unwrap()).unwrap();
        assert!(ss.occupations.iter().all(|n| n.abs() < 1e-10));
        assert!(ss.pairings.max_abs() < 1e-10);
    }

    #[test]
    fn schur_and_kron_agree() {
        let mut r = rng(17);
        for l in [1, 2, 4, 7, 10] {
            let s = random_spec(&mut r, l);
            let p = build_p(&s);
            let rhs = build_rhs(&s);
            let a = solve_lyapunov(&p, &rhs).unwrap();
            let b = solve_lyapunov_kron(&p, &rhs).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-9, "L={l}");
            let scale = p.max_abs().max(rhs.max_abs());
            assert!(lyapunov_residual(&p, &a, &rhs) <= 1e-10 * scale);
        }
    }

    #[test]
    fn random_models_are_physical() {
        let mut r = rng(29);
        for l in 1..=6 {
            let ss = observables(&random_spec(&mut r, l)).unwrap();
            assert!(max_abs_diff(&ss.correlations, &ss.correlations.adjoint()) < 1e-9);
            assert!(max_abs_diff(&ss.pairings, &(-&ss.pairings.transpose())) < 1e-9);
            assert!(ss.anticommutation_defect < 1e-9);
            assert!(ss.occupations.iter().all(|n| (-1e-8..=1.0 + 1e-8).contains(n)));
        }
    }

    #[test]
    fn marginal_spectrum_is_refused() {
        let s = xy_chain_spec(&XYChainParams::with_boundary_couplings(4, 1.0, 1.0, 0.0, 1.0, 1.0)).unwrap();
        let err = observables(&s).unwrap_err();
        match err {
            SteadyStateError::MarginalSpectrum { divisor, .. } => assert!(divisor.norm() < 1e-10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kron_rejects_singular_and_large() {
        let p = CMatrix::from_diag(&[c(0.0, 0.0), c(-1.0, 0.0)]);
        let rhs = CMatrix::identity(2);
        assert!(matches!(solve_lyapunov_kron(&p, &rhs), Err(SteadyStateError::Singular { .. })));
        let big = CMatrix::identity(42);
        assert!(matches!(solve_lyapunov_kron(&big, &big), Err(SteadyStateError::TooLarge { dim: 42 })));
    }

    #[test]
    fn number_conserving_chain_has_no_pairing() {
        let p = XYChainParams {
            l: 6,
            j: 0.8,
            gamma: 0.0,
            hz: 0.4,
            lp1: 0.9,
            lm1: 0.1,
            lp_l: 0.2,
            lm_l: 0.6,
        };
        let ss = observables(&xy_chain_spec(&p).unwrap()).unwrap();
        assert!(ss.pairings.max_abs() < 1e-9);
    }
}
