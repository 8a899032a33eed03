//! Brute-force reference: the Lindbladian as a dense matrix on the
//! 4^L-dimensional space of density matrices.
//!
//! Density matrices are vectorized by stacking columns, so
//! `vec(A ρ B) = (Bᵗ ⊗ A) vec ρ`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{eigenvalues, CMatrix, EigenError, Lu};
use crate::model::QuadraticLindbladSpec;
use crate::spectrum::{p_eigenvalues, SpectrumError};
use crate::steady_state::{observables, SteadyStateError};

/// Largest L for which the superoperator is built.
pub const MAX_SUPEROPERATOR_SITES: usize = 6;
/// Largest L for which [`oracle_compare`] diagonalizes the superoperator.
pub const MAX_COMPARE_SITES: usize = 5;
/// Membership window for predicted many-body eigenvalues.
pub const MEMBERSHIP_TOL: f64 = 1e-6;
/// Eigenvalues below this times `‖S‖_max` count as zero.
pub const NULL_THRESHOLD: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("L = {l} exceeds the brute-force limit {max}")]
    TooLarge { l: usize, max: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Jordan–Wigner fermion operators on `L` sites.
///
/// Site 1 is the most significant tensor factor; `αᵢ` carries a `σᶻ` string
/// on every site before `i`.
#[derive(Clone, Debug)]
pub struct FockOperators {
    l: usize,
    annihilation: Vec<CMatrix>,
    creation: Vec<CMatrix>,
}

impl FockOperators {
    pub fn new(l: usize) -> Self {
        let lower = CMatrix::from_row_major(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let string = CMatrix::from_diag(&[ONE, -ONE]);
        let id = CMatrix::identity(2);
        let annihilation: Vec<CMatrix> = (0..l)
            .map(|i| {
                (0..l).fold(CMatrix::identity(1), |acc, k| {
                    let f = match k.cmp(&i) {
                        core::cmp::Ordering::Less => &string,
                        core::cmp::Ordering::Equal => &lower,
                        core::cmp::Ordering::Greater => &id,
                    };
                    acc.kron(f)
                })
            })
            .collect();
        let creation = annihilation.iter().map(CMatrix::adjoint).collect();
        Self {
            l,
            annihilation,
            creation,
        }
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        1 << self.l
    }

    /// `αᵢ` (0-based).
    pub fn a(&self, i: usize) -> &CMatrix {
        &self.annihilation[i]
    }

    /// `α†ᵢ` (0-based).
    pub fn a_dag(&self, i: usize) -> &CMatrix {
        &self.creation[i]
    }

    /// Max-abs violation of `{αᵢ, α†ⱼ} = δᵢⱼ` and `{αᵢ, αⱼ} = 0`.
    pub fn anticommutation_defect(&self) -> f64 {
        let e = CMatrix::identity(self.dim());
        let anti = |x: &CMatrix, y: &CMatrix| &(x * y) + &(y * x);
        let mut worst: f64 = 0.0;
        for i in 0..self.l {
            for j in 0..self.l {
                let mixed = anti(self.a(i), self.a_dag(j));
                let target = if i == j { e.clone() } else { CMatrix::zeros(e.rows(), e.cols()) };
                worst = worst.max((&mixed - &target).max_abs());
                worst = worst.max(anti(self.a(i), self.a(j)).max_abs());
            }
        }
        worst
    }

    /// `H = Σ hᵢⱼ α†ᵢαⱼ + ½ Σ (gᵢⱼ α†ᵢα†ⱼ + g*ⱼᵢ αᵢαⱼ)`.
    pub fn hamiltonian(&self, spec: &QuadraticLindbladSpec) -> CMatrix {
        let (h, g) = (spec.h(), spec.g());
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.l {
            for j in 0..self.l {
                if h[(i, j)] != ZERO {
                    out = &out + &(self.a_dag(i) * self.a(j)).scale(h[(i, j)]);
                }
                if g[(i, j)] != ZERO {
                    out = &out + &(self.a_dag(i) * self.a_dag(j)).scale(g[(i, j)] * 0.5);
                }
                if g[(j, i)] != ZERO {
                    out = &out + &(self.a(i) * self.a(j)).scale(g[(j, i)].conj() * 0.5);
                }
            }
        }
        out
    }

    /// `tr(X ρ)`.
    pub fn expectation(x: &CMatrix, rho: &CMatrix) -> Complex64 {
        (x * rho).trace()
    }
}

fn check_size(l: usize, max: usize) -> Result<(), OracleError> {
    if l > max {
        return Err(OracleError::TooLarge { l, max });
    }
    Ok(())
}

/// Adds `r (A ρ B† - ½{B†A, ρ})` to the superoperator.
fn add_dissipator(s: &mut CMatrix, a: &CMatrix, b: &CMatrix, rate: f64, e: &CMatrix) {
    let bda = &b.adjoint() * a;
    let jump = b.conj().kron(a);
    let left = e.kron(&bda);
    let right = bda.transpose().kron(e);
    let r = Complex64::new(rate, 0.0);
    let term = &(&jump - &left.scale(Complex64::new(0.5, 0.0))) - &right.scale(Complex64::new(0.5, 0.0));
    *s = &*s + &term.scale(r);
}

/// Dense Lindbladian superoperator: `-i[H, ·]` plus the dissipator with
/// jump operators `α†ᵢ` at rate matrix `2Λ⁺` and `αᵢ` at `2Λ⁻`.
pub fn build_superoperator(spec: &QuadraticLindbladSpec) -> Result<CMatrix, OracleError> {
    let l = spec.sites();
    check_size(l, MAX_SUPEROPERATOR_SITES)?;
    let fock = FockOperators::new(l);
    Ok(superoperator_with(spec, &fock))
}

fn superoperator_with(spec: &QuadraticLindbladSpec, fock: &FockOperators) -> CMatrix {
    let l = spec.sites();
    let e = CMatrix::identity(fock.dim());
    let h = fock.hamiltonian(spec);
    let minus_i = Complex64::new(0.0, -1.0);
    let mut s = (&e.kron(&h) - &h.transpose().kron(&e)).scale(minus_i);
    let (lp, lm) = (spec.lambda_plus(), spec.lambda_minus());
    for i in 0..l {
        for j in 0..l {
            if lp[(i, j)] != 0.0 {
                add_dissipator(&mut s, fock.a_dag(i), fock.a_dag(j), 2.0 * lp[(i, j)], &e);
            }
            if lm[(i, j)] != 0.0 {
                add_dissipator(&mut s, fock.a(i), fock.a(j), 2.0 * lm[(i, j)], &e);
            }
        }
    }
    s
}

/// Applies a superoperator to a density matrix.
pub fn apply_superoperator(s: &CMatrix, rho: &CMatrix) -> CMatrix {
    let n = rho.rows();
    CMatrix::from_col_major(n, n, s.matvec(rho.as_slice()))
}

/// Unit-trace solution of `S vec ρ = 0`, found by replacing one of the
/// trace-dependent rows of `S` with the trace functional.
pub fn null_state(s: &CMatrix) -> CMatrix {
    let n2 = s.rows();
    let n = (0..=n2).find(|k| k * k >= n2).unwrap_or(0);
    let mut a = s.clone();
    for c in 0..n2 {
        a[(0, c)] = ZERO;
    }
    for k in 0..n {
        a[(0, k * n + k)] = ONE;
    }
    let mut b = vec![ZERO; n2];
    b[0] = ONE;
    let x = Lu::new(a).solve(&b);
    CMatrix::from_col_major(n, n, x)
}

/// One predicted many-body eigenvalue and how well it was found.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub predicted: Complex64,
    pub matched: bool,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NessCheck {
    Compared {
        /// `‖S vec ρ‖_max / ‖S‖_max` of the brute-force steady state.
        state_residual: f64,
        /// Max-abs difference of `⟨α†ᵢαⱼ⟩` and `⟨αᵢαⱼ⟩` between the two routes.
        correlation_diff: f64,
        /// Brute-force occupations.
        occupations: Vec<f64>,
    },
    /// More than one eigenvalue is numerically zero; nothing compared.
    Degenerate { near_zero: usize },
    /// The Lyapunov route refused the model.
    LyapunovFailed(SteadyStateError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub superop_spectrum: Vec<Complex64>,
    pub rapidity_membership: Vec<Membership>,
    pub near_zero: usize,
    pub ness: NessCheck,
}

impl OracleReport {
    pub fn all_members_found(&self) -> bool {
        self.rapidity_membership.iter().all(|m| m.matched)
    }

    pub fn max_membership_distance(&self) -> f64 {
        self.rapidity_membership.iter().map(|m| m.distance).fold(0.0, f64::max)
    }

    pub fn correlation_diff(&self) -> Option<f64> {
        match self.ness {
            NessCheck::Compared { correlation_diff, .. } => Some(correlation_diff),
            _ => None,
        }
    }
}

/// The predicted values `0` and `2μₐ + 2μ_b` for every pair of distinct
/// indices `a < b` into the eigenvalues `μ` of `P`.
pub fn predicted_eigenvalues(lambda_p: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO];
    for a in 0..lambda_p.len() {
        for b in a + 1..lambda_p.len() {
            out.push((lambda_p[a] + lambda_p[b]) * 2.0);
        }
    }
    out
}

/// Compares the normal-mode and Lyapunov routes against the brute-force
/// superoperator.
pub fn oracle_compare(spec: &QuadraticLindbladSpec) -> Result<OracleReport, OracleError> {
    let l = spec.sites();
    check_size(l, MAX_COMPARE_SITES)?;
    let fock = FockOperators::new(l);
    let s = superoperator_with(spec, &fock);
    let spectrum = eigenvalues(&s)?;
    let s_norm = s.max_abs();

    let lambda_p = p_eigenvalues(spec)?;
    let rapidity_membership = predicted_eigenvalues(&lambda_p)
        .into_iter()
        .map(|z| {
            let distance = spectrum.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            Membership {
                predicted: z,
                matched: distance <= MEMBERSHIP_TOL,
                distance,
            }
        })
        .collect();

    let near_zero = spectrum.iter().filter(|w| w.norm() <= NULL_THRESHOLD * s_norm).count();
    let ness = if near_zero != 1 {
        NessCheck::Degenerate { near_zero }
    } else {
        match observables(spec) {
            Err(e) => NessCheck::LyapunovFailed(e),
            Ok(ss) => {
                let rho = null_state(&s);
                let state_residual = apply_superoperator(&s, &rho).max_abs() / s_norm.max(f64::MIN_POSITIVE);
                let mut diff: f64 = 0.0;
                for i in 0..l {
                    for j in 0..l {
                        let c = FockOperators::expectation(&(fock.a_dag(i) * fock.a(j)), &rho);
                        let f = FockOperators::expectation(&(fock.a(i) * fock.a(j)), &rho);
                        diff = diff.max((c - ss.correlations[(i, j)]).norm());
                        diff = diff.max((f - ss.pairings[(i, j)]).norm());
                    }
                }
                let occupations = (0..l)
                    .map(|i| FockOperators::expectation(&(fock.a_dag(i) * fock.a(i)), &rho).re)
                    .collect();
                NessCheck::Compared {
                    state_residual,
                    correlation_diff: diff,
                    occupations,
                }
            }
        }
    };
    Ok(OracleReport {
        superop_spectrum: spectrum,
        rapidity_membership,
        near_zero,
        ness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, RMatrix};
    use crate::model::{xy_chain_spec, XYChainParams};
    use crate::testutil::{multiset_distance, random_spec, rng};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn anticommutation_is_exact() {
        for l in 1..=4 {
            assert_eq!(FockOperators::new(l).anticommutation_defect(), 0.0);
        }
    }

    #[test]
    fn single_mode_decay() {
        let g0 = 0.8;
        let spec = QuadraticLindbladSpec::new(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            RMatrix::zeros(1, 1),
            RMatrix::from_diag(&[g0 / 2.0]),
        )
        .unwrap();
        let ev = eigenvalues(&build_superoperator(&spec).unwrap()).unwrap();
        let expected = [c(0.0, 0.0), c(-g0, 0.0), c(-g0 / 2.0, 0.0), c(-g0 / 2.0, 0.0)];
        assert!(multiset_distance(&ev, &expected) < 1e-12);
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let mut r = rng(2);
        let spec = random_spec(&mut r, 3);
        let s = build_superoperator(&spec).unwrap();
        let n = 8;
        // vec(1)ᵗ S = 0.
        for col in 0..n * n {
            let t: Complex64 = (0..n).map(|k| s[(k * n + k, col)]).sum();
            assert!(t.norm() < 1e-12);
        }
        let rho = CMatrix::from_fn(n, n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let lhs = apply_superoperator(&s, &rho).adjoint();
        let rhs = apply_superoperator(&s, &rho.adjoint());
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn too_large_is_refused() {
        let spec = QuadraticLindbladSpec::zero(7);
        assert_eq!(build_superoperator(&spec).unwrap_err(), OracleError::TooLarge { l: 7, max: 6 });
        let spec = QuadraticLindbladSpec::zero(6);
        assert!(matches!(oracle_compare(&spec), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn routes_agree_on_xy_chain() {
        let p = XYChainParams {
            l: 3,
            j: 1.0,
            gamma: 0.7,
            hz: 0.2,
            lp1: 0.6,
            lm1: 0.4,
            lp_l: 0.1,
            lm_l: 0.4,
        };
        let rep = oracle_compare(&xy_chain_spec(&p).unwrap()).unwrap();
        assert!(rep.all_members_found(), "max distance {}", rep.max_membership_distance());
        assert_eq!(rep.near_zero, 1);
        match rep.ness {
            NessCheck::Compared {
                correlation_diff,
                state_residual,
                ref occupations,
            } => {
                assert!(correlation_diff < 1e-8);
                assert!(state_residual < 1e-12);
                assert!(occupations.iter().all(|n| (0.0..=1.0).contains(n)));
            }
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pairing_without_injection_is_not_vacuum() {
        let p = XYChainParams {
            l: 3,
            j: 1.0,
            gamma: 0.6,
            hz: 0.3,
            lp1: 0.0,
            lm1: 1.0,
            lp_l: 0.0,
            lm_l: 0.5,
        };
        let rep = oracle_compare(&xy_chain_spec(&p).unwrap()).unwrap();
        match rep.ness {
            NessCheck::Compared {
                correlation_diff,
                ref occupations,
                ..
            } => {
                assert!(correlation_diff < 1e-8);
                assert!(occupations.iter().any(|n| *n > 1e-3));
            }
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ising_mode_combinations() {
        let spec = xy_chain_spec(&XYChainParams::with_boundary_couplings(4, 1.0, 1.0, 0.0, 1.0, 1.0)).unwrap();
        let rep = oracle_compare(&spec).unwrap();
        assert!(rep.all_members_found());
        for target in [c(-1.0, 2.0), c(-1.0, -2.0)] {
            assert!(rep.superop_spectrum.iter().any(|w| (w - target).norm() < 1e-6));
        }
    }

    #[test]
    fn zero_model_is_degenerate() {
        let rep = oracle_compare(&QuadraticLindbladSpec::zero(2)).unwrap();
        assert!(rep.superop_spectrum.iter().all(|w| w.norm() == 0.0));
        assert!(rep.all_members_found());
        assert_eq!(rep.ness, NessCheck::Degenerate { near_zero: 16 });
    }

    #[test]
    fn random_models_agree() {
        let mut r = rng(41);
        for l in 1..=3 {
            let rep = oracle_compare(&random_spec(&mut r, l)).unwrap();
            assert!(rep.all_members_found());
            assert!(rep.correlation_diff().unwrap() < 1e-8);
        }
    }
}
