//! Derived matrices of a quadratic Lindbladian.
//!
//! Everything here is a direct block assembly from `(h, g, Λ⁺, Λ⁻)`. The
//! constant matrices `X`, `Y`, `Z` and `K±` are materialized so the symmetry
//! identities can be checked as plain matrix equations.

use num_complex::Complex64;

use crate::linalg::{max_abs_diff, CMatrix};
use crate::model::QuadraticLindbladSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// Tolerance for the `K± P̄ K± = P̄*`, `K± g K± = -g` ansatz checks.
pub const ANSATZ_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum StructureError {
    #[error("sign-alternation ansatz fails: max |K P̄ K - P̄*| = {bar_p:e}, max |K g K + g| = {pairing:e}")]
    AnsatzViolation { bar_p: f64, pairing: f64 },
}

/// `P̄ = (-i h - Λ⁻ᵗ - Λ⁺) / 2`.
pub fn build_bar_p(spec: &QuadraticLindbladSpec) -> CMatrix {
    let l = spec.sites();
    let (h, lp, lm) = (spec.h(), spec.lambda_plus(), spec.lambda_minus());
    CMatrix::from_fn(l, l, |i, j| (-I * h[(i, j)] - lm[(j, i)] - lp[(i, j)]) * HALF)
}

/// `h̄ = (-i h - Λ⁻ᵗ + Λ⁺) / 2`.
pub fn build_h_bar(spec: &QuadraticLindbladSpec) -> CMatrix {
    let l = spec.sites();
    let (h, lp, lm) = (spec.h(), spec.lambda_plus(), spec.lambda_minus());
    CMatrix::from_fn(l, l, |i, j| (-I * h[(i, j)] - lm[(j, i)] + lp[(i, j)]) * HALF)
}

fn pairing_blocks(spec: &QuadraticLindbladSpec) -> (CMatrix, CMatrix) {
    let upper = spec.g().scale(-I * HALF);
    let lower = spec.g().conj().scale(I * HALF);
    (upper, lower)
}

/// The 2L×2L matrix `P = [[P̄, -ig/2], [ig*/2, P̄*]]`.
pub fn build_p(spec: &QuadraticLindbladSpec) -> CMatrix {
    let bar_p = build_bar_p(spec);
    let (up, lo) = pairing_blocks(spec);
    CMatrix::from_blocks(&[&[&bar_p, &up], &[&lo, &bar_p.conj()]])
}

/// `M = [[h̄, -ig/2], [ig*/2, -h̄ᵗ]]`.
pub fn build_m(spec: &QuadraticLindbladSpec) -> CMatrix {
    let h_bar = build_h_bar(spec);
    let (up, lo) = pairing_blocks(spec);
    CMatrix::from_blocks(&[&[&h_bar, &up], &[&lo, &(-&h_bar.transpose())]])
}

/// The dissipative block `J = blockdiag(Λ⁺, -Λ⁻)`.
pub fn build_j_block(spec: &QuadraticLindbladSpec) -> CMatrix {
    let l = spec.sites();
    let zero = CMatrix::zeros(l, l);
    let lp = spec.lambda_plus().to_complex();
    let lm = spec.lambda_minus().to_complex();
    CMatrix::from_blocks(&[&[&lp, &zero], &[&zero, &(-&lm)]])
}

/// The full 4L×4L coefficient matrix of the third-quantized generator.
pub fn build_g_matrix(spec: &QuadraticLindbladSpec) -> CMatrix {
    let l = spec.sites();
    let z = CMatrix::zeros(l, l);
    let hb = build_h_bar(spec);
    let (up, lo) = pairing_blocks(spec);
    let lp = spec.lambda_plus().to_complex();
    let lm = spec.lambda_minus().to_complex();
    let row0: [&CMatrix; 4] = [&hb, &up, &lp, &z];
    let minus_hbt = -&hb.transpose();
    let minus_lm = -&lm;
    let row1: [&CMatrix; 4] = [&lo, &minus_hbt, &z, &minus_lm];
    let lmt = lm.transpose();
    let minus_hbh = -&hb.adjoint();
    let minus_up = -&up;
    let row2: [&CMatrix; 4] = [&lmt, &z, &minus_hbh, &minus_up];
    let minus_lpt = -&lp.transpose();
    let minus_lo = -&lo;
    let hbc = hb.conj();
    let row3: [&CMatrix; 4] = [&z, &minus_lpt, &minus_lo, &hbc];
    CMatrix::from_blocks(&[&row0, &row1, &row2, &row3])
}

/// `X = [[0, 1], [1, 0]]` in L×L blocks.
pub fn build_x(l: usize) -> CMatrix {
    let (z, e) = (CMatrix::zeros(l, l), CMatrix::identity(l));
    CMatrix::from_blocks(&[&[&z, &e], &[&e, &z]])
}

/// `Y = -i [[0, 1], [-1, 0]]` in L×L blocks.
pub fn build_y(l: usize) -> CMatrix {
    let z = CMatrix::zeros(l, l);
    let e = CMatrix::identity(l).scale(-I);
    CMatrix::from_blocks(&[&[&z, &e], &[&(-&e), &z]])
}

/// `Z = diag(1, -1)` in L×L blocks.
pub fn build_z(l: usize) -> CMatrix {
    let z = CMatrix::zeros(l, l);
    let e = CMatrix::identity(l);
    CMatrix::from_blocks(&[&[&e, &z], &[&z, &(-&e)]])
}

/// `K⁺ = diag(1, -1, 1, ...)` and `K⁻ = -K⁺`.
pub fn build_k(sign: Sign, l: usize) -> CMatrix {
    let diag: alloc::vec::Vec<Complex64> = (0..l)
        .map(|i| {
            let alt = if i % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign.as_f64() * alt, 0.0)
        })
        .collect();
    CMatrix::from_diag(&diag)
}

/// `Q± = P̄ - i g K± / 2`, the L×L reduction of `P` valid when the
/// sign-alternation ansatz holds (zero field for XY chains).
pub fn build_q(spec: &QuadraticLindbladSpec, sign: Sign) -> Result<CMatrix, StructureError> {
    let l = spec.sites();
    let bar_p = build_bar_p(spec);
    let k = build_k(sign, l);
    let kpk = &(&k * &bar_p) * &k;
    let kgk = &(&k * spec.g()) * &k;
    let bar_p_defect = max_abs_diff(&kpk, &bar_p.conj());
    let pairing_defect = max_abs_diff(&kgk, &(-spec.g()));
    if bar_p_defect > ANSATZ_TOL || pairing_defect > ANSATZ_TOL {
        return Err(StructureError::AnsatzViolation {
            bar_p: bar_p_defect,
            pairing: pairing_defect,
        });
    }
    let gk = &(spec.g() * &k).scale(I * HALF);
    Ok(&bar_p - gk)
}

/// Max-abs violations of the structural identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryCertificate {
    /// `X P X - P*`.
    pub x_p: f64,
    /// `blockdiag(X,X) G blockdiag(X,X) + Gᵗ`.
    pub x_g: f64,
    /// `[[0,Y],[-Y,0]] G [[0,Y],[-Y,0]] + G*`.
    pub y_g: f64,
    /// `M - J Z - P`.
    pub m_jz: f64,
    /// `G - [[M, J], [-Y Jᵗ Y, Y M* Y]]`.
    pub compact: f64,
}

impl SymmetryCertificate {
    pub fn max_violation(&self) -> f64 {
        [self.x_p, self.x_g, self.y_g, self.m_jz, self.compact]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Every derived matrix of a model, with its symmetry certificate.
#[derive(Clone, Debug)]
pub struct StructureMatrices {
    pub bar_p: CMatrix,
    pub p: CMatrix,
    pub m: CMatrix,
    pub j_block: CMatrix,
    pub g: CMatrix,
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
    pub k_plus: CMatrix,
    pub k_minus: CMatrix,
    /// Present only when the sign-alternation ansatz holds.
    pub q_plus: Option<CMatrix>,
    pub q_minus: Option<CMatrix>,
    pub certificate: SymmetryCertificate,
}

impl StructureMatrices {
    pub fn new(spec: &QuadraticLindbladSpec) -> Self {
        let l = spec.sites();
        let bar_p = build_bar_p(spec);
        let p = build_p(spec);
        let m = build_m(spec);
        let j_block = build_j_block(spec);
        let g = build_g_matrix(spec);
        let (x, y, z) = (build_x(l), build_y(l), build_z(l));
        let certificate = certify(&p, &m, &j_block, &g, &x, &y, &z);
        Self {
            bar_p,
            p,
            m,
            j_block,
            g,
            x,
            y,
            z,
            k_plus: build_k(Sign::Plus, l),
            k_minus: build_k(Sign::Minus, l),
            q_plus: build_q(spec, Sign::Plus).ok(),
            q_minus: build_q(spec, Sign::Minus).ok(),
            certificate,
        }
    }
}

fn certify(p: &CMatrix, m: &CMatrix, j: &CMatrix, g: &CMatrix, x: &CMatrix, y: &CMatrix, z: &CMatrix) -> SymmetryCertificate {
    let n = x.rows();
    let zero = CMatrix::zeros(n, n);
    let xx = CMatrix::from_blocks(&[&[x, &zero], &[&zero, x]]);
    let yy = CMatrix::from_blocks(&[&[&zero, y], &[&(-y), &zero]]);
    let x_p = max_abs_diff(&(&(x * p) * x), &p.conj());
    let x_g = max_abs_diff(&(&(&xx * g) * &xx), &(-&g.transpose()));
    let y_g = max_abs_diff(&(&(&yy * g) * &yy), &(-&g.conj()));
    let m_jz = max_abs_diff(&(m - &(j * z)), p);
    let lower_left = -&(&(y * &j.transpose()) * y);
    let lower_right = &(y * &m.conj()) * y;
    let compact_g = CMatrix::from_blocks(&[&[m, j], &[&lower_left, &lower_right]]);
    let compact = max_abs_diff(&compact_g, g);
    SymmetryCertificate {
        x_p,
        x_g,
        y_g,
        m_jz,
        compact,
    }
}
