//! Analytic spectra of zero-field XY chains.
//!
//! At zero field `P` splits into the two L×L matrices `Q±`, which are
//! tridiagonal with alternating off-diagonals `d₁, d₂` and boundary-only
//! diagonal. Their characteristic determinants reduce to a scalar equation in
//! an angle θ with `λ² = d₁² + d₂² + 2 d₁ d₂ cos θ`. Substituting `z = e^{iθ}`
//! turns that equation into a polynomial whose roots are found all at once.
//! In the Ising limit one of `d₁, d₂` vanishes and `Q±` fall apart into 1×1
//! and 2×2 blocks with closed-form eigenvalues.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::{Complex64, ComplexFloat};

use crate::linalg::{polynomial_roots, CMatrix, EigenError};
use crate::model::{ModelError, XYChainParams};
use crate::structure::Sign;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `|sin θ|` at or below this makes the closed-form determinant singular.
pub const SIN_THETA_FLOOR: f64 = 1e-12;
/// Off-diagonal magnitudes at or below this count as zero.
pub const COUPLING_FLOOR: f64 = 1e-14;
/// Candidate acceptance: relative Newton step on the characteristic polynomial.
pub const CHARPOLY_ACCEPT: f64 = 1e-6;
/// Accepted roots closer than this are the same root.
pub const DEDUP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `L = 2m + 1`.
    Odd,
    /// `L = 2m`.
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Square root with non-negative real part (ties: non-negative imaginary part).
    Principal,
    Secondary,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("|sin θ| = {sin_theta:e} is too small for the closed-form determinant")]
    SingularTheta { sin_theta: f64 },
    #[error("d₂ vanishes, so d₁/d₂ is undefined")]
    ZeroD2,
    #[error("d₁d₂ = 0: use the Ising block decomposition")]
    DegenerateCoupling,
    #[error("expected {expected} roots, accepted {found} from {} candidates", candidates.len())]
    RootCountMismatch {
        expected: usize,
        found: usize,
        /// Every candidate λ with its relative Newton step.
        candidates: Vec<(Complex64, f64)>,
    },
    #[error("secular polynomial is ill-conditioned: {reason}")]
    PolynomialIllConditioned { reason: &'static str },
    #[error("not an Ising chain: both off-diagonals are non-zero")]
    NotIsing,
    #[error("the reduction to Q± needs zero field, got h_z = {hz}")]
    NonZeroField { hz: f64 },
    #[error("need L >= 2, got {l}")]
    TooShort { l: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Parameters of one bordered 2-Toeplitz matrix `Q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecularParams {
    pub m: usize,
    pub parity: Parity,
    /// Off-diagonal at positions (1,2), (3,4), ...
    pub d1: Complex64,
    /// Off-diagonal at positions (2,3), (4,5), ...
    pub d2: Complex64,
    pub gamma1: f64,
    pub gamma_l: f64,
}

impl SecularParams {
    pub fn new(l: usize, d1: Complex64, d2: Complex64, gamma1: f64, gamma_l: f64) -> Result<Self, AnalyticError> {
        if l < 2 {
            return Err(AnalyticError::TooShort { l });
        }
        let parity = if l % 2 == 0 { Parity::Even } else { Parity::Odd };
        Ok(Self {
            m: l / 2,
            parity,
            d1,
            d2,
            gamma1,
            gamma_l,
        })
    }

    /// `Q±` of a zero-field XY chain: `d₁ = -iJ(1∓γ)/2`, `d₂ = -iJ(1±γ)/2`.
    pub fn from_xy(params: &XYChainParams, sign: Sign) -> Result<Self, AnalyticError> {
        params.validate()?;
        if params.hz != 0.0 {
            return Err(AnalyticError::NonZeroField { hz: params.hz });
        }
        let s = sign.as_f64();
        let d1 = -I * (params.j * (1.0 - s * params.gamma) / 2.0);
        let d2 = -I * (params.j * (1.0 + s * params.gamma) / 2.0);
        Self::new(params.l, d1, d2, params.gamma1(), params.gamma_l())
    }

    pub fn sites(&self) -> usize {
        match self.parity {
            Parity::Odd => 2 * self.m + 1,
            Parity::Even => 2 * self.m,
        }
    }

    /// The same matrix with `d₁` and `d₂` exchanged (the other sign of `Q`).
    pub fn swapped(&self) -> Self {
        Self {
            d1: self.d2,
            d2: self.d1,
            ..*self
        }
    }

    pub fn tridiagonal(&self) -> Tridiagonal {
        let l = self.sites();
        let mut diag = vec![ZERO; l];
        diag[0] -= self.gamma1 / 2.0;
        diag[l - 1] -= self.gamma_l / 2.0;
        let off: Vec<Complex64> = (0..l - 1).map(|k| if k % 2 == 0 { self.d1 } else { self.d2 }).collect();
        Tridiagonal {
            diag,
            upper: off.clone(),
            lower: off,
        }
    }

    pub fn q_matrix(&self) -> CMatrix {
        self.tridiagonal().to_matrix()
    }
}

/// A tridiagonal matrix by its three diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<Complex64>,
    /// `T[k, k+1]`.
    pub upper: Vec<Complex64>,
    /// `T[k+1, k]`.
    pub lower: Vec<Complex64>,
}

impl Tridiagonal {
    /// Reads the three central diagonals; `None` if anything else is non-zero.
    pub fn from_matrix(a: &CMatrix) -> Option<Self> {
        let n = a.rows();
        if !a.is_square() {
            return None;
        }
        for j in 0..n {
            for i in 0..n {
                if i.abs_diff(j) > 1 && a[(i, j)] != ZERO {
                    return None;
                }
            }
        }
        Some(Self {
            diag: a.diagonal(),
            upper: (0..n.saturating_sub(1)).map(|k| a[(k, k + 1)]).collect(),
            lower: (0..n.saturating_sub(1)).map(|k| a[(k + 1, k)]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.len();
        let mut a = CMatrix::from_diag(&self.diag);
        for k in 0..n.saturating_sub(1) {
            a[(k, k + 1)] = self.upper[k];
            a[(k + 1, k)] = self.lower[k];
        }
        a
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.upper)
            .chain(&self.lower)
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// `det(T - λ)` and its λ-derivative, both multiplied by `2^{-log2_scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharpolyValue {
    pub value: Complex64,
    pub derivative: Complex64,
    pub log2_scale: i32,
}

impl CharpolyValue {
    /// Unscaled determinant; may overflow for very large matrices.
    pub fn determinant(&self) -> Complex64 {
        self.value * 2f64.powi(self.log2_scale)
    }

    /// Newton step `det / det'`, independent of the scale.
    pub fn newton_step(&self) -> Complex64 {
        if self.value == ZERO {
            return ZERO;
        }
        self.value / self.derivative
    }
}

const RESCALE_BITS: i32 = 256;

/// `det(T - λ)` by the three-term recurrence, with running rescaling.
pub fn tridiag_charpoly_eval(t: &Tridiagonal, lambda: Complex64) -> CharpolyValue {
    let big = 2f64.powi(RESCALE_BITS);
    let small = 2f64.powi(-RESCALE_BITS);
    // (f_{k-1}, f_{k-2}) and their derivatives.
    let (mut f1, mut f2) = (ONE, ZERO);
    let (mut d1, mut d2) = (ZERO, ZERO);
    let mut scale = 0i32;
    for k in 0..t.len() {
        let a = t.diag[k] - lambda;
        let bc = if k == 0 { ZERO } else { t.upper[k - 1] * t.lower[k - 1] };
        let f = a * f1 - bc * f2;
        let d = a * d1 - f1 - bc * d2;
        (f2, f1, d2, d1) = (f1, f, d1, d);
        let size = f1.norm().max(f2.norm()).max(d1.norm()).max(d2.norm());
        if size > big {
            f1 *= small;
            f2 *= small;
            d1 *= small;
            d2 *= small;
            scale += RESCALE_BITS;
        } else if size < small && size > 0.0 {
            f1 *= big;
            f2 *= big;
            d1 *= big;
            d2 *= big;
            scale -= RESCALE_BITS;
        }
    }
    CharpolyValue {
        value: f1,
        derivative: d1,
        log2_scale: scale,
    }
}

/// Both roots of `λ² = d₁² + d₂² + 2 d₁ d₂ cos θ`, principal first.
pub fn lambda_from_theta(theta: Complex64, d1: Complex64, d2: Complex64) -> (Complex64, Complex64) {
    let w = d1 * d1 + d2 * d2 + d1 * d2 * theta.cos() * 2.0;
    let mut s = w.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        s = -s;
    }
    (s, -s)
}

fn principal_of(lambda: Complex64) -> bool {
    lambda.re > 0.0 || (lambda.re == 0.0 && lambda.im >= 0.0)
}

/// Terms of the bracket, split as `α(θ) + λ β(θ)`, each term listed
/// separately so a relative residual can be formed.
fn bracket_terms(theta: Complex64, lambda: Complex64, p: &SecularParams) -> Result<[Complex64; 4], AnalyticError> {
    let (d1, d2, g1, gl) = (p.d1, p.d2, p.gamma1, p.gamma_l);
    let m = p.m as f64;
    let s = |k: f64| (theta * k).sin();
    Ok(match p.parity {
        Parity::Odd => [
            -d1 * d2 * ((g1 + gl) / 2.0) * s(m + 1.0),
            -d1 * d2 * lambda * s(m + 1.0),
            -lambda * (g1 * gl / 4.0) * s(m),
            -(d1 * d1 * g1 + d2 * d2 * gl) / 2.0 * s(m),
        ],
        Parity::Even => {
            if d2.norm() < COUPLING_FLOOR {
                return Err(AnalyticError::ZeroD2);
            }
            [
                (d2 * d2 + g1 * gl / 4.0 + lambda * ((g1 + gl) / 2.0)) * s(m),
                d1 * d2 * s(m + 1.0),
                d1 / d2 * (g1 * gl / 4.0) * s(m - 1.0),
                ZERO,
            ]
        }
    })
}

/// Closed-form `det(Q - λ)` at an angle θ consistent with λ.
///
/// For odd L the bracket is
/// `-d₁d₂((Γ₁+Γ_L)/2 + λ) sin((m+1)θ) - (Γ₁Γ_Lλ/4 + (d₁²Γ₁ + d₂²Γ_L)/2) sin(mθ)`;
/// for even L it is
/// `(Γ₁Γ_L/4 + d₂² + (Γ₁+Γ_L)λ/2) sin(mθ) + d₁d₂ sin((m+1)θ) + (Γ₁Γ_L/4)(d₁/d₂) sin((m-1)θ)`.
/// Both are multiplied by `(d₁d₂)^{m-1} / sin θ`.
pub fn secular_determinant(theta: Complex64, lambda: Complex64, p: &SecularParams) -> Result<Complex64, AnalyticError> {
    let sin = theta.sin();
    if sin.norm() <= SIN_THETA_FLOOR {
        return Err(AnalyticError::SingularTheta { sin_theta: sin.norm() });
    }
    let bracket: Complex64 = bracket_terms(theta, lambda, p)?.iter().sum();
    let pref = (p.d1 * p.d2).powi(p.m as i32 - 1) / sin;
    Ok(pref * bracket)
}

/// `|bracket| / Σ|terms|` at (θ, λ).
fn relative_bracket(theta: Complex64, lambda: Complex64, p: &SecularParams) -> Result<f64, AnalyticError> {
    let terms = bracket_terms(theta, lambda, p)?;
    let total: Complex64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    Ok(if scale > 0.0 { total.norm() / scale } else { total.norm() })
}

/// Laurent polynomial `Σ c[k] z^{lo + k}`.
#[derive(Clone, Debug)]
struct Laurent {
    lo: i64,
    c: Vec<Complex64>,
}

impl Laurent {
    fn monomial(k: i64, a: Complex64) -> Self {
        Self { lo: k, c: vec![a] }
    }

    /// `sin(kθ) = (z^k - z^{-k}) / 2i`.
    fn sin(k: i64) -> Self {
        let half = Complex64::new(0.0, -0.5);
        Self::monomial(k, half).add(&Self::monomial(-k, -half))
    }

    fn hi(&self) -> i64 {
        self.lo + self.c.len() as i64 - 1
    }

    fn coeff(&self, k: i64) -> Complex64 {
        if k < self.lo || k > self.hi() {
            ZERO
        } else {
            self.c[(k - self.lo) as usize]
        }
    }

    fn add(&self, o: &Self) -> Self {
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi());
        Self {
            lo,
            c: (lo..=hi).map(|k| self.coeff(k) + o.coeff(k)).collect(),
        }
    }

    fn scale(&self, a: Complex64) -> Self {
        Self {
            lo: self.lo,
            c: self.c.iter().map(|x| x * a).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut c = vec![ZERO; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self { lo: self.lo + o.lo, c }
    }
}

/// `α(z)` and `β(z)` with the bracket equal to `α + λ β`.
fn alpha_beta(p: &SecularParams) -> (Laurent, Laurent) {
    let (d1, d2) = (p.d1, p.d2);
    let (g1, gl) = (p.gamma1, p.gamma_l);
    let m = p.m as i64;
    let c = |x: f64| Complex64::new(x, 0.0);
    match p.parity {
        Parity::Odd => {
            let alpha = Laurent::sin(m + 1)
                .scale(-d1 * d2 * ((g1 + gl) / 2.0))
                .add(&Laurent::sin(m).scale(-(d1 * d1 * g1 + d2 * d2 * gl) / 2.0));
            let beta = Laurent::sin(m + 1)
                .scale(-d1 * d2)
                .add(&Laurent::sin(m).scale(c(-g1 * gl / 4.0)));
            (alpha, beta)
        }
        Parity::Even => {
            let alpha = Laurent::sin(m)
                .scale(d2 * d2 + g1 * gl / 4.0)
                .add(&Laurent::sin(m + 1).scale(d1 * d2))
                .add(&Laurent::sin(m - 1).scale(d1 / d2 * (g1 * gl / 4.0)));
            let beta = Laurent::sin(m).scale(c((g1 + gl) / 2.0));
            (alpha, beta)
        }
    }
}

/// Ascending coefficients of `z^k (α² - λ(z)² β²)`, with zero ends trimmed.
fn secular_polynomial(p: &SecularParams) -> Result<Vec<Complex64>, AnalyticError> {
    let (alpha, beta) = alpha_beta(p);
    let (d1, d2) = (p.d1, p.d2);
    // λ² = d₁² + d₂² + d₁d₂ (z + 1/z).
    let w = Laurent::monomial(0, d1 * d1 + d2 * d2)
        .add(&Laurent::monomial(1, d1 * d2))
        .add(&Laurent::monomial(-1, d1 * d2));
    let f = alpha.mul(&alpha).add(&w.mul(&beta).mul(&beta).scale(-ONE));
    let peak = f.c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if !peak.is_finite() || peak <= 0.0 {
        return Err(AnalyticError::PolynomialIllConditioned {
            reason: "polynomial vanishes identically or is not finite",
        });
    }
    let tiny = peak * 1e-15;
    let first = f.c.iter().position(|z| z.norm() > tiny).unwrap_or(0);
    let last = f.c.iter().rposition(|z| z.norm() > tiny).unwrap_or(0);
    let coeffs = f.c[first..=last].to_vec();
    if coeffs.len() < 2 {
        return Err(AnalyticError::PolynomialIllConditioned {
            reason: "polynomial has no roots after trimming",
        });
    }
    Ok(coeffs)
}

/// One accepted eigenvalue of `Q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecularRoot {
    pub theta: Complex64,
    pub lambda: Complex64,
    pub branch: Branch,
    /// `|bracket| / Σ|bracket terms|` at (θ, λ).
    pub det_residual: f64,
    /// `|det(Q-λ) / det'(Q-λ)| / max(1, ‖Q‖_max)`.
    pub charpoly_residual: f64,
}

fn relative_newton(t: &Tridiagonal, lambda: Complex64, scale: f64) -> f64 {
    tridiag_charpoly_eval(t, lambda).newton_step().norm() / scale
}

fn polish(t: &Tridiagonal, mut lambda: Complex64, scale: f64) -> Complex64 {
    for _ in 0..20 {
        let step = tridiag_charpoly_eval(t, lambda).newton_step();
        if !step.is_finite() {
            break;
        }
        lambda -= step;
        if step.norm() <= 1e-16 * scale {
            break;
        }
    }
    lambda
}

/// θ with `cos θ = (λ² - d₁² - d₂²) / 2d₁d₂`, taken on the principal arccos branch.
fn theta_of(lambda: Complex64, d1: Complex64, d2: Complex64) -> Complex64 {
    let cos = (lambda * lambda - d1 * d1 - d2 * d2) / (d1 * d2 * 2.0);
    cos.acos()
}

/// All L eigenvalues of `Q` from the roots of the secular polynomial.
///
/// Each polynomial root `z` yields two candidates `±λ(z)`; a candidate is
/// kept when a Newton step on `det(Q-λ)` is relatively smaller than
/// [`CHARPOLY_ACCEPT`], then polished and deduplicated.
pub fn solve_secular(p: &SecularParams) -> Result<Vec<SecularRoot>, AnalyticError> {
    if (p.d1 * p.d2).norm() <= COUPLING_FLOOR {
        return Err(AnalyticError::DegenerateCoupling);
    }
    let coeffs = secular_polynomial(p)?;
    let zs = polynomial_roots(&coeffs)?;
    if zs.iter().any(|z| !z.is_finite()) {
        return Err(AnalyticError::PolynomialIllConditioned {
            reason: "non-finite polynomial root",
        });
    }
    let t = p.tridiagonal();
    let scale = t.max_abs().max(1.0);
    let mut candidates = Vec::new();
    let mut accepted: Vec<Complex64> = Vec::new();
    for z in zs {
        if z.norm() == 0.0 {
            continue;
        }
        let w = p.d1 * p.d1 + p.d2 * p.d2 + p.d1 * p.d2 * (z + z.inv());
        let s = w.sqrt();
        for lambda in [s, -s] {
            let r = relative_newton(&t, lambda, scale);
            candidates.push((lambda, r));
            if r < CHARPOLY_ACCEPT {
                let polished = polish(&t, lambda, scale);
                if !accepted.iter().any(|a| (a - polished).norm() < DEDUP_TOL) {
                    accepted.push(polished);
                }
            }
        }
    }
    let l = p.sites();
    if accepted.len() != l {
        return Err(AnalyticError::RootCountMismatch {
            expected: l,
            found: accepted.len(),
            candidates,
        });
    }
    accepted.sort_by(cmp_re_im);
    accepted
        .into_iter()
        .map(|lambda| {
            let theta = theta_of(lambda, p.d1, p.d2);
            let det_residual = relative_bracket(theta, lambda, p)?;
            Ok(SecularRoot {
                theta,
                lambda,
                branch: if principal_of(lambda) { Branch::Principal } else { Branch::Secondary },
                det_residual,
                charpoly_residual: relative_newton(&t, lambda, scale),
            })
        })
        .collect()
}

fn cmp_re_im(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Secular roots of `Q⁺` and `Q⁻` for a zero-field XY chain.
pub fn solve_chain(params: &XYChainParams) -> Result<[Vec<SecularRoot>; 2], AnalyticError> {
    Ok([
        solve_secular(&SecularParams::from_xy(params, Sign::Plus)?)?,
        solve_secular(&SecularParams::from_xy(params, Sign::Minus)?)?,
    ])
}

/// Eigenvalues of a tridiagonal matrix whose unreduced blocks are at most 2×2.
fn block_eigenvalues(t: &Tridiagonal) -> Result<Vec<Complex64>, AnalyticError> {
    let n = t.len();
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    while k < n {
        let coupled = k + 1 < n && (t.upper[k] * t.lower[k]).norm() > COUPLING_FLOOR * COUPLING_FLOOR;
        if !coupled {
            out.push(t.diag[k]);
            k += 1;
            continue;
        }
        if k + 2 < n && (t.upper[k + 1] * t.lower[k + 1]).norm() > COUPLING_FLOOR * COUPLING_FLOOR {
            return Err(AnalyticError::NotIsing);
        }
        let (a, b) = (t.diag[k], t.diag[k + 1]);
        let mean = (a + b) / 2.0;
        let half = (a - b) / 2.0;
        let root = (half * half + t.upper[k] * t.lower[k]).sqrt();
        out.push(mean + root);
        out.push(mean - root);
        k += 2;
    }
    Ok(out)
}

/// Union of the spectra of `Q` and its `d₁ ↔ d₂` partner, from their block
/// structure. Requires `d₁d₂ = 0`.
pub fn ising_spectrum(p: &SecularParams) -> Result<Vec<Complex64>, AnalyticError> {
    if (p.d1 * p.d2).norm() > COUPLING_FLOOR {
        return Err(AnalyticError::NotIsing);
    }
    let mut out = block_eigenvalues(&p.tridiagonal())?;
    out.extend(block_eigenvalues(&p.swapped().tridiagonal())?);
    out.sort_by(cmp_re_im);
    Ok(out)
}

/// The closed-form Ising value set
/// `{±iJ, -Γ/2, -Γ/4 ± √(Γ² - 16J²)/4}` for `Γ ∈ {Γ₁, Γ_L}`.
pub fn ising_solution_set(j: f64, gamma1: f64, gamma_l: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, j), Complex64::new(0.0, -j)];
    for g in [gamma1, gamma_l] {
        out.push(Complex64::new(-g / 2.0, 0.0));
        let root = Complex64::new(g * g - 16.0 * j * j, 0.0).sqrt() / 4.0;
        out.push(-g / 4.0 + root);
        out.push(-g / 4.0 - root);
    }
    out
}

/// Distance from `z` to the nearest member of `set`.
pub fn distance_to_set(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|s| (z - s).norm()).fold(f64::INFINITY, f64::min)
}
