//! The quadratic fermionic Lindbladian and its XY-chain constructor.
//!
//! A model is the quadruple `(h, g, Λ⁺, Λ⁻)`: Hermitian hopping `h`,
//! antisymmetric pairing `g`, and real symmetric non-negative injection and
//! extraction rate matrices. The Lindblad operators implied by the rate
//! matrices are `α†ᵢ` with rate matrix `2Λ⁺` and `αᵢ` with rate matrix `2Λ⁻`.

use num_complex::Complex64;

use crate::linalg::{symmetric_eigenvalues, CMatrix, RMatrix};

/// Absolute tolerance for every structural invariant of a model.
pub const INVARIANT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateMatrix {
    Plus,
    Minus,
}

impl core::fmt::Display for RateMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            RateMatrix::Plus => "lambda_plus",
            RateMatrix::Minus => "lambda_minus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("{matrix} is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        matrix: &'static str,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("{matrix} has non-finite entries")]
    NonFinite { matrix: &'static str },
    #[error("h is not Hermitian (max |h - h†| = {max_violation:e})")]
    NotHermitian { max_violation: f64 },
    #[error("g is not antisymmetric (max |g + gᵗ| = {max_violation:e})")]
    NotAntisymmetric { max_violation: f64 },
    #[error("{matrix} is not symmetric (max violation {max_violation:e})")]
    NotSymmetric { matrix: RateMatrix, max_violation: f64 },
    #[error("{matrix} has a negative eigenvalue {min_eigenvalue:e}")]
    NegativeRateMatrix { matrix: RateMatrix, min_eigenvalue: f64 },
    #[error("invalid chain parameters: {reason}")]
    InvalidParams { reason: &'static str },
}

/// A validated quadratic Lindbladian on `l` fermionic sites.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticLindbladSpec {
    l: usize,
    h: CMatrix,
    g: CMatrix,
    lambda_plus: RMatrix,
    lambda_minus: RMatrix,
}

impl QuadraticLindbladSpec {
    /// Builds and validates a model.
    pub fn new(h: CMatrix, g: CMatrix, lambda_plus: RMatrix, lambda_minus: RMatrix) -> Result<Self, ModelError> {
        let spec = Self {
            l: h.rows(),
            h,
            g,
            lambda_plus,
            lambda_minus,
        };
        validate_spec(spec)
    }

    /// The model with every matrix zero.
    pub fn zero(l: usize) -> Self {
        Self {
            l,
            h: CMatrix::zeros(l, l),
            g: CMatrix::zeros(l, l),
            lambda_plus: RMatrix::zeros(l, l),
            lambda_minus: RMatrix::zeros(l, l),
        }
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn h(&self) -> &CMatrix {
        &self.h
    }

    pub fn g(&self) -> &CMatrix {
        &self.g
    }

    pub fn lambda_plus(&self) -> &RMatrix {
        &self.lambda_plus
    }

    pub fn lambda_minus(&self) -> &RMatrix {
        &self.lambda_minus
    }

    /// `tr(Λ⁺ + Λ⁻)`.
    pub fn total_rate(&self) -> f64 {
        self.lambda_plus.trace() + self.lambda_minus.trace()
    }
}

fn check_dims(name: &'static str, rows: usize, cols: usize, l: usize) -> Result<(), ModelError> {
    if rows != l || cols != l {
        return Err(ModelError::DimensionMismatch {
            matrix: name,
            rows,
            cols,
            expected: l,
        });
    }
    Ok(())
}

fn check_rates(which: RateMatrix, m: &RMatrix) -> Result<(), ModelError> {
    let n = m.rows();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > INVARIANT_TOL {
        return Err(ModelError::NotSymmetric {
            matrix: which,
            max_violation: asym,
        });
    }
    let min = symmetric_eigenvalues(m).first().copied().unwrap_or(0.0);
    if min < -INVARIANT_TOL {
        return Err(ModelError::NegativeRateMatrix {
            matrix: which,
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Checks every model invariant to within [`INVARIANT_TOL`] and hands the
/// model back unchanged.
pub fn validate_spec(spec: QuadraticLindbladSpec) -> Result<QuadraticLindbladSpec, ModelError> {
    let l = spec.l;
    check_dims("h", spec.h.rows(), spec.h.cols(), l)?;
    check_dims("g", spec.g.rows(), spec.g.cols(), l)?;
    check_dims("lambda_plus", spec.lambda_plus.rows(), spec.lambda_plus.cols(), l)?;
    check_dims("lambda_minus", spec.lambda_minus.rows(), spec.lambda_minus.cols(), l)?;
    if !spec.h.is_finite() {
        return Err(ModelError::NonFinite { matrix: "h" });
    }
    if !spec.g.is_finite() {
        return Err(ModelError::NonFinite { matrix: "g" });
    }
    if !spec.lambda_plus.is_finite() {
        return Err(ModelError::NonFinite { matrix: "lambda_plus" });
    }
    if !spec.lambda_minus.is_finite() {
        return Err(ModelError::NonFinite { matrix: "lambda_minus" });
    }

    let mut herm: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for i in 0..l {
        for j in 0..=i {
            herm = herm.max((spec.h[(i, j)] - spec.h[(j, i)].conj()).norm());
            anti = anti.max((spec.g[(i, j)] + spec.g[(j, i)]).norm());
        }
    }
    if herm > INVARIANT_TOL {
        return Err(ModelError::NotHermitian { max_violation: herm });
    }
    // The pairing diagonal must vanish exactly, not just to tolerance.
    let diag_nonzero = (0..l).any(|i| spec.g[(i, i)] != Complex64::new(0.0, 0.0));
    if anti > INVARIANT_TOL || diag_nonzero {
        return Err(ModelError::NotAntisymmetric { max_violation: anti });
    }
    check_rates(RateMatrix::Plus, &spec.lambda_plus)?;
    check_rates(RateMatrix::Minus, &spec.lambda_minus)?;
    Ok(spec)
}

/// Physical parameters of an open XY chain driven at both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XYChainParams {
    pub l: usize,
    pub j: f64,
    /// Anisotropy: 0 is the XX chain, ±1 the Ising chain.
    pub gamma: f64,
    pub hz: f64,
    /// Injection `Λ₁⁺` at site 1.
    pub lp1: f64,
    /// Extraction `Λ₁⁻` at site 1.
    pub lm1: f64,
    /// Injection `Λ_L⁺` at site L.
    pub lp_l: f64,
    /// Extraction `Λ_L⁻` at site L.
    pub lm_l: f64,
}

impl XYChainParams {
    /// Chain with boundary couplings `Γ₁`, `Γ_L` split evenly between
    /// injection and extraction.
    pub fn with_boundary_couplings(l: usize, j: f64, gamma: f64, hz: f64, gamma1: f64, gamma_l: f64) -> Self {
        Self {
            l,
            j,
            gamma,
            hz,
            lp1: gamma1 / 2.0,
            lm1: gamma1 / 2.0,
            lp_l: gamma_l / 2.0,
            lm_l: gamma_l / 2.0,
        }
    }

    /// `Γ₁ = Λ₁⁺ + Λ₁⁻`.
    pub fn gamma1(&self) -> f64 {
        self.lp1 + self.lm1
    }

    /// `Γ_L = Λ_L⁺ + Λ_L⁻`.
    pub fn gamma_l(&self) -> f64 {
        self.lp_l + self.lm_l
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.l < 2 {
            return Err(ModelError::InvalidParams { reason: "chain needs L >= 2" });
        }
        let all = [self.j, self.gamma, self.hz, self.lp1, self.lm1, self.lp_l, self.lm_l];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(ModelError::InvalidParams { reason: "non-finite parameter" });
        }
        if !(-1.0..=1.0).contains(&self.gamma) {
            return Err(ModelError::InvalidParams { reason: "gamma must lie in [-1, 1]" });
        }
        if [self.lp1, self.lm1, self.lp_l, self.lm_l].iter().any(|&r| r < 0.0) {
            return Err(ModelError::InvalidParams { reason: "boundary rates must be non-negative" });
        }
        Ok(())
    }
}

/// Builds the fermionic model of an open XY chain.
///
/// `h` carries `J` on the first off-diagonals and `2h_z` on the diagonal,
/// `g` carries `±Jγ`, and the rate matrices are non-zero only at sites 1
/// and L.
pub fn xy_chain_spec(params: &XYChainParams) -> Result<QuadraticLindbladSpec, ModelError> {
    params.validate()?;
    let l = params.l;
    let mut h = CMatrix::zeros(l, l);
    let mut g = CMatrix::zeros(l, l);
    for i in 0..l {
        h[(i, i)] = Complex64::new(2.0 * params.hz, 0.0);
    }
    for i in 0..l - 1 {
        h[(i, i + 1)] = Complex64::new(params.j, 0.0);
        h[(i + 1, i)] = Complex64::new(params.j, 0.0);
        g[(i, i + 1)] = Complex64::new(params.j * params.gamma, 0.0);
        g[(i + 1, i)] = Complex64::new(-params.j * params.gamma, 0.0);
    }
    let mut lambda_plus = RMatrix::zeros(l, l);
    let mut lambda_minus = RMatrix::zeros(l, l);
    lambda_plus[(0, 0)] = params.lp1;
    lambda_minus[(0, 0)] = params.lm1;
    lambda_plus[(l - 1, l - 1)] = params.lp_l;
    lambda_minus[(l - 1, l - 1)] = params.lm_l;
    QuadraticLindbladSpec::new(h, g, lambda_plus, lambda_minus)
}
