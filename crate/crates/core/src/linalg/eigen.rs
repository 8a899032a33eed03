//! Dense non-Hermitian complex eigensolver.
//!
//! The pipeline is the textbook one: optional diagonal balancing, Householder
//! reduction to upper Hessenberg form, then implicitly shifted single-shift QR
//! sweeps with Givens rotations (Wilkinson shift, exceptional shifts every
//! ten stalled sweeps, Ahues-Tisseur deflation test). Eigenvectors come from
//! back substitution on the triangular Schur factor.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Number of stalled sweeps before an exceptional shift is used.
const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    /// QR iteration cap exceeded while the window `lo..=hi` was still active.
    #[error("QR iteration did not converge for the eigenvalue cluster in rows {lo}..={hi} after {iterations} sweeps")]
    NoConvergence { lo: usize, hi: usize, iterations: usize },
}

/// Complex Schur form `A = Z T Z^H` with `T` upper triangular and `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: CMatrix,
    pub z: CMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal()
    }
}

/// Eigenvalues with right eigenvectors (unit 2-norm columns), no ordering.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `max_i ‖A v_i − λ_i v_i‖₂ / ‖A‖_max`.
    pub fn relative_residual(&self, a: &CMatrix) -> f64 {
        let scale = a.max_abs();
        let mut worst: f64 = 0.0;
        for (i, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.col(i);
            let av = a.matvec(v);
            let r: f64 = Float::sqrt(av
                .iter()
                .zip(v)
                .map(|(x, y)| (x - lambda * y).norm_sqr())
                .sum::<f64>());
            worst = worst.max(r);
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

fn check_input(a: &CMatrix) -> Result<(), EigenError> {
    if !a.is_square() {
        return Err(EigenError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    Ok(())
}

/// Eigenvalues and right eigenvectors of a general complex matrix.
///
/// Deterministic for a fixed input. Residuals are at the level of
/// `ε‖A‖·cond` for each eigenpair; defective clusters get (near-)parallel
/// vectors rather than an error.
pub fn eigen_general(a: &CMatrix) -> Result<EigenDecomposition, EigenError> {
    check_input(a)?;
    let n = a.rows();
    let (balanced, scaling) = balance(a);
    let (mut h, mut z) = hessenberg(&balanced, true);
    qr_iterate(&mut h, Some(&mut z), true)?;
    let x = triangular_eigenvectors(&h);
    let mut vectors = &z * &x;
    for j in 0..n {
        let col = vectors.col_mut(j);
        for (v, &d) in col.iter_mut().zip(&scaling) {
            *v *= d;
        }
        let norm: f64 = Float::sqrt(col.iter().map(|v| v.norm_sqr()).sum::<f64>());
        if norm > 0.0 {
            for v in col.iter_mut() {
                *v /= norm;
            }
        }
    }
    Ok(EigenDecomposition {
        values: h.diagonal(),
        vectors,
    })
}

/// Eigenvalues only; skips the Schur vectors and the off-window updates.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>, EigenError> {
    check_input(a)?;
    let (balanced, _) = balance(a);
    let (mut h, _) = hessenberg(&balanced, false);
    qr_iterate(&mut h, None, false)?;
    Ok(h.diagonal())
}

/// Unitary Schur decomposition (no balancing, so `Z` stays unitary).
pub fn complex_schur(a: &CMatrix) -> Result<Schur, EigenError> {
    check_input(a)?;
    let (mut t, mut z) = hessenberg(a, true);
    qr_iterate(&mut t, Some(&mut z), true)?;
    let n = t.rows();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t, z })
}

/// Diagonal similarity `D⁻¹ A D` by powers of two that equalizes row and
/// column norms. Returns the balanced matrix and `diag(D)`.
pub fn balance(a: &CMatrix) -> (CMatrix, Vec<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let mut b = a.clone();
    let mut d = vec![1.0; n];
    for _sweep in 0..100 {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].norm();
                    r += b[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (b, d)
}

/// Householder reduction `A = Q H Q^H`. Returns `(H, Q)`; `Q` is the
/// identity when `want_q` is false.
pub fn hessenberg(a: &CMatrix, want_q: bool) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    let mut v: Vec<Complex64> = Vec::with_capacity(n);
    for k in 0..n.saturating_sub(2) {
        v.clear();
        v.extend((k + 1..n).map(|i| h[(i, k)]));
        let xnorm = Float::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = Float::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if vnorm == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // H <- (I - 2vv^H) H
        for j in k..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(p, vp)| vp.conj() * h[(k + 1 + p, j)])
                .sum();
            let s2 = s * 2.0;
            for (p, vp) in v.iter().enumerate() {
                h[(k + 1 + p, j)] -= vp * s2;
            }
        }
        // H <- H (I - 2vv^H), Q <- Q (I - 2vv^H)
        apply_reflector_right(&mut h, k + 1, &v);
        if want_q {
            apply_reflector_right(&mut q, k + 1, &v);
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn apply_reflector_right(m: &mut CMatrix, c0: usize, v: &[Complex64]) {
    let rows = m.rows();
    let mut s = vec![ZERO; rows];
    for (p, vp) in v.iter().enumerate() {
        let col = m.col(c0 + p);
        for (si, &x) in s.iter_mut().zip(col) {
            *si += x * vp;
        }
    }
    for (p, vp) in v.iter().enumerate() {
        let w = vp.conj() * 2.0;
        let col = m.col_mut(c0 + p);
        for (x, &si) in col.iter_mut().zip(&s) {
            *x -= si * w;
        }
    }
}

/// Complex Givens rotation `[c s; -s̄ c]` mapping `(f, g)` to `(r, 0)`.
#[inline]
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64, Complex64) {
    if g == ZERO {
        return (1.0, ZERO, f);
    }
    let fa = f.norm();
    let ga = g.norm();
    if fa == 0.0 {
        return (0.0, g.conj() / ga, Complex64::new(ga, 0.0));
    }
    let norm = Float::hypot(fa, ga);
    let phase = f / fa;
    (fa / norm, phase * g.conj() / norm, phase * norm)
}

/// Eigenvalue of the trailing 2x2 block `[a b; c d]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let bc = b * c;
    if bc == ZERO {
        return d;
    }
    let p = (a - d) * 0.5;
    let mut disc = (p * p + bc).sqrt();
    if (p.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let denom = p + disc;
    if denom == ZERO {
        d
    } else {
        d - bc / denom
    }
}

/// Reduces an upper Hessenberg matrix to upper triangular form in place.
///
/// With `want_t` the full triangular factor is maintained; otherwise only
/// the active window is updated and only the diagonal is meaningful.
fn qr_iterate(h: &mut CMatrix, mut z: Option<&mut CMatrix>, want_t: bool) -> Result<(), EigenError> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = 30 * n.max(10);
    let mut total_sweeps = 0;

    // `hi` is the last row of the active (not yet deflated) part.
    let mut hi = n - 1;
    loop {
        let mut lo = 0;
        let mut deflated = false;
        for its in 0..=itmax {
            // Look for a negligible subdiagonal entry in rows lo+1..=hi.
            let mut k = hi;
            while k > lo {
                let sub = h[(k, k - 1)];
                if cabs1(sub) <= smlnum {
                    break;
                }
                let mut tst = cabs1(h[(k - 1, k - 1)]) + cabs1(h[(k, k)]);
                if tst == 0.0 {
                    if k >= 2 {
                        tst += cabs1(h[(k - 1, k - 2)]);
                    }
                    if k + 1 < n {
                        tst += cabs1(h[(k + 1, k)]);
                    }
                }
                if cabs1(sub) <= ulp * tst {
                    let up = cabs1(h[(k - 1, k)]);
                    let ab = cabs1(sub).max(up);
                    let ba = cabs1(sub).min(up);
                    let d1 = cabs1(h[(k, k)]);
                    let d2 = cabs1(h[(k - 1, k - 1)] - h[(k, k)]);
                    let aa = d1.max(d2);
                    let bb = d1.min(d2);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            lo = k;
            if lo > 0 {
                h[(lo, lo - 1)] = ZERO;
            }
            if lo >= hi {
                deflated = true;
                break;
            }
            total_sweeps += 1;

            let shift = if its > 0 && its % (2 * EXCEPTIONAL_SHIFT_PERIOD) == 0 {
                h[(lo, lo)] + 0.75 * cabs1(h[(lo + 1, lo)])
            } else if its > 0 && its % EXCEPTIONAL_SHIFT_PERIOD == 0 {
                h[(hi, hi)] + 0.75 * cabs1(h[(hi, hi - 1)])
            } else {
                wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
            };

            let col_end = if want_t { n } else { hi + 1 };
            let row_start = if want_t { 0 } else { lo };
            let mut x = h[(lo, lo)] - shift;
            let mut y = h[(lo + 1, lo)];
            for k in lo..hi {
                if k > lo {
                    x = h[(k, k - 1)];
                    y = h[(k + 1, k - 1)];
                }
                let (c, s, r) = givens(x, y);
                if k > lo {
                    h[(k, k - 1)] = r;
                    h[(k + 1, k - 1)] = ZERO;
                }
                let sc = s.conj();
                for j in k..col_end {
                    let a = h[(k, j)];
                    let b = h[(k + 1, j)];
                    h[(k, j)] = a * c + s * b;
                    h[(k + 1, j)] = b * c - sc * a;
                }
                let row_end = (k + 2).min(hi);
                for i in row_start..=row_end {
                    let a = h[(i, k)];
                    let b = h[(i, k + 1)];
                    h[(i, k)] = a * c + sc * b;
                    h[(i, k + 1)] = b * c - s * a;
                }
                if let Some(z) = z.as_deref_mut() {
                    let rows = z.rows();
                    for i in 0..rows {
                        let a = z[(i, k)];
                        let b = z[(i, k + 1)];
                        z[(i, k)] = a * c + sc * b;
                        z[(i, k + 1)] = b * c - s * a;
                    }
                }
            }
        }
        if !deflated {
            return Err(EigenError::NoConvergence {
                lo,
                hi,
                iterations: total_sweeps,
            });
        }
        if hi == 0 {
            return Ok(());
        }
        hi -= 1;
    }
}

/// Columns `x_k` with `T x_k = t_kk x_k`, `x_k[k] = 1`, zero below `k`.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.rows();
    let ulp = f64::EPSILON;
    let smin = (ulp * t.max_abs()).max(f64::MIN_POSITIVE * (n as f64 / ulp));
    let mut x = CMatrix::zeros(n, n);
    let mut work = vec![ZERO; n];
    for k in 0..n {
        let tkk = t[(k, k)];
        work[..=k].fill(ZERO);
        work[k] = ONE;
        for i in (0..k).rev() {
            let mut sum = ZERO;
            for j in i + 1..=k {
                sum += t[(i, j)] * work[j];
            }
            let mut d = t[(i, i)] - tkk;
            if cabs1(d) < smin {
                d = Complex64::new(smin, 0.0);
            }
            work[i] = -sum / d;
            if cabs1(work[i]) > 1e150 {
                for w in work[i..=k].iter_mut() {
                    *w *= 1e-150;
                }
            }
        }
        x.col_mut(k)[..=k].copy_from_slice(&work[..=k]);
    }
    x
}
