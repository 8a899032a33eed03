//! Normal-master-mode spectrum of `P`: conjugate pairing, rapidities,
//! relaxation gap and gap scans over chain length.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
use num_traits::Float;

pub use crate::linalg::{eigen_general, EigenDecomposition, EigenError};
use crate::linalg::{eigenvalues, CMatrix};
use crate::model::{xy_chain_spec, ModelError, QuadraticLindbladSpec, XYChainParams};
use crate::structure::build_p;

/// Matching window for conjugate partners, relative to `max(1, |λ|)`.
pub const PAIRING_TOL: f64 = 1e-6;
/// Gaps at or below this are treated as zero by the power-law fit.
pub const GAP_FLOOR: f64 = 1e-12;
/// Half-width of the rapidity cluster window around `iJ`, in units of `|J|`.
pub const CLUSTER_WINDOW: f64 = 0.05;

/// Two indices into `lambda_p` whose values are conjugate partners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConjugatePair {
    pub i: usize,
    pub j: usize,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    /// The 2L eigenvalues of `P`.
    pub lambda_p: Vec<Complex64>,
    pub pairs: Vec<ConjugatePair>,
    /// Columns are right eigenvectors, aligned with `lambda_p`.
    pub right_vectors: CMatrix,
    /// `2 λ_P`, aligned with `lambda_p`.
    pub rapidities: Vec<Complex64>,
    pub gap: f64,
    /// `max_i ‖P v_i - λ_i v_i‖ / ‖P‖`.
    pub residual: f64,
}

impl SpectrumResult {
    /// Sum over pairs of the two partner values; equals `tr P`.
    pub fn paired_trace(&self) -> Complex64 {
        self.pairs
            .iter()
            .map(|p| self.lambda_p[p.i] + self.lambda_p[p.j])
            .sum()
    }

    pub fn max_real_part(&self) -> f64 {
        self.lambda_p.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{} eigenvalue(s) without a conjugate partner", unmatched.len())]
    PairingFailure {
        unmatched: Vec<usize>,
        partial: Box<SpectrumResult>,
    },
}

fn cmp_re_im(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Pairs each eigenvalue with its conjugate partner.
///
/// Complex values are matched greedily to the nearest unused value close to
/// their conjugate (ties go to the lower index). Values that are real within
/// the window are their own conjugates; they are paired among themselves in
/// sorted order. Returns the pairs and the indices left without a partner.
pub fn pair_conjugates(values: &[Complex64]) -> (Vec<ConjugatePair>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| cmp_re_im(&values[a], &values[b]).then(a.cmp(&b)));
    let tol = |z: Complex64| PAIRING_TOL * z.norm().max(1.0);
    let is_real = |z: Complex64| z.im.abs() <= tol(z);

    let mut used = alloc::vec![false; values.len()];
    let mut pairs = Vec::with_capacity(values.len() / 2);
    let mut unmatched = Vec::new();
    for &i in &order {
        let z = values[i];
        if used[i] || is_real(z) || z.im < 0.0 {
            continue;
        }
        let target = z.conj();
        let mut best: Option<(usize, f64)> = None;
        for &k in &order {
            if used[k] || k == i || values[k].im >= 0.0 {
                continue;
            }
            let d = (values[k] - target).norm();
            let better = match best {
                None => true,
                Some((bk, bd)) => d < bd || (d == bd && k < bk),
            };
            if better {
                best = Some((k, d));
            }
        }
        match best {
            Some((k, d)) if d <= tol(z) => {
                used[i] = true;
                used[k] = true;
                pairs.push(ConjugatePair { i, j: k, valid: true });
            }
            _ => {}
        }
    }
    let reals: Vec<usize> = order.iter().copied().filter(|&k| is_real(values[k])).collect();
    for chunk in reals.chunks(2) {
        if let [a, b] = *chunk {
            used[a] = true;
            used[b] = true;
            pairs.push(ConjugatePair { i: a, j: b, valid: true });
        }
    }
    for &k in &order {
        if !used[k] {
            unmatched.push(k);
        }
    }
    (pairs, unmatched)
}

/// Slowest single-mode decay rate `min_i(-Re 2λ_i)`, clamped at zero.
pub fn relaxation_gap(lambda_p: &[Complex64]) -> f64 {
    if lambda_p.is_empty() {
        return 0.0;
    }
    let g = lambda_p.iter().map(|z| -2.0 * z.re).fold(f64::INFINITY, f64::min);
    g.max(0.0)
}

/// Full eigen-decomposition of `P` with pairing and gap.
pub fn rapidities(spec: &QuadraticLindbladSpec) -> Result<SpectrumResult, SpectrumError> {
    let p = build_p(spec);
    let dec = eigen_general(&p)?;
    let residual = dec.relative_residual(&p);
    let (mut pairs, unmatched) = pair_conjugates(&dec.values);
    let gap = relaxation_gap(&dec.values);
    let rapidities = dec.values.iter().map(|z| z * 2.0).collect();
    if !unmatched.is_empty() {
        for p in &mut pairs {
            p.valid = false;
        }
        for chunk in unmatched.chunks(2) {
            let (i, j) = (chunk[0], *chunk.get(1).unwrap_or(&chunk[0]));
            pairs.push(ConjugatePair { i, j, valid: false });
        }
    }
    let result = SpectrumResult {
        lambda_p: dec.values,
        pairs,
        right_vectors: dec.vectors,
        rapidities,
        gap,
        residual,
    };
    if unmatched.is_empty() {
        Ok(result)
    } else {
        Err(SpectrumError::PairingFailure {
            unmatched,
            partial: Box::new(result),
        })
    }
}

/// Eigenvalues of `P` only; cheaper than [`rapidities`] when no vectors
/// are needed.
pub fn p_eigenvalues(spec: &QuadraticLindbladSpec) -> Result<Vec<Complex64>, SpectrumError> {
    Ok(eigenvalues(&build_p(spec))?)
}

/// Relaxation gap of an XY chain.
pub fn chain_gap(params: &XYChainParams) -> Result<f64, SpectrumError> {
    let spec = xy_chain_spec(params)?;
    Ok(relaxation_gap(&p_eigenvalues(&spec)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares line through `(ln L, ln gap)`. `None` when fewer than two
/// points are given or any gap is at or below [`GAP_FLOOR`].
pub fn fit_power_law(points: &[(usize, f64)]) -> Option<PowerLawFit> {
    if points.len() < 2 || points.iter().any(|&(_, g)| g.is_nan() || g <= GAP_FLOOR) {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(l, _)| Float::ln(l as f64)).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, g)| Float::ln(g)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(PowerLawFit { slope, intercept, r2 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    pub l: usize,
    pub gap: Result<f64, SpectrumError>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapScan {
    /// One row per requested length, sorted by `l`.
    pub rows: Vec<GapRow>,
    pub fit: Option<PowerLawFit>,
}

impl GapScan {
    /// Assembles a scan from rows computed in any order.
    pub fn from_rows(mut rows: Vec<GapRow>) -> Self {
        rows.sort_by_key(|r| r.l);
        let ok: Vec<(usize, f64)> = rows
            .iter()
            .filter_map(|r| r.gap.as_ref().ok().map(|&g| (r.l, g)))
            .collect();
        let fit = if ok.len() == rows.len() { fit_power_law(&ok) } else { None };
        Self { rows, fit }
    }
}

/// Gap for each chain length, with the template's other parameters fixed.
pub fn gap_scan(template: &XYChainParams, ls: &[usize]) -> GapScan {
    let rows = ls
        .iter()
        .map(|&l| GapRow {
            l,
            gap: chain_gap(&XYChainParams { l, ..*template }),
        })
        .collect();
    GapScan::from_rows(rows)
}

/// Values in the upper half plane within `CLUSTER_WINDOW·|J|` of `iJ`,
/// sorted by imaginary then real part.
pub fn rapidity_cluster(lambda_p: &[Complex64], j: f64) -> Vec<Complex64> {
    let target = Complex64::new(0.0, j);
    let mut out: Vec<Complex64> = lambda_p
        .iter()
        .copied()
        .filter(|z| z.im > 0.0 && (z - target).norm() <= CLUSTER_WINDOW * j.abs())
        .collect();
    out.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    out
}

pub fn min_distance_to(values: &[Complex64], target: Complex64) -> f64 {
    values.iter().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::structure::build_g_matrix;
    use crate::testutil::{multiset_distance, random_spec, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ising4() -> QuadraticLindbladSpec {
        xy_chain_spec(&XYChainParams::with_boundary_couplings(4, 1.0, 1.0, 0.0, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn ising_l4_multiset() {
        let r = rapidities(&ising4()).unwrap();
        let s = 15f64.sqrt() / 4.0;
        let expected = [
            c(-0.5, 0.0),
            c(-0.5, 0.0),
            c(0.0, 1.0),
            c(0.0, -1.0),
            c(-0.25, s),
            c(-0.25, -s),
            c(-0.25, s),
            c(-0.25, -s),
        ];
        assert!(multiset_distance(&r.lambda_p, &expected) < 1e-8);
        assert_eq!(r.pairs.len(), 4);
        assert!(r.pairs.iter().all(|p| p.valid));
        assert!((r.paired_trace() - c(-2.0, 0.0)).norm() < 1e-9);
        assert!(r.gap < 1e-12);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn zero_model() {
        let r = rapidities(&QuadraticLindbladSpec::zero(3)).unwrap();
        assert!(r.lambda_p.iter().all(|z| z.norm() == 0.0));
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn gap_from_values() {
        let v = [c(-0.3, 0.0), c(-0.1, 0.5), c(-0.1, -0.5)];
        assert!((relaxation_gap(&v) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn pairs_reference_conjugates_or_reals() {
        let mut r0 = rng(21);
        for l in 1..=7 {
            let s = random_spec(&mut r0, l);
            let r = rapidities(&s).unwrap();
            assert_eq!(r.pairs.len(), l);
            for p in &r.pairs {
                let (a, b) = (r.lambda_p[p.i], r.lambda_p[p.j]);
                assert!(p.i != p.j);
                let conj_ok = (a - b.conj()).norm() < 1e-6;
                let both_real = a.im.abs() < 1e-6 && b.im.abs() < 1e-6;
                assert!(conj_ok || both_real);
            }
            assert!((r.paired_trace().re + s.total_rate()).abs() < 1e-9);
            assert!(r.max_real_part() <= 1e-10);
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn unmatched_value_is_reported() {
        let (pairs, unmatched) = pair_conjugates(&[c(-1.0, 1.0), c(-1.0, -1.0), c(-2.0, 0.5)]);
        assert_eq!(pairs, [ConjugatePair { i: 0, j: 1, valid: true }]);
        assert_eq!(unmatched, [2]);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let v = [c(0.0, 1.0), c(0.0, -1.0), c(0.0, -1.0), c(0.0, 1.0)];
        let (pairs, unmatched) = pair_conjugates(&v);
        assert!(unmatched.is_empty());
        assert_eq!(pairs[0], ConjugatePair { i: 0, j: 1, valid: true });
        assert_eq!(pairs[1], ConjugatePair { i: 3, j: 2, valid: true });
    }

    #[test]
    fn g_spectrum_is_quadrupled_p_spectrum() {
        let mut r0 = rng(8);
        let s = random_spec(&mut r0, 4);
        let lp = rapidities(&s).unwrap().lambda_p;
        let mut expected = Vec::new();
        for z in &lp {
            expected.push(*z);
            expected.push(-z);
        }
        let eg = eigenvalues(&build_g_matrix(&s)).unwrap();
        assert!(multiset_distance(&eg, &expected) < 1e-8);
    }

    #[test]
    fn vanishing_field_gives_no_fit() {
        let t = XYChainParams::with_boundary_couplings(2, 1.0, 1.0, 0.0, 1.0, 1.0);
        let scan = gap_scan(&t, &[10, 8, 6]);
        assert_eq!(scan.rows.iter().map(|r| r.l).collect::<Vec<_>>(), [6, 8, 10]);
        assert!(scan.rows.iter().all(|r| *r.gap.as_ref().unwrap() < 1e-12));
        assert!(scan.fit.is_none());
    }

    #[test]
    fn decoupled_sites_have_zero_gap() {
        let t = XYChainParams::with_boundary_couplings(2, 0.0, 0.0, 0.0, 1.0, 1.0);
        for row in gap_scan(&t, &[3, 4, 7]).rows {
            assert_eq!(row.gap.unwrap(), 0.0);
        }
    }

    #[test]
    fn gap_shrinks_with_length() {
        let t = XYChainParams::with_boundary_couplings(2, 1.0, 1.0, 0.01, 1.0, 1.0);
        let scan = gap_scan(&t, &[20, 30, 40]);
        let g: Vec<f64> = scan.rows.iter().map(|r| *r.gap.as_ref().unwrap()).collect();
        assert!(g[0] > g[1] && g[1] > g[2]);
        let fit = scan.fit.unwrap();
        assert!(fit.slope < -2.0 && fit.r2 > 0.9);
    }

    #[test]
    fn power_law_fit_is_exact_on_power_law() {
        let pts: Vec<(usize, f64)> = [10usize, 20, 40].iter().map(|&l| (l, 5.0 * (l as f64).powi(-3))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-12);
        assert!((fit.intercept - 5f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit_power_law(&pts[..1]).is_none());
    }

    #[test]
    fn cluster_window() {
        let v = [c(0.0, 1.0), c(-0.01, 0.98), c(0.0, -1.0), c(-0.2, 1.0)];
        let cl = rapidity_cluster(&v, 1.0);
        assert_eq!(cl, [c(-0.01, 0.98), c(0.0, 1.0)]);
        assert!((min_distance_to(&v, c(0.0, 1.0))).abs() < 1e-15);
    }

    #[test]
    fn vectors_are_eigenvectors() {
        let r = rapidities(&ising4()).unwrap();
        let p = build_p(&ising4());
        let lhs = &p * &r.right_vectors;
        let rhs = CMatrix::from_fn(8, 8, |i, j| r.right_vectors[(i, j)] * r.lambda_p[j]);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
    }
}
