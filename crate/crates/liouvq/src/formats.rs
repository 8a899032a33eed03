//! JSON and CSV shapes read and written by the command-line tool.
//!
//! Matrices in input files are nested row lists. Complex numbers in output
//! are `{ "re": .., "im": .. }` objects. CSV floats are written with 17
//! significant digits.

use std::io::Write;

use liouvq_core::analytic::{Branch, SecularRoot};
use liouvq_core::linalg::{CMatrix, RMatrix};
use liouvq_core::model::{xy_chain_spec, ModelError, QuadraticLindbladSpec, XYChainParams};
use liouvq_core::oracle::{NessCheck, OracleReport};
use liouvq_core::spectrum::{GapScan, SpectrumResult};
use liouvq_core::steady_state::SteadyState;
use liouvq_core::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field} must be {l}x{l}, found {rows} rows with lengths {lengths:?}")]
    Shape {
        field: &'static str,
        l: usize,
        rows: usize,
        lengths: Vec<usize>,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A general model: `h`, `g` and the two rate matrices. Missing imaginary
/// parts and a missing pairing matrix default to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(rename = "L")]
    pub l: usize,
    pub h_re: Vec<Vec<f64>>,
    #[serde(default)]
    pub h_im: Vec<Vec<f64>>,
    #[serde(default)]
    pub g_re: Vec<Vec<f64>>,
    #[serde(default)]
    pub g_im: Vec<Vec<f64>>,
    pub lambda_plus: Vec<Vec<f64>>,
    pub lambda_minus: Vec<Vec<f64>>,
}

/// XY chain parameters with explicit boundary rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub gamma: f64,
    pub hz: f64,
    pub lp1: f64,
    pub lm1: f64,
    #[serde(rename = "lpL")]
    pub lp_l: f64,
    #[serde(rename = "lmL")]
    pub lm_l: f64,
}

impl From<ParamsFile> for XYChainParams {
    fn from(p: ParamsFile) -> Self {
        XYChainParams {
            l: p.l,
            j: p.j,
            gamma: p.gamma,
            hz: p.hz,
            lp1: p.lp1,
            lm1: p.lm1,
            lp_l: p.lp_l,
            lm_l: p.lm_l,
        }
    }
}

impl From<XYChainParams> for ParamsFile {
    fn from(p: XYChainParams) -> Self {
        ParamsFile {
            l: p.l,
            j: p.j,
            gamma: p.gamma,
            hz: p.hz,
            lp1: p.lp1,
            lm1: p.lm1,
            lp_l: p.lp_l,
            lm_l: p.lm_l,
        }
    }
}

/// Contents of a `--spec` file: either chain parameters or a full model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelFile {
    Chain(ParamsFile),
    Full(SpecFile),
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> Result<QuadraticLindbladSpec, FormatError> {
        match self {
            ModelFile::Chain(p) => Ok(xy_chain_spec(&(*p).into())?),
            ModelFile::Full(s) => s.to_spec(),
        }
    }
}

fn real_matrix(field: &'static str, l: usize, rows: &[Vec<f64>]) -> Result<RMatrix, FormatError> {
    if rows.is_empty() {
        return Ok(RMatrix::zeros(l, l));
    }
    if rows.len() != l || rows.iter().any(|r| r.len() != l) {
        return Err(FormatError::Shape {
            field,
            l,
            rows: rows.len(),
            lengths: rows.iter().map(Vec::len).collect(),
        });
    }
    Ok(RMatrix::from_fn(l, l, |i, j| rows[i][j]))
}

fn complex_matrix(
    names: (&'static str, &'static str),
    l: usize,
    re: &[Vec<f64>],
    im: &[Vec<f64>],
) -> Result<CMatrix, FormatError> {
    let re = real_matrix(names.0, l, re)?;
    let im = real_matrix(names.1, l, im)?;
    Ok(CMatrix::from_fn(l, l, |i, j| Complex64::new(re[(i, j)], im[(i, j)])))
}

fn rows_of<T: Copy>(l: usize, f: impl Fn(usize, usize) -> T) -> Vec<Vec<T>> {
    (0..l).map(|i| (0..l).map(|j| f(i, j)).collect()).collect()
}

impl SpecFile {
    pub fn to_spec(&self) -> Result<QuadraticLindbladSpec, FormatError> {
        let l = self.l;
        if self.h_re.is_empty() {
            return Err(FormatError::Shape {
                field: "h_re",
                l,
                rows: 0,
                lengths: Vec::new(),
            });
        }
        let h = complex_matrix(("h_re", "h_im"), l, &self.h_re, &self.h_im)?;
        let g = complex_matrix(("g_re", "g_im"), l, &self.g_re, &self.g_im)?;
        let lp = real_matrix("lambda_plus", l, &self.lambda_plus)?;
        let lm = real_matrix("lambda_minus", l, &self.lambda_minus)?;
        Ok(QuadraticLindbladSpec::new(h, g, lp, lm)?)
    }

    pub fn from_spec(spec: &QuadraticLindbladSpec) -> Self {
        let l = spec.sites();
        SpecFile {
            l,
            h_re: rows_of(l, |i, j| spec.h()[(i, j)].re),
            h_im: rows_of(l, |i, j| spec.h()[(i, j)].im),
            g_re: rows_of(l, |i, j| spec.g()[(i, j)].re),
            g_im: rows_of(l, |i, j| spec.g()[(i, j)].im),
            lambda_plus: rows_of(l, |i, j| spec.lambda_plus()[(i, j)]),
            lambda_minus: rows_of(l, |i, j| spec.lambda_minus()[(i, j)]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for C {
    fn from(z: Complex64) -> Self {
        C { re: z.re, im: z.im }
    }
}

fn cs(values: &[Complex64]) -> Vec<C> {
    values.iter().copied().map(C::from).collect()
}

/// Row-major dump of a complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixDump {
    fn from(m: &CMatrix) -> Self {
        let mut re = Vec::with_capacity(m.rows() * m.cols());
        let mut im = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixDump {
            rows: m.rows(),
            cols: m.cols(),
            re,
            im,
        }
    }
}

impl From<&MatrixDump> for CMatrix {
    fn from(d: &MatrixDump) -> Self {
        CMatrix::from_fn(d.rows, d.cols, |i, j| {
            Complex64::new(d.re[i * d.cols + j], d.im[i * d.cols + j])
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOut {
    #[serde(rename = "L")]
    pub l: usize,
    pub lambda_p: Vec<C>,
    pub rapidities: Vec<C>,
    pub pairs: Vec<[usize; 2]>,
    pub gap: f64,
    pub residual: f64,
    pub paired_trace: C,
    pub right_vectors: MatrixDump,
}

impl SpectrumOut {
    pub fn new(r: &SpectrumResult) -> Self {
        SpectrumOut {
            l: r.lambda_p.len() / 2,
            lambda_p: cs(&r.lambda_p),
            rapidities: cs(&r.rapidities),
            pairs: r.pairs.iter().map(|p| [p.i, p.j]).collect(),
            gap: r.gap,
            residual: r.residual,
            paired_trace: r.paired_trace().into(),
            right_vectors: (&r.right_vectors).into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub det: f64,
    pub charpoly: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootOut {
    pub theta_re: f64,
    pub theta_im: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub branch: String,
    pub residuals: Residuals,
}

impl From<&SecularRoot> for RootOut {
    fn from(r: &SecularRoot) -> Self {
        RootOut {
            theta_re: r.theta.re,
            theta_im: r.theta.im,
            lambda_re: r.lambda.re,
            lambda_im: r.lambda.im,
            branch: match r.branch {
                Branch::Principal => "principal",
                Branch::Secondary => "secondary",
            }
            .to_owned(),
            residuals: Residuals {
                det: r.det_residual,
                charpoly: r.charpoly_residual,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOut {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plus: Option<Vec<RootOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minus: Option<Vec<RootOut>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingOut {
    #[serde(rename = "L")]
    pub l: usize,
    /// Block eigenvalues of `Q⁺` and `Q⁻`, with multiplicity.
    pub values: Vec<C>,
    /// `values` with duplicates (within 1e-12) removed.
    pub distinct: Vec<C>,
    pub solution_set: Vec<C>,
    pub max_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NessOut {
    pub occupations: Vec<f64>,
    pub magnetization_z: Vec<f64>,
    pub pairing_re: Vec<Vec<f64>>,
    pub pairing_im: Vec<Vec<f64>>,
    pub residual: f64,
    pub relative_residual: f64,
}

impl From<&SteadyState> for NessOut {
    fn from(s: &SteadyState) -> Self {
        let l = s.occupations.len();
        NessOut {
            occupations: s.occupations.clone(),
            magnetization_z: s.magnetization_z.clone(),
            pairing_re: rows_of(l, |i, j| s.pairings[(i, j)].re),
            pairing_im: rows_of(l, |i, j| s.pairings[(i, j)].im),
            residual: s.residual,
            relative_residual: s.relative_residual(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRowOut {
    #[serde(rename = "L")]
    pub l: usize,
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOut {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScanOut {
    pub rows: Vec<GapRowOut>,
    pub fit: Option<FitOut>,
}

impl From<&GapScan> for GapScanOut {
    fn from(s: &GapScan) -> Self {
        GapScanOut {
            rows: s
                .rows
                .iter()
                .map(|r| GapRowOut {
                    l: r.l,
                    gap: r.gap.as_ref().ok().copied(),
                    error: r.gap.as_ref().err().map(|e| e.to_string()),
                })
                .collect(),
            fit: s.fit.map(|f| FitOut {
                slope: f.slope,
                intercept: f.intercept,
                r2: f.r2,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipOut {
    pub predicted_re: f64,
    pub predicted_im: f64,
    pub matched: bool,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOut {
    #[serde(rename = "L")]
    pub l: usize,
    pub superop_spectrum: Vec<C>,
    pub near_zero: usize,
    /// `compared`, `degenerate` or `lyapunov_failed`.
    pub ness_status: String,
    pub ness_state_residual: Option<f64>,
    pub correlation_diff: Option<f64>,
    pub oracle_occupations: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov_error: Option<String>,
    pub all_members_found: bool,
    pub max_membership_distance: f64,
    pub rapidity_membership: Vec<MembershipOut>,
}

impl OracleOut {
    pub fn new(l: usize, r: &OracleReport) -> Self {
        let (status, state_residual, diff, occ, err) = match &r.ness {
            NessCheck::Compared {
                state_residual,
                correlation_diff,
                occupations,
            } => (
                "compared",
                Some(*state_residual),
                Some(*correlation_diff),
                Some(occupations.clone()),
                None,
            ),
            NessCheck::Degenerate { .. } => ("degenerate", None, None, None, None),
            NessCheck::LyapunovFailed(e) => ("lyapunov_failed", None, None, None, Some(e.to_string())),
        };
        OracleOut {
            l,
            superop_spectrum: cs(&r.superop_spectrum),
            near_zero: r.near_zero,
            ness_status: status.to_owned(),
            ness_state_residual: state_residual,
            correlation_diff: diff,
            oracle_occupations: occ,
            lyapunov_error: err,
            all_members_found: r.all_members_found(),
            max_membership_distance: r.max_membership_distance(),
            rapidity_membership: r
                .rapidity_membership
                .iter()
                .map(|m| MembershipOut {
                    predicted_re: m.predicted.re,
                    predicted_im: m.predicted.im,
                    matched: m.matched,
                    distance: m.distance,
                })
                .collect(),
        }
    }
}

/// Full double precision in scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and rows as CSV.
pub fn write_csv<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouvq_core::linalg::max_abs_diff;

    fn chain() -> XYChainParams {
        XYChainParams::with_boundary_couplings(3, 1.0, 0.7, 0.2, 1.0, 0.5)
    }

    #[test]
    fn params_file_round_trip() {
        let text = serde_json::to_string(&ParamsFile::from(chain())).unwrap();
        assert!(text.contains("\"lpL\""));
        match ModelFile::parse(&text).unwrap() {
            ModelFile::Chain(p) => assert_eq!(XYChainParams::from(p), chain()),
            other => panic!("parsed as {other:?}"),
        }
    }

    #[test]
    fn spec_file_round_trip() {
        let spec = xy_chain_spec(&chain()).unwrap();
        let text = serde_json::to_string(&SpecFile::from_spec(&spec)).unwrap();
        let back = ModelFile::parse(&text).unwrap().to_spec().unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn missing_optional_blocks_are_zero() {
        let text = r#"{"L": 2, "h_re": [[0, 1], [1, 0]], "lambda_plus": [[0.5, 0], [0, 0]], "lambda_minus": []}"#;
        let spec = ModelFile::parse(text).unwrap().to_spec().unwrap();
        assert_eq!(spec.g().max_abs(), 0.0);
        assert_eq!(spec.h()[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(spec.lambda_minus().max_abs(), 0.0);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let text = r#"{"L": 2, "h_re": [[0, 1], [1]], "lambda_plus": [], "lambda_minus": []}"#;
        let err = ModelFile::parse(text).unwrap().to_spec().unwrap_err();
        assert!(matches!(err, FormatError::Shape { field: "h_re", .. }), "{err}");
    }

    #[test]
    fn invalid_model_is_reported() {
        let text = r#"{"L": 2, "h_re": [[0, 1], [2, 0]], "lambda_plus": [], "lambda_minus": []}"#;
        let err = ModelFile::parse(text).unwrap().to_spec().unwrap_err();
        assert!(matches!(err, FormatError::Model(ModelError::NotHermitian { .. })), "{err}");
    }

    #[test]
    fn unknown_fields_fail_to_parse() {
        assert!(ModelFile::parse(r#"{"L": 2, "J": 1, "gamma": 0}"#).is_err());
    }

    #[test]
    fn matrix_dump_is_row_major() {
        let m = CMatrix::from_fn(2, 3, |i, j| Complex64::new((3 * i + j) as f64, -(i as f64)));
        let d = MatrixDump::from(&m);
        assert_eq!(d.re, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(d.im, vec![0.0, 0.0, 0.0, -1.0, -1.0, -1.0]);
        assert_eq!(max_abs_diff(&CMatrix::from(&d), &m), 0.0);
    }

    #[test]
    fn csv_floats_keep_seventeen_digits() {
        let x = 0.1f64 + 0.2;
        let s = sci(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(s, "3.0000000000000004e-1");
        let mut buf = Vec::new();
        write_csv(&mut buf, &["L", "gap"], [vec!["4".into(), sci(x)]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "L,gap\n4,3.0000000000000004e-1\n");
    }
}
