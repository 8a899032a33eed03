//! Command dispatch for the `liouvq` binary.

use std::fmt::Debug;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use liouvq_core::analytic::{
    distance_to_set, ising_solution_set, ising_spectrum, solve_secular, AnalyticError, SecularParams,
};
use liouvq_core::model::{xy_chain_spec, ModelError, QuadraticLindbladSpec, XYChainParams};
use liouvq_core::oracle::{oracle_compare, OracleError};
use liouvq_core::spectrum::{rapidities, SpectrumError};
use liouvq_core::steady_state::observables;
use liouvq_core::structure::Sign as CoreSign;
use liouvq_core::Complex64;
use serde::Serialize;

use crate::formats::{
    sci, write_csv, AnalyticOut, FormatError, GapScanOut, IsingOut, ModelFile, NessOut, OracleOut, RootOut, SpectrumOut,
    C,
};
use crate::scan::{fig1_data, gap_scan_parallel, length_range, thread_cap, Fig1Config, Fig1Data};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Eigenvalues of P, pairing, rapidities and relaxation gap.
    Spectrum,
    /// Relaxation gap over a range of chain lengths, with a power-law fit.
    GapScan,
    /// Steady-state occupations, magnetization and pairings.
    Ness,
    /// Secular-equation roots of Q+ and Q- (zero field).
    Analytic,
    /// Closed-form spectrum of the Ising chain.
    Ising,
    /// Brute-force superoperator comparison (L <= 5).
    OracleCheck,
    /// Gap and rapidity-cluster data files.
    Fig1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    #[default]
    Both,
}

/// Flags shared by every command. Unused flags are ignored.
#[derive(Clone, Debug, PartialEq, Parser)]
#[command(name = "liouvq", version, about = "Spectra and steady states of boundary-driven quadratic fermionic chains")]
#[command(allow_negative_numbers = true)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Chain length.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    /// Anisotropy.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub hz: f64,
    /// Total coupling at site 1, split equally into injection and extraction.
    #[arg(long, default_value_t = 1.0)]
    pub g1: f64,
    /// Total coupling at site L, split equally.
    #[arg(long = "gL", default_value_t = 1.0)]
    pub g_l: f64,
    /// Explicit rates; any of these overrides --g1/--gL (missing ones are 0).
    #[arg(long)]
    pub lp1: Option<f64>,
    #[arg(long)]
    pub lm1: Option<f64>,
    #[arg(long = "lpL")]
    pub lp_l: Option<f64>,
    #[arg(long = "lmL")]
    pub lm_l: Option<f64>,
    #[arg(long = "Lmin")]
    pub lmin: Option<usize>,
    #[arg(long = "Lmax")]
    pub lmax: Option<usize>,
    #[arg(long = "Lstep")]
    pub lstep: Option<usize>,
    /// JSON model file: chain parameters or full matrices.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output file (a directory for fig1). Standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SignArg::Both)]
    pub sign: SignArg,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Numerical { kind: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    /// The report printed on standard error.
    pub fn to_json(&self, command: Command) -> serde_json::Value {
        let command = command.to_possible_value().map(|v| v.get_name().to_owned());
        match self {
            CliError::Usage(m) => serde_json::json!({ "error": "usage", "command": command, "message": m }),
            CliError::Numerical { kind, message } => serde_json::json!({
                "error": "numerical",
                "command": command,
                "kind": kind,
                "message": message,
            }),
            CliError::Io { path, source } => serde_json::json!({
                "error": "io",
                "command": command,
                "path": path,
                "message": source.to_string(),
            }),
        }
    }

    fn numerical<E: Debug + std::fmt::Display>(e: &E) -> Self {
        CliError::Numerical {
            kind: innermost_variant(e),
            message: e.to_string(),
        }
    }
}

/// Name of the innermost enum variant in a `Debug` rendering, following
/// single-field tuple wrappers such as `Eigen(NoConvergence { .. })`.
fn innermost_variant<E: Debug>(e: &E) -> String {
    let text = format!("{e:?}");
    let mut rest = text.as_str();
    loop {
        let end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        let (name, tail) = rest.split_at(end);
        match tail.strip_prefix('(') {
            Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => rest = inner,
            _ => return name.to_owned(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(format!("invalid model: {e}"))
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::Model(m) => m.into(),
            e => CliError::numerical(&e),
        }
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Model(m) => m.into(),
            AnalyticError::NotIsing | AnalyticError::NonZeroField { .. } | AnalyticError::TooShort { .. } => {
                CliError::Usage(e.to_string())
            }
            e => CliError::numerical(&e),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => CliError::Usage(e.to_string()),
            OracleError::Spectrum(s) => s.into(),
            e => CliError::numerical(&e),
        }
    }
}

/// A rendered output file.
struct Artifact {
    path: Option<PathBuf>,
    bytes: Vec<u8>,
}

impl RunConfig {
    /// Parses flags as the binary does, for tests and embedding.
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Self::try_parse_from(std::iter::once("liouvq".into()).chain(args.into_iter().map(Into::into)))
    }

    fn model_file(&self) -> Result<Option<ModelFile>, CliError> {
        let Some(path) = &self.spec else { return Ok(None) };
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Some(ModelFile::parse(&text)?))
    }

    /// Chain parameters from a parameter file or the flags. `need_l`
    /// requires a length.
    fn chain(&self, need_l: bool) -> Result<XYChainParams, CliError> {
        if let Some(file) = self.model_file()? {
            return match file {
                ModelFile::Chain(p) => Ok(p.into()),
                ModelFile::Full(_) => Err(CliError::Usage(
                    "this command needs chain parameters, not a full model".to_owned(),
                )),
            };
        }
        let l = match (self.l, need_l) {
            (Some(l), _) => l,
            (None, false) => 2,
            (None, true) => return Err(CliError::Usage("--L is required (or --spec)".to_owned())),
        };
        let explicit = [self.lp1, self.lm1, self.lp_l, self.lm_l];
        let p = if explicit.iter().any(Option::is_some) {
            let [lp1, lm1, lp_l, lm_l] = explicit.map(|v| v.unwrap_or(0.0));
            XYChainParams {
                l,
                j: self.j,
                gamma: self.gamma,
                hz: self.hz,
                lp1,
                lm1,
                lp_l,
                lm_l,
            }
        } else {
            XYChainParams::with_boundary_couplings(l, self.j, self.gamma, self.hz, self.g1, self.g_l)
        };
        p.validate()?;
        Ok(p)
    }

    fn model(&self) -> Result<QuadraticLindbladSpec, CliError> {
        match self.model_file()? {
            Some(file) => Ok(file.to_spec()?),
            None => Ok(xy_chain_spec(&self.chain(true)?)?),
        }
    }

    fn signs(&self) -> Vec<CoreSign> {
        match self.sign {
            SignArg::Plus => vec![CoreSign::Plus],
            SignArg::Minus => vec![CoreSign::Minus],
            SignArg::Both => CoreSign::both().to_vec(),
        }
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn lengths(&self) -> Result<Option<Vec<usize>>, CliError> {
        match (self.lmin, self.lmax) {
            (None, None) if self.lstep.is_none() => Ok(None),
            (Some(lo), Some(hi)) if lo <= hi => Ok(Some(length_range(lo, hi, self.lstep.unwrap_or(1)))),
            (Some(lo), Some(hi)) => Err(CliError::Usage(format!("--Lmin {lo} exceeds --Lmax {hi}"))),
            _ => Err(CliError::Usage("--Lmin and --Lmax must be given together".to_owned())),
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("output types serialize");
    out.push(b'\n');
    out
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&mut out, header, rows).expect("writing to memory");
    out
}

fn complex_rows(values: &[Complex64]) -> impl Iterator<Item = Vec<String>> + '_ {
    values
        .iter()
        .enumerate()
        .map(|(k, z)| vec![k.to_string(), sci(z.re), sci(z.im)])
}

/// Writes every artifact, or none: files written before a failure are removed.
fn emit(artifacts: &[Artifact], stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut written: Vec<&Path> = Vec::new();
    for a in artifacts {
        let result = match &a.path {
            Some(p) => fs::write(p, &a.bytes).map(|_| written.push(p)),
            None => stdout.write_all(&a.bytes),
        };
        if let Err(source) = result {
            let path = a.path.as_deref().map_or("<stdout>".to_owned(), |p| p.display().to_string());
            if let Some(p) = &a.path {
                let _ = fs::remove_file(p);
            }
            for p in written {
                let _ = fs::remove_file(p);
            }
            return Err(CliError::Io { path, source });
        }
    }
    Ok(())
}

pub const FIG1_GAP_FILE: &str = "fig1a_gap.csv";
pub const FIG1_LENGTH_FILE: &str = "fig1b_clusters_by_length.csv";
pub const FIG1_FIELD_FILE: &str = "fig1c_clusters_by_field.csv";

/// Renders the three CSV files of the `fig1` command.
pub fn fig1_csv(data: &Fig1Data) -> [(&'static str, Vec<u8>); 3] {
    let gaps = csv_bytes(
        &["hz_over_J", "L", "gap"],
        data.gaps.iter().flat_map(|(f, scan)| {
            scan.rows.iter().map(move |r| {
                let gap = r.gap.as_ref().map_or(f64::NAN, |g| *g);
                vec![sci(*f), r.l.to_string(), sci(gap)]
            })
        }),
    );
    let clusters = |key: &'static str, cs: &[crate::scan::Cluster], by_length: bool| {
        csv_bytes(
            &[key, "re", "im", "min_distance_to_iJ"],
            cs.iter()
                .flat_map(|c| {
                    let k = if by_length { c.l.to_string() } else { sci(c.field) };
                    c.points
                        .iter()
                        .map(move |z| vec![k.clone(), sci(z.re), sci(z.im), sci(c.distance)])
                })
                .collect::<Vec<_>>(),
        )
    };
    [
        (FIG1_GAP_FILE, gaps),
        (FIG1_LENGTH_FILE, clusters("L", &data.by_length, true)),
        (FIG1_FIELD_FILE, clusters("hz_over_J", &data.by_field, false)),
    ]
}

#[derive(Serialize)]
struct Fig1Summary {
    files: Vec<String>,
    fits: Vec<Fig1Fit>,
    min_distance_by_length: Vec<(usize, f64)>,
    min_distance_by_field: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct Fig1Fit {
    hz_over_j: f64,
    slope: Option<f64>,
    r2: Option<f64>,
}

/// Executes one command. Results go to `--output` or to `stdout`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let artifacts = match config.command {
        Command::Spectrum => {
            let r = rapidities(&config.model()?)?;
            let bytes = match config.format(Format::Json) {
                Format::Json => json_bytes(&SpectrumOut::new(&r)),
                Format::Csv => {
                    let mut partner = vec![0usize; r.lambda_p.len()];
                    for p in &r.pairs {
                        partner[p.i] = p.j;
                        partner[p.j] = p.i;
                    }
                    csv_bytes(
                        &["index", "lambda_re", "lambda_im", "rapidity_re", "rapidity_im", "partner"],
                        r.lambda_p.iter().zip(&r.rapidities).enumerate().map(|(k, (z, w))| {
                            vec![k.to_string(), sci(z.re), sci(z.im), sci(w.re), sci(w.im), partner[k].to_string()]
                        }),
                    )
                }
            };
            vec![Artifact {
                path: config.output.clone(),
                bytes,
            }]
        }
        Command::GapScan => {
            let template = config.chain(false)?;
            let ls = config
                .lengths()?
                .ok_or_else(|| CliError::Usage("gap-scan needs --Lmin and --Lmax".to_owned()))?;
            let scan = gap_scan_parallel(&template, &ls, thread_cap());
            if let Some((l, e)) = scan.rows.iter().find_map(|r| r.gap.as_ref().err().map(|e| (r.l, e))) {
                return Err(match CliError::from(e.clone()) {
                    CliError::Numerical { kind, message } => CliError::Numerical {
                        kind,
                        message: format!("L = {l}: {message}"),
                    },
                    other => other,
                });
            }
            let bytes = match config.format(Format::Csv) {
                Format::Json => json_bytes(&GapScanOut::from(&scan)),
                Format::Csv => {
                    if let Some(f) = scan.fit {
                        eprintln!("fit: slope={:.6} intercept={:.6} r2={:.6}", f.slope, f.intercept, f.r2);
                    }
                    csv_bytes(
                        &["L", "gap"],
                        scan.rows
                            .iter()
                            .map(|r| vec![r.l.to_string(), sci(*r.gap.as_ref().expect("checked above"))]),
                    )
                }
            };
            vec![Artifact {
                path: config.output.clone(),
                bytes,
            }]
        }
        Command::Ness => {
            let ss = observables(&config.model()?).map_err(|e| CliError::numerical(&e))?;
            let bytes = match config.format(Format::Json) {
                Format::Json => json_bytes(&NessOut::from(&ss)),
                Format::Csv => csv_bytes(
                    &["site", "occupation", "magnetization_z"],
                    ss.occupations
                        .iter()
                        .zip(&ss.magnetization_z)
                        .enumerate()
                        .map(|(k, (n, m))| vec![(k + 1).to_string(), sci(*n), sci(*m)]),
                ),
            };
            vec![Artifact {
                path: config.output.clone(),
                bytes,
            }]
        }
        Command::Analytic => {
            let params = config.chain(true)?;
            let mut out = AnalyticOut {
                l: params.l,
                plus: None,
                minus: None,
            };
            let mut rows = Vec::new();
            for sign in config.signs() {
                let roots = solve_secular(&SecularParams::from_xy(&params, sign)?)?;
                let name = match sign {
                    CoreSign::Plus => "plus",
                    CoreSign::Minus => "minus",
                };
                let dto: Vec<RootOut> = roots.iter().map(RootOut::from).collect();
                for r in &dto {
                    rows.push(vec![
                        name.to_owned(),
                        sci(r.theta_re),
                        sci(r.theta_im),
                        sci(r.lambda_re),
                        sci(r.lambda_im),
                        r.branch.clone(),
                        sci(r.residuals.det),
                        sci(r.residuals.charpoly),
                    ]);
                }
                match sign {
                    CoreSign::Plus => out.plus = Some(dto),
                    CoreSign::Minus => out.minus = Some(dto),
                }
            }
            let bytes = match config.format(Format::Json) {
                Format::Json => json_bytes(&out),
                Format::Csv => csv_bytes(
                    &[
                        "sign",
                        "theta_re",
                        "theta_im",
                        "lambda_re",
                        "lambda_im",
                        "branch",
                        "det_residual",
                        "charpoly_residual",
                    ],
                    rows,
                ),
            };
            vec![Artifact {
                path: config.output.clone(),
                bytes,
            }]
        }
        Command::Ising => {
            let params = config.chain(true)?;
            let values = ising_spectrum(&SecularParams::from_xy(&params, CoreSign::Plus)?)?;
            let set = ising_solution_set(params.j, params.gamma1(), params.gamma_l());
            let mut distinct: Vec<Complex64> = Vec::new();
            for z in &values {
                if distance_to_set(*z, &distinct) > 1e-12 {
                    distinct.push(*z);
                }
            }
            let max_distance = values.iter().map(|z| distance_to_set(*z, &set)).fold(0.0, f64::max);
            let bytes = match config.format(Format::Json) {
                Format::Json => json_bytes(&IsingOut {
                    l: params.l,
                    values: values.iter().copied().map(C::from).collect(),
                    distinct: distinct.iter().copied().map(C::from).collect(),
                    solution_set: set.iter().copied().map(C::from).collect(),
                    max_distance,
                }),
                Format::Csv => csv_bytes(&["index", "re", "im"], complex_rows(&values)),
            };
            vec![Artifact {
                path: config.output.clone(),
                bytes,
            }]
        }
        Command::OracleCheck => {
            let spec = config.model()?;
            let report = oracle_compare(&spec)?;
            let bytes = match config.format(Format::Json) {
                Format::Json => json_bytes(&OracleOut::new(spec.sites(), &report)),
                Format::Csv => csv_bytes(&["index", "re", "im"], complex_rows(&report.superop_spectrum)),
            };
            vec![Artifact {
                path: config.output.clone(),
                bytes,
            }]
        }
        Command::Fig1 => {
            if config.format == Some(Format::Json) {
                return Err(CliError::Usage("fig1 writes CSV only".to_owned()));
            }
            let mut cfg = Fig1Config {
                j: config.j,
                ..Fig1Config::default()
            };
            if let Some(ls) = config.lengths()? {
                cfg.lengths = ls;
            }
            let data = fig1_data(&cfg, thread_cap()).map_err(|e| CliError::numerical(&e.source))?;
            let dir = config.output.clone().unwrap_or_else(|| PathBuf::from("."));
            if !dir.is_dir() {
                return Err(CliError::Usage(format!("{} is not a directory", dir.display())));
            }
            let mut artifacts: Vec<Artifact> = fig1_csv(&data)
                .into_iter()
                .map(|(name, bytes)| Artifact {
                    path: Some(dir.join(name)),
                    bytes,
                })
                .collect();
            let summary = Fig1Summary {
                files: artifacts
                    .iter()
                    .filter_map(|a| a.path.as_ref().map(|p| p.display().to_string()))
                    .collect(),
                fits: data
                    .gaps
                    .iter()
                    .map(|(f, scan)| Fig1Fit {
                        hz_over_j: *f,
                        slope: scan.fit.map(|x| x.slope),
                        r2: scan.fit.map(|x| x.r2),
                    })
                    .collect(),
                min_distance_by_length: data.by_length.iter().map(|c| (c.l, c.distance)).collect(),
                min_distance_by_field: data.by_field.iter().map(|c| (c.field, c.distance)).collect(),
            };
            artifacts.push(Artifact {
                path: None,
                bytes: json_bytes(&summary),
            });
            artifacts
        }
    };
    emit(&artifacts, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        RunConfig::from_args(args).unwrap()
    }

    fn run_to_string(args: &[&str]) -> Result<String, CliError> {
        let mut out = Vec::new();
        run(&cfg(args), &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn flags_use_their_physics_names() {
        let c = cfg(&["gap-scan", "--gamma", "1", "--hz", "0.01", "--Lmin", "20", "--Lmax", "100", "--gL", "2"]);
        assert_eq!(c.command, Command::GapScan);
        assert_eq!((c.lmin, c.lmax, c.g_l), (Some(20), Some(100), 2.0));
        let c = cfg(&["spectrum", "--L", "4", "--J", "-1", "--lpL", "0.3"]);
        assert_eq!((c.l, c.j, c.lp_l), (Some(4), -1.0, Some(0.3)));
    }

    #[test]
    fn explicit_rates_override_couplings() {
        let p = cfg(&["ness", "--L", "3", "--lp1", "0.3"]).chain(true).unwrap();
        assert_eq!((p.lp1, p.lm1, p.lp_l, p.lm_l), (0.3, 0.0, 0.0, 0.0));
        let p = cfg(&["ness", "--L", "3", "--g1", "2"]).chain(true).unwrap();
        assert_eq!((p.lp1, p.lm1, p.lp_l, p.lm_l), (1.0, 1.0, 0.5, 0.5));
    }

    #[test]
    fn missing_length_is_a_usage_error() {
        let err = run_to_string(&["spectrum"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run_to_string(&["gap-scan", "--Lmin", "4"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_parameters_are_usage_errors() {
        assert_eq!(run_to_string(&["spectrum", "--L", "3", "--gamma", "2"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_to_string(&["ising", "--L", "3", "--gamma", "0.5"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_to_string(&["analytic", "--L", "5", "--hz", "0.1"]).unwrap_err().exit_code(), 2);
        assert_eq!(run_to_string(&["oracle-check", "--L", "6"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn marginal_ness_is_a_numerical_failure() {
        let err = run_to_string(&["ness", "--L", "4", "--gamma", "1", "--hz", "0"]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        let report = err.to_json(Command::Ness);
        assert_eq!(report["kind"], "MarginalSpectrum");
        assert_eq!(report["command"], "ness");
    }

    #[test]
    fn innermost_variant_follows_wrappers() {
        use liouvq_core::linalg::EigenError;
        let e = SpectrumError::Eigen(EigenError::NonFinite);
        assert_eq!(innermost_variant(&e), "NonFinite");
        assert_eq!(innermost_variant(&AnalyticError::ZeroD2), "ZeroD2");
        assert_eq!(innermost_variant(&AnalyticError::SingularTheta { sin_theta: 0.0 }), "SingularTheta");
    }

    #[test]
    fn ness_json_has_expected_fields() {
        let text = run_to_string(&[
            "ness", "--L", "3", "--gamma", "0", "--lp1", "0.3", "--lm1", "0.7", "--lpL", "0.3", "--lmL", "0.7",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for n in v["occupations"].as_array().unwrap() {
            assert!((n.as_f64().unwrap() - 0.3).abs() < 1e-9);
        }
        for m in v["magnetization_z"].as_array().unwrap() {
            assert!((m.as_f64().unwrap() + 0.4).abs() < 1e-9);
        }
        assert_eq!(v["pairing_re"].as_array().unwrap().len(), 3);
        assert_eq!(v["pairing_im"][0].as_array().unwrap().len(), 3);
        assert!(v["residual"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn analytic_sign_selection() {
        let text = run_to_string(&["analytic", "--L", "5", "--gamma", "0.5", "--sign", "minus"]).unwrap();
        let v: AnalyticOut = serde_json::from_str(&text).unwrap();
        assert!(v.plus.is_none());
        assert_eq!(v.minus.unwrap().len(), 5);
    }
}
