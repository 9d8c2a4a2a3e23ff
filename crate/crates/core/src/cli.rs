//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 a property check failed, 2 usage or
//! configuration error, 3 numerical pole. Reports go to stdout, diagnostics to
//! stderr.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bethe::{
    check_boundary_conditions, kink_gauge_check, MomentumSet, PlaneLocation, WaveFunction,
    WaveSample,
};
use crate::error::{Error, Result};
use crate::linalg::{
    complex_records, max_abs, max_abs_diff, max_abs_diff_vec, parse_complex, ComplexRecord, C64,
};
use crate::params::{
    validate_nonseparated, ContactParams, IntegrableFamily, NonSeparatedParams, Strength,
};
use crate::sampling::{rng_from_seed, spread_points, MomentumSampler};
use crate::scattering::{
    cluster_s_matrix, s_matrix, s_matrix_via_sprime, verify_s_properties, SMatrix,
};
use crate::spectra::{
    bound_energy, bound_momenta, bound_wavefunction, spin_eigenspace, verify_bound_state,
    BoundResiduals, EpsilonPattern,
};
use crate::spinspace::{SpinSystem, Statistics};
use crate::ybe::{
    classification_scan, ybe_residual, NonSeparatedGrid, ParamsRecord, ScanConfig, ScanGrid,
    YbeReport, PASS_TOL,
};
use crate::yops::family_coefficients;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_POLE: i32 = 3;

/// Agreement required between the two S-matrix products and between table words.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "contact",
    version,
    about = "Contact-interaction Y-operators, Bethe states, bound states and S-matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Yang-Baxter, inverse and commutation residuals at one momentum triple
    YbeCheck(YbeCheckArgs),
    /// Scan a parameter grid and compare the pass set with the classification
    YbeScan(YbeScanArgs),
    /// N-body (or cluster) scattering matrix with unitarity and symmetry residuals
    Smatrix(SmatrixArgs),
    /// Bound states of the separated family for h < 0
    Bound(BoundArgs),
    /// Bethe wavefunction boundary conditions and path independence
    WavefnCheck(WavefnArgs),
    /// Delta/anti-delta duality at the Y level and under the kink gauge
    DualityCheck(DualityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Delta,
    Antidelta,
    Separated,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Integrable family
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// General nonseparated parameters given by --theta --a --b --c --d
    #[arg(long, conflicts_with = "family")]
    pub general: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Coupling of the delta families, or the c entry of the general matrix
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Defaults to (1 + bc)/a
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Separated strength; `inf` for the hard wall
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Spin states per particle
    #[arg(long = "n")]
    pub spin_states: Option<usize>,
    /// Number of particles
    #[arg(long = "N")]
    pub particles: Option<usize>,
    /// boson or fermion
    #[arg(long)]
    pub stats: Option<String>,
    /// Flat TOML file with keys family, theta, a, b, c, d, h, n, N, statistics
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct YbeCheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Three momenta, comma separated (sampled from the seed when absent)
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct YbeScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub thetas: Option<String>,
    #[arg(long = "as", allow_hyphen_values = true)]
    pub a_values: Option<String>,
    #[arg(long = "bs", allow_hyphen_values = true)]
    pub b_values: Option<String>,
    #[arg(long = "cs", allow_hyphen_values = true)]
    pub c_values: Option<String>,
    /// Separated strengths; selects the separated grid
    #[arg(long = "hs", allow_hyphen_values = true)]
    pub h_values: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub triples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SmatrixArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Cluster sizes `a,b` for bound-cluster scattering (separated, h < 0)
    #[arg(long)]
    pub clusters: Option<String>,
    /// Real cluster momenta `p,q`
    #[arg(long, allow_hyphen_values = true)]
    pub shifts: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Plane points per particle pair
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WavefnArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Plane points per particle pair
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Initial coefficient basis vector; every basis vector when absent
    #[arg(long)]
    pub basis: Option<usize>,
    /// Open-region evaluations to include in the report
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DualityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    family: Option<FamilyName>,
    theta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    h: Option<toml::Value>,
    n: Option<usize>,
    #[serde(rename = "N")]
    particles: Option<usize>,
    statistics: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Family(IntegrableFamily),
    General(NonSeparatedParams),
}

impl Model {
    fn params(&self) -> ContactParams {
        match self {
            Model::Family(f) => f.embed(),
            Model::General(p) => ContactParams::NonSeparated(*p),
        }
    }

    fn family(&self, what: &str) -> Result<IntegrableFamily> {
        match self {
            Model::Family(f) => Ok(*f),
            Model::General(_) => Err(Error::Config(format!(
                "{what} needs an integrable family (delta, antidelta or separated)"
            ))),
        }
    }
}

/// Model flags merged with the optional config file, flags taking precedence.
#[derive(Debug, Clone, Default)]
struct Settings {
    family: Option<FamilyName>,
    theta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    h: Option<Strength>,
    spin_states: Option<usize>,
    particles: Option<usize>,
    statistics: Option<Statistics>,
}

impl Settings {
    fn load(args: &ModelArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let file_h = match file.h {
            None => None,
            Some(toml::Value::Float(x)) => Some(Strength::from_f64(x)?),
            Some(toml::Value::Integer(x)) => Some(Strength::from_f64(x as f64)?),
            Some(toml::Value::String(s)) => Some(Strength::parse(&s)?),
            Some(other) => {
                return Err(Error::Config(format!(
                    "h must be a number or \"inf\", got {other}"
                )))
            }
        };
        let flag_h = args.h.as_deref().map(Strength::parse).transpose()?;
        let statistics = match args.stats.as_deref().or(file.statistics.as_deref()) {
            Some(s) => Some(Statistics::parse(s)?),
            None => None,
        };
        let family = if args.general {
            Some(FamilyName::General)
        } else {
            args.family.or(file.family)
        };
        Ok(Self {
            family,
            theta: args.theta.or(file.theta),
            a: args.a.or(file.a),
            b: args.b.or(file.b),
            c: args.c.or(file.c),
            d: args.d.or(file.d),
            h: flag_h.or(file_h),
            spin_states: args.spin_states.or(file.n),
            particles: args.particles.or(file.particles),
            statistics,
        })
    }

    fn spin_states(&self, default: usize) -> usize {
        self.spin_states.unwrap_or(default)
    }

    fn statistics(&self) -> Statistics {
        self.statistics.unwrap_or(Statistics::Boson)
    }

    fn reject(&self, unused: &[(&str, bool)], family: &str) -> Result<()> {
        for (name, present) in unused {
            if *present {
                return Err(Error::Config(format!("--{name} is not used by {family}")));
            }
        }
        Ok(())
    }

    fn model(&self) -> Result<Model> {
        let general_keys = [
            ("theta", self.theta.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("d", self.d.is_some()),
        ];
        match self.family {
            None => Err(Error::Config(
                "select a family with --family or --general".into(),
            )),
            Some(FamilyName::Delta) | Some(FamilyName::Antidelta) => {
                let name = if self.family == Some(FamilyName::Delta) {
                    "delta"
                } else {
                    "antidelta"
                };
                self.reject(&general_keys, name)?;
                self.reject(&[("h", self.h.is_some())], name)?;
                let c = self
                    .c
                    .ok_or_else(|| Error::Config(format!("{name} needs --c")))?;
                if !c.is_finite() {
                    return Err(Error::Config("c must be finite".into()));
                }
                Ok(Model::Family(if name == "delta" {
                    IntegrableFamily::Delta(c)
                } else {
                    IntegrableFamily::AntiDelta(c)
                }))
            }
            Some(FamilyName::Separated) => {
                self.reject(&general_keys, "separated")?;
                self.reject(&[("c", self.c.is_some())], "separated")?;
                let h = self
                    .h
                    .ok_or_else(|| Error::Config("separated needs --h".into()))?;
                Ok(Model::Family(IntegrableFamily::Separated(h)))
            }
            Some(FamilyName::General) => {
                self.reject(&[("h", self.h.is_some())], "general")?;
                let a = self
                    .a
                    .ok_or_else(|| Error::Config("general needs --a".into()))?;
                let b = self.b.unwrap_or(0.0);
                let c = self.c.unwrap_or(0.0);
                let d = match self.d {
                    Some(d) => d,
                    None if a != 0.0 => (1.0 + b * c) / a,
                    None => return Err(Error::Config("--d is required when a = 0".into())),
                };
                let p = validate_nonseparated(NonSeparatedParams::new(
                    self.theta.unwrap_or(0.0),
                    a,
                    b,
                    c,
                    d,
                ))
                .map_err(|e| Error::Config(e.to_string()))?;
                Ok(Model::General(p))
            }
        }
    }
}

fn parse_list<T>(text: &str, what: &str, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            item(tok.trim()).ok_or_else(|| Error::Config(format!("bad {what} value {tok:?}")))
        })
        .collect()
}

fn parse_reals(text: &str, what: &str) -> Result<Vec<f64>> {
    parse_list(text, what, |t| {
        t.parse::<f64>().ok().filter(|x| x.is_finite())
    })
}

fn parse_momenta(text: &str) -> Result<Vec<C64>> {
    let k = parse_list(text, "momentum", parse_complex)?;
    if k.is_empty() {
        return Err(Error::Config("empty momentum list".into()));
    }
    Ok(k)
}

fn momentum_set(k: Vec<C64>) -> Result<MomentumSet> {
    MomentumSet::new(k).map_err(|e| Error::Config(e.to_string()))
}

/// Momenta from `--k`, or a seeded real draw of `count` increasing values.
fn momenta_or_sample(
    k: Option<&str>,
    count: usize,
    params: Option<&ContactParams>,
    seed: u64,
) -> Result<Vec<C64>> {
    match k {
        Some(text) => {
            let k = parse_momenta(text)?;
            if k.len() != count {
                return Err(Error::Config(format!(
                    "{} momenta given, need {count}",
                    k.len()
                )));
            }
            Ok(k)
        }
        None => {
            let mut rng = rng_from_seed(seed);
            Ok(MomentumSampler::default()
                .sample_increasing(&mut rng, count, params)?
                .value)
        }
    }
}

fn particles_from(settings: &Settings, k: Option<&str>, default: usize) -> Result<usize> {
    let from_k = k.map(|t| parse_momenta(t).map(|v| v.len())).transpose()?;
    match (settings.particles, from_k) {
        (Some(n), Some(m)) if n != m => Err(Error::Config(format!("--N {n} but {m} momenta"))),
        (Some(n), _) => Ok(n),
        (None, Some(m)) => Ok(m),
        (None, None) => Ok(default),
    }
}

fn system(settings: &Settings, particles: usize, default_n: usize) -> Result<SpinSystem> {
    SpinSystem::new(
        particles,
        settings.spin_states(default_n),
        settings.statistics(),
    )
    .map_err(|e| Error::Config(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Config(format!("json output failed: {e}")))
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let io = |e: csv::Error| Error::Config(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv output failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

fn exp(x: f64) -> String {
    format!("{x:e}")
}

fn verdict(pass: bool) -> String {
    if pass { "pass" } else { "fail" }.to_string()
}

fn code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Report text plus exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_pole() {
        EXIT_POLE
    } else {
        EXIT_CONFIG
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::YbeCheck(a) => ybe_check(a),
        Command::YbeScan(a) => ybe_scan(a),
        Command::Smatrix(a) => smatrix(a),
        Command::Bound(a) => bound(a),
        Command::WavefnCheck(a) => wavefn_check(a),
        Command::DualityCheck(a) => duality_check(a),
    }
}

/// Parse `args`, run, print, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_PASS
            };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct YbeCheckOutput<'a> {
    n: usize,
    statistics: Statistics,
    #[serde(flatten)]
    report: &'a YbeReport,
}

fn params_columns(p: &ParamsRecord) -> Vec<String> {
    match *p {
        ParamsRecord::Nonseparated { theta, a, b, c, d } => vec![
            "nonseparated".into(),
            theta.to_string(),
            a.to_string(),
            b.to_string(),
            c.to_string(),
            d.to_string(),
            String::new(),
        ],
        ParamsRecord::Separated { h } => {
            let mut v = vec!["separated".to_string()];
            v.extend(std::iter::repeat_n(String::new(), 5));
            v.push(h.to_string());
            v
        }
    }
}

fn ybe_check(args: &YbeCheckArgs) -> Result<Outcome> {
    let settings = Settings::load(&args.model)?;
    if let Some(n) = settings.particles.filter(|&n| n != 3) {
        return Err(Error::Config(format!(
            "ybe-check works on N = 3, got --N {n}"
        )));
    }
    let params = settings.model()?.params();
    let system = system(&settings, 3, 2)?;
    let k = momenta_or_sample(args.k.as_deref(), 3, Some(&params), args.common.seed)?;
    momentum_set(k.clone())?;
    let tol = args.common.tol.unwrap_or(PASS_TOL);
    let report = ybe_residual(&params, [k[0], k[1], k[2]], &system, tol)?;
    let stdout = match args.common.format {
        Format::Json => to_json(&YbeCheckOutput {
            n: system.spin_states(),
            statistics: system.statistics(),
            report: &report,
        })?,
        Format::Csv => {
            let mut row = params_columns(&report.params);
            row.extend([
                exp(report.residual_ybe),
                exp(report.residual_inverse),
                exp(report.residual_commute),
                verdict(report.verdict),
            ]);
            to_csv(
                &[
                    "kind",
                    "theta",
                    "a",
                    "b",
                    "c",
                    "d",
                    "h",
                    "residual_ybe",
                    "residual_inverse",
                    "residual_commute",
                    "verdict",
                ],
                &[row],
            )?
        }
    };
    Ok(Outcome {
        stdout,
        code: code(report.verdict),
    })
}

/// Twenty strengths: 19 evenly spaced in [-3, 3] and the hard wall.
pub fn default_separated_strengths() -> Vec<Strength> {
    let mut hs: Vec<Strength> = (0..19)
        .map(|i| Strength::Finite(-3.0 + i as f64 / 3.0))
        .collect();
    hs.push(Strength::Infinite);
    hs
}

fn ybe_scan(args: &YbeScanArgs) -> Result<Outcome> {
    let settings = Settings::load(&args.model)?;
    let separated = args.h_values.is_some() || settings.family == Some(FamilyName::Separated);
    let grid = if separated {
        if [&args.thetas, &args.a_values, &args.b_values, &args.c_values]
            .iter()
            .any(|o| o.is_some())
        {
            return Err(Error::Config(
                "nonseparated grid flags given with a separated scan".into(),
            ));
        }
        let h_values = match &args.h_values {
            Some(text) => parse_list(text, "h", |t| Strength::parse(t).ok())?,
            None => default_separated_strengths(),
        };
        ScanGrid::Separated { h_values }
    } else {
        if matches!(
            settings.family,
            Some(FamilyName::Delta) | Some(FamilyName::Antidelta)
        ) {
            return Err(Error::Config(
                "ybe-scan takes --family separated or the nonseparated grid flags".into(),
            ));
        }
        let mut g = NonSeparatedGrid::default();
        if let Some(t) = &args.thetas {
            g.thetas = parse_reals(t, "theta")?;
        }
        if let Some(t) = &args.a_values {
            g.a_values = parse_reals(t, "a")?;
        }
        if let Some(t) = &args.b_values {
            g.b_values = parse_reals(t, "b")?;
        }
        if let Some(t) = &args.c_values {
            g.c_values = parse_reals(t, "c")?;
        }
        ScanGrid::Nonseparated(g)
    };
    if let Some(n) = settings.particles.filter(|&n| n != 3) {
        return Err(Error::Config(format!(
            "ybe-scan works on N = 3, got --N {n}"
        )));
    }
    let config = ScanConfig {
        grid,
        system: system(&settings, 3, 2)?,
        triples: args.triples,
        tol: args.common.tol.unwrap_or(PASS_TOL),
        seed: args.common.seed,
    };
    let table = classification_scan(&config)?;
    let stdout = match args.common.format {
        Format::Json => to_json(&table)?,
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))?
        }
    };
    Ok(Outcome {
        stdout,
        code: code(table.matches_prediction),
    })
}

#[derive(Serialize)]
struct SmatrixOutput {
    family: IntegrableFamily,
    #[serde(rename = "N")]
    particles: usize,
    n: usize,
    statistics: Statistics,
    clusters: Option<(usize, usize)>,
    momenta: MomentumSet,
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    unitarity: f64,
    symmetry: f64,
    sprime_difference: Option<f64>,
    /// Whether unitarity and symmetry are part of the check (real momenta only).
    unitarity_checked: bool,
    tol: f64,
    pass: bool,
}

fn parse_pair<T>(text: &str, what: &str, item: impl Fn(&str) -> Option<T>) -> Result<(T, T)> {
    let mut v = parse_list(text, what, item)?;
    if v.len() != 2 {
        return Err(Error::Config(format!(
            "--{what} takes two comma-separated values"
        )));
    }
    let b = v.pop().expect("two");
    let a = v.pop().expect("two");
    Ok((a, b))
}

fn smatrix(args: &SmatrixArgs) -> Result<Outcome> {
    let settings = Settings::load(&args.model)?;
    let family = settings.model()?.family("smatrix")?;
    let tol = args.common.tol.unwrap_or(PASS_TOL);
    let (s, sprime, clusters): (SMatrix, Option<SMatrix>, Option<(usize, usize)>) =
        match &args.clusters {
            Some(text) => {
                if args.k.is_some() {
                    return Err(Error::Config("--k and --clusters are exclusive".into()));
                }
                let sizes = parse_pair(text, "clusters", |t| t.parse::<usize>().ok())?;
                let shifts = match &args.shifts {
                    Some(t) => parse_pair(t, "shifts", |t| t.parse::<f64>().ok())?,
                    None => return Err(Error::Config("--clusters needs --shifts".into())),
                };
                let h = match family {
                    IntegrableFamily::Separated(Strength::Finite(h)) => h,
                    _ => {
                        return Err(Error::Config(
                            "cluster scattering needs --family separated with finite h".into(),
                        ))
                    }
                };
                let particles = sizes.0 + sizes.1;
                if settings.particles.is_some_and(|n| n != particles) {
                    return Err(Error::Config("--N disagrees with the cluster sizes".into()));
                }
                let system = system(&settings, particles, 1)?;
                (
                    cluster_s_matrix(h, sizes, shifts, &system)?,
                    None,
                    Some(sizes),
                )
            }
            None => {
                if args.shifts.is_some() {
                    return Err(Error::Config("--shifts needs --clusters".into()));
                }
                let particles = particles_from(&settings, args.k.as_deref(), 2)?;
                let system = system(&settings, particles, 1)?;
                let k = momenta_or_sample(
                    args.k.as_deref(),
                    particles,
                    Some(&family.embed()),
                    args.common.seed,
                )?;
                let k = momentum_set(k)?;
                let s = s_matrix(&family, &k, &system)?;
                let alt = s_matrix_via_sprime(&family, &k, &system)?;
                (s, Some(alt), None)
            }
        };
    let report = verify_s_properties(&s, tol);
    let sprime_difference = sprime
        .as_ref()
        .map(|alt| max_abs_diff(&s.matrix, &alt.matrix));
    let unitarity_checked = clusters.is_none() && s.momenta.is_real();
    let pass =
        sprime_difference.is_none_or(|d| d <= EXACT_TOL) && (!unitarity_checked || report.pass);
    let dim = s.system.dim();
    let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..dim)
            .map(|r| (0..dim).map(|c| f(&s.matrix[(r, c)]) + 0.0).collect())
            .collect()
    };
    let stdout = match args.common.format {
        Format::Json => to_json(&SmatrixOutput {
            family: s.family,
            particles: s.system.particles(),
            n: s.system.spin_states(),
            statistics: s.system.statistics(),
            clusters,
            momenta: s.momenta.clone(),
            dim,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
            unitarity: report.unitarity,
            symmetry: report.symmetry,
            sprime_difference,
            unitarity_checked,
            tol,
            pass,
        })?,
        Format::Csv => {
            let mut out = Vec::new();
            for r in 0..dim {
                for c in 0..dim {
                    let z = s.matrix[(r, c)];
                    out.push(vec![
                        r.to_string(),
                        c.to_string(),
                        (z.re + 0.0).to_string(),
                        (z.im + 0.0).to_string(),
                    ]);
                }
            }
            to_csv(&["row", "col", "re", "im"], &out)?
        }
    };
    Ok(Outcome {
        stdout,
        code: code(pass),
    })
}

#[derive(Serialize)]
struct BoundStateOutput {
    pattern: EpsilonPattern,
    eigenspace_dim: usize,
    residuals: Option<BoundResiduals>,
    pass: Option<bool>,
}

#[derive(Serialize)]
struct BoundOutput {
    #[serde(rename = "N")]
    particles: usize,
    h: f64,
    n: usize,
    statistics: Statistics,
    momenta: MomentumSet,
    energy: f64,
    pattern_count: usize,
    realized_degeneracy: usize,
    states: Vec<BoundStateOutput>,
    tol: f64,
    pass: bool,
}

fn bound(args: &BoundArgs) -> Result<Outcome> {
    let settings = Settings::load(&args.model)?;
    match settings.family {
        None | Some(FamilyName::Separated) => {}
        Some(_) => {
            return Err(Error::Config(
                "bound states belong to the separated family".into(),
            ))
        }
    }
    if settings.c.is_some()
        || settings.a.is_some()
        || settings.b.is_some()
        || settings.d.is_some()
        || settings.theta.is_some()
    {
        return Err(Error::Config(
            "bound takes --N, --h, --n and --stats".into(),
        ));
    }
    let particles = settings
        .particles
        .ok_or_else(|| Error::Config("bound needs --N".into()))?;
    let h = match settings.h {
        Some(Strength::Finite(h)) => h,
        Some(Strength::Infinite) => {
            return Err(Error::Precondition(
                "no bound states for the hard wall".into(),
            ))
        }
        None => return Err(Error::Config("bound needs --h".into())),
    };
    if h >= 0.0 {
        return Err(Error::Precondition(format!(
            "bound states need h < 0, got {h}"
        )));
    }
    let system = system(&settings, particles, 1)?;
    let tol = args.common.tol.unwrap_or(PASS_TOL);
    let momenta = bound_momenta(particles, h)?;
    let mut rng = rng_from_seed(args.common.seed);
    let mut states = Vec::new();
    let mut all_pass = true;
    let mut realized = 0;
    for pattern in EpsilonPattern::all(particles)? {
        let basis = spin_eigenspace(&system, &pattern)?;
        realized += basis.len();
        let mut residuals: Option<BoundResiduals> = None;
        let mut pass = None;
        for v in &basis {
            let wf = bound_wavefunction(&system, h, &pattern, v)?;
            let rep = verify_bound_state(&wf, args.trials, tol, &mut rng)?;
            let r = rep.residuals;
            residuals = Some(match residuals {
                None => r,
                Some(acc) => BoundResiduals {
                    boundary: acc.boundary.max(r.boundary),
                    laplacian: acc.laplacian.max(r.laplacian),
                    bethe_exponent: acc.bethe_exponent.max(r.bethe_exponent),
                    decay_slope: acc.decay_slope.max(r.decay_slope),
                },
            });
            pass = Some(pass.unwrap_or(true) && rep.pass);
        }
        all_pass &= pass.unwrap_or(true);
        states.push(BoundStateOutput {
            pattern,
            eigenspace_dim: basis.len(),
            residuals,
            pass,
        });
    }
    let output = BoundOutput {
        particles,
        h,
        n: system.spin_states(),
        statistics: system.statistics(),
        momenta,
        energy: bound_energy(particles, h),
        pattern_count: states.len(),
        realized_degeneracy: realized,
        states,
        tol,
        pass: all_pass,
    };
    let stdout = match args.common.format {
        Format::Json => to_json(&output)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = output
                .states
                .iter()
                .map(|s| {
                    let mut row = vec![s.pattern.to_string(), s.eigenspace_dim.to_string()];
                    match &s.residuals {
                        Some(r) => row.extend([
                            exp(r.boundary),
                            exp(r.laplacian),
                            exp(r.bethe_exponent),
                            exp(r.decay_slope),
                        ]),
                        None => row.extend(std::iter::repeat_n(String::new(), 4)),
                    }
                    row.push(s.pass.map(verdict).unwrap_or_default());
                    row
                })
                .collect();
            to_csv(
                &[
                    "pattern",
                    "eigenspace_dim",
                    "boundary",
                    "laplacian",
                    "bethe_exponent",
                    "decay_slope",
                    "verdict",
                ],
                &rows,
            )?
        }
    };
    Ok(Outcome {
        stdout,
        code: code(all_pass),
    })
}

#[derive(Serialize)]
struct WavefnOutput {
    family: IntegrableFamily,
    #[serde(rename = "N")]
    particles: usize,
    n: usize,
    statistics: Statistics,
    momenta: MomentumSet,
    initial_vectors: Vec<usize>,
    boundary_residual: f64,
    worst: Option<PlaneLocation>,
    /// Largest table difference between the two reduced words, relative to the largest entry.
    path_independence: f64,
    samples: Vec<WaveSample>,
    tol: f64,
    pass: bool,
}

fn wavefn_check(args: &WavefnArgs) -> Result<Outcome> {
    let settings = Settings::load(&args.model)?;
    let family = settings.model()?.family("wavefn-check")?;
    let particles = particles_from(&settings, args.k.as_deref(), 3)?;
    let system = system(&settings, particles, 1)?;
    let tol = args.common.tol.unwrap_or(1e-9);
    let k = momentum_set(momenta_or_sample(
        args.k.as_deref(),
        particles,
        Some(&family.embed()),
        args.common.seed,
    )?)?;
    let initial: Vec<usize> = match args.basis {
        Some(b) if b >= system.dim() => {
            return Err(Error::Config(format!(
                "--basis {b} outside [0, {})",
                system.dim()
            )))
        }
        Some(b) => vec![b],
        None => (0..system.dim()).collect(),
    };
    let mut rng = rng_from_seed(args.common.seed.wrapping_add(1));
    let mut boundary: f64 = 0.0;
    let mut worst = None;
    let mut path: f64 = 0.0;
    let mut samples = Vec::new();
    for (pos, &b) in initial.iter().enumerate() {
        let wf = WaveFunction::build(&family, &k, &system, &system.basis_vector(b)?)?;
        let report = check_boundary_conditions(&wf, args.trials, tol, &mut rng)?;
        if report.max_residual >= boundary {
            boundary = report.max_residual;
            worst = report.worst;
        }
        let table = wf.table();
        for p in table.permutations() {
            let stored = table.entry(p).expect("listed");
            let other = table.chain_along(&p.reverse_bubble_word())?;
            let scale = max_abs(stored).max(1.0);
            path = path.max(max_abs_diff_vec(stored, &other) / scale);
        }
        if pos == 0 {
            for _ in 0..args.samples {
                let x = spread_points(&mut rng, particles, 3.0, 0.2);
                samples.push(WaveSample::new(&x, &wf.evaluate(&x)?));
            }
        }
    }
    let pass = boundary <= tol && path <= EXACT_TOL;
    let output = WavefnOutput {
        family,
        particles,
        n: system.spin_states(),
        statistics: system.statistics(),
        momenta: k,
        initial_vectors: initial,
        boundary_residual: boundary,
        worst,
        path_independence: path,
        samples,
        tol,
        pass,
    };
    let stdout = match args.common.format {
        Format::Json => to_json(&output)?,
        Format::Csv => to_csv(
            &[
                "family",
                "N",
                "n",
                "statistics",
                "boundary_residual",
                "path_independence",
                "verdict",
            ],
            &[vec![
                output.family.name().to_string(),
                particles.to_string(),
                output.n.to_string(),
                output.statistics.to_string(),
                exp(boundary),
                exp(path),
                verdict(pass),
            ]],
        )?,
    };
    Ok(Outcome {
        stdout,
        code: code(pass),
    })
}

#[derive(Serialize)]
struct KinkSummary {
    residual_opposite_sign: f64,
    residual_same_sign: f64,
    verified_sign: i8,
    pointwise_residual: f64,
    table_residual: f64,
    samples: usize,
    pass: bool,
}

#[derive(Serialize)]
struct DualityOutput {
    c: f64,
    dual_c: f64,
    #[serde(rename = "N")]
    particles: usize,
    n: usize,
    source_statistics: Statistics,
    target_statistics: Statistics,
    momenta: MomentumSet,
    spectral_parameters: Vec<ComplexRecord>,
    y_identity_residual: f64,
    y_identity_bitwise: bool,
    kink: KinkSummary,
    tol: f64,
    pass: bool,
}

fn duality_check(args: &DualityArgs) -> Result<Outcome> {
    let settings = Settings::load(&args.model)?;
    match settings.family {
        None | Some(FamilyName::Delta) => {}
        Some(_) => {
            return Err(Error::Config(
                "duality-check starts from the delta family".into(),
            ))
        }
    }
    if settings.h.is_some()
        || settings.a.is_some()
        || settings.b.is_some()
        || settings.d.is_some()
        || settings.theta.is_some()
    {
        return Err(Error::Config(
            "duality-check takes --c, --N, --n and --stats".into(),
        ));
    }
    let c = settings.c.unwrap_or(1.0);
    let particles = particles_from(&settings, args.k.as_deref(), 3)?;
    let system = system(&settings, particles, 2)?;
    let dual_system = system.with_statistics(system.statistics().flipped());
    let tol = args.common.tol.unwrap_or(1e-9);
    let delta = IntegrableFamily::Delta(c);
    let anti = IntegrableFamily::AntiDelta(-c);
    let k = momentum_set(momenta_or_sample(
        args.k.as_deref(),
        particles,
        Some(&delta.embed()),
        args.common.seed,
    )?)?;

    let pair = system.with_particles(2)?;
    let dual_pair = dual_system.with_particles(2)?;
    let mut spectral = Vec::new();
    let mut y_residual: f64 = 0.0;
    let mut bitwise = true;
    for a in k.as_slice() {
        for b in k.as_slice() {
            if a == b {
                continue;
            }
            let kd = a - b;
            spectral.push(kd);
            let y1 = family_coefficients(&delta, kd)?.matrix(&pair, 1, 2)?;
            let y2 = family_coefficients(&anti, kd)?.matrix(&dual_pair, 1, 2)?;
            y_residual = y_residual.max(max_abs_diff(&y1, &y2));
            bitwise &= y1 == y2;
        }
    }

    let mut rng = rng_from_seed(args.common.seed.wrapping_add(1));
    let mut kink = KinkSummary {
        residual_opposite_sign: 0.0,
        residual_same_sign: 0.0,
        verified_sign: 0,
        pointwise_residual: 0.0,
        table_residual: 0.0,
        samples: 0,
        pass: true,
    };
    for b in 0..system.dim() {
        let wf = WaveFunction::build(&delta, &k, &system, &system.basis_vector(b)?)?;
        let r = kink_gauge_check(&wf, args.trials, tol, &mut rng)?;
        kink.residual_opposite_sign = kink.residual_opposite_sign.max(r.residual_opposite_sign);
        kink.residual_same_sign = kink.residual_same_sign.max(r.residual_same_sign);
        kink.pointwise_residual = kink.pointwise_residual.max(r.pointwise_residual);
        kink.table_residual = kink.table_residual.max(r.table_residual);
        kink.samples += r.samples;
        kink.pass &= r.pass;
    }
    kink.verified_sign = match (
        kink.residual_opposite_sign <= tol,
        kink.residual_same_sign <= tol,
    ) {
        (true, false) => -1,
        (false, true) => 1,
        _ => 0,
    };
    let pass = y_residual <= 1e-15 && kink.pass;
    let output = DualityOutput {
        c,
        dual_c: -c,
        particles,
        n: system.spin_states(),
        source_statistics: system.statistics(),
        target_statistics: dual_system.statistics(),
        momenta: k,
        spectral_parameters: complex_records(&spectral),
        y_identity_residual: y_residual,
        y_identity_bitwise: bitwise,
        kink,
        tol,
        pass,
    };
    let stdout = match args.common.format {
        Format::Json => to_json(&output)?,
        Format::Csv => to_csv(
            &[
                "c",
                "dual_c",
                "N",
                "n",
                "y_identity_residual",
                "y_identity_bitwise",
                "kink_residual",
                "verified_sign",
                "pointwise_residual",
                "verdict",
            ],
            &[vec![
                c.to_string(),
                (-c).to_string(),
                particles.to_string(),
                output.n.to_string(),
                exp(y_residual),
                bitwise.to_string(),
                exp(output.kink.residual_opposite_sign),
                output.kink.verified_sign.to_string(),
                exp(output.kink.pointwise_residual),
                verdict(pass),
            ]],
        )?,
    };
    Ok(Outcome {
        stdout,
        code: code(pass),
    })
}
