//! Command-line front end: state documents, single computations, the
//! reference tables, bound sweeps and the verification campaigns.
//!
//! Exit codes: 0 success, 1 violation or oracle disagreement, 2 usage or
//! schema error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::{self, Write};
use thiserror::Error;

use crate::bounds::{self, BoundError, BoundFamily, BoundResult, EnergyInterval};
use crate::explorer::{self, ExplorerError, PairFamily, PairSampleConfig};
use crate::fidelity::{self, FidelityError};
use crate::oracle::{self, OracleError, QuadratureGrid};
use crate::states::{GaussianState, MixedGaussianState, PureGaussianState, SecondMoments, StateError};
use crate::tables;

/// Disagreement threshold for fidelity, energy and purity in `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-6;
/// Threshold for the quadrature overlap against the closed form.
pub const OVERLAP_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}
usage_from!(StateError, BoundError, FidelityError, ExplorerError, serde_json::Error);

/// JSON form of a state.
///
/// ```json
/// {"kind": "pure", "a": 1.0, "b": 0.0, "x": 0.0, "p": 0.0}
/// {"kind": "mixed", "a": 1.0, "b": 0.0, "zeta": 0.5}
/// ```
///
/// `b`, `x` and `p` default to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateDocument {
    Pure {
        a: f64,
        #[serde(default)]
        b: f64,
        #[serde(default)]
        x: f64,
        #[serde(default)]
        p: f64,
    },
    Mixed {
        a: f64,
        #[serde(default)]
        b: f64,
        zeta: f64,
    },
}

impl StateDocument {
    pub fn to_state(self) -> Result<GaussianState, StateError> {
        Ok(match self {
            StateDocument::Pure { a, b, x, p } => PureGaussianState::new(a, b, x, p)?.into(),
            StateDocument::Mixed { a, b, zeta } => MixedGaussianState::new(a, b, zeta)?.into(),
        })
    }
}

impl From<&GaussianState> for StateDocument {
    fn from(s: &GaussianState) -> Self {
        match s {
            GaussianState::Pure(s) => StateDocument::Pure {
                a: s.a(),
                b: s.b(),
                x: s.x0(),
                p: s.p0(),
            },
            GaussianState::Mixed(s) => StateDocument::Mixed {
                a: s.a(),
                b: s.b(),
                zeta: s.zeta(),
            },
        }
    }
}

/// Parses a state argument: inline JSON, or `@path` to read it from a file.
pub fn parse_state_arg(arg: &str) -> Result<StateDocument, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid state document: {e}")))
}

#[derive(Debug, Parser)]
#[command(name = "gaussbound", version, about = "Fidelity and energy bounds for single-mode Gaussian states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity, Bures distance and energy comparison of two states.
    Fidelity {
        /// First state (JSON or @file).
        #[arg(long)]
        state_a: String,
        /// Second state (JSON or @file).
        #[arg(long)]
        state_b: String,
    },
    /// Energy, purity and moments of one state.
    Energy {
        /// State (JSON or @file).
        #[arg(long)]
        state: String,
    },
    /// Largest Y at a fidelity, or largest fidelity at a Y.
    Bound(BoundArgs),
    /// Largest fidelity compatible with a Y.
    InverseBound(InverseArgs),
    /// Print one of the reference tables.
    Table(TableArgs),
    /// Tabulate bounds over a fidelity grid.
    Sweep(SweepArgs),
    /// Randomized check of a bound over sampled pairs.
    Verify(VerifyArgs),
    /// Compare closed forms against the quadrature and Fock-space oracles.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(alias = "coh")]
    Coherent,
    #[value(alias = "delta", alias = "displaced-equal-shape")]
    Displaced,
    #[value(alias = "fixed")]
    FixedShape,
    #[value(alias = "pure-general")]
    Pure,
    #[value(alias = "mix", alias = "mixed-equal-purity")]
    Mixed,
    #[value(alias = "smix")]
    Supermixed,
    #[value(alias = "pvm")]
    PureVsMixed,
}

impl FamilyArg {
    fn column(self) -> &'static str {
        match self {
            FamilyArg::Coherent => "y_coh",
            FamilyArg::Displaced => "y_delta",
            FamilyArg::FixedShape => "y_fixed",
            FamilyArg::Pure => "y_pure",
            FamilyArg::Mixed => "y_mix",
            FamilyArg::Supermixed => "y_smix",
            FamilyArg::PureVsMixed => "y_pvm",
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ShapeArgs {
    /// Mixing parameter, for `mixed` and `pure-vs-mixed`.
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Squeezing of the shared shape, for `fixed-shape`.
    #[arg(long)]
    pub a: Option<f64>,
    /// Chirp ratio b/a of the shared shape, for `fixed-shape`.
    #[arg(long)]
    pub c: Option<f64>,
}

impl ShapeArgs {
    fn family(&self, f: FamilyArg) -> Result<BoundFamily, CliError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Usage(format!("--{name} is required for this family")))
        };
        let fam = match f {
            FamilyArg::Coherent => BoundFamily::Coherent,
            FamilyArg::Displaced => BoundFamily::DisplacedEqualShape,
            FamilyArg::FixedShape => BoundFamily::FixedShape {
                a: need(self.a, "a")?,
                c: self.c.unwrap_or(0.0),
            },
            FamilyArg::Pure => BoundFamily::PureGeneral,
            FamilyArg::Mixed => BoundFamily::MixedEqualPurity {
                zeta: need(self.zeta, "zeta")?,
            },
            FamilyArg::Supermixed => BoundFamily::Supermixed,
            FamilyArg::PureVsMixed => BoundFamily::PureVsMixed {
                zeta: need(self.zeta, "zeta")?,
            },
        };
        fam.validate()?;
        Ok(fam)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, conflicts_with = "y", required_unless_present = "y")]
    pub fidelity: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[command(flatten)]
    pub shape: ShapeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct InverseArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub y: f64,
    #[command(flatten)]
    pub shape: ShapeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    /// Table number.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    pub id: u8,
    /// Print every cell at 6 decimals.
    #[arg(long)]
    pub full: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Families to tabulate, one column each.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [FamilyArg::Coherent, FamilyArg::Displaced, FamilyArg::Pure])]
    pub families: Vec<FamilyArg>,
    #[arg(long, default_value_t = 0.5)]
    pub f_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub f_max: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
    /// Exit 1 unless coherent < displaced < supermixed < mixed < pure holds
    /// strictly on every row (for the requested subset).
    #[arg(long)]
    pub assert_chain: bool,
    #[command(flatten)]
    pub shape: ShapeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFamily {
    #[value(alias = "pure-general")]
    Pure,
    MixedEqual,
    PureVsMixed,
    MixedGeneral,
}

impl From<VerifyFamily> for PairFamily {
    fn from(f: VerifyFamily) -> Self {
        match f {
            VerifyFamily::Pure => PairFamily::PureGeneral,
            VerifyFamily::MixedEqual => PairFamily::MixedEqual,
            VerifyFamily::PureVsMixed => PairFamily::PureVsMixed,
            VerifyFamily::MixedGeneral => PairFamily::MixedGeneral,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = VerifyFamily::Pure)]
    pub family: VerifyFamily,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, env = "GAUSSBOUND_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Relative tolerance on Y / Y_m - 1.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Worker threads (0 = one per core). Does not affect the report.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Fock-space dimension for the fidelity comparison.
    #[arg(long, default_value_t = 40)]
    pub dim: usize,
    #[arg(long, env = "GAUSSBOUND_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Largest trace lost to truncation in the fidelity comparison.
    #[arg(long, default_value_t = 1e-5)]
    pub tail_tol: f64,
    /// Compare every state with itself.
    #[arg(long)]
    pub identical: bool,
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Fidelity { state_a, state_b } => {
            let r = cmd_fidelity(&parse_state_arg(&state_a)?, &parse_state_arg(&state_b)?)?;
            emit_json(out, &r)?;
            Ok(0)
        }
        Command::Energy { state } => {
            emit_json(out, &cmd_energy(&parse_state_arg(&state)?)?)?;
            Ok(0)
        }
        Command::Bound(a) => {
            let fam = a.shape.family(a.family)?;
            match (a.fidelity, a.y) {
                (Some(f), _) => emit_json(out, &bounds::bound_at_fidelity(&fam, f)?)?,
                (None, Some(y)) => emit_json(out, &inverse_report(&fam, y)?)?,
                (None, None) => return Err(CliError::Usage("one of --fidelity or --y is required".into())),
            }
            Ok(0)
        }
        Command::InverseBound(a) => {
            let fam = a.shape.family(a.family)?;
            emit_json(out, &inverse_report(&fam, a.y)?)?;
            Ok(0)
        }
        Command::Table(a) => {
            match (a.id, a.format) {
                (1, TableFormat::Text) => write!(out, "{}", tables::render_table1(a.full))?,
                (2, TableFormat::Text) => write!(out, "{}", tables::render_table2(a.full))?,
                (1, TableFormat::Json) => emit_json(out, &tables::table1())?,
                (_, TableFormat::Json) => emit_json(out, &tables::table2())?,
                _ => unreachable!("id is range-checked by the parser"),
            }
            Ok(0)
        }
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Verify(a) => {
            let mut cfg = PairSampleConfig::new(a.family.into(), a.samples, a.seed);
            cfg.samples = a.samples;
            let report = explorer::verify_conjecture_with_workers(&cfg, a.tol, a.workers)?;
            emit_json(out, &report)?;
            Ok(if report.violations == 0 { 0 } else { 1 })
        }
        Command::OracleCheck(a) => {
            let report = cmd_oracle_check(&a)?;
            emit_json(out, &report)?;
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn emit_json<T: Serialize + ?Sized>(out: &mut dyn Write, v: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub bures: f64,
    pub e1: f64,
    pub e2: f64,
    pub y: f64,
    /// `E2/E1 - 1`
    pub cal_e: f64,
}

pub fn cmd_fidelity(a: &StateDocument, b: &StateDocument) -> Result<FidelityReport, CliError> {
    let f = match (a.to_state()?, b.to_state()?) {
        (GaussianState::Pure(s), GaussianState::Pure(t)) => fidelity::fidelity_pure(&s, &t)?,
        (GaussianState::Mixed(s), GaussianState::Mixed(t)) => fidelity::fidelity_mixed(&s, &t)?,
        _ => return Err(CliError::Usage("both states must have the same kind (pure/pure or mixed/mixed)".into())),
    };
    let (e1, e2) = (a.to_state()?.energy(), b.to_state()?.energy());
    let cmp = fidelity::compare_energies(e1, e2)?;
    Ok(FidelityReport {
        fidelity: f.get(),
        bures: f.bures(),
        e1,
        e2,
        y: cmp.y,
        cal_e: cmp.cal_e,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub state: StateDocument,
    pub energy: f64,
    pub purity: f64,
    pub mean: (f64, f64),
    pub moments: SecondMoments,
}

pub fn cmd_energy(doc: &StateDocument) -> Result<EnergyReport, CliError> {
    let s = doc.to_state()?;
    Ok(EnergyReport {
        state: *doc,
        energy: s.energy(),
        purity: s.purity(),
        mean: s.mean(),
        moments: s.moments(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseReport {
    pub family: BoundFamily,
    pub y: f64,
    pub f_max: f64,
    /// Largest `E2/E1` with this `y`.
    pub ratio_max: f64,
    pub interval: Option<EnergyInterval>,
}

fn inverse_report(fam: &BoundFamily, y: f64) -> Result<InverseReport, CliError> {
    let BoundResult {
        family,
        fidelity,
        y_max,
        ratio_max,
        interval,
    } = bounds::bound_at_y(fam, y)?;
    Ok(InverseReport {
        family,
        y: y_max,
        f_max: fidelity,
        ratio_max,
        interval,
    })
}

/// One grid point of a sweep: `f`, one `y_max` per family (absent outside
/// the family's domain), and the largest energy ratio `E2/E1` allowed by the
/// general pure-state bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub f: f64,
    pub ys: Vec<Option<f64>>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

// canonical strict ordering of the chain; other families are not ranked
fn chain_rank(f: FamilyArg) -> Option<u8> {
    match f {
        FamilyArg::Coherent => Some(0),
        FamilyArg::Displaced => Some(1),
        FamilyArg::Supermixed => Some(2),
        FamilyArg::Mixed => Some(3),
        FamilyArg::Pure => Some(4),
        FamilyArg::FixedShape | FamilyArg::PureVsMixed => None,
    }
}

pub fn sweep_rows(
    families: &[(FamilyArg, BoundFamily)],
    f_min: f64,
    f_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, CliError> {
    if !(f_min > 0.0 && f_min < f_max && f_max < 1.0) {
        return Err(CliError::Usage(format!("need 0 < f-min < f-max < 1, got {f_min}, {f_max}")));
    }
    if steps < 2 {
        return Err(CliError::Usage(format!("steps must be at least 2, got {steps}")));
    }
    (0..steps)
        .map(|i| {
            let f = if i + 1 == steps {
                f_max
            } else {
                f_min + (f_max - f_min) * i as f64 / (steps - 1) as f64
            };
            let ys = families
                .iter()
                .map(|(_, fam)| match bounds::y_max(fam, f) {
                    Ok(y) => Ok(Some(y)),
                    Err(BoundError::ZetaTooLarge { .. }) => Ok(None),
                    Err(e) => Err(CliError::from(e)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let ratio = fidelity::y_to_max_ratio(bounds::y_max(&BoundFamily::PureGeneral, f)?);
            Ok(SweepRow { f, ys, ratio })
        })
        .collect()
}

/// Checks the strict chain ordering on each row; returns the first
/// offending `f`.
pub fn check_chain(families: &[FamilyArg], rows: &[SweepRow]) -> Option<f64> {
    let mut ranked: Vec<(u8, usize)> = families
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| chain_rank(f).map(|r| (r, i)))
        .collect();
    ranked.sort();
    rows.iter()
        .find(|row| {
            ranked.windows(2).any(|w| match (row.ys[w[0].1], row.ys[w[1].1]) {
                (Some(lo), Some(hi)) => lo >= hi || lo.is_nan() || hi.is_nan(),
                _ => true,
            })
        })
        .map(|row| row.f)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let families = a
        .families
        .iter()
        .map(|&f| Ok((f, a.shape.family(f)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = sweep_rows(&families, a.f_min, a.f_max, a.steps)?;
    let mut columns = vec!["f".to_string()];
    columns.extend(a.families.iter().map(|f| f.column().to_string()));
    columns.push("ratio".to_string());
    match a.format {
        SweepFormat::Csv => {
            writeln!(out, "{}", columns.join(","))?;
            for r in &rows {
                let mut cells = vec![r.f.to_string()];
                cells.extend(r.ys.iter().map(|y| y.map(|v| v.to_string()).unwrap_or_default()));
                cells.push(r.ratio.to_string());
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        SweepFormat::Json => {
            let table = SweepTable {
                columns,
                rows: rows
                    .iter()
                    .map(|r| {
                        let mut v = vec![Some(r.f)];
                        v.extend(r.ys.iter().copied());
                        v.push(Some(r.ratio));
                        v
                    })
                    .collect(),
            };
            emit_json(out, &table)?;
        }
    }
    if a.assert_chain {
        if let Some(f) = check_chain(&a.families, &rows) {
            eprintln!("chain ordering violated at f = {f}");
            return Ok(1);
        }
    }
    Ok(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub samples: usize,
    pub dim: usize,
    pub seed: u64,
    pub identical: bool,
    /// `|fidelity_fock - fidelity_pure|`
    pub max_fidelity_pure: f64,
    /// `|fidelity_fock - fidelity_mixed|`
    pub max_fidelity_mixed: f64,
    /// `|quadrature overlap - fidelity_pure|`
    pub max_overlap: f64,
    pub max_energy: f64,
    pub max_purity: f64,
    /// Largest of the fidelity, energy and purity disagreements.
    pub max_disagreement: f64,
    /// Largest dimension needed to bring the truncated trace within the
    /// default tail tolerance for the energy and purity comparison.
    pub moment_dim: usize,
    pub truncation: Option<String>,
    pub pass: bool,
}

fn moderate_pair(rng: &mut ChaCha8Rng) -> Result<(PureGaussianState, MixedGaussianState), StateError> {
    let a = rng.gen_range(0.5f64.ln()..=2.0f64.ln()).exp();
    let b = rng.gen_range(-1.0..=1.0);
    let x = rng.gen_range(-1.5..=1.5);
    let p = rng.gen_range(-1.5..=1.5);
    let am = rng.gen_range(0.5f64.ln()..=2.0f64.ln()).exp();
    let bm = rng.gen_range(-1.0..=1.0);
    let z = rng.gen_range(0.0..=0.6);
    Ok((PureGaussianState::new(a, b, x, p)?, MixedGaussianState::new(am, bm, z)?))
}

// Smallest dimension, stepping up from `dim`, whose tail is within the
// default tolerance.
fn converged_matrix(s: &GaussianState, dim: usize) -> Result<oracle::FockDensityMatrix, OracleError> {
    let mut d = dim;
    loop {
        match oracle::fock_matrix(s, d) {
            Err(OracleError::Truncation { .. }) if d < oracle::MAX_DIM => d = (d + 8).min(oracle::MAX_DIM),
            r => return r,
        }
    }
}

pub fn cmd_oracle_check(a: &OracleArgs) -> Result<OracleReport, CliError> {
    if a.samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    if !(2..=oracle::MAX_DIM).contains(&a.dim) {
        return Err(CliError::Usage(format!("dim must lie in [2, {}], got {}", oracle::MAX_DIM, a.dim)));
    }
    let grid = QuadratureGrid::default();
    let mut r = OracleReport {
        samples: a.samples,
        dim: a.dim,
        seed: a.seed,
        identical: a.identical,
        max_fidelity_pure: 0.0,
        max_fidelity_mixed: 0.0,
        max_overlap: 0.0,
        max_energy: 0.0,
        max_purity: 0.0,
        max_disagreement: 0.0,
        moment_dim: 0,
        truncation: None,
        pass: false,
    };
    let result: Result<(), OracleError> = (|| {
        for i in 0..a.samples as u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            rng.set_stream(i);
            let (p1, m1) = moderate_pair(&mut rng).expect("moderate box is valid");
            let (p2, m2) = if a.identical {
                (p1, m1)
            } else {
                moderate_pair(&mut rng).expect("moderate box is valid")
            };
            let fp = fidelity::fidelity_pure(&p1, &p2).expect("valid states").get();
            let fm = fidelity::fidelity_mixed(&m1, &m2).expect("valid states").get();
            let ov = oracle::overlap_pure(&p1, &p2, &grid)?;
            r.max_overlap = r.max_overlap.max((ov.fidelity - fp).abs());
            let fock = |s: GaussianState| oracle::fock_matrix_with_tol(&s, a.dim, a.tail_tol);
            let (rp1, rp2) = (fock(p1.into())?, fock(p2.into())?);
            let (rm1, rm2) = (fock(m1.into())?, fock(m2.into())?);
            r.max_fidelity_pure = r.max_fidelity_pure.max((oracle::fidelity_fock(&rp1, &rp2)? - fp).abs());
            r.max_fidelity_mixed = r.max_fidelity_mixed.max((oracle::fidelity_fock(&rm1, &rm2)? - fm).abs());
            for s in [GaussianState::from(p1), p2.into(), m1.into(), m2.into()] {
                let rho = converged_matrix(&s, a.dim)?;
                r.moment_dim = r.moment_dim.max(rho.dim());
                r.max_energy = r.max_energy.max((oracle::energy_fock(&rho) - s.energy()).abs());
                r.max_purity = r.max_purity.max((oracle::purity_fock(&rho) - s.purity()).abs());
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        r.truncation = Some(e.to_string());
    }
    r.max_disagreement = [r.max_fidelity_pure, r.max_fidelity_mixed, r.max_energy, r.max_purity]
        .into_iter()
        .fold(0.0, f64::max);
    r.pass = r.truncation.is_none() && r.max_disagreement <= ORACLE_TOL && r.max_overlap <= OVERLAP_TOL;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gaussbound").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn state_document_round_trip() {
        let docs = [
            r#"{"kind":"pure","a":1.2345678901234567,"b":-0.1,"x":3.0,"p":1e-7}"#,
            r#"{"kind":"mixed","a":0.3,"b":2.5,"zeta":0.123456789}"#,
        ];
        for d in docs {
            let parsed: StateDocument = serde_json::from_str(d).unwrap();
            let again: StateDocument = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
            assert_eq!(parsed, again);
        }
        let pure: StateDocument = serde_json::from_str(r#"{"kind":"pure","a":2}"#).unwrap();
        assert_eq!(pure, StateDocument::Pure { a: 2.0, b: 0.0, x: 0.0, p: 0.0 });
    }

    #[test]
    fn state_document_rejects_unknown_fields() {
        let e = parse_state_arg(r#"{"kind":"pure","a":1,"zeta":0.2}"#).unwrap_err();
        assert!(e.to_string().contains("zeta"), "{e}");
        let e = parse_state_arg(r#"{"kind":"mixed","a":1}"#).unwrap_err();
        assert!(e.to_string().contains("zeta"), "{e}");
        assert!(parse_state_arg(r#"{"kind":"thermal","a":1}"#).is_err());
    }

    #[test]
    fn fidelity_worked_example() {
        let a = StateDocument::Pure { a: 1.0, b: 0.0, x: 0.0, p: 0.0 };
        let b = StateDocument::Pure { a: 2.0, b: 0.0, x: 0.0, p: 0.0 };
        let r = cmd_fidelity(&a, &b).unwrap();
        assert_abs_diff_eq!(r.fidelity, 0.942809, epsilon = 1e-6);
        assert_abs_diff_eq!(r.y, 0.223607, epsilon = 1e-6);
        let same = cmd_fidelity(&a, &a).unwrap();
        assert_eq!((same.fidelity, same.y, same.bures), (1.0, 0.0, 0.0));
    }

    #[test]
    fn thermal_against_vacuum() {
        let a = StateDocument::Mixed { a: 1.0, b: 0.0, zeta: 0.0 };
        let b = StateDocument::Mixed { a: 1.154701, b: 0.0, zeta: 0.5 };
        assert_abs_diff_eq!(cmd_fidelity(&a, &b).unwrap().fidelity, 0.732051, epsilon = 1e-6);
    }

    #[test]
    fn kind_mismatch_is_usage_error() {
        let (code, _, err) = run_args(&[
            "fidelity",
            "--state-a",
            r#"{"kind":"pure","a":1}"#,
            "--state-b",
            r#"{"kind":"mixed","a":1,"zeta":0.1}"#,
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("same kind"));
    }

    #[test]
    fn bound_examples() {
        let (code, out, _) = run_args(&["bound", "--family", "pure", "--fidelity", "0.9"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_abs_diff_eq!(v["y_max"].as_f64().unwrap(), 0.968644, epsilon = 1e-6);
        assert_abs_diff_eq!(v["ratio_max"].as_f64().unwrap(), 2.545, epsilon = 1e-3);

        let (code, out, _) = run_args(&["bound", "--family", "supermixed", "--y", "0.707107"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_abs_diff_eq!(v["f_max"].as_f64().unwrap(), 0.888889, epsilon = 1e-6);

        let (code, _, err) = run_args(&["bound", "--family", "pure", "--fidelity", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("fidelity must lie in (0,1)"), "{err}");

        let (code, _, err) = run_args(&["bound", "--family", "mixed", "--fidelity", "0.9"]);
        assert_eq!(code, 2);
        assert!(err.contains("--zeta"));
    }

    #[test]
    fn sweep_two_steps() {
        let (code, out, _) = run_args(&["sweep", "--families", "pure", "--f-min", "0.5", "--f-max", "0.9", "--steps", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "f,y_pure,ratio");
        let row: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_abs_diff_eq!(row[1], 12f64.sqrt(), epsilon = 1e-12);
        let row: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row[0], 0.9);
        assert_abs_diff_eq!(row[1], 0.968644, epsilon = 1e-6);
    }

    #[test]
    fn sweep_default_header() {
        let (code, out, _) = run_args(&["sweep", "--steps", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("f,y_coh,y_delta,y_pure,ratio\n"));
    }

    #[test]
    fn chain_check_flags_equal_columns() {
        let (code, _, _) = run_args(&["sweep", "--families", "pure,mixed", "--zeta", "0", "--assert-chain"]);
        assert_eq!(code, 1);
        let (code, _, _) = run_args(&["sweep", "--families", "coh,delta,smix,mixed,pure", "--zeta", "0.3", "--assert-chain"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn verify_rejects_zero_samples() {
        let (code, _, _) = run_args(&["verify", "--samples", "0"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn table_ids() {
        let (code, out, _) = run_args(&["table", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("2.55"));
        let (code, _, _) = run_args(&["table", "3"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn oracle_check_small_dimension_truncates() {
        let args = OracleArgs {
            samples: 2,
            dim: 4,
            seed: 1,
            tail_tol: 1e-5,
            identical: false,
        };
        let r = cmd_oracle_check(&args).unwrap();
        assert!(!r.pass);
        assert!(r.truncation.is_some());
    }

    #[test]
    fn oracle_check_identical_pair() {
        let args = OracleArgs {
            samples: 1,
            dim: 40,
            seed: 3,
            tail_tol: 1e-5,
            identical: true,
        };
        let r = cmd_oracle_check(&args).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_fidelity_pure <= 1e-10 && r.max_fidelity_mixed <= 1e-10 && r.max_overlap <= 1e-10, "{r:?}");
    }
}
