//! Randomized and structured search over Gaussian state pairs.
//!
//! [`verify_conjecture`] samples pairs and checks them against a closed-form
//! bound; the witness constructors build pairs that attain (or approach) a
//! bound at a prescribed fidelity; [`local_maximize_y`] pushes a pure pair
//! uphill in `Y` while holding its fidelity fixed.
//!
//! Pairs are parameterized relative to the first state:
//! `a2 = a1(1+α)`, `b2 = b1 + a1 β`, `(x2, p2) = (x1 + δx, p1 + δp)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::bounds::{self, BoundError, BoundFamily};
use crate::fidelity::{fidelity_mixed, fidelity_pure, FidelityError};
use crate::states::{
    MixedGaussianState, PureGaussianState, StateError, A_MAX, A_MIN, B_MAX, DISPLACEMENT_MAX, ZETA_MAX,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplorerError {
    #[error("invalid range for `{name}`: [{lo}, {hi}] ({reason})")]
    Range {
        name: &'static str,
        lo: f64,
        hi: f64,
        reason: &'static str,
    },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("schedule is empty")]
    EmptySchedule,
    #[error("target fidelity must lie in (0,1), got {0}")]
    Fidelity(f64),
    #[error("no witness construction for {0}")]
    Unsupported(BoundFamily),
    #[error("could not bring the pair to fidelity {target}: {reason}")]
    Projection { target: f64, reason: &'static str },
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Closed(#[from] FidelityError),
}

/// Which kind of pair to draw and which bound it is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFamily {
    /// Two displaced squeezed pure states, against `pure_general`.
    PureGeneral,
    /// Two undisplaced mixed states sharing `ζ`, against `mixed_equal_purity`.
    MixedEqual,
    /// Pure (undisplaced) against mixed `ζ`, against `pure_vs_mixed`.
    PureVsMixed,
    /// Mixed states with independent `ζ1, ζ2`, against `pure_general`.
    MixedGeneral,
}

impl PairFamily {
    /// Label of the bound the family is checked against.
    pub fn bound_name(self) -> &'static str {
        match self {
            Self::PureGeneral | Self::MixedGeneral => "pure_general",
            Self::MixedEqual => "mixed_equal_purity",
            Self::PureVsMixed => "pure_vs_mixed",
        }
    }

    /// True where no closed-form result covers the family and the check is
    /// purely empirical.
    pub fn conjecture_level(self) -> bool {
        matches!(self, Self::MixedGeneral)
    }
}

/// Closed interval `[lo, hi]`; `lo == hi` pins the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }

    // Both ends positive, or the degenerate [0, 0].
    fn log_uniform(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo.ln()..=self.hi.ln()).exp()
        }
    }

    fn abs_max(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn check(&self, name: &'static str) -> Result<(), ExplorerError> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(self.err(name, "need finite lo <= hi"));
        }
        Ok(())
    }

    fn check_log(&self, name: &'static str) -> Result<(), ExplorerError> {
        self.check(name)?;
        if !(self.lo > 0.0 || (self.lo == 0.0 && self.hi == 0.0)) {
            return Err(self.err(name, "log-uniform range needs lo > 0 (or [0, 0])"));
        }
        Ok(())
    }

    fn err(&self, name: &'static str, reason: &'static str) -> ExplorerError {
        ExplorerError::Range {
            name,
            lo: self.lo,
            hi: self.hi,
            reason,
        }
    }
}

/// Sampling ranges for [`verify_conjecture`].
///
/// `a` and the two displacement magnitudes are log-uniform, everything else
/// uniform; displacement directions are uniform on the circle. Fields that do
/// not apply to the family (displacements for mixed pairs, `ζ` for pure ones)
/// are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSampleConfig {
    pub family: PairFamily,
    pub samples: usize,
    pub seed: u64,
    /// `a1`
    pub a: Range,
    /// `c1 = b1/a1`
    pub c: Range,
    /// `ln(1+α) = ln(a2/a1)`
    pub log_alpha: Range,
    /// `β = (b2 - b1)/a1`
    pub beta: Range,
    /// `|(x1, p1)|`
    pub displacement: Range,
    /// `|(δx, δp)|`
    pub delta: Range,
    pub zeta: Range,
}

impl PairSampleConfig {
    /// Default ranges for a family, wide enough to reach the extreme
    /// squeezing corners where the bounds are approached.
    pub fn new(family: PairFamily, samples: usize, seed: u64) -> Self {
        Self {
            family,
            samples,
            seed,
            a: Range::new(1e-2, 1e2),
            c: Range::new(-5.0, 5.0),
            log_alpha: Range::new(-3.0, 3.0),
            beta: Range::new(-5.0, 5.0),
            displacement: Range::new(1e-3, 10.0),
            delta: Range::new(1e-3, 10.0),
            zeta: Range::new(0.0, 0.99),
        }
    }

    /// Every pair identical to the vacuum.
    pub fn identical(family: PairFamily, samples: usize, seed: u64) -> Self {
        Self {
            a: Range::point(1.0),
            c: Range::point(0.0),
            log_alpha: Range::point(0.0),
            beta: Range::point(0.0),
            displacement: Range::point(0.0),
            delta: Range::point(0.0),
            zeta: Range::point(0.0),
            ..Self::new(family, samples, seed)
        }
    }

    /// Checks the ranges and that every reachable state lies in the
    /// validity box.
    pub fn validate(&self) -> Result<(), ExplorerError> {
        if self.samples == 0 {
            return Err(ExplorerError::NoSamples);
        }
        self.a.check_log("a")?;
        self.c.check("c")?;
        self.log_alpha.check("log_alpha")?;
        self.beta.check("beta")?;
        self.displacement.check_log("displacement")?;
        self.delta.check_log("delta")?;
        self.zeta.check("zeta")?;
        let a_lo = self.a.lo * self.log_alpha.lo.exp();
        let a_hi = self.a.hi * self.log_alpha.hi.exp();
        if self.a.lo < A_MIN || a_lo < A_MIN || self.a.hi > A_MAX || a_hi > A_MAX {
            return Err(self.a.err("a", "a1 or a2 = a1(1+alpha) leaves [1e-4, 1e4]"));
        }
        let b_hi = self.a.hi * (self.c.abs_max() + self.beta.abs_max());
        if b_hi > B_MAX {
            return Err(self.c.err("c", "b1 or b2 may exceed 1e4 in magnitude"));
        }
        if self.displacement.hi + self.delta.hi > DISPLACEMENT_MAX {
            return Err(self.delta.err("delta", "displacements may exceed 1e4"));
        }
        if self.zeta.lo < 0.0 || self.zeta.hi > ZETA_MAX {
            return Err(self.zeta.err("zeta", "need 0 <= zeta < 1"));
        }
        Ok(())
    }
}

/// Plain parameters of one sampled state; `zeta = 0` and zero displacement
/// where they do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub p0: f64,
    pub zeta: f64,
}

impl From<&PureGaussianState> for StateParams {
    fn from(s: &PureGaussianState) -> Self {
        Self {
            a: s.a(),
            b: s.b(),
            x0: s.x0(),
            p0: s.p0(),
            zeta: 0.0,
        }
    }
}

impl From<&MixedGaussianState> for StateParams {
    fn from(s: &MixedGaussianState) -> Self {
        Self {
            a: s.a(),
            b: s.b(),
            x0: 0.0,
            p0: 0.0,
            zeta: s.zeta(),
        }
    }
}

/// One evaluated pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub state_1: StateParams,
    pub state_2: StateParams,
    pub fidelity: f64,
    pub e1: f64,
    pub e2: f64,
    pub y: f64,
    pub y_bound: f64,
    /// `y / y_bound - 1`
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: PairFamily,
    pub bound: String,
    pub conjecture_level: bool,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: u64,
    /// Samples with `margin > tolerance`, plus those outside the bound's domain.
    pub violations: u64,
    /// Pure-vs-mixed pairs whose `ζ` exceeds the largest value the bound
    /// admits at their fidelity. Counted in `violations` too.
    pub out_of_domain: u64,
    /// Pairs whose fidelity rounds to 1 while `Y > 0`; no bound to compare.
    pub skipped: u64,
    /// Largest margin seen; `-1` when every pair has `Y = 0`.
    pub worst_margin: f64,
    pub argmax: Option<SampleRecord>,
}

#[derive(Debug, Clone, Copy)]
enum Pair {
    Pure(PureGaussianState, PureGaussianState),
    Mixed(MixedGaussianState, MixedGaussianState),
}

impl Pair {
    fn params(&self) -> (StateParams, StateParams) {
        match self {
            Pair::Pure(s, t) => (s.into(), t.into()),
            Pair::Mixed(s, t) => (s.into(), t.into()),
        }
    }

    fn energies(&self) -> (f64, f64) {
        match self {
            Pair::Pure(s, t) => (s.energy(), t.energy()),
            Pair::Mixed(s, t) => (s.energy(), t.energy()),
        }
    }

    fn fidelity(&self) -> Result<f64, FidelityError> {
        Ok(match self {
            Pair::Pure(s, t) => fidelity_pure(s, t)?.get(),
            Pair::Mixed(s, t) => fidelity_mixed(s, t)?.get(),
        })
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn polar(r: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let phi = rng.gen_range(0.0..2.0 * PI);
    (r * phi.cos(), r * phi.sin())
}

fn draw_pair(cfg: &PairSampleConfig, index: u64) -> Result<Pair, StateError> {
    let mut rng = sample_rng(cfg.seed, index);
    let a1 = cfg.a.log_uniform(&mut rng);
    let b1 = a1 * cfg.c.uniform(&mut rng);
    let a2 = a1 * cfg.log_alpha.uniform(&mut rng).exp();
    let b2 = b1 + a1 * cfg.beta.uniform(&mut rng);
    Ok(match cfg.family {
        PairFamily::PureGeneral => {
            let r = cfg.displacement.log_uniform(&mut rng);
            let (x1, p1) = polar(r, &mut rng);
            let d = cfg.delta.log_uniform(&mut rng);
            let (dx, dp) = polar(d, &mut rng);
            Pair::Pure(
                PureGaussianState::new(a1, b1, x1, p1)?,
                PureGaussianState::new(a2, b2, x1 + dx, p1 + dp)?,
            )
        }
        PairFamily::MixedEqual => {
            let z = cfg.zeta.uniform(&mut rng);
            Pair::Mixed(MixedGaussianState::new(a1, b1, z)?, MixedGaussianState::new(a2, b2, z)?)
        }
        PairFamily::PureVsMixed => {
            let z = cfg.zeta.uniform(&mut rng);
            Pair::Mixed(MixedGaussianState::new(a1, b1, 0.0)?, MixedGaussianState::new(a2, b2, z)?)
        }
        PairFamily::MixedGeneral => {
            let z1 = cfg.zeta.uniform(&mut rng);
            let z2 = cfg.zeta.uniform(&mut rng);
            Pair::Mixed(MixedGaussianState::new(a1, b1, z1)?, MixedGaussianState::new(a2, b2, z2)?)
        }
    })
}

enum Outcome {
    Checked(SampleRecord),
    OutOfDomain,
    Skipped,
}

fn evaluate(cfg: &PairSampleConfig, index: u64) -> Outcome {
    // configs are validated up front, so states and fidelities exist
    let pair = draw_pair(cfg, index).expect("validated config yields valid states");
    let f = pair.fidelity().expect("closed-form fidelity of valid states");
    let (e1, e2) = pair.energies();
    let y = (e2 - e1).abs() / (e1 * e2).sqrt();
    let (state_1, state_2) = pair.params();
    let record = |y_bound: f64, margin: f64| {
        Outcome::Checked(SampleRecord {
            index,
            state_1,
            state_2,
            fidelity: f,
            e1,
            e2,
            y,
            y_bound,
            margin,
        })
    };
    if f >= 1.0 {
        return if y == 0.0 { record(0.0, -1.0) } else { Outcome::Skipped };
    }
    let bound = match cfg.family {
        PairFamily::PureGeneral | PairFamily::MixedGeneral => bounds::y_max(&BoundFamily::PureGeneral, f),
        PairFamily::MixedEqual => bounds::y_max(&BoundFamily::MixedEqualPurity { zeta: state_2.zeta }, f),
        PairFamily::PureVsMixed => bounds::y_max_pure_vs_mixed(f, state_2.zeta),
    };
    match bound {
        Ok(yb) => record(yb, y / yb - 1.0),
        Err(BoundError::ZetaTooLarge { .. }) => Outcome::OutOfDomain,
        Err(e) => panic!("bound evaluation failed for a valid sample: {e}"),
    }
}

#[derive(Clone, Copy)]
struct Tally {
    samples: u64,
    violations: u64,
    out_of_domain: u64,
    skipped: u64,
    best: Option<SampleRecord>,
}

impl Tally {
    const EMPTY: Tally = Tally {
        samples: 0,
        violations: 0,
        out_of_domain: 0,
        skipped: 0,
        best: None,
    };

    fn merge(self, other: Tally) -> Tally {
        // larger margin wins; ties go to the lower index so the result does
        // not depend on how samples were split across threads
        let best = match (self.best, other.best) {
            (Some(x), Some(y)) => {
                if y.margin > x.margin || (y.margin == x.margin && y.index < x.index) {
                    Some(y)
                } else {
                    Some(x)
                }
            }
            (x, None) => x,
            (None, y) => y,
        };
        Tally {
            samples: self.samples + other.samples,
            violations: self.violations + other.violations,
            out_of_domain: self.out_of_domain + other.out_of_domain,
            skipped: self.skipped + other.skipped,
            best,
        }
    }
}

fn tally(outcome: Outcome, tol: f64) -> Tally {
    let mut t = Tally { samples: 1, ..Tally::EMPTY };
    match outcome {
        Outcome::Checked(r) => {
            if r.margin > tol {
                t.violations = 1;
            }
            t.best = Some(r);
        }
        Outcome::OutOfDomain => {
            t.violations = 1;
            t.out_of_domain = 1;
        }
        Outcome::Skipped => t.skipped = 1,
    }
    t
}

/// Samples `cfg.samples` pairs and checks `Y ≤ Y_m(F)(1 + tol)` for the
/// family's bound, on the global rayon pool.
pub fn verify_conjecture(cfg: &PairSampleConfig, tol: f64) -> Result<VerificationReport, ExplorerError> {
    cfg.validate()?;
    let t = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| tally(evaluate(cfg, i), tol))
        .reduce(|| Tally::EMPTY, Tally::merge);
    Ok(VerificationReport {
        family: cfg.family,
        bound: cfg.family.bound_name().to_string(),
        conjecture_level: cfg.family.conjecture_level(),
        seed: cfg.seed,
        tolerance: tol,
        samples: t.samples,
        violations: t.violations,
        out_of_domain: t.out_of_domain,
        skipped: t.skipped,
        worst_margin: t.best.map_or(-1.0, |r| r.margin),
        argmax: t.best,
    })
}

/// [`verify_conjecture`] on a dedicated pool of `workers` threads
/// (`0` = rayon's default). The report does not depend on `workers`.
pub fn verify_conjecture_with_workers(
    cfg: &PairSampleConfig,
    tol: f64,
    workers: usize,
) -> Result<VerificationReport, ExplorerError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExplorerError::Pool(e.to_string()))?;
    pool.install(|| verify_conjecture(cfg, tol))
}

fn check_target(f: f64) -> Result<(), ExplorerError> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(ExplorerError::Fidelity(f))
    }
}

/// Which of the two extremal roots to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Undisplaced squeezed pair `(a, 0)`, `(a(1+α±), 0)` with fidelity `f`,
/// `α± = 2D ± 2√(D(1+D))`, `D = (1-F²)/F²`. `Y` tends to the pure-state
/// bound as `a → 0` (minus) or `a → ∞` (plus).
pub fn extremal_pure_pair(
    f: f64,
    a: f64,
    sign: Sign,
) -> Result<(PureGaussianState, PureGaussianState), ExplorerError> {
    check_target(f)?;
    let d = (1.0 - f) * (1.0 + f) / (f * f);
    let alpha = 2.0 * d + sign.value() * 2.0 * (d * (1.0 + d)).sqrt();
    Ok((PureGaussianState::squeezed(a, 0.0)?, PureGaussianState::squeezed(a * (1.0 + alpha), 0.0)?))
}

/// Pair of equal-purity mixed states `(a, 0, ζ)`, `(a(1+α±), 0, ζ)` with
/// fidelity `f`, where
/// `α± = [2D ± 2√(D² + D(1-ζ²))]/(1-ζ²)` and
/// `D = (1-F)(1-ζ)(1-ζ+F(1+ζ))/F²`.
pub fn extremal_mixed_pair(
    f: f64,
    a: f64,
    zeta: f64,
    sign: Sign,
) -> Result<(MixedGaussianState, MixedGaussianState), ExplorerError> {
    check_target(f)?;
    let s1 = MixedGaussianState::new(a, 0.0, zeta)?;
    let q = (1.0 - zeta) * (1.0 + zeta);
    let d = (1.0 - f) * (1.0 - zeta) * (1.0 - zeta + f * (1.0 + zeta)) / (f * f);
    let alpha = (2.0 * d + sign.value() * 2.0 * (d * d + d * q).sqrt()) / q;
    Ok((s1, MixedGaussianState::new(a * (1.0 + alpha), 0.0, zeta)?))
}

/// Pair of equally shaped pure states `(a, ac)` with fidelity `f`, displaced
/// along the direction in which fidelity decays slowest. The first state sits
/// at `s·R*` along that direction, the second a further `δ` beyond it;
/// `s = 1` is the energy-maximizing offset and attains the fixed-shape bound.
pub fn fixed_shape_witness(
    f: f64,
    a: f64,
    c: f64,
    s: f64,
) -> Result<(PureGaussianState, PureGaussianState), ExplorerError> {
    check_target(f)?;
    let b = a * c;
    // -ln F = qᵀNq for displacement q, N = [[a²+b², b], [b, 1]]/(2a), det N = 1/4
    let (nxx, nxp, npp) = ((a * a + b * b) / (2.0 * a), b / (2.0 * a), 1.0 / (2.0 * a));
    let tr = nxx + npp;
    let lam = 0.25 / (0.5 * (tr + ((tr - 1.0) * (tr + 1.0)).max(0.0).sqrt()));
    let (ux, up) = {
        let v1 = (nxp, lam - nxx);
        let v2 = (lam - npp, nxp);
        let v = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
        let n = v.0.hypot(v.1);
        if n == 0.0 {
            (1.0, 0.0)
        } else {
            (v.0 / n, v.1 / n)
        }
    };
    let delta = (-f.ln() / lam).sqrt();
    let shape = (1.0 + a * a + b * b) / (4.0 * a);
    let r_star = 0.5 * (-delta + (delta * delta + 8.0 * shape).sqrt());
    let r = s * r_star;
    Ok((
        PureGaussianState::new(a, b, r * ux, r * up)?,
        PureGaussianState::new(a, b, (r + delta) * ux, (r + delta) * up)?,
    ))
}

/// One point on a witness schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPoint {
    pub param: f64,
    pub fidelity: f64,
    pub y: f64,
    /// `y / Y_m(F)`
    pub y_ratio: f64,
}

fn y_of(e1: f64, e2: f64) -> f64 {
    (e2 - e1).abs() / (e1 * e2).sqrt()
}

fn pure_point(param: f64, pair: (PureGaussianState, PureGaussianState), ym: f64) -> Result<WitnessPoint, ExplorerError> {
    let y = y_of(pair.0.energy(), pair.1.energy());
    Ok(WitnessPoint {
        param,
        fidelity: fidelity_pure(&pair.0, &pair.1)?.get(),
        y,
        y_ratio: y / ym,
    })
}

fn mixed_point(param: f64, pair: (MixedGaussianState, MixedGaussianState), ym: f64) -> Result<WitnessPoint, ExplorerError> {
    let y = y_of(pair.0.energy(), pair.1.energy());
    Ok(WitnessPoint {
        param,
        fidelity: fidelity_mixed(&pair.0, &pair.1)?.get(),
        y,
        y_ratio: y / ym,
    })
}

fn better(p: WitnessPoint, q: WitnessPoint) -> WitnessPoint {
    if q.y > p.y {
        q
    } else {
        p
    }
}

/// Evaluates the family's witness along `schedule`.
///
/// The schedule parameter is the squeezing `a` for `pure_general`,
/// `mixed_equal_purity` and `displaced_equal_shape` (best of both roots where
/// there are two), and the offset fraction `s` of [`fixed_shape_witness`]
/// for `coherent` and `fixed_shape`.
pub fn approach_bound(family: &BoundFamily, f: f64, schedule: &[f64]) -> Result<Vec<WitnessPoint>, ExplorerError> {
    if schedule.is_empty() {
        return Err(ExplorerError::EmptySchedule);
    }
    check_target(f)?;
    let ym = bounds::y_max(family, f)?;
    schedule
        .iter()
        .map(|&t| match *family {
            BoundFamily::PureGeneral => Ok(better(
                pure_point(t, extremal_pure_pair(f, t, Sign::Plus)?, ym)?,
                pure_point(t, extremal_pure_pair(f, t, Sign::Minus)?, ym)?,
            )),
            BoundFamily::MixedEqualPurity { zeta } => Ok(better(
                mixed_point(t, extremal_mixed_pair(f, t, zeta, Sign::Plus)?, ym)?,
                mixed_point(t, extremal_mixed_pair(f, t, zeta, Sign::Minus)?, ym)?,
            )),
            BoundFamily::DisplacedEqualShape => pure_point(t, fixed_shape_witness(f, t, 0.0, 1.0)?, ym),
            BoundFamily::Coherent => pure_point(t, fixed_shape_witness(f, 1.0, 0.0, t)?, ym),
            BoundFamily::FixedShape { a, c } => pure_point(t, fixed_shape_witness(f, a, c, t)?, ym),
            BoundFamily::Supermixed | BoundFamily::PureVsMixed { .. } => Err(ExplorerError::Unsupported(*family)),
        })
        .collect()
}

/// Why [`local_maximize_y`] stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// All step sizes fell below the resolution.
    Converged,
    /// Evaluation budget exhausted.
    Budget,
    /// Target fidelity 1: the only feasible pair is two identical states.
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMaximum {
    pub pair: (PureGaussianState, PureGaussianState),
    pub fidelity: f64,
    pub y: f64,
    pub evaluations: usize,
    /// Trial moves rejected because no `α` restored the target fidelity.
    pub projection_failures: usize,
    pub stop: StopReason,
}

// [ln a1, c1, x1, p1, ln(1+α), β, δx, δp]
type Params = [f64; 8];
const S: usize = 4;
const MAX_EVALS: usize = 200_000;
const MIN_STEP: f64 = 1e-9;

fn params_of(s1: &PureGaussianState, s2: &PureGaussianState) -> Params {
    let a1 = s1.a();
    [
        a1.ln(),
        s1.b() / a1,
        s1.x0(),
        s1.p0(),
        (s2.a() / a1).ln(),
        (s2.b() - s1.b()) / a1,
        s2.x0() - s1.x0(),
        s2.p0() - s1.p0(),
    ]
}

fn states_of(p: &Params) -> Option<(PureGaussianState, PureGaussianState)> {
    if p.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let a1 = p[0].exp();
    let b1 = a1 * p[1];
    let s1 = PureGaussianState::new(a1, b1, p[2], p[3]).ok()?;
    let s2 = PureGaussianState::new(a1 * p[S].exp(), b1 + a1 * p[5], p[2] + p[6], p[3] + p[7]).ok()?;
    Some((s1, s2))
}

struct Objective {
    target: f64,
    ftol: f64,
    evals: usize,
}

impl Objective {
    fn fidelity(&mut self, p: &Params) -> Option<f64> {
        self.evals += 1;
        let (s1, s2) = states_of(p)?;
        fidelity_pure(&s1, &s2).ok().map(|f| f.get())
    }

    fn y(p: &Params) -> Option<f64> {
        let (s1, s2) = states_of(p)?;
        Some(y_of(s1.energy(), s2.energy()))
    }

    // Bisect g(t) = F(p with p[k] = t) - target on a bracket.
    fn bisect(&mut self, p: &mut Params, k: usize, mut lo: f64, mut hi: f64, g_lo: f64) -> Option<()> {
        let sign_lo = g_lo > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            p[k] = mid;
            let g = self.fidelity(p)? - self.target;
            if g.abs() <= self.ftol || mid == lo || mid == hi {
                return (g.abs() <= self.ftol).then_some(());
            }
            if (g > 0.0) == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        None
    }

    // Restore the target fidelity by moving ln(1+α), searching outward from
    // its current value for the nearest sign change.
    fn project(&mut self, p: &mut Params) -> Option<()> {
        let s0 = p[S];
        let g0 = self.fidelity(p)? - self.target;
        if g0.abs() <= self.ftol {
            return Some(());
        }
        let mut d = 1e-4;
        for _ in 0..40 {
            for dir in [1.0, -1.0] {
                let s = s0 + dir * d;
                p[S] = s;
                if let Some(f) = self.fidelity(p) {
                    let g = f - self.target;
                    if (g > 0.0) != (g0 > 0.0) {
                        let prev = s0 + dir * d / 2.0;
                        let (lo, g_lo) = if d > 1e-4 {
                            p[S] = prev;
                            match self.fidelity(p) {
                                Some(fp) if (fp - self.target > 0.0) == (g0 > 0.0) => (prev, fp - self.target),
                                _ => (s0, g0),
                            }
                        } else {
                            (s0, g0)
                        };
                        if self.bisect(p, S, lo, s, g_lo).is_some() {
                            return Some(());
                        }
                    }
                }
            }
            d *= 2.0;
        }
        p[S] = s0;
        None
    }

    // Bring a start pair onto the manifold by scaling its difference
    // (α, β, δ) by λ; F = 1 at λ = 0.
    fn project_start(&mut self, p: &Params) -> Option<Params> {
        let scaled = |l: f64| {
            let mut q = *p;
            for v in &mut q[S..] {
                *v *= l;
            }
            q
        };
        let mut q = *p;
        if self.project(&mut q).is_some() {
            return Some(q);
        }
        let mut hi = 1.0;
        let mut g_hi = self.fidelity(&scaled(hi))? - self.target;
        while g_hi > 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return None;
            }
            g_hi = self.fidelity(&scaled(hi))? - self.target;
        }
        let (mut lo, mut up) = (0.0, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + up);
            let q = scaled(mid);
            let g = self.fidelity(&q)? - self.target;
            if g.abs() <= self.ftol {
                return Some(q);
            }
            if mid == lo || mid == up {
                break;
            }
            if g > 0.0 {
                lo = mid;
            } else {
                up = mid;
            }
        }
        None
    }
}

/// Coordinate ascent on `Y` over pure pairs at fixed fidelity `f_target`.
///
/// Each trial move changes one of `(ln a1, c1, x1, p1, β, δx, δp)` and then
/// re-solves for `ln(1+α)` so that `|F - f_target| ≤ tol`; moves that leave
/// the validity box or cannot be re-projected are rejected. Step sizes grow
/// on success and shrink on failure.
pub fn local_maximize_y(
    start: (PureGaussianState, PureGaussianState),
    f_target: f64,
    tol: f64,
) -> Result<LocalMaximum, ExplorerError> {
    if f_target == 1.0 {
        let pair = (start.0, start.0);
        return Ok(LocalMaximum {
            pair,
            fidelity: 1.0,
            y: 0.0,
            evaluations: 0,
            projection_failures: 0,
            stop: StopReason::Stationary,
        });
    }
    check_target(f_target)?;
    let mut obj = Objective {
        target: f_target,
        ftol: tol.max(1e-15),
        evals: 0,
    };
    let mut p = obj
        .project_start(&params_of(&start.0, &start.1))
        .ok_or(ExplorerError::Projection {
            target: f_target,
            reason: "no scaling of the start pair's difference reaches it inside the validity box",
        })?;
    let mut y = Objective::y(&p).expect("projected start is valid");
    let mut steps = [0.1; 8];
    steps[S] = 0.0;
    let mut failures = 0;
    let stop = loop {
        if steps.iter().all(|&h| h < MIN_STEP) {
            break StopReason::Converged;
        }
        if obj.evals > MAX_EVALS {
            break StopReason::Budget;
        }
        for k in (0..8).filter(|&k| k != S) {
            if steps[k] < MIN_STEP {
                continue;
            }
            let mut moved = false;
            for dir in [1.0, -1.0] {
                let mut q = p;
                q[k] += dir * steps[k];
                if obj.project(&mut q).is_none() {
                    failures += 1;
                    continue;
                }
                match Objective::y(&q) {
                    Some(yq) if yq > y => {
                        p = q;
                        y = yq;
                        moved = true;
                        break;
                    }
                    _ => {}
                }
            }
            steps[k] = if moved { (steps[k] * 2.0).min(1.0) } else { steps[k] * 0.5 };
        }
    };
    let pair = states_of(&p).expect("accepted points are valid");
    Ok(LocalMaximum {
        pair,
        fidelity: fidelity_pure(&pair.0, &pair.1)?.get(),
        y,
        evaluations: obj.evals,
        projection_failures: failures,
        stop,
    })
}
