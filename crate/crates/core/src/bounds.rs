//! Closed-form upper bounds relating fidelity `F` and the symmetric relative
//! energy difference `Y` for several families of Gaussian state pairs.
//!
//! For each family, [`y_max`] gives the largest `Y` reachable at fidelity `F`
//! and [`f_max`] the largest fidelity reachable at a given `Y`. The families:
//!
//! | family | `Y_m(F)` | `F_max(Y)` |
//! |---|---|---|
//! | coherent | `√(2 ln 1/F)` | `exp(-Y²/2)` |
//! | displaced, equal shape | `2√(ln 1/F)` | `exp(-Y²/4)` |
//! | displaced, fixed shape `(a, c)` | `√(2κ ln 1/F)` | `exp(-Y²/2κ)` |
//! | pure, general | `2√(1-F²)/F` | `1/√(1+Y²/4)` |
//! | mixed, equal purity `ζ` | `(2/F)√((1-F)(1+F-ζ(1-F))/(1+ζ))` | bisection |
//! | supermixed (`ζ → 1`) | `2√((1-F)/F)` | `1/(1+Y²/4)` |
//! | pure vs mixed `ζ` | see [`y_max_pure_vs_mixed`] | not provided |
//!
//! with `κ = 1 + √(1-ξ)`, `ξ = 4a²/(a²(1+c²)+1)²`. `1 - F²` is always formed
//! as `(1-F)(1+F)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::fidelity::y_to_max_ratio;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("fidelity must lie in (0,1), got {0}")]
    Fidelity(f64),
    #[error("y must be positive, got {0}")]
    Y(f64),
    #[error("invalid family parameter `{name}` = {value}: {domain}")]
    Parameter {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("zeta = {zeta} exceeds the largest mixing {limit} compatible with fidelity {fidelity}")]
    ZetaTooLarge { zeta: f64, fidelity: f64, limit: f64 },
    #[error("{0} has no inverse bound")]
    NoInverse(BoundFamily),
}

/// State-pair family a bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BoundFamily {
    Coherent,
    DisplacedEqualShape,
    FixedShape { a: f64, c: f64 },
    PureGeneral,
    MixedEqualPurity { zeta: f64 },
    Supermixed,
    PureVsMixed { zeta: f64 },
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Coherent => write!(f, "coherent"),
            Self::DisplacedEqualShape => write!(f, "displaced_equal_shape"),
            Self::FixedShape { a, c } => write!(f, "fixed_shape(a={a}, c={c})"),
            Self::PureGeneral => write!(f, "pure_general"),
            Self::MixedEqualPurity { zeta } => write!(f, "mixed_equal_purity(zeta={zeta})"),
            Self::Supermixed => write!(f, "supermixed"),
            Self::PureVsMixed { zeta } => write!(f, "pure_vs_mixed(zeta={zeta})"),
        }
    }
}

impl BoundFamily {
    pub fn validate(&self) -> Result<(), BoundError> {
        match *self {
            Self::FixedShape { a, c } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(BoundError::Parameter { name: "a", value: a, domain: "a > 0" });
                }
                if !c.is_finite() {
                    return Err(BoundError::Parameter { name: "c", value: c, domain: "finite" });
                }
            }
            Self::MixedEqualPurity { zeta } | Self::PureVsMixed { zeta } => {
                if !(0.0..1.0).contains(&zeta) {
                    return Err(BoundError::Parameter {
                        name: "zeta",
                        value: zeta,
                        domain: "[0, 1)",
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Result of a bound query: either direction, plus the admissible range of
/// the relative energy change `E2/E1 - 1` where the family has one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub family: BoundFamily,
    pub fidelity: f64,
    pub y_max: f64,
    /// Largest `E2/E1` compatible with `y_max`.
    pub ratio_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<EnergyInterval>,
}

/// Bounds `calE_min < E2/E1 - 1 < calE_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyInterval {
    pub cal_e_min: f64,
    pub cal_e_max: f64,
}

fn check_fidelity(f: f64) -> Result<(), BoundError> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(BoundError::Fidelity(f))
    }
}

/// `1 - F²` without cancellation near `F = 1`.
fn one_minus_sq(f: f64) -> f64 {
    (1.0 - f) * (1.0 + f)
}

/// `κ = 1 + √(1-ξ)` for the fixed-shape family, in `[1, 2]`.
pub fn kappa(a: f64, c: f64) -> f64 {
    let t = a * a * (1.0 + c * c) + 1.0;
    let xi = 4.0 * a * a / (t * t);
    1.0 + (1.0 - xi).max(0.0).sqrt()
}

fn ln_inv(f: f64) -> f64 {
    -f.ln()
}

/// Largest symmetric relative energy difference at fidelity `f`.
pub fn y_max(family: &BoundFamily, f: f64) -> Result<f64, BoundError> {
    family.validate()?;
    check_fidelity(f)?;
    Ok(match *family {
        BoundFamily::Coherent => (2.0 * ln_inv(f)).sqrt(),
        BoundFamily::DisplacedEqualShape => 2.0 * ln_inv(f).sqrt(),
        BoundFamily::FixedShape { a, c } => (2.0 * ln_inv(f) * kappa(a, c)).sqrt(),
        BoundFamily::PureGeneral => 2.0 * one_minus_sq(f).sqrt() / f,
        BoundFamily::MixedEqualPurity { zeta } => y_max_equal_purity(f, zeta),
        BoundFamily::Supermixed => 2.0 * ((1.0 - f) / f).sqrt(),
        BoundFamily::PureVsMixed { zeta } => return y_max_pure_vs_mixed(f, zeta),
    })
}

fn y_max_equal_purity(f: f64, zeta: f64) -> f64 {
    let e = 1.0 - f;
    2.0 / f * (e / (1.0 + zeta) * (1.0 + f - zeta * e)).sqrt()
}

/// Bound for a pure state against a mixed one with parameter `ζ`:
///
/// ```text
/// Y_m = [√(2(1-ζ)(1+ζ̃) - F²(1+ζ̃)²) + √(2(1-ζ)(1-ζ̃) - F²(1-ζ̃)²)] / (F ζ̃),  ζ̃ = √(1-ζ²)
/// ```
///
/// Defined while the first radicand is nonnegative, i.e. for
/// `ζ ≤` [`zeta_limit`]`(F)`; beyond that no such pair has fidelity `F`.
pub fn y_max_pure_vs_mixed(f: f64, zeta: f64) -> Result<f64, BoundError> {
    BoundFamily::PureVsMixed { zeta }.validate()?;
    check_fidelity(f)?;
    let zt = ((1.0 - zeta) * (1.0 + zeta)).sqrt();
    let f2 = f * f;
    let outer = 2.0 * (1.0 - zeta) * (1.0 + zt) - f2 * (1.0 + zt) * (1.0 + zt);
    let inner = 2.0 * (1.0 - zeta) * (1.0 - zt) - f2 * (1.0 - zt) * (1.0 - zt);
    // rounding slack at the edge of the domain
    if outer < -1e-14 {
        return Err(BoundError::ZetaTooLarge {
            zeta,
            fidelity: f,
            limit: zeta_limit(f)?,
        });
    }
    Ok((outer.max(0.0).sqrt() + inner.max(0.0).sqrt()) / (f * zt))
}

/// Largest fidelity compatible with symmetric difference `y`.
pub fn f_max(family: &BoundFamily, y: f64) -> Result<f64, BoundError> {
    family.validate()?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(BoundError::Y(y));
    }
    let y2 = y * y;
    Ok(match *family {
        BoundFamily::Coherent => (-y2 / 2.0).exp(),
        BoundFamily::DisplacedEqualShape => (-y2 / 4.0).exp(),
        BoundFamily::FixedShape { a, c } => (-y2 / (2.0 * kappa(a, c))).exp(),
        BoundFamily::PureGeneral => 1.0 / (1.0 + y2 / 4.0).sqrt(),
        BoundFamily::Supermixed => 1.0 / (1.0 + y2 / 4.0),
        BoundFamily::MixedEqualPurity { zeta } => invert_decreasing(|f| y_max_equal_purity(f, zeta), y),
        BoundFamily::PureVsMixed { .. } => return Err(BoundError::NoInverse(*family)),
    })
}

// Solve g(F) = y for F in (0, 1) where g decreases strictly from +∞ to 0.
fn invert_decreasing(g: impl Fn(f64) -> f64, y: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Full bound record for a fidelity query.
pub fn bound_at_fidelity(family: &BoundFamily, f: f64) -> Result<BoundResult, BoundError> {
    let y = y_max(family, f)?;
    let interval = match *family {
        BoundFamily::PureGeneral => Some(energy_interval_pure(f)?),
        BoundFamily::FixedShape { a, c } => Some(energy_interval_fixed_shape(f, a, c)?),
        BoundFamily::Coherent => Some(energy_interval_fixed_shape(f, 1.0, 0.0)?),
        BoundFamily::DisplacedEqualShape => Some(interval_from_product(2.0 * ln_inv(f))),
        _ => Some(interval_from_y(y)),
    };
    Ok(BoundResult {
        family: *family,
        fidelity: f,
        y_max: y,
        ratio_max: y_to_max_ratio(y),
        interval,
    })
}

/// Full bound record for a `Y` query.
pub fn bound_at_y(family: &BoundFamily, y: f64) -> Result<BoundResult, BoundError> {
    let f = f_max(family, y)?;
    Ok(BoundResult {
        family: *family,
        fidelity: f,
        y_max: y,
        ratio_max: y_to_max_ratio(y),
        interval: Some(interval_from_y(y)),
    })
}

// Both roots of |E|/√(1+E) = y.
fn interval_from_y(y: f64) -> EnergyInterval {
    let r = y_to_max_ratio(y);
    EnergyInterval {
        cal_e_min: 1.0 / r - 1.0,
        cal_e_max: r - 1.0,
    }
}

fn interval_from_product(fk: f64) -> EnergyInterval {
    let s = fk.sqrt();
    let t = (fk + 2.0).sqrt();
    EnergyInterval {
        cal_e_min: -2.0 * s / (t + s),
        cal_e_max: 2.0 * s / (t - s),
    }
}

/// Range of `E2/E1 - 1` over all pure Gaussian pairs with fidelity `f`:
/// `-2s/(s+1) < calE < 2s/(1-s)`, `s = √(1-F²)`.
pub fn energy_interval_pure(f: f64) -> Result<EnergyInterval, BoundError> {
    check_fidelity(f)?;
    let s = one_minus_sq(f).sqrt();
    Ok(EnergyInterval {
        cal_e_min: -2.0 * s / (s + 1.0),
        cal_e_max: 2.0 * s / (1.0 - s),
    })
}

/// Range of `E2/E1 - 1` for displaced states sharing the shape `(a, c)`.
pub fn energy_interval_fixed_shape(f: f64, a: f64, c: f64) -> Result<EnergyInterval, BoundError> {
    BoundFamily::FixedShape { a, c }.validate()?;
    check_fidelity(f)?;
    Ok(interval_from_product(ln_inv(f) * kappa(a, c)))
}

/// Largest `ζ` reachable by an equal-width undisplaced pure/mixed pair at
/// fidelity `f`: `2(1 - √(1 - F²(1-F²)))/F²`.
pub fn zeta_max(f: f64) -> Result<f64, BoundError> {
    check_fidelity(f)?;
    let f2 = f * f;
    let q = f2 * one_minus_sq(f);
    // 1 - √(1-q) = q/(1 + √(1-q))
    Ok(2.0 * q / (1.0 + (1.0 - q).sqrt()) / f2)
}

/// Supremum of `ζ` over all pure/mixed pairs with fidelity `f`, where the
/// widths may differ. Solves `F²(1+ζ̃) = 2(1-ζ)`; slightly above [`zeta_max`].
pub fn zeta_limit(f: f64) -> Result<f64, BoundError> {
    check_fidelity(f)?;
    let f2 = f * f;
    // v = 1 + ζ̃ is the larger root of (4+F⁴)v² - (8+4F²)v + 4 = 0
    let v = 2.0 * (2.0 + 2.0 * f + f2) / (4.0 + f2 * f2);
    let zt = v - 1.0;
    Ok(((1.0 - zt) * (1.0 + zt)).max(0.0).sqrt())
}

/// Leading-order form of [`y_max`] for `1 - F ≪ 1`.
///
/// For `PureVsMixed` this is the small-`ζ` expansion
/// `(2√(1 - F² - ζ + ζ²(2F²-1)/4) + ζ)/F`, which is exact at `ζ = 0`.
pub fn y_max_small_eps(family: &BoundFamily, f: f64) -> Result<f64, BoundError> {
    family.validate()?;
    check_fidelity(f)?;
    let e = 1.0 - f;
    Ok(match *family {
        BoundFamily::Coherent => (2.0 * e).sqrt(),
        BoundFamily::DisplacedEqualShape => 2.0 * e.sqrt(),
        BoundFamily::FixedShape { a, c } => (2.0 * kappa(a, c) * e).sqrt(),
        BoundFamily::PureGeneral => (8.0 * e).sqrt(),
        BoundFamily::MixedEqualPurity { zeta } => 2.0 * (2.0 * e / (1.0 + zeta)).sqrt(),
        BoundFamily::Supermixed => 2.0 * e.sqrt(),
        BoundFamily::PureVsMixed { zeta } => {
            let r = one_minus_sq(f) - zeta + zeta * zeta / 4.0 * (2.0 * f * f - 1.0);
            (2.0 * r.max(0.0).sqrt() + zeta) / f
        }
    })
}

/// Smallest Bures distance between Gaussian states with symmetric energy
/// difference `y`: `√2·[1 - (1 + y²/4)^{-1/4}]^{1/2}`.
pub fn bures_min(y: f64) -> Result<f64, BoundError> {
    if !(y >= 0.0 && y.is_finite()) {
        return Err(BoundError::Y(y));
    }
    Ok(std::f64::consts::SQRT_2 * (1.0 - (1.0 + y * y / 4.0).powf(-0.25)).sqrt())
}
