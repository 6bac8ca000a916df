//! Closed-form fidelity between Gaussian states, the Bures distance, and the
//! symmetric relative energy difference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::states::{MixedGaussianState, PureGaussianState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FidelityError {
    #[error("fidelity must lie in (0,1], got {0}")]
    OutOfRange(f64),
    #[error("nonphysical state pair: {quantity} = {value} must be positive")]
    NonPositive { quantity: &'static str, value: f64 },
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("internal invariant violated: {0}")]
    Invariant(&'static str),
}

/// Fidelity value in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fidelity(f64);

impl Fidelity {
    pub fn new(f: f64) -> Result<Self, FidelityError> {
        if f > 0.0 && f <= 1.0 {
            Ok(Self(f))
        } else {
            Err(FidelityError::OutOfRange(f))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn bures(self) -> f64 {
        bures_distance(self)
    }
}

impl From<Fidelity> for f64 {
    fn from(f: Fidelity) -> f64 {
        f.0
    }
}

/// `𝓕 = |⟨ψ1|ψ2⟩|² = 2√(a1a2/G)·exp(-U/G)` with
/// `G = (a1+a2)² + (b1-b2)²` and `U` the quadratic form in `(δx, δp)`.
pub fn fidelity_pure(s1: &PureGaussianState, s2: &PureGaussianState) -> Result<Fidelity, FidelityError> {
    if s1 == s2 {
        return Ok(Fidelity(1.0));
    }
    let (a1, b1, a2, b2) = (s1.a(), s1.b(), s2.a(), s2.b());
    let dx = s2.x0() - s1.x0();
    let dp = s2.p0() - s1.p0();
    let sum = a1 + a2;
    let db = b1 - b2;
    let g = sum * sum + db * db;
    if !(g > 0.0 && g.is_finite()) {
        return Err(FidelityError::Invariant("G must be positive and finite"));
    }
    let u = sum * dp * dp
        + 2.0 * (a1 * b2 + a2 * b1) * dp * dx
        + (a1 * a2 * sum + a1 * b2 * b2 + a2 * b1 * b1) * dx * dx;
    if u < -1e-12 * g {
        return Err(FidelityError::Invariant("U must be nonnegative"));
    }
    let f = 2.0 * (a1 * a2 / g).sqrt() * (-u.max(0.0) / g).exp();
    clamp(f)
}

/// Fidelity between homogeneous mixed states,
/// `2√(a1a2(1-ζ1)(1-ζ2)) / (√(G - (a1ζ1 - a2ζ2)²) - 2√(a1a2ζ1ζ2))`.
pub fn fidelity_mixed(s1: &MixedGaussianState, s2: &MixedGaussianState) -> Result<Fidelity, FidelityError> {
    if s1 == s2 {
        return Ok(Fidelity(1.0));
    }
    mixed_formula((s1.a(), s1.b(), s1.zeta()), (s2.a(), s2.b(), s2.zeta()))
}

fn mixed_formula(
    (a1, b1, z1): (f64, f64, f64),
    (a2, b2, z2): (f64, f64, f64),
) -> Result<Fidelity, FidelityError> {
    let sum = a1 + a2;
    let db = b1 - b2;
    let g = sum * sum + db * db;
    let dz = a1 * z1 - a2 * z2;
    let radicand = g - dz * dz;
    if !(radicand > 0.0) {
        return Err(FidelityError::NonPositive {
            quantity: "G - (a1 zeta1 - a2 zeta2)^2",
            value: radicand,
        });
    }
    let denominator = radicand.sqrt() - 2.0 * (a1 * a2 * z1 * z2).sqrt();
    if !(denominator > 0.0) {
        return Err(FidelityError::NonPositive {
            quantity: "denominator",
            value: denominator,
        });
    }
    let numerator = 2.0 * (a1 * a2 * (1.0 - z1) * (1.0 - z2)).sqrt();
    clamp(numerator / denominator)
}

// Rounding can push a value a few ulps past 1.
fn clamp(f: f64) -> Result<Fidelity, FidelityError> {
    if f.is_nan() {
        return Err(FidelityError::Invariant("fidelity evaluated to NaN"));
    }
    if f <= 0.0 {
        // exp underflow for far-apart states
        return Ok(Fidelity(f64::MIN_POSITIVE));
    }
    Ok(Fidelity(f.min(1.0)))
}

/// `𝓑 = √(2 - 2√𝓕)`.
pub fn bures_distance(f: Fidelity) -> f64 {
    (2.0 - 2.0 * f.0.sqrt()).max(0.0).sqrt()
}

/// Checked variant of [`bures_distance`] for raw numbers.
pub fn bures_distance_of(f: f64) -> Result<f64, FidelityError> {
    Fidelity::new(f).map(bures_distance)
}

/// Relative energy change and symmetric relative energy difference of two
/// mean energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyComparison {
    pub e1: f64,
    pub e2: f64,
    /// `E2/E1 - 1`
    pub cal_e: f64,
    /// `|E2 - E1| / √(E1 E2)`
    pub y: f64,
}

pub fn compare_energies(e1: f64, e2: f64) -> Result<EnergyComparison, FidelityError> {
    for e in [e1, e2] {
        if !(e > 0.0 && e.is_finite()) {
            return Err(FidelityError::NonPositiveEnergy(e));
        }
    }
    Ok(EnergyComparison {
        e1,
        e2,
        cal_e: e2 / e1 - 1.0,
        y: (e2 - e1).abs() / (e1 * e2).sqrt(),
    })
}

/// Symmetric difference for an energy ratio `r = E2/E1`: `|r - 1|/√r`.
pub fn ratio_to_y(r: f64) -> f64 {
    (r - 1.0).abs() / r.sqrt()
}

/// Larger energy ratio with symmetric difference `y`:
/// `1 + y²/2 + y√(1 + y²/4)`.
pub fn y_to_max_ratio(y: f64) -> f64 {
    1.0 + y * y / 2.0 + y * (1.0 + y * y / 4.0).sqrt()
}
