//! Single-mode Gaussian states of a unit-mass, unit-frequency oscillator
//! (ħ = 1) and their scalar observables.
//!
//! A pure state has the wave function
//!
//! ```text
//! ψ(x) = (a/π)^{1/4} exp[-(a + ib)(x - x0)²/2 + i p0 x]
//! ```
//!
//! and a homogeneous mixed state has the coordinate kernel
//!
//! ```text
//! ρ(x, y) = √(a(1-ζ)/π) exp[-(a + ib)x²/2 - (a - ib)y²/2 + aζxy]
//! ```
//!
//! with `0 ≤ ζ < 1`; `ζ = 0` is the undisplaced pure state with the same `(a, b)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest admissible `a`.
pub const A_MIN: f64 = 1e-4;
/// Largest admissible `a`.
pub const A_MAX: f64 = 1e4;
/// Bound on `|b|`.
pub const B_MAX: f64 = 1e4;
/// Bound on `|x0|` and `|p0|`.
pub const DISPLACEMENT_MAX: f64 = 1e4;
/// Largest admissible mixing parameter. `ζ = 1` only exists as a limit.
pub const ZETA_MAX: f64 = 1.0 - 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("parameter `{name}` = {value} is outside its domain: {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
}

fn check(name: &'static str, value: f64, ok: bool, domain: &'static str) -> Result<(), StateError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(StateError::OutOfDomain { name, value, domain })
    }
}

fn check_shape(a: f64, b: f64) -> Result<(), StateError> {
    check("a", a, (A_MIN..=A_MAX).contains(&a), "[1e-4, 1e4]")?;
    check("b", b, b.abs() <= B_MAX, "|b| <= 1e4")
}

/// Displaced squeezed pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PureGaussianState {
    a: f64,
    b: f64,
    x0: f64,
    p0: f64,
}

impl PureGaussianState {
    pub fn new(a: f64, b: f64, x0: f64, p0: f64) -> Result<Self, StateError> {
        check_shape(a, b)?;
        check("x0", x0, x0.abs() <= DISPLACEMENT_MAX, "|x0| <= 1e4")?;
        check("p0", p0, p0.abs() <= DISPLACEMENT_MAX, "|p0| <= 1e4")?;
        Ok(Self { a, b, x0, p0 })
    }

    /// Undisplaced squeezed state `(a, b, 0, 0)`.
    pub fn squeezed(a: f64, b: f64) -> Result<Self, StateError> {
        Self::new(a, b, 0.0, 0.0)
    }

    /// Coherent state with mean position `x0` and mean momentum `p0`.
    pub fn coherent(x0: f64, p0: f64) -> Result<Self, StateError> {
        Self::new(1.0, 0.0, x0, p0)
    }

    pub fn vacuum() -> Self {
        Self { a: 1.0, b: 0.0, x0: 0.0, p0: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn energy(&self) -> f64 {
        energy_pure(self)
    }
}

/// Zero-displacement Gaussian density operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedGaussianState {
    a: f64,
    b: f64,
    zeta: f64,
}

impl MixedGaussianState {
    pub fn new(a: f64, b: f64, zeta: f64) -> Result<Self, StateError> {
        check_shape(a, b)?;
        check("zeta", zeta, (0.0..=ZETA_MAX).contains(&zeta), "[0, 1 - 1e-9]")?;
        Ok(Self { a, b, zeta })
    }

    /// Thermal state with mean occupation `nbar`: purity `1/(2nbar+1)` and
    /// `a = 1/√(1-ζ²)` so that both quadrature variances are equal.
    pub fn thermal(nbar: f64) -> Result<Self, StateError> {
        check("nbar", nbar, nbar >= 0.0, "nbar >= 0")?;
        let zeta = 2.0 * nbar * (nbar + 1.0) / (2.0 * nbar * (nbar + 1.0) + 1.0);
        Self::new(1.0 / ((1.0 - zeta) * (1.0 + zeta)).sqrt(), 0.0, zeta)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn energy(&self) -> f64 {
        energy_mixed(self)
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

impl PureGaussianState {
    /// The same state as a `ζ = 0` density operator, if undisplaced.
    pub fn as_mixed(&self) -> Option<MixedGaussianState> {
        (self.x0 == 0.0 && self.p0 == 0.0).then_some(MixedGaussianState {
            a: self.a,
            b: self.b,
            zeta: 0.0,
        })
    }
}

/// Centered covariances of position and momentum. `sxp` is the symmetrized
/// covariance `⟨(xp + px)/2⟩ - ⟨x⟩⟨p⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMoments {
    pub sxx: f64,
    pub spp: f64,
    pub sxp: f64,
}

impl SecondMoments {
    /// `sxx·spp - sxp²`, at least 1/4 for any physical state.
    pub fn determinant(&self) -> f64 {
        self.sxx * self.spp - self.sxp * self.sxp
    }
}

/// Either kind of state, for operations defined on both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianState {
    Pure(PureGaussianState),
    Mixed(MixedGaussianState),
}

impl GaussianState {
    pub fn energy(&self) -> f64 {
        match self {
            Self::Pure(s) => energy_pure(s),
            Self::Mixed(s) => energy_mixed(s),
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            Self::Pure(_) => 1.0,
            Self::Mixed(s) => purity(s),
        }
    }

    pub fn moments(&self) -> SecondMoments {
        match self {
            Self::Pure(s) => moments_pure(s),
            Self::Mixed(s) => moments_mixed(s),
        }
    }

    /// Mean position and momentum.
    pub fn mean(&self) -> (f64, f64) {
        match self {
            Self::Pure(s) => (s.x0, s.p0),
            Self::Mixed(_) => (0.0, 0.0),
        }
    }
}

impl From<PureGaussianState> for GaussianState {
    fn from(s: PureGaussianState) -> Self {
        Self::Pure(s)
    }
}

impl From<MixedGaussianState> for GaussianState {
    fn from(s: MixedGaussianState) -> Self {
        Self::Mixed(s)
    }
}

pub fn energy_pure(s: &PureGaussianState) -> f64 {
    (s.p0 * s.p0 + s.x0 * s.x0) / 2.0 + (1.0 + s.a * s.a + s.b * s.b) / (4.0 * s.a)
}

pub fn energy_mixed(s: &MixedGaussianState) -> f64 {
    let (a, b, z) = (s.a, s.b, s.zeta);
    (1.0 + a * a * (1.0 - z) * (1.0 + z) + b * b) / (4.0 * a * (1.0 - z))
}

/// `Tr ρ² = √((1-ζ)/(1+ζ))`.
pub fn purity(s: &MixedGaussianState) -> f64 {
    ((1.0 - s.zeta) / (1.0 + s.zeta)).sqrt()
}

/// Inverse of [`purity`]: `ζ = (1-μ²)/(1+μ²)`.
pub fn zeta_from_purity(mu: f64) -> Result<f64, StateError> {
    check("mu", mu, mu > 0.0 && mu <= 1.0, "(0, 1]")?;
    let mu2 = mu * mu;
    Ok((1.0 - mu2) / (1.0 + mu2))
}

pub fn moments_pure(s: &PureGaussianState) -> SecondMoments {
    let a = s.a;
    SecondMoments {
        sxx: 1.0 / (2.0 * a),
        spp: (a * a + s.b * s.b) / (2.0 * a),
        sxp: -s.b / (2.0 * a),
    }
}

// The Wigner function of the kernel is proportional to
// exp[-a(1-ζ)X² - (P + bX)²/(a(1+ζ))], which fixes all three moments.
pub fn moments_mixed(s: &MixedGaussianState) -> SecondMoments {
    let (a, b, z) = (s.a, s.b, s.zeta);
    let sxx = 1.0 / (2.0 * a * (1.0 - z));
    SecondMoments {
        sxx,
        spp: a * (1.0 + z) / 2.0 + b * b * sxx,
        sxp: -b * sxx,
    }
}

pub fn moments(s: &GaussianState) -> SecondMoments {
    s.moments()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_energies() {
        let e = |a| PureGaussianState::squeezed(a, 0.0).unwrap().energy();
        assert_abs_diff_eq!(e(1.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e(2.0), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(e(0.1), 2.525, epsilon = 1e-12);
        assert_abs_diff_eq!(e(0.05), 5.0125, epsilon = 1e-12);
    }

    #[test]
    fn mixed_energy_examples() {
        let ground = MixedGaussianState::new(1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(ground.energy(), 0.5, epsilon = 1e-15);
        let thermal = MixedGaussianState::new(1.154701, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(thermal.energy(), 0.866025, epsilon = 1e-6);
        let s = MixedGaussianState::new(1.0, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(s.energy(), 0.875, epsilon = 1e-15);
    }

    #[test]
    fn thermal_constructor_matches_occupation() {
        let nbar = (3f64.sqrt() - 1.0) / 2.0;
        let s = MixedGaussianState::thermal(nbar).unwrap();
        assert_abs_diff_eq!(s.zeta(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.a(), 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.energy(), nbar + 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.purity(), 1.0 / (2.0 * nbar + 1.0), epsilon = 1e-14);
    }

    #[test]
    fn purity_examples() {
        let p = |z| MixedGaussianState::new(1.0, 0.0, z).unwrap().purity();
        assert_eq!(p(0.0), 1.0);
        assert_abs_diff_eq!(p(0.6), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p(0.5), 0.577350, epsilon = 1e-6);
        assert_eq!(zeta_from_purity(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(zeta_from_purity(0.5).unwrap(), 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(zeta_from_purity(0.577350).unwrap(), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PureGaussianState::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(PureGaussianState::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(PureGaussianState::new(1.0, f64::NAN, 0.0, 0.0).is_err());
        assert!(PureGaussianState::new(1.0, 0.0, 2e4, 0.0).is_err());
        assert!(MixedGaussianState::new(1.0, 0.0, 1.0).is_err());
        assert!(MixedGaussianState::new(1.0, 0.0, -0.1).is_err());
        assert!(zeta_from_purity(0.0).is_err());
        assert!(zeta_from_purity(1.5).is_err());
        let err = MixedGaussianState::new(1.0, 0.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("zeta"));
    }

    #[test]
    fn moment_examples() {
        let m = moments_pure(&PureGaussianState::vacuum());
        assert_eq!((m.sxx, m.spp, m.sxp), (0.5, 0.5, 0.0));
        let m = moments_pure(&PureGaussianState::squeezed(2.0, 0.0).unwrap());
        assert_eq!((m.sxx, m.spp, m.sxp), (0.25, 1.0, -0.0));
        let m = moments_mixed(&MixedGaussianState::new(1.154701, 0.0, 0.5).unwrap());
        assert_abs_diff_eq!(m.sxx, 0.866025, epsilon = 1e-6);
        assert_abs_diff_eq!(m.spp, 0.866025, epsilon = 1e-6);
        assert_eq!(m.sxp, 0.0);
    }

    fn pure_state() -> impl Strategy<Value = PureGaussianState> {
        (-4.0..4.0f64, -1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64)
            .prop_map(|(la, b, x, p)| PureGaussianState::new(10f64.powf(la), b, x, p).unwrap())
    }

    fn mixed_state() -> impl Strategy<Value = MixedGaussianState> {
        (-4.0..3.0f64, -10.0..10.0f64, 0.0..0.999f64).prop_map(|(la, c, z)| {
            let a = 10f64.powf(la);
            MixedGaussianState::new(a, a * c, z).unwrap()
        })
    }

    proptest! {
        #[test]
        fn pure_energy_moment_identity(s in pure_state()) {
            let m = moments_pure(&s);
            let e = (m.sxx + m.spp + s.x0() * s.x0() + s.p0() * s.p0()) / 2.0;
            prop_assert!((e - s.energy()).abs() <= 1e-12 * s.energy());
            prop_assert!(s.energy() >= 0.5);
            prop_assert!((m.determinant() - 0.25).abs() <= 1e-12 * m.sxx * m.spp);
        }

        #[test]
        fn mixed_energy_moment_identity(s in mixed_state()) {
            let m = moments_mixed(&s);
            prop_assert!(((m.sxx + m.spp) / 2.0 - s.energy()).abs() <= 1e-12 * s.energy());
            prop_assert!(s.energy() >= 0.5);
            prop_assert!(m.determinant() - 0.25 >= -1e-12 * m.sxx * m.spp);
            // Heisenberg-limited Gaussian: purity = 1/(2√det).
            prop_assert!((1.0 / (2.0 * m.determinant().sqrt()) - s.purity()).abs() <= 1e-9);
        }

        #[test]
        fn mixed_reduces_to_pure(la in -4.0..4.0f64, b in -1e3..1e3f64) {
            let a = 10f64.powf(la);
            let m = MixedGaussianState::new(a, b, 0.0).unwrap();
            let p = PureGaussianState::squeezed(a, b).unwrap();
            prop_assert_eq!(m.energy(), p.energy());
            let (u, v) = (moments_mixed(&m), moments_pure(&p));
            prop_assert_eq!(u.sxx, v.sxx);
            prop_assert!((u.sxp - v.sxp).abs() <= 1e-15 * v.sxp.abs());
            prop_assert!((u.spp - v.spp).abs() <= 1e-14 * v.spp);
        }

        #[test]
        fn purity_roundtrip(mu in 1e-3..=1.0f64) {
            let z = zeta_from_purity(mu).unwrap();
            let s = MixedGaussianState::new(1.0, 0.0, z).unwrap();
            prop_assert!((s.purity() - mu).abs() <= 1e-12);
        }
    }
}
