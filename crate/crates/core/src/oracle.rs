//! Brute-force reference evaluations that share no algebra with the closed
//! forms: wave-function overlaps by Gauss–Hermite quadrature, and truncated
//! Fock-basis density matrices whose fidelity is taken from Hermitian
//! eigendecompositions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::states::{GaussianState, MixedGaussianState, PureGaussianState};

/// Default Gauss–Hermite order for overlaps.
pub const DEFAULT_ORDER: usize = 120;
/// Default truncation tolerance on the missing trace.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Largest supported Fock dimension.
pub const MAX_DIM: usize = 128;
/// Largest accepted deviation of a self-overlap from 1.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("quadrature order must be at least 2, got {0}")]
    Order(usize),
    #[error("Fock dimension must lie in [2, {MAX_DIM}], got {0}")]
    Dimension(usize),
    #[error("truncation error: {tail:.3e} of the trace lies above dimension {dim} (tolerance {tol:.1e})")]
    Truncation { dim: usize, tail: f64, tol: f64 },
    #[error("quadrature self-overlap deviates from 1 by {0:.3e}")]
    Quadrature(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
}

/// Gauss–Hermite rule for the weight `exp(-t²)`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Nodes from Newton iteration on orthonormal Hermite polynomials.
    pub fn gauss_hermite(order: usize) -> Result<Self, OracleError> {
        if order < 2 {
            return Err(OracleError::Order(order));
        }
        let n = order;
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-0.16667),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0f64);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ exp(-t²) g(t) dt`.
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, g: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| g(t) * w)
            .sum()
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::gauss_hermite(DEFAULT_ORDER).expect("default order is valid")
    }
}

/// `ln ψ(x)` for a pure state.
fn log_wavefunction(s: &PureGaussianState, x: f64) -> Complex64 {
    let d = x - s.x0();
    Complex64::new(0.25 * (s.a() / std::f64::consts::PI).ln(), 0.0)
        - Complex64::new(s.a(), s.b()) * (0.5 * d * d)
        + Complex64::new(0.0, s.p0() * x)
}

fn wavefunction(s: &PureGaussianState, x: f64) -> Complex64 {
    log_wavefunction(s, x).exp()
}

/// Quadrature overlap with its own accuracy gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    /// `|⟨ψ1|ψ2⟩|²`
    pub fidelity: f64,
    pub amplitude: Complex64,
    /// Largest deviation of `⟨ψj|ψj⟩` from 1 on the same nodes.
    pub norm_error: f64,
}

/// `|⟨ψ1|ψ2⟩|²` by Gauss–Hermite quadrature.
///
/// The substitution `x = c + s·t` maps the product envelope
/// `exp[-a1(x-x1)²/2 - a2(x-x2)²/2]` onto the weight `exp(-t²)`; the
/// self-overlaps are evaluated on the same nodes and gate the result.
pub fn overlap_pure(
    s1: &PureGaussianState,
    s2: &PureGaussianState,
    grid: &QuadratureGrid,
) -> Result<Overlap, OracleError> {
    let sum = s1.a() + s2.a();
    let center = (s1.a() * s1.x0() + s2.a() * s2.x0()) / sum;
    let scale = (2.0 / sum).sqrt();
    let inner = |u: &PureGaussianState, v: &PureGaussianState| {
        grid.integrate(|t| {
            let x = center + scale * t;
            (log_wavefunction(u, x).conj() + log_wavefunction(v, x) + t * t).exp()
        }) * scale
    };
    let amplitude = inner(s1, s2);
    let norm_error = [inner(s1, s1), inner(s2, s2)]
        .iter()
        .map(|n| (n - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if !(norm_error <= NORM_TOL) {
        return Err(OracleError::Quadrature(norm_error));
    }
    Ok(Overlap {
        fidelity: amplitude.norm_sqr(),
        amplitude,
        norm_error,
    })
}

/// Truncated density matrix `⟨m|ρ|n⟩`, `0 ≤ m, n < dim`.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    entries: DMatrix<Complex64>,
    tail: f64,
}

impl FockDensityMatrix {
    /// Wraps a matrix after checking it is square and Hermitian to 1e-12.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self, OracleError> {
        if entries.nrows() != entries.ncols() {
            return Err(OracleError::DimensionMismatch(entries.nrows(), entries.ncols()));
        }
        let dev = hermitian_deviation(&entries);
        if dev > 1e-12 {
            return Err(OracleError::NotHermitian(dev));
        }
        let tail = 1.0 - entries.trace().re;
        Ok(Self { entries, tail })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `1 - Tr ρ`: probability carried by levels at or above `dim`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Uniform grid that resolves both the state and the first `dim` oscillator
/// eigenfunctions; the trapezoid rule on it is spectrally accurate for these
/// rapidly decaying analytic integrands.
fn position_grid(state: &GaussianState, dim: usize) -> Vec<f64> {
    let m = state.moments();
    let (x0, p0) = state.mean();
    let reach = (2.0 * dim as f64 + 1.0).sqrt();
    let half_width = (reach + 10.0).max(x0.abs() + 12.0 * m.sxx.sqrt());
    let bandwidth = reach + p0.abs() + 12.0 * m.spp.sqrt() + 6.0;
    let h = std::f64::consts::PI / bandwidth;
    let lo = x0.min(0.0) - half_width;
    let hi = x0.max(0.0) + half_width;
    let count = ((hi - lo) / h).ceil() as usize + 1;
    (0..count).map(|i| lo + i as f64 * h).collect()
}

/// Normalized Hermite functions `φ_n(x_i)` as a `len × dim` matrix,
/// by the upward recurrence `φ_{n+1} = √(2/(n+1)) x φ_n - √(n/(n+1)) φ_{n-1}`.
pub fn hermite_functions(xs: &[f64], dim: usize) -> DMatrix<f64> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut phi = DMatrix::zeros(xs.len(), dim);
    for (i, &x) in xs.iter().enumerate() {
        let (mut prev, mut cur) = (0.0, pim4 * (-0.5 * x * x).exp());
        phi[(i, 0)] = cur;
        for k in 1..dim {
            let kf = (k - 1) as f64;
            let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            phi[(i, k)] = cur;
        }
    }
    phi
}

fn mixed_kernel(s: &MixedGaussianState, x: f64, y: f64) -> Complex64 {
    let (a, b, z) = (s.a(), s.b(), s.zeta());
    let norm = (a * (1.0 - z) / std::f64::consts::PI).sqrt();
    let exponent = -Complex64::new(a, b) * (0.5 * x * x) - Complex64::new(a, -b) * (0.5 * y * y)
        + Complex64::new(a * z * x * y, 0.0);
    exponent.exp() * norm
}

/// Fock matrix with the default truncation tolerance.
pub fn fock_matrix(state: &GaussianState, dim: usize) -> Result<FockDensityMatrix, OracleError> {
    fock_matrix_with_tol(state, dim, DEFAULT_TAIL_TOL)
}

/// Projects the state onto the first `dim` number states; fails when more
/// than `tail_tol` of the trace is lost.
pub fn fock_matrix_with_tol(
    state: &GaussianState,
    dim: usize,
    tail_tol: f64,
) -> Result<FockDensityMatrix, OracleError> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(OracleError::Dimension(dim));
    }
    let xs = position_grid(state, dim);
    let h = xs[1] - xs[0];
    let phi = hermite_functions(&xs, dim).map(|v| Complex64::new(v, 0.0));
    let rho = match state {
        GaussianState::Pure(s) => {
            let psi = DVector::from_iterator(xs.len(), xs.iter().map(|&x| wavefunction(s, x)));
            let coeffs = phi.tr_mul(&psi) * Complex64::new(h, 0.0);
            &coeffs * coeffs.adjoint()
        }
        GaussianState::Mixed(s) => {
            let kernel = DMatrix::from_fn(xs.len(), xs.len(), |i, j| mixed_kernel(s, xs[i], xs[j]));
            let half = &kernel * &phi;
            let full = phi.tr_mul(&half) * Complex64::new(h * h, 0.0);
            (&full + full.adjoint()) * Complex64::new(0.5, 0.0)
        }
    };
    let tail = 1.0 - rho.trace().re;
    if tail > tail_tol {
        return Err(OracleError::Truncation { dim, tail, tol: tail_tol });
    }
    Ok(FockDensityMatrix { entries: rho, tail })
}

/// Eigenvalues at or below this fraction of the largest one are treated as
/// zero; below it the eigensolver's rounding dominates.
const EIGEN_FLOOR: f64 = 1e-14;

/// Positive semidefinite square root via eigendecomposition.
fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = m.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let roots = eig
        .eigenvalues
        .map(|l| if l > EIGEN_FLOOR * top { Complex64::new(l.sqrt(), 0.0) } else { Complex64::new(0.0, 0.0) });
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

/// `[Tr √(√ρ1 ρ2 √ρ1)]²`, taking the trace as the sum of singular values
/// of `√ρ1 √ρ2` (the square roots of the eigenvalues of `√ρ1 ρ2 √ρ1`).
pub fn fidelity_fock(r1: &FockDensityMatrix, r2: &FockDensityMatrix) -> Result<f64, OracleError> {
    if r1.dim() != r2.dim() {
        return Err(OracleError::DimensionMismatch(r1.dim(), r2.dim()));
    }
    let product = psd_sqrt(&r1.entries) * psd_sqrt(&r2.entries);
    let trace: f64 = product.singular_values().iter().sum();
    Ok(trace * trace)
}

/// `Tr[ρ(n + 1/2)]`.
pub fn energy_fock(r: &FockDensityMatrix) -> f64 {
    (0..r.dim()).map(|n| (n as f64 + 0.5) * r.entries[(n, n)].re).sum()
}

/// `Tr ρ²`.
pub fn purity_fock(r: &FockDensityMatrix) -> f64 {
    r.entries.iter().map(|z| z.norm_sqr()).sum()
}

/// Means and centered second moments from ladder-operator expectations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sxx: f64,
    pub spp: f64,
    pub sxp: f64,
}

pub fn moments_fock(r: &FockDensityMatrix) -> FockMoments {
    let rho = &r.entries;
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut n = 0.0;
    for m in 0..r.dim() {
        let mf = m as f64;
        n += mf * rho[(m, m)].re;
        if m >= 1 {
            a += rho[(m, m - 1)] * mf.sqrt();
        }
        if m >= 2 {
            a2 += rho[(m, m - 2)] * (mf * (mf - 1.0)).sqrt();
        }
    }
    let mean_x = std::f64::consts::SQRT_2 * a.re;
    let mean_p = std::f64::consts::SQRT_2 * a.im;
    FockMoments {
        mean_x,
        mean_p,
        sxx: a2.re + n + 0.5 - mean_x * mean_x,
        spp: -a2.re + n + 0.5 - mean_p * mean_p,
        sxp: a2.im - mean_x * mean_p,
    }
}
