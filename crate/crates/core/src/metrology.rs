//! Gaussian Uhlmann fidelity and the quantum Fisher information of the bath
//! occupation, with its reparametrisation to temperature.
//!
//! For zero-mean states the (root) fidelity `F = Tr √(√ρ₁ ρ₂ √ρ₁)` is
//!
//! ```text
//! F⁴ = det[2 (√(I + (ΞΩ)⁻²/4) + I) Ξ] / det[(σ₁ + σ₂)/2],
//! 2ΩΞ = (σ₁ + σ₂)⁻¹ (Ω + σ₂ Ω σ₁),
//! ```
//!
//! For two modes the determinant collapses onto three invariants of the pair,
//!
//! ```text
//! F² = (√Γ + √Λ + √((√Γ + √Λ)² − Δ)) / Δ,
//! Δ = det(σ₁ + σ₂)/16,  Γ = det(Ωσ₁Ωσ₂ − I)/16,  Λ = det(σ₁ + iΩ) det(σ₂ + iΩ)/16,
//! ```
//!
//! which needs no matrix square root and keeps full precision when either
//! state is close to pure. `det(σ + iΩ) = det σ − Δ_σ + 1 = (ν₊² − 1)(ν₋² − 1)`.
//!
//! and `Q_M = 8 (1 − F(ρ_M, ρ_{M+dM})) / dM²`.

use nalgebra::Matrix4;
use rayon::prelude::*;

use crate::dynamics::{Propagator, SystemParams, TimeGrid};
use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, CovarianceMatrix};

/// Default finite-difference step on the occupation.
pub const DEFAULT_DM: f64 = 1e-3;
/// Infidelities at or below this cannot be resolved in double precision.
const MIN_RESOLVABLE_INFIDELITY: f64 = 1e-14;
/// Relative tolerance on quantities that must be ≥ 0 before a square root.
const ROOT_TOL: f64 = 1e-9;

fn fidelity_log4(sigma1: &CovarianceMatrix, sigma2: &CovarianceMatrix) -> Result<f64> {
    let omega = symplectic_form();
    let (s1, s2) = (sigma1.matrix(), sigma2.matrix());
    let delta = (s1 + s2).determinant() / 16.0;
    let gamma = (omega * s1 * omega * s2 - Matrix4::identity()).determinant() / 16.0;
    let mixedness = |s: &CovarianceMatrix| (s.det() - s.seralian() + 1.0).max(0.0);
    let lambda = mixedness(sigma1) * mixedness(sigma2) / 16.0;
    if !(delta > 0.0) || gamma < -ROOT_TOL * delta {
        return Err(Error::Numerical(format!("fidelity invariants out of range (Δ = {delta:e}, Γ = {gamma:e})")));
    }
    let s = gamma.max(0.0).sqrt() + lambda.sqrt();
    let disc = s * s - delta;
    if disc < -ROOT_TOL * delta {
        return Err(Error::Numerical(format!(
            "fidelity square root undefined: (√Γ + √Λ)² − Δ = {disc:e} (Δ = {delta:e}, Γ = {gamma:e}, Λ = {lambda:e})"
        )));
    }
    let f_sq = (s + disc.max(0.0).sqrt()) / delta;
    Ok(2.0 * f_sq.ln())
}

/// Uhlmann (root) fidelity between two zero-mean Gaussian states.
pub fn uhlmann_fidelity(sigma1: &CovarianceMatrix, sigma2: &CovarianceMatrix) -> Result<f64> {
    Ok(1.0 - infidelity(sigma1, sigma2)?)
}

/// `1 − F`, evaluated as `−expm1(¼ ln F⁴)` to keep small values accurate.
pub fn infidelity(sigma1: &CovarianceMatrix, sigma2: &CovarianceMatrix) -> Result<f64> {
    sigma1.ensure_physical()?;
    sigma2.ensure_physical()?;
    if sigma1 == sigma2 {
        return Ok(0.0);
    }
    let log4 = fidelity_log4(sigma1, sigma2)?;
    let inf = -(0.25 * log4).exp_m1();
    if inf < -1e-10 {
        return Err(Error::Numerical(format!("fidelity exceeds 1 by {:e}", -inf)));
    }
    Ok(inf.max(0.0))
}

/// Mean occupation of a bosonic mode at temperature `T`: `1/(e^{ω/T} − 1)`.
pub fn occupation(omega: f64, temperature: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("omega", omega)?;
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Inverse of [`occupation`]: `T = ω / ln(1 + 1/M)`.
pub fn temperature(omega: f64, occupation: f64) -> Result<f64> {
    check_positive("occupation", occupation)?;
    check_positive("omega", omega)?;
    Ok(omega / (1.0 / occupation).ln_1p())
}

/// `dM/dT = ω / (4 T² sinh²(ω/2T))`.
pub fn occupation_derivative(omega: f64, temperature: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    check_positive("omega", omega)?;
    let s = (omega / (2.0 * temperature)).sinh();
    Ok(omega / (4.0 * temperature * temperature * s * s))
}

/// `Q_T = Q_M ω² csch⁴(ω/2T) / (16 T⁴)`.
pub fn qfi_temperature(q_m: f64, omega: f64, temperature: f64) -> Result<f64> {
    let d = occupation_derivative(omega, temperature)?;
    Ok(q_m * d * d)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Which bath occupation is the estimated parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BathShift {
    /// Both baths share `M` and move together.
    #[default]
    Both,
    A,
    B,
}

impl BathShift {
    fn shifted(self, p: &SystemParams, dm: f64) -> SystemParams {
        let mut q = *p;
        match self {
            BathShift::Both => {
                q.m_a += dm;
                q.m_b += dm;
            }
            BathShift::A => q.m_a += dm,
            BathShift::B => q.m_b += dm,
        }
        q
    }

    /// The occupation that is being estimated.
    pub fn occupation(self, p: &SystemParams) -> f64 {
        match self {
            BathShift::Both | BathShift::A => p.m_a,
            BathShift::B => p.m_b,
        }
    }

    /// Frequency that converts the estimated occupation into a temperature.
    pub fn omega(self, p: &SystemParams) -> f64 {
        match self {
            BathShift::Both | BathShift::A => p.omega_a,
            BathShift::B => p.omega_b,
        }
    }
}

/// Pair of propagators for baths at `M ∓ dM/2`.
#[derive(Debug, Clone)]
pub struct QfiEstimator {
    lower: Propagator,
    upper: Propagator,
    dm: f64,
}

impl QfiEstimator {
    pub fn new(p: &SystemParams, dm: f64, shift: BathShift) -> Result<Self> {
        p.validate()?;
        check_positive("dM", dm)?;
        let lo = shift.shifted(p, -0.5 * dm);
        if lo.m_a < 0.0 || lo.m_b < 0.0 {
            return Err(Error::Domain(format!("occupation minus dM/2 is negative (dM = {dm})")));
        }
        Ok(Self {
            lower: Propagator::from_params(&lo)?,
            upper: Propagator::from_params(&shift.shifted(p, 0.5 * dm))?,
            dm,
        })
    }

    /// `Q_M(t)` by the central fidelity difference.
    pub fn qfi(&self, sigma0: &CovarianceMatrix, t: f64) -> Result<f64> {
        let lo = self.lower.propagate(sigma0, t)?;
        let hi = self.upper.propagate(sigma0, t)?;
        if lo == hi {
            return Ok(0.0);
        }
        let inf = infidelity(&lo, &hi)?;
        if inf <= MIN_RESOLVABLE_INFIDELITY {
            return Err(Error::StepSize { step: self.dm, infidelity: inf });
        }
        Ok(8.0 * inf / (self.dm * self.dm))
    }
}

pub fn qfi_occupation(sigma0: &CovarianceMatrix, p: &SystemParams, t: f64, dm: f64) -> Result<f64> {
    QfiEstimator::new(p, dm, BathShift::Both)?.qfi(sigma0, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiPoint {
    pub t: f64,
    pub q_m: f64,
    pub q_t: f64,
}

/// Bath temperature implied by the estimated occupation and `ω_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperaturePoint {
    pub temperature: f64,
    pub omega: f64,
    pub occupation: f64,
}

impl TemperaturePoint {
    pub fn from_occupation(omega: f64, occupation: f64) -> Result<Self> {
        Ok(Self { temperature: temperature(omega, occupation)?, omega, occupation })
    }
}

/// `Q_M(t)` and `Q_T(t)` on every grid time.
pub fn qfi_scan(
    sigma0: &CovarianceMatrix,
    p: &SystemParams,
    grid: &TimeGrid,
    dm: f64,
    shift: BathShift,
) -> Result<Vec<QfiPoint>> {
    sigma0.ensure_physical()?;
    let est = QfiEstimator::new(p, dm, shift)?;
    let temp = TemperaturePoint::from_occupation(shift.omega(p), shift.occupation(p))?;
    grid.times()
        .par_iter()
        .map(|&t| {
            let q_m = est.qfi(sigma0, t)?;
            Ok(QfiPoint { t, q_m, q_t: qfi_temperature(q_m, temp.omega, temp.temperature)? })
        })
        .collect()
}
