//! Bures geometry of two-mode Gaussian trajectories.
//!
//! With first moments pinned at zero, the Bures line element only sees the
//! symplectic eigenvalues,
//!
//! ```text
//! ds_B² = ¼ Σ_{j=±} (dν_j)² / (ν_j² − 1),
//! ```
//!
//! and the instantaneous Riemannian speed is the same expression with
//! `dν_j → ∂_t ν_j`. The derivatives are obtained analytically from
//! `ν±² = [Δ ± √(Δ² − 4 det σ)] / 2`.

use nalgebra::{Matrix2, Matrix4};

use crate::dynamics::{Propagator, SystemParams};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, Mode, Separability};

/// Metric coefficients `1/(ν² − 1)` are refused within this margin of 1.
pub const TOL_SING: f64 = 1e-9;
/// Default evolution time for the initial-speed observable.
pub const DEFAULT_EPSILON: f64 = 1e-3;
/// `ν₊, ν₋` are treated as one degenerate pair when
/// `√(Δ² − 4 det σ) ≤ DEGENERACY_TOL · Δ`, i.e. relative splitting below ~1e-7.
const DEGENERACY_TOL: f64 = 1e-7;

fn metric_term(nu: f64, dnu: f64) -> Result<f64> {
    if !(nu > 1.0 + TOL_SING) {
        return Err(Error::SingularMetric { nu, tol: TOL_SING });
    }
    Ok(0.25 * dnu * dnu / (nu * nu - 1.0))
}

/// `ds_B²` between two nearby states given their `(ν₊, ν₋)`.
pub fn bures_increment(nu: (f64, f64), nu_next: (f64, f64)) -> Result<f64> {
    Ok(metric_term(nu.0, nu_next.0 - nu.0)? + metric_term(nu.1, nu_next.1 - nu.1)?)
}

/// `tr(adj(M) N)`, the directional derivative of `det` for 2×2 blocks.
fn det_derivative_2(m: &Matrix2<f64>, n: &Matrix2<f64>) -> f64 {
    m[(1, 1)] * n[(0, 0)] - m[(0, 1)] * n[(1, 0)] - m[(1, 0)] * n[(0, 1)] + m[(0, 0)] * n[(1, 1)]
}

fn blocks(m: &Matrix4<f64>) -> [Matrix2<f64>; 3] {
    [
        m.fixed_view::<2, 2>(0, 0).into_owned(),
        m.fixed_view::<2, 2>(2, 2).into_owned(),
        m.fixed_view::<2, 2>(0, 2).into_owned(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueRates {
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub d_nu_plus: f64,
    pub d_nu_minus: f64,
    /// Set when `ν₊ ≈ ν₋`. The rates are then the derivatives of the two
    /// analytic eigenvalue branches through the crossing, obtained from the
    /// second-order expansion of the discriminant.
    pub degenerate: bool,
}

/// `(∂ν₊, ∂ν₋)` along the direction `σ̇`.
pub fn symplectic_eigenvalue_rates(sigma: &CovarianceMatrix, sigma_dot: &Matrix4<f64>) -> Result<EigenvalueRates> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            let (x, y) = (sigma_dot[(i, j)], sigma_dot[(j, i)]);
            if (x - y).abs() > 1e-12 * x.abs().max(y.abs()).max(1.0) {
                return Err(Error::Structural("σ̇ is not symmetric".into()));
            }
        }
    }
    let (nu_plus, nu_minus) = sigma.symplectic_eigenvalues()?;
    let m = sigma.matrix();
    let [alpha, beta, gamma] = blocks(m);
    let [d_alpha, d_beta, d_gamma] = blocks(sigma_dot);

    let delta = sigma.seralian();
    let det = sigma.det();
    let d_delta = det_derivative_2(&alpha, &d_alpha)
        + det_derivative_2(&beta, &d_beta)
        + 2.0 * det_derivative_2(&gamma, &d_gamma);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Numerical("covariance matrix is singular".into()))?;
    let x = inv * sigma_dot;
    let tr_x = x.trace();
    let d_det = det * tr_x;

    let disc = (delta * delta - 4.0 * det).max(0.0);
    let root = disc.sqrt();
    let degenerate = root <= DEGENERACY_TOL * delta.abs();
    let d_root = if degenerate {
        // s(h) = Δ² − 4 det ≈ c h² near the crossing, so d√s = ±√c.
        let dd_delta = 2.0 * (d_alpha.determinant() + d_beta.determinant() + 2.0 * d_gamma.determinant());
        let dd_det = det * (tr_x * tr_x - (x * x).trace());
        let c = (d_delta * d_delta + delta * dd_delta - 2.0 * dd_det).max(0.0);
        c.sqrt()
    } else {
        (delta * d_delta - 2.0 * d_det) / root
    };
    let d_plus_sq = 0.5 * (d_delta + d_root);
    let d_minus_sq = 0.5 * (d_delta - d_root);
    Ok(EigenvalueRates {
        nu_plus,
        nu_minus,
        d_nu_plus: d_plus_sq / (2.0 * nu_plus),
        d_nu_minus: d_minus_sq / (2.0 * nu_minus),
        degenerate,
    })
}

/// Instantaneous squared Bures speed `v_B²`.
pub fn riemannian_speed(sigma: &CovarianceMatrix, sigma_dot: &Matrix4<f64>) -> Result<f64> {
    let r = symplectic_eigenvalue_rates(sigma, sigma_dot)?;
    Ok(metric_term(r.nu_plus, r.d_nu_plus)? + metric_term(r.nu_minus, r.d_nu_minus)?)
}

/// Squared speed of one reduced mode, using its local symplectic eigenvalue
/// `ν_j = √det σ_j`.
pub fn local_speed(sigma: &CovarianceMatrix, sigma_dot: &Matrix4<f64>, mode: Mode) -> Result<f64> {
    let o = match mode {
        Mode::A => 0,
        Mode::B => 2,
    };
    let local = sigma.local(mode);
    let d_local = sigma_dot.fixed_view::<2, 2>(o, o).into_owned();
    let nu = local.determinant().max(0.0).sqrt();
    let d_nu = det_derivative_2(&local, &d_local) / (2.0 * nu);
    metric_term(nu, d_nu)
}

/// Result of evolving one initial state for a short time `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedSample {
    /// `ν̃₋` of the initial state.
    pub nu_tilde_minus: f64,
    /// `v_B²(ε)`, or `None` if the state is still metric-singular at `ε`.
    pub v_squared: Option<f64>,
    pub classification: Separability,
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub delta: f64,
}

impl SpeedSample {
    pub fn excluded(&self) -> bool {
        self.v_squared.is_none()
    }
}

/// `v_B²(ε)` with `σ̇(ε)` taken from the Lyapunov right-hand side.
pub fn initial_speed(sigma0: &CovarianceMatrix, p: &SystemParams, epsilon: f64) -> Result<SpeedSample> {
    initial_speed_with(&Propagator::from_params(p)?, sigma0, epsilon)
}

pub fn initial_speed_with(prop: &Propagator, sigma0: &CovarianceMatrix, epsilon: f64) -> Result<SpeedSample> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!("ε must be finite and > 0, got {epsilon}")));
    }
    sigma0.ensure_physical()?;
    let nu_tilde_minus = sigma0.ppt_min_eigenvalue()?;
    let classification = sigma0.classify_separability()?;
    let (mu1, mu2, mu, delta) = sigma0.purity_invariants();
    let sigma = prop.propagate(sigma0, epsilon)?;
    let v_squared = match riemannian_speed(&sigma, &prop.rate(&sigma)) {
        Ok(v) => Some(v),
        Err(Error::SingularMetric { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(SpeedSample { nu_tilde_minus, v_squared, classification, mu1, mu2, mu, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{local_squeeze, rotate, thermal_state, twin_beam, SimonInvariants};

    fn generic_state() -> CovarianceMatrix {
        let s = SimonInvariants::new(2.2, 3.1, 1.3, -0.8).to_covariance().unwrap();
        rotate(&local_squeeze(&s, 0.3, 0.5).unwrap(), 0.7, -0.4).unwrap()
    }

    fn generic_direction() -> Matrix4<f64> {
        Matrix4::new(
            0.3, -0.1, 0.2, 0.05, //
            -0.1, 0.7, -0.3, 0.1, //
            0.2, -0.3, -0.4, 0.25, //
            0.05, 0.1, 0.25, 0.9,
        )
    }

    #[test]
    fn increment_examples() {
        assert_eq!(bures_increment((2.0, 2.0), (2.0, 2.0)).unwrap(), 0.0);
        let ds = bures_increment((2.0, 2.0), (2.1, 2.0)).unwrap();
        assert!((ds - 0.25 * 0.01 / 3.0).abs() < 1e-15);
        assert!(matches!(bures_increment((1.0, 2.0), (1.1, 2.0)), Err(Error::SingularMetric { .. })));
    }

    #[test]
    fn thermal_family_metric() {
        // ν = 1 + 2M, dν = 2 dM ⇒ 4 ds²/dM² = 1/(M(M+1)) for one mode.
        for m in [0.1, 0.5, 1.0] {
            let dm = 1e-6;
            let nu = 1.0 + 2.0 * m;
            let ds = metric_term(nu, 2.0 * dm).unwrap();
            let q = 4.0 * ds / (dm * dm);
            assert!((q - 1.0 / (m * (m + 1.0))).abs() < 1e-9 * q);
        }
    }

    #[test]
    fn rates_vanish_without_motion() {
        let r = symplectic_eigenvalue_rates(&generic_state(), &Matrix4::zeros()).unwrap();
        assert_eq!((r.d_nu_plus, r.d_nu_minus), (0.0, 0.0));
    }

    #[test]
    fn rates_match_finite_differences() {
        let s = generic_state();
        let dir = generic_direction();
        let r = symplectic_eigenvalue_rates(&s, &dir).unwrap();
        assert!(!r.degenerate);
        let h = 1e-6;
        let up = CovarianceMatrix::symmetrized(s.matrix() + dir * h).unwrap().symplectic_eigenvalues().unwrap();
        let dn = CovarianceMatrix::symmetrized(s.matrix() - dir * h).unwrap().symplectic_eigenvalues().unwrap();
        let fd = ((up.0 - dn.0) / (2.0 * h), (up.1 - dn.1) / (2.0 * h));
        assert!((r.d_nu_plus - fd.0).abs() < 1e-6 * fd.0.abs());
        assert!((r.d_nu_minus - fd.1).abs() < 1e-6 * fd.1.abs());
    }

    #[test]
    fn thermal_relaxation_rate() {
        // GN = 0, σ₀ = I: ν(t) = 1 + 2M(1 − e^{−2kt}) on both modes, ν̇ = 4kM e^{−2kt}.
        let (k, m_a, m_b) = (0.1, 0.3, 0.8);
        let p = SystemParams::default().with_occupations(m_a, m_b);
        let prop = Propagator::from_params(&p).unwrap();
        for t in [0.5, 3.0, 20.0] {
            let s = prop.propagate(&CovarianceMatrix::identity(), t).unwrap();
            let r = symplectic_eigenvalue_rates(&s, &prop.rate(&s)).unwrap();
            let decay = (-2.0 * k * t).exp();
            assert!((r.d_nu_plus - 4.0 * k * m_b * decay).abs() < 1e-12);
            assert!((r.d_nu_minus - 4.0 * k * m_a * decay).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_symmetric_relaxation() {
        let (k, m) = (0.1, 0.4);
        let prop = Propagator::from_params(&SystemParams::symmetric(0.0, m)).unwrap();
        let s = prop.propagate(&CovarianceMatrix::identity(), 2.0).unwrap();
        let r = symplectic_eigenvalue_rates(&s, &prop.rate(&s)).unwrap();
        assert!(r.degenerate);
        let expect = 4.0 * k * m * (-2.0 * k * 2.0f64).exp();
        // The split between equal branches is a square root of rounding noise;
        // their sum and the speed are not.
        assert!((r.d_nu_plus - expect).abs() < 1e-7 * expect && (r.d_nu_minus - expect).abs() < 1e-7 * expect);
        assert!((r.d_nu_plus + r.d_nu_minus - 2.0 * expect).abs() < 1e-12);
        let nu = r.nu_plus;
        let v = riemannian_speed(&s, &prop.rate(&s)).unwrap();
        let v_expect = 0.5 * expect * expect / (nu * nu - 1.0);
        assert!((v - v_expect).abs() < 1e-12 * v_expect, "{v} vs {v_expect}");
    }

    #[test]
    fn degenerate_branch_split() {
        // Along σ = 2 I + h·diag(1, 1, 0, 0) the branches are 2 + h and 2.
        let s = thermal_state(0.5, 0.5).unwrap();
        let dir = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 0.0, 0.0));
        let r = symplectic_eigenvalue_rates(&s, &dir).unwrap();
        assert!(r.degenerate);
        assert!((r.d_nu_plus - 1.0).abs() < 1e-12 && r.d_nu_minus.abs() < 1e-12);
    }

    #[test]
    fn speed_at_steady_state_is_zero() {
        let prop = Propagator::from_params(&SystemParams::symmetric(0.35, 0.5)).unwrap();
        let ss = prop.steady_state();
        let v = riemannian_speed(ss, &prop.rate(ss)).unwrap();
        assert!(v.abs() < 1e-20, "{v}");
        let sample = initial_speed_with(&prop, ss, 1e-3).unwrap();
        assert!(sample.v_squared.unwrap() < 1e-20);
    }

    #[test]
    fn product_state_speed_is_additive() {
        let p = SystemParams::default().with_occupations(0.2, 0.9);
        let prop = Propagator::from_params(&p).unwrap();
        let s0 = local_squeeze(&thermal_state(0.05, 0.3).unwrap(), 0.8, -0.2).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let s = prop.propagate(&s0, t).unwrap();
            let rate = prop.rate(&s);
            let v = riemannian_speed(&s, &rate).unwrap();
            let va = local_speed(&s, &rate, Mode::A).unwrap();
            let vb = local_speed(&s, &rate, Mode::B).unwrap();
            assert!((v - va - vb).abs() < 1e-10 * v.max(1.0), "t = {t}: {v} vs {}", va + vb);
        }
    }

    #[test]
    fn twin_beam_speed_is_not_additive() {
        let prop = Propagator::from_params(&SystemParams::symmetric(0.0, 0.1)).unwrap();
        let s = prop.propagate(&twin_beam(1.0), 1.0).unwrap();
        let rate = prop.rate(&s);
        let v = riemannian_speed(&s, &rate).unwrap();
        let local = local_speed(&s, &rate, Mode::A).unwrap() + local_speed(&s, &rate, Mode::B).unwrap();
        assert!((v - local).abs() > 1e-3, "{v} vs {local}");
    }

    #[test]
    fn increment_converges_to_speed() {
        let prop = Propagator::from_params(&SystemParams::symmetric(0.35, 0.5)).unwrap();
        let s = prop.propagate(&generic_state(), 0.3).unwrap();
        let v = riemannian_speed(&s, &prop.rate(&s)).unwrap();
        let dt = 1e-5;
        let next = prop.propagate(&s, dt).unwrap();
        let ds = bures_increment(s.symplectic_eigenvalues().unwrap(), next.symplectic_eigenvalues().unwrap()).unwrap();
        assert!((ds / (dt * dt) - v).abs() < 1e-4 * v, "{} vs {v}", ds / (dt * dt));
    }

    #[test]
    fn vacuum_under_warm_baths_moves() {
        let sample = initial_speed(&CovarianceMatrix::identity(), &SystemParams::symmetric(0.0, 0.5), 1e-3).unwrap();
        assert!(sample.v_squared.unwrap() > 0.0);
        assert_eq!(sample.classification, Separability::Separable);
        assert_eq!(sample.nu_tilde_minus, 1.0);
    }

    #[test]
    fn local_speed_zero_without_motion() {
        let s = generic_state();
        assert_eq!(local_speed(&s, &Matrix4::zeros(), Mode::B).unwrap(), 0.0);
    }
}
