//! Linear open-system dynamics of the two modes.
//!
//! The quadrature fluctuations obey `ḟ = A f + noise`, so the covariance
//! follows the Lyapunov equation `σ̇ = Aσ + σAᵀ + D`. For a Hurwitz-stable
//! drift it has the exact solution
//!
//! ```text
//! σ(t) = e^{At} (σ₀ − σ_s) e^{Aᵀt} + σ_s,   A σ_s + σ_s Aᵀ = −D,
//! ```
//!
//! which is what [`Propagator`] evaluates. There is no time stepping anywhere.

use nalgebra::{Matrix4, SMatrix, SVector};

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::gaussian::CovarianceMatrix;

/// Eigenvalues of the drift must have real part below `-TOL_STAB`.
pub const TOL_STAB: f64 = 1e-12;

/// Physical constants of the thermometer (`ħ = k_B = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_a: f64,
    pub omega_b: f64,
    /// Effective coupling `G·N` between the two ensembles.
    pub gn: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub m_a: f64,
    pub m_b: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { omega_a: 1.0, omega_b: 1.0, gn: 0.0, k_a: 0.1, k_b: 0.1, m_a: 0.1, m_b: 0.1 }
    }
}

impl SystemParams {
    /// Default frequencies and rates with symmetric baths at occupation `m`.
    pub fn symmetric(gn: f64, m: f64) -> Self {
        Self { gn, m_a: m, m_b: m, ..Self::default() }
    }

    pub fn with_occupations(mut self, m_a: f64, m_b: f64) -> Self {
        self.m_a = m_a;
        self.m_b = m_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("omega_a", self.omega_a, self.omega_a > 0.0),
            ("omega_b", self.omega_b, self.omega_b > 0.0),
            ("k_a", self.k_a, self.k_a > 0.0),
            ("k_b", self.k_b, self.k_b > 0.0),
            ("m_a", self.m_a, self.m_a >= 0.0),
            ("m_b", self.m_b, self.m_b >= 0.0),
            ("gn", self.gn, self.gn >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(Error::Domain(format!("invalid parameter {name} = {value}")));
            }
        }
        Ok(())
    }

    pub fn drift(&self) -> DriftMatrix {
        build_drift(self)
    }

    pub fn diffusion(&self) -> DiffusionMatrix {
        build_diffusion(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(pub Matrix4<f64>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(pub Matrix4<f64>);

pub fn build_drift(p: &SystemParams) -> DriftMatrix {
    DriftMatrix(Matrix4::new(
        -p.k_a, p.omega_a, 0.0, 0.0, //
        -p.omega_a, -p.k_a, -p.gn, 0.0, //
        0.0, 0.0, -p.k_b, p.omega_b, //
        -p.gn, 0.0, -p.omega_b, -p.k_b,
    ))
}

pub fn build_diffusion(p: &SystemParams) -> DiffusionMatrix {
    let da = 2.0 * p.k_a * (2.0 * p.m_a + 1.0);
    let db = 2.0 * p.k_b * (2.0 * p.m_b + 1.0);
    DiffusionMatrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(da, da, db, db)))
}

impl DriftMatrix {
    /// Largest real part of the spectrum.
    pub fn spectral_abscissa(&self) -> f64 {
        self.0.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.spectral_abscissa() < -TOL_STAB
    }

    fn ensure_stable(&self) -> Result<()> {
        let max_real_part = self.spectral_abscissa();
        if max_real_part < -TOL_STAB {
            Ok(())
        } else {
            Err(Error::Unstable { max_real_part })
        }
    }
}

pub fn is_stable(a: &DriftMatrix) -> bool {
    a.is_stable()
}

/// Routh–Hurwitz verdict from the characteristic polynomial
/// `λ⁴ + c₁λ³ + c₂λ² + c₃λ + c₄` of the drift matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouthHurwitz {
    pub coefficients: [f64; 4],
    /// Leading principal minors of the Hurwitz matrix.
    pub minors: [f64; 4],
}

impl RouthHurwitz {
    pub fn new(a: &DriftMatrix) -> Self {
        // Faddeev–LeVerrier: M_k = A M_{k−1} + c_{k−1} I, c_k = −tr(A M_k)/k.
        let mut c = [1.0, 0.0, 0.0, 0.0, 0.0];
        let mut m = Matrix4::zeros();
        for k in 1..=4 {
            m = a.0 * m + Matrix4::identity() * c[k - 1];
            c[k] = -(a.0 * m).trace() / k as f64;
        }
        let [_, c1, c2, c3, c4] = c;
        let h2 = c1 * c2 - c3;
        let h3 = c3 * h2 - c1 * c1 * c4;
        Self { coefficients: [c1, c2, c3, c4], minors: [c1, h2, h3, c4 * h3] }
    }

    pub fn is_stable(&self) -> bool {
        self.minors.iter().all(|&h| h > 0.0)
    }
}

/// Right-hand side of the Lyapunov equation, `Aσ + σAᵀ + D`.
pub fn lyapunov_rhs(a: &DriftMatrix, d: &DiffusionMatrix, sigma: &Matrix4<f64>) -> Matrix4<f64> {
    a.0 * sigma + sigma * a.0.transpose() + d.0
}

/// Solves `A σ_s + σ_s Aᵀ = −D` as the 16×16 system `(I⊗A + A⊗I) vec σ_s = −vec D`.
pub fn solve_steady(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix> {
    a.ensure_stable()?;
    let mut kron = SMatrix::<f64, 16, 16>::zeros();
    // Column-major vec: entry (i, j) lives at i + 4j.
    for i in 0..4 {
        for j in 0..4 {
            let row = i + 4 * j;
            for k in 0..4 {
                kron[(row, k + 4 * j)] += a.0[(i, k)];
                kron[(row, i + 4 * k)] += a.0[(j, k)];
            }
        }
    }
    let rhs = SVector::<f64, 16>::from_iterator(d.0.iter().map(|v| -v));
    let x = kron
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("Lyapunov system is singular".into()))?;
    let sigma = Matrix4::from_iterator(x.iter().copied());
    CovarianceMatrix::symmetrized(sigma)
}

/// Exact propagator for one parameter set; caches `A`, `D` and `σ_s`.
#[derive(Debug, Clone)]
pub struct Propagator {
    drift: DriftMatrix,
    diffusion: DiffusionMatrix,
    steady: CovarianceMatrix,
}

impl Propagator {
    pub fn new(drift: DriftMatrix, diffusion: DiffusionMatrix) -> Result<Self> {
        let steady = solve_steady(&drift, &diffusion)?;
        Ok(Self { drift, diffusion, steady })
    }

    pub fn from_params(p: &SystemParams) -> Result<Self> {
        p.validate()?;
        Self::new(p.drift(), p.diffusion())
    }

    pub fn drift(&self) -> &DriftMatrix {
        &self.drift
    }

    pub fn diffusion(&self) -> &DiffusionMatrix {
        &self.diffusion
    }

    pub fn steady_state(&self) -> &CovarianceMatrix {
        &self.steady
    }

    /// `σ(t)`; returns `σ₀` unchanged at `t = 0`.
    pub fn propagate(&self, sigma0: &CovarianceMatrix, t: f64) -> Result<CovarianceMatrix> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("propagation time must be finite and ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(*sigma0);
        }
        let e = expm(&(self.drift.0 * t))?;
        let s = self.steady.matrix();
        CovarianceMatrix::symmetrized(e * (sigma0.matrix() - s) * e.transpose() + s)
    }

    /// Time derivative `σ̇` at the state `σ`.
    pub fn rate(&self, sigma: &CovarianceMatrix) -> Matrix4<f64> {
        lyapunov_rhs(&self.drift, &self.diffusion, sigma.matrix())
    }

    pub fn trajectory(&self, sigma0: &CovarianceMatrix, grid: &TimeGrid) -> Result<Trajectory> {
        sigma0.ensure_physical()?;
        let states = grid
            .times()
            .iter()
            .map(|&t| {
                let s = self.propagate(sigma0, t)?;
                let report = s.validate_physical();
                if !report.physical {
                    return Err(Error::Numerical(format!("propagated state at t = {t} is unphysical: {report}")));
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { times: grid.times().to_vec(), states })
    }
}

/// Convenience wrapper around [`Propagator::propagate`].
pub fn propagate(sigma0: &CovarianceMatrix, a: &DriftMatrix, d: &DiffusionMatrix, t: f64) -> Result<CovarianceMatrix> {
    Propagator::new(*a, *d)?.propagate(sigma0, t)
}

pub fn trajectory(sigma0: &CovarianceMatrix, p: &SystemParams, grid: &TimeGrid) -> Result<Trajectory> {
    Propagator::from_params(p)?.trajectory(sigma0, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Strictly increasing sample times starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        match times.first() {
            None => return Err(Error::Domain("time grid is empty".into())),
            Some(&t0) if t0 != 0.0 => return Err(Error::Domain(format!("time grid must start at 0, got {t0}"))),
            _ => {}
        }
        if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Domain("time grid must be strictly increasing and finite".into()));
        }
        Ok(Self(times))
    }

    /// `n` points from `0` to `t_max`. For log spacing the first nonzero
    /// point is `t_max · 10⁻³`.
    pub fn build(t_max: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("time grid needs at least one point".into()));
        }
        if n == 1 {
            return Self::new(vec![0.0]);
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Domain(format!("t_max must be finite and > 0, got {t_max}")));
        }
        let times = match spacing {
            Spacing::Linear => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
            Spacing::Log => {
                let lo = (t_max * 1e-3).ln();
                let hi = t_max.ln();
                let m = n - 1;
                std::iter::once(0.0)
                    .chain((0..m).map(|i| {
                        // Pin the ends so exp(ln t) rounding does not leak into the output.
                        if i + 1 == m {
                            t_max
                        } else if i == 0 {
                            t_max * 1e-3
                        } else {
                            (lo + (hi - lo) * i as f64 / (m - 1) as f64).exp()
                        }
                    }))
                    .collect()
            }
        };
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &CovarianceMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{thermal_state, twin_beam};

    #[test]
    fn drift_examples() {
        let a = build_drift(&SystemParams::symmetric(0.0, 0.1)).0;
        let block = nalgebra::Matrix2::new(-0.1, 1.0, -1.0, -0.1);
        assert_eq!(a.fixed_view::<2, 2>(0, 0), block);
        assert_eq!(a.fixed_view::<2, 2>(2, 2), block);
        assert!(a.fixed_view::<2, 2>(0, 2).iter().all(|&v| v == 0.0));
        assert!(a.fixed_view::<2, 2>(2, 0).iter().all(|&v| v == 0.0));

        let a = build_drift(&SystemParams::symmetric(0.35, 0.1)).0;
        assert_eq!(a[(1, 2)], -0.35);
        assert_eq!(a[(3, 0)], -0.35);

        for z in build_drift(&SystemParams::symmetric(0.0, 0.1)).0.complex_eigenvalues().iter() {
            assert!((z.re + 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn diffusion_examples() {
        let d = |p: SystemParams| build_diffusion(&p).0.diagonal();
        let vac = d(SystemParams::symmetric(0.0, 0.0));
        assert!(vac.iter().all(|&v| (v - 0.2).abs() < 1e-15));
        let warm = d(SystemParams::symmetric(0.0, 0.1));
        assert!(warm.iter().all(|&v| (v - 0.24).abs() < 1e-15));
        let p = SystemParams { k_a: 0.2, m_a: 1.0, k_b: 0.1, m_b: 0.5, ..Default::default() };
        let v = d(p);
        for (x, e) in v.iter().zip([1.2, 1.2, 0.4, 0.4]) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable(&build_drift(&SystemParams::symmetric(0.35, 0.1))));
        let p = SystemParams { k_a: 0.0, k_b: 0.0, ..Default::default() };
        assert!(!is_stable(&build_drift(&p)));
        // With ω = 1, k = 0.1 the spectrum is −k ± √(ω(GN − ω)) past GN = ω,
        // so stability is lost at GN = ω + k²/ω = 1.01.
        assert!(is_stable(&build_drift(&SystemParams::symmetric(1.009, 0.1))));
        assert!(!is_stable(&build_drift(&SystemParams::symmetric(1.011, 0.1))));
    }

    #[test]
    fn routh_hurwitz_agrees_with_spectrum() {
        let rh = RouthHurwitz::new(&build_drift(&SystemParams::default()));
        // Two decoupled (λ + k)² + ω² factors.
        let q = [0.2, 1.01];
        let expect = [2.0 * q[0], q[0] * q[0] + 2.0 * q[1], 2.0 * q[0] * q[1], q[1] * q[1]];
        for (c, e) in rh.coefficients.iter().zip(expect) {
            assert!((c - e).abs() < 1e-12, "{:?}", rh.coefficients);
        }
        for i in 0..=150 {
            let gn = 0.01 * i as f64;
            if (gn - 1.01).abs() < 1e-3 {
                continue;
            }
            let a = build_drift(&SystemParams::symmetric(gn, 0.1));
            assert_eq!(RouthHurwitz::new(&a).is_stable(), a.is_stable(), "GN = {gn}");
        }
        let p = SystemParams { k_a: 0.0, k_b: 0.0, ..Default::default() };
        assert!(!RouthHurwitz::new(&build_drift(&p)).is_stable());
    }

    #[test]
    fn steady_state_uncoupled_is_thermal() {
        let p = SystemParams::default().with_occupations(0.1, 1.0);
        let s = solve_steady(&p.drift(), &p.diffusion()).unwrap();
        let expect = thermal_state(0.1, 1.0).unwrap();
        assert!((s.matrix() - expect.matrix()).amax() < 1e-12);
    }

    #[test]
    fn steady_state_coupled_residual() {
        let p = SystemParams::symmetric(0.35, 0.1);
        let (a, d) = (p.drift(), p.diffusion());
        let s = solve_steady(&a, &d).unwrap();
        assert!(lyapunov_rhs(&a, &d, s.matrix()).amax() < 1e-10);
        assert!(s.get(0, 2).abs() > 1e-3);
        assert!(s.validate_physical().physical);
    }

    #[test]
    fn unstable_is_rejected() {
        let p = SystemParams::symmetric(2.0, 0.1);
        assert!(matches!(solve_steady(&p.drift(), &p.diffusion()), Err(Error::Unstable { .. })));
        assert!(matches!(Propagator::from_params(&p), Err(Error::Unstable { .. })));
    }

    #[test]
    fn relaxation_from_vacuum_matches_scalar_solution() {
        let (k, m) = (0.1, 0.4);
        let p = SystemParams::symmetric(0.0, m);
        let prop = Propagator::from_params(&p).unwrap();
        for t in [0.5 / k, 1.0 / k, 5.0 / k] {
            let s = prop.propagate(&CovarianceMatrix::identity(), t).unwrap();
            let expect = 1.0 + 2.0 * m * (1.0 - (-2.0 * k * t).exp());
            for i in 0..4 {
                assert!((s.get(i, i) - expect).abs() < 1e-12, "t = {t}");
            }
        }
    }

    #[test]
    fn stationarity_and_semigroup() {
        let p = SystemParams::symmetric(0.35, 0.5);
        let prop = Propagator::from_params(&p).unwrap();
        let ss = *prop.steady_state();
        assert!((prop.propagate(&ss, 13.0).unwrap().matrix() - ss.matrix()).amax() < 1e-12);
        let s0 = twin_beam(0.7);
        assert_eq!(prop.propagate(&s0, 0.0).unwrap(), s0);
        let two_step = prop.propagate(&prop.propagate(&s0, 1.3).unwrap(), 2.1).unwrap();
        let one_step = prop.propagate(&s0, 3.4).unwrap();
        assert!((two_step.matrix() - one_step.matrix()).amax() < 1e-10);
        let late = prop.propagate(&s0, 50.0 / 0.1).unwrap();
        assert!((late.matrix() - ss.matrix()).amax() < 1e-8);
    }

    #[test]
    fn time_grids() {
        assert_eq!(TimeGrid::build(5.0, 1, Spacing::Linear).unwrap().times(), &[0.0]);
        let lin = TimeGrid::build(10.0, 11, Spacing::Linear).unwrap();
        assert_eq!(lin.times()[3], 3.0);
        let log = TimeGrid::build(100.0, 5, Spacing::Log).unwrap();
        assert_eq!(log.times()[0], 0.0);
        assert_eq!(log.times()[1], 0.1);
        assert_eq!(log.times()[4], 100.0);
        assert_eq!(TimeGrid::build(3.0, 2, Spacing::Log).unwrap().times(), &[0.0, 3.0]);
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.5]).is_err());
    }

    #[test]
    fn trajectory_single_point() {
        let s0 = thermal_state(0.3, 0.2).unwrap();
        let tr = trajectory(&s0, &SystemParams::default(), &TimeGrid::new(vec![0.0]).unwrap()).unwrap();
        assert_eq!(tr.states, vec![s0]);
    }
}
