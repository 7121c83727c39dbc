//! Two-mode Gaussian states in the covariance-matrix picture.
//!
//! Quadratures are ordered `(x_a, p_a, x_b, p_b)` and the vacuum has
//! covariance `I₄`, so a single-mode thermal state with mean occupation `M`
//! has covariance `(1 + 2M) I₂`. The 4×4 matrix is split into 2×2 blocks
//!
//! ```text
//!     σ = | α   γ |
//!         | γᵀ  β |
//! ```
//!
//! and everything in this module is written in terms of the block
//! determinants, which are invariant under local symplectic operations.

use std::fmt;

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};

/// Tolerance on `ν₋ ≥ 1` used by every physicality check.
pub const TOL_PHYS: f64 = 1e-9;
/// Margin below `ν̃₋ = 1` required to call a state entangled.
pub const TOL_CLASS: f64 = 1e-12;

/// The two-mode symplectic form `Ω = ω ⊕ ω`, `ω = [[0, 1], [-1, 0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Partial transposition of mode `b` acts as `p_b → -p_b`.
pub(crate) fn momentum_flip_b() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0))
}

/// Which of the two modes an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 2,
        }
    }
}

/// Covariance matrix of a zero-mean two-mode Gaussian state.
///
/// Construction only enforces exact symmetry. Physicality is a separate
/// question answered by [`CovarianceMatrix::validate_physical`], because
/// several callers need to hold (and report on) unphysical candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix4<f64>);

impl CovarianceMatrix {
    /// Wraps `m`, rejecting any matrix that is not exactly symmetric.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Structural(format!(
                        "covariance matrix is not symmetric: σ[{i}][{j}] = {} but σ[{j}][{i}] = {}",
                        m[(i, j)],
                        m[(j, i)]
                    )));
                }
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Structural("covariance matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    /// Wraps `(m + mᵀ) / 2`. Used for results of floating-point products that
    /// are symmetric only up to rounding.
    pub fn symmetrized(m: Matrix4<f64>) -> Result<Self> {
        Self::new((m + m.transpose()) * 0.5)
    }

    pub fn from_row_slice(entries: &[f64; 16]) -> Result<Self> {
        Self::new(Matrix4::from_row_slice(entries))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// 2×2 block `(row, col)` with `0 = mode a`, `1 = mode b`.
    pub fn block(&self, row: usize, col: usize) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2 * row, 2 * col).into_owned()
    }

    /// Reduced covariance matrix of one mode.
    pub fn local(&self, mode: Mode) -> Matrix2<f64> {
        let o = mode.offset();
        self.0.fixed_view::<2, 2>(o, o).into_owned()
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    /// Seralian `Δ = det α + det β + 2 det γ`.
    pub fn seralian(&self) -> f64 {
        self.block(0, 0).determinant()
            + self.block(1, 1).determinant()
            + 2.0 * self.block(0, 1).determinant()
    }

    /// Congruence `S σ Sᵀ`.
    pub fn congruence(&self, s: &Matrix4<f64>) -> Result<Self> {
        Self::symmetrized(s * self.0 * s.transpose())
    }

    /// Covariance of the partially transposed state (`p_b → -p_b`).
    pub fn partial_transpose(&self) -> Self {
        let p = momentum_flip_b();
        Self(p * self.0 * p)
    }

    /// Symplectic eigenvalues `(ν₊, ν₋)` from the closed form
    /// `ν±² = [Δ ± √(Δ² − 4 det σ)] / 2`.
    pub fn symplectic_eigenvalues(&self) -> Result<(f64, f64)> {
        spectrum(&self.0, self.seralian(), self.det())
    }

    /// Smallest symplectic eigenvalue of the partial transpose, `ν̃₋`.
    /// Only `Δ` changes under transposition: `Δ̃ = Δ − 4 det γ`.
    pub fn ppt_min_eigenvalue(&self) -> Result<f64> {
        let delta_pt = self.seralian() - 4.0 * self.block(0, 1).determinant();
        let pt = momentum_flip_b() * self.0 * momentum_flip_b();
        spectrum(&pt, delta_pt, self.det()).map(|(_, minus)| minus)
    }

    pub fn classify_separability(&self) -> Result<Separability> {
        let nu = self.ppt_min_eigenvalue()?;
        Ok(if nu < 1.0 - TOL_CLASS { Separability::Entangled } else { Separability::Separable })
    }

    /// Symplectic eigenvalue of one mode's reduced state, `√det σ_j`.
    pub fn local_symplectic_eigenvalue(&self, mode: Mode) -> f64 {
        self.local(mode).determinant().max(0.0).sqrt()
    }

    /// Global purity `μ = 1/√det σ`.
    pub fn purity(&self) -> f64 {
        1.0 / self.det().sqrt()
    }

    /// Marginal, global purities and seralian `(μ₁, μ₂, μ, Δ)`.
    pub fn purity_invariants(&self) -> (f64, f64, f64, f64) {
        (
            1.0 / self.local(Mode::A).determinant().sqrt(),
            1.0 / self.local(Mode::B).determinant().sqrt(),
            self.purity(),
            self.seralian(),
        )
    }

    /// Checks `σ > 0` and `ν₋ ≥ 1 − tol_phys` (equivalently `σ + iΩ ≥ 0`).
    pub fn validate_physical(&self) -> PhysicalityReport {
        let min_eigenvalue = self.0.symmetric_eigenvalues().min();
        if min_eigenvalue <= 0.0 {
            return PhysicalityReport {
                physical: false,
                min_eigenvalue,
                nu_minus: f64::NAN,
                violation: Some(Violation::NotPositiveDefinite),
            };
        }
        match self.symplectic_eigenvalues() {
            Ok((_, nu_minus)) if nu_minus >= 1.0 - TOL_PHYS => PhysicalityReport {
                physical: true,
                min_eigenvalue,
                nu_minus,
                violation: None,
            },
            Ok((_, nu_minus)) => PhysicalityReport {
                physical: false,
                min_eigenvalue,
                nu_minus,
                violation: Some(Violation::UncertaintyPrinciple),
            },
            Err(_) => PhysicalityReport {
                physical: false,
                min_eigenvalue,
                nu_minus: f64::NAN,
                violation: Some(Violation::DegenerateSpectrum),
            },
        }
    }

    /// Like [`validate_physical`](Self::validate_physical) but as a `Result`.
    pub fn ensure_physical(&self) -> Result<()> {
        let report = self.validate_physical();
        if report.physical {
            Ok(())
        } else {
            Err(Error::Domain(format!("unphysical covariance matrix: {report}")))
        }
    }
}

impl fmt::Display for CovarianceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..4 {
            let row: Vec<String> = (0..4).map(|j| format!("{:.6e}", self.0[(i, j)])).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Near a double root the closed form loses half the digits, so fall back to
/// the spectrum of `KᵀK` with `K = LᵀΩL`, `σ = LLᵀ`, whose eigenvalues are `ν²`
/// (each twice) and which is perturbed only linearly.
fn spectrum(m: &Matrix4<f64>, delta: f64, det: f64) -> Result<(f64, f64)> {
    let (plus, minus) = symplectic_pair(delta, det)?;
    if plus - minus > 1e-4 * plus {
        return Ok((plus, minus));
    }
    let Some(chol) = m.cholesky() else {
        return Ok((plus, minus));
    };
    let l = chol.l();
    let k = l.transpose() * symplectic_form() * l;
    let mut ev: Vec<f64> = (k.transpose() * k).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok((((ev[0] + ev[1]) * 0.5).sqrt(), ((ev[2] + ev[3]) * 0.5).max(0.0).sqrt()))
}

fn symplectic_pair(delta: f64, det: f64) -> Result<(f64, f64)> {
    let disc = delta * delta - 4.0 * det;
    let tol = 1e-9 * delta.abs().max(1.0).powi(2);
    if disc < -tol {
        return Err(Error::Numerical(format!(
            "symplectic spectrum is degenerate: Δ² − 4 det σ = {disc:e}"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let plus_sq = 0.5 * (delta + root);
    // ν₋² = det σ / ν₊² avoids cancellation when Δ ≈ √(Δ² − 4 det σ).
    let minus_sq = if plus_sq > 0.0 { det / plus_sq } else { 0.5 * (delta - root) };
    if !(minus_sq > 0.0) || !(plus_sq > 0.0) {
        return Err(Error::Domain(format!(
            "covariance matrix has non-positive symplectic spectrum (Δ = {delta}, det σ = {det})"
        )));
    }
    Ok((plus_sq.sqrt(), minus_sq.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NotPositiveDefinite,
    UncertaintyPrinciple,
    DegenerateSpectrum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalityReport {
    pub physical: bool,
    pub min_eigenvalue: f64,
    pub nu_minus: f64,
    pub violation: Option<Violation>,
}

impl fmt::Display for PhysicalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.violation {
            None => write!(f, "physical (ν₋ = {})", self.nu_minus),
            Some(Violation::NotPositiveDefinite) => {
                write!(f, "not positive definite (smallest eigenvalue {:e})", self.min_eigenvalue)
            }
            Some(Violation::UncertaintyPrinciple) => {
                write!(f, "violates σ + iΩ ≥ 0 (ν₋ = {} < 1)", self.nu_minus)
            }
            Some(Violation::DegenerateSpectrum) => write!(f, "symplectic spectrum not computable"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Separability {
    Entangled,
    Separable,
}

impl Separability {
    pub fn as_str(self) -> &'static str {
        match self {
            Separability::Entangled => "entangled",
            Separability::Separable => "separable",
        }
    }
}

impl fmt::Display for Separability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Standard-form parameters: `α = a I`, `β = b I`, `γ = diag(c₊, c₋)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimonInvariants {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl SimonInvariants {
    pub fn new(a: f64, b: f64, c_plus: f64, c_minus: f64) -> Self {
        Self { a, b, c_plus, c_minus }
    }

    /// Reads the parameters off a matrix already in standard form.
    pub fn from_standard_form(sigma: &CovarianceMatrix) -> Result<Self> {
        let m = sigma.matrix();
        let zero_pattern = [(0, 1), (0, 3), (1, 2), (2, 3)];
        if m[(0, 0)] != m[(1, 1)] || m[(2, 2)] != m[(3, 3)] || zero_pattern.iter().any(|&(i, j)| m[(i, j)] != 0.0) {
            return Err(Error::Structural("covariance matrix is not in standard form".into()));
        }
        Ok(Self::new(m[(0, 0)], m[(2, 2)], m[(0, 2)], m[(1, 3)]))
    }

    pub fn mu1(&self) -> f64 {
        1.0 / self.a
    }

    pub fn mu2(&self) -> f64 {
        1.0 / self.b
    }

    pub fn det(&self) -> f64 {
        let ab = self.a * self.b;
        (ab - self.c_plus * self.c_plus) * (ab - self.c_minus * self.c_minus)
    }

    pub fn mu(&self) -> f64 {
        1.0 / self.det().sqrt()
    }

    pub fn delta(&self) -> f64 {
        self.a * self.a + self.b * self.b + 2.0 * self.c_plus * self.c_minus
    }

    fn matrix(&self) -> Matrix4<f64> {
        let Self { a, b, c_plus: cp, c_minus: cm } = *self;
        Matrix4::new(
            a, 0.0, cp, 0.0, //
            0.0, a, 0.0, cm, //
            cp, 0.0, b, 0.0, //
            0.0, cm, 0.0, b,
        )
    }

    /// Builds the standard-form covariance, refusing unphysical parameters.
    pub fn to_covariance(&self) -> Result<CovarianceMatrix> {
        let Self { a, b, c_plus, c_minus } = *self;
        if ![a, b, c_plus, c_minus].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("standard-form parameters must be finite".into()));
        }
        if a < 1.0 - TOL_PHYS || b < 1.0 - TOL_PHYS {
            return Err(Error::Domain(format!("marginal uncertainty violated: need a, b ≥ 1 (a = {a}, b = {b})")));
        }
        let ab = a * b;
        if ab - c_plus * c_plus <= 0.0 || ab - c_minus * c_minus <= 0.0 {
            return Err(Error::Domain(format!(
                "positivity violated: need ab > c±² (ab = {ab}, c₊ = {c_plus}, c₋ = {c_minus})"
            )));
        }
        let det = self.det();
        if det < 1.0 - TOL_PHYS {
            return Err(Error::Domain(format!("uncertainty violated: need det σ ≥ 1 (det σ = {det})")));
        }
        let delta = self.delta();
        if delta > 1.0 + det + TOL_PHYS * det.max(1.0) {
            return Err(Error::Domain(format!(
                "uncertainty violated: need Δ ≤ 1 + det σ (Δ = {delta}, det σ = {det})"
            )));
        }
        let sigma = CovarianceMatrix::new(self.matrix())?;
        sigma.ensure_physical()?;
        Ok(sigma)
    }
}

/// Product of thermal states, `(1 + 2M_a) I₂ ⊕ (1 + 2M_b) I₂`.
pub fn thermal_state(m_a: f64, m_b: f64) -> Result<CovarianceMatrix> {
    if !(m_a >= 0.0) || !(m_b >= 0.0) || !m_a.is_finite() || !m_b.is_finite() {
        return Err(Error::Domain(format!("occupations must be finite and ≥ 0 (M_a = {m_a}, M_b = {m_b})")));
    }
    let na = 1.0 + 2.0 * m_a;
    let nb = 1.0 + 2.0 * m_b;
    Ok(CovarianceMatrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(na, na, nb, nb))))
}

/// Applies the local squeezers `diag(e^{r_a}, e^{-r_a}) ⊕ diag(e^{r_b}, e^{-r_b})`.
pub fn local_squeeze(sigma: &CovarianceMatrix, r_a: f64, r_b: f64) -> Result<CovarianceMatrix> {
    sigma.ensure_physical()?;
    if !r_a.is_finite() || !r_b.is_finite() {
        return Err(Error::Domain("squeezing parameters must be finite".into()));
    }
    let s = Matrix4::from_diagonal(&nalgebra::Vector4::new(r_a.exp(), (-r_a).exp(), r_b.exp(), (-r_b).exp()));
    sigma.congruence(&s)
}

/// Local phase-space rotations by `θ_a`, `θ_b`.
pub fn rotate(sigma: &CovarianceMatrix, theta_a: f64, theta_b: f64) -> Result<CovarianceMatrix> {
    let mut s = Matrix4::zeros();
    for (o, th) in [(0usize, theta_a), (2usize, theta_b)] {
        let (sn, cs) = th.sin_cos();
        s[(o, o)] = cs;
        s[(o, o + 1)] = sn;
        s[(o + 1, o)] = -sn;
        s[(o + 1, o + 1)] = cs;
    }
    sigma.congruence(&s)
}

/// Two-mode squeezed vacuum: `a = b = cosh 2r`, `c₊ = −c₋ = sinh 2r`.
pub fn twin_beam(r: f64) -> CovarianceMatrix {
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    CovarianceMatrix(SimonInvariants::new(ch, ch, sh, -sh).matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector4;

    fn diag(d: [f64; 4]) -> CovarianceMatrix {
        CovarianceMatrix::new(Matrix4::from_diagonal(&Vector4::from(d))).unwrap()
    }

    /// ν from the spectrum of Ωσ, which is {±iν₊, ±iν₋}.
    fn brute_force_symplectic(m: &Matrix4<f64>) -> (f64, f64) {
        let mut mags: Vec<f64> = (symplectic_form() * m).complex_eigenvalues().iter().map(|z| z.norm()).collect();
        mags.sort_by(|x, y| x.partial_cmp(y).unwrap());
        (0.5 * (mags[2] + mags[3]), 0.5 * (mags[0] + mags[1]))
    }

    #[test]
    fn symmetric_check_is_exact() {
        let mut m = Matrix4::identity();
        m[(0, 3)] = 1e-300;
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::Structural(_))));
    }

    #[test]
    fn physicality_examples() {
        assert!(CovarianceMatrix::identity().validate_physical().physical);
        let half = diag([0.5; 4]).validate_physical();
        assert!(!half.physical);
        assert_eq!(half.violation, Some(Violation::UncertaintyPrinciple));
        let s = diag([1.2, 1.2, 3.0, 3.0]);
        let (p, m) = s.symplectic_eigenvalues().unwrap();
        assert!((p - 3.0).abs() < 1e-14 && (m - 1.2).abs() < 1e-14);
        assert!(s.validate_physical().physical);
        let indefinite = diag([1.0, -1.0, 1.0, 1.0]).validate_physical();
        assert_eq!(indefinite.violation, Some(Violation::NotPositiveDefinite));
    }

    #[test]
    fn symplectic_eigenvalue_examples() {
        let (p, m) = CovarianceMatrix::identity().symplectic_eigenvalues().unwrap();
        assert_eq!((p, m), (1.0, 1.0));
        let (p, m) = thermal_state(0.5, 0.5).unwrap().symplectic_eigenvalues().unwrap();
        assert!((p - 2.0).abs() < 1e-14 && (m - 2.0).abs() < 1e-14);
        let tb = twin_beam(2.0);
        assert!((tb.det() - 1.0).abs() < 1e-9);
        let (p, m) = tb.symplectic_eigenvalues().unwrap();
        assert!((p - 1.0).abs() < 1e-6 && (m - 1.0).abs() < 1e-6, "{p} {m}");
    }

    #[test]
    fn twin_beam_values() {
        assert_eq!(twin_beam(0.0), CovarianceMatrix::identity());
        let tb = twin_beam(2.0);
        assert!((tb.get(0, 0) - 27.308_232_836_016_487).abs() < 1e-10);
        assert!((tb.get(0, 2) - 27.289_917_197_127_753).abs() < 1e-10);
        assert_eq!(tb.get(1, 3), -tb.get(0, 2));
    }

    #[test]
    fn ppt_matches_brute_force_partial_transpose() {
        for r in [0.5, 1.0, 2.0] {
            let tb = twin_beam(r);
            let closed = tb.ppt_min_eigenvalue().unwrap();
            let (_, brute) = brute_force_symplectic(tb.partial_transpose().matrix());
            assert!((closed - (-2.0 * r).exp()).abs() < 1e-9, "r = {r}: {closed}");
            assert!((brute - (-2.0 * r).exp()).abs() < 1e-9, "r = {r}: {brute}");
        }
        assert_eq!(CovarianceMatrix::identity().ppt_min_eigenvalue().unwrap(), 1.0);
        let th = thermal_state(0.3, 0.7).unwrap();
        assert!((th.ppt_min_eigenvalue().unwrap() - 1.6).abs() < 1e-14);
    }

    #[test]
    fn separability_examples() {
        assert_eq!(CovarianceMatrix::identity().classify_separability().unwrap(), Separability::Separable);
        assert_eq!(twin_beam(1.0).classify_separability().unwrap(), Separability::Entangled);
        assert_eq!(thermal_state(0.3, 0.7).unwrap().classify_separability().unwrap(), Separability::Separable);
    }

    #[test]
    fn from_simon_examples() {
        assert_eq!(SimonInvariants::new(1.0, 1.0, 0.0, 0.0).to_covariance().unwrap(), CovarianceMatrix::identity());
        let (c4, s4) = (4f64.cosh(), 4f64.sinh());
        let tb = SimonInvariants::new(c4, c4, s4, -s4).to_covariance().unwrap();
        assert!((tb.matrix() - twin_beam(2.0).matrix()).amax() < 1e-12);
        // det σ = (4 − 3.61)² = 0.1521
        let bad = SimonInvariants::new(2.0, 2.0, 1.9, 1.9);
        assert!((bad.det() - 0.1521).abs() < 1e-12);
        match bad.to_covariance() {
            Err(Error::Domain(msg)) => assert!(msg.contains("det σ"), "{msg}"),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn standard_form_round_trip() {
        let inv = SimonInvariants::new(2.5, 1.7, 1.1, -0.9);
        let sigma = inv.to_covariance().unwrap();
        assert_eq!(SimonInvariants::from_standard_form(&sigma).unwrap(), inv);
        assert!(SimonInvariants::from_standard_form(&rotate(&sigma, 0.3, 0.0).unwrap()).is_err());
    }

    #[test]
    fn thermal_examples() {
        assert_eq!(thermal_state(0.0, 0.0).unwrap(), CovarianceMatrix::identity());
        assert_eq!(thermal_state(0.1, 0.1).unwrap(), diag([1.2; 4]));
        assert_eq!(thermal_state(0.5, 1.0).unwrap(), diag([2.0, 2.0, 3.0, 3.0]));
        assert!(matches!(thermal_state(-0.1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn local_squeeze_examples() {
        let id = CovarianceMatrix::identity();
        assert_eq!(local_squeeze(&id, 0.0, 0.0).unwrap(), id);
        let sq = local_squeeze(&id, 2.0, -2.0).unwrap();
        let expect = diag([4f64.exp(), (-4f64).exp(), (-4f64).exp(), 4f64.exp()]);
        assert!((sq.matrix() - expect.matrix()).amax() < 1e-12);
        assert!(local_squeeze(&diag([0.5; 4]), 1.0, 1.0).is_err());
    }

    #[test]
    fn product_ppt_is_min_local() {
        let s = SimonInvariants::new(3.0, 1.4, 0.0, 0.0).to_covariance().unwrap();
        let s = rotate(&local_squeeze(&s, 0.4, -0.7).unwrap(), 0.2, 1.1).unwrap();
        let nu_a = s.local_symplectic_eigenvalue(Mode::A);
        let nu_b = s.local_symplectic_eigenvalue(Mode::B);
        assert!((s.ppt_min_eigenvalue().unwrap() - nu_a.min(nu_b)).abs() < 1e-12);
    }

    #[test]
    fn brute_force_agrees_on_generic_state() {
        let s = SimonInvariants::new(2.2, 3.1, 1.3, -0.8).to_covariance().unwrap();
        let s = rotate(&local_squeeze(&s, 0.3, 0.5).unwrap(), 0.7, -0.4).unwrap();
        let (p, m) = s.symplectic_eigenvalues().unwrap();
        let (bp, bm) = brute_force_symplectic(s.matrix());
        assert!((p - bp).abs() < 1e-10 * p && (m - bm).abs() < 1e-10 * m);
    }
}
