//! Random two-mode Gaussian states in standard form, drawn through their
//! purity invariants `(μ₁, μ₂, μ, Δ)`, plus the maximally entangled family at
//! fixed purities (GMEMS) used to build the lower envelope of initial speeds.
//!
//! Sampling measure: `μ₁, μ₂ ~ U(0, 1]`, then `μ` uniform on its admissible
//! interval, then `Δ` uniform on its admissible interval. Each sample owns a
//! ChaCha8 stream selected by its index, so results do not depend on how
//! samples are scheduled across threads.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{Propagator, SystemParams};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, SimonInvariants};
use crate::geometry::{initial_speed_with, SpeedSample};

/// Tolerance on the invariant inequalities.
const TOL_INV: f64 = 1e-12;
/// Default number of samples per scan panel.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Marginal purities, global purity and seralian of a two-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityTriple {
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub delta: f64,
}

/// Admissible `μ` for given marginals: `[μ₁μ₂, μ₁μ₂/(μ₁μ₂ + |μ₁ − μ₂|)]`.
pub fn mu_bounds(mu1: f64, mu2: f64) -> (f64, f64) {
    let p = mu1 * mu2;
    (p, p / (p + (mu1 - mu2).abs()))
}

/// Admissible `Δ`: `[2/μ + (a−b)², min{(a+b)² − 2/μ, 1 + 1/μ²}]` with `a = 1/μ₁`, `b = 1/μ₂`.
pub fn delta_bounds(mu1: f64, mu2: f64, mu: f64) -> (f64, f64) {
    let (a, b) = (1.0 / mu1, 1.0 / mu2);
    let lo = 2.0 / mu + (a - b) * (a - b);
    let hi = ((a + b) * (a + b) - 2.0 / mu).min(1.0 + 1.0 / (mu * mu));
    (lo, hi)
}

impl PurityTriple {
    pub fn new(mu1: f64, mu2: f64, mu: f64, delta: f64) -> Self {
        Self { mu1, mu2, mu, delta }
    }

    /// Invariants of an arbitrary covariance matrix.
    pub fn of(sigma: &CovarianceMatrix) -> Self {
        let (mu1, mu2, mu, delta) = sigma.purity_invariants();
        Self { mu1, mu2, mu, delta }
    }

    /// Checks every admissibility inequality, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let Self { mu1, mu2, mu, delta } = *self;
        if ![mu1, mu2, mu, delta].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("purity invariants must be finite".into()));
        }
        if !(mu1 > 0.0 && mu1 <= 1.0 + TOL_INV) || !(mu2 > 0.0 && mu2 <= 1.0 + TOL_INV) {
            return Err(Error::Domain(format!("marginal purities must lie in (0, 1] (μ₁ = {mu1}, μ₂ = {mu2})")));
        }
        let (lo, hi) = mu_bounds(mu1, mu2);
        if mu < lo * (1.0 - TOL_INV) {
            return Err(Error::Domain(format!("μ ≥ μ₁μ₂ violated (μ = {mu}, μ₁μ₂ = {lo})")));
        }
        if mu > hi * (1.0 + TOL_INV) {
            return Err(Error::Domain(format!("μ ≤ μ₁μ₂/(μ₁μ₂ + |μ₁ − μ₂|) violated (μ = {mu}, bound = {hi})")));
        }
        let (dlo, dhi) = delta_bounds(mu1, mu2, mu);
        let tol = TOL_INV * dlo.abs().max(dhi.abs()).max(1.0);
        if delta < dlo - tol {
            return Err(Error::Domain(format!("Δ ≥ 2/μ + (μ₁ − μ₂)²/μ₁²μ₂² violated (Δ = {delta}, bound = {dlo})")));
        }
        if delta > dhi + tol {
            return Err(Error::Domain(format!(
                "Δ ≤ min{{(μ₁ + μ₂)²/μ₁²μ₂² − 2/μ, 1 + 1/μ²}} violated (Δ = {delta}, bound = {dhi})"
            )));
        }
        Ok(())
    }
}

/// Draws one admissible triple from the nested uniform measure.
pub fn sample_invariants<R: Rng + ?Sized>(rng: &mut R) -> PurityTriple {
    loop {
        // 1 − U[0, 1) lies in (0, 1].
        let mu1 = 1.0 - rng.random::<f64>();
        let mu2 = 1.0 - rng.random::<f64>();
        let (lo, hi) = mu_bounds(mu1, mu2);
        let mu = lo + (hi - lo) * rng.random::<f64>();
        let (dlo, dhi) = delta_bounds(mu1, mu2, mu);
        if !(dhi >= dlo) {
            continue;
        }
        let delta = dlo + (dhi - dlo) * rng.random::<f64>();
        return PurityTriple { mu1, mu2, mu, delta };
    }
}

/// Standard-form covariance with the given invariants,
/// `c± = (√(μ₁μ₂)/4)(η₋ ∓ η₊)`, oriented so that `c₊ ≥ 0`.
pub fn realize_state(triple: &PurityTriple) -> Result<CovarianceMatrix> {
    realize_invariants(triple)?.to_covariance()
}

fn realize_invariants(triple: &PurityTriple) -> Result<SimonInvariants> {
    triple.validate()?;
    let PurityTriple { mu1, mu2, mu, delta } = *triple;
    let (a, b) = (1.0 / mu1, 1.0 / mu2);
    let scale = (delta.abs() + (a + b) * (a + b)).powi(2);
    let radical = |x: f64| -> Result<f64> {
        let r = x * x - 4.0 / (mu * mu);
        if r < -1e-12 * scale {
            return Err(Error::Domain(format!("negative radicand {r:e} in standard-form coefficients")));
        }
        Ok(r.max(0.0).sqrt())
    };
    let eta_minus = radical(delta - (a - b) * (a - b))?;
    let eta_plus = radical(delta - (a + b) * (a + b))?;
    let pref = (mu1 * mu2).sqrt() / 4.0;
    let mut c_plus = pref * (eta_minus - eta_plus);
    let mut c_minus = pref * (eta_minus + eta_plus);
    if c_plus < 0.0 {
        c_plus = -c_plus;
        c_minus = -c_minus;
    }
    Ok(SimonInvariants::new(a, b, c_plus, c_minus))
}

/// Separability region of a triple, from the purity inequalities alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Unphysical,
    Separable,
    /// Both separable and entangled states occur.
    Coexistence,
    Entangled,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Unphysical => "unphysical",
            Region::Separable => "separable",
            Region::Coexistence => "coexistence",
            Region::Entangled => "entangled",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_region(triple: &PurityTriple) -> Region {
    let PurityTriple { mu1, mu2, mu, .. } = *triple;
    if !(mu1 > 0.0 && mu1 <= 1.0 && mu2 > 0.0 && mu2 <= 1.0) {
        return Region::Unphysical;
    }
    let (lo, hi) = mu_bounds(mu1, mu2);
    let p = mu1 * mu2;
    if mu < lo || mu > hi {
        Region::Unphysical
    } else if mu <= p / (mu1 + mu2 - p) {
        Region::Separable
    } else if mu <= p / (mu1 * mu1 + mu2 * mu2 - p * p).sqrt() {
        Region::Coexistence
    } else {
        Region::Entangled
    }
}

fn gmems_invariants(mu1: f64, mu2: f64, mu: f64) -> Result<SimonInvariants> {
    if !(mu1 > 0.0 && mu1 <= 1.0) || !(mu2 > 0.0 && mu2 <= 1.0) || !(mu > 0.0) {
        return Err(Error::Domain(format!("purities out of range (μ₁ = {mu1}, μ₂ = {mu2}, μ = {mu})")));
    }
    let (a, b) = (1.0 / mu1, 1.0 / mu2);
    let radicand = a * b - 1.0 / mu;
    if radicand < -TOL_INV * a * b {
        return Err(Error::Domain(format!("GMEMS needs μ ≥ μ₁μ₂ (μ = {mu}, μ₁μ₂ = {})", mu1 * mu2)));
    }
    let c = radicand.max(0.0).sqrt();
    Ok(SimonInvariants::new(a, b, c, -c))
}

/// Maximally entangled state at fixed purities: `c₊ = −c₋ = √(1/μ₁μ₂ − 1/μ)`.
pub fn gmems(mu1: f64, mu2: f64, mu: f64) -> Result<CovarianceMatrix> {
    gmems_invariants(mu1, mu2, mu)?.to_covariance()
}

/// `ν̃₋` of the GMEMS with the given purities, in closed form.
fn gmems_nu_tilde(mu1: f64, mu2: f64, mu: f64) -> f64 {
    let (a, b) = (1.0 / mu1, 1.0 / mu2);
    let delta_pt = (a + b) * (a + b) - 2.0 / mu;
    let det = 1.0 / (mu * mu);
    (2.0 * det / (delta_pt + (delta_pt * delta_pt - 4.0 * det).max(0.0).sqrt())).sqrt()
}

/// Reproducible sample stream: `count` samples derived from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub seed: u64,
    pub count: usize,
}

/// Generator for sample `index`, independent of every other sample.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledState {
    pub index: usize,
    pub triple: PurityTriple,
    pub region: Region,
    pub sigma: CovarianceMatrix,
}

/// Draws and realises sample `index`; a joint sign flip of `(c₊, c₋)` is
/// applied with probability ½.
pub fn sample_state(seed: u64, index: usize) -> Result<SampledState> {
    let mut rng = sample_rng(seed, index as u64);
    let triple = sample_invariants(&mut rng);
    let mut inv = realize_invariants(&triple)?;
    if rng.random::<bool>() {
        inv.c_plus = -inv.c_plus;
        inv.c_minus = -inv.c_minus;
    }
    Ok(SampledState { index, triple, region: classify_region(&triple), sigma: inv.to_covariance()? })
}

pub fn sample_states(spec: SeedSpec) -> Result<Vec<SampledState>> {
    (0..spec.count).into_par_iter().map(|i| sample_state(spec.seed, i)).collect()
}

/// Samples states and evaluates `v_B²(ε)` for each, in index order.
pub fn speed_scan(spec: SeedSpec, p: &SystemParams, epsilon: f64) -> Result<Vec<(SampledState, SpeedSample)>> {
    let prop = Propagator::from_params(p)?;
    (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let state = sample_state(spec.seed, i)?;
            let speed = initial_speed_with(&prop, &state.sigma, epsilon)?;
            Ok((state, speed))
        })
        .collect()
}

/// Minimal initial speed over GMEMS at one value of `ν̃₋`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub nu_tilde_minus: f64,
    pub v_squared: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
}

/// Search resolution for [`speed_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSearch {
    /// Points per axis of the coarse `(μ₁, μ₂)` grid.
    pub grid: usize,
    /// Smallest marginal purity explored.
    pub min_purity: f64,
    /// Pattern-search refinement stops below this step (in purity units).
    pub min_step: f64,
}

impl Default for BoundSearch {
    fn default() -> Self {
        Self { grid: 24, min_purity: 1e-3, min_step: 1e-7 }
    }
}

/// Finds `μ` with `ν̃₋(GMEMS(μ₁, μ₂, μ)) = target` by bisection; `ν̃₋` is
/// decreasing in `μ` on `[μ₁μ₂, μ_max]`.
fn gmems_mu_for_target(mu1: f64, mu2: f64, target: f64) -> Option<f64> {
    let (mut lo, mut hi) = mu_bounds(mu1, mu2);
    if gmems_nu_tilde(mu1, mu2, lo) < target || gmems_nu_tilde(mu1, mu2, hi) > target {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gmems_nu_tilde(mu1, mu2, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

struct BoundObjective<'a> {
    prop: &'a Propagator,
    epsilon: f64,
    target: f64,
}

impl BoundObjective<'_> {
    fn eval(&self, mu1: f64, mu2: f64) -> Option<(f64, f64)> {
        if !(mu1 > 0.0 && mu1 <= 1.0 && mu2 > 0.0 && mu2 <= 1.0) {
            return None;
        }
        let mu = gmems_mu_for_target(mu1, mu2, self.target)?;
        let sigma = gmems(mu1, mu2, mu).ok()?;
        let sample = initial_speed_with(self.prop, &sigma, self.epsilon).ok()?;
        sample.v_squared.map(|v| (v, mu))
    }
}

/// Lower envelope of `v_B²(ε)` over GMEMS constrained to each `ν̃₋` in
/// `nu_grid`, by a coarse grid over `(μ₁, μ₂)` refined with pattern search.
/// Entries are `None` where no admissible GMEMS reaches the target.
pub fn speed_lower_bound(
    nu_grid: &[f64],
    p: &SystemParams,
    epsilon: f64,
    search: &BoundSearch,
) -> Result<Vec<Option<BoundPoint>>> {
    let prop = Propagator::from_params(p)?;
    if let Some(bad) = nu_grid.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
        return Err(Error::Domain(format!("ν̃₋ grid values must lie in (0, 1], got {bad}")));
    }
    if search.grid < 2 {
        return Err(Error::Domain("bound search grid needs at least 2 points per axis".into()));
    }
    Ok(nu_grid
        .par_iter()
        .map(|&target| bound_at(&BoundObjective { prop: &prop, epsilon, target }, search))
        .collect())
}

fn bound_at(obj: &BoundObjective<'_>, search: &BoundSearch) -> Option<BoundPoint> {
    // Log-spaced marginal purities: the interesting structure sits near both ends.
    let axis: Vec<f64> = (0..search.grid)
        .map(|i| (search.min_purity.ln() * (1.0 - i as f64 / (search.grid - 1) as f64)).exp())
        .collect();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for &m1 in &axis {
        for &m2 in &axis {
            if let Some((v, mu)) = obj.eval(m1, m2) {
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, m1, m2, mu));
                }
            }
        }
    }
    let (mut v, mut m1, mut m2, mut mu) = best?;
    // Compass search in (ln μ₁, ln μ₂).
    let mut step = (1.0 / search.min_purity).ln() / (search.grid - 1) as f64;
    let dirs = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)];
    while step > search.min_step {
        let mut improved = false;
        for (d1, d2) in dirs {
            let c1 = (m1.ln() + d1 * step).exp().min(1.0);
            let c2 = (m2.ln() + d2 * step).exp().min(1.0);
            if let Some((cv, cmu)) = obj.eval(c1, c2) {
                if cv < v {
                    (v, m1, m2, mu) = (cv, c1, c2, cmu);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Some(BoundPoint { nu_tilde_minus: obj.target, v_squared: v, mu1: m1, mu2: m2, mu })
}
