use std::io::Write;

use gaussthermo_core::dynamics::solve_steady;
use gaussthermo_core::gaussian::TOL_CLASS;
use gaussthermo_core::geometry::riemannian_speed;
use gaussthermo_core::metrology::{qfi_scan, TemperaturePoint};
use gaussthermo_core::sampler::{classify_region, delta_bounds, sample_states, speed_lower_bound, speed_scan, BoundSearch};
use gaussthermo_core::{
    BathShift, CovarianceMatrix, Error, Propagator, PurityTriple, RouthHurwitz, SeedSpec, Separability,
};
use log::{info, warn};

use crate::config::{RunConfig, SpacingKind, StateKind};
use crate::csv::{float, opt_float, sigma_columns, CsvWriter};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SpeedScan,
    QfiScan,
    SteadyState,
    Propagate,
    SampleStates,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SpeedScan => "speed-scan",
            Command::QfiScan => "qfi-scan",
            Command::SteadyState => "steady-state",
            Command::Propagate => "propagate",
            Command::SampleStates => "sample-states",
        }
    }
}

/// Validates `cfg`, runs `cmd` and writes its CSV to `cfg.out` or standard output.
pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    match &cfg.out {
        Some(path) => {
            // Build in memory first so a failed run never leaves a partial file.
            let mut buf = Vec::new();
            let result = run(cmd, cfg, &mut buf);
            if result.is_ok() || !buf.is_empty() {
                std::fs::write(path, &buf).map_err(|e| CliError::io(path, e))?;
            }
            result
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run(cmd, cfg, &mut lock)
        }
    }
}

pub fn run<W: Write>(cmd: Command, cfg: &RunConfig, out: W) -> Result<(), CliError> {
    info!("running {} with {cfg:?}", cmd.name());
    match cmd {
        Command::SpeedScan => run_speed_scan(cfg, out),
        Command::QfiScan => run_qfi_scan(cfg, out),
        Command::SteadyState => run_steady_state(cfg, out),
        Command::Propagate => run_propagate(cfg, out),
        Command::SampleStates => run_sample_states(cfg, out),
    }
}

fn sigma_fields(s: &CovarianceMatrix) -> Vec<String> {
    (0..4).flat_map(|i| (0..4).map(move |j| float(s.get(i, j)))).collect()
}

fn header(fixed: &[&str], with_sigma: bool, tail: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    if with_sigma {
        h.extend(sigma_columns());
    }
    h.extend(tail.iter().map(|s| s.to_string()));
    h
}

fn start<W: Write>(out: W, cmd: Command, cfg: &RunConfig, extra: &[(&str, String)], header: &[String]) -> Result<CsvWriter<W>, CliError> {
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(CsvWriter::start(out, cmd.name(), cfg, extra, &h)?)
}

pub const SPEED_COLUMNS: [&str; 11] =
    ["kind", "index", "mu1", "mu2", "mu", "delta", "nu_tilde_minus", "region", "classification", "v_squared", "excluded"];

/// Sample rows in index order, then the GMEMS lower-bound curve over
/// `[min entangled ν̃₋, 1]`.
pub fn run_speed_scan<W: Write>(cfg: &RunConfig, out: W) -> Result<(), CliError> {
    let p = cfg.params();
    let search = BoundSearch::default();
    let scan = speed_scan(SeedSpec { seed: cfg.seed, count: cfg.samples }, &p, cfg.epsilon)?;
    let entangled: Vec<f64> = scan
        .iter()
        .filter(|(_, s)| s.classification == Separability::Entangled)
        .map(|(_, s)| s.nu_tilde_minus)
        .collect();
    let excluded = scan.iter().filter(|(_, s)| s.excluded()).count();
    if excluded > 0 {
        warn!("{excluded} samples excluded: metric singular at ε = {}", cfg.epsilon);
    }
    let bound = match entangled.iter().copied().reduce(f64::min) {
        Some(lo) => {
            let n = cfg.bound_points;
            let grid: Vec<f64> = (0..n).map(|i| lo + (1.0 - lo) * i as f64 / (n - 1) as f64).collect();
            speed_lower_bound(&grid, &p, cfg.epsilon, &search)?.into_iter().zip(grid).collect()
        }
        None => Vec::new(),
    };
    let extra = [
        ("entangled_samples", entangled.len().to_string()),
        ("excluded_samples", excluded.to_string()),
        ("bound_search_grid", search.grid.to_string()),
        ("bound_search_min_purity", float(search.min_purity)),
        ("bound_search_min_step", float(search.min_step)),
    ];
    let mut w = start(out, Command::SpeedScan, cfg, &extra, &header(&SPEED_COLUMNS, false, &[]))?;
    for (state, speed) in &scan {
        let t = state.triple;
        w.row(&[
            "sample".to_string(),
            state.index.to_string(),
            float(t.mu1),
            float(t.mu2),
            float(t.mu),
            float(t.delta),
            float(speed.nu_tilde_minus),
            state.region.to_string(),
            speed.classification.as_str().to_string(),
            opt_float(speed.v_squared),
            speed.excluded().to_string(),
        ])?;
    }
    for (i, (point, target)) in bound.iter().enumerate() {
        let class = if *target < 1.0 - TOL_CLASS { Separability::Entangled } else { Separability::Separable };
        let (fields, excluded) = match point {
            Some(b) => {
                let delta = delta_bounds(b.mu1, b.mu2, b.mu).0;
                let region = classify_region(&PurityTriple::new(b.mu1, b.mu2, b.mu, delta));
                ([float(b.mu1), float(b.mu2), float(b.mu), float(delta)], Some((region, b.v_squared)))
            }
            None => (Default::default(), None),
        };
        let [mu1, mu2, mu, delta] = fields;
        w.row(&[
            "bound".to_string(),
            i.to_string(),
            mu1,
            mu2,
            mu,
            delta,
            float(*target),
            excluded.map(|(r, _)| r.to_string()).unwrap_or_default(),
            class.as_str().to_string(),
            opt_float(excluded.map(|(_, v)| v)),
            excluded.is_none().to_string(),
        ])?;
    }
    w.finish()?;
    Ok(())
}

pub const QFI_COLUMNS: [&str; 4] = ["family", "t", "q_m", "q_t"];

/// `Q_M(t)` and `Q_T(t)` for the requested family, or all three built-in ones.
pub fn run_qfi_scan<W: Write>(cfg: &RunConfig, out: W) -> Result<(), CliError> {
    let p = cfg.params();
    let shift: BathShift = cfg.bath_shift.into();
    let grid = cfg.grid(SpacingKind::Log)?;
    let families: Vec<StateKind> = match cfg.state {
        Some(s) => vec![s],
        None => StateKind::BUILT_IN.to_vec(),
    };
    let lower = shift.occupation(&p) - 0.5 * cfg.dm;
    if lower < 0.0 {
        return Err(CliError::Config(format!("dm = {}: occupation minus dm/2 is negative ({lower})", cfg.dm)));
    }
    let temp = TemperaturePoint::from_occupation(shift.omega(&p), shift.occupation(&p))
        .map_err(|e| CliError::Config(format!("bath occupation: {e}")))?;
    let mut results = Vec::with_capacity(families.len());
    for kind in &families {
        let sigma0 = cfg.initial_state(*kind)?;
        results.push((*kind, qfi_scan(&sigma0, &p, &grid, cfg.dm, shift)?));
    }
    let extra = [("temperature", float(temp.temperature)), ("temperature_omega", float(temp.omega))];
    let mut w = start(out, Command::QfiScan, cfg, &extra, &header(&QFI_COLUMNS, false, &[]))?;
    for (kind, points) in &results {
        for q in points {
            w.row(&[kind.as_str().to_string(), float(q.t), float(q.q_m), float(q.q_t)])?;
        }
    }
    w.finish()?;
    Ok(())
}

const STEADY_TAIL: [&str; 7] =
    ["nu_plus", "nu_minus", "nu_tilde_minus", "purity", "spectral_abscissa", "routh_hurwitz", "detail"];

/// One row: the steady state and its invariants, or an `unstable` row with the
/// stability verdict (and a numerical-error exit).
pub fn run_steady_state<W: Write>(cfg: &RunConfig, out: W) -> Result<(), CliError> {
    let p = cfg.params();
    let (a, d) = (p.drift(), p.diffusion());
    let abscissa = a.spectral_abscissa();
    let rh = RouthHurwitz::new(&a);
    let verdict = if rh.is_stable() { "stable" } else { "unstable" };
    let mut w = start(out, Command::SteadyState, cfg, &[], &header(&["status"], true, &STEADY_TAIL))?;
    if !a.is_stable() {
        let minors: Vec<String> = rh.minors.iter().map(|m| format!("{m:e}")).collect();
        let detail = format!("Hurwitz minors [{}]", minors.join(" "));
        let mut row = vec!["unstable".to_string()];
        row.extend(std::iter::repeat_n(String::new(), 16 + 4));
        row.extend([float(abscissa), verdict.to_string(), detail]);
        w.row(&row)?;
        w.finish()?;
        return Err(Error::Unstable { max_real_part: abscissa }.into());
    }
    let s = solve_steady(&a, &d)?;
    let (plus, minus) = s.symplectic_eigenvalues()?;
    let mut row = vec!["ok".to_string()];
    row.extend(sigma_fields(&s));
    row.extend([
        float(plus),
        float(minus),
        float(s.ppt_min_eigenvalue()?),
        float(s.purity()),
        float(abscissa),
        verdict.to_string(),
        String::new(),
    ]);
    w.row(&row)?;
    w.finish()?;
    Ok(())
}

const PROPAGATE_TAIL: [&str; 5] = ["nu_plus", "nu_minus", "nu_tilde_minus", "purity", "v_squared"];

/// The trajectory from the configured initial state with its invariants and speed.
pub fn run_propagate<W: Write>(cfg: &RunConfig, out: W) -> Result<(), CliError> {
    let p = cfg.params();
    let kind = cfg.state.unwrap_or(StateKind::Thermal);
    let sigma0 = cfg.initial_state(kind)?;
    let grid = cfg.grid(SpacingKind::Linear)?;
    let prop = Propagator::from_params(&p)?;
    let traj = prop.trajectory(&sigma0, &grid)?;
    let mut w = start(
        out,
        Command::Propagate,
        cfg,
        &[("initial_state", kind.as_str().to_string())],
        &header(&["t"], true, &PROPAGATE_TAIL),
    )?;
    for (t, s) in traj.iter() {
        let (plus, minus) = s.symplectic_eigenvalues()?;
        let speed = match riemannian_speed(s, &prop.rate(s)) {
            Ok(v) => Some(v),
            Err(Error::SingularMetric { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let mut row = vec![float(t)];
        row.extend(sigma_fields(s));
        row.extend([float(plus), float(minus), float(s.ppt_min_eigenvalue()?), float(s.purity()), opt_float(speed)]);
        w.row(&row)?;
    }
    w.finish()?;
    Ok(())
}

const SAMPLE_HEAD: [&str; 8] = ["index", "mu1", "mu2", "mu", "delta", "region", "nu_tilde_minus", "classification"];

pub fn run_sample_states<W: Write>(cfg: &RunConfig, out: W) -> Result<(), CliError> {
    let states = sample_states(SeedSpec { seed: cfg.seed, count: cfg.samples })?;
    let mut w = start(out, Command::SampleStates, cfg, &[], &header(&SAMPLE_HEAD, true, &[]))?;
    for s in &states {
        let t = s.triple;
        let mut row = vec![
            s.index.to_string(),
            float(t.mu1),
            float(t.mu2),
            float(t.mu),
            float(t.delta),
            s.region.to_string(),
            float(s.sigma.ppt_min_eigenvalue()?),
            s.sigma.classify_separability()?.as_str().to_string(),
        ];
        row.extend(sigma_fields(&s.sigma));
        w.row(&row)?;
    }
    w.finish()?;
    Ok(())
}
