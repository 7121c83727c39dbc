//! Run configuration: built-in defaults, then an optional JSON file, then
//! command-line flags, each layer overriding the previous one.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gaussthermo_core::gaussian::{local_squeeze, thermal_state, twin_beam};
use gaussthermo_core::{BathShift, CovarianceMatrix, Spacing, SystemParams, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Thermal,
    LocalSqueeze,
    TwinBeam,
    File,
}

impl StateKind {
    pub const BUILT_IN: [StateKind; 3] = [StateKind::Thermal, StateKind::LocalSqueeze, StateKind::TwinBeam];

    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Thermal => "thermal",
            StateKind::LocalSqueeze => "local-squeeze",
            StateKind::TwinBeam => "twin-beam",
            StateKind::File => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SpacingKind {
    Linear,
    Log,
}

impl From<SpacingKind> for Spacing {
    fn from(s: SpacingKind) -> Self {
        match s {
            SpacingKind::Linear => Spacing::Linear,
            SpacingKind::Log => Spacing::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    Both,
    A,
    B,
}

impl From<ShiftKind> for BathShift {
    fn from(s: ShiftKind) -> Self {
        match s {
            ShiftKind::Both => BathShift::Both,
            ShiftKind::A => BathShift::A,
            ShiftKind::B => BathShift::B,
        }
    }
}

/// Every knob of every subcommand. Unused fields are ignored by commands
/// that do not need them but are still echoed into the output metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega_a: f64,
    pub omega_b: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub gn: f64,
    pub m_a: f64,
    pub m_b: f64,
    pub epsilon: f64,
    pub dm: f64,
    pub t_max: f64,
    pub n_points: usize,
    /// `None` lets each command pick (log for QFI scans, linear otherwise).
    pub spacing: Option<SpacingKind>,
    pub seed: u64,
    pub samples: usize,
    pub bound_points: usize,
    /// `None` means all three built-in families for `qfi-scan` and thermal elsewhere.
    pub state: Option<StateKind>,
    /// Initial thermal occupations `M̄_a`, `M̄_b`.
    pub nbar_a: f64,
    pub nbar_b: f64,
    pub r: f64,
    pub r_a: f64,
    pub r_b: f64,
    pub state_file: Option<PathBuf>,
    pub bath_shift: ShiftKind,
    /// Where the CSV goes; not echoed, so identical runs are byte-identical wherever they are written.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        Self {
            omega_a: p.omega_a,
            omega_b: p.omega_b,
            k_a: p.k_a,
            k_b: p.k_b,
            gn: p.gn,
            m_a: p.m_a,
            m_b: p.m_b,
            epsilon: gaussthermo_core::geometry::DEFAULT_EPSILON,
            dm: gaussthermo_core::metrology::DEFAULT_DM,
            t_max: 100.0,
            n_points: 200,
            spacing: None,
            seed: 0,
            samples: gaussthermo_core::sampler::DEFAULT_SAMPLES,
            bound_points: 100,
            state: None,
            nbar_a: 0.1,
            nbar_b: 0.1,
            r: 2.0,
            r_a: 2.0,
            r_b: -2.0,
            state_file: None,
            bath_shift: ShiftKind::Both,
            out: None,
        }
    }
}

/// Flags shared by all subcommands; each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON configuration file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV (standard output if omitted)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long)]
    pub omega_b: Option<f64>,
    #[arg(long)]
    pub k_a: Option<f64>,
    #[arg(long)]
    pub k_b: Option<f64>,
    #[arg(long)]
    pub gn: Option<f64>,
    /// Bath occupation of mode a
    #[arg(long)]
    pub m_a: Option<f64>,
    /// Bath occupation of mode b
    #[arg(long)]
    pub m_b: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub dm: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingKind>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Points on the GMEMS lower-bound curve
    #[arg(long)]
    pub bound_points: Option<usize>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Initial thermal occupation of mode a
    #[arg(long)]
    pub nbar_a: Option<f64>,
    /// Initial thermal occupation of mode b
    #[arg(long)]
    pub nbar_b: Option<f64>,
    /// Two-mode squeezing parameter
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub r_a: Option<f64>,
    #[arg(long)]
    pub r_b: Option<f64>,
    /// Covariance matrix for `--state file`: 16 numbers, row-major
    #[arg(long, value_name = "PATH")]
    pub state_file: Option<PathBuf>,
    /// Which bath occupation is estimated
    #[arg(long, value_enum)]
    pub bath_shift: Option<ShiftKind>,
}

impl ConfigArgs {
    /// Defaults, overlaid with `--config`, overlaid with the remaining flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        overlay!(
            seed, omega_a, omega_b, k_a, k_b, gn, m_a, m_b, epsilon, dm, t_max, n_points, samples, bound_points, nbar_a,
            nbar_b, r, r_a, r_b, bath_shift
        );
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.spacing.is_some() {
            cfg.spacing = self.spacing;
        }
        if self.state.is_some() {
            cfg.state = self.state;
        }
        if self.state_file.is_some() {
            cfg.state_file = self.state_file.clone();
        }
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn field(name: &str, value: f64, ok: bool, what: &str) -> Result<(), CliError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} = {value}: must be {what}")))
    }
}

impl RunConfig {
    pub fn params(&self) -> SystemParams {
        SystemParams {
            omega_a: self.omega_a,
            omega_b: self.omega_b,
            gn: self.gn,
            k_a: self.k_a,
            k_b: self.k_b,
            m_a: self.m_a,
            m_b: self.m_b,
        }
    }

    /// Domain checks common to every command, reported by field name.
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("omega_a", self.omega_a), ("omega_b", self.omega_b), ("k_a", self.k_a), ("k_b", self.k_b)] {
            field(name, v, v > 0.0, "> 0")?;
        }
        for (name, v) in [("gn", self.gn), ("m_a", self.m_a), ("m_b", self.m_b), ("nbar_a", self.nbar_a), ("nbar_b", self.nbar_b)] {
            field(name, v, v >= 0.0, ">= 0")?;
        }
        field("epsilon", self.epsilon, self.epsilon > 0.0, "> 0")?;
        field("dm", self.dm, self.dm > 0.0, "> 0")?;
        field("t_max", self.t_max, self.t_max > 0.0, "> 0")?;
        for (name, v) in [("r", self.r), ("r_a", self.r_a), ("r_b", self.r_b)] {
            field(name, v, v.abs() <= 20.0, "finite with |r| <= 20")?;
        }
        if self.n_points == 0 {
            return Err(CliError::Config("n_points = 0: must be >= 1".into()));
        }
        if self.bound_points < 2 {
            return Err(CliError::Config(format!("bound_points = {}: must be >= 2", self.bound_points)));
        }
        if self.state == Some(StateKind::File) && self.state_file.is_none() {
            return Err(CliError::Config("state = file requires state_file".into()));
        }
        Ok(())
    }

    pub fn grid(&self, default: SpacingKind) -> Result<TimeGrid, CliError> {
        TimeGrid::build(self.t_max, self.n_points, self.spacing.unwrap_or(default).into())
            .map_err(|e| CliError::Config(format!("time grid: {e}")))
    }

    pub fn initial_state(&self, kind: StateKind) -> Result<CovarianceMatrix, CliError> {
        let built = match kind {
            StateKind::Thermal => thermal_state(self.nbar_a, self.nbar_b),
            StateKind::LocalSqueeze => local_squeeze(&CovarianceMatrix::identity(), self.r_a, self.r_b),
            StateKind::TwinBeam => Ok(twin_beam(self.r)),
            StateKind::File => {
                let path = self.state_file.as_deref().ok_or_else(|| CliError::Config("state = file requires state_file".into()))?;
                return read_state_file(path);
            }
        };
        built.map_err(|e| CliError::Config(format!("initial state {}: {e}", kind.as_str())))
    }
}

/// Reads 16 numbers (row-major) separated by whitespace or commas; `#` starts a comment.
pub fn read_state_file(path: &Path) -> Result<CovarianceMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |msg: String| CliError::Config(format!("state_file {}: {msg}", path.display()));
    let values = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| bad(format!("cannot parse {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let entries: [f64; 16] = values.try_into().map_err(|v: Vec<f64>| bad(format!("expected 16 numbers, found {}", v.len())))?;
    let sigma = CovarianceMatrix::from_row_slice(&entries).map_err(|e| bad(e.to_string()))?;
    sigma.ensure_physical().map_err(|e| bad(e.to_string()))?;
    Ok(sigma)
}
