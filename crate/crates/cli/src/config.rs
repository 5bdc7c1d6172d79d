//! Run configuration: one strict schema shared by the config file, the
//! command-line flags and the manifest written after every run.
//!
//! All rates and frequencies are in units of Γ, times in 1/Γ, positions in
//! units of the lattice spacing d. Angles are strings such as `"0.2pi"`.
//!
//! ```toml
//! out_dir = "results"
//! workers = 4
//!
//! [system]
//! n = 7
//! j0 = 2.2
//! phi = "0.2pi"
//! gamma_f = 0.013
//!
//! [scatter]
//! delta = { min = -6.0, max = 6.0, count = 1201 }
//! direction = "left"
//!
//! [sweep]
//! observables = ["T", "R", "eta"]
//! axes = [{ param = "Gamma_f", min = -0.05, max = 0.05, count = 401, spacing = "signed-log" }]
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use taa_core::{Axis, Direction, IntensityMode, Observable, PulseSpec, Solver, SweepSpec, SystemParams};

use crate::error::{CliError, CliResult};

/// Inclusive, evenly spaced grid; `count = 1` is the single value `min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Grid { min: x, max: x, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|k| self.min + (self.max - self.min) * k as f64 / (self.count - 1) as f64)
            .collect()
    }

    pub fn problems(&self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        if self.count == 0 {
            out.push(format!("{name}: count must be at least 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            out.push(format!("{name}: bounds must be finite"));
        } else if self.count > 1 && self.min > self.max {
            out.push(format!("{name}: min {} exceeds max {}", self.min, self.max));
        }
        out
    }
}

/// `x` for a single value or `min:max:count` for a range.
impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number in grid `{s}`"));
        match parts.as_slice() {
            [x] => Ok(Grid::single(num(x)?)),
            [a, b, n] => Ok(Grid {
                min: num(a)?,
                max: num(b)?,
                count: n.trim().parse().map_err(|_| format!("`{n}` is not a count in grid `{s}`"))?,
            }),
            _ => Err(format!("grid `{s}` must be `value` or `min:max:count`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterConfig {
    /// Detuning δ = ω − ω0.
    pub delta: Grid,
    pub direction: Direction,
    pub solver: Solver,
    /// Solve even within 1e-3·Γ_edge of the lasing threshold.
    pub allow_threshold: bool,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        ScatterConfig {
            delta: Grid::single(0.0),
            direction: Direction::Left,
            solver: Solver::Markovian,
            allow_threshold: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub pulse: PulseSpec,
    pub t_max: f64,
    /// Output sampling interval.
    pub dt: f64,
    /// Field sampling positions; defaults to two sites beyond each end, 20 points per d.
    pub x: Option<Grid>,
    pub intensity: IntensityMode,
    /// Window `[t0, t1]` for the post-pulse decay fit; omitted means no fit.
    pub fit_window: Option<[f64; 2]>,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            pulse: PulseSpec::default(),
            t_max: 400.0,
            dt: 0.5,
            x: None,
            intensity: IntensityMode::default(),
            fit_window: None,
        }
    }
}

impl DynamicsConfig {
    pub fn x_grid(&self, n: usize) -> Grid {
        self.x.unwrap_or(Grid {
            min: -2.0,
            max: n as f64 + 1.0,
            count: 20 * (n + 3) + 1,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
    pub delta: f64,
    pub observables: Vec<Observable>,
    pub direction: Direction,
    pub solver: Solver,
    pub allow_threshold: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axes: Vec::new(),
            delta: 0.0,
            observables: vec![Observable::T, Observable::R, Observable::Eta],
            direction: Direction::Left,
            solver: Solver::Markovian,
            allow_threshold: false,
        }
    }
}

impl SweepConfig {
    pub fn spec(&self, base: &SystemParams) -> SweepSpec {
        SweepSpec {
            axes: self.axes.clone(),
            base: base.clone(),
            delta: self.delta,
            observables: self.observables.clone(),
            direction: self.direction,
            solver: self.solver,
            allow_threshold: self.allow_threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalConfig {
    /// Γ_f grid in units of Γ_edge (non-negative; χ is evaluated at ±Γ_f).
    pub gamma_f_over_edge: Grid,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        CriticalConfig {
            gamma_f_over_edge: Grid {
                min: 0.0,
                max: 0.9,
                count: 91,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiguresConfig {
    /// Overrides the number of points along every figure axis.
    pub points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestConfig {
    pub draws: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { draws: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemParams,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Seed for the randomized self-test; the solvers are deterministic.
    pub seed: u64,
    pub scatter: ScatterConfig,
    pub dynamics: DynamicsConfig,
    pub sweep: SweepConfig,
    pub critical: CriticalConfig,
    pub figures: FiguresConfig,
    pub selftest: SelftestConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: SystemParams::default(),
            out_dir: None,
            workers: None,
            seed: 20_240_611,
            scatter: ScatterConfig::default(),
            dynamics: DynamicsConfig::default(),
            sweep: SweepConfig::default(),
            critical: CriticalConfig::default(),
            figures: FiguresConfig::default(),
            selftest: SelftestConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads a TOML config, or a JSON run manifest (its `config` member), so
    /// that any run can be repeated from its manifest.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(vec![format!("cannot read config {}: {e}", path.display())]))?;
        let bad = |e: String| CliError::Config(vec![format!("{}: {e}", path.display())]);
        if path.extension().is_some_and(|e| e == "json") {
            let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
            serde_json::from_value(value).map_err(|e| bad(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| bad(e.to_string()))
        }
    }

    /// Output directory: explicit setting, then `TAA_OUT_DIR`, then `taa-out`.
    pub fn resolve_out_dir(&mut self) {
        if self.out_dir.is_none() {
            let dir = std::env::var_os("TAA_OUT_DIR")
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("taa-out"));
            self.out_dir = Some(dir);
        }
    }

    pub fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().unwrap_or(Path::new("taa-out"))
    }

    pub fn common_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(taa_core::Error::InvalidParams(p)) = self.system.validate() {
            out.extend(p);
        }
        if self.workers == Some(0) {
            out.push("workers must be at least 1".to_string());
        }
        out
    }
}

pub fn check(problems: Vec<String>) -> CliResult<()> {
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Config(problems))
    }
}
