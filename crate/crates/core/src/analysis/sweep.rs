use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::critical::{check_threshold, THRESHOLD_EXCLUSION};
use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::model::{build_effective_hamiltonian, SystemParams};
use crate::scattering::{channels_from_modes, scatter_exact, Direction, MarkovianSolver, ScatterResult, Solver};
use crate::spectral::{eigendecompose, ModeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisParam {
    #[serde(rename = "Gamma_f")]
    GammaF,
    /// In multiples of π.
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "J0")]
    J0,
    #[serde(rename = "delta")]
    Delta,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::GammaF => "Gamma_f",
            AxisParam::Phi => "phi",
            AxisParam::J0 => "J0",
            AxisParam::Delta => "delta",
        }
    }

    /// Column header; φ is reported as a multiple of π.
    pub fn column(self) -> &'static str {
        match self {
            AxisParam::Phi => "phi_over_pi",
            other => other.name(),
        }
    }
}

impl FromStr for AxisParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "Gamma_f" | "gamma_f" | "gamma-f" => Ok(AxisParam::GammaF),
            "phi" => Ok(AxisParam::Phi),
            "J0" | "j0" => Ok(AxisParam::J0),
            "delta" => Ok(AxisParam::Delta),
            other => Err(format!("unknown axis `{other}` (expected Gamma_f|phi|J0|delta)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
    /// Log-spaced magnitudes on each side of zero, down to `floor`.
    SignedLog,
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            "signed-log" | "signed_log" | "symlog" => Ok(Spacing::SignedLog),
            other => Err(format!("unknown spacing `{other}` (expected linear|log|signed-log)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Smallest magnitude of a signed-log axis (default `1e-3·max(|min|, |max|)`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
}

impl Axis {
    pub fn linear(param: AxisParam, min: f64, max: f64, count: usize) -> Self {
        Axis {
            param,
            min,
            max,
            count,
            spacing: Spacing::Linear,
            floor: None,
        }
    }

    pub fn with_spacing(self, spacing: Spacing) -> Self {
        Axis { spacing, ..self }
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let name = self.param.name();
        if self.count < 2 {
            out.push(format!("axis {name}: count must be at least 2, got {}", self.count));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min >= self.max {
            out.push(format!("axis {name}: need finite min < max, got [{}, {}]", self.min, self.max));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0 || self.max < 0.0) {
            out.push(format!("axis {name}: log spacing needs both ends of one sign"));
        }
        if let Some(f) = self.floor {
            if !(f > 0.0) {
                out.push(format!("axis {name}: floor must be positive, got {f}"));
            }
        }
        match self.param {
            AxisParam::Phi if self.min < 0.0 || self.max > 1.0 => {
                out.push(format!("axis phi: range must lie in [0, 1] (multiples of pi), got [{}, {}]", self.min, self.max))
            }
            AxisParam::J0 if self.min <= 0.0 => out.push(format!("axis J0: values must be positive, got min {}", self.min)),
            _ => {}
        }
        out
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let lin = |a: f64, b: f64, m: usize| -> Vec<f64> {
            if m == 1 {
                return vec![b];
            }
            (0..m).map(|k| a + (b - a) * k as f64 / (m - 1) as f64).collect()
        };
        let geo = |a: f64, b: f64, m: usize| -> Vec<f64> { lin(a.ln(), b.ln(), m).into_iter().map(f64::exp).collect() };
        match self.spacing {
            Spacing::Linear => lin(self.min, self.max, n),
            Spacing::Log if self.min > 0.0 => geo(self.min, self.max, n),
            Spacing::Log => geo(-self.max, -self.min, n).into_iter().rev().map(|x| -x).collect(),
            Spacing::SignedLog => {
                let floor = self.floor.unwrap_or(1e-3 * self.min.abs().max(self.max.abs()));
                if self.min >= 0.0 {
                    return geo(self.min.max(floor), self.max, n);
                }
                if self.max <= 0.0 {
                    return geo(-self.max.min(-floor), -self.min, n).into_iter().rev().map(|x| -x).collect();
                }
                let side = n / 2;
                let mut out: Vec<f64> = geo(floor, -self.min, side).into_iter().rev().map(|x| -x).collect();
                if n % 2 == 1 {
                    out.push(0.0);
                }
                out.extend(geo(floor, self.max, side));
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    T,
    R,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "ln_T_plus_R")]
    LnTPlusR,
    #[serde(rename = "re_t")]
    ReT,
    #[serde(rename = "im_t")]
    ImT,
    #[serde(rename = "re_r")]
    ReR,
    #[serde(rename = "im_r")]
    ImR,
    #[serde(rename = "cond")]
    Cond,
    #[serde(rename = "chi")]
    Chi,
    #[serde(rename = "delta_chi")]
    DeltaChi,
    #[serde(rename = "im_xi_edge_r")]
    ImXiEdgeR,
    #[serde(rename = "im_xi_bulk_r")]
    ImXiBulkR,
    #[serde(rename = "im_xi_edge_t")]
    ImXiEdgeT,
    #[serde(rename = "im_xi_bulk_t")]
    ImXiBulkT,
    #[serde(rename = "Gamma_edge")]
    GammaEdge,
}

impl Observable {
    pub const ALL: [Observable; 16] = [
        Observable::T,
        Observable::R,
        Observable::Eta,
        Observable::LnTPlusR,
        Observable::ReT,
        Observable::ImT,
        Observable::ReR,
        Observable::ImR,
        Observable::Cond,
        Observable::Chi,
        Observable::DeltaChi,
        Observable::ImXiEdgeR,
        Observable::ImXiBulkR,
        Observable::ImXiEdgeT,
        Observable::ImXiBulkT,
        Observable::GammaEdge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::T => "T",
            Observable::R => "R",
            Observable::Eta => "eta",
            Observable::LnTPlusR => "ln_T_plus_R",
            Observable::ReT => "re_t",
            Observable::ImT => "im_t",
            Observable::ReR => "re_r",
            Observable::ImR => "im_r",
            Observable::Cond => "cond",
            Observable::Chi => "chi",
            Observable::DeltaChi => "delta_chi",
            Observable::ImXiEdgeR => "im_xi_edge_r",
            Observable::ImXiBulkR => "im_xi_bulk_r",
            Observable::ImXiEdgeT => "im_xi_edge_t",
            Observable::ImXiBulkT => "im_xi_bulk_t",
            Observable::GammaEdge => "Gamma_edge",
        }
    }

    fn needs_scatter(self) -> bool {
        matches!(
            self,
            Observable::T
                | Observable::R
                | Observable::Eta
                | Observable::LnTPlusR
                | Observable::ReT
                | Observable::ImT
                | Observable::ReR
                | Observable::ImR
                | Observable::Cond
        )
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Observable::ALL
            .iter()
            .copied()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Observable::ALL.iter().map(|o| o.name()).collect();
                format!("unknown observable `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub base: SystemParams,
    /// Detuning used when `delta` is not an axis.
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub observables: Vec<Observable>,
    #[serde(default = "default_direction")]
    pub direction: Direction,
    #[serde(default = "default_solver")]
    pub solver: Solver,
    /// Evaluate cells closer than the default exclusion to `Γ_f = −Γ_edge`.
    #[serde(default)]
    pub allow_threshold: bool,
}

fn default_direction() -> Direction {
    Direction::Left
}

fn default_solver() -> Solver {
    Solver::Markovian
}

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>, observables: Vec<Observable>) -> Self {
        SweepSpec {
            axes,
            base,
            delta: 0.0,
            observables,
            direction: Direction::Left,
            solver: Solver::Markovian,
            allow_threshold: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(Error::InvalidParams(p)) = self.base.validate() {
            problems.extend(p);
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            problems.push(format!("a sweep needs 1 or 2 axes, got {}", self.axes.len()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            problems.push(format!("axis `{}` appears twice", self.axes[0].param.name()));
        }
        for axis in &self.axes {
            problems.extend(axis.problems());
        }
        if !self.delta.is_finite() {
            problems.push(format!("delta must be finite, got {}", self.delta));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems))
        }
    }

    pub fn columns(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.param.column().to_string())
            .chain(self.observables.iter().map(|o| o.name().to_string()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    /// Axis values (φ as a multiple of π).
    pub coords: Vec<f64>,
    /// One entry per observable; NaN where it could not be evaluated.
    pub values: Vec<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

type ModeKey = (u64, u64);

fn mode_key(p: &SystemParams) -> ModeKey {
    (p.j0.to_bits(), p.phi.pi_multiple().to_bits())
}

/// Evaluates every grid cell (first axis outermost). Cells run in parallel
/// but rows come back in grid order and do not depend on the thread count.
/// Per-cell failures become row notes.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let columns = spec.columns();
    if spec.observables.is_empty() {
        return Ok(SweepTable { columns, rows: Vec::new() });
    }
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let cells: Vec<Vec<f64>> = match grids.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect(),
        _ => unreachable!("validated"),
    };
    let cell_params: Vec<(SystemParams, f64)> = cells.iter().map(|c| apply(spec, c)).collect();

    // eigenvectors do not depend on Γ_f, so one decomposition per (J0, φ)
    let mut keys: Vec<(ModeKey, SystemParams)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (p, _) in &cell_params {
        if seen.insert(mode_key(p)) {
            keys.push((mode_key(p), p.with_gamma_f(0.0)));
        }
    }
    let cache: HashMap<ModeKey, Result<ModeSet>> = keys
        .into_par_iter()
        .map(|(k, p)| (k, build_effective_hamiltonian(&p).and_then(|h| eigendecompose(&h))))
        .collect();

    let rows = cells
        .into_par_iter()
        .zip(cell_params.into_par_iter())
        .map(|(coords, (params, delta))| evaluate(spec, coords, &params, delta, &cache[&mode_key(&params)]))
        .collect();
    Ok(SweepTable { columns, rows })
}

fn apply(spec: &SweepSpec, coords: &[f64]) -> (SystemParams, f64) {
    let mut params = spec.base.clone();
    let mut delta = spec.delta;
    for (axis, &v) in spec.axes.iter().zip(coords) {
        match axis.param {
            AxisParam::GammaF => params.gamma_f = v,
            AxisParam::Phi => params.phi = Angle::from_pi(v),
            AxisParam::J0 => params.j0 = v,
            AxisParam::Delta => delta = v,
        }
    }
    (params, delta)
}

fn evaluate(spec: &SweepSpec, coords: Vec<f64>, params: &SystemParams, delta: f64, modes: &Result<ModeSet>) -> SweepRow {
    let mut notes: Vec<String> = Vec::new();
    let nan_row = |coords: Vec<f64>, note: String| SweepRow {
        values: vec![f64::NAN; spec.observables.len()],
        coords,
        note: Some(note),
    };
    let modes = match modes {
        Ok(m) => m,
        Err(e) => return nan_row(coords, e.to_string()),
    };
    let gamma_edge = modes.gamma_edge();
    let exclusion = if spec.allow_threshold { 0.0 } else { THRESHOLD_EXCLUSION };
    if let Err(e) = check_threshold(params.gamma_f, gamma_edge, exclusion) {
        return nan_row(coords, e.to_string());
    }

    let scatter = |g: f64, d: f64| -> Result<ScatterResult> {
        let p = params.with_gamma_f(g);
        match spec.solver {
            Solver::Markovian => MarkovianSolver::new(&p)?.solve(d, spec.direction),
            Solver::Exact => scatter_exact(&p, d, spec.direction).map(|(s, _)| s),
        }
    };
    let main = if spec.observables.iter().any(|o| o.needs_scatter()) {
        Some(scatter(params.gamma_f, delta))
    } else {
        None
    };
    let chi = |g: f64| -> Result<f64> {
        check_threshold(g, gamma_edge, exclusion)?;
        Ok(scatter(g, 0.0)?.reflection.ln())
    };
    let channels = channels_from_modes(modes, params, delta, spec.direction);

    let values = spec
        .observables
        .iter()
        .map(|&obs| {
            let value: Result<f64> = match obs {
                Observable::Chi => chi(params.gamma_f),
                Observable::DeltaChi => chi(params.gamma_f).and_then(|a| Ok((a + chi(-params.gamma_f)?).abs())),
                Observable::ImXiEdgeR => Ok(channels.edge_r.im),
                Observable::ImXiBulkR => Ok(channels.bulk_r.im),
                Observable::ImXiEdgeT => Ok(channels.edge_t.im),
                Observable::ImXiBulkT => Ok(channels.bulk_t.im),
                Observable::GammaEdge => Ok(gamma_edge),
                scattered => match main.as_ref().expect("scatter observables trigger a solve") {
                    Err(e) => Err(e.clone()),
                    Ok(s) => Ok(match scattered {
                        Observable::T => s.transmission,
                        Observable::R => s.reflection,
                        Observable::Eta => s.absorption,
                        Observable::LnTPlusR => (s.transmission + s.reflection).ln(),
                        Observable::ReT => s.t.re,
                        Observable::ImT => s.t.im,
                        Observable::ReR => s.r.re,
                        Observable::ImR => s.r.im,
                        Observable::Cond => s.cond,
                        _ => unreachable!(),
                    }),
                },
            };
            value.unwrap_or_else(|e| {
                let msg = format!("{obs}: {e}");
                if !notes.contains(&msg) {
                    notes.push(msg);
                }
                f64::NAN
            })
        })
        .collect();
    SweepRow {
        coords,
        values,
        note: if notes.is_empty() { None } else { Some(notes.join("; ")) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SystemParams {
        SystemParams::reference(Angle::from_pi(0.2), 0.0)
    }

    #[test]
    fn grids() {
        let lin = Axis::linear(AxisParam::Delta, -1.0, 1.0, 5).values();
        assert_eq!(lin, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let log = Axis::linear(AxisParam::GammaF, 1e-3, 1e-1, 3).with_spacing(Spacing::Log).values();
        assert!((log[1] - 1e-2).abs() < 1e-15);
        let signed = Axis {
            floor: Some(1e-4),
            ..Axis::linear(AxisParam::GammaF, -1e-2, 1e-2, 7).with_spacing(Spacing::SignedLog)
        }
        .values();
        assert_eq!(signed.len(), 7);
        assert_eq!(signed[3], 0.0);
        assert!((signed[0] + 1e-2).abs() < 1e-15 && (signed[2] + 1e-4).abs() < 1e-15);
        assert!(signed.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_observables_give_header_only() {
        let spec = SweepSpec::new(reference(), vec![Axis::linear(AxisParam::Delta, -1.0, 1.0, 3)], vec![]);
        let table = sweep(&spec).unwrap();
        assert_eq!(table.columns, vec!["delta"]);
        assert!(table.rows.is_empty());
    }

    #[test]
    fn validation_lists_every_problem() {
        let spec = SweepSpec::new(
            reference(),
            vec![
                Axis::linear(AxisParam::Phi, 0.0, 2.0, 1),
                Axis::linear(AxisParam::Phi, 0.1, 0.2, 3),
            ],
            vec![Observable::T],
        );
        match spec.validate() {
            Err(Error::InvalidParams(p)) => assert!(p.len() >= 3, "{p:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_and_ordered() {
        let spec = SweepSpec::new(
            reference(),
            vec![
                Axis::linear(AxisParam::Phi, 0.15, 0.35, 4),
                Axis::linear(AxisParam::GammaF, -0.005, 0.02, 5),
            ],
            vec![Observable::R, Observable::Chi, Observable::ImXiEdgeR, Observable::GammaEdge],
        );
        let a = sweep(&spec).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sweep(&spec).unwrap());
        assert_eq!(a.rows.len(), 20);
        assert_eq!(a.rows[1].coords, vec![0.15, -0.005 + 0.025 / 4.0]);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.coords, y.coords);
            for (u, v) in x.values.iter().zip(&y.values) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }

    #[test]
    fn threshold_cell_is_annotated() {
        let g = crate::spectral::edge_decay_rate(&reference()).unwrap();
        let spec = SweepSpec::new(
            reference(),
            vec![Axis::linear(AxisParam::GammaF, -g, 0.0, 2)],
            vec![Observable::R],
        );
        let table = sweep(&spec).unwrap();
        assert!(table.rows[0].note.as_deref().unwrap().contains("threshold"));
        assert!(table.rows[0].values[0].is_nan());
        assert!((table.rows[1].values[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ln_t_plus_r_is_minimal_near_gamma_edge() {
        let g = crate::spectral::edge_decay_rate(&reference()).unwrap();
        let spec = SweepSpec::new(
            reference(),
            vec![Axis::linear(AxisParam::GammaF, 0.2 * g, 5.0 * g, 97).with_spacing(Spacing::Log)],
            vec![Observable::LnTPlusR],
        );
        let table = sweep(&spec).unwrap();
        let best = table
            .rows
            .iter()
            .min_by(|a, b| a.values[0].total_cmp(&b.values[0]))
            .unwrap();
        let step = (25.0f64).ln() / 96.0;
        assert!((best.coords[0] / g).ln().abs() <= step, "{}", best.coords[0]);
    }

    #[test]
    fn spec_round_trips_through_serde() {
        let spec = SweepSpec::new(reference(), vec![Axis::linear(AxisParam::J0, 1.0, 3.0, 3)], vec![Observable::Eta]);
        let json = serde_json::to_string(&spec).unwrap();
        let back: SweepSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
