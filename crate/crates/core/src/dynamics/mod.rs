//! Time-domain single-photon transport in the Markovian limit.
//!
//! The atomic amplitudes obey `dλ/dt = −i H_eff λ − i √Γ f(t) u`, with
//! `u_i = e^{isθx_i}` and `f` the incident envelope (per unit amplitude, time
//! in units of 1/Γ). Output fields follow from input-output relations:
//! `a_fwd = f − i√Γ Σ u_i* λ_i` and `a_bwd = −i√Γ Σ u_i λ_i`.

pub mod integrator;
mod field;

pub use field::{reconstruct_field, FieldGrid, IntensityMode};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{build_effective_hamiltonian, SystemParams};
use crate::scattering::{drive_vector, Direction};
use integrator::{integrate, StepStats, Tolerances};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const RTOL: f64 = 1e-10;
/// Absolute tolerance per unit pulse amplitude.
pub const ATOL: f64 = 1e-13;
const MAX_SAMPLES: usize = 10_000_000;

/// Incident single-photon wave packet, evaluated at `x = 0`.
///
/// The envelope is Gaussian; a positive `plateau` inserts a flat top of that
/// duration centred on `t_center`, with Gaussian flanks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSpec {
    pub t_center: f64,
    pub sigma_t: f64,
    pub delta_c: f64,
    pub direction: Direction,
    pub amplitude: f64,
    pub plateau: f64,
}

impl Default for PulseSpec {
    fn default() -> Self {
        PulseSpec::gaussian(2.0)
    }
}

impl PulseSpec {
    /// Resonant left-incident Gaussian centred at `6σ_t`.
    pub fn gaussian(sigma_t: f64) -> Self {
        PulseSpec {
            t_center: 6.0 * sigma_t,
            sigma_t,
            delta_c: 0.0,
            direction: Direction::Left,
            amplitude: 1.0,
            plateau: 0.0,
        }
    }

    /// Flat-top pulse whose plateau starts at `6σ_t`.
    pub fn flat_top(sigma_t: f64, plateau: f64) -> Self {
        PulseSpec {
            t_center: 6.0 * sigma_t + 0.5 * plateau,
            plateau,
            ..PulseSpec::gaussian(sigma_t)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.sigma_t > 0.0 && self.sigma_t.is_finite()) {
            problems.push(format!("sigma_t must be positive, got {}", self.sigma_t));
        }
        if !(self.plateau >= 0.0 && self.plateau.is_finite()) {
            problems.push(format!("plateau must be non-negative, got {}", self.plateau));
        }
        for (name, v) in [("t_center", self.t_center), ("delta_c", self.delta_c), ("amplitude", self.amplitude)] {
            if !v.is_finite() {
                problems.push(format!("{name} must be finite, got {v}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems))
        }
    }

    /// Rejects pulses whose spectral width `1/σ_t` is not below `gap`.
    pub fn check_narrowband(&self, gap: f64) -> Result<()> {
        if 1.0 / self.sigma_t < gap {
            Ok(())
        } else {
            Err(Error::InvalidParams(vec![format!(
                "pulse bandwidth 1/sigma_t = {} is not below the band gap {gap}",
                1.0 / self.sigma_t
            )]))
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let half = 0.5 * self.plateau;
        let dt = ((t - self.t_center).abs() - half).max(0.0);
        self.amplitude * (-dt * dt / (2.0 * self.sigma_t * self.sigma_t)).exp()
    }

    /// `f(t)` including the carrier `e^{−iδ_c t}`.
    pub fn field(&self, t: f64) -> Complex64 {
        self.envelope(t) * Complex64::from_polar(1.0, -self.delta_c * t)
    }

    /// Time after which the envelope is below `e^{−18}` of its peak.
    pub fn end(&self) -> f64 {
        self.t_center + 0.5 * self.plateau + 6.0 * self.sigma_t
    }

    /// `∫|f|² dt` over the whole real line.
    pub fn energy(&self) -> f64 {
        self.amplitude * self.amplitude * (self.sigma_t * std::f64::consts::PI.sqrt() + self.plateau)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DynamicsWarning {
    /// Net gain above threshold: the mode with energy `energy` grows as
    /// `e^{growth_rate·t}` in amplitude.
    UnboundedGrowth { growth_rate: f64, energy: f64 },
}

/// Time-integrated photon fluxes. At the end of the run
/// `incident ≈ transmitted + reflected + absorbed + residual`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct FluxBudget {
    pub incident: f64,
    pub transmitted: f64,
    pub reflected: f64,
    /// `∫ 2Γ_f Σ|λ|² dt`.
    pub absorbed: f64,
    /// `Σ|λ|²` at the final time.
    pub residual: f64,
}

impl FluxBudget {
    pub fn imbalance(&self) -> f64 {
        self.incident - self.transmitted - self.reflected - self.absorbed - self.residual
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub params: SystemParams,
    pub pulse: PulseSpec,
    pub times: Vec<f64>,
    /// `λ_i(t)` for each sample time.
    pub lambda: Vec<Vec<Complex64>>,
    /// Transmitted-side and reflected-side output fields.
    pub forward: Vec<Complex64>,
    pub backward: Vec<Complex64>,
    pub flux: FluxBudget,
    pub stats: StepStats,
    pub warnings: Vec<DynamicsWarning>,
}

impl Trajectory {
    /// `Σ_i |λ_i(t)|²` per sample.
    pub fn total_excitation(&self) -> Vec<f64> {
        self.lambda
            .iter()
            .map(|l| l.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    pub fn populations(&self, sample: usize) -> Vec<f64> {
        self.lambda[sample].iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Integrates the driven amplitude equations on `[0, t_max]`, sampling every
/// `dt_out`.
pub fn evolve(params: &SystemParams, pulse: &PulseSpec, t_max: f64, dt_out: f64) -> Result<Trajectory> {
    params.validate()?;
    pulse.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) || !(dt_out > 0.0 && dt_out.is_finite()) {
        return Err(Error::InvalidParams(vec![format!(
            "t_max and dt_out must be positive, got {t_max} and {dt_out}"
        )]));
    }
    let count = (t_max / dt_out).floor() as usize + 1;
    if count > MAX_SAMPLES {
        return Err(Error::InvalidParams(vec![format!("{count} output samples exceed the limit of {MAX_SAMPLES}")]));
    }

    let mut warnings = Vec::new();
    // the edge mode is not always the longest-lived one, so certify with the
    // full spectrum rather than comparing against Γ_edge alone
    if params.gamma_f < 0.0 {
        let values = linalg::eigenvalues(&build_effective_hamiltonian(params)?.matrix)?;
        if let Some(worst) = values.iter().max_by(|a, b| a.im.total_cmp(&b.im)) {
            if worst.im > 0.0 {
                log::warn!("net gain above threshold: amplitude grows as exp({} t)", worst.im);
                warnings.push(DynamicsWarning::UnboundedGrowth {
                    growth_rate: worst.im,
                    energy: worst.re,
                });
            }
        }
    }

    let n = params.n;
    let h = build_effective_hamiltonian(params)?.matrix;
    let u = drive_vector(params, pulse.direction);
    let sqrt_gamma = params.gamma.sqrt();
    let two_gamma_f = 2.0 * params.gamma_f;
    let outputs = |t: f64, lam: &[Complex64]| -> (Complex64, Complex64, Complex64) {
        let f = pulse.field(t);
        let mut fwd = f;
        let mut bwd = Complex64::new(0.0, 0.0);
        for i in 0..n {
            fwd -= I * sqrt_gamma * u[i].conj() * lam[i];
            bwd -= I * sqrt_gamma * u[i] * lam[i];
        }
        (f, fwd, bwd)
    };
    // state: λ_1..λ_N, then ∫|f|², ∫|fwd|², ∫|bwd|², ∫2Γ_f Σ|λ|²
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (f, fwd, bwd) = outputs(t, y);
        let mut pop = 0.0;
        for i in 0..n {
            let mut acc = -I * sqrt_gamma * f * u[i];
            for j in 0..n {
                acc -= I * h[(i, j)] * y[j];
            }
            dy[i] = acc;
            pop += y[i].norm_sqr();
        }
        dy[n] = Complex64::from(f.norm_sqr());
        dy[n + 1] = Complex64::from(fwd.norm_sqr());
        dy[n + 2] = Complex64::from(bwd.norm_sqr());
        dy[n + 3] = Complex64::from(two_gamma_f * pop);
    };

    let times: Vec<f64> = (0..count).map(|k| k as f64 * dt_out).collect();
    let mut lambda = Vec::with_capacity(count);
    let mut forward = Vec::with_capacity(count);
    let mut backward = Vec::with_capacity(count);
    let mut final_state = Vec::new();
    let mut sample_times = times.clone();
    if *sample_times.last().unwrap() < t_max {
        sample_times.push(t_max);
    }

    let scale = pulse.amplitude.abs().max(f64::MIN_POSITIVE);
    let tol = Tolerances {
        rtol: RTOL,
        atol: ATOL * scale,
        h_init: 1e-3 * pulse.sigma_t.min(1.0 / params.gamma),
        // never step across the whole pulse while the state is still empty
        h_max: 0.25 * pulse.sigma_t,
        max_steps: 50_000_000,
    };
    let y0 = vec![Complex64::new(0.0, 0.0); n + 4];
    let stats = integrate(rhs, 0.0, t_max, &y0, n, tol, &sample_times, |t, y| {
        if lambda.len() < count {
            let (_, fwd, bwd) = outputs(t, y);
            lambda.push(y[..n].to_vec());
            forward.push(fwd);
            backward.push(bwd);
        }
        if t == t_max {
            final_state = y.to_vec();
        }
    })?;

    let flux = FluxBudget {
        incident: final_state[n].re,
        transmitted: final_state[n + 1].re,
        reflected: final_state[n + 2].re,
        absorbed: final_state[n + 3].re,
        residual: final_state[..n].iter().map(|z| z.norm_sqr()).sum(),
    };
    Ok(Trajectory {
        params: params.clone(),
        pulse: pulse.clone(),
        times,
        lambda,
        forward,
        backward,
        flux,
        stats,
        warnings,
    })
}

/// Energy decay rate from a least-squares fit of `ln Σ|λ|²` over
/// `window = (t0, t1)`. Fails when the excitation is not monotonically
/// decreasing there, which usually means the window still contains beating
/// with faster modes and should be moved later or widened.
pub fn fit_decay_rate(traj: &Trajectory, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    let total = traj.total_excitation();
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&total)
        .filter(|(&t, _)| t >= t0 && t <= t1)
        .map(|(&t, &e)| (t, e))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "window [{t0}, {t1}] holds {} samples, need at least 3",
            pts.len()
        )));
    }
    if let Some(&(t, _)) = pts.iter().find(|(_, e)| !(*e > 1e-300)) {
        return Err(Error::Fit(format!("excitation at numerical floor at t = {t}")));
    }
    if let Some(w) = pts.windows(2).find(|w| w[1].1 > w[0].1) {
        return Err(Error::Fit(format!(
            "excitation is not monotonic in [{t0}, {t1}] (rises at t = {}); widen or delay the window",
            w[1].0
        )));
    }
    let m = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, e) in &pts {
        sxy += (t - mean_t) * (e.ln() - mean_y);
        sxx += (t - mean_t).powi(2);
    }
    Ok(-sxy / sxx)
}
