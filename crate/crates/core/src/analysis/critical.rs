use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scattering::{scatter_markovian, Direction};
use crate::spectral::edge_decay_rate;

/// Default closest approach to `Γ_f = −Γ_edge`, relative to `Γ_edge`.
pub const THRESHOLD_EXCLUSION: f64 = 1e-3;
/// Absolute tolerance (units of Γ) of the Γ_f minimizers.
pub const MINIMIZER_TOL: f64 = 1e-6;
const BRACKET_EXPANSIONS: usize = 3;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Refuses `gamma_f` within `exclusion·Γ_edge` of the lasing threshold.
/// An `exclusion` of zero disables the check.
pub fn check_threshold(gamma_f: f64, gamma_edge: f64, exclusion: f64) -> Result<()> {
    let distance = (gamma_f + gamma_edge).abs();
    if distance < exclusion * gamma_edge {
        Err(Error::ThresholdExcluded {
            gamma_f,
            threshold: -gamma_edge,
            distance,
        })
    } else {
        Ok(())
    }
}

/// `R(δ = 0)` for the given incidence, with the threshold exclusion applied.
pub fn resonant_reflection(params: &SystemParams, gamma_f: f64, dir: Direction, exclusion: f64) -> Result<f64> {
    if exclusion > 0.0 {
        check_threshold(gamma_f, edge_decay_rate(params)?, exclusion)?;
    }
    Ok(scatter_markovian(&params.with_gamma_f(gamma_f), 0.0, dir)?.reflection)
}

/// `χ = ln R(δ = 0)` for left incidence.
pub fn chi(params: &SystemParams, gamma_f: f64) -> Result<f64> {
    Ok(resonant_reflection(params, gamma_f, Direction::Left, THRESHOLD_EXCLUSION)?.ln())
}

/// `δχ = |χ(Γ_f) + χ(−Γ_f)|`.
pub fn delta_chi(params: &SystemParams, gamma_f: f64) -> Result<f64> {
    Ok((chi(params, gamma_f)? + chi(params, -gamma_f)?).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeReversalReport {
    pub gamma_f: Vec<f64>,
    pub chi_plus: Vec<f64>,
    pub chi_minus: Vec<f64>,
    pub delta_chi: Vec<f64>,
    pub gamma_edge: f64,
    /// `None` when the reflection has no interior minimum.
    pub gamma_r0: Option<f64>,
}

impl TimeReversalReport {
    pub fn max_delta_chi(&self) -> f64 {
        self.delta_chi.iter().cloned().fold(0.0, f64::max)
    }
}

/// `χ(±Γ_f)` and `δχ` over a grid of non-negative `Γ_f`. Any grid point
/// touching the threshold exclusion fails the whole report.
pub fn time_reversal_report(params: &SystemParams, gamma_f_grid: &[f64]) -> Result<TimeReversalReport> {
    let gamma_edge = edge_decay_rate(params)?;
    let mut chi_plus = Vec::with_capacity(gamma_f_grid.len());
    let mut chi_minus = Vec::with_capacity(gamma_f_grid.len());
    for &g in gamma_f_grid {
        chi_plus.push(resonant_reflection(params, g, Direction::Left, THRESHOLD_EXCLUSION)?.ln());
        chi_minus.push(resonant_reflection(params, -g, Direction::Left, THRESHOLD_EXCLUSION)?.ln());
    }
    let delta_chi = chi_plus.iter().zip(&chi_minus).map(|(a, b)| (a + b).abs()).collect();
    let gamma_r0 = match find_gamma_r0(params) {
        Ok(g) => Some(g),
        Err(Error::NoInteriorMinimum { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TimeReversalReport {
        gamma_f: gamma_f_grid.to_vec(),
        chi_plus,
        chi_minus,
        delta_chi,
        gamma_edge,
        gamma_r0,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReflectionMinimum {
    pub gamma_f: f64,
    pub reflection: f64,
}

/// Golden-section search for the minimum of `f` over `[lo, hi]` (both the
/// same sign), uniform in `ln|x|`. Stops when the bracket is narrower than
/// `tol` in `x`. Returns the argmin and whether it sits at an endpoint.
pub fn golden_section_log<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64, bool)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let sign = lo.signum();
    let (mut a, mut b) = (lo.abs().ln().min(hi.abs().ln()), lo.abs().ln().max(hi.abs().ln()));
    let (a0, b0) = (a, b);
    let x = |u: f64| sign * u.exp();
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(x(c))?;
    let mut fd = f(x(d))?;
    while (x(b) - x(a)).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(x(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(x(d))?;
        }
    }
    let u = 0.5 * (a + b);
    let at_edge = (x(u) - x(a0)).abs() <= tol || (x(u) - x(b0)).abs() <= tol;
    Ok((x(u), f(x(u))?, at_edge))
}

/// Minimizes `R(δ = 0)` over `Γ_f ∈ [lo, hi]`; the bracket may lie on the
/// gain side (both ends negative). Fails if the minimum is at an endpoint.
pub fn find_reflection_minimum(
    params: &SystemParams,
    dir: Direction,
    lo: f64,
    hi: f64,
    exclusion: f64,
) -> Result<ReflectionMinimum> {
    if lo == 0.0 || hi == 0.0 || lo.signum() != hi.signum() {
        return Err(Error::InvalidParams(vec![format!(
            "reflection-minimum bracket [{lo}, {hi}] must not contain or touch 0"
        )]));
    }
    let gamma_edge = edge_decay_rate(params)?;
    let (gamma_f, reflection, at_edge) = golden_section_log(
        |g| {
            check_threshold(g, gamma_edge, exclusion)?;
            Ok(scatter_markovian(&params.with_gamma_f(g), 0.0, dir)?.reflection)
        },
        lo,
        hi,
        MINIMIZER_TOL,
    )?;
    if at_edge {
        return Err(Error::NoInteriorMinimum {
            lo: lo.min(hi),
            hi: lo.max(hi),
        });
    }
    Ok(ReflectionMinimum { gamma_f, reflection })
}

/// `Γ_r0`: the loss rate minimizing left-incident `R(δ = 0)`, searched in
/// `[0.1, 10]·Γ_edge` and widened tenfold on the offending side up to three
/// times.
pub fn find_gamma_r0(params: &SystemParams) -> Result<f64> {
    let gamma_edge = edge_decay_rate(params)?;
    let (mut lo, mut hi) = (0.1 * gamma_edge, 10.0 * gamma_edge);
    for attempt in 0..=BRACKET_EXPANSIONS {
        match find_reflection_minimum(params, Direction::Left, lo, hi, 0.0) {
            Ok(m) => return Ok(m.gamma_f),
            Err(Error::NoInteriorMinimum { .. }) if attempt < BRACKET_EXPANSIONS => {
                let r = |g: f64| scatter_markovian(&params.with_gamma_f(g), 0.0, Direction::Left).map(|s| s.reflection);
                if r(lo)? < r(hi)? {
                    lo /= 10.0;
                } else {
                    hi *= 10.0;
                }
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("the last attempt returns")
}
