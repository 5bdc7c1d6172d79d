//! Steady-state single-photon transport.
//!
//! Two independent solvers compute the same transmission and reflection
//! amplitudes per unit incident amplitude:
//!
//! * [`scatter_markovian`]: input-output solution of `(δ − H_eff)Λ = V`, with
//!   `t = 1 − iΓ V†Λ` and `r = −iΓ VᵀΛ`;
//! * [`scatter_exact`]: real-space plane-wave matching across every atom,
//!   with the propagation phase evaluated at the photon wavenumber
//!   `k = (ω0 + δ)/v_g`.
//!
//! [`scatter_channels`] splits the Markovian amplitudes into one term per
//! collective eigenmode.

mod channels;
mod exact;
mod field;
mod markovian;

pub use channels::{channels_from_modes, scatter_channels, Channel, ChannelDecomposition};
pub use exact::scatter_exact;
pub use field::{field_profile, PiecewiseField};
pub use markovian::{scatter_markovian, MarkovianSolver};

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::SystemParams;

/// Condition numbers above this are reported as a singularity.
pub const SINGULAR_COND: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Incident from the left, propagating toward +x (s = +1).
    Left,
    /// Incident from the right, propagating toward −x (s = −1).
    Right,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Left => 1.0,
            Direction::Right => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Left => "left",
            Direction::Right => "right",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" | "+1" | "+" => Ok(Direction::Left),
            "right" | "r" | "-1" | "-" => Ok(Direction::Right),
            other => Err(format!("unknown direction `{other}` (expected left|right)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Markovian,
    Exact,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Markovian => "markovian",
            Solver::Exact => "exact",
        })
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markovian" | "markov" => Ok(Solver::Markovian),
            "exact" | "bethe" => Ok(Solver::Exact),
            other => Err(format!("unknown solver `{other}` (expected markovian|exact)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatterResult {
    pub delta: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    /// `η = 1 − T − R`.
    pub absorption: f64,
    /// Atomic amplitudes per unit drive, normalized as in `(δ − H)Λ = V`.
    pub lambda: Vec<Complex64>,
    pub direction: Direction,
    pub solver: Solver,
    /// 1-norm condition number of the linear system that was solved.
    pub cond: f64,
}

impl ScatterResult {
    pub(crate) fn new(
        delta: f64,
        t: Complex64,
        r: Complex64,
        lambda: Vec<Complex64>,
        direction: Direction,
        solver: Solver,
        cond: f64,
    ) -> Self {
        let transmission = t.norm_sqr();
        let reflection = r.norm_sqr();
        ScatterResult {
            delta,
            t,
            r,
            transmission,
            reflection,
            absorption: 1.0 - transmission - reflection,
            lambda,
            direction,
            solver,
            cond,
        }
    }
}

/// Drive vector `V_i = e^{i s θ x_i/d}`.
pub fn drive_vector(params: &SystemParams, dir: Direction) -> DVector<Complex64> {
    DVector::from_fn(params.n, |i, _| params.site_phase(i, dir.sign()))
}
