use num_complex::Complex64;
use serde::Serialize;

use super::{Direction, ScatterResult};
use crate::angle::Angle;
use crate::model::SystemParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Plane-wave amplitudes in each waveguide segment.
///
/// Segment `s` (`s = 0..=N`) lies between atoms `s` and `s+1` (one-based),
/// segment 0 left of the array and segment `N` right of it. The field there is
/// `right[s]·e^{ikx} + left[s]·e^{−ikx}`, i.e. `right[s] = t_s` and
/// `left[s] = r_{s+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseField {
    pub right: Vec<Complex64>,
    pub left: Vec<Complex64>,
    pub theta: Angle,
    /// `k/k0 = 1 + δ/ω0`.
    pub k_scale: f64,
    pub origin: i64,
}

impl PiecewiseField {
    /// Field amplitudes implied by a Markovian solution (phases at `k0`).
    pub fn from_markovian(result: &ScatterResult, params: &SystemParams) -> Self {
        let n = params.n;
        let gamma = params.gamma;
        let (t_in, r_in) = match result.direction {
            Direction::Left => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Direction::Right => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        };
        let mut right = vec![t_in; n + 1];
        for site in 0..n {
            right[site + 1] = right[site] - I * gamma * params.site_phase(site, -1.0) * result.lambda[site];
        }
        let mut left = vec![r_in; n + 1];
        for site in (0..n).rev() {
            left[site] = left[site + 1] - I * gamma * params.site_phase(site, 1.0) * result.lambda[site];
        }
        PiecewiseField {
            right,
            left,
            theta: params.theta,
            k_scale: 1.0,
            origin: params.origin,
        }
    }

    pub fn atoms(&self) -> usize {
        self.right.len() - 1
    }

    /// Segment containing `x` (units of d); an atom's own position belongs to
    /// the segment on its right.
    pub fn segment(&self, x: f64) -> usize {
        let rel = x - self.origin as f64;
        if rel < 0.0 {
            0
        } else {
            ((rel.floor() as usize) + 1).min(self.atoms())
        }
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let s = self.segment(x);
        let fwd = self.theta.phase(self.k_scale * x);
        self.right[s] * fwd + self.left[s] * fwd.conj()
    }
}

/// `|φ(x)|²` relative to the incident intensity.
pub fn field_profile(field: &PiecewiseField, x_grid: &[f64]) -> Vec<f64> {
    x_grid.iter().map(|&x| field.amplitude(x).norm_sqr()).collect()
}
