use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::scattering::Direction;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntensityMode {
    /// `|φ_r + φ_l|²`, with the standing-wave interference that the
    /// steady-state field profile also shows.
    #[default]
    Coherent,
    /// `|φ_r|² + |φ_l|²`, i.e. the interference term averaged out.
    MoverSum,
}

/// `|φ(x, t)|²` on a grid, row-major in time: `intensity[k][m]` is at
/// `times[k]`, `x[m]`.
#[derive(Clone, Debug, Serialize)]
pub struct FieldGrid {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub intensity: Vec<Vec<f64>>,
}

/// Space-time photon intensity from a trajectory (x in units of d).
///
/// Right movers collect emission from atoms at `x_i ≤ x`, left movers from
/// atoms at `x_i > x`, matching the segment convention of the steady-state
/// field. The incident packet travels at `v_g = ω0/θ` (in d·Γ) and is
/// referenced to `x = 0`; emission is instantaneous within the array.
pub fn reconstruct_field(traj: &Trajectory, x_grid: &[f64], mode: IntensityMode) -> FieldGrid {
    let params = &traj.params;
    let pulse = &traj.pulse;
    let sqrt_gamma = params.gamma.sqrt();
    let v_g = params.omega0 / params.theta.radians();
    let positions: Vec<f64> = (0..params.n).map(|s| params.position(s)).collect();
    let s = pulse.direction.sign();

    let intensity = traj
        .times
        .iter()
        .zip(&traj.lambda)
        .map(|(&t, lam)| {
            x_grid
                .iter()
                .map(|&x| {
                    let incident = pulse.field(t - s * x / v_g) * params.theta.phase(s * x);
                    let (mut right, mut left) = match pulse.direction {
                        Direction::Left => (incident, Complex64::new(0.0, 0.0)),
                        Direction::Right => (Complex64::new(0.0, 0.0), incident),
                    };
                    for (&xi, &li) in positions.iter().zip(lam) {
                        if xi <= x {
                            right -= I * sqrt_gamma * li * params.theta.phase(x - xi);
                        } else {
                            left -= I * sqrt_gamma * li * params.theta.phase(xi - x);
                        }
                    }
                    match mode {
                        IntensityMode::Coherent => (right + left).norm_sqr(),
                        IntensityMode::MoverSum => right.norm_sqr() + left.norm_sqr(),
                    }
                })
                .collect()
        })
        .collect();
    FieldGrid {
        times: traj.times.clone(),
        x: x_grid.to_vec(),
        intensity,
    }
}
