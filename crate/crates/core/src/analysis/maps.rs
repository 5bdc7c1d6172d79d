use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::critical::{check_threshold, find_reflection_minimum, ReflectionMinimum, THRESHOLD_EXCLUSION};
use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scattering::{scatter_markovian, Direction};
use crate::spectral::edge_decay_rate;

const CONTOUR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct AbsorptionMap {
    pub j0: Vec<f64>,
    pub phi: Vec<Angle>,
    pub gamma_f: f64,
    /// `eta[p][k]` at `(phi[p], j0[k])`; `None` where the cell failed.
    pub eta: Vec<Vec<Option<f64>>>,
    pub gamma_edge: Vec<Vec<Option<f64>>>,
    /// Points `(J0, φ)` where `Γ_edge = Γ_f`.
    pub contour: Vec<(f64, Angle)>,
}

/// Resonant absorption of a left-incident photon over a `(J0, φ)` grid at
/// fixed `base.gamma_f`, plus the critical-coupling contour located by
/// bisection in φ within each J0 column.
pub fn absorption_map(base: &SystemParams, j0_grid: &[f64], phi_grid: &[Angle]) -> Result<AbsorptionMap> {
    base.validate()?;
    let cells: Vec<(usize, usize)> = (0..phi_grid.len())
        .flat_map(|p| (0..j0_grid.len()).map(move |k| (p, k)))
        .collect();
    let values: Vec<(Option<f64>, Option<f64>)> = cells
        .par_iter()
        .map(|&(p, k)| {
            let params = SystemParams {
                j0: j0_grid[k],
                phi: phi_grid[p],
                ..base.clone()
            };
            let eta = scatter_markovian(&params, 0.0, Direction::Left).ok().map(|s| s.absorption);
            (eta, edge_decay_rate(&params).ok())
        })
        .collect();
    let cols = j0_grid.len();
    let mut eta = vec![vec![None; cols]; phi_grid.len()];
    let mut gamma_edge = vec![vec![None; cols]; phi_grid.len()];
    for (&(p, k), &(e, g)) in cells.iter().zip(&values) {
        eta[p][k] = e;
        gamma_edge[p][k] = g;
    }

    let mut contour = Vec::new();
    for (k, &j0) in j0_grid.iter().enumerate() {
        for p in 1..phi_grid.len() {
            let (Some(g0), Some(g1)) = (gamma_edge[p - 1][k], gamma_edge[p][k]) else {
                continue;
            };
            if (g0 - base.gamma_f) * (g1 - base.gamma_f) > 0.0 {
                continue;
            }
            let rate = |phi: f64| {
                edge_decay_rate(&SystemParams {
                    j0,
                    phi: Angle::from_pi(phi),
                    ..base.clone()
                })
                .map(|g| g - base.gamma_f)
            };
            if let Ok(phi) = bisect(rate, phi_grid[p - 1].pi_multiple(), phi_grid[p].pi_multiple(), g0 - base.gamma_f) {
                contour.push((j0, Angle::from_pi(phi)));
            }
        }
    }
    Ok(AbsorptionMap {
        j0: j0_grid.to_vec(),
        phi: phi_grid.to_vec(),
        gamma_f: base.gamma_f,
        eta,
        gamma_edge,
        contour,
    })
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    while (b - a).abs() > CONTOUR_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub gamma_f: f64,
    pub t: Complex64,
    pub r: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub cond: f64,
    /// Why the point has no values (threshold exclusion, singularity).
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplificationScan {
    pub direction: Direction,
    pub gamma_edge: f64,
    pub rows: Vec<ScanRow>,
    /// Interior minimum of R on the gain side (`d ln R/dΓ_f` changes sign),
    /// refined between the neighbouring grid points.
    pub transition: Option<ReflectionMinimum>,
}

/// Resonant scattering over a Γ_f grid. Points within the threshold
/// exclusion are annotated unless `allow_threshold` is set.
pub fn amplification_scan(
    params: &SystemParams,
    gamma_f_grid: &[f64],
    dir: Direction,
    allow_threshold: bool,
) -> Result<AmplificationScan> {
    let gamma_edge = edge_decay_rate(params)?;
    let exclusion = if allow_threshold { 0.0 } else { THRESHOLD_EXCLUSION };
    let rows: Vec<ScanRow> = gamma_f_grid
        .par_iter()
        .map(|&g| {
            let blank = |note: String| ScanRow {
                gamma_f: g,
                t: Complex64::new(f64::NAN, f64::NAN),
                r: Complex64::new(f64::NAN, f64::NAN),
                transmission: f64::NAN,
                reflection: f64::NAN,
                cond: f64::NAN,
                note: Some(note),
            };
            if let Err(e) = check_threshold(g, gamma_edge, exclusion) {
                return blank(e.to_string());
            }
            match scatter_markovian(&params.with_gamma_f(g), 0.0, dir) {
                Ok(s) => ScanRow {
                    gamma_f: g,
                    t: s.t,
                    r: s.r,
                    transmission: s.transmission,
                    reflection: s.reflection,
                    cond: s.cond,
                    note: None,
                },
                Err(e) => blank(e.to_string()),
            }
        })
        .collect();

    let mut gain: Vec<&ScanRow> = rows
        .iter()
        .filter(|r| r.gamma_f < 0.0 && r.note.is_none())
        .collect();
    gain.sort_by(|a, b| a.gamma_f.total_cmp(&b.gamma_f));
    let mut transition = None;
    for w in gain.windows(3) {
        if w[1].reflection < w[0].reflection && w[1].reflection < w[2].reflection {
            // keep the refinement bracket on the same side of the threshold as the dip
            let edge = -gamma_edge * (1.0 + THRESHOLD_EXCLUSION);
            let (mut lo, mut hi) = (w[0].gamma_f, w[2].gamma_f);
            if w[1].gamma_f < -gamma_edge && hi > -gamma_edge {
                hi = edge;
            } else if w[1].gamma_f > -gamma_edge && lo < -gamma_edge {
                lo = -gamma_edge * (1.0 - THRESHOLD_EXCLUSION);
            }
            match find_reflection_minimum(params, dir, lo, hi, exclusion) {
                Ok(m) => {
                    transition = Some(m);
                    break;
                }
                Err(Error::NoInteriorMinimum { .. }) | Err(Error::ThresholdExcluded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(AmplificationScan {
        direction: dir,
        gamma_edge,
        rows,
        transition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_cell_absorbs_and_mirror_cell_does_not() {
        let base = SystemParams::reference(Angle::from_pi(0.2), 0.013);
        let map = absorption_map(&base, &[2.2], &[Angle::from_pi(0.2), Angle::from_pi(0.8)]).unwrap();
        let right_edge = map.eta[0][0].unwrap();
        let left_edge = map.eta[1][0].unwrap();
        assert!(right_edge >= 0.95);
        assert!(left_edge < right_edge);
    }

    #[test]
    fn contour_satisfies_critical_coupling() {
        let base = SystemParams::reference(Angle::from_pi(0.2), 0.013);
        let phis: Vec<Angle> = (0..12).map(|p| Angle::from_pi(0.05 + 0.03 * p as f64)).collect();
        let map = absorption_map(&base, &[1.8, 2.2, 2.6], &phis).unwrap();
        assert!(!map.contour.is_empty());
        for &(j0, phi) in &map.contour {
            let g = edge_decay_rate(&SystemParams { j0, phi, ..base.clone() }).unwrap();
            assert!((g - 0.013).abs() / 0.013 < 1e-6);
        }
    }

    #[test]
    fn diverging_amplification_near_threshold() {
        let params = SystemParams::reference(Angle::from_pi(0.2), 0.0);
        let g = edge_decay_rate(&params).unwrap();
        let scan = amplification_scan(&params, &[-0.999 * g, -g], Direction::Left, false).unwrap();
        assert!(scan.rows[0].reflection > 1e2 && scan.rows[0].transmission > 1e2);
        assert!(scan.rows[1].note.is_some() && scan.rows[1].reflection.is_nan());
    }

    #[test]
    fn right_incidence_transition_at_minus_gamma_r0() {
        let params = SystemParams::reference(Angle::from_pi(0.2), 0.0);
        let g = edge_decay_rate(&params).unwrap();
        // coarse grid whose dip straddles the threshold point
        let grid: Vec<f64> = (1..300).map(|k| -0.01 * g * k as f64).collect();
        let scan = amplification_scan(&params, &grid, Direction::Right, false).unwrap();
        let m = scan.transition.expect("transition");
        let g_r0 = super::super::find_gamma_r0(&params).unwrap();
        assert!((m.gamma_f + g_r0).abs() < 0.05 * g_r0, "{} {}", m.gamma_f, g_r0);
        assert!(m.reflection < 1e-2);
    }
}
