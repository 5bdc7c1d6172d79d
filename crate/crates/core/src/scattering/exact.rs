//! Real-space scattering with delta-coupled atoms.
//!
//! Between atoms `i` and `i+1` (segment `i`, `i = 0..N`) the field is
//! `t_i e^{ikx} + r_{i+1} e^{−ikx}`. Integrating the photon equations of
//! motion across atom `i` gives the jump conditions
//!
//! ```text
//! t_i − t_{i−1}     = −i √Γ Λ_i e^{−ik x_i}
//! r_{i+1} − r_i     = +i √Γ Λ_i e^{+ik x_i}
//! ```
//!
//! and the atomic amplitude obeys
//!
//! ```text
//! (δ + iΓ_f) Λ_i − J_{i−1} Λ_{i−1} − J_i Λ_{i+1} = √Γ · φ(x_i)
//! ```
//!
//! where the field at the delta point is the mean of the two adjacent
//! segments. Units: `v_g = 1`, `g = √Γ`, and `k x_i = θ(1 + δ/ω0)·x_i/d`.
//! Unknowns are `Λ_1..Λ_N, t_1..t_N, r_1..r_N`; the incident amplitudes `t_0`
//! and `r_{N+1}` are fixed by the direction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::field::PiecewiseField;
use super::{Direction, ScatterResult, Solver, SINGULAR_COND};
use crate::error::{Error, Result};
use crate::linalg::solve_with_cond;
use crate::model::{build_couplings, SystemParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn scatter_exact(
    params: &SystemParams,
    delta: f64,
    dir: Direction,
) -> Result<(ScatterResult, PiecewiseField)> {
    params.validate()?;
    params.check_markov_guard()?;
    if !delta.is_finite() {
        return Err(Error::InvalidParams(vec![format!("delta must be finite, got {delta}")]));
    }
    let n = params.n;
    let couplings = build_couplings(params.j0, params.phi, n)?;
    let bonds = couplings.as_slice();
    let sqrt_gamma = params.gamma.sqrt();
    // phase per unit d at the photon wavenumber, as a multiple of θ
    let k_scale = 1.0 + delta / params.omega0;
    let phase = |site: usize, sign: f64| params.theta.phase(sign * k_scale * params.position(site));

    let (t_in, r_in) = match dir {
        Direction::Left => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        Direction::Right => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    };

    let lam = |i: usize| i;
    let tt = |i: usize| n + i - 1; // t_i, i = 1..N
    let rr = |i: usize| 2 * n + i - 1; // r_i, i = 1..N

    let dim = 3 * n;
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    let mut b = DVector::<Complex64>::zeros(dim);
    for site in 0..n {
        let i = site + 1;
        let fwd = phase(site, 1.0);
        let bwd = phase(site, -1.0);

        // t_i − t_{i−1} + i√Γ e^{−ikx} Λ_i = 0
        let row = site;
        a[(row, tt(i))] += 1.0;
        if i == 1 {
            b[row] += t_in;
        } else {
            a[(row, tt(i - 1))] -= 1.0;
        }
        a[(row, lam(site))] += I * sqrt_gamma * bwd;

        // r_{i+1} − r_i − i√Γ e^{ikx} Λ_i = 0
        let row = n + site;
        a[(row, rr(i))] -= 1.0;
        if i == n {
            b[row] -= r_in;
        } else {
            a[(row, rr(i + 1))] += 1.0;
        }
        a[(row, lam(site))] -= I * sqrt_gamma * fwd;

        // (δ + iΓ_f)Λ_i − ΣJΛ − (√Γ/2)[(t_{i−1}+t_i)e^{ikx} + (r_i+r_{i+1})e^{−ikx}] = 0
        let row = 2 * n + site;
        a[(row, lam(site))] += Complex64::new(delta, params.gamma_f);
        if site > 0 {
            a[(row, lam(site - 1))] -= bonds[site - 1];
        }
        if site + 1 < n {
            a[(row, lam(site + 1))] -= bonds[site];
        }
        let half = 0.5 * sqrt_gamma;
        a[(row, tt(i))] -= half * fwd;
        if i == 1 {
            b[row] += half * fwd * t_in;
        } else {
            a[(row, tt(i - 1))] -= half * fwd;
        }
        a[(row, rr(i))] -= half * bwd;
        if i == n {
            b[row] += half * bwd * r_in;
        } else {
            a[(row, rr(i + 1))] -= half * bwd;
        }
    }

    let solved = match solve_with_cond(&a, &b) {
        Some(s) if s.cond <= SINGULAR_COND => s,
        other => {
            return Err(Error::Singular {
                cond: other.map_or(f64::INFINITY, |s| s.cond),
                epsilon: Complex64::new(0.0, 0.0),
                mode: None,
            })
        }
    };
    let x = solved.x;

    let mut right = Vec::with_capacity(n + 1);
    right.push(t_in);
    right.extend((1..=n).map(|i| x[tt(i)]));
    let mut left: Vec<Complex64> = (1..=n).map(|i| x[rr(i)]).collect();
    left.push(r_in);

    let (t, r) = match dir {
        Direction::Left => (right[n], left[0]),
        Direction::Right => (left[0], right[n]),
    };
    // report Λ in the Markovian normalization (per unit drive, (δ − H)Λ = V)
    let lambda: Vec<Complex64> = (0..n).map(|s| x[lam(s)] / sqrt_gamma).collect();
    let result = ScatterResult::new(delta, t, r, lambda, dir, Solver::Exact, solved.cond);
    let field = PiecewiseField {
        right,
        left,
        theta: params.theta,
        k_scale,
        origin: params.origin,
    };
    Ok((result, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::scattering::scatter_markovian;

    #[test]
    fn resonant_single_atom_is_a_mirror() {
        let (res, _) = scatter_exact(&SystemParams::single_atom(0.0), 0.0, Direction::Left).unwrap();
        assert!(res.transmission < 1e-20);
        assert!((res.reflection - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_atom_matches_closed_form() {
        for &(delta, gf) in &[(0.0, 0.3), (0.7, 0.0), (-1.5, 0.1)] {
            let params = SystemParams {
                omega0: 1e8,
                ..SystemParams::single_atom(gf)
            };
            let (res, _) = scatter_exact(&params, delta, Direction::Left).unwrap();
            let denom = Complex64::new(delta, 1.0 + gf);
            assert!((res.t - Complex64::new(delta, gf) / denom).norm() < 1e-6);
            assert!((res.r - Complex64::new(0.0, -1.0) / denom).norm() < 1e-6);
        }
    }

    #[test]
    fn guard_rejects_small_omega0() {
        let params = SystemParams {
            omega0: 500.0,
            ..Default::default()
        };
        assert!(matches!(
            scatter_exact(&params, 0.0, Direction::Left),
            Err(Error::MarkovGuard { .. })
        ));
    }

    #[test]
    fn converges_to_markovian_at_resonance() {
        // at δ = 0 the propagation phases coincide, so the two solvers agree exactly
        for phi in [0.2, 0.35, 0.7] {
            let params = SystemParams::reference(Angle::from_pi(phi), 0.04);
            for dir in [Direction::Left, Direction::Right] {
                let (ex, _) = scatter_exact(&params, 0.0, dir).unwrap();
                let mk = scatter_markovian(&params, 0.0, dir).unwrap();
                assert!((ex.t - mk.t).norm() < 1e-10);
                assert!((ex.r - mk.r).norm() < 1e-10);
                for (a, b) in ex.lambda.iter().zip(&mk.lambda) {
                    assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
                }
            }
        }
    }

    #[test]
    fn equals_input_output_with_retarded_phases() {
        // the real-space solution is the input-output one with k0 replaced by k
        let params = SystemParams {
            omega0: 1e4,
            ..SystemParams::reference(Angle::from_pi(0.2), 0.0)
        };
        for delta in [-9.7, -3.282967, -0.4, 0.013, 2.5, 8.0] {
            let retarded = SystemParams {
                theta: Angle::from_pi(1.5 * (1.0 + delta / params.omega0)),
                ..params.clone()
            };
            for dir in [Direction::Left, Direction::Right] {
                let (ex, _) = scatter_exact(&params, delta, dir).unwrap();
                let io = scatter_markovian(&retarded, delta, dir).unwrap();
                assert!((ex.t - io.t).norm() < 1e-10);
                assert!((ex.r - io.r).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn boundary_conditions_hold() {
        let params = SystemParams::reference(Angle::from_pi(0.2), 0.0);
        let (_, field) = scatter_exact(&params, 0.3, Direction::Left).unwrap();
        assert_eq!(field.right[0], Complex64::new(1.0, 0.0));
        assert_eq!(field.left[7], Complex64::new(0.0, 0.0));
        let (_, field) = scatter_exact(&params, 0.3, Direction::Right).unwrap();
        assert_eq!(field.right[0], Complex64::new(0.0, 0.0));
        assert_eq!(field.left[7], Complex64::new(1.0, 0.0));
    }
}
