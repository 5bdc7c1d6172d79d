//! Physical configuration and the matrices built from it.
//!
//! Units: every rate and frequency is in units of the single-atom waveguide
//! decay rate Γ; frequencies are measured from the atomic transition ω0
//! (rotating frame). Atom `i` (zero-based) sits at `x_i = (i + origin)·d`, so with
//! the default `origin = 0` the first atom is at the coordinate origin.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};

/// Smallest ω0/Γ accepted by the exact (Bethe-ansatz) solver.
pub const MARKOV_GUARD: f64 = 1e3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemParams {
    /// Number of atoms (odd).
    pub n: usize,
    /// Coupling scale J0.
    pub j0: f64,
    /// Dimerization angle φ ∈ [0, π].
    pub phi: Angle,
    /// Single-atom waveguide decay rate.
    pub gamma: f64,
    /// Free-space loss (> 0) or gain (< 0).
    pub gamma_f: f64,
    /// Inter-atom propagation phase k0·d.
    pub theta: Angle,
    /// Absolute atomic frequency; only the exact solver uses it.
    pub omega0: f64,
    /// Drive amplitude. Scattering coefficients do not depend on it.
    pub epsilon: f64,
    /// Position of the first atom in units of d. Shifts only the phase of r.
    pub origin: i64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            n: 7,
            j0: 2.2,
            phi: Angle::from_pi(0.2),
            gamma: 1.0,
            gamma_f: 0.0,
            theta: Angle::from_pi(1.5),
            omega0: 1e4,
            epsilon: 0.1,
            origin: 0,
        }
    }
}

impl SystemParams {
    /// The seven-atom array with J0 = 2.2Γ used throughout the figures.
    pub fn reference(phi: Angle, gamma_f: f64) -> Self {
        SystemParams {
            phi,
            gamma_f,
            ..Default::default()
        }
    }

    pub fn single_atom(gamma_f: f64) -> Self {
        SystemParams {
            n: 1,
            gamma_f,
            ..Default::default()
        }
    }

    pub fn with_gamma_f(&self, gamma_f: f64) -> Self {
        SystemParams {
            gamma_f,
            ..self.clone()
        }
    }

    pub fn with_phi(&self, phi: Angle) -> Self {
        SystemParams {
            phi,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n == 0 || self.n % 2 == 0 {
            problems.push(format!("N must be a positive odd integer, got {}", self.n));
        }
        if !(self.j0.is_finite() && self.j0 > 0.0) {
            problems.push(format!("J0 must be finite and > 0, got {}", self.j0));
        }
        let phi = self.phi.pi_multiple();
        if !(0.0..=1.0).contains(&phi) {
            problems.push(format!("phi must lie in [0, pi], got {}", self.phi));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            problems.push(format!("Gamma must be finite and > 0, got {}", self.gamma));
        }
        if !self.gamma_f.is_finite() {
            problems.push(format!("Gamma_f must be finite, got {}", self.gamma_f));
        }
        if !self.theta.pi_multiple().is_finite() {
            problems.push("theta must be finite".to_string());
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            problems.push(format!("omega0 must be finite and > 0, got {}", self.omega0));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            problems.push(format!("epsilon must be finite and > 0, got {}", self.epsilon));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems))
        }
    }

    /// Exact-solver precondition on ω0/Γ.
    pub fn check_markov_guard(&self) -> Result<()> {
        let ratio = self.omega0 / self.gamma;
        if ratio >= MARKOV_GUARD {
            Ok(())
        } else {
            Err(Error::MarkovGuard { ratio })
        }
    }

    /// Position of atom `site` (zero-based) in units of d.
    pub fn position(&self, site: usize) -> f64 {
        (site as i64 + self.origin) as f64
    }

    /// `e^{i·sign·θ·x_site/d}`.
    pub fn site_phase(&self, site: usize, sign: f64) -> Complex64 {
        self.theta.phase(sign * self.position(site))
    }

    /// |J_strong − J_weak| = 2·J0·|cos φ|, the SSH dimerization gap.
    pub fn dimerization_gap(&self) -> f64 {
        2.0 * self.j0 * self.phi.cos().abs()
    }
}

/// Bond couplings `J_i = J0[1 − (−1)^i cos φ]`, `i = 1..N−1`; bond `i` joins
/// atoms `i` and `i+1`, so the left-most bond is the strong one for φ < π/2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingVector(Vec<f64>);

impl CouplingVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn build_couplings(j0: f64, phi: Angle, n: usize) -> Result<CouplingVector> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidParams(vec![format!(
            "N must be a positive odd integer, got {n}"
        )]));
    }
    let c = phi.cos();
    let bonds = (1..n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            j0 * (1.0 - sign * c)
        })
        .collect();
    Ok(CouplingVector(bonds))
}

/// Effective non-Hermitian Hamiltonian in the frame rotating at ω0:
/// `H_ij = J_tri − iΓ e^{iθ|i−j|} − iΓ_f δ_ij`.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    pub matrix: DMatrix<Complex64>,
    pub gamma: f64,
    pub gamma_f: f64,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_effective_hamiltonian(params: &SystemParams) -> Result<EffectiveHamiltonian> {
    params.validate()?;
    let couplings = build_couplings(params.j0, params.phi, params.n)?;
    Ok(assemble_effective_hamiltonian(
        couplings.as_slice(),
        params.gamma,
        params.gamma_f,
        params.theta,
    ))
}

/// Assembles `H_eff` for an arbitrary bond list (`N = bonds + 1`, any parity).
pub fn assemble_effective_hamiltonian(
    bonds: &[f64],
    gamma: f64,
    gamma_f: f64,
    theta: Angle,
) -> EffectiveHamiltonian {
    let n = bonds.len() + 1;
    let minus_i_gamma = Complex64::new(0.0, -gamma);
    let mut h = DMatrix::from_fn(n, n, |i, j| minus_i_gamma * theta.phase(i.abs_diff(j) as f64));
    for (bond, &j) in bonds.iter().enumerate() {
        h[(bond, bond + 1)] += j;
        h[(bond + 1, bond)] += j;
    }
    for i in 0..n {
        h[(i, i)] -= Complex64::new(0.0, gamma_f);
    }
    EffectiveHamiltonian {
        matrix: h,
        gamma,
        gamma_f,
    }
}

/// Coherent SSH part alone (real symmetric tridiagonal, zero diagonal).
pub fn coherent_hamiltonian(params: &SystemParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    let couplings = build_couplings(params.j0, params.phi, params.n)?;
    let mut h = DMatrix::zeros(params.n, params.n);
    for (bond, &j) in couplings.as_slice().iter().enumerate() {
        h[(bond, bond + 1)] = j;
        h[(bond + 1, bond)] = j;
    }
    Ok(h)
}
