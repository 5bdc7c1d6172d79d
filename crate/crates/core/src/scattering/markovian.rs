use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{drive_vector, Direction, ScatterResult, Solver, SINGULAR_COND};
use crate::error::{Error, Result};
use crate::linalg::{self, solve_with_cond};
use crate::model::{build_effective_hamiltonian, EffectiveHamiltonian, SystemParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Input-output solver with the effective Hamiltonian built once and reused
/// across detunings and directions.
#[derive(Clone, Debug)]
pub struct MarkovianSolver {
    params: SystemParams,
    hamiltonian: EffectiveHamiltonian,
}

impl MarkovianSolver {
    pub fn new(params: &SystemParams) -> Result<Self> {
        Ok(MarkovianSolver {
            params: params.clone(),
            hamiltonian: build_effective_hamiltonian(params)?,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn hamiltonian(&self) -> &EffectiveHamiltonian {
        &self.hamiltonian
    }

    pub fn solve(&self, delta: f64, dir: Direction) -> Result<ScatterResult> {
        if !delta.is_finite() {
            return Err(Error::InvalidParams(vec![format!("delta must be finite, got {delta}")]));
        }
        let n = self.params.n;
        let gamma = self.params.gamma;
        let a = DMatrix::<Complex64>::identity(n, n) * Complex64::from(delta) - &self.hamiltonian.matrix;
        let v = drive_vector(&self.params, dir);
        let solved = match solve_with_cond(&a, &v) {
            Some(s) if s.cond <= SINGULAR_COND => s,
            other => return Err(self.singularity(delta, other.map_or(f64::INFINITY, |s| s.cond))),
        };
        let lambda = solved.x;
        let forward: Complex64 = v.iter().zip(lambda.iter()).map(|(vi, li)| vi.conj() * li).sum();
        let backward: Complex64 = v.iter().zip(lambda.iter()).map(|(vi, li)| vi * li).sum();
        let t = Complex64::new(1.0, 0.0) - I * gamma * forward;
        let r = -I * gamma * backward;
        Ok(ScatterResult::new(
            delta,
            t,
            r,
            lambda.iter().copied().collect(),
            dir,
            Solver::Markovian,
            solved.cond,
        ))
    }

    /// Singularity report naming the mode denominator `ε_j = δ − E_j` closest to zero.
    fn singularity(&self, delta: f64, cond: f64) -> Error {
        let nearest = linalg::eigenvalues(&self.hamiltonian.matrix).ok().and_then(|values| {
            values
                .iter()
                .map(|e| Complex64::from(delta) - e)
                .enumerate()
                .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        });
        Error::Singular {
            cond,
            epsilon: nearest.map_or(Complex64::new(0.0, 0.0), |(_, eps)| eps),
            mode: nearest.map(|(j, _)| j),
        }
    }
}

pub fn scatter_markovian(params: &SystemParams, delta: f64, dir: Direction) -> Result<ScatterResult> {
    MarkovianSolver::new(params)?.solve(delta, dir)
}
