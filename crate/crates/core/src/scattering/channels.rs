//! Eigenmode channels: `r = −i Σ_j Ξ_j/ε_j`, `t = 1 − i Σ_j Ξ̃_j/ε_j` with
//! `Ξ_j = Γ (Vᵀψ_R)(ψ_LᵀV)`, `Ξ̃_j = Γ (V†ψ_R)(ψ_LᵀV)` and
//! `ε_j = δ − Δ_j + i(Γ_j + Γ_f)`. The factor Γ is what makes the channel sum
//! reproduce the direct input-output solution.

use num_complex::Complex64;
use serde::Serialize;

use super::{drive_vector, Direction};
use crate::error::Result;
use crate::linalg::bilinear;
use crate::model::{build_effective_hamiltonian, SystemParams};
use crate::spectral::{eigendecompose, ModeSet};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, Serialize)]
pub struct Channel {
    pub delta_j: f64,
    pub gamma_j: f64,
    /// `ε_j`.
    pub denominator: Complex64,
    /// `Ξ_j` (reflection) and `Ξ̃_j` (transmission).
    pub spectrum_r: Complex64,
    pub spectrum_t: Complex64,
    /// `ξ_j = Ξ_j/ε_j` and `ξ̃_j = Ξ̃_j/ε_j`.
    pub xi_r: Complex64,
    pub xi_t: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelDecomposition {
    pub delta: f64,
    pub gamma_f: f64,
    pub direction: Direction,
    pub channels: Vec<Channel>,
    pub edge_index: usize,
    pub edge_r: Complex64,
    pub edge_t: Complex64,
    /// Sums over all non-edge channels.
    pub bulk_r: Complex64,
    pub bulk_t: Complex64,
}

impl ChannelDecomposition {
    pub fn reflection(&self) -> Complex64 {
        -I * (self.edge_r + self.bulk_r)
    }

    pub fn transmission(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - I * (self.edge_t + self.bulk_t)
    }
}

/// Channel amplitudes from an existing decomposition. `modes` may have been
/// computed at any Γ_f: the eigenvectors do not depend on it, and
/// `params.gamma_f` enters only through `ε_j`.
pub fn channels_from_modes(
    modes: &ModeSet,
    params: &SystemParams,
    delta: f64,
    dir: Direction,
) -> ChannelDecomposition {
    let v = drive_vector(params, dir);
    let v_conj = v.map(|z| z.conj());
    let channels: Vec<Channel> = (0..modes.len())
        .map(|j| {
            let into_mode = bilinear(&modes.left[j], &v);
            let spectrum_r = params.gamma * bilinear(&v, &modes.right[j]) * into_mode;
            let spectrum_t = params.gamma * bilinear(&v_conj, &modes.right[j]) * into_mode;
            let denominator = Complex64::new(delta - modes.delta[j], modes.gamma_j[j] + params.gamma_f);
            Channel {
                delta_j: modes.delta[j],
                gamma_j: modes.gamma_j[j],
                denominator,
                spectrum_r,
                spectrum_t,
                xi_r: spectrum_r / denominator,
                xi_t: spectrum_t / denominator,
            }
        })
        .collect();
    let edge = modes.edge_index;
    let bulk = |f: fn(&Channel) -> Complex64| -> Complex64 {
        modes.bulk_indices.iter().map(|&j| f(&channels[j])).sum()
    };
    ChannelDecomposition {
        delta,
        gamma_f: params.gamma_f,
        direction: dir,
        edge_index: edge,
        edge_r: channels[edge].xi_r,
        edge_t: channels[edge].xi_t,
        bulk_r: bulk(|c| c.xi_r),
        bulk_t: bulk(|c| c.xi_t),
        channels,
    }
}

/// Refuses (with [`crate::Error::ExceptionalPoint`]) where the modes do not form a basis.
pub fn scatter_channels(params: &SystemParams, delta: f64, dir: Direction) -> Result<ChannelDecomposition> {
    let modes = eigendecompose(&build_effective_hamiltonian(params)?)?;
    Ok(channels_from_modes(&modes, params, delta, dir))
}
