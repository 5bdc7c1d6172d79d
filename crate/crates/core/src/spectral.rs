//! Biorthogonal eigendecomposition of the effective Hamiltonian and edge/bulk
//! classification of the collective modes.
//!
//! `H_eff` is complex symmetric, so the left eigenvector of each mode is the
//! transpose of its right eigenvector up to normalization. Each right vector is
//! stored with unit Euclidean norm and its largest entry real and positive; the
//! left vector is `ψ_L = ψ_R / (ψ_Rᵀ ψ_R)`, which makes `ψ_Lᵀ ψ_R = 1`.

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, bilinear};
use crate::model::{build_effective_hamiltonian, EffectiveHamiltonian, SystemParams};

/// Completeness residual above which the point is treated as exceptional.
pub const EXCEPTIONAL_RESIDUAL: f64 = 1e-6;
/// Edge modes further than this from Δ = 0 trigger a warning.
pub const EDGE_SHIFT_WARNING: f64 = 1e-6;
/// Edge polarization below this means the mode is not boundary-localized.
pub const POLARIZATION_WARNING: f64 = 0.1;
/// Dimerization gaps below this (units of Γ) are reported as closed.
pub const GAP_WARNING: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct ModeSet {
    /// `E_j = Δ_j − i(Γ_j + Γ_f)`, sorted by Δ then Γ_j.
    pub energies: Vec<Complex64>,
    pub delta: Vec<f64>,
    /// Waveguide-induced decay `Γ_j = −Im E_j − Γ_f`.
    pub gamma_j: Vec<f64>,
    pub right: Vec<DVector<Complex64>>,
    pub left: Vec<DVector<Complex64>>,
    pub gamma_f: f64,
    pub edge_index: usize,
    pub bulk_indices: Vec<usize>,
    pub biorthogonality_residual: f64,
    pub completeness_residual: f64,
}

impl ModeSet {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn gamma_edge(&self) -> f64 {
        self.gamma_j[self.edge_index]
    }

    /// Eigenvalues for another free-space rate, `E_j(Γ_f') = E_j(Γ_f) − i(Γ_f' − Γ_f)`.
    pub fn energies_at(&self, gamma_f: f64) -> Vec<Complex64> {
        self.delta
            .iter()
            .zip(&self.gamma_j)
            .map(|(&d, &g)| Complex64::new(d, -(g + gamma_f)))
            .collect()
    }

    /// `Σ_j E_j ψ_R ψ_Lᵀ`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.len();
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            h += (&self.right[j] * self.left[j].transpose()) * self.energies[j];
        }
        h
    }

    /// Site-resolved `|ψ_R|²` of mode `j` (unit norm).
    pub fn site_weights(&self, j: usize) -> Vec<f64> {
        self.right[j].iter().map(|z| z.norm_sqr()).collect()
    }

    /// Left eigenvectors from the rows of `R⁻¹`, independent of the
    /// complex-symmetric shortcut. `None` if the right eigenvectors are singular.
    pub fn left_by_inversion(&self) -> Option<Vec<DVector<Complex64>>> {
        let n = self.len();
        let r = DMatrix::from_columns(&self.right);
        let inv = r.lu().try_inverse()?;
        Some((0..n).map(|j| inv.row(j).transpose()).collect())
    }

    /// Largest deviation between the stored left vectors and `left_by_inversion`.
    pub fn left_consistency_residual(&self) -> f64 {
        match self.left_by_inversion() {
            Some(rows) => rows
                .iter()
                .zip(&self.left)
                .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ClassificationWarning {
    /// The edge candidate sits away from zero detuning.
    FrequencyShift { delta: f64 },
    /// The edge candidate is not concentrated at either boundary.
    NotLocalized { polarization: f64 },
    /// The SSH dimerization gap has (nearly) closed.
    GapClosed { gap: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeClassification {
    pub edge_index: usize,
    pub bulk_indices: Vec<usize>,
    /// `|ψ_edge(1)|²` and `|ψ_edge(N)|²`.
    pub weight_left: f64,
    pub weight_right: f64,
    /// Right-half minus left-half weight of the edge mode, in [−1, 1].
    pub polarization: f64,
    pub warnings: Vec<ClassificationWarning>,
}

impl EdgeClassification {
    pub fn is_right_localized(&self) -> bool {
        self.polarization > 0.0
    }
}

pub fn eigendecompose(h: &EffectiveHamiltonian) -> Result<ModeSet> {
    let n = h.dim();
    let eig = linalg::eigen(&h.matrix)?;

    let mut modes: Vec<(Complex64, DVector<Complex64>)> = (0..n)
        .map(|k| (eig.values[k], fix_phase(eig.vectors.column(k).into_owned())))
        .collect();
    modes.sort_by(|a, b| {
        a.0.re
            .total_cmp(&b.0.re)
            .then((-a.0.im).total_cmp(&(-b.0.im)))
    });

    let energies: Vec<Complex64> = modes.iter().map(|m| m.0).collect();
    let right: Vec<DVector<Complex64>> = modes.into_iter().map(|m| m.1).collect();
    let left: Vec<DVector<Complex64>> = right
        .iter()
        .map(|psi| psi / bilinear(psi, psi))
        .collect();

    let mut bio = 0.0f64;
    let mut identity = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let target = if j == k { 1.0 } else { 0.0 };
            bio = bio.max((bilinear(&left[j], &right[k]) - target).norm());
        }
        identity += &right[j] * left[j].transpose();
    }
    let completeness = (identity - DMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !(completeness <= EXCEPTIONAL_RESIDUAL) {
        return Err(Error::ExceptionalPoint {
            residual: completeness,
        });
    }

    let delta: Vec<f64> = energies.iter().map(|e| e.re).collect();
    let gamma_j: Vec<f64> = energies.iter().map(|e| -e.im - h.gamma_f).collect();
    let mut set = ModeSet {
        energies,
        delta,
        gamma_j,
        right,
        left,
        gamma_f: h.gamma_f,
        edge_index: 0,
        bulk_indices: Vec::new(),
        biorthogonality_residual: bio,
        completeness_residual: completeness,
    };
    let class = classify_modes(&set);
    set.edge_index = class.edge_index;
    set.bulk_indices = class.bulk_indices;

    #[cfg(debug_assertions)]
    {
        let residual = set.left_consistency_residual();
        debug_assert!(
            residual < 1e-6,
            "left eigenvectors disagree with R^-1 rows (residual {residual:e})"
        );
    }
    Ok(set)
}

/// Unit 2-norm, largest-magnitude entry real positive. Near-ties resolve to
/// the lowest site index so the choice is platform independent.
fn fix_phase(mut v: DVector<Complex64>) -> DVector<Complex64> {
    let norm = v.norm();
    if norm == 0.0 {
        return v;
    }
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .position(|z| z.norm() >= peak * (1.0 - 1e-9))
        .unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    let scale = phase.conj() / norm;
    v *= scale;
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
    v
}

/// Edge mode = smallest |Δ_j| (ties → smallest Γ_j); everything else is bulk.
pub fn classify_modes(modes: &ModeSet) -> EdgeClassification {
    let n = modes.len();
    let tie = 1e-12 * modes.delta.iter().fold(1.0f64, |m, d| m.max(d.abs()));
    let mut edge = 0;
    for j in 1..n {
        let dj = modes.delta[j].abs();
        let de = modes.delta[edge].abs();
        if dj < de - tie || ((dj - de).abs() <= tie && modes.gamma_j[j] < modes.gamma_j[edge]) {
            edge = j;
        }
    }
    let bulk_indices: Vec<usize> = (0..n).filter(|&j| j != edge).collect();

    let weights = modes.site_weights(edge);
    let total: f64 = weights.iter().sum();
    let center = (n as f64 - 1.0) / 2.0;
    let polarization = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * (i as f64 - center).signum())
        .sum::<f64>()
        / total;

    let mut warnings = Vec::new();
    let delta_edge = modes.delta[edge];
    if delta_edge.abs() > EDGE_SHIFT_WARNING {
        warn!("edge mode detuned by {delta_edge:.3e} (frame misalignment or theta != 3pi/2)");
        warnings.push(ClassificationWarning::FrequencyShift { delta: delta_edge });
    }
    if n > 1 && polarization.abs() < POLARIZATION_WARNING {
        warn!("edge candidate is not boundary-localized (polarization {polarization:.3})");
        warnings.push(ClassificationWarning::NotLocalized { polarization });
    }

    EdgeClassification {
        edge_index: edge,
        bulk_indices,
        weight_left: weights[0] / total,
        weight_right: weights[n - 1] / total,
        polarization,
        warnings,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeReport {
    pub gamma_edge: f64,
    pub delta_edge: f64,
    pub dimerization_gap: f64,
    pub classification: EdgeClassification,
}

impl EdgeReport {
    pub fn warnings(&self) -> &[ClassificationWarning] {
        &self.classification.warnings
    }
}

/// Build → eigendecompose → classify. Γ_edge does not depend on Γ_f.
pub fn edge_report(params: &SystemParams) -> Result<EdgeReport> {
    let modes = eigendecompose(&build_effective_hamiltonian(params)?)?;
    let mut classification = classify_modes(&modes);
    let gap = params.dimerization_gap();
    if params.n > 1 && gap < GAP_WARNING {
        warn!("dimerization gap closed ({gap:.3e}); edge mode is not topologically protected");
        classification
            .warnings
            .push(ClassificationWarning::GapClosed { gap });
    }
    Ok(EdgeReport {
        gamma_edge: modes.gamma_edge(),
        delta_edge: modes.delta[modes.edge_index],
        dimerization_gap: gap,
        classification,
    })
}

pub fn edge_decay_rate(params: &SystemParams) -> Result<f64> {
    Ok(edge_report(params)?.gamma_edge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::model::assemble_effective_hamiltonian;

    fn modes_for(params: &SystemParams) -> ModeSet {
        eigendecompose(&build_effective_hamiltonian(params).unwrap()).unwrap()
    }

    #[test]
    fn single_atom_mode() {
        let m = modes_for(&SystemParams::single_atom(0.2));
        assert_eq!(m.len(), 1);
        assert_eq!(m.energies[0], Complex64::new(0.0, -1.2));
        assert!((m.gamma_j[0] - 1.0).abs() < 1e-15);
        assert_eq!(m.right[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(m.edge_index, 0);
        assert!(classify_modes(&m).warnings.is_empty());
    }

    #[test]
    fn two_atom_analytic_pair() {
        // E = −iΓ ± (J − Γ)
        let j = 2.5;
        let h = assemble_effective_hamiltonian(&[j], 1.0, 0.0, Angle::from_pi(1.5));
        let m = eigendecompose(&h).unwrap();
        assert!((m.energies[0] - Complex64::new(-(j - 1.0), -1.0)).norm() < 1e-13);
        assert!((m.energies[1] - Complex64::new(j - 1.0, -1.0)).norm() < 1e-13);
        for g in &m.gamma_j {
            assert!((g - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reference_array_spectrum() {
        let m = modes_for(&SystemParams::reference(Angle::from_pi(0.2), 0.0));
        let e = m.edge_index;
        assert!(m.delta[e].abs() < 1e-10);
        assert!((m.gamma_edge() - 0.013).abs() < 1e-3, "{}", m.gamma_edge());
        let superradiant = m.gamma_j.iter().filter(|&&g| g > 1.0).count();
        assert_eq!(superradiant, 2);
        assert!(m.biorthogonality_residual < 1e-10);
        assert!(m.completeness_residual < 1e-9);
    }

    #[test]
    fn right_edge_state_with_odd_site_support() {
        let m = modes_for(&SystemParams::reference(Angle::from_pi(0.2), 0.0));
        let class = classify_modes(&m);
        assert!(class.is_right_localized());
        let w = m.site_weights(m.edge_index);
        let odd: f64 = w.iter().step_by(2).sum();
        assert!(odd > 0.99, "odd-site weight {odd}");
        let peak = w.iter().cloned().fold(0.0, f64::max);
        assert_eq!(w[6], peak);
        assert!(class.warnings.is_empty(), "{:?}", class.warnings);
    }

    #[test]
    fn reversed_dimerization_moves_edge_left() {
        let m = modes_for(&SystemParams::reference(Angle::from_pi(0.8), 0.0));
        let class = classify_modes(&m);
        assert!(!class.is_right_localized());
        assert!(class.weight_left > class.weight_right);
        let w = m.site_weights(m.edge_index);
        assert_eq!(w[0], w.iter().cloned().fold(0.0, f64::max));
    }

    #[test]
    fn edge_decay_rate_examples() {
        let g = edge_decay_rate(&SystemParams::reference(Angle::from_pi(0.2), 0.0)).unwrap();
        assert!((g - 0.013).abs() <= 1e-3);
        let g1 = edge_decay_rate(&SystemParams::single_atom(0.0)).unwrap();
        assert!((g1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_gap_warns() {
        let report = edge_report(&SystemParams::reference(Angle::from_pi(0.5), 0.0)).unwrap();
        assert!(report.gamma_edge.is_finite());
        assert!(report
            .warnings()
            .iter()
            .any(|w| matches!(w, ClassificationWarning::GapClosed { gap } if *gap < 1e-12)));
    }

    #[test]
    fn gamma_f_is_a_uniform_shift() {
        let base = modes_for(&SystemParams::reference(Angle::from_pi(0.2), 0.0));
        let lossy = modes_for(&SystemParams::reference(Angle::from_pi(0.2), 0.37));
        for j in 0..7 {
            let shifted = base.energies[j] - Complex64::new(0.0, 0.37);
            assert!((lossy.energies[j] - shifted).norm() < 1e-10);
            assert!((lossy.gamma_j[j] - base.gamma_j[j]).abs() < 1e-10);
            let overlap = base.right[j].dotc(&lossy.right[j]).norm();
            assert!((overlap - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn reconstruction_and_left_vectors() {
        let params = SystemParams::reference(Angle::from_pi(0.3), 0.1);
        let h = build_effective_hamiltonian(&params).unwrap();
        let m = eigendecompose(&h).unwrap();
        let diff = (m.reconstruct() - &h.matrix).norm() / h.matrix.norm();
        assert!(diff < 1e-10, "{diff:e}");
        assert!(m.left_consistency_residual() < 1e-9);
    }

    #[test]
    fn phase_convention_is_deterministic() {
        let m = modes_for(&SystemParams::reference(Angle::from_pi(0.2), 0.0));
        for psi in &m.right {
            assert!((psi.norm() - 1.0).abs() < 1e-13);
            let peak = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let top = psi.iter().find(|z| z.norm() >= peak * (1.0 - 1e-9)).unwrap();
            assert_eq!(top.im, 0.0);
            assert!(top.re > 0.0);
        }
    }
}
