use proptest::prelude::*;
use taa_core::invariants::{self, Draw};
use taa_core::{
    build_couplings, build_effective_hamiltonian, eigendecompose, scatter_channels, scatter_markovian, Angle,
    Direction, Error, SystemParams,
};

fn draw() -> impl Strategy<Value = Draw> {
    (0usize..6, 0.3f64..4.0, 0.02f64..0.98, 0.0f64..0.5, -6.0f64..6.0).prop_map(|(k, j0, phi, gf, delta)| Draw {
        params: SystemParams {
            n: 2 * k + 1,
            j0,
            phi: Angle::from_pi(phi),
            gamma_f: gf,
            ..SystemParams::default()
        },
        delta,
    })
}

// Exceptional points are legitimately refused; anything else must hold.
fn residual(r: taa_core::Result<f64>) -> Option<f64> {
    match r {
        Ok(v) => Some(v),
        Err(Error::ExceptionalPoint { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lossless_scattering_is_unitary(d in draw()) {
        prop_assert!(residual(invariants::unitarity(&d)).unwrap() < 1e-10);
    }

    #[test]
    fn absorption_stays_in_unit_interval(d in draw()) {
        prop_assert!(residual(invariants::absorption_bounds(&d)).unwrap() < 1e-10);
    }

    #[test]
    fn transmission_is_reciprocal(d in draw()) {
        prop_assert!(residual(invariants::reciprocity(&d)).unwrap() < 1e-10);
    }

    #[test]
    fn mirrored_array_swaps_reflections(d in draw()) {
        prop_assert!(residual(invariants::mirror_law(&d)).unwrap() < 1e-10);
    }

    #[test]
    fn channels_resum_to_direct_solve(d in draw()) {
        if let Some(v) = residual(invariants::channel_resummation(&d)) {
            prop_assert!(v < 1e-10, "{v}");
        }
    }

    #[test]
    fn modes_are_biorthonormal_and_complete(d in draw()) {
        if let Some(v) = residual(invariants::biorthogonality(&d)) {
            prop_assert!(v < 1e-10, "{v}");
        }
        if let Some(v) = residual(invariants::completeness(&d)) {
            prop_assert!(v < 1e-9, "{v}");
        }
        if let Some(v) = residual(invariants::reconstruction(&d)) {
            prop_assert!(v < 1e-8, "{v}");
        }
    }

    #[test]
    fn spectrum_comes_in_mirror_pairs(d in draw()) {
        if let Some(v) = residual(invariants::spectrum_pairing(&d)) {
            prop_assert!(v < 1e-9, "{v}");
        }
    }

    #[test]
    fn loss_shifts_every_mode_uniformly(d in draw()) {
        if let Some(v) = residual(invariants::uniform_shift(&d)) {
            prop_assert!(v < 1e-10, "{v}");
        }
    }

    #[test]
    fn hamiltonian_is_chiral_at_quarter_turn(d in draw()) {
        prop_assert!(residual(invariants::chiral_symmetry(&d)).unwrap() < 1e-14);
    }

    #[test]
    fn couplings_alternate_around_j0(j0 in 0.1f64..5.0, phi in 0.0f64..1.0, k in 1usize..8) {
        let n = 2 * k + 1;
        let c = build_couplings(j0, Angle::from_pi(phi), n).unwrap();
        prop_assert_eq!(c.len(), n - 1);
        for pair in c.as_slice().chunks(2) {
            prop_assert!((pair[0] + pair[1] - 2.0 * j0).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_plane_only_rephases_reflection(d in draw(), origin in -3i64..4) {
        let shifted = SystemParams { origin, ..d.params.clone() };
        let a = scatter_markovian(&d.params, d.delta, Direction::Left).unwrap();
        let b = scatter_markovian(&shifted, d.delta, Direction::Left).unwrap();
        prop_assert!((a.t - b.t).norm() < 1e-10);
        prop_assert!((a.reflection - b.reflection).abs() < 1e-10);
    }

    #[test]
    fn mode_rates_sum_to_array_trace(d in draw()) {
        let h = build_effective_hamiltonian(&d.params).unwrap();
        let Ok(modes) = eigendecompose(&h) else { return Ok(()); };
        let total: f64 = modes.gamma_j.iter().sum();
        // trace of the dissipative part is N·Γ
        prop_assert!((total - d.params.n as f64).abs() < 1e-9, "{total}");
        if let Ok(ch) = scatter_channels(&d.params, d.delta, Direction::Left) {
            prop_assert_eq!(ch.channels.len(), d.params.n);
        }
    }
}
