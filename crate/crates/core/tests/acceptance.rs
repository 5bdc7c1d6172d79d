//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits non-zero if any criterion fails.

use std::process::ExitCode;

use taa_core::analysis::{golden_section_log, MINIMIZER_TOL};
use taa_core::invariants::run_suite;
use taa_core::scattering::scatter_channels;
use taa_core::spectral::{classify_modes, eigendecompose};
use taa_core::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn reference(phi: f64) -> SystemParams {
    SystemParams::reference(Angle::from_pi(phi), 0.0)
}

fn c1_edge_decay_rate() -> Result<Verdict> {
    let g = edge_decay_rate(&reference(0.2))?;
    Ok(verdict((g - 0.013).abs() <= 0.001, format!("Gamma_edge = {g:.9}")))
}

fn c2_edge_zero_shift() -> Result<Verdict> {
    let modes = eigendecompose(&build_effective_hamiltonian(&reference(0.2))?)?;
    let shift = modes.delta[classify_modes(&modes).edge_index].abs();
    Ok(verdict(shift < 1e-10, format!("|Delta_edge| = {shift:.3e}")))
}

fn c3_complete_reflection() -> Result<Verdict> {
    let s = scatter_markovian(&reference(0.2), 0.0, Direction::Left)?;
    let sum = (s.transmission + s.reflection - 1.0).abs();
    Ok(verdict(
        s.transmission <= 1e-6 && sum < 1e-10,
        format!("T = {:.3e}, |T+R-1| = {sum:.3e}", s.transmission),
    ))
}

fn c4_critical_absorption() -> Result<Verdict> {
    let params = reference(0.2);
    let g = edge_decay_rate(&params)?;
    let eta = scatter_markovian(&params.with_gamma_f(g), 0.0, Direction::Left)?.absorption;
    let (argmax, _, at_edge) = golden_section_log(
        |gf| Ok(-scatter_markovian(&params.with_gamma_f(gf), 0.0, Direction::Left)?.absorption),
        0.1 * g,
        10.0 * g,
        MINIMIZER_TOL * 1e-3,
    )?;
    let offset = (argmax - g).abs() / g;
    Ok(verdict(
        eta >= 0.95 && offset <= 0.2 && !at_edge,
        format!("eta(Gamma_edge) = {eta:.6}, argmax eta = {argmax:.9} ({:.3}% from Gamma_edge)", 100.0 * offset),
    ))
}

fn c5_single_atom() -> Result<Verdict> {
    let eta = scatter_markovian(&SystemParams::single_atom(1.0), 0.0, Direction::Left)?.absorption;
    Ok(verdict((eta - 0.5).abs() <= 1e-10, format!("eta = {eta:.15}")))
}

fn c6_channel_values() -> Result<Verdict> {
    // atoms at x_i = i·d (first atom one spacing from the origin)
    let params = SystemParams {
        origin: 1,
        ..reference(0.2)
    };
    let g_r0 = find_gamma_r0(&params)?;
    let at_zero = scatter_channels(&params, 0.0, Direction::Left)?.edge_r.im;
    let at_r0 = scatter_channels(&params.with_gamma_f(g_r0), 0.0, Direction::Left)?.edge_r.im;
    let shifted = scatter_channels(&reference(0.2), 0.0, Direction::Left)?.edge_r.im;
    Ok(verdict(
        (at_zero - 2.0).abs() <= 0.1 && (at_r0 - 1.0).abs() <= 0.1 && (shifted + at_zero).abs() < 1e-12,
        format!(
            "Im xi_edge^r = {at_zero:.4} (Gamma_f = 0), {at_r0:.4} (Gamma_f = Gamma_r0 = {g_r0:.9}); with x_1 = 0: {shifted:.4}"
        ),
    ))
}

fn max_delta_chi(phi: f64, points: usize) -> Result<(f64, f64)> {
    let params = reference(phi);
    let g = edge_decay_rate(&params)?;
    let mut worst = (0.0, 0.0);
    for k in 0..points {
        let gf = 0.9 * g * k as f64 / (points - 1) as f64;
        let dc = delta_chi(&params, gf)?;
        if dc > worst.0 {
            worst = (dc, gf / g);
        }
    }
    Ok(worst)
}

fn c7_time_reversal_locus() -> Result<Verdict> {
    let (locus, at_locus) = max_delta_chi(0.241, 181)?;
    let (off, at_off) = max_delta_chi(0.2, 181)?;
    Ok(verdict(
        locus < 0.1 && off > 0.1,
        format!(
            "max delta_chi over |Gamma_f| <= 0.9 Gamma_edge: {locus:.4} at 0.241pi (at {at_locus:.3} Gamma_edge, need < 0.1), {off:.4} at 0.2pi (at {at_off:.3} Gamma_edge, need > 0.1)"
        ),
    ))
}

fn c8_directional_amplification() -> Result<Verdict> {
    let params = reference(0.241);
    let g = edge_decay_rate(&params)?;
    let p = params.with_gamma_f(-0.999 * g);
    let l = scatter_markovian(&p, 0.0, Direction::Left)?;
    let r = scatter_markovian(&p, 0.0, Direction::Right)?;
    let ratio = l.reflection / r.reflection;
    let dt = (l.transmission - r.transmission).abs();
    Ok(verdict(
        ratio > 1e2 && dt < 1e-10,
        format!("R = {:.4e}, R' = {:.4e}, R/R' = {ratio:.3e}, |T-T'| = {dt:.3e}", l.reflection, r.reflection),
    ))
}

fn c9_amplification_damping() -> Result<Verdict> {
    let params = reference(0.2);
    let g = edge_decay_rate(&params)?;
    let g_r0 = find_gamma_r0(&params)?;
    let grid: Vec<f64> = (1..=300).map(|k| -0.01 * g * k as f64).collect();
    let scan = amplification_scan(&params, &grid, Direction::Right, false)?;
    let Some(m) = scan.transition else {
        return Ok(verdict(false, "no interior minimum of R' on the gain side".into()));
    };
    let offset = (m.gamma_f + g_r0).abs() / g_r0;
    Ok(verdict(
        offset <= 0.05 && m.reflection < 1e-2,
        format!(
            "R' minimum at Gamma_f = {:.9} (-Gamma_r0 = {:.9}, {:.4}% apart), R' = {:.3e}",
            m.gamma_f,
            -g_r0,
            100.0 * offset,
            m.reflection
        ),
    ))
}

fn c10_cross_validation() -> Result<Verdict> {
    let params = SystemParams {
        omega0: 1e4,
        ..reference(0.2)
    };
    // a 1e-3 grid plus every mode frequency in range, so no resonance is skipped
    let modes = eigendecompose(&build_effective_hamiltonian(&params)?)?;
    let mut deltas: Vec<f64> = (0..=20_000).map(|k| -10.0 + 1e-3 * k as f64).collect();
    deltas.extend(modes.delta.iter().copied().filter(|d| d.abs() <= 10.0));
    let narrow: Vec<f64> = (0..modes.len())
        .filter(|&j| j != classify_modes(&modes).edge_index && modes.gamma_j[j] < 1e-2)
        .map(|j| modes.delta[j])
        .collect();
    let (mut worst, mut at, mut away) = (0.0f64, 0.0, 0.0f64);
    for &delta in &deltas {
        for dir in [Direction::Left, Direction::Right] {
            let m = scatter_markovian(&params, delta, dir)?;
            let (e, _) = scatter_exact(&params, delta, dir)?;
            let diff = (m.transmission - e.transmission).abs().max((m.reflection - e.reflection).abs());
            if diff > worst {
                worst = diff;
                at = delta;
            }
            if narrow.iter().all(|d| (delta - d).abs() > 0.05) {
                away = away.max(diff);
            }
        }
    }
    let suite = run_suite(100, 20_240_611);
    let failed: Vec<String> = suite
        .outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| format!("{} (worst {:.2e})", o.name, o.worst))
        .collect();
    let resum = suite
        .outcomes
        .iter()
        .find(|o| o.name == "channel_resummation")
        .map_or(f64::NAN, |o| o.worst);
    Ok(verdict(
        worst < 1e-2 && failed.is_empty(),
        format!(
            "max |dT|,|dR| exact vs Markovian = {worst:.3e} at delta = {at:.4} ({away:.3e} more than 0.05 from the narrow bulk resonances at {narrow:.4?}); channel resummation worst {resum:.2e}; {} invariant checks x 100 draws, failures: {}",
            suite.outcomes.len(),
            if failed.is_empty() { "none".to_string() } else { failed.join(", ") }
        ),
    ))
}

fn c11_dynamics() -> Result<Verdict> {
    let base = reference(0.2);
    let g = edge_decay_rate(&base)?;

    let pulse = PulseSpec::gaussian(2.0);
    let critical = evolve(&base.with_gamma_f(g), &pulse, 400.0, 0.5)?;
    let rate = fit_decay_rate(&critical, (60.0, 300.0))?;
    let expected = 2.0 * (g + g);
    let rate_ok = (rate - expected).abs() <= 0.3 * expected;

    let lossless = evolve(&base, &pulse, 1500.0, 1.0)?;
    let f = lossless.flux;
    let flux_err = ((f.transmitted + f.reflected) - f.incident).abs() / f.incident;
    let flux_ok = f.residual < 1e-8 && flux_err < 1e-3;

    let long = PulseSpec::flat_top(2.0, 1200.0);
    let t_end = long.t_center + 0.5 * long.plateau;
    let traj = evolve(&base, &long, t_end, 1.0)?;
    let k = traj.times.len() - 1;
    let drive = long.field(traj.times[k]);
    let steady = scatter_markovian(&base, 0.0, Direction::Left)?;
    let amp_err = ((traj.forward[k] / drive - steady.t).norm()).max((traj.backward[k] / drive - steady.r).norm());
    let xs: Vec<f64> = (-20..=80).map(|m| 0.1 * m as f64).collect();
    let last = Trajectory {
        times: vec![traj.times[k]],
        lambda: vec![traj.lambda[k].clone()],
        ..traj.clone()
    };
    let dynamic = &reconstruct_field(&last, &xs, IntensityMode::Coherent).intensity[0];
    let (_, field) = scatter_exact(&base, 0.0, Direction::Left)?;
    let stationary = field_profile(&field, &xs);
    let peak = stationary.iter().cloned().fold(0.0, f64::max);
    let profile_err = dynamic
        .iter()
        .zip(&stationary)
        .map(|(d, s)| (d / drive.norm_sqr() - s).abs() / peak)
        .fold(0.0, f64::max);
    let long_ok = amp_err < 1e-2 && profile_err < 1e-2;

    Ok(verdict(
        rate_ok && flux_ok && long_ok,
        format!(
            "decay rate {rate:.6} vs 2(Gamma_edge+Gamma_f) = {expected:.6}; flux error {flux_err:.2e} (residual {:.1e}); flat-top |dt|,|dr| = {amp_err:.2e}, profile error {profile_err:.2e}",
            f.residual
        ),
    ))
}

fn c12_localization() -> Result<Verdict> {
    let params = reference(0.2);
    let (res, field) = scatter_exact(&params, 0.0, Direction::Left)?;
    let last = params.position(params.n - 1);
    let first = params.position(0);
    let xs: Vec<f64> = (0..=6000).map(|m| first + (last - first) * m as f64 / 6000.0).collect();
    let profile = field_profile(&field, &xs);
    let (imax, peak) = profile
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let x_peak = xs[imax];
    let in_right_quarter = x_peak >= first + 0.75 * (last - first);
    let pops: Vec<f64> = res.lambda.iter().map(|z| z.norm_sqr()).collect();
    // sites counted from 1: odd sites are even indices
    let odd: f64 = pops.iter().step_by(2).sum();
    let even: f64 = pops.iter().skip(1).step_by(2).sum();
    let ratio = even / odd;
    Ok(verdict(
        peak > 10.0 && in_right_quarter && ratio < 1e-2,
        format!("peak intensity {peak:.2} at x = {x_peak:.3} d (array {first}..{last}), even/odd population {ratio:.3e}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Verdict>); 12] = [
        ("edge decay rate", c1_edge_decay_rate),
        ("edge zero shift", c2_edge_zero_shift),
        ("complete reflection", c3_complete_reflection),
        ("critical-coupling absorption", c4_critical_absorption),
        ("single-atom absorption", c5_single_atom),
        ("edge channel values", c6_channel_values),
        ("time-reversal locus", c7_time_reversal_locus),
        ("directional amplification", c8_directional_amplification),
        ("amplification-damping transition", c9_amplification_damping),
        ("solver cross-validation and invariants", c10_cross_validation),
        ("pulse dynamics", c11_dynamics),
        ("photon localization", c12_localization),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        if !v.pass {
            failures += 1;
        }
        println!("criterion {:>2} {} {name}: {}", k + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
