//! Datasets behind each figure panel. Every panel writes `<name>.csv` (plus
//! auxiliary tables where a panel has an inset or overlay curve) and a
//! `<name>.meta.json` sidecar with parameters, grids and column units.

use rayon::prelude::*;
use serde_json::{json, Value};
use taa_core::analysis::{amplification_scan, AmplificationScan, THRESHOLD_EXCLUSION};
use taa_core::model::coherent_hamiltonian;
use taa_core::{
    absorption_map, build_effective_hamiltonian, edge_decay_rate, eigendecompose, field_profile, scatter_markovian,
    sweep, Angle, Axis, AxisParam, Direction, EffectiveHamiltonian, Observable, PiecewiseField, Spacing, SweepSpec,
    SweepTable, SystemParams,
};

use crate::commands::{gamma_r0_or_none, Context};
use crate::error::{CliError, CliResult};
use crate::output::{header, num, write_manifest, Outputs};

pub const NAMES: [&str; 12] = [
    "fig1b", "fig1d", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d",
];

/// Loss rate at which the reference cell is critically coupled.
const CRITICAL_GAMMA_F: f64 = 0.013;
const LOCUS_PHI: f64 = 0.241;

struct Panel<'a> {
    out: &'a mut Outputs,
    base: SystemParams,
    points: Option<usize>,
}

impl Panel<'_> {
    fn n(&self, default: usize) -> usize {
        self.points.unwrap_or(default).max(2)
    }

    fn odd(&self, default: usize) -> usize {
        let n = self.n(default);
        n | 1
    }

    fn meta(&mut self, name: &str, description: &str, params: &SystemParams, columns: Value, extra: Value) -> CliResult<()> {
        let meta = json!({
            "figure": name,
            "description": description,
            "parameters": params,
            "units": "rates and frequencies in Gamma, positions in d, phi as a multiple of pi",
            "columns": columns,
            "generated_by": format!("taa {} figures {name}", taa_core::VERSION),
            "extra": extra,
        });
        self.out.json(&format!("{name}.meta.json"), &meta)?;
        Ok(())
    }
}

pub fn run(ctx: &Context, names: &[String]) -> CliResult<()> {
    let unknown: Vec<String> = names
        .iter()
        .filter(|n| !NAMES.contains(&n.as_str()))
        .map(|n| format!("unknown figure `{n}` (expected one of {})", NAMES.join(", ")))
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::Config(unknown));
    }
    if ctx.cfg.figures.points == Some(0) {
        return Err(CliError::Config(vec!["figures.points must be at least 2".to_string()]));
    }
    let selected: Vec<&str> = if names.is_empty() {
        NAMES.to_vec()
    } else {
        NAMES.iter().copied().filter(|n| names.iter().any(|m| m == n)).collect()
    };
    let mut out = ctx.outputs()?;
    let mut summary = serde_json::Map::new();
    for name in selected {
        let mut panel = Panel {
            out: &mut out,
            base: ctx.cfg.system.clone(),
            points: ctx.cfg.figures.points,
        };
        let extra = match name {
            "fig1b" => fig1b(&mut panel)?,
            "fig1d" => fig1d(&mut panel)?,
            "fig2c" => fig2c(&mut panel)?,
            "fig2d" => fig2d(&mut panel)?,
            "fig3a" => fig3a(&mut panel)?,
            "fig3b" => fig3b(&mut panel)?,
            "fig3c" => fig3c(&mut panel)?,
            "fig3d" => fig3d(&mut panel)?,
            "fig4a" => fig4a(&mut panel)?,
            "fig4b" => fig4b(&mut panel)?,
            "fig4c" => fig4c(&mut panel)?,
            "fig4d" => fig4d(&mut panel)?,
            _ => unreachable!("checked above"),
        };
        summary.insert(name.to_string(), extra);
    }
    ctx.finish_figures(&mut out, Value::Object(summary))
}

impl Context<'_> {
    fn finish_figures(&self, out: &mut Outputs, summary: Value) -> CliResult<()> {
        write_manifest(out, "figures", self.argv, self.cfg, self.started, summary)?;
        for f in out.files() {
            println!("{}", out.dir().join(f).display());
        }
        Ok(())
    }
}

fn cols(spec: &[(&str, &str)]) -> Value {
    Value::Array(spec.iter().map(|(c, u)| json!({ "name": c, "unit": u })).collect())
}

fn table_rows(t: &SweepTable) -> impl Iterator<Item = Vec<String>> + '_ {
    t.rows.iter().map(|r| {
        let mut row: Vec<String> = r.coords.iter().chain(&r.values).map(|&v| num(v)).collect();
        row.push(r.note.clone().unwrap_or_default());
        row
    })
}

fn write_table(p: &mut Panel, name: &str, t: &SweepTable) -> CliResult<()> {
    let mut h = t.columns.clone();
    h.push("note".to_string());
    p.out.csv(name, &h, table_rows(t))?;
    Ok(())
}

fn scan_rows<'a>(scans: &'a [&'a AmplificationScan]) -> impl Iterator<Item = Vec<String>> + 'a {
    (0..scans[0].rows.len()).map(move |k| {
        let mut row = vec![num(scans[0].rows[k].gamma_f)];
        let mut notes = Vec::new();
        for s in scans {
            let r = &s.rows[k];
            row.extend([num(r.transmission), num(r.reflection), num(r.transmission.ln()), num(r.reflection.ln()), num(r.cond)]);
            if let Some(n) = &r.note {
                notes.push(n.clone());
            }
        }
        notes.dedup();
        row.push(notes.join("; "));
        row
    })
}

/// Closed-array spectrum (no waveguide) and mode profiles.
fn fig1b(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0);
    let h = coherent_hamiltonian(&params)?.map(|x| x.into());
    let modes = eigendecompose(&EffectiveHamiltonian {
        matrix: h,
        gamma: params.gamma,
        gamma_f: 0.0,
    })?;
    let mut h = header(&["j", "energy", "edge_flag"]);
    h.extend((1..=params.n).map(|i| format!("psi2_site{i}")));
    let rows = (0..modes.len()).map(|j| {
        let mut row = vec![(j + 1).to_string(), num(modes.delta[j]), u8::from(j == modes.edge_index).to_string()];
        row.extend(modes.site_weights(j).into_iter().map(num));
        row
    });
    p.out.csv("fig1b.csv", &h, rows)?;
    let edge = modes.site_weights(modes.edge_index);
    let extra = json!({ "edge_energy": modes.delta[modes.edge_index], "edge_weight_last_site": edge[params.n - 1] });
    p.meta(
        "fig1b",
        "Eigenenergies and site-resolved |psi|^2 of the isolated dimerized chain",
        &params,
        cols(&[("j", "index"), ("energy", "Gamma"), ("edge_flag", "0/1"), ("psi2_site*", "probability")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Steady-state localization: atomic excitation and field intensity.
fn fig1d(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0);
    let res = scatter_markovian(&params, 0.0, Direction::Left)?;
    let field = PiecewiseField::from_markovian(&res, &params);
    let n = params.n as f64;
    let count = p.n(40 * (params.n + 4) + 1);
    let x0 = params.origin as f64 - 2.0;
    let xs: Vec<f64> = (0..count).map(|k| x0 + (n + 3.0) * k as f64 / (count - 1) as f64).collect();
    let intensity = field_profile(&field, &xs);
    p.out.csv(
        "fig1d.csv",
        &header(&["x", "intensity"]),
        xs.iter().zip(&intensity).map(|(&x, &v)| vec![num(x), num(v)]),
    )?;
    let eps2 = params.epsilon * params.epsilon;
    let pops: Vec<f64> = res.lambda.iter().map(|z| eps2 * z.norm_sqr()).collect();
    p.out.csv(
        "fig1d_atoms.csv",
        &header(&["i", "x", "abs_lambda2"]),
        pops.iter()
            .enumerate()
            .map(|(i, &v)| vec![(i + 1).to_string(), num(params.position(i)), num(v)]),
    )?;
    let even: f64 = pops.iter().skip(1).step_by(2).sum();
    let odd: f64 = pops.iter().step_by(2).sum();
    let (peak_i, peak) = intensity
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let extra = json!({
        "peak_intensity": peak,
        "peak_x": xs[peak_i],
        "even_odd_population_ratio": even / odd,
        "T": res.transmission,
        "R": res.reflection,
    });
    p.meta(
        "fig1d",
        "Field intensity along the waveguide (fig1d.csv) and atomic excitation (fig1d_atoms.csv) under a resonant left-incident drive",
        &params,
        cols(&[("x", "d"), ("intensity", "incident intensity"), ("abs_lambda2", "epsilon^2 |Lambda|^2")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Collective frequencies and decay rates versus φ.
fn fig2c(p: &mut Panel) -> CliResult<Value> {
    let count = p.n(201);
    let params = p.base.with_gamma_f(0.0);
    let phis: Vec<f64> = (0..count).map(|k| k as f64 / (count - 1) as f64).collect();
    let spectra: Vec<_> = phis
        .par_iter()
        .map(|&phi| build_effective_hamiltonian(&params.with_phi(Angle::from_pi(phi))).and_then(|h| eigendecompose(&h)))
        .collect();
    let mut skipped = Vec::new();
    let mut rows = Vec::new();
    for (&phi, s) in phis.iter().zip(&spectra) {
        match s {
            Ok(m) => rows.extend((0..m.len()).map(|j| {
                vec![
                    num(phi),
                    (j + 1).to_string(),
                    num(m.delta[j]),
                    num(m.gamma_j[j]),
                    u8::from(j == m.edge_index).to_string(),
                ]
            })),
            Err(_) => skipped.push(phi),
        }
    }
    p.out.csv("fig2c.csv", &header(&["phi_over_pi", "j", "Delta", "Gamma_j", "edge_flag"]), rows)?;
    let gamma_edge = edge_decay_rate(&params)?;
    let extra = json!({ "gamma_edge_at_base_phi": gamma_edge, "skipped_phi": skipped });
    p.meta(
        "fig2c",
        "Frequencies Delta_j and decay rates Gamma_j of the collective modes versus phi",
        &params,
        cols(&[("phi_over_pi", "pi"), ("j", "index"), ("Delta", "Gamma"), ("Gamma_j", "Gamma"), ("edge_flag", "0/1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Resonant absorption over (J0, φ) at fixed loss, with the Γ_edge = Γ_f curve.
fn fig2d(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(CRITICAL_GAMMA_F);
    let (nj, np) = (p.n(101), p.n(101));
    let j0: Vec<f64> = (0..nj).map(|k| 0.2 + 3.8 * k as f64 / (nj - 1) as f64).collect();
    let phi: Vec<Angle> = (0..np).map(|k| Angle::from_pi(k as f64 / (np - 1) as f64)).collect();
    let map = absorption_map(&params, &j0, &phi)?;
    let opt = |v: Option<f64>| num(v.unwrap_or(f64::NAN));
    let rows = (0..np).flat_map(|a| {
        let map = &map;
        (0..nj).map(move |k| {
            vec![num(map.j0[k]), num(map.phi[a].pi_multiple()), opt(map.eta[a][k]), opt(map.gamma_edge[a][k])]
        })
    });
    p.out.csv("fig2d.csv", &header(&["J0", "phi_over_pi", "eta", "Gamma_edge"]), rows)?;
    p.out.csv(
        "fig2d_contour.csv",
        &header(&["J0", "phi_over_pi"]),
        map.contour.iter().map(|(j, f)| vec![num(*j), num(f.pi_multiple())]),
    )?;
    let extra = json!({ "gamma_f": params.gamma_f, "contour_points": map.contour.len() });
    p.meta(
        "fig2d",
        "Absorption eta at delta = 0 over (J0, phi); fig2d_contour.csv traces Gamma_edge = Gamma_f",
        &params,
        cols(&[("J0", "Gamma"), ("phi_over_pi", "pi"), ("eta", "1"), ("Gamma_edge", "Gamma")]),
        extra.clone(),
    )?;
    Ok(extra)
}

fn signed_log(param: AxisParam, lim: f64, count: usize, floor: f64) -> Vec<f64> {
    Axis {
        floor: Some(floor),
        ..Axis::linear(param, -lim, lim, count).with_spacing(Spacing::SignedLog)
    }
    .values()
}

/// Resonant T and R across loss and gain; inset: absorption lineshape at critical coupling.
fn fig3a(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0);
    let gamma_edge = edge_decay_rate(&params)?;
    let grid = signed_log(AxisParam::GammaF, 0.05, p.odd(401), 1e-5);
    let scan = amplification_scan(&params, &grid, Direction::Left, false)?;
    let h = header(&["Gamma_f", "T", "R", "lnT", "lnR", "cond", "note"]);
    p.out.csv("fig3a.csv", &h, scan_rows(&[&scan]))?;

    let crit = params.with_gamma_f(gamma_edge);
    let count = p.odd(1201);
    let deltas: Vec<f64> = (0..count).map(|k| -6.0 + 12.0 * k as f64 / (count - 1) as f64).collect();
    let inset: Vec<_> = deltas
        .par_iter()
        .map(|&d| scatter_markovian(&crit, d, Direction::Left))
        .collect::<Result<_, _>>()?;
    p.out.csv(
        "fig3a_inset.csv",
        &header(&["delta", "T", "R", "eta"]),
        inset.iter().map(|s| vec![num(s.delta), num(s.transmission), num(s.reflection), num(s.absorption)]),
    )?;
    let extra = json!({ "gamma_edge": gamma_edge, "inset_gamma_f": gamma_edge, "excluded_within": THRESHOLD_EXCLUSION * gamma_edge });
    p.meta(
        "fig3a",
        "T and R at delta = 0 versus Gamma_f (loss > 0, gain < 0); fig3a_inset.csv: absorption versus delta at Gamma_f = Gamma_edge",
        &params,
        cols(&[("Gamma_f", "Gamma"), ("T", "1"), ("R", "1"), ("lnT", "1"), ("lnR", "1"), ("cond", "1"), ("delta", "Gamma"), ("eta", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// ln R and ln(T+R) on the loss side, with their minimizers.
fn fig3b(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0);
    let axis = Axis::linear(AxisParam::GammaF, 1e-4, 0.1, p.n(301)).with_spacing(Spacing::Log);
    let spec = SweepSpec::new(params.clone(), vec![axis], vec![Observable::R, Observable::LnTPlusR]);
    let table = sweep(&spec)?;
    let h = header(&["Gamma_f", "lnR", "ln_T_plus_R"]);
    let rows = table.rows.iter().map(|r| vec![num(r.coords[0]), num(r.values[0].ln()), num(r.values[1])]);
    p.out.csv("fig3b.csv", &h, rows)?;
    let argmin = table
        .rows
        .iter()
        .filter(|r| r.values[1].is_finite())
        .min_by(|a, b| a.values[1].total_cmp(&b.values[1]))
        .map(|r| r.coords[0]);
    let extra = json!({
        "gamma_edge": edge_decay_rate(&params)?,
        "gamma_r0": gamma_r0_or_none(&params)?,
        "grid_argmin_ln_T_plus_R": argmin,
    });
    p.meta(
        "fig3b",
        "ln R and ln(T + R) at delta = 0 versus loss Gamma_f",
        &params,
        cols(&[("Gamma_f", "Gamma"), ("lnR", "1"), ("ln_T_plus_R", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

const XI: [Observable; 4] = [
    Observable::ImXiEdgeR,
    Observable::ImXiBulkR,
    Observable::ImXiEdgeT,
    Observable::ImXiBulkT,
];

/// Edge and bulk channel strengths versus loss (atom 1 at x = d).
fn fig3c(p: &mut Panel) -> CliResult<Value> {
    let params = SystemParams {
        origin: 1,
        ..p.base.with_gamma_f(0.0)
    };
    let gamma_r0 = gamma_r0_or_none(&params)?;
    let axis = Axis::linear(AxisParam::GammaF, 0.0, 0.05, p.n(201));
    let table = sweep(&SweepSpec::new(params.clone(), vec![axis], XI.to_vec()))?;
    write_table(p, "fig3c.csv", &table)?;
    let at = |g: f64| -> CliResult<Value> {
        let t = sweep(&SweepSpec::new(params.clone(), vec![Axis::linear(AxisParam::GammaF, g, g + 1e-12, 2)], XI.to_vec()))?;
        Ok(json!({ "gamma_f": g, "im_xi_edge_r": t.rows[0].values[0], "im_xi_bulk_r": t.rows[0].values[1] }))
    };
    let extra = json!({
        "point_A": at(0.0)?,
        "point_B": match gamma_r0 { Some(g) => at(g)?, None => Value::Null },
    });
    p.meta(
        "fig3c",
        "Im xi of the edge and bulk channels for reflection and transmission (left incidence, delta = 0) versus Gamma_f",
        &params,
        cols(&[("Gamma_f", "Gamma"), ("im_xi_*", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Lineshapes just short of the lasing threshold.
fn fig3d(p: &mut Panel) -> CliResult<Value> {
    let gamma_edge = edge_decay_rate(&p.base)?;
    let params = p.base.with_gamma_f(-gamma_edge * (1.0 - 2.0 * THRESHOLD_EXCLUSION));
    let line = |lim: f64, count: usize| -> CliResult<Vec<Vec<String>>> {
        let ds: Vec<f64> = (0..count).map(|k| -lim + 2.0 * lim * k as f64 / (count - 1) as f64).collect();
        let res: Vec<_> = ds
            .par_iter()
            .map(|&d| scatter_markovian(&params, d, Direction::Left))
            .collect::<Result<_, _>>()?;
        Ok(res
            .iter()
            .map(|s| vec![num(s.delta), num(s.transmission), num(s.reflection), num(s.cond)])
            .collect())
    };
    let h = header(&["delta", "T", "R", "cond"]);
    let main = line(0.05, p.odd(801))?;
    p.out.csv("fig3d.csv", &h, main)?;
    let inset = line(6.0, p.odd(1201))?;
    p.out.csv("fig3d_inset.csv", &h, inset)?;
    let extra = json!({ "gamma_edge": gamma_edge, "gamma_f": params.gamma_f });
    p.meta(
        "fig3d",
        "T and R versus delta at Gamma_f just above -Gamma_edge (fig3d.csv near resonance, fig3d_inset.csv across the bands)",
        &params,
        cols(&[("delta", "Gamma"), ("T", "1"), ("R", "1"), ("cond", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Time-reversal asymmetry δχ over (φ, Γ_f) with Γ_edge and Γ_r0 curves.
fn fig4a(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0);
    let (np, ng) = (p.n(200), p.n(200));
    let axes = vec![
        Axis::linear(AxisParam::Phi, 0.1, 0.4, np),
        Axis::linear(AxisParam::GammaF, 0.0, 0.03, ng),
    ];
    let table = sweep(&SweepSpec::new(params.clone(), axes.clone(), vec![Observable::DeltaChi]))?;
    write_table(p, "fig4a.csv", &table)?;
    let phis = axes[0].values();
    let curves: Vec<(f64, f64, Option<f64>)> = phis
        .par_iter()
        .map(|&phi| {
            let q = params.with_phi(Angle::from_pi(phi));
            Ok((phi, edge_decay_rate(&q)?, gamma_r0_or_none(&q)?))
        })
        .collect::<CliResult<_>>()?;
    p.out.csv(
        "fig4a_curves.csv",
        &header(&["phi_over_pi", "Gamma_edge", "Gamma_r0"]),
        curves
            .iter()
            .map(|(f, e, r)| vec![num(*f), num(*e), num(r.unwrap_or(f64::NAN))]),
    )?;
    let locus = params.with_phi(Angle::from_pi(LOCUS_PHI));
    let extra = json!({
        "threshold": 0.1,
        "locus_phi_over_pi": LOCUS_PHI,
        "locus_gamma_edge": edge_decay_rate(&locus)?,
        "locus_gamma_r0": gamma_r0_or_none(&locus)?,
    });
    p.meta(
        "fig4a",
        "delta_chi = |chi(Gamma_f) + chi(-Gamma_f)| for left incidence over (phi, Gamma_f); fig4a_curves.csv gives Gamma_edge and Gamma_r0 versus phi",
        &params,
        cols(&[("phi_over_pi", "pi"), ("Gamma_f", "Gamma"), ("delta_chi", "1"), ("Gamma_edge", "Gamma"), ("Gamma_r0", "Gamma")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Left and right incidence on the time-reversal locus.
fn fig4b(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0).with_phi(Angle::from_pi(LOCUS_PHI));
    let grid = signed_log(AxisParam::GammaF, 0.03, p.odd(401), 1e-5);
    let left = amplification_scan(&params, &grid, Direction::Left, false)?;
    let right = amplification_scan(&params, &grid, Direction::Right, false)?;
    let h = header(&[
        "Gamma_f", "T", "R", "lnT", "lnR", "cond", "T_prime", "R_prime", "lnT_prime", "lnR_prime", "cond_prime", "note",
    ]);
    p.out.csv("fig4b.csv", &h, scan_rows(&[&left, &right]))?;
    let max_t_gap = left
        .rows
        .iter()
        .zip(&right.rows)
        .filter(|(a, b)| a.note.is_none() && b.note.is_none())
        .map(|(a, b)| (a.transmission - b.transmission).abs())
        .fold(0.0, f64::max);
    let extra = json!({ "gamma_edge": left.gamma_edge, "max_abs_T_minus_T_prime": max_t_gap });
    p.meta(
        "fig4b",
        "T, R (left incidence) and T', R' (right incidence) at delta = 0 versus Gamma_f",
        &params,
        cols(&[("Gamma_f", "Gamma"), ("T/R/T_prime/R_prime", "1"), ("ln*", "1"), ("cond*", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Right-incidence gain scan: amplification then damping of R′.
fn fig4c(p: &mut Panel) -> CliResult<Value> {
    let params = p.base.with_gamma_f(0.0);
    let axis = Axis::linear(AxisParam::GammaF, -0.03, -1e-4, p.n(401)).with_spacing(Spacing::Log);
    let scan = amplification_scan(&params, &axis.values(), Direction::Right, false)?;
    let h = header(&["Gamma_f", "T_prime", "R_prime", "lnT_prime", "lnR_prime", "cond", "note"]);
    p.out.csv("fig4c.csv", &h, scan_rows(&[&scan]))?;
    let extra = json!({
        "gamma_edge": scan.gamma_edge,
        "gamma_r0": gamma_r0_or_none(&params)?,
        "transition": scan.transition,
    });
    p.meta(
        "fig4c",
        "T' and R' (right incidence) at delta = 0 in the gain regime",
        &params,
        cols(&[("Gamma_f", "Gamma"), ("T_prime", "1"), ("R_prime", "1"), ("cond", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}

/// Reflection channel strengths for right incidence in the gain regime.
fn fig4d(p: &mut Panel) -> CliResult<Value> {
    let params = SystemParams {
        origin: 1,
        ..p.base.with_gamma_f(0.0)
    };
    let axis = Axis::linear(AxisParam::GammaF, -0.03, -1e-4, p.n(401)).with_spacing(Spacing::Log);
    let mut spec = SweepSpec::new(
        params.clone(),
        vec![axis],
        vec![Observable::ImXiEdgeR, Observable::ImXiBulkR, Observable::R],
    );
    spec.direction = Direction::Right;
    let table = sweep(&spec)?;
    write_table(p, "fig4d.csv", &table)?;
    let extra = json!({ "gamma_edge": edge_decay_rate(&params)?, "direction": "right" });
    p.meta(
        "fig4d",
        "Im xi of the edge and bulk reflection channels for right incidence versus gain",
        &params,
        cols(&[("Gamma_f", "Gamma"), ("im_xi_edge_r", "1"), ("im_xi_bulk_r", "1"), ("R", "1")]),
        extra.clone(),
    )?;
    Ok(extra)
}
