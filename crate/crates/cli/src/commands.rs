use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use taa_core::analysis::{check_threshold, THRESHOLD_EXCLUSION};
use taa_core::{
    build_effective_hamiltonian, edge_report, eigendecompose, evolve, find_gamma_r0, fit_decay_rate, invariants,
    reconstruct_field, scatter_exact, scatter_markovian, time_reversal_report, Error, ScatterResult, Solver,
};

use crate::config::{check, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{header, num, write_manifest, Outputs};

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub argv: &'a [String],
    pub started: Instant,
}

impl Context<'_> {
    pub fn outputs(&self) -> CliResult<Outputs> {
        Outputs::new(self.cfg.out_dir())
    }

    pub fn finish(&self, out: &mut Outputs, command: &str, summary: Value) -> CliResult<()> {
        write_manifest(out, command, self.argv, self.cfg, self.started, summary)?;
        for f in out.files() {
            println!("{}", out.dir().join(f).display());
        }
        Ok(())
    }
}

pub fn spectrum(ctx: &Context) -> CliResult<()> {
    let params = &ctx.cfg.system;
    let modes = eigendecompose(&build_effective_hamiltonian(params)?)?;
    let report = edge_report(params)?;
    let mut cols = header(&["j", "Delta", "Gamma_j", "edge_flag"]);
    cols.extend((1..=params.n).map(|i| format!("psiR2_site{i}")));
    let rows = (0..modes.len()).map(|j| {
        let mut row = vec![
            (j + 1).to_string(),
            num(modes.delta[j]),
            num(modes.gamma_j[j]),
            u8::from(j == modes.edge_index).to_string(),
        ];
        row.extend(modes.site_weights(j).into_iter().map(num));
        row
    });
    let mut out = ctx.outputs()?;
    out.csv("spectrum.csv", &cols, rows)?;
    ctx.finish(
        &mut out,
        "spectrum",
        json!({
            "gamma_edge": report.gamma_edge,
            "delta_edge": report.delta_edge,
            "edge_mode": modes.edge_index + 1,
            "classification": report.classification,
            "completeness_residual": modes.completeness_residual,
        }),
    )
}

pub fn scatter(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.cfg.scatter;
    let params = &ctx.cfg.system;
    check(cfg.delta.problems("scatter.delta"))?;
    if cfg.solver == Solver::Exact {
        params.check_markov_guard()?;
    }
    let gamma_edge = edge_report(params)?.gamma_edge;
    let exclusion = if cfg.allow_threshold { 0.0 } else { THRESHOLD_EXCLUSION };
    check_threshold(params.gamma_f, gamma_edge, exclusion)?;

    let deltas = cfg.delta.values();
    let results: Vec<taa_core::Result<ScatterResult>> = deltas
        .par_iter()
        .map(|&d| match cfg.solver {
            Solver::Markovian => scatter_markovian(params, d, cfg.direction),
            Solver::Exact => scatter_exact(params, d, cfg.direction).map(|(s, _)| s),
        })
        .collect();
    let mut rows = Vec::with_capacity(deltas.len());
    let mut singular = 0;
    for (&d, res) in deltas.iter().zip(results) {
        match res {
            Ok(s) => rows.push(vec![
                num(d),
                num(s.t.re),
                num(s.t.im),
                num(s.transmission),
                num(s.reflection),
                num(s.absorption),
                num(s.cond),
            ]),
            Err(Error::Singular { cond, .. }) if cfg.allow_threshold => {
                singular += 1;
                let mut row = vec![num(d)];
                row.extend(std::iter::repeat_n(num(f64::NAN), 5));
                row.push(num(cond));
                rows.push(row);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut out = ctx.outputs()?;
    out.csv("scatter.csv", &header(&["delta", "ReT", "ImT", "T", "R", "eta", "cond"]), rows)?;
    ctx.finish(
        &mut out,
        "scatter",
        json!({ "gamma_edge": gamma_edge, "points": deltas.len(), "singular_points": singular }),
    )
}

pub fn dynamics(ctx: &Context) -> CliResult<()> {
    let cfg = &ctx.cfg.dynamics;
    let params = &ctx.cfg.system;
    let x_grid = cfg.x_grid(params.n);
    let mut problems = x_grid.problems("dynamics.x");
    if let Err(Error::InvalidParams(p)) = cfg.pulse.validate() {
        problems.extend(p);
    }
    if let Some([t0, t1]) = cfg.fit_window {
        if !(t0 < t1) {
            problems.push(format!("dynamics.fit_window: need t0 < t1, got [{t0}, {t1}]"));
        }
    }
    check(problems)?;
    if let Err(e) = cfg.pulse.check_narrowband(params.dimerization_gap()) {
        log::warn!("{e}");
    }

    let traj = evolve(params, &cfg.pulse, cfg.t_max, cfg.dt)?;
    let xs = x_grid.values();
    let field = reconstruct_field(&traj, &xs, cfg.intensity);
    let decay_rate = match cfg.fit_window {
        Some([t0, t1]) => Some(fit_decay_rate(&traj, (t0, t1))?),
        None => None,
    };

    let mut out = ctx.outputs()?;
    let field_rows = field.times.iter().enumerate().flat_map(|(k, &t)| {
        let row = &field.intensity[k];
        field.x.iter().zip(row).map(move |(&x, &v)| vec![num(t), num(x), num(v)])
    });
    out.csv("dynamics_field.csv", &header(&["t", "x", "intensity"]), field_rows)?;
    let atom_rows = traj.times.iter().enumerate().flat_map(|(k, &t)| {
        traj.lambda[k]
            .iter()
            .enumerate()
            .map(move |(i, z)| vec![num(t), (i + 1).to_string(), num(z.norm_sqr())])
    });
    out.csv("dynamics_atoms.csv", &header(&["t", "i", "abs_lambda2"]), atom_rows)?;
    for w in &traj.warnings {
        log::warn!("{w:?}");
    }
    ctx.finish(
        &mut out,
        "dynamics",
        json!({
            "flux": traj.flux,
            "flux_imbalance": traj.flux.imbalance(),
            "decay_rate": decay_rate,
            "steps": traj.stats,
            "warnings": traj.warnings,
        }),
    )
}

pub fn sweep(ctx: &Context) -> CliResult<()> {
    let spec = ctx.cfg.sweep.spec(&ctx.cfg.system);
    let table = taa_core::sweep(&spec)?;
    let mut cols = table.columns.clone();
    cols.push("note".to_string());
    let failed = table.rows.iter().filter(|r| r.note.is_some()).count();
    let rows = table.rows.iter().map(|r| {
        let mut row: Vec<String> = r.coords.iter().chain(&r.values).map(|&v| num(v)).collect();
        row.push(r.note.clone().unwrap_or_default());
        row
    });
    let mut out = ctx.outputs()?;
    out.csv("sweep.csv", &cols, rows)?;
    ctx.finish(
        &mut out,
        "sweep",
        json!({ "cells": table.rows.len(), "annotated_cells": failed }),
    )
}

pub fn critical(ctx: &Context) -> CliResult<()> {
    let grid = ctx.cfg.critical.gamma_f_over_edge;
    let mut problems = grid.problems("critical.gamma_f_over_edge");
    if grid.min < 0.0 {
        problems.push(format!("critical.gamma_f_over_edge: values must be >= 0, got min {}", grid.min));
    }
    check(problems)?;
    let params = &ctx.cfg.system;
    let gamma_edge = edge_report(params)?.gamma_edge;
    let fractions = grid.values();
    let gammas: Vec<f64> = fractions.iter().map(|f| f * gamma_edge).collect();
    let report = time_reversal_report(params, &gammas)?;
    let rows = (0..gammas.len()).map(|k| {
        vec![
            num(fractions[k]),
            num(gammas[k]),
            num(report.chi_plus[k]),
            num(report.chi_minus[k]),
            num(report.delta_chi[k]),
        ]
    });
    let mut out = ctx.outputs()?;
    out.csv(
        "critical.csv",
        &header(&["gamma_f_over_edge", "Gamma_f", "chi_plus", "chi_minus", "delta_chi"]),
        rows,
    )?;
    let max = report.max_delta_chi();
    ctx.finish(
        &mut out,
        "critical",
        json!({
            "gamma_edge": gamma_edge,
            "gamma_r0": report.gamma_r0,
            "gamma_r0_minus_edge": report.gamma_r0.map(|g| g - gamma_edge),
            "max_delta_chi": max,
        }),
    )
}

pub fn selftest(ctx: &Context) -> CliResult<()> {
    let draws = ctx.cfg.selftest.draws;
    if draws == 0 {
        return Err(CliError::Config(vec!["selftest.draws must be at least 1".to_string()]));
    }
    let report = invariants::run_suite(draws, ctx.cfg.seed);
    for o in &report.outcomes {
        println!(
            "{:<20} {}  worst {:.3e} (tol {:.0e}), {} skipped",
            o.name,
            if o.passed() { "PASS" } else { "FAIL" },
            o.worst,
            o.tolerance,
            o.skipped
        );
    }
    let passed = report.passed();
    println!("{} checks, {}", report.outcomes.len(), if passed { "all passed" } else { "FAILURES" });
    let mut out = ctx.outputs()?;
    out.json("selftest.json", &report)?;
    write_manifest(&mut out, "selftest", ctx.argv, ctx.cfg, ctx.started, json!({ "passed": passed }))?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.outcomes.iter().filter(|o| !o.passed()).map(|o| o.name).collect();
        Err(CliError::Numerical(format!("invariant checks failed: {}", failed.join(", "))))
    }
}

/// Γ_r0 if the reflection has an interior minimum.
pub fn gamma_r0_or_none(params: &taa_core::SystemParams) -> CliResult<Option<f64>> {
    match find_gamma_r0(params) {
        Ok(g) => Ok(Some(g)),
        Err(Error::NoInteriorMinimum { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}
