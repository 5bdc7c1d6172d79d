//! `taa`: spectra, scattering, pulse dynamics, sweeps and figure datasets for
//! a dimerized atom array coupled to a waveguide.

mod commands;
mod config;
mod error;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use taa_core::{Angle, Axis, AxisParam, Direction, IntensityMode, Observable, Solver, Spacing};

use config::{Grid, RunConfig};
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "taa", version = taa_core::VERSION, about = "Single-photon transport through a topological atom array")]
struct Cli {
    /// TOML config file, or a JSON manifest from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory [default: $TAA_OUT_DIR, else ./taa-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Size of the worker pool for parallel sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(flatten)]
    system: SystemArgs,

    #[command(subcommand)]
    command: Command,
}

/// Physical parameters, in units of Γ.
#[derive(Args, Debug, Default)]
struct SystemArgs {
    /// Number of atoms (odd).
    #[arg(long = "N", global = true, allow_hyphen_values = true)]
    n: Option<usize>,
    #[arg(long = "J0", global = true, allow_hyphen_values = true)]
    j0: Option<f64>,
    /// Dimerization angle, e.g. `0.241pi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<Angle>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Free-space loss (> 0) or gain (< 0).
    #[arg(long = "gamma-f", global = true, allow_hyphen_values = true)]
    gamma_f: Option<f64>,
    /// Inter-atom phase k0·d.
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<Angle>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Position of the first atom, in lattice spacings.
    #[arg(long, global = true, allow_hyphen_values = true)]
    origin: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Collective modes of the effective Hamiltonian.
    Spectrum,
    /// Steady-state transmission and reflection.
    Scatter(ScatterArgs),
    /// Time evolution under a single-photon pulse.
    Dynamics(DynamicsArgs),
    /// Observables over a 1-D or 2-D parameter grid.
    Sweep(SweepArgs),
    /// Critical coupling, Γ_r0 and the time-reversal asymmetry δχ.
    Critical(CriticalArgs),
    /// Figure datasets (all of them when none are named).
    Figures(FiguresArgs),
    /// Randomized invariant checks.
    Selftest(SelftestArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Scatter(_) => "scatter",
            Command::Dynamics(_) => "dynamics",
            Command::Sweep(_) => "sweep",
            Command::Critical(_) => "critical",
            Command::Figures(_) => "figures",
            Command::Selftest(_) => "selftest",
        }
    }
}

#[derive(Args, Debug)]
struct ScatterArgs {
    /// Detuning: a value or `min:max:count`.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<Grid>,
    #[arg(long)]
    direction: Option<Direction>,
    #[arg(long)]
    solver: Option<Solver>,
    /// Solve near the lasing threshold; singular points become annotated rows.
    #[arg(long)]
    allow_threshold: bool,
}

#[derive(Args, Debug)]
struct DynamicsArgs {
    /// Pulse width (1/Γ); the centre moves to 6σ unless `--t-center` is given.
    #[arg(long, allow_hyphen_values = true)]
    sigma_t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_center: Option<f64>,
    /// Flat-top duration between the Gaussian flanks.
    #[arg(long, allow_hyphen_values = true)]
    plateau: Option<f64>,
    /// Carrier detuning.
    #[arg(long, allow_hyphen_values = true)]
    delta_c: Option<f64>,
    #[arg(long)]
    direction: Option<Direction>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    /// Output sampling interval.
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Field positions `min:max:count` (units of d).
    #[arg(long, allow_hyphen_values = true)]
    x: Option<Grid>,
    #[arg(long, value_parser = parse_intensity)]
    intensity: Option<IntensityMode>,
    /// Decay-rate fit window `t0:t1`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    fit_window: Option<[f64; 2]>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// `param:min:max:count[:spacing]`, e.g. `Gamma_f:-0.05:0.05:401:signed-log`.
    /// Repeat for a 2-D grid (first axis outermost).
    #[arg(long, value_parser = parse_axis, allow_hyphen_values = true)]
    axis: Vec<Axis>,
    /// Comma-separated observables.
    #[arg(long, value_delimiter = ',')]
    observables: Option<Vec<Observable>>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    direction: Option<Direction>,
    #[arg(long)]
    solver: Option<Solver>,
    #[arg(long)]
    allow_threshold: bool,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    /// Γ_f/Γ_edge grid `min:max:count`; χ is evaluated at ±Γ_f.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<Grid>,
}

#[derive(Args, Debug)]
struct FiguresArgs {
    /// fig1b fig1d fig2c fig2d fig3a fig3b fig3c fig3d fig4a fig4b fig4c fig4d
    names: Vec<String>,
    /// Points along every figure axis (overrides the defaults).
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_intensity(s: &str) -> Result<IntensityMode, String> {
    match s {
        "coherent" => Ok(IntensityMode::Coherent),
        "mover-sum" | "mover_sum" => Ok(IntensityMode::MoverSum),
        other => Err(format!("unknown intensity mode `{other}` (expected coherent|mover-sum)")),
    }
}

fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("fit window `{s}` must be `t0:t1`"))?;
    let p = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    Ok([p(a)?, p(b)?])
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err(format!("axis `{s}` must be `param:min:max:count[:spacing]`"));
    }
    let p = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number in axis `{s}`"));
    let param: AxisParam = parts[0].parse()?;
    let count = parts[3].parse::<usize>().map_err(|_| format!("`{}` is not a count", parts[3]))?;
    let mut axis = Axis::linear(param, p(parts[1])?, p(parts[2])?, count);
    if let Some(sp) = parts.get(4) {
        axis = axis.with_spacing(sp.parse::<Spacing>()?);
    }
    Ok(axis)
}

fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let s = &cli.system;
    let sys = &mut cfg.system;
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    set!(sys.n, s.n);
    set!(sys.j0, s.j0);
    set!(sys.phi, s.phi);
    set!(sys.gamma, s.gamma);
    set!(sys.gamma_f, s.gamma_f);
    set!(sys.theta, s.theta);
    set!(sys.omega0, s.omega0);
    set!(sys.epsilon, s.epsilon);
    set!(sys.origin, s.origin);
    if cli.out.is_some() {
        cfg.out_dir = cli.out.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }

    match &cli.command {
        Command::Spectrum => {}
        Command::Scatter(a) => {
            let c = &mut cfg.scatter;
            set!(c.delta, a.delta);
            set!(c.direction, a.direction);
            set!(c.solver, a.solver);
            c.allow_threshold |= a.allow_threshold;
        }
        Command::Dynamics(a) => {
            let c = &mut cfg.dynamics;
            set!(c.pulse.sigma_t, a.sigma_t);
            set!(c.pulse.plateau, a.plateau);
            if a.t_center.is_none() && (a.sigma_t.is_some() || a.plateau.is_some()) {
                c.pulse.t_center = 6.0 * c.pulse.sigma_t + 0.5 * c.pulse.plateau;
            }
            set!(c.pulse.t_center, a.t_center);
            set!(c.pulse.delta_c, a.delta_c);
            set!(c.pulse.direction, a.direction);
            set!(c.pulse.amplitude, a.amplitude);
            set!(c.t_max, a.t_max);
            set!(c.dt, a.dt);
            if a.x.is_some() {
                c.x = a.x;
            }
            set!(c.intensity, a.intensity);
            if a.fit_window.is_some() {
                c.fit_window = a.fit_window;
            }
        }
        Command::Sweep(a) => {
            let c = &mut cfg.sweep;
            if !a.axis.is_empty() {
                c.axes = a.axis.clone();
            }
            set!(c.observables, a.observables.clone());
            set!(c.delta, a.delta);
            set!(c.direction, a.direction);
            set!(c.solver, a.solver);
            c.allow_threshold |= a.allow_threshold;
        }
        Command::Critical(a) => set!(cfg.critical.gamma_f_over_edge, a.grid),
        Command::Figures(a) => {
            if a.points.is_some() {
                cfg.figures.points = a.points;
            }
        }
        Command::Selftest(a) => {
            set!(cfg.selftest.draws, a.draws);
            set!(cfg.seed, a.seed);
        }
    }
    cfg.resolve_out_dir();
    Ok(cfg)
}

fn run(cli: &Cli, argv: &[String]) -> CliResult<()> {
    let started = Instant::now();
    let cfg = resolve(cli)?;
    config::check(cfg.common_problems())?;
    if let Some(w) = cfg.workers {
        // a second initialisation (in-process tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let ctx = commands::Context {
        cfg: &cfg,
        argv,
        started,
    };
    match &cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Scatter(_) => commands::scatter(&ctx),
        Command::Dynamics(_) => commands::dynamics(&ctx),
        Command::Sweep(_) => commands::sweep(&ctx),
        Command::Critical(_) => commands::critical(&ctx),
        Command::Figures(a) => figures::run(&ctx, &a.names),
        Command::Selftest(_) => commands::selftest(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = CliError::Config(vec![e.render().to_string().trim().to_string()]);
            let command = std::env::args().nth(1).unwrap_or_default();
            eprintln!("{}", serde_json::to_string(&err.report(&command)).unwrap_or_else(|_| err.to_string()));
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    // per-point spectral diagnostics are only interesting when asked for
    let level = match cli.verbose {
        0 => "warn,taa_core::spectral=error",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let argv: Vec<String> = std::env::args().collect();
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = e.report(cli.command.name());
            eprintln!("{}", serde_json::to_string(&report).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
