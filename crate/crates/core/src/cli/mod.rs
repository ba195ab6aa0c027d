//! Command-line front end. Every flag mirrors a config key and overrides it.

mod runs;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::{Error, Result};

pub use runs::{
    analyse_configuration, creutz_estimates, run_bps, run_higgsmass, run_magflow, run_simulate, run_verify, run_vortex,
    simulation_config, CreutzEstimate, MagflowOutcome, MagflowRow, SimulateOutcome, KNOWN_KEYS,
};

pub const THREADS_ENV: &str = "DUALMEISSNER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dualmeissner", version, about = "Lattice SU(2), abelian projection, BPS monopoles and dual GL flux tubes")]
pub struct Cli {
    /// Worker threads (overrides DUALMEISSNER_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Heatbath/overrelaxation Monte Carlo with plaquette measurements and snapshots.
    Simulate(SimulateArgs),
    /// MAG fixing, monopole densities and Wilson/abelian loops over snapshots.
    Magflow(MagflowArgs),
    /// BPS monopole on a grid: charge, energy, Bogomolny residual.
    Bps(BpsArgs),
    /// Dual Ginzburg-Landau flux-tube profiles (comma lists sweep the parameters).
    Vortex(VortexArgs),
    /// Higgs mass and e-folds from (volume, Chern-Simons) invariants.
    Higgsmass(HiggsArgs),
    /// Check a run manifest against the files it lists.
    Verify {
        manifest: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// `L` or `Lx,Ly,Lz,Lt`.
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `cold` or `hot`.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub n_therm: Option<usize>,
    #[arg(long)]
    pub n_sweeps: Option<usize>,
    #[arg(long)]
    pub measure_every: Option<usize>,
    #[arg(long)]
    pub overrelax: Option<usize>,
    /// 0 disables snapshots.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MagflowArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Snapshot file or directory of `.su2` files.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub max_loop: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub dump_monopoles: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BpsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub e: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VortexArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HiggsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub vol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub cs: Option<f64>,
    #[arg(long)]
    pub name: Option<String>,
    /// CSV with `name,volume,cs` rows.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// `hbar` (default) or `h`.
    #[arg(long)]
    pub planck: Option<String>,
    /// Also write `higgsmass.csv` and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load(path: &Option<PathBuf>) -> Result<Config> {
    let cfg = match path {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    cfg.check_known(KNOWN_KEYS)?;
    Ok(cfg)
}

fn overlay(cfg: &mut Config, pairs: &[(&str, Option<String>)]) {
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, v);
        }
    }
}

fn s<T: ToString>(x: &Option<T>) -> Option<String> {
    x.as_ref().map(ToString::to_string)
}

fn path(x: &Option<PathBuf>) -> Option<String> {
    x.as_ref().map(|p| p.to_string_lossy().into_owned())
}

/// Resolves the flag/config overlay for one subcommand and runs it.
pub fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => {
            let mut c = load(&a.config)?;
            overlay(&mut c, &[
                ("lattice.beta", s(&a.beta)),
                ("lattice.dims", a.dims.clone()),
                ("lattice.seed", s(&a.seed)),
                ("lattice.start", a.start.clone()),
                ("run.n_therm", s(&a.n_therm)),
                ("run.n_sweeps", s(&a.n_sweeps)),
                ("run.measure_every", s(&a.measure_every)),
                ("run.overrelax", s(&a.overrelax)),
                ("run.snapshot_every", s(&a.snapshot_every)),
                ("output.dir", path(&a.out)),
            ]);
            run_simulate(&c).map(|_| ())
        }
        Command::Magflow(a) => {
            let mut c = load(&a.config)?;
            overlay(&mut c, &[
                ("magflow.input", path(&a.input)),
                ("mag.tol", s(&a.tol)),
                ("mag.max_iter", s(&a.max_iter)),
                ("mag.omega", s(&a.omega)),
                ("magflow.max_loop", s(&a.max_loop)),
                ("magflow.bins", s(&a.bins)),
                ("magflow.dump_monopoles", s(&a.dump_monopoles)),
                ("output.dir", path(&a.out)),
            ]);
            run_magflow(&c).map(|_| ())
        }
        Command::Bps(a) => {
            let mut c = load(&a.config)?;
            overlay(&mut c, &[
                ("bps.v", s(&a.v)),
                ("bps.e", s(&a.e)),
                ("bps.lambda", s(&a.lambda)),
                ("bps.grid", s(&a.grid)),
                ("bps.h", s(&a.h)),
                ("bps.radius", s(&a.radius)),
                ("output.dir", path(&a.out)),
            ]);
            run_bps(&c).map(|_| ())
        }
        Command::Vortex(a) => {
            let mut c = load(&a.config)?;
            overlay(&mut c, &[
                ("vortex.g", a.g.clone()),
                ("vortex.lambda", a.lambda.clone()),
                ("vortex.v", a.v.clone()),
                ("vortex.n", a.n.clone()),
                ("vortex.rmax", s(&a.rmax)),
                ("vortex.points", s(&a.points)),
                ("vortex.tol", s(&a.tol)),
                ("vortex.max_iter", s(&a.max_iter)),
                ("output.dir", path(&a.out)),
            ]);
            run_vortex(&c).map(|_| ())
        }
        Command::Higgsmass(a) => {
            let mut c = load(&a.config)?;
            overlay(&mut c, &[
                ("topo.vol", s(&a.vol)),
                ("topo.cs", s(&a.cs)),
                ("topo.name", a.name.clone()),
                ("topo.table", path(&a.table)),
                ("topo.planck", a.planck.clone()),
                ("output.dir", path(&a.out)),
            ]);
            run_higgsmass(&c).map(|_| ())
        }
        Command::Verify { manifest } => run_verify(manifest).map(|_| ()),
    }
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
                Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Config("thread count must be >= 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads(cli.threads).and_then(|_| dispatch(&cli.command));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let class = e.class();
            eprintln!("error[{}]: {e}", class.as_str());
            class.exit_code()
        }
    }
}
