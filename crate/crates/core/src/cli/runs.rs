use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bps::{self, BpsSummary, ContinuumConfig};
use crate::config::Config;
use crate::dual_gl::{self, GLParameters, SolveOptions, SweepRow};
use crate::error::{Error, Result};
use crate::lattice::{self, snapshot, Chain, SimulationConfig, Start};
use crate::mag::{self, MagFixOptions};
use crate::manifest::{self, ManifestBuilder, Mismatch};
use crate::stats::jackknife;
use crate::topo::{self, HiggsRow, PhysicalConstants, PlanckConvention, TopoInvariants};

pub const KNOWN_KEYS: &[&str] = &[
    "lattice.beta",
    "lattice.dims",
    "lattice.seed",
    "lattice.start",
    "run.n_therm",
    "run.n_sweeps",
    "run.measure_every",
    "run.overrelax",
    "run.snapshot_every",
    "magflow.input",
    "magflow.max_loop",
    "magflow.bins",
    "magflow.dump_monopoles",
    "mag.tol",
    "mag.max_iter",
    "mag.omega",
    "bps.v",
    "bps.e",
    "bps.lambda",
    "bps.grid",
    "bps.h",
    "bps.radius",
    "vortex.g",
    "vortex.lambda",
    "vortex.v",
    "vortex.n",
    "vortex.rmax",
    "vortex.points",
    "vortex.tol",
    "vortex.max_iter",
    "topo.vol",
    "topo.cs",
    "topo.name",
    "topo.table",
    "topo.planck",
    "output.dir",
];

fn out_dir(cfg: &Config, command: &str) -> Result<PathBuf> {
    let dir = cfg.get_str("output.dir").map(PathBuf::from).unwrap_or_else(|| Path::new("out").join(command));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Runs `body` and finalizes the manifest, marking it partial on failure.
fn with_manifest<T>(
    dir: &Path,
    command: &str,
    cfg: &Config,
    seed: Option<u64>,
    body: impl FnOnce(&mut ManifestBuilder) -> Result<T>,
) -> Result<T> {
    let mut m = ManifestBuilder::new(dir, command, cfg.snapshot(), seed);
    match body(&mut m) {
        Ok(v) => {
            m.finish()?;
            Ok(v)
        }
        Err(e) => {
            m.abort(&e);
            Err(e)
        }
    }
}

fn write_file(m: &mut ManifestBuilder, name: &str, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<PathBuf> {
    let path = m.root().join(name);
    let mut w = BufWriter::new(fs::File::create(&path)?);
    f(&mut w)?;
    w.flush()?;
    drop(w);
    m.add(&path)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOutcome {
    pub dir: PathBuf,
    pub measurements: Vec<(u64, f64)>,
    pub snapshots: Vec<PathBuf>,
}

pub fn simulation_config(cfg: &Config) -> Result<(SimulationConfig, usize)> {
    let beta: f64 = cfg.require("lattice.beta")?;
    let dims = cfg.get_dims("lattice.dims")?.unwrap_or([4; 4]);
    let seed = cfg.get_or("lattice.seed", 0u64)?;
    let mut sc = SimulationConfig::new(beta, dims, seed);
    sc.start = match cfg.get_str("lattice.start").unwrap_or("hot") {
        "hot" => Start::Hot,
        "cold" => Start::Cold,
        other => return Err(Error::Config(format!("lattice.start must be 'hot' or 'cold', got '{other}'"))),
    };
    sc.n_therm = cfg.get_or("run.n_therm", 0)?;
    sc.n_sweeps = cfg.get_or("run.n_sweeps", 10)?;
    sc.measure_every = cfg.get_or("run.measure_every", 1)?;
    sc.overrelax_per_heatbath = cfg.get_or("run.overrelax", 0)?;
    let snapshot_every = cfg.get_or("run.snapshot_every", 0)?;
    sc.validate()?;
    Ok((sc, snapshot_every))
}

/// `measurements.csv` (`sweep,avg_plaquette`), optional `snapshots/*.su2`, manifest.
pub fn run_simulate(cfg: &Config) -> Result<SimulateOutcome> {
    let (sc, snapshot_every) = simulation_config(cfg)?;
    let dir = out_dir(cfg, "simulate")?;
    with_manifest(&dir, "simulate", cfg, Some(sc.seed), |m| {
        let mut chain = Chain::new(&sc)?;
        chain.run(sc.n_therm)?;
        let mut measurements = Vec::new();
        let mut snapshots = Vec::new();
        if snapshot_every > 0 {
            fs::create_dir_all(dir.join("snapshots"))?;
        }
        let csv_path = dir.join("measurements.csv");
        let mut w = BufWriter::new(fs::File::create(&csv_path)?);
        writeln!(w, "sweep,avg_plaquette")?;
        for k in 1..=sc.n_sweeps {
            chain.step()?;
            let sweep = chain.sweeps_done();
            if k % sc.measure_every == 0 {
                let p = lattice::average_plaquette(&chain.field);
                writeln!(w, "{sweep},{p}")?;
                measurements.push((sweep, p));
            }
            if snapshot_every > 0 && k % snapshot_every == 0 {
                let path = dir.join("snapshots").join(format!("cfg_{sweep:08}.su2"));
                snapshot::write(&path, &chain.field, sc.beta, sweep)?;
                m.add(&path)?;
                snapshots.push(path);
            }
        }
        w.flush()?;
        drop(w);
        m.add(&csv_path)?;
        let mean = measurements.iter().map(|x| x.1).sum::<f64>() / measurements.len().max(1) as f64;
        println!("beta={} dims={:?} sweeps={} <P>={mean:.6}", sc.beta, sc.dims, chain.sweeps_done());
        Ok(SimulateOutcome { dir: dir.clone(), measurements, snapshots })
    })
}

/// Per-configuration MAG-projected observables.
#[derive(Debug, Clone, PartialEq)]
pub struct MagflowRow {
    pub source: PathBuf,
    pub sweep: u64,
    pub beta: f64,
    pub avg_plaquette: f64,
    pub report: mag::MagFixReport,
    pub monopole_density: f64,
    /// `[R−1][T−1]`.
    pub wilson: Vec<Vec<f64>>,
    pub abelian_q2: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CreutzEstimate {
    pub observable: &'static str,
    pub r: usize,
    pub t: usize,
    /// `None` when some averaged loop is not positive.
    pub value: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagflowOutcome {
    pub dir: PathBuf,
    pub rows: Vec<MagflowRow>,
    pub skipped: Vec<PathBuf>,
    pub creutz: Vec<CreutzEstimate>,
}

fn snapshot_inputs(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "su2"))
            .collect();
        files.sort();
        Ok(files)
    } else if input.exists() {
        Ok(vec![input.to_path_buf()])
    } else {
        Err(Error::Config(format!("magflow input {} does not exist", input.display())))
    }
}

/// Analyses one configuration: MAG, monopoles and loops up to `max_loop`.
pub fn analyse_configuration(
    field: &lattice::GaugeField,
    opts: &MagFixOptions,
    max_loop: usize,
) -> Result<(mag::MagFixReport, mag::MonopoleCurrent, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let m = max_loop.min(field.geometry().min_extent() / 2);
    let wilson = lattice::wilson_loop_table(field, m)?;
    let (fixed, report) = mag::mag_fix_with(field, opts)?;
    let af = mag::abelian_project(&fixed);
    let mc = mag::monopole_current(&af);
    let abelian = mag::abelian_wilson_loop_table(&af, m, 2)?;
    Ok((report, mc, wilson, abelian))
}

/// Jackknife Creutz ratios `χ(R,T)`, `2 ≤ R,T ≤ m`, from per-configuration loop tables.
pub fn creutz_estimates(observable: &'static str, tables: &[Vec<Vec<f64>>], bins: usize) -> Vec<CreutzEstimate> {
    let Some(first) = tables.first() else { return Vec::new() };
    let m = first.len();
    let samples: Vec<Vec<f64>> = tables.iter().map(|t| t.iter().flatten().copied().collect()).collect();
    let mut out = Vec::new();
    for r in 2..=m {
        for t in 2..=m {
            let f = |mean: &[f64]| {
                let table: Vec<Vec<f64>> = mean.chunks(m).map(<[f64]>::to_vec).collect();
                mag::creutz_ratio(&table, r, t).ok()
            };
            out.push(CreutzEstimate { observable, r, t, value: jackknife(&samples, bins, f) });
        }
    }
    out
}

fn loop_at(t: &[Vec<f64>], r: usize) -> f64 {
    t.get(r - 1).and_then(|row| row.get(r - 1)).copied().unwrap_or(f64::NAN)
}

/// `magflow.csv`, `mag_reports.csv`, `creutz.csv`, optional monopole dumps, manifest.
pub fn run_magflow(cfg: &Config) -> Result<MagflowOutcome> {
    let input: PathBuf = cfg.require::<String>("magflow.input")?.into();
    let opts = MagFixOptions {
        tol: cfg.get_or("mag.tol", mag::gauge_fix::DEFAULT_TOL)?,
        max_iter: cfg.get_or("mag.max_iter", mag::gauge_fix::DEFAULT_MAX_ITER)?,
        omega: cfg.get_or("mag.omega", mag::gauge_fix::DEFAULT_OMEGA)?,
    };
    let max_loop: usize = cfg.get_or("magflow.max_loop", 3)?;
    let bins: usize = cfg.get_or("magflow.bins", 20)?;
    let dump: bool = cfg.get_or("magflow.dump_monopoles", false)?;
    if max_loop < 1 {
        return Err(Error::Config("magflow.max_loop must be >= 1".into()));
    }
    let files = snapshot_inputs(&input)?;
    let dir = out_dir(cfg, "magflow")?;
    with_manifest(&dir, "magflow", cfg, None, |m| {
        let mut rows = Vec::new();
        let mut skipped = Vec::new();
        for f in &files {
            let snap = match snapshot::read(f) {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("skipping {}: {e}", f.display());
                    skipped.push(f.clone());
                    continue;
                }
            };
            let (report, mc, wilson, abelian_q2) = analyse_configuration(&snap.field, &opts, max_loop)?;
            if !report.converged {
                log::warn!("{}: MAG not converged after {} iterations", f.display(), report.iterations);
            }
            if dump {
                let name = format!("monopoles_{:08}.csv", snap.sweep);
                write_file(m, &name, |w| mc.write_csv(w))?;
            }
            rows.push(MagflowRow {
                source: f.clone(),
                sweep: snap.sweep,
                beta: snap.beta,
                avg_plaquette: lattice::average_plaquette(&snap.field),
                monopole_density: mag::monopole_density(&mc),
                report,
                wilson,
                abelian_q2,
            });
        }
        if rows.is_empty() {
            return Err(Error::Corrupt(format!("no readable snapshots under {}", input.display())));
        }
        write_file(m, "magflow.csv", |w| {
            writeln!(w, "sweep,avg_plaquette,mag_functional,monopole_density,w11,w22,w33,aw11_q2,aw22_q2,aw33_q2")?;
            for r in &rows {
                write!(w, "{},{},{},{}", r.sweep, r.avg_plaquette, r.report.functional_value, r.monopole_density)?;
                for t in [&r.wilson, &r.abelian_q2] {
                    for k in 1..=3 {
                        write!(w, ",{}", loop_at(t, k))?;
                    }
                }
                writeln!(w)?;
            }
            Ok(())
        })?;
        write_file(m, "mag_reports.csv", |w| {
            writeln!(w, "sweep,iterations,converged,final_delta,functional")?;
            for r in &rows {
                let rep = &r.report;
                writeln!(w, "{},{},{},{:e},{}", r.sweep, rep.iterations, rep.converged, rep.final_delta, rep.functional_value)?;
            }
            Ok(())
        })?;
        let wilson: Vec<_> = rows.iter().map(|r| r.wilson.clone()).collect();
        let abelian: Vec<_> = rows.iter().map(|r| r.abelian_q2.clone()).collect();
        let mut creutz = creutz_estimates("wilson", &wilson, bins);
        creutz.extend(creutz_estimates("abelian_q2", &abelian, bins));
        write_file(m, "creutz.csv", |w| {
            writeln!(w, "observable,R,T,chi,error,configs")?;
            for c in &creutz {
                match c.value {
                    Some((v, e)) => writeln!(w, "{},{},{},{},{},{}", c.observable, c.r, c.t, v, e, rows.len())?,
                    None => writeln!(w, "{},{},{},NaN,NaN,{}", c.observable, c.r, c.t, rows.len())?,
                }
            }
            Ok(())
        })?;
        let mean_density = rows.iter().map(|r| r.monopole_density).sum::<f64>() / rows.len() as f64;
        println!("configs={} skipped={} mean_monopole_density={mean_density:.6}", rows.len(), skipped.len());
        Ok(MagflowOutcome { dir: dir.clone(), rows, skipped, creutz })
    })
}

pub fn bps_config(cfg: &Config) -> Result<ContinuumConfig> {
    ContinuumConfig::new(
        cfg.get_or("bps.grid", 48)?,
        cfg.get_or("bps.h", 0.25)?,
        cfg.get_or("bps.v", 1.0)?,
        cfg.get_or("bps.e", 1.0)?,
        cfg.get_or("bps.lambda", 0.0)?,
    )
}

/// `bps_profile.csv`, `bps_summary.csv`, manifest.
pub fn run_bps(cfg: &Config) -> Result<BpsSummary> {
    let cc = bps_config(cfg)?;
    let radius: Option<f64> = cfg.get("bps.radius")?;
    let dir = out_dir(cfg, "bps")?;
    with_manifest(&dir, "bps", cfg, None, |m| {
        let fc = bps::prasad_sommerfield(&cc)?;
        let summary = BpsSummary::compute(&fc, &cc, radius)?;
        let profile = bps::radial_profile(&fc, &cc);
        write_file(m, "bps_profile.csv", |w| bps::write_profile_csv(w, &profile))?;
        write_file(m, "bps_summary.csv", |w| summary.write_csv(w))?;
        summary.write_csv(std::io::stdout().lock())?;
        Ok(summary)
    })
}

/// `vortex_summary.csv` for the parameter product, plus `vortex_profile.csv`
/// when exactly one parameter set is given.
pub fn run_vortex(cfg: &Config) -> Result<Vec<SweepRow>> {
    let gs: Vec<f64> = cfg.get_list("vortex.g")?.unwrap_or_else(|| vec![1.0]);
    let ls: Vec<f64> = cfg.get_list("vortex.lambda")?.unwrap_or_else(|| vec![0.5]);
    let vs: Vec<f64> = cfg.get_list("vortex.v")?.unwrap_or_else(|| vec![1.0]);
    let ns: Vec<u32> = cfg.get_list("vortex.n")?.unwrap_or_else(|| vec![1]);
    let opts = SolveOptions {
        rmax: cfg.get("vortex.rmax")?,
        n_points: cfg.get_or("vortex.points", SolveOptions::default().n_points)?,
        tol: cfg.get_or("vortex.tol", SolveOptions::default().tol)?,
        max_iter: cfg.get_or("vortex.max_iter", SolveOptions::default().max_iter)?,
    };
    let mut params = Vec::new();
    for &g in &gs {
        for &lambda in &ls {
            for &v in &vs {
                for &n in &ns {
                    params.push(GLParameters::new(g, lambda, v, n)?);
                }
            }
        }
    }
    let dir = out_dir(cfg, "vortex")?;
    with_manifest(&dir, "vortex", cfg, None, |m| {
        let rows: Vec<SweepRow> = params.par_iter().map(|p| SweepRow::solve(p, &opts)).collect::<Result<_>>()?;
        if let [p] = params.as_slice() {
            let (prof, _) = dual_gl::solve_vortex(p, &opts)?;
            write_file(m, "vortex_profile.csv", |w| dual_gl::write_profile_csv(w, &prof))?;
        }
        write_file(m, "vortex_summary.csv", |w| dual_gl::write_sweep_csv(w, &rows))?;
        dual_gl::write_sweep_csv(std::io::stdout().lock(), &rows)?;
        Ok(rows)
    })
}

/// Prints `name,efolds,log10_scale,higgs_mass_gev,sufficient_inflation` rows;
/// with `output.dir` set also writes `higgsmass.csv` and a manifest.
pub fn run_higgsmass(cfg: &Config) -> Result<Vec<HiggsRow>> {
    let consts = match cfg.get_str("topo.planck").unwrap_or("hbar") {
        "hbar" => PhysicalConstants::for_convention(PlanckConvention::Hbar),
        "h" => PhysicalConstants::for_convention(PlanckConvention::H),
        other => return Err(Error::Config(format!("topo.planck must be 'hbar' or 'h', got '{other}'"))),
    };
    let invs = if let Some(table) = cfg.get_str("topo.table") {
        let f = fs::File::open(table).map_err(|e| Error::Config(format!("cannot open {table}: {e}")))?;
        topo::read_invariants_csv(std::io::BufReader::new(f))?
    } else {
        match (cfg.get::<f64>("topo.vol")?, cfg.get::<f64>("topo.cs")?) {
            (Some(vol), Some(cs)) => {
                vec![TopoInvariants::new(cfg.get_str("topo.name").unwrap_or("input"), vol, cs)?]
            }
            (None, None) => vec![TopoInvariants::sigma_8_10()],
            _ => return Err(Error::Config("topo.vol and topo.cs must be given together".into())),
        }
    };
    let rows: Vec<HiggsRow> = invs.iter().map(|i| HiggsRow::compute(i, &consts)).collect::<Result<_>>()?;
    topo::write_higgs_csv(std::io::stdout().lock(), &rows)?;
    if cfg.contains("output.dir") {
        let dir = out_dir(cfg, "higgsmass")?;
        with_manifest(&dir, "higgsmass", cfg, None, |m| {
            write_file(m, "higgsmass.csv", |w| topo::write_higgs_csv(w, &rows))?;
            Ok(())
        })?;
    }
    Ok(rows)
}

pub fn run_verify(path: &Path) -> Result<usize> {
    let m = manifest::read_manifest(path)?;
    let bad = manifest::verify(path)?;
    if !bad.is_empty() {
        let list: Vec<String> = bad
            .iter()
            .map(|b| match b {
                Mismatch::Missing(p) => format!("missing {p}"),
                Mismatch::Digest(p) => format!("digest mismatch {p}"),
            })
            .collect();
        return Err(Error::Corrupt(list.join("; ")));
    }
    if m.status != manifest::RunStatus::Complete {
        return Err(Error::Corrupt(format!("{} records a partial run", path.display())));
    }
    println!("ok: {} files verified", m.outputs.len());
    Ok(m.outputs.len())
}
