//! Pure SU(2) lattice gauge theory with the Wilson plaquette action.

pub mod field;
pub mod geometry;
pub mod observables;
pub mod rng;
pub mod snapshot;
pub mod update;

pub use field::GaugeField;
pub use geometry::{Dims, Geometry};
pub use observables::{average_plaquette, wilson_loop, wilson_loop_table};
pub use rng::LinkStreams;
pub use update::{heatbath_sweep, overrelax_sweep, staple, wilson_action, Staple};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Cold,
    Hot,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimulationConfig {
    pub beta: f64,
    pub dims: Dims,
    pub seed: u64,
    pub n_therm: usize,
    pub n_sweeps: usize,
    pub measure_every: usize,
    pub overrelax_per_heatbath: usize,
    pub start: Start,
}

impl SimulationConfig {
    pub fn new(beta: f64, dims: Dims, seed: u64) -> Self {
        Self {
            beta,
            dims,
            seed,
            n_therm: 0,
            n_sweeps: 1,
            measure_every: 1,
            overrelax_per_heatbath: 0,
            start: Start::Cold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Config(format!("beta must be finite and > 0, got {}", self.beta)));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::Config(format!("every lattice extent must be >= 2, got {d}")));
        }
        if self.measure_every < 1 {
            return Err(Error::Config("measure_every must be >= 1".into()));
        }
        if self.n_sweeps < 1 {
            return Err(Error::Config("n_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// A Markov chain: the field plus the counters that select its random streams.
///
/// One compound step is a heatbath sweep followed by
/// `overrelax_per_heatbath` overrelaxation sweeps.
#[derive(Debug, Clone)]
pub struct Chain {
    pub field: GaugeField,
    beta: f64,
    overrelax: usize,
    streams: LinkStreams,
    sweeps_done: u64,
}

impl Chain {
    pub fn new(cfg: &SimulationConfig) -> Result<Self> {
        cfg.validate()?;
        let field = match cfg.start {
            Start::Cold => GaugeField::cold_start(cfg.dims)?,
            Start::Hot => GaugeField::hot_start(cfg.dims, cfg.seed)?,
        };
        Ok(Self::from_field(field, cfg.beta, cfg.overrelax_per_heatbath, cfg.seed))
    }

    pub fn from_field(field: GaugeField, beta: f64, overrelax: usize, seed: u64) -> Self {
        Self { field, beta, overrelax, streams: LinkStreams::new(seed), sweeps_done: 0 }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweeps_done
    }

    pub fn step(&mut self) -> Result<()> {
        heatbath_sweep(&mut self.field, self.beta, &self.streams, self.sweeps_done)?;
        for _ in 0..self.overrelax {
            overrelax_sweep(&mut self.field);
        }
        self.sweeps_done += 1;
        Ok(())
    }

    pub fn run(&mut self, n: usize) -> Result<()> {
        for _ in 0..n {
            self.step()?;
        }
        Ok(())
    }
}
