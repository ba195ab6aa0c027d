//! Compact U(1) variables after abelian projection.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::geometry::{Dims, Geometry, NDIM};
use crate::lattice::observables::check_loop_extent;
use crate::lattice::GaugeField;

const TWO_PI: f64 = 2.0 * PI;

/// Link angles `θ_μ(x) ∈ (−π, π]`, indexed `site * 4 + mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianField {
    geom: Arc<Geometry>,
    theta: Vec<f64>,
}

/// Maps any angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a - TWO_PI * ((a + PI) / TWO_PI).floor();
    // floor puts the cut at −π; move that endpoint to +π
    if r <= -PI {
        r += TWO_PI;
    }
    if r > PI {
        r -= TWO_PI;
    }
    r
}

impl AbelianField {
    /// Wraps raw angles into `(−π, π]`.
    pub fn from_angles(dims: Dims, theta: Vec<f64>) -> Result<Self> {
        let geom = Arc::new(Geometry::new(dims)?);
        if theta.len() != geom.n_links() {
            return Err(Error::Config(format!("expected {} link angles, got {}", geom.n_links(), theta.len())));
        }
        let theta = theta.into_iter().map(wrap_angle).collect();
        Ok(Self { geom, theta })
    }

    pub fn zeros(dims: Dims) -> Result<Self> {
        let geom = Arc::new(Geometry::new(dims)?);
        let theta = vec![0.0; geom.n_links()];
        Ok(Self { geom, theta })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub(crate) fn geometry_arc(&self) -> &Arc<Geometry> {
        &self.geom
    }

    pub fn dims(&self) -> Dims {
        self.geom.dims()
    }

    #[inline]
    pub fn theta(&self, site: usize, mu: usize) -> f64 {
        self.theta[site * NDIM + mu]
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Every angle multiplied by `q` and rewrapped.
    pub fn scaled(&self, q: f64) -> Self {
        Self { geom: Arc::clone(&self.geom), theta: self.theta.iter().map(|t| wrap_angle(q * t)).collect() }
    }

    /// Raw plaquette angle `θ_μ(x) + θ_ν(x+μ̂) − θ_μ(x+ν̂) − θ_ν(x)`, in `(−4π, 4π)`.
    pub fn plaquette_angle(&self, site: usize, mu: usize, nu: usize) -> f64 {
        let g = &self.geom;
        self.theta(site, mu) + self.theta(g.fwd(site, mu), nu) - self.theta(g.fwd(site, nu), mu) - self.theta(site, nu)
    }
}

/// `θ_μ(x) = arg(a0 + i a3)`, the phase of the upper diagonal entry of each link.
pub fn abelian_project(field: &GaugeField) -> AbelianField {
    let theta = field.links().par_iter().map(|u| wrap_angle(u.a3.atan2(u.a0))).collect();
    AbelianField { geom: field.geometry_arc().clone(), theta }
}

/// Splits a plaquette angle `f = f̄ + 2π n` with `f̄ ∈ (−π, π]`.
pub fn decompose_angle(f: f64) -> (f64, i32) {
    let fbar = wrap_angle(f);
    let n = ((f - fbar) / TWO_PI).round() as i32;
    (fbar, n)
}

/// Physical flux `f̄` and Dirac-string number `n` of one plaquette.
pub fn abelian_plaquette_decompose(af: &AbelianField, site: usize, mu: usize, nu: usize) -> (f64, i32) {
    decompose_angle(af.plaquette_angle(site, mu, nu))
}

/// `⟨cos(q Σ_C θ)⟩` over `R×T` loops, averaged like
/// [`crate::lattice::wilson_loop`].
pub fn abelian_wilson_loop(af: &AbelianField, r: usize, t: usize, charge: i32) -> Result<f64> {
    if !(charge == 1 || charge == 2) {
        return Err(Error::Domain(format!("abelian loop charge must be 1 or 2, got {charge}")));
    }
    check_loop_extent(&af.geom, r, t)?;
    Ok(abelian_loop_average(af, r, t, charge as f64))
}

/// Charge-`q` loop table for `1 ≤ R, T ≤ max_extent`, indexed `[R-1][T-1]`.
pub fn abelian_wilson_loop_table(af: &AbelianField, max_extent: usize, charge: i32) -> Result<Vec<Vec<f64>>> {
    abelian_wilson_loop(af, 1, 1, charge)?;
    check_loop_extent(&af.geom, max_extent, max_extent)?;
    let mut out = vec![vec![0.0; max_extent]; max_extent];
    for r in 1..=max_extent {
        for t in 1..=max_extent {
            out[r - 1][t - 1] = if t < r { out[t - 1][r - 1] } else { abelian_loop_average(af, r, t, charge as f64) };
        }
    }
    Ok(out)
}

fn line_sum(af: &AbelianField, site: usize, mu: usize, len: usize) -> f64 {
    let mut s = site;
    let mut acc = 0.0;
    for _ in 0..len {
        acc += af.theta(s, mu);
        s = af.geom.fwd(s, mu);
    }
    acc
}

fn abelian_loop_average(af: &AbelianField, r: usize, t: usize, q: f64) -> f64 {
    let g = &af.geom;
    let mut total = 0.0;
    let mut count = 0usize;
    for mu in 0..NDIM {
        for nu in 0..NDIM {
            if mu == nu || (r == t && nu < mu) {
                continue;
            }
            let vals: Vec<f64> = (0..g.volume())
                .into_par_iter()
                .map(|x| {
                    let x_r = g.shift(x, mu, r);
                    let x_t = g.shift(x, nu, t);
                    let phase = line_sum(af, x, mu, r) + line_sum(af, x_r, nu, t)
                        - line_sum(af, x_t, mu, r)
                        - line_sum(af, x, nu, t);
                    (q * phase).cos()
                })
                .collect();
            let weight = if r == t { 2 } else { 1 };
            total += weight as f64 * vals.iter().sum::<f64>();
            count += weight * vals.len();
        }
    }
    total / count as f64
}
