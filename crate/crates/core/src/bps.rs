//! Static SU(2) Yang–Mills–Higgs fields on a regular 3-D grid.
//!
//! Conventions: `(D_i Φ)^a = ∂_i Φ^a + e ε_abc A_i^b Φ^c`,
//! `F_ij^a = ∂_i A_j^a − ∂_j A_i^a + e ε_abc A_i^b A_j^c`, `B_i^a = −½ ε_ijk F_jk^a`
//! and `U(Φ) = λ/4 (Φ·Φ − v²)²`. With these signs the hedgehog below satisfies
//! `B = DΦ` and carries magnetic charge `+4π/e`.
//!
//! Derivatives are second-order central differences, one-sided second-order
//! at the grid faces, so every derived field is defined at every grid point.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::su2::GroupElement;

/// Regular `n³` grid with spacing `h`, centered so that the origin is never a node.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContinuumConfig {
    pub n: usize,
    pub h: f64,
    pub v: f64,
    pub e: f64,
    pub lambda: f64,
}

impl ContinuumConfig {
    pub fn new(n: usize, h: f64, v: f64, e: f64, lambda: f64) -> Result<Self> {
        let c = Self { n, h, v, e, lambda };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::Config(format!("grid size must be >= 8, got {}", self.n)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Config(format!("grid spacing must be > 0, got {}", self.h)));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::Config(format!("v must be > 0, got {}", self.v)));
        }
        if self.e == 0.0 || !self.e.is_finite() {
            return Err(Error::Config(format!("e must be finite and nonzero, got {}", self.e)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Node coordinate along one axis. Even `n` gives a symmetric grid at
    /// half-integer multiples of `h`; odd `n` is shifted by `h/2`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        let shift = if self.n % 2 == 1 { 0.5 * self.h } else { 0.0 };
        (i as f64 - (self.n as f64 - 1.0) / 2.0) * self.h + shift
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn ijk(&self, p: usize) -> [usize; 3] {
        [p / (self.n * self.n), (p / self.n) % self.n, p % self.n]
    }

    #[inline]
    pub fn point(&self, p: usize) -> [f64; 3] {
        let [i, j, k] = self.ijk(p);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Largest sphere radius whose interpolation stencils stay on the grid.
    pub fn max_radius(&self) -> f64 {
        self.coord(self.n - 1).min(-self.coord(0))
    }

    fn stride(&self, axis: usize) -> usize {
        [self.n * self.n, self.n, 1][axis]
    }
}

/// `Φ^a` and `A_i^a` at every grid node. `a[p][3 * i + c]` is `A_i^c`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub phi: Vec<[f64; 3]>,
    pub a: Vec<[f64; 9]>,
}

impl FieldConfig {
    #[inline]
    pub fn a_i(&self, p: usize, i: usize) -> [f64; 3] {
        let a = &self.a[p];
        [a[3 * i], a[3 * i + 1], a[3 * i + 2]]
    }

    /// Constant isospin rotation `Φ → RΦ`, `A_i → R A_i`.
    pub fn rotated(&self, g: &GroupElement) -> Self {
        let phi = self.phi.par_iter().map(|p| g.rotate(*p)).collect();
        let a = self
            .a
            .par_iter()
            .map(|a| {
                let mut out = [0.0; 9];
                for i in 0..3 {
                    let r = g.rotate([a[3 * i], a[3 * i + 1], a[3 * i + 2]]);
                    out[3 * i..3 * i + 3].copy_from_slice(&r);
                }
                out
            })
            .collect();
        Self { phi, a }
    }
}

#[inline]
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// `coth x − 1/x`.
fn coth_minus_inv(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 3.0 - x * x2 / 45.0
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

/// `1 − x / sinh x`.
fn one_minus_x_over_sinh(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 - 7.0 * x2 * x2 / 360.0
    } else if ax > 40.0 {
        1.0 - 2.0 * ax * (-ax).exp()
    } else {
        1.0 - x / x.sinh()
    }
}

/// Hedgehog BPS monopole,
/// `Φ^a = x̂^a (v coth(evr) − 1/(er))`, `A_i^a = ε_aij x̂_j (1 − evr/sinh(evr))/(er)`.
pub fn prasad_sommerfield(cfg: &ContinuumConfig) -> Result<FieldConfig> {
    cfg.validate()?;
    let (v, e) = (cfg.v, cfg.e);
    let (phi, a): (Vec<_>, Vec<_>) = (0..cfg.len())
        .into_par_iter()
        .map(|p| {
            let x = cfg.point(p);
            let r = symmetric_norm(x);
            let xh = [x[0] / r, x[1] / r, x[2] / r];
            let s = e * v * r;
            let h = v * coth_minus_inv(s);
            let w = one_minus_x_over_sinh(s) / (e * r);
            let phi = [xh[0] * h, xh[1] * h, xh[2] * h];
            let mut a = [0.0; 9];
            // A_i^a = ε_aij x̂_j w
            for i in 0..3 {
                let col = cross(unit(i), xh);
                for c in 0..3 {
                    a[3 * i + c] = col[c] * w;
                }
            }
            (phi, a)
        })
        .unzip();
    Ok(FieldConfig { phi, a })
}

/// `|x|` summed in sorted order, so that permuted coordinates give the same bits.
fn symmetric_norm(x: [f64; 3]) -> f64 {
    let mut sq = x.map(|c| c * c);
    sq.sort_by(f64::total_cmp);
    (sq[0] + sq[1] + sq[2]).sqrt()
}

fn unit(i: usize) -> [f64; 3] {
    let mut u = [0.0; 3];
    u[i] = 1.0;
    u
}

/// `Φ = (0, 0, v)`, `A = 0`.
pub fn vacuum(cfg: &ContinuumConfig) -> Result<FieldConfig> {
    cfg.validate()?;
    Ok(FieldConfig { phi: vec![[0.0, 0.0, cfg.v]; cfg.len()], a: vec![[0.0; 9]; cfg.len()] })
}

/// Second-order derivative of a vector field along `axis` at node `p`.
fn deriv<const K: usize>(cfg: &ContinuumConfig, f: &[[f64; K]], p: usize, axis: usize) -> [f64; K] {
    let c = cfg.ijk(p)[axis];
    let s = cfg.stride(axis);
    let inv = 0.5 / cfg.h;
    let mut out = [0.0; K];
    if c == 0 {
        let (f0, f1, f2) = (&f[p], &f[p + s], &f[p + 2 * s]);
        for k in 0..K {
            out[k] = (-3.0 * f0[k] + 4.0 * f1[k] - f2[k]) * inv;
        }
    } else if c == cfg.n - 1 {
        let (f0, f1, f2) = (&f[p], &f[p - s], &f[p - 2 * s]);
        for k in 0..K {
            out[k] = (3.0 * f0[k] - 4.0 * f1[k] + f2[k]) * inv;
        }
    } else {
        let (fp, fm) = (&f[p + s], &f[p - s]);
        for k in 0..K {
            out[k] = (fp[k] - fm[k]) * inv;
        }
    }
    out
}

/// Non-abelian magnetic field `B_i^a` and covariant derivative `(D_iΦ)^a` at one node.
fn b_and_dphi(fc: &FieldConfig, cfg: &ContinuumConfig, p: usize) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let e = cfg.e;
    let da = [deriv(cfg, &fc.a, p, 0), deriv(cfg, &fc.a, p, 1), deriv(cfg, &fc.a, p, 2)];
    let ai = [fc.a_i(p, 0), fc.a_i(p, 1), fc.a_i(p, 2)];
    let f = |j: usize, k: usize| -> [f64; 3] {
        let ak = cross(ai[j], ai[k]);
        let mut out = [0.0; 3];
        for c in 0..3 {
            out[c] = da[j][3 * k + c] - da[k][3 * j + c] + e * ak[c];
        }
        out
    };
    let f23 = f(1, 2);
    let f31 = f(2, 0);
    let f12 = f(0, 1);
    let b = [f23.map(|x| -x), f31.map(|x| -x), f12.map(|x| -x)];
    let phi = fc.phi[p];
    let mut dphi = [[0.0; 3]; 3];
    for (i, d) in dphi.iter_mut().enumerate() {
        let dp = deriv(cfg, &fc.phi, p, i);
        let ax = cross(ai[i], phi);
        for c in 0..3 {
            d[c] = dp[c] + e * ax[c];
        }
    }
    (b, dphi)
}

/// `Φ̂ = Φ/|Φ|`, or a singular-point error where `|Φ| < 10⁻⁸ v`.
fn unit_higgs(fc: &FieldConfig, cfg: &ContinuumConfig) -> Result<Vec<[f64; 3]>> {
    let floor = 1e-8 * cfg.v;
    fc.phi
        .par_iter()
        .enumerate()
        .map(|(p, &phi)| {
            let m = norm(phi);
            if !(m >= floor) {
                let x = cfg.point(p);
                return Err(Error::Singular(format!("|phi| = {m:e} at ({:.4}, {:.4}, {:.4})", x[0], x[1], x[2])));
            }
            Ok([phi[0] / m, phi[1] / m, phi[2] / m])
        })
        .collect()
}

/// 't Hooft field strength `f_ij = Φ̂·F_ij − (1/e) Φ̂·(D_iΦ̂ × D_jΦ̂)` as a full
/// antisymmetric 3×3 matrix per node.
pub fn thooft_tensor(fc: &FieldConfig, cfg: &ContinuumConfig) -> Result<Vec<[[f64; 3]; 3]>> {
    cfg.validate()?;
    let n_hat = unit_higgs(fc, cfg)?;
    let e = cfg.e;
    Ok((0..cfg.len())
        .into_par_iter()
        .map(|p| {
            let (b, _) = b_and_dphi(fc, cfg, p);
            let nh = n_hat[p];
            let mut dn = [[0.0; 3]; 3];
            for (i, d) in dn.iter_mut().enumerate() {
                let g = deriv(cfg, &n_hat, p, i);
                let ax = cross(fc.a_i(p, i), nh);
                for c in 0..3 {
                    d[c] = g[c] + e * ax[c];
                }
            }
            // F_jk = −ε_ijk B_i
            let fjk = |j: usize, k: usize| -> f64 {
                let i = 3 - j - k;
                let sign = if (j + 1) % 3 == k { -1.0 } else { 1.0 };
                sign * dot(nh, b[i])
            };
            let mut f = [[0.0; 3]; 3];
            for j in 0..3 {
                for k in (j + 1)..3 {
                    let val = fjk(j, k) - dot(nh, cross(dn[j], dn[k])) / e;
                    f[j][k] = val;
                    f[k][j] = -val;
                }
            }
            f
        })
        .collect())
}

/// Abelian magnetic field `B_i = −½ ε_ijk f_jk` from the 't Hooft tensor.
pub fn abelian_magnetic_field(fc: &FieldConfig, cfg: &ContinuumConfig) -> Result<Vec<[f64; 3]>> {
    Ok(thooft_tensor(fc, cfg)?.into_par_iter().map(|f| [-f[1][2], -f[2][0], -f[0][1]]).collect())
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Trilinear interpolation of a nodal vector field.
fn interpolate(cfg: &ContinuumConfig, f: &[[f64; 3]], x: [f64; 3]) -> [f64; 3] {
    let x0 = cfg.coord(0);
    let mut base = [0usize; 3];
    let mut t = [0.0; 3];
    for d in 0..3 {
        let s = (x[d] - x0) / cfg.h;
        let i = (s.floor().max(0.0) as usize).min(cfg.n - 2);
        base[d] = i;
        t[d] = s - i as f64;
    }
    let mut out = [0.0; 3];
    for corner in 0..8 {
        let o = [(corner >> 2) & 1, (corner >> 1) & 1, corner & 1];
        let mut w = 1.0;
        for d in 0..3 {
            w *= if o[d] == 1 { t[d] } else { 1.0 - t[d] };
        }
        let p = cfg.index(base[0] + o[0], base[1] + o[1], base[2] + o[2]);
        for c in 0..3 {
            out[c] += w * f[p][c];
        }
    }
    out
}

/// Outward flux of the abelian magnetic field through the sphere of `radius`
/// centered at the origin. Quadrature: 32 Gauss–Legendre nodes in `cos ϑ`
/// times 64 uniform nodes in `φ`.
pub fn magnetic_charge(fc: &FieldConfig, cfg: &ContinuumConfig, radius: f64) -> Result<f64> {
    let b = abelian_magnetic_field(fc, cfg)?;
    flux_through_sphere(cfg, &b, radius)
}

pub fn flux_through_sphere(cfg: &ContinuumConfig, b: &[[f64; 3]], radius: f64) -> Result<f64> {
    if !(radius > 0.0 && radius <= cfg.max_radius()) {
        return Err(Error::Range(format!("radius {radius} outside (0, {}]", cfg.max_radius())));
    }
    let n_phi = 64;
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let nodes = gauss_legendre(32);
    let total: f64 = nodes
        .par_iter()
        .map(|&(ct, w)| {
            let st = (1.0 - ct * ct).sqrt();
            (0..n_phi)
                .map(|m| {
                    let ph = (m as f64 + 0.5) * dphi;
                    let nrm = [st * ph.cos(), st * ph.sin(), ct];
                    let x = nrm.map(|c| c * radius);
                    w * dot(interpolate(cfg, b, x), nrm)
                })
                .sum::<f64>()
        })
        .sum();
    Ok(total * dphi * radius * radius)
}

/// Topological magnetic charge density `j_0 = ∂_i B_i^top` with
/// `B_i^top = (1/2e) ε_ijk Φ̂·(∂_jΦ̂ × ∂_kΦ̂)`, differenced so that `Σ j_0 h³`
/// telescopes to the flux through the grid boundary.
pub fn magnetic_current_topological(fc: &FieldConfig, cfg: &ContinuumConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n_hat = unit_higgs(fc, cfg)?;
    let inv2e = 0.5 / cfg.e;
    let btop: Vec<[f64; 3]> = (0..cfg.len())
        .into_par_iter()
        .map(|p| {
            let d = [deriv(cfg, &n_hat, p, 0), deriv(cfg, &n_hat, p, 1), deriv(cfg, &n_hat, p, 2)];
            let nh = n_hat[p];
            // ε_ijk Φ̂·(∂_jΦ̂ × ∂_kΦ̂) = 2 Φ̂·(∂_jΦ̂ × ∂_kΦ̂) for cyclic (i, j, k)
            [
                2.0 * inv2e * dot(nh, cross(d[1], d[2])),
                2.0 * inv2e * dot(nh, cross(d[2], d[0])),
                2.0 * inv2e * dot(nh, cross(d[0], d[1])),
            ]
        })
        .collect();
    Ok((0..cfg.len())
        .into_par_iter()
        .map(|p| (0..3).map(|i| deriv(cfg, &btop, p, i)[i]).sum())
        .collect())
}

/// `ℰ = ½ (B_i^a B_i^a + D_iΦ^a D_iΦ^a) + λ/4 (Φ·Φ − v²)²` at every node.
pub fn energy_density(fc: &FieldConfig, cfg: &ContinuumConfig) -> Vec<f64> {
    (0..cfg.len())
        .into_par_iter()
        .map(|p| {
            let (b, dphi) = b_and_dphi(fc, cfg, p);
            let kin: f64 = (0..3).map(|i| dot(b[i], b[i]) + dot(dphi[i], dphi[i])).sum();
            let u = dot(fc.phi[p], fc.phi[p]) - cfg.v * cfg.v;
            0.5 * kin + 0.25 * cfg.lambda * u * u
        })
        .collect()
}

/// `max |B_i^a − (D_iΦ)^a|` over the grid.
pub fn bogomolny_residual(fc: &FieldConfig, cfg: &ContinuumConfig) -> f64 {
    (0..cfg.len())
        .into_par_iter()
        .map(|p| {
            let (b, dphi) = b_and_dphi(fc, cfg, p);
            let mut m = 0.0f64;
            for i in 0..3 {
                for c in 0..3 {
                    m = m.max((b[i][c] - dphi[i][c]).abs());
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyReport {
    /// Midpoint-rule integral over the grid box.
    pub box_energy: f64,
    /// Estimate of the energy outside the box assuming `ℰ ∝ r⁻⁴` there.
    pub tail: f64,
    pub total: f64,
}

/// `∫ dΩ max_i |n_i|`, the angular weight of the `r⁻⁴` tail outside a cube.
fn cube_tail_weight() -> f64 {
    // 6 ∫∫_{[−1,1]²} dx dy / (1 + x² + y²)², inner integral in closed form
    let inner = |x: f64| {
        let c2 = 1.0 + x * x;
        let c = c2.sqrt();
        1.0 / (c2 * (c2 + 1.0)) + (1.0 / c).atan() / (c2 * c)
    };
    6.0 * gauss_legendre(48).iter().map(|&(x, w)| w * inner(x)).sum::<f64>()
}

/// Total static energy. The far field is extrapolated from the outermost
/// grid layer, where `r⁴ ℰ` is averaged and continued as `C / r⁴`.
pub fn total_energy(fc: &FieldConfig, cfg: &ContinuumConfig) -> EnergyReport {
    let eps = energy_density(fc, cfg);
    total_energy_from_density(cfg, &eps)
}

pub fn total_energy_from_density(cfg: &ContinuumConfig, eps: &[f64]) -> EnergyReport {
    let h3 = cfg.h.powi(3);
    let box_energy = eps.par_iter().sum::<f64>() * h3;
    let last = cfg.n - 1;
    let (sum, count) = (0..cfg.len())
        .filter(|&p| cfg.ijk(p).iter().any(|&c| c == 0 || c == last))
        .map(|p| {
            let r2 = dot(cfg.point(p), cfg.point(p));
            (eps[p] * r2 * r2, 1usize)
        })
        .fold((0.0, 0usize), |a, b| (a.0 + b.0, a.1 + b.1));
    let c = sum / count as f64;
    let half = 0.5 * cfg.n as f64 * cfg.h;
    let tail = c * cube_tail_weight() / half;
    EnergyReport { box_energy, tail, total: box_energy + tail }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub phi: f64,
    pub b: f64,
    pub energy_density: f64,
}

/// Shell averages of `|Φ|`, `|B|` (Frobenius norm of `B_i^a`) and `ℰ` in shells of width `h`,
/// out to the largest sphere fully inside the grid.
pub fn radial_profile(fc: &FieldConfig, cfg: &ContinuumConfig) -> Vec<RadialSample> {
    let eps = energy_density(fc, cfg);
    let rmax = cfg.max_radius();
    let n_bins = (rmax / cfg.h).floor() as usize;
    let mut acc = vec![[0.0f64; 5]; n_bins];
    for p in 0..cfg.len() {
        let r = norm(cfg.point(p));
        let bin = (r / cfg.h) as usize;
        if bin >= n_bins {
            continue;
        }
        let (b, _) = b_and_dphi(fc, cfg, p);
        let bn = (0..3).map(|i| dot(b[i], b[i])).sum::<f64>().sqrt();
        let a = &mut acc[bin];
        a[0] += r;
        a[1] += norm(fc.phi[p]);
        a[2] += bn;
        a[3] += eps[p];
        a[4] += 1.0;
    }
    acc.into_iter()
        .filter(|a| a[4] > 0.0)
        .map(|a| RadialSample { r: a[0] / a[4], phi: a[1] / a[4], b: a[2] / a[4], energy_density: a[3] / a[4] })
        .collect()
}

pub fn write_profile_csv<W: Write>(mut w: W, profile: &[RadialSample]) -> std::io::Result<()> {
    writeln!(w, "r,|phi|,|B|,energy_density")?;
    for s in profile {
        writeln!(w, "{:.10e},{:.10e},{:.10e},{:.10e}", s.r, s.phi, s.b, s.energy_density)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BpsSummary {
    pub charge: f64,
    pub total_energy: f64,
    pub bogomolny_residual: f64,
}

impl BpsSummary {
    /// Charge on the sphere of radius `radius` (default: half the box half-width).
    pub fn compute(fc: &FieldConfig, cfg: &ContinuumConfig, radius: Option<f64>) -> Result<Self> {
        let radius = radius.unwrap_or(0.25 * cfg.n as f64 * cfg.h);
        Ok(Self {
            charge: magnetic_charge(fc, cfg, radius)?,
            total_energy: total_energy(fc, cfg).total,
            bogomolny_residual: bogomolny_residual(fc, cfg),
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "charge,total_energy,bogomolny_residual")?;
        writeln!(w, "{:.10e},{:.10e},{:.10e}", self.charge, self.total_energy, self.bogomolny_residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn cfg(n: usize, h: f64) -> ContinuumConfig {
        ContinuumConfig::new(n, h, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ContinuumConfig::new(7, 0.1, 1.0, 1.0, 0.0).is_err());
        assert!(ContinuumConfig::new(8, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(ContinuumConfig::new(8, 0.1, -1.0, 1.0, 0.0).is_err());
        assert!(ContinuumConfig::new(8, 0.1, 1.0, 0.0, 0.0).is_err());
        assert!(ContinuumConfig::new(8, 0.1, 1.0, 1.0, -0.1).is_err());
        for n in [8, 9] {
            let c = cfg(n, 0.3);
            assert!((0..n).all(|i| c.coord(i).abs() > 0.1));
        }
    }

    #[test]
    fn series_match_closed_forms() {
        for x in [1.1e-3, 2e-3, 1e-2] {
            let s = x / 3.0 - x * x * x / 45.0;
            assert!((coth_minus_inv(x) - s).abs() < 1e-12);
            let t = x * x / 6.0 - 7.0 * x.powi(4) / 360.0;
            assert!((one_minus_x_over_sinh(x) - t).abs() < 1e-12);
        }
        assert!((one_minus_x_over_sinh(41.0) - 1.0).abs() < 1e-15);
        assert!((one_minus_x_over_sinh(-5.0) - one_minus_x_over_sinh(5.0)).abs() < 1e-15);
    }

    #[test]
    fn higgs_asymptotics_and_core() {
        let (v, e) = (1.3, 0.7);
        let c = ContinuumConfig::new(64, 0.6, v, e, 0.0).unwrap();
        let fc = prasad_sommerfield(&c).unwrap();
        let target = 10.0 / (e * v);
        let (p, r) = (0..c.len())
            .map(|p| (p, norm(c.point(p))))
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .unwrap();
        let expect = v - 1.0 / (e * r);
        assert!((norm(fc.phi[p]) / expect - 1.0).abs() < 1e-2);
        let near = (0..c.len()).min_by(|&a, &b| norm(c.point(a)).total_cmp(&norm(c.point(b)))).unwrap();
        assert!(norm(fc.phi[near]) < v * e * v * c.h);
    }

    #[test]
    fn hedgehog_rotation_symmetry_is_exact() {
        let c = cfg(12, 0.4);
        let fc = prasad_sommerfield(&c).unwrap();
        let m = c.n - 1;
        for i in 0..c.n {
            for j in 0..c.n {
                for k in 0..c.n {
                    let p = c.index(i, j, k);
                    // 90° about z: (x, y, z) → (−y, x, z)
                    let q = c.index(m - j, i, k);
                    let f = fc.phi[p];
                    assert_eq!(fc.phi[q], [-f[1], f[0], f[2]]);
                    // 90° about x: (x, y, z) → (x, −z, y)
                    let q = c.index(i, m - k, j);
                    assert_eq!(fc.phi[q], [f[0], -f[2], f[1]]);
                }
            }
        }
    }

    #[test]
    fn vacuum_is_trivial() {
        let c = ContinuumConfig::new(10, 0.5, 1.0, 1.0, 0.3).unwrap();
        let fc = vacuum(&c).unwrap();
        assert!(thooft_tensor(&fc, &c).unwrap().iter().flatten().flatten().all(|&x| x == 0.0));
        assert!(magnetic_charge(&fc, &c, 1.5).unwrap().abs() < 1e-10);
        assert!(magnetic_current_topological(&fc, &c).unwrap().iter().all(|&x| x == 0.0));
        assert!(energy_density(&fc, &c).iter().all(|&x| x == 0.0));
        assert!(bogomolny_residual(&fc, &c) < 1e-12);
    }

    #[test]
    fn abelian_field_is_coulombic() {
        let (c, e) = (ContinuumConfig::new(32, 0.3, 1.0, 2.0, 0.0).unwrap(), 2.0);
        let fc = prasad_sommerfield(&c).unwrap();
        let b = abelian_magnetic_field(&fc, &c).unwrap();
        for p in 0..c.len() {
            let x = c.point(p);
            let r = norm(x);
            let ijk = c.ijk(p);
            if r > 3.0 && ijk.iter().all(|&i| i > 0 && i < c.n - 1) {
                let br = dot(b[p], x) / r;
                assert!((br * e * r * r - 1.0).abs() < 2e-2, "r={r} B_r={br}");
                assert!((norm(b[p]) - br.abs()).abs() < 2e-2 * br.abs());
            }
        }
    }

    #[test]
    fn thooft_tensor_is_gauge_invariant() {
        let c = cfg(16, 0.4);
        let fc = prasad_sommerfield(&c).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let g = GroupElement::haar_random(&mut rng);
        let rot = fc.rotated(&g);
        let f0 = thooft_tensor(&fc, &c).unwrap();
        let f1 = thooft_tensor(&rot, &c).unwrap();
        for (a, b) in f0.iter().flatten().flatten().zip(f1.iter().flatten().flatten()) {
            assert!((a - b).abs() < 1e-10);
        }
        let (e0, e1) = (energy_density(&fc, &c), energy_density(&rot, &c));
        assert!(e0.iter().zip(&e1).all(|(a, b)| (a - b).abs() < 1e-10));
        let q0 = magnetic_charge(&fc, &c, 2.0).unwrap();
        let q1 = magnetic_charge(&rot, &c, 2.0).unwrap();
        assert!((q0 - q1).abs() < 1e-10);
        for f in &f0 {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(f[i][j], -f[j][i]);
                }
            }
        }
    }

    #[test]
    fn charge_is_quantized_and_radius_independent() {
        let c = cfg(48, 0.25);
        let fc = prasad_sommerfield(&c).unwrap();
        let q3 = magnetic_charge(&fc, &c, 3.0).unwrap();
        let q5 = magnetic_charge(&fc, &c, 5.0).unwrap();
        assert!((q3 / (4.0 * PI) - 1.0).abs() < 1e-2, "{q3}");
        assert!((q3 / q5 - 1.0).abs() < 1e-2);
        assert!(matches!(magnetic_charge(&fc, &c, 6.0), Err(Error::Range(_))));
        let j0 = magnetic_current_topological(&fc, &c).unwrap();
        let total: f64 = j0.iter().sum::<f64>() * c.h.powi(3);
        assert!((total / (4.0 * PI) - 1.0).abs() < 2e-2, "{total}");
    }

    #[test]
    fn negative_coupling_reverses_winding() {
        // Φ̂ = −x̂ has winding −1, so the charge 4πN/e stays positive
        let c = ContinuumConfig::new(32, 0.3, 1.0, -1.0, 0.0).unwrap();
        let fc = prasad_sommerfield(&c).unwrap();
        let q = magnetic_charge(&fc, &c, 3.0).unwrap();
        assert!((q / (4.0 * PI) - 1.0).abs() < 2e-2, "{q}");
        assert!(bogomolny_residual(&fc, &c) < 0.1);
    }

    #[test]
    fn winding_zero_has_no_charge() {
        let c = ContinuumConfig::new(16, 0.4, 1.0, 1.0, 0.5).unwrap();
        let mut fc = vacuum(&c).unwrap();
        for p in 0..c.len() {
            let x = c.point(p);
            fc.phi[p][2] *= 1.0 + 0.05 * (x[0] * 1.3).sin() * (x[1] + 0.2 * x[2]).cos();
        }
        let j0 = magnetic_current_topological(&fc, &c).unwrap();
        assert!((j0.iter().sum::<f64>() * c.h.powi(3)).abs() < 1e-6);
        assert!(magnetic_charge(&fc, &c, 2.5).unwrap().abs() < 1e-6);
        let eps = energy_density(&fc, &c);
        assert!(eps.iter().all(|&x| x >= 0.0));
        assert!(eps.iter().any(|&x| x > 0.0));
    }

    #[test]
    fn singular_higgs_is_rejected() {
        let c = cfg(8, 0.5);
        let mut fc = vacuum(&c).unwrap();
        fc.phi[17] = [0.0; 3];
        assert!(matches!(thooft_tensor(&fc, &c), Err(Error::Singular(_))));
        assert!(matches!(magnetic_current_topological(&fc, &c), Err(Error::Singular(_))));
    }

    #[test]
    fn energy_saturates_bound() {
        let c = cfg(48, 0.25);
        let fc = prasad_sommerfield(&c).unwrap();
        let rep = total_energy(&fc, &c);
        assert!(rep.tail > 0.0 && rep.tail < 0.3 * rep.total);
        assert!((rep.total / (4.0 * PI) - 1.0).abs() < 3e-2, "{rep:?}");
        let eps = energy_density(&fc, &c);
        assert!(eps.iter().all(|&x| x >= -1e-12));
    }

    #[test]
    fn tail_weight_closed_form() {
        // midpoint rule on a fine latitude-longitude grid
        let (nt, np) = (800usize, 1600usize);
        let mut s = 0.0;
        for i in 0..nt {
            let t = (i as f64 + 0.5) * PI / nt as f64;
            for j in 0..np {
                let f = (j as f64 + 0.5) * 2.0 * PI / np as f64;
                let n = [t.sin() * f.cos(), t.sin() * f.sin(), t.cos()];
                s += n.iter().fold(0.0f64, |m, x| m.max(x.abs())) * t.sin();
            }
        }
        s *= PI / nt as f64 * 2.0 * PI / np as f64;
        assert!((s - cube_tail_weight()).abs() < 1e-4, "{s} vs {}", cube_tail_weight());
    }

    #[test]
    fn potential_raises_energy() {
        let c0 = ContinuumConfig::new(16, 0.4, 1.0, 1.0, 0.0).unwrap();
        let c1 = ContinuumConfig { lambda: 0.5, ..c0 };
        let fc = prasad_sommerfield(&c0).unwrap();
        assert!(total_energy(&fc, &c1).box_energy > total_energy(&fc, &c0).box_energy);
    }

    #[test]
    fn bogomolny_residual_converges_at_second_order() {
        let coarse = cfg(24, 0.5);
        let fine = cfg(48, 0.25);
        let r0 = bogomolny_residual(&prasad_sommerfield(&coarse).unwrap(), &coarse);
        let r1 = bogomolny_residual(&prasad_sommerfield(&fine).unwrap(), &fine);
        assert!(r0 > 0.0 && r1 > 0.0);
        assert!((r0 / r1 - 4.0).abs() < 0.5, "{r0} {r1}");
    }

    #[test]
    fn perturbation_breaks_self_duality() {
        let c = cfg(16, 0.4);
        let fc = prasad_sommerfield(&c).unwrap();
        let base = bogomolny_residual(&fc, &c);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut pert = fc.clone();
        for a in pert.a.iter_mut() {
            for x in a.iter_mut() {
                *x += 0.01 * rng.random_range(-1.0..1.0);
            }
        }
        assert!(bogomolny_residual(&pert, &c) > base);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(32);
        assert!((nodes.iter().map(|n| n.1).sum::<f64>() - 2.0).abs() < 1e-13);
        let i: f64 = nodes.iter().map(|&(x, w)| w * x.powi(10)).sum();
        assert!((i - 2.0 / 11.0).abs() < 1e-13);
    }

    #[test]
    fn profile_and_summary_csv() {
        let c = cfg(16, 0.5);
        let fc = prasad_sommerfield(&c).unwrap();
        let prof = radial_profile(&fc, &c);
        assert!(!prof.is_empty());
        assert!(prof.windows(2).all(|w| w[1].r > w[0].r));
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &prof).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("r,|phi|,|B|,energy_density\n"));
        let s = BpsSummary::compute(&fc, &c, None).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
