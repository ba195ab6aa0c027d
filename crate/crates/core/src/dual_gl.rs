//! Cylindrical flux tubes of the dual abelian Higgs model.
//!
//! Energy per unit length, with `φ = S e^{inθ}` and `b_θ = n a(r)/(g r)`:
//!
//! ```text
//! T = 2π ∫ r dr [ S'² + n²(1−a)² S²/r² + n² a'²/(g² r²) + λ (S² − v²)² ]
//! ```
//!
//! Its radial Euler–Lagrange equations are
//! `S'' + S'/r − n²(1−a)² S/r² − 2λ S (S² − v²) = 0` and
//! `a'' − a'/r + g² S² (1 − a) = 0`, giving `m_H = 2v√λ` and `m_B = g v`.
//! The first-order (self-dual) point is `2√λ = g`, where `T = 2π v² n`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GLParameters {
    pub g: f64,
    pub lambda: f64,
    pub v: f64,
    pub n: u32,
}

impl GLParameters {
    pub fn new(g: f64, lambda: f64, v: f64, n: u32) -> Result<Self> {
        let p = Self { g, lambda, v, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0.0 || !self.g.is_finite() {
            return Err(Error::Config(format!("g must be finite and nonzero, got {}", self.g)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::Config(format!("v must be > 0, got {}", self.v)));
        }
        if self.n < 1 {
            return Err(Error::Config("winding n must be >= 1".into()));
        }
        Ok(())
    }
}

/// `(m_H, m_B) = (2v√λ, g v)`. Negative `g` gives the same `m_B` as `|g|`.
pub fn masses(p: &GLParameters) -> (f64, f64) {
    (2.0 * p.v * p.lambda.sqrt(), p.g.abs() * p.v)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Lengths {
    /// Penetration depth `1/m_B`.
    pub lambda_pen: f64,
    /// Coherence length `1/m_H`.
    pub coherence: f64,
    /// `Λ > L`, false at criticality.
    pub type2: bool,
    /// `Λ = L` to rounding.
    pub critical: bool,
}

pub fn lengths_and_type(p: &GLParameters) -> Lengths {
    let (mh, mb) = masses(p);
    let (lp, l) = (1.0 / mb, 1.0 / mh);
    let critical = (lp - l).abs() <= 1e-12 * lp.max(l);
    Lengths { lambda_pen: lp, coherence: l, type2: !critical && lp > l, critical }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Outer radius; defaults to `20·max(Λ, L)`.
    pub rmax: Option<f64>,
    pub n_points: usize,
    /// Bound on the stencil-scaled residual and on the last Newton step.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { rmax: None, n_points: 1024, tol: 1e-9, max_iter: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VortexProfile {
    pub params: GLParameters,
    /// Nodes in `(0, rmax]`; `r = 0` is the implicit inner boundary.
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `max_i |F_i| Δ_i²` with `Δ_i` the mean adjacent spacing.
    pub residual: f64,
    pub boundary_residual_s: f64,
    pub boundary_residual_a: f64,
}

/// Radial grid `r_i = rmax sinh(α i/N)/sinh(α)`, with `α` chosen so the
/// innermost spacing resolves the shorter of the two lengths.
fn radial_grid(rmax: f64, n: usize, short: f64) -> Vec<f64> {
    let target = (0.01 * short).min(rmax / n as f64);
    let h0 = |alpha: f64| rmax * alpha / (n as f64 * alpha.sinh());
    let (mut lo, mut hi) = (1e-6, 30.0);
    if h0(hi) > target {
        lo = hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h0(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = hi;
    (1..=n).map(|i| rmax * (alpha * i as f64 / n as f64).sinh() / alpha.sinh()).collect()
}

/// Nonuniform three-point weights `(lower, centre, upper)` for `u''` and `u'`.
fn stencil(hm: f64, hp: f64) -> ([f64; 3], [f64; 3]) {
    let d2 = [2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))];
    let d1 = [-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))];
    (d2, d1)
}

struct System<'a> {
    p: &'a GLParameters,
    r: &'a [f64],
}

impl System<'_> {
    fn rr(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.r[i - 1]
        }
    }

    /// Residuals at interior nodes `1..N−1` of the padded arrays (padded index 0 is `r = 0`).
    fn residual(&self, s: &[f64], a: &[f64]) -> (Vec<[f64; 2]>, f64) {
        let p = self.p;
        let n2 = (p.n as f64).powi(2);
        let g2 = p.g * p.g;
        let v2 = p.v * p.v;
        let m = s.len() - 1;
        let mut out = vec![[0.0; 2]; m + 1];
        let mut worst = 0.0f64;
        for i in 1..m {
            let (hm, hp) = (self.rr(i) - self.rr(i - 1), self.rr(i + 1) - self.rr(i));
            let (d2, d1) = stencil(hm, hp);
            let r = self.rr(i);
            let apply = |w: &[f64; 3], u: &[f64]| w[0] * u[i - 1] + w[1] * u[i] + w[2] * u[i + 1];
            let om = 1.0 - a[i];
            let f1 = apply(&d2, s) + apply(&d1, s) / r - n2 * om * om * s[i] / (r * r)
                - 2.0 * p.lambda * s[i] * (s[i] * s[i] - v2);
            let f2 = apply(&d2, a) - apply(&d1, a) / r + g2 * s[i] * s[i] * om;
            out[i] = [f1, f2];
            let scale = 0.25 * (hm + hp) * (hm + hp);
            worst = worst.max(f1.abs() * scale / p.v).max(f2.abs() * scale);
        }
        (out, worst)
    }

    /// Newton step: solves `J δ = −F` with the 2×2 block-tridiagonal Jacobian.
    fn newton_step(&self, s: &[f64], a: &[f64], f: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let p = self.p;
        let n2 = (p.n as f64).powi(2);
        let g2 = p.g * p.g;
        let v2 = p.v * p.v;
        let m = s.len() - 1;
        type B = [[f64; 2]; 2];
        let mul = |x: &B, y: &B| -> B {
            [
                [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
                [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
            ]
        };
        let mulv = |x: &B, y: &[f64; 2]| [x[0][0] * y[0] + x[0][1] * y[1], x[1][0] * y[0] + x[1][1] * y[1]];
        let inv = |x: &B| -> B {
            let det = x[0][0] * x[1][1] - x[0][1] * x[1][0];
            [[x[1][1] / det, -x[0][1] / det], [-x[1][0] / det, x[0][0] / det]]
        };
        // forward elimination over interior nodes 1..m−1
        let mut cp: Vec<B> = vec![[[0.0; 2]; 2]; m];
        let mut dp: Vec<[f64; 2]> = vec![[0.0; 2]; m];
        for i in 1..m {
            let (hm, hp) = (self.rr(i) - self.rr(i - 1), self.rr(i + 1) - self.rr(i));
            let (d2, d1) = stencil(hm, hp);
            let r = self.rr(i);
            let om = 1.0 - a[i];
            let lo: B = [[d2[0] + d1[0] / r, 0.0], [0.0, d2[0] - d1[0] / r]];
            let up: B = [[d2[2] + d1[2] / r, 0.0], [0.0, d2[2] - d1[2] / r]];
            let di: B = [
                [
                    d2[1] + d1[1] / r - n2 * om * om / (r * r) - 2.0 * p.lambda * (3.0 * s[i] * s[i] - v2),
                    2.0 * n2 * om * s[i] / (r * r),
                ],
                [2.0 * g2 * s[i] * om, d2[1] - d1[1] / r - g2 * s[i] * s[i]],
            ];
            let rhs = [-f[i][0], -f[i][1]];
            let (den, r2) = if i == 1 {
                (di, rhs)
            } else {
                let lc = mul(&lo, &cp[i - 1]);
                let ld = mulv(&lo, &dp[i - 1]);
                ([[di[0][0] - lc[0][0], di[0][1] - lc[0][1]], [di[1][0] - lc[1][0], di[1][1] - lc[1][1]]], [
                    rhs[0] - ld[0],
                    rhs[1] - ld[1],
                ])
            };
            let dinv = inv(&den);
            cp[i] = mul(&dinv, &up);
            dp[i] = mulv(&dinv, &r2);
        }
        let mut x = vec![[0.0; 2]; m + 1];
        for i in (1..m).rev() {
            let cx = mulv(&cp[i], &x[i + 1]);
            x[i] = [dp[i][0] - cx[0], dp[i][1] - cx[1]];
        }
        x
    }
}

/// Damped Newton solve of the radial boundary-value problem with
/// `S(0) = 0`, `a(0) = 0`, `S(rmax) = v`, `a(rmax) = 1`.
pub fn solve_vortex(p: &GLParameters, opts: &SolveOptions) -> Result<(VortexProfile, SolveReport)> {
    p.validate()?;
    let len = lengths_and_type(p);
    let long = len.lambda_pen.max(len.coherence);
    let short = len.lambda_pen.min(len.coherence);
    let rmax = opts.rmax.unwrap_or(20.0 * long);
    if !(rmax >= 10.0 * long * (1.0 - 1e-12)) || !rmax.is_finite() {
        return Err(Error::Config(format!("rmax = {rmax} must be >= 10 max(Lambda, L) = {}", 10.0 * long)));
    }
    if opts.n_points < 256 {
        return Err(Error::Config(format!("vortex grid needs >= 256 points, got {}", opts.n_points)));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    let r = radial_grid(rmax, opts.n_points, short);
    let sys = System { p, r: &r };
    let (mh, mb) = masses(p);
    let nn = p.n as i32;
    // padded with the r = 0 node
    let mut s: Vec<f64> = std::iter::once(0.0).chain(r.iter().map(|&x| p.v * (x * mh).tanh().powi(nn))).collect();
    let mut a: Vec<f64> = std::iter::once(0.0).chain(r.iter().map(|&x| (x * mb * 0.5).tanh().powi(2))).collect();
    let last = s.len() - 1;
    s[last] = p.v;
    a[last] = 1.0;

    let (mut f, mut res) = sys.residual(&s, &a);
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    loop {
        if res < opts.tol && step < opts.tol {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence { iterations, residual: res });
        }
        iterations += 1;
        let dx = sys.newton_step(&s, &a, &f);
        let mut t = 1.0;
        loop {
            let s_try: Vec<f64> = s.iter().zip(&dx).map(|(u, d)| u + t * d[0]).collect();
            let a_try: Vec<f64> = a.iter().zip(&dx).map(|(u, d)| u + t * d[1]).collect();
            let (f_try, res_try) = sys.residual(&s_try, &a_try);
            if res_try.is_finite() && (res_try < res || t < 1e-3 || res < opts.tol) {
                step = dx.iter().map(|d| (d[0] / p.v).abs().max(d[1].abs())).fold(0.0, f64::max) * t;
                s = s_try;
                a = a_try;
                f = f_try;
                res = res_try;
                break;
            }
            t *= 0.5;
        }
    }
    let report = SolveReport {
        iterations,
        residual: res,
        boundary_residual_s: (s[last] - p.v).abs() / p.v,
        boundary_residual_a: (a[last] - 1.0).abs(),
    };
    s.remove(0);
    a.remove(0);
    Ok((VortexProfile { params: *p, r, s, a }, report))
}

/// Midpoint-rule integrand terms on each interval, including `[0, r_1]`.
fn intervals(prof: &VortexProfile) -> impl Iterator<Item = (f64, f64, f64, f64, f64, f64)> + '_ {
    let pad = |v: &[f64], i: usize| if i == 0 { 0.0 } else { v[i - 1] };
    (0..prof.r.len()).map(move |i| {
        let (r0, r1) = (pad(&prof.r, i), prof.r[i]);
        let (s0, s1) = (pad(&prof.s, i), prof.s[i]);
        let (a0, a1) = (pad(&prof.a, i), prof.a[i]);
        let h = r1 - r0;
        (h, 0.5 * (r0 + r1), 0.5 * (s0 + s1), 0.5 * (a0 + a1), (s1 - s0) / h, (a1 - a0) / h)
    })
}

fn density(p: &GLParameters, r: f64, s: f64, a: f64, ds: f64, da: f64) -> f64 {
    let n2 = (p.n as f64).powi(2);
    let om = 1.0 - a;
    let u = s * s - p.v * p.v;
    ds * ds + n2 * om * om * s * s / (r * r) + n2 * da * da / (p.g * p.g * r * r) + p.lambda * u * u
}

/// Magnetic flux `2π ∫ r b_z dr` with `b_z = n a'/(g r)`; equals `2π n a(rmax)/g`.
pub fn flux(prof: &VortexProfile) -> f64 {
    let p = &prof.params;
    let total: f64 = intervals(prof).map(|(h, _, _, _, _, da)| h * da).sum();
    2.0 * std::f64::consts::PI * p.n as f64 * total / p.g
}

/// Energy per unit length by the midpoint rule on every grid interval.
pub fn string_tension(prof: &VortexProfile) -> f64 {
    tension_beyond(prof, 0.0)
}

/// Energy per unit length carried outside radius `rc`.
pub fn tension_beyond(prof: &VortexProfile, rc: f64) -> f64 {
    let p = &prof.params;
    let total: f64 = intervals(prof)
        .filter(|&(_, rm, ..)| rm > rc)
        .map(|(h, rm, s, a, ds, da)| h * rm * density(p, rm, s, a, ds, da))
        .sum();
    2.0 * std::f64::consts::PI * total
}

/// Nodal energy density, with centered differences on the nonuniform grid.
pub fn energy_density(prof: &VortexProfile) -> Vec<f64> {
    let p = &prof.params;
    let m = prof.r.len();
    (0..m)
        .map(|i| {
            let rl = if i == 0 { 0.0 } else { prof.r[i - 1] };
            let (sl, al) = if i == 0 { (0.0, 0.0) } else { (prof.s[i - 1], prof.a[i - 1]) };
            let (ds, da) = if i + 1 < m {
                let (hm, hp) = (prof.r[i] - rl, prof.r[i + 1] - prof.r[i]);
                let (_, d1) = stencil(hm, hp);
                (
                    d1[0] * sl + d1[1] * prof.s[i] + d1[2] * prof.s[i + 1],
                    d1[0] * al + d1[1] * prof.a[i] + d1[2] * prof.a[i + 1],
                )
            } else {
                let h = prof.r[i] - rl;
                ((prof.s[i] - sl) / h, (prof.a[i] - al) / h)
            };
            density(p, prof.r[i], prof.s[i], prof.a[i], ds, da)
        })
        .collect()
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TailFit {
    pub m_h: f64,
    pub m_b: f64,
}

/// Decay masses from `ln((v − S)√r)` and `ln((1 − a)/√r)`, fitted where the
/// deviation lies between `10⁻⁹` and `10⁻⁴` and away from the outer wall.
pub fn fit_tail_masses(prof: &VortexProfile) -> Result<TailFit> {
    let p = &prof.params;
    let rmax = *prof.r.last().unwrap();
    let fit = |dev: &dyn Fn(usize) -> f64, weight: f64| -> Result<f64> {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, &r) in prof.r.iter().enumerate() {
            let d = dev(i);
            if r < 0.7 * rmax && d > 1e-9 && d < 1e-4 {
                xs.push(r);
                ys.push((d * r.powf(weight)).ln());
            }
        }
        if xs.len() < 5 {
            return Err(Error::Domain(format!("tail fit window has {} points", xs.len())));
        }
        Ok(-slope(&xs, &ys))
    };
    let m_h = fit(&|i| (p.v - prof.s[i]) / p.v, 0.5)?;
    let m_b = fit(&|i| 1.0 - prof.a[i], -0.5)?;
    Ok(TailFit { m_h, m_b })
}

/// Log-log slope of `S` over the innermost nodes.
pub fn core_exponent(prof: &VortexProfile) -> f64 {
    let k = 6;
    let x: Vec<f64> = prof.r[..k].iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = prof.s[..k].iter().map(|s| s.ln()).collect();
    slope(&x, &y)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LondonPoint {
    pub lambda: f64,
    pub coherence: f64,
    /// `|S(1) − v|/v`.
    pub deviation_at_unit_radius: f64,
    /// `max |S − v|/v` over `r > 3L`.
    pub max_deviation_outside_core: f64,
    pub flux: f64,
    /// Tension carried outside the fixed cutoff.
    pub tension_outside_cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LondonReport {
    pub cutoff: f64,
    pub points: Vec<LondonPoint>,
    pub deviation_monotone: bool,
    /// `|T_last − T_prev| / T_last` for the two largest `λ`.
    pub tension_cauchy: f64,
}

/// Solves along an increasing `λ` sequence at fixed `g`, `v`, `n` and
/// reports how `S` approaches `v` and how the tension outside `cutoff` settles.
pub fn london_limit_check(base: &GLParameters, lambdas: &[f64], cutoff: f64, opts: &SolveOptions) -> Result<LondonReport> {
    if lambdas.len() < 2 || lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("London sequence needs at least two increasing lambda values".into()));
    }
    let points: Vec<LondonPoint> = lambdas
        .par_iter()
        .map(|&lambda| {
            let p = GLParameters { lambda, ..*base };
            let (prof, _) = solve_vortex(&p, opts)?;
            let l = lengths_and_type(&p).coherence;
            let dev = |i: usize| (prof.s[i] - p.v).abs() / p.v;
            let at_one = interpolate(&prof.r, &prof.s, 1.0);
            let outside =
                (0..prof.r.len()).filter(|&i| prof.r[i] > 3.0 * l).map(dev).fold(0.0f64, f64::max);
            Ok(LondonPoint {
                lambda,
                coherence: l,
                deviation_at_unit_radius: (at_one - p.v).abs() / p.v,
                max_deviation_outside_core: outside,
                flux: flux(&prof),
                tension_outside_cutoff: tension_beyond(&prof, cutoff),
            })
        })
        .collect::<Result<_>>()?;
    let deviation_monotone = points.windows(2).all(|w| w[1].deviation_at_unit_radius < w[0].deviation_at_unit_radius);
    let k = points.len();
    let (t1, t0) = (points[k - 1].tension_outside_cutoff, points[k - 2].tension_outside_cutoff);
    Ok(LondonReport { cutoff, points, deviation_monotone, tension_cauchy: (t1 - t0).abs() / t1 })
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let j = x.partition_point(|&r| r < at).clamp(1, x.len() - 1);
    let t = (at - x[j - 1]) / (x[j] - x[j - 1]);
    y[j - 1] + t * (y[j] - y[j - 1])
}

pub fn write_profile_csv<W: Write>(mut w: W, prof: &VortexProfile) -> std::io::Result<()> {
    let p = &prof.params;
    let eps = energy_density(prof);
    writeln!(w, "r,S,a,b_theta,energy_density")?;
    for i in 0..prof.r.len() {
        let b = p.n as f64 * prof.a[i] / (p.g * prof.r[i]);
        writeln!(w, "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}", prof.r[i], prof.s[i], prof.a[i], b, eps[i])?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub params: GLParameters,
    pub m_h: f64,
    pub m_b: f64,
    pub lengths: Lengths,
    pub flux: f64,
    pub tension: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl SweepRow {
    pub fn solve(p: &GLParameters, opts: &SolveOptions) -> Result<Self> {
        let (prof, rep) = solve_vortex(p, opts)?;
        let (m_h, m_b) = masses(p);
        Ok(Self {
            params: *p,
            m_h,
            m_b,
            lengths: lengths_and_type(p),
            flux: flux(&prof),
            tension: string_tension(&prof),
            iterations: rep.iterations,
            residual: rep.residual,
        })
    }
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(w, "g,lambda,v,n,m_H,m_B,Lambda,L,type2,flux,tension,iters,residual")?;
    for r in rows {
        let p = &r.params;
        writeln!(
            w,
            "{},{},{},{},{:.10e},{:.10e},{:.10e},{:.10e},{},{:.10e},{:.10e},{},{:.3e}",
            p.g,
            p.lambda,
            p.v,
            p.n,
            r.m_h,
            r.m_b,
            r.lengths.lambda_pen,
            r.lengths.coherence,
            r.lengths.type2,
            r.flux,
            r.tension,
            r.iterations,
            r.residual
        )?;
    }
    Ok(())
}
