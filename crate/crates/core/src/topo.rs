//! Higgs mass and inflationary expansion from the volume and Chern–Simons
//! invariant of a hyperbolic homology 3-sphere, and the quartic Morse shapes.
//!
//! `M = m_P exp(−vol/(2 CS))`, `a = a0 exp(3 vol/(2 CS))`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Minimum e-fold count regarded as sufficient inflation.
pub const MIN_EFOLDS: f64 = 60.0;

/// `√(ħc/G)` in GeV.
pub const PLANCK_MASS_HBAR_GEV: f64 = 1.220890e19;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TopoInvariants {
    pub name: String,
    pub volume: f64,
    pub cs: f64,
}

impl TopoInvariants {
    pub fn new(name: impl Into<String>, volume: f64, cs: f64) -> Result<Self> {
        let t = Self { name: name.into(), volume, cs };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.volume >= 0.0 && self.volume.is_finite()) {
            return Err(Error::Domain(format!("{}: volume must be >= 0, got {}", self.name, self.volume)));
        }
        if self.cs == 0.0 || !self.cs.is_finite() {
            return Err(Error::Domain(format!("{}: Chern-Simons invariant must be finite and nonzero", self.name)));
        }
        Ok(())
    }

    /// The +8 surgery on the knot 8_10 with its special cusp.
    pub fn sigma_8_10() -> Self {
        Self { name: "sigma_8_10".into(), volume: 5.902827, cs: 0.07546 }
    }
}

/// Which Planck constant enters `m_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanckConvention {
    /// `√(ħc/G)`.
    #[default]
    Hbar,
    /// `√(hc/G)`, larger by `√(2π)`.
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub planck_mass_gev: f64,
    /// Unit of length for [`mass_length_scale`]; 1 means lengths in Planck units.
    pub planck_length: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::for_convention(PlanckConvention::Hbar)
    }
}

impl PhysicalConstants {
    pub fn for_convention(c: PlanckConvention) -> Self {
        let m = match c {
            PlanckConvention::Hbar => PLANCK_MASS_HBAR_GEV,
            PlanckConvention::H => PLANCK_MASS_HBAR_GEV * (2.0 * std::f64::consts::PI).sqrt(),
        };
        Self { planck_mass_gev: m, planck_length: 1.0 }
    }
}

/// `N = 3 vol / (2 CS)`.
pub fn efolds(inv: &TopoInvariants) -> Result<f64> {
    inv.validate()?;
    Ok(1.5 * (inv.volume / inv.cs))
}

pub fn sufficient_inflation(n: f64) -> bool {
    n >= MIN_EFOLDS
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScaleFactor {
    /// `a0 e^N`, or `+∞` when that overflows.
    pub value: f64,
    /// `log10(a/a0)`, always finite.
    pub log10_ratio: f64,
    pub overflow: bool,
}

pub fn scale_factor(inv: &TopoInvariants, a0: f64) -> Result<ScaleFactor> {
    if !(a0 > 0.0 && a0.is_finite()) {
        return Err(Error::Domain(format!("a0 must be > 0, got {a0}")));
    }
    let n = efolds(inv)?;
    let value = a0 * n.exp();
    let overflow = !value.is_finite();
    Ok(ScaleFactor { value, log10_ratio: n / std::f64::consts::LN_10, overflow })
}

/// `m_P exp(−vol/(2 CS))` in GeV.
pub fn higgs_mass(inv: &TopoInvariants, consts: &PhysicalConstants) -> Result<f64> {
    inv.validate()?;
    Ok(consts.planck_mass_gev * (-inv.volume / (2.0 * inv.cs)).exp())
}

/// `M(L) = m_P (L_P / L)^{1/3}`.
pub fn mass_length_scale(l: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("length must be > 0, got {l}")));
    }
    Ok(consts.planck_mass_gev * (consts.planck_length / l).cbrt())
}

/// `U = λ/4 (|Φ|² − v²)²`.
pub fn higgs_potential(phi_norm: f64, lambda: f64, v: f64) -> f64 {
    let u = phi_norm * phi_norm - v * v;
    0.25 * lambda * u * u
}

/// Radial curvature `U''(v) = 2λv²` of [`higgs_potential`].
pub fn potential_curvature(lambda: f64, v: f64) -> f64 {
    2.0 * lambda * v * v
}

/// The classical mass `v√λ` quoted for the potential above.
pub fn classical_higgs_mass(lambda: f64, v: f64) -> f64 {
    v * lambda.sqrt()
}

/// `ψ(ρ) = c4 ρ⁴ + (c2 + t/2) ρ²` with `ρ = ‖y‖`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PotentialShape {
    pub quartic: f64,
    pub quadratic: f64,
    pub t: f64,
}

impl PotentialShape {
    /// `‖y‖⁴ − ‖y‖² + (t/2)‖y‖²`.
    pub fn unfolding(t: f64) -> Self {
        Self { quartic: 1.0, quadratic: -1.0, t }
    }

    pub fn effective_quadratic(&self) -> f64 {
        self.quadratic + 0.5 * self.t
    }

    /// Unfolding parameter at which the effective quadratic term vanishes.
    pub fn t_crit(&self) -> f64 {
        -2.0 * self.quadratic
    }

    pub fn value(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        self.quartic * r2 * r2 + self.effective_quadratic() * r2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CriticalKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CriticalPoint {
    pub rho: f64,
    pub value: f64,
    pub kind: CriticalKind,
    /// Morse index in the radial variable (0 min, 1 max); `None` when degenerate.
    pub index: Option<u8>,
    /// Vanishing second derivative.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CriticalInventory {
    pub points: Vec<CriticalPoint>,
    /// Effective quadratic coefficient is zero: `ψ = c4 ρ⁴` at the origin.
    pub dovetail: bool,
}

/// Radial critical points `ρ ≥ 0` of `ψ`, from `ψ'(ρ) = 2ρ(2 c4 ρ² + q) = 0`.
pub fn morse_critical_points(shape: &PotentialShape) -> Result<CriticalInventory> {
    if !(shape.quartic > 0.0) {
        return Err(Error::Domain(format!("quartic coefficient must be > 0, got {}", shape.quartic)));
    }
    let q = shape.effective_quadratic();
    let c4 = shape.quartic;
    let scale = shape.quadratic.abs().max(shape.t.abs()).max(1.0);
    let dovetail = q.abs() <= 1e-12 * scale;
    // ψ''(ρ) = 12 c4 ρ² + 2q; at q = 0 the origin is still a (quartic) minimum
    let origin = if dovetail {
        CriticalPoint { rho: 0.0, value: 0.0, kind: CriticalKind::Minimum, index: None, degenerate: true }
    } else if q > 0.0 {
        CriticalPoint { rho: 0.0, value: 0.0, kind: CriticalKind::Minimum, index: Some(0), degenerate: false }
    } else {
        CriticalPoint { rho: 0.0, value: 0.0, kind: CriticalKind::Maximum, index: Some(1), degenerate: false }
    };
    let mut points = vec![origin];
    if !dovetail && q < 0.0 {
        let rho = (-q / (2.0 * c4)).sqrt();
        points.push(CriticalPoint { rho, value: shape.value(rho), kind: CriticalKind::Minimum, index: Some(0), degenerate: false });
    }
    Ok(CriticalInventory { points, dovetail })
}

/// Critical points of `ψ` restricted to a line through the origin, `y = x ê`:
/// the radial minimum appears at `±ρ`.
pub fn line_critical_points(shape: &PotentialShape) -> Result<Vec<(f64, f64, CriticalKind)>> {
    let inv = morse_critical_points(shape)?;
    let mut out = Vec::new();
    for p in &inv.points {
        if p.rho == 0.0 {
            out.push((0.0, p.value, p.kind));
        } else {
            out.push((-p.rho, p.value, p.kind));
            out.push((p.rho, p.value, p.kind));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Reads `name,volume,cs` rows. Blank lines and `#` comments are skipped.
pub fn read_invariants_csv<R: BufRead>(r: R) -> Result<Vec<TopoInvariants>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            let cols: Vec<&str> = t.split(',').map(str::trim).collect();
            if cols != ["name", "volume", "cs"] {
                return Err(Error::Config(format!("line {}: expected header name,volume,cs", lineno + 1)));
            }
            continue;
        }
        let cols: Vec<&str> = t.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(Error::Config(format!("line {}: expected 3 columns, got {}", lineno + 1, cols.len())));
        }
        let num = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|_| Error::Config(format!("line {}: bad {what} '{s}'", lineno + 1)))
        };
        let inv = TopoInvariants { name: cols[0].to_string(), volume: num(cols[1], "volume")?, cs: num(cols[2], "cs")? };
        inv.validate().map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        out.push(inv);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HiggsRow {
    pub name: String,
    pub efolds: f64,
    pub log10_scale: f64,
    pub higgs_mass_gev: f64,
    pub sufficient_inflation: bool,
}

impl HiggsRow {
    pub fn compute(inv: &TopoInvariants, consts: &PhysicalConstants) -> Result<Self> {
        let n = efolds(inv)?;
        Ok(Self {
            name: inv.name.clone(),
            efolds: n,
            log10_scale: scale_factor(inv, 1.0)?.log10_ratio,
            higgs_mass_gev: higgs_mass(inv, consts)?,
            sufficient_inflation: sufficient_inflation(n),
        })
    }
}

pub fn write_higgs_csv<W: Write>(mut w: W, rows: &[HiggsRow]) -> std::io::Result<()> {
    writeln!(w, "name,efolds,log10_scale,higgs_mass_gev,sufficient_inflation")?;
    for r in rows {
        writeln!(w, "{},{:.6},{:.6},{:.6},{}", r.name, r.efolds, r.log10_scale, r.higgs_mass_gev, r.sufficient_inflation)?;
    }
    Ok(())
}
