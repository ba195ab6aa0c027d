//! C interface to `dualmeissner`.
//!
//! Every fallible function returns a [`DmStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read
//! with [`dm_last_error_message`]. Lattice state lives behind the opaque
//! [`DmChain`] handle, released with [`dm_chain_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use dualmeissner::dual_gl::{self, GLParameters, SolveOptions, SweepRow};
use dualmeissner::lattice::{self, snapshot, Chain, SimulationConfig, Start};
use dualmeissner::mag::{self, MagFixOptions};
use dualmeissner::topo::{self, PhysicalConstants, PlanckConvention, TopoInvariants};
use dualmeissner::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Range = 3,
    Domain = 4,
    Singular = 5,
    UndefinedSignal = 6,
    NonConvergence = 7,
    Corrupt = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for DmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Config(_) => DmStatus::Config,
            Error::Range(_) => DmStatus::Range,
            Error::Domain(_) => DmStatus::Domain,
            Error::Singular(_) => DmStatus::Singular,
            Error::UndefinedSignal(_) => DmStatus::UndefinedSignal,
            Error::NonConvergence { .. } => DmStatus::NonConvergence,
            Error::Corrupt(_) => DmStatus::Corrupt,
            Error::Io(_) => DmStatus::Io,
        }
    }
}

/// Planck-mass convention for [`dm_higgs_mass`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmPlanck {
    Hbar = 0,
    H = 1,
}

/// Opaque Monte Carlo chain.
pub struct DmChain {
    chain: Chain,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DmMagResult {
    pub functional: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monopole_density: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DmVortexSummary {
    pub flux: f64,
    pub tension: f64,
    pub m_h: f64,
    pub m_b: f64,
    pub penetration_depth: f64,
    pub coherence_length: f64,
    pub type2: bool,
    pub iterations: usize,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), DmFail>) -> DmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            DmStatus::Ok
        }
        Ok(Err(DmFail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DmStatus::Panic
        }
    }
}

struct DmFail(DmStatus, String);

impl From<Error> for DmFail {
    fn from(e: Error) -> Self {
        DmFail(DmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> DmFail {
    DmFail(DmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, DmFail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn chain_ref<'a>(c: *const DmChain) -> Result<&'a DmChain, DmFail> {
    c.as_ref().ok_or_else(|| null("chain"))
}

unsafe fn chain_mut<'a>(c: *mut DmChain) -> Result<&'a mut DmChain, DmFail> {
    c.as_mut().ok_or_else(|| null("chain"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, DmFail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| DmFail(DmStatus::Config, "path is not UTF-8".into()))?;
    Ok(Path::new(s))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a chain on an `lx·ly·lz·lt` lattice, cold or hot started.
///
/// # Safety
/// `out_chain` must be a valid pointer; the handle must be released with
/// [`dm_chain_free`].
#[no_mangle]
pub unsafe extern "C" fn dm_chain_new(
    beta: f64,
    lx: usize,
    ly: usize,
    lz: usize,
    lt: usize,
    seed: u64,
    hot: bool,
    overrelax: usize,
    out_chain: *mut *mut DmChain,
) -> DmStatus {
    guard(|| {
        let slot = out(out_chain, "out_chain")?;
        let mut sc = SimulationConfig::new(beta, [lx, ly, lz, lt], seed);
        sc.start = if hot { Start::Hot } else { Start::Cold };
        sc.overrelax_per_heatbath = overrelax;
        sc.validate()?;
        let chain = Chain::new(&sc)?;
        *slot = Box::into_raw(Box::new(DmChain { chain }));
        Ok(())
    })
}

/// Loads a snapshot into a new chain. `seed` selects the random streams of
/// subsequent updates.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_chain` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_load(path: *const c_char, seed: u64, overrelax: usize, out_chain: *mut *mut DmChain) -> DmStatus {
    guard(|| {
        let slot = out(out_chain, "out_chain")?;
        let snap = snapshot::read(path_arg(path)?)?;
        let chain = Chain::from_field(snap.field, snap.beta, overrelax, seed);
        *slot = Box::into_raw(Box::new(DmChain { chain }));
        Ok(())
    })
}

/// # Safety
/// `chain` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_free(chain: *mut DmChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Runs `n` compound sweeps.
///
/// # Safety
/// `chain` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_run(chain: *mut DmChain, n: usize) -> DmStatus {
    guard(|| {
        chain_mut(chain)?.chain.run(n)?;
        Ok(())
    })
}

/// # Safety
/// `chain` must be a live handle and `out_sweeps` valid.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_sweeps(chain: *const DmChain, out_sweeps: *mut u64) -> DmStatus {
    guard(|| {
        *out(out_sweeps, "out_sweeps")? = chain_ref(chain)?.chain.sweeps_done();
        Ok(())
    })
}

/// # Safety
/// `chain` must be a live handle and `out_plaquette` valid.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_plaquette(chain: *const DmChain, out_plaquette: *mut f64) -> DmStatus {
    guard(|| {
        *out(out_plaquette, "out_plaquette")? = lattice::average_plaquette(&chain_ref(chain)?.chain.field);
        Ok(())
    })
}

/// Volume-averaged `R×T` Wilson loop.
///
/// # Safety
/// `chain` must be a live handle and `out_w` valid.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_wilson_loop(chain: *const DmChain, r: usize, t: usize, out_w: *mut f64) -> DmStatus {
    guard(|| {
        *out(out_w, "out_w")? = lattice::wilson_loop(&chain_ref(chain)?.chain.field, r, t)?;
        Ok(())
    })
}

/// Fixes a copy of the current field to the maximal abelian gauge and
/// measures the monopole density. The chain itself is left untouched.
///
/// # Safety
/// `chain` must be a live handle and `out_result` valid.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_mag(chain: *const DmChain, tol: f64, max_iter: usize, out_result: *mut DmMagResult) -> DmStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let opts = MagFixOptions { tol, max_iter, ..MagFixOptions::default() };
        let (fixed, rep) = mag::mag_fix_with(&chain_ref(chain)?.chain.field, &opts)?;
        let k = mag::monopole_current(&mag::abelian_project(&fixed));
        *slot = DmMagResult {
            functional: rep.functional_value,
            iterations: rep.iterations,
            converged: rep.converged,
            monopole_density: mag::monopole_density(&k),
        };
        Ok(())
    })
}

/// Writes the current field as a snapshot file.
///
/// # Safety
/// `chain` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dm_chain_save(chain: *const DmChain, path: *const c_char) -> DmStatus {
    guard(|| {
        let c = &chain_ref(chain)?.chain;
        snapshot::write(path_arg(path)?, &c.field, c.beta(), c.sweeps_done())?;
        Ok(())
    })
}

/// # Safety
/// `out_mass` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dm_higgs_mass(volume: f64, cs: f64, planck: DmPlanck, out_mass: *mut f64) -> DmStatus {
    guard(|| {
        let slot = out(out_mass, "out_mass")?;
        let conv = match planck {
            DmPlanck::Hbar => PlanckConvention::Hbar,
            DmPlanck::H => PlanckConvention::H,
        };
        *slot = topo::higgs_mass(&TopoInvariants::new("ffi", volume, cs)?, &PhysicalConstants::for_convention(conv))?;
        Ok(())
    })
}

/// # Safety
/// `out_efolds` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dm_efolds(volume: f64, cs: f64, out_efolds: *mut f64) -> DmStatus {
    guard(|| {
        *out(out_efolds, "out_efolds")? = topo::efolds(&TopoInvariants::new("ffi", volume, cs)?)?;
        Ok(())
    })
}

/// Dual Higgs mass `2v√λ` and dual photon mass `gv`.
///
/// # Safety
/// Both out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dm_gl_masses(g: f64, lambda: f64, v: f64, out_m_h: *mut f64, out_m_b: *mut f64) -> DmStatus {
    guard(|| {
        let p = GLParameters::new(g, lambda, v, 1)?;
        let (mh, mb) = dual_gl::masses(&p);
        *out(out_m_h, "out_m_h")? = mh;
        *out(out_m_b, "out_m_b")? = mb;
        Ok(())
    })
}

/// Solves the winding-`n` flux tube on `n_points` radial nodes (0 picks the
/// default) and summarizes it.
///
/// # Safety
/// `out_summary` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dm_vortex_solve(
    g: f64,
    lambda: f64,
    v: f64,
    n: u32,
    n_points: usize,
    out_summary: *mut DmVortexSummary,
) -> DmStatus {
    guard(|| {
        let slot = out(out_summary, "out_summary")?;
        let p = GLParameters::new(g, lambda, v, n)?;
        let mut opts = SolveOptions::default();
        if n_points > 0 {
            opts.n_points = n_points;
        }
        let row = SweepRow::solve(&p, &opts)?;
        *slot = DmVortexSummary {
            flux: row.flux,
            tension: row.tension,
            m_h: row.m_h,
            m_b: row.m_b,
            penetration_depth: row.lengths.lambda_pen,
            coherence_length: row.lengths.coherence,
            type2: row.lengths.type2,
            iterations: row.iterations,
            residual: row.residual,
        };
        Ok(())
    })
}
