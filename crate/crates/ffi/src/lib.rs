//! C ABI for the phaselimit toolkit.
//!
//! Conventions:
//! * grids, fields, and trajectories are opaque handles created and freed
//!   by this library; never free them with anything but the matching
//!   `psl_*_free`,
//! * every fallible call returns a [`PslStatus`] and writes its result
//!   through out-pointers only on `PSL_STATUS_OK`,
//! * the most recent error message is retrievable per thread via
//!   [`psl_last_error_message`].
//!
//! The C declarations live in `include/phaselimit.h`, kept in sync with
//! this file by a test.

use std::cell::RefCell;
use std::ffi::CStr;
use std::os::raw::{c_char, c_void};
use std::path::Path;

use phaselimit::bracket::MoyalOrder;
use phaselimit::config::parse_config;
use phaselimit::dynamics::QuenchTrajectory;
use phaselimit::error::Error;
use phaselimit::grid::{PhaseField, PhaseGrid};
use phaselimit::scenario::{run_scenario, write_artifacts};
use phaselimit::states::{GaussianSpec, UnitsSpec};

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GridMismatch = 3,
    NumericError = 4,
    IoError = 5,
    Utf8Error = 6,
}

/// Truncation order of the Moyal bracket.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PslMoyalOrder {
    Poisson = 0,
    HbarSquared = 1,
}

impl From<PslMoyalOrder> for MoyalOrder {
    fn from(o: PslMoyalOrder) -> Self {
        match o {
            PslMoyalOrder::Poisson => MoyalOrder::Poisson,
            PslMoyalOrder::HbarSquared => MoyalOrder::HbarSquared,
        }
    }
}

/// Physical constants of a scenario.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PslUnits {
    pub hbar: f64,
    pub mass: f64,
    pub omega0: f64,
}

fn units_of(u: PslUnits) -> Result<UnitsSpec, Error> {
    UnitsSpec::new(u.hbar, u.mass, u.omega0)
}

/// Opaque phase-space grid handle.
pub struct PslGrid(PhaseGrid);
/// Opaque field handle.
pub struct PslField(PhaseField);
/// Opaque Ermakov trajectory handle.
pub struct PslTrajectory(QuenchTrajectory);

fn status_of(err: &Error) -> PslStatus {
    match err {
        Error::GridMismatch => PslStatus::GridMismatch,
        Error::InvalidGrid(_) | Error::InvalidArgument(_) | Error::Config { .. } => {
            PslStatus::InvalidArgument
        }
        Error::Io(_) => PslStatus::IoError,
        _ => PslStatus::NumericError,
    }
}

fn fail(err: Error) -> PslStatus {
    let code = status_of(&err);
    set_error(err.to_string());
    code
}

fn null_fail(what: &str) -> PslStatus {
    set_error(format!("{what} is NULL"));
    PslStatus::NullPointer
}

macro_rules! nonnull {
    ($ptr:expr, $name:literal) => {
        if $ptr.is_null() {
            return null_fail($name);
        }
    };
}

unsafe fn give<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Copy the current thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be NULL (then only
/// the length is returned).
#[no_mangle]
pub unsafe extern "C" fn psl_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Create a uniform phase-space grid.
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn psl_grid_new(
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
    hbar: f64,
    mass: f64,
    out: *mut *mut PslGrid,
) -> PslStatus {
    nonnull!(out, "out");
    match PhaseGrid::new(q_min, q_max, p_min, p_max, nq, np, hbar, mass) {
        Ok(g) => {
            give(out, PslGrid(g));
            PslStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `grid` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn psl_grid_free(grid: *mut PslGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// All pointers must be valid; `grid` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_grid_shape(
    grid: *const PslGrid,
    nq: *mut usize,
    np: *mut usize,
) -> PslStatus {
    nonnull!(grid, "grid");
    nonnull!(nq, "nq");
    nonnull!(np, "np");
    *nq = (*grid).0.nq();
    *np = (*grid).0.np();
    PslStatus::Ok
}

/// # Safety
/// `field` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn psl_field_free(field: *mut PslField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// All pointers must be valid; `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_field_shape(
    field: *const PslField,
    nq: *mut usize,
    np: *mut usize,
) -> PslStatus {
    nonnull!(field, "field");
    nonnull!(nq, "nq");
    nonnull!(np, "np");
    let g = (*field).0.grid();
    *nq = g.nq();
    *np = g.np();
    PslStatus::Ok
}

/// Copy node values row-major (q outer, p inner) into `buf`.
///
/// # Safety
/// `buf` must hold at least `len` doubles and `len` must be nq * np.
#[no_mangle]
pub unsafe extern "C" fn psl_field_copy_values(
    field: *const PslField,
    buf: *mut f64,
    len: usize,
) -> PslStatus {
    nonnull!(field, "field");
    nonnull!(buf, "buf");
    let values = (*field).0.values();
    if len != values.len() {
        return fail(Error::InvalidArgument(format!(
            "buffer holds {len} values, field has {}",
            values.len()
        )));
    }
    let slice = values.as_slice().expect("fields are contiguous row-major");
    std::ptr::copy_nonoverlapping(slice.as_ptr(), buf, slice.len());
    PslStatus::Ok
}

/// # Safety
/// All pointers must be valid; `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_field_integrate(field: *const PslField, out: *mut f64) -> PslStatus {
    nonnull!(field, "field");
    nonnull!(out, "out");
    *out = (*field).0.integrate();
    PslStatus::Ok
}

/// # Safety
/// All pointers must be valid; `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_field_boundary_ratio(
    field: *const PslField,
    out: *mut f64,
) -> PslStatus {
    nonnull!(field, "field");
    nonnull!(out, "out");
    *out = (*field).0.boundary_ratio();
    PslStatus::Ok
}

unsafe fn make_field(
    out: *mut *mut PslField,
    result: Result<PhaseField, Error>,
) -> PslStatus {
    match result {
        Ok(f) => {
            give(out, PslField(f));
            PslStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Wigner function of the n-th harmonic-oscillator eigenstate.
///
/// # Safety
/// `grid` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_ho_wigner(
    n: u32,
    units: PslUnits,
    grid: *const PslGrid,
    out: *mut *mut PslField,
) -> PslStatus {
    nonnull!(grid, "grid");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    make_field(out, phaselimit::states::ho_wigner(n as usize, &u, &(*grid).0))
}

/// # Safety
/// `grid` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_gaussian_wigner(
    center_q: f64,
    center_p: f64,
    sigma_q: f64,
    sigma_p: f64,
    grid: *const PslGrid,
    out: *mut *mut PslField,
) -> PslStatus {
    nonnull!(grid, "grid");
    nonnull!(out, "out");
    let spec = match GaussianSpec::new(center_q, center_p, sigma_q, sigma_p) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    make_field(out, phaselimit::states::gaussian_wigner(&spec, &(*grid).0))
}

/// # Safety
/// `grid` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_classical_gaussian(
    center_q: f64,
    center_p: f64,
    sigma_q: f64,
    sigma_p: f64,
    grid: *const PslGrid,
    out: *mut *mut PslField,
) -> PslStatus {
    nonnull!(grid, "grid");
    nonnull!(out, "out");
    let spec = match GaussianSpec::new(center_q, center_p, sigma_q, sigma_p) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    make_field(out, phaselimit::states::classical_gaussian(&spec, &(*grid).0))
}

/// Classical density 2 pi hbar W^2 of a Wigner function.
///
/// # Safety
/// `w` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_classical_from_wigner(
    w: *const PslField,
    units: PslUnits,
    require_nonnegative: bool,
    out: *mut *mut PslField,
) -> PslStatus {
    nonnull!(w, "w");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    make_field(
        out,
        phaselimit::states::classical_from_wigner(&(*w).0, &u, require_nonnegative),
    )
}

/// # Safety
/// `grid` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_quadratic_hamiltonian(
    units: PslUnits,
    omega: f64,
    grid: *const PslGrid,
    out: *mut *mut PslField,
) -> PslStatus {
    nonnull!(grid, "grid");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    give(out, PslField(phaselimit::states::quadratic_hamiltonian(&u, omega, &(*grid).0)));
    PslStatus::Ok
}

/// Purity 2 pi hbar integral(W^2).
///
/// # Safety
/// `w` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_purity(
    w: *const PslField,
    units: PslUnits,
    out: *mut f64,
) -> PslStatus {
    nonnull!(w, "w");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    *out = phaselimit::states::purity(&(*w).0, &u);
    PslStatus::Ok
}

/// Integrate the Ermakov equation with a frequency callback
/// `omega(t, ctx)`; `ctx` is passed through untouched.
///
/// # Safety
/// `omega` must be callable for every t in [0, t_max]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_solve_ermakov(
    omega: Option<extern "C" fn(f64, *mut c_void) -> f64>,
    ctx: *mut c_void,
    omega0: f64,
    t_max: f64,
    steps: usize,
    out: *mut *mut PslTrajectory,
) -> PslStatus {
    nonnull!(out, "out");
    let Some(omega) = omega else {
        return null_fail("omega callback");
    };
    match phaselimit::dynamics::solve_ermakov(|t| omega(t, ctx), omega0, t_max, steps) {
        Ok(traj) => {
            give(out, PslTrajectory(traj));
            PslStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Integrate the Ermakov equation for a constant post-quench frequency
/// (`omega_post` = 0 is the sudden trap release).
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_solve_ermakov_const(
    omega_post: f64,
    omega0: f64,
    t_max: f64,
    steps: usize,
    out: *mut *mut PslTrajectory,
) -> PslStatus {
    nonnull!(out, "out");
    match phaselimit::dynamics::solve_ermakov(|_| omega_post, omega0, t_max, steps) {
        Ok(traj) => {
            give(out, PslTrajectory(traj));
            PslStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `traj` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn psl_trajectory_free(traj: *mut PslTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// All pointers must be valid; `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_trajectory_len(
    traj: *const PslTrajectory,
    out: *mut usize,
) -> PslStatus {
    nonnull!(traj, "traj");
    nonnull!(out, "out");
    *out = (*traj).0.len();
    PslStatus::Ok
}

/// Read (t, b, bdot) at one trajectory index.
///
/// # Safety
/// All pointers must be valid; `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_trajectory_sample(
    traj: *const PslTrajectory,
    index: usize,
    t: *mut f64,
    b: *mut f64,
    bdot: *mut f64,
) -> PslStatus {
    nonnull!(traj, "traj");
    nonnull!(t, "t");
    nonnull!(b, "b");
    nonnull!(bdot, "bdot");
    let tr = &(*traj).0;
    if index >= tr.len() {
        return fail(Error::InvalidArgument(format!(
            "index {index} out of range 0..{}",
            tr.len()
        )));
    }
    *t = tr.time(index);
    *b = tr.b(index);
    *bdot = tr.bdot(index);
    PslStatus::Ok
}

/// # Safety
/// All pointers must be valid; `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psl_trajectory_bddot0(
    traj: *const PslTrajectory,
    out: *mut f64,
) -> PslStatus {
    nonnull!(traj, "traj");
    nonnull!(out, "out");
    *out = (*traj).0.bddot0();
    PslStatus::Ok
}

/// Evolve a t = 0 state to a trajectory index by symplectic pullback.
///
/// # Safety
/// `state0` and `traj` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_evolve_quench(
    state0: *const PslField,
    traj: *const PslTrajectory,
    index: usize,
    out: *mut *mut PslField,
) -> PslStatus {
    nonnull!(state0, "state0");
    nonnull!(traj, "traj");
    nonnull!(out, "out");
    make_field(out, phaselimit::dynamics::evolve_quench(&(*state0).0, &(*traj).0, index))
}

unsafe fn scalar(out: *mut f64, result: Result<f64, Error>) -> PslStatus {
    match result {
        Ok(v) => {
            *out = v;
            PslStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `w0` and `wt` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_fidelity(
    w0: *const PslField,
    wt: *const PslField,
    units: PslUnits,
    out: *mut f64,
) -> PslStatus {
    nonnull!(w0, "w0");
    nonnull!(wt, "wt");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    scalar(out, phaselimit::metrics::fidelity(&(*w0).0, &(*wt).0, &u))
}

/// # Safety
/// `rho0` and `rhot` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_bhattacharyya(
    rho0: *const PslField,
    rhot: *const PslField,
    out: *mut f64,
) -> PslStatus {
    nonnull!(rho0, "rho0");
    nonnull!(rhot, "rhot");
    nonnull!(out, "out");
    scalar(out, phaselimit::metrics::bhattacharyya(&(*rho0).0, &(*rhot).0))
}

/// # Safety
/// `rho0` and `rhot` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_hellinger(
    rho0: *const PslField,
    rhot: *const PslField,
    out: *mut f64,
) -> PslStatus {
    nonnull!(rho0, "rho0");
    nonnull!(rhot, "rhot");
    nonnull!(out, "out");
    scalar(out, phaselimit::metrics::hellinger(&(*rho0).0, &(*rhot).0))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_bures_angle(overlap: f64, out: *mut f64) -> PslStatus {
    nonnull!(out, "out");
    scalar(out, phaselimit::metrics::bures_angle(overlap))
}

/// Printed closed-form fidelity F_n for n = 0..=3.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_closed_form_fidelity(
    n: u32,
    b: f64,
    bdot: f64,
    omega0: f64,
    out: *mut f64,
) -> PslStatus {
    nonnull!(out, "out");
    scalar(out, phaselimit::metrics::closed_form_fidelity(n as usize, b, bdot, omega0))
}

/// # Safety
/// `h` and `w0` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_v_qsl(
    h: *const PslField,
    w0: *const PslField,
    order: PslMoyalOrder,
    units: PslUnits,
    out: *mut f64,
) -> PslStatus {
    nonnull!(h, "h");
    nonnull!(w0, "w0");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    scalar(out, phaselimit::bounds::v_qsl(&(*h).0, &(*w0).0, order.into(), &u))
}

/// # Safety
/// `h` and `w0` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_v_ssl(
    h: *const PslField,
    w0: *const PslField,
    units: PslUnits,
    out: *mut f64,
) -> PslStatus {
    nonnull!(h, "h");
    nonnull!(w0, "w0");
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    scalar(out, phaselimit::bounds::v_ssl(&(*h).0, &(*w0).0, &u))
}

/// # Safety
/// `h` and `rho0` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_v_csl(
    h: *const PslField,
    rho0: *const PslField,
    out: *mut f64,
) -> PslStatus {
    nonnull!(h, "h");
    nonnull!(rho0, "rho0");
    nonnull!(out, "out");
    scalar(out, phaselimit::bounds::v_csl(&(*h).0, &(*rho0).0))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_tau_bound(overlap: f64, v: f64, out: *mut f64) -> PslStatus {
    nonnull!(out, "out");
    scalar(out, phaselimit::bounds::tau_bound(overlap, v))
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_gaussian_energy_variance(
    units: PslUnits,
    post_quench_omega: f64,
    out: *mut f64,
) -> PslStatus {
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    *out = phaselimit::oracles::gaussian_energy_variance(&u, post_quench_omega);
    PslStatus::Ok
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_quench_bhattacharyya(
    b: f64,
    bdot: f64,
    units: PslUnits,
    sigma_q: f64,
    sigma_p: f64,
    out: *mut f64,
) -> PslStatus {
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    let spec = match GaussianSpec::new(0.0, 0.0, sigma_q, sigma_p) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    *out = phaselimit::oracles::quench_bhattacharyya(b, bdot, &u, &spec);
    PslStatus::Ok
}

/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psl_quench_vcsl(
    units: PslUnits,
    sigma_q: f64,
    sigma_p: f64,
    bddot0: f64,
    out: *mut f64,
) -> PslStatus {
    nonnull!(out, "out");
    let u = match units_of(units) {
        Ok(u) => u,
        Err(e) => return fail(e),
    };
    let spec = match GaussianSpec::new(0.0, 0.0, sigma_q, sigma_p) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    *out = phaselimit::oracles::quench_vcsl(&u, &spec, bddot0);
    PslStatus::Ok
}

/// Run a scenario config end to end and write `series.csv` / `summary.txt`
/// into `out_dir`. Returns `PSL_STATUS_NUMERIC_ERROR` when a dominance
/// check fails.
///
/// # Safety
/// `config_path` and `out_dir` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn psl_run_scenario(
    config_path: *const c_char,
    out_dir: *const c_char,
) -> PslStatus {
    nonnull!(config_path, "config_path");
    nonnull!(out_dir, "out_dir");
    let Ok(config_path) = CStr::from_ptr(config_path).to_str() else {
        set_error("config path is not valid UTF-8");
        return PslStatus::Utf8Error;
    };
    let Ok(out_dir) = CStr::from_ptr(out_dir).to_str() else {
        set_error("output directory is not valid UTF-8");
        return PslStatus::Utf8Error;
    };
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => return fail(Error::Io(e)),
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let outcome = match run_scenario(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    if let Err(e) = write_artifacts(Path::new(out_dir), &cfg, &outcome) {
        return fail(e);
    }
    if !outcome.passed {
        set_error("dominance check failed; see summary.txt".to_string());
        return PslStatus::NumericError;
    }
    PslStatus::Ok
}
