//! Exercise the C ABI end to end from Rust, plus a header/export sync
//! check so `include/phaselimit.h` cannot drift from the Rust surface.

use std::collections::BTreeSet;
use std::ffi::CString;
use std::os::raw::c_void;
use std::ptr;

use phaselimit_ffi::*;

fn units() -> PslUnits {
    PslUnits { hbar: 1.0, mass: 1.0, omega0: 1.0 }
}

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { psl_last_error_message(buf.as_mut_ptr() as *mut i8, buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8_lossy(&buf).into_owned()
}

#[test]
fn quench_pipeline_through_the_c_abi() {
    unsafe {
        let mut grid: *mut PslGrid = ptr::null_mut();
        let l = 8.0 * 5.099019513592785 / std::f64::consts::SQRT_2;
        let lp = 8.0 / std::f64::consts::SQRT_2;
        let st = psl_grid_new(-l, l, -lp, lp, 512, 512, 1.0, 1.0, &mut grid);
        assert_eq!(st, PslStatus::Ok, "{}", last_error());

        let mut w0: *mut PslField = ptr::null_mut();
        assert_eq!(psl_ho_wigner(0, units(), grid, &mut w0), PslStatus::Ok);
        let mut norm = 0.0;
        assert_eq!(psl_field_integrate(w0, &mut norm), PslStatus::Ok);
        assert!((norm - 1.0).abs() < 1e-8);
        let mut pur = 0.0;
        assert_eq!(psl_purity(w0, units(), &mut pur), PslStatus::Ok);
        assert!((pur - 1.0).abs() < 1e-6);

        let mut traj: *mut PslTrajectory = ptr::null_mut();
        assert_eq!(psl_solve_ermakov_const(0.0, 1.0, 5.0, 500, &mut traj), PslStatus::Ok);
        let mut len = 0usize;
        assert_eq!(psl_trajectory_len(traj, &mut len), PslStatus::Ok);
        assert_eq!(len, 501);
        let (mut t, mut b, mut bdot) = (0.0, 0.0, 0.0);
        assert_eq!(
            psl_trajectory_sample(traj, 100, &mut t, &mut b, &mut bdot),
            PslStatus::Ok
        );
        assert!((t - 1.0).abs() < 1e-12);
        assert!((b - 2.0_f64.sqrt()).abs() < 1e-8);
        let mut bddot0 = 0.0;
        assert_eq!(psl_trajectory_bddot0(traj, &mut bddot0), PslStatus::Ok);
        assert!((bddot0 - 1.0).abs() < 1e-12);

        let mut wt: *mut PslField = ptr::null_mut();
        assert_eq!(psl_evolve_quench(w0, traj, 100, &mut wt), PslStatus::Ok);
        let mut f = 0.0;
        assert_eq!(psl_fidelity(w0, wt, units(), &mut f), PslStatus::Ok);
        assert!((f - 2.0 / 5.0_f64.sqrt()).abs() < 1e-4, "F(1) = {f}");

        // classical route through the correspondence
        let mut rho0: *mut PslField = ptr::null_mut();
        assert_eq!(psl_classical_from_wigner(w0, units(), true, &mut rho0), PslStatus::Ok);
        let mut rhot: *mut PslField = ptr::null_mut();
        assert_eq!(psl_evolve_quench(rho0, traj, 100, &mut rhot), PslStatus::Ok);
        let mut bc = 0.0;
        assert_eq!(psl_bhattacharyya(rho0, rhot, &mut bc), PslStatus::Ok);
        assert!((bc - f).abs() < 1e-4, "B = {bc} vs F = {f}");
        let mut hd = 0.0;
        assert_eq!(psl_hellinger(rho0, rhot, &mut hd), PslStatus::Ok);
        assert!((hd - (1.0 - bc).sqrt()).abs() < 1e-9);

        // bounds on a state-sized grid
        let mut sg: *mut PslGrid = ptr::null_mut();
        let s = 8.0 / std::f64::consts::SQRT_2;
        assert_eq!(psl_grid_new(-s, s, -s, s, 512, 512, 1.0, 1.0, &mut sg), PslStatus::Ok);
        let mut h: *mut PslField = ptr::null_mut();
        assert_eq!(psl_quadratic_hamiltonian(units(), 0.0, sg, &mut h), PslStatus::Ok);
        let mut ws: *mut PslField = ptr::null_mut();
        assert_eq!(psl_ho_wigner(0, units(), sg, &mut ws), PslStatus::Ok);
        let mut vq = 0.0;
        assert_eq!(
            psl_v_qsl(h, ws, PslMoyalOrder::HbarSquared, units(), &mut vq),
            PslStatus::Ok
        );
        assert!((vq - 0.5).abs() < 1e-4, "v_qsl = {vq}");
        let mut vs = 0.0;
        assert_eq!(psl_v_ssl(h, ws, units(), &mut vs), PslStatus::Ok);
        let mut rs: *mut PslField = ptr::null_mut();
        assert_eq!(psl_classical_from_wigner(ws, units(), true, &mut rs), PslStatus::Ok);
        let mut vc = 0.0;
        assert_eq!(psl_v_csl(h, rs, &mut vc), PslStatus::Ok);
        assert!((vc - vq).abs() < 1e-4 && (vs - vq).abs() < 1e-9);

        let mut tb = 0.0;
        assert_eq!(psl_tau_bound(f, vc, &mut tb), PslStatus::Ok);
        assert!(tb <= 1.0 + 1e-3);

        // oracles agree with the grid numbers
        let mut de = 0.0;
        assert_eq!(psl_gaussian_energy_variance(units(), 0.0, &mut de), PslStatus::Ok);
        assert!((2.0_f64.sqrt() * de - vq).abs() < 1e-4);
        let mut b_oracle = 0.0;
        let sq = 1.0 / 2.0_f64.sqrt();
        assert_eq!(
            psl_quench_bhattacharyya(b, bdot, units(), sq, sq, &mut b_oracle),
            PslStatus::Ok
        );
        assert!((b_oracle - bc).abs() < 1e-4);
        let mut v_oracle = 0.0;
        assert_eq!(psl_quench_vcsl(units(), sq, sq, bddot0, &mut v_oracle), PslStatus::Ok);
        assert!((v_oracle - 0.5).abs() < 1e-12);

        for fld in [w0, wt, rho0, rhot, h, ws, rs] {
            psl_field_free(fld);
        }
        psl_trajectory_free(traj);
        psl_grid_free(grid);
        psl_grid_free(sg);
    }
}

#[test]
fn ermakov_callback_passes_context() {
    extern "C" fn omega(t: f64, ctx: *mut c_void) -> f64 {
        let omega0 = unsafe { *(ctx as *const f64) };
        if t >= 0.0 {
            omega0
        } else {
            0.0
        }
    }
    unsafe {
        let omega0 = 1.0_f64;
        let mut traj: *mut PslTrajectory = ptr::null_mut();
        let st = psl_solve_ermakov(
            Some(omega),
            &omega0 as *const f64 as *mut c_void,
            omega0,
            2.0,
            200,
            &mut traj,
        );
        assert_eq!(st, PslStatus::Ok);
        // constant omega0: fixed point
        let (mut t, mut b, mut bdot) = (0.0, 0.0, 0.0);
        assert_eq!(psl_trajectory_sample(traj, 200, &mut t, &mut b, &mut bdot), PslStatus::Ok);
        assert!((b - 1.0).abs() < 1e-10 && bdot.abs() < 1e-10);
        psl_trajectory_free(traj);
    }
}

#[test]
fn error_paths_set_codes_and_messages() {
    unsafe {
        // null pointers
        assert_eq!(
            psl_grid_new(0.0, 1.0, 0.0, 1.0, 32, 32, 1.0, 1.0, ptr::null_mut()),
            PslStatus::NullPointer
        );
        // invalid grid
        let mut g: *mut PslGrid = ptr::null_mut();
        assert_eq!(
            psl_grid_new(1.0, 0.0, 0.0, 1.0, 32, 32, 1.0, 1.0, &mut g),
            PslStatus::InvalidArgument
        );
        assert!(last_error().contains("extent"), "{}", last_error());

        // grid mismatch
        let mut g1: *mut PslGrid = ptr::null_mut();
        let mut g2: *mut PslGrid = ptr::null_mut();
        assert_eq!(psl_grid_new(-6.0, 6.0, -6.0, 6.0, 64, 64, 1.0, 1.0, &mut g1), PslStatus::Ok);
        assert_eq!(psl_grid_new(-6.0, 6.0, -6.0, 6.0, 128, 128, 1.0, 1.0, &mut g2), PslStatus::Ok);
        let mut a: *mut PslField = ptr::null_mut();
        let mut b: *mut PslField = ptr::null_mut();
        assert_eq!(psl_ho_wigner(0, units(), g1, &mut a), PslStatus::Ok);
        assert_eq!(psl_ho_wigner(0, units(), g2, &mut b), PslStatus::Ok);
        let mut f = 0.0;
        assert_eq!(psl_fidelity(a, b, units(), &mut f), PslStatus::GridMismatch);

        // numeric rejection: excited Wigner state as a classical density
        let mut w1: *mut PslField = ptr::null_mut();
        assert_eq!(psl_ho_wigner(1, units(), g2, &mut w1), PslStatus::Ok);
        let mut rho: *mut PslField = ptr::null_mut();
        assert_eq!(
            psl_classical_from_wigner(w1, units(), true, &mut rho),
            PslStatus::NumericError
        );
        assert!(last_error().contains("negative"), "{}", last_error());

        // out-of-range closed form and bad tau bound
        let mut v = 0.0;
        assert_eq!(psl_closed_form_fidelity(4, 1.0, 0.0, 1.0, &mut v), PslStatus::InvalidArgument);
        assert_eq!(psl_tau_bound(0.5, 0.0, &mut v), PslStatus::InvalidArgument);
        assert_eq!(psl_bures_angle(1.5, &mut v), PslStatus::InvalidArgument);

        // buffer length validation
        let mut buf = vec![0.0_f64; 8];
        assert_eq!(psl_field_copy_values(a, buf.as_mut_ptr(), 8), PslStatus::InvalidArgument);

        psl_field_free(a);
        psl_field_free(b);
        psl_field_free(w1);
        psl_grid_free(g1);
        psl_grid_free(g2);
    }
}

#[test]
fn run_scenario_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("scenario.cfg");
    std::fs::write(
        &cfg_path,
        "[scenario]\nkind = quench-classical\n[grid]\nn = 128\n[time]\nt_max = 2\nsteps = 100\n",
    )
    .unwrap();
    let cfg = CString::new(cfg_path.to_str().unwrap()).unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let st = unsafe { psl_run_scenario(cfg.as_ptr(), out.as_ptr()) };
    assert_eq!(st, PslStatus::Ok, "{}", last_error());
    assert!(dir.path().join("series.csv").exists());
    assert!(dir.path().join("summary.txt").exists());

    let missing = CString::new("/nonexistent/config.cfg").unwrap();
    assert_eq!(unsafe { psl_run_scenario(missing.as_ptr(), out.as_ptr()) }, PslStatus::IoError);
}

/// Every exported psl_* function appears in the C header and vice versa.
#[test]
fn header_matches_exports() {
    let root = env!("CARGO_MANIFEST_DIR");
    let source = std::fs::read_to_string(format!("{root}/src/lib.rs")).unwrap();
    let header = std::fs::read_to_string(format!("{root}/include/phaselimit.h")).unwrap();

    let mut exported = BTreeSet::new();
    for line in source.lines() {
        let line = line.trim();
        if let Some(rest) = line
            .strip_prefix("pub unsafe extern \"C\" fn ")
            .or_else(|| line.strip_prefix("pub extern \"C\" fn "))
        {
            if let Some(name) = rest.split('(').next() {
                exported.insert(name.trim().to_string());
            }
        }
    }
    assert!(!exported.is_empty());

    let mut declared = BTreeSet::new();
    for name in header.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
        if name.starts_with("psl_") && name.len() > "psl_".len() {
            declared.insert(name.to_string());
        }
    }

    let missing: Vec<_> = exported.difference(&declared).collect();
    assert!(missing.is_empty(), "not declared in phaselimit.h: {missing:?}");
    let stale: Vec<_> = declared.difference(&exported).collect();
    assert!(stale.is_empty(), "declared but not exported: {stale:?}");
}
