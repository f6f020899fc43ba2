//! End-to-end scenario execution: build the grid and state from a parsed
//! config, evolve through the quench, evaluate the requested bounds, and
//! render the CSV / summary artifacts.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::bounds::{rate_dominance, v_csl, v_csl_timeavg, v_qsl, v_ssl, BoundKind, BoundReport};
use crate::bracket::MoyalOrder;
use crate::config::{ScenarioConfig, ScenarioKind, StateKind};
use crate::dynamics::{evolve_quench, solve_ermakov, QuenchTrajectory};
use crate::error::{Error, Result};
use crate::grid::{PhaseField, PhaseGrid};
use crate::metrics::{overlap_series, OverlapMeasure};
use crate::states::{
    classical_gaussian, gaussian_wigner, ho_wigner, quadratic_hamiltonian, GaussianSpec, UnitsSpec,
};

/// Boundary-to-peak ratio above which a run aborts instead of warning.
pub const BOUNDARY_ESCALATE_RATIO: f64 = 1e-8;

/// Everything a run produces, ready to be written to disk.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: BoundReport,
    pub series_csv: String,
    pub summary: String,
    pub passed: bool,
    /// First dominance violation, when one occurred.
    pub violation: Option<(BoundKind, usize, f64)>,
}

/// 17 significant digits, round-trip exact for f64.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn effective_sigmas(state: &StateKind, units: &UnitsSpec) -> (f64, f64) {
    match state {
        StateKind::HoEigenstate { n } => {
            let scale = ((2 * n + 1) as f64).sqrt() / std::f64::consts::SQRT_2;
            let x0 = units.x0();
            (scale * x0, scale * units.hbar / x0)
        }
        StateKind::Gaussian { sigma_q, sigma_p }
        | StateKind::ClassicalGaussian { sigma_q, sigma_p } => (*sigma_q, *sigma_p),
    }
}

fn default_state(scenario: ScenarioKind, units: &UnitsSpec) -> StateKind {
    match scenario {
        ScenarioKind::QuenchClassical => {
            let m = GaussianSpec::matched(units);
            StateKind::ClassicalGaussian { sigma_q: m.sigma_q, sigma_p: m.sigma_p }
        }
        _ => StateKind::HoEigenstate { n: 0 },
    }
}

fn is_classical(state: &StateKind) -> bool {
    matches!(state, StateKind::ClassicalGaussian { .. })
}

fn default_bounds(state: &StateKind) -> Vec<BoundKind> {
    if is_classical(state) {
        vec![BoundKind::Csl]
    } else {
        vec![BoundKind::Qsl]
    }
}

fn build_state(state: &StateKind, units: &UnitsSpec, grid: &PhaseGrid) -> Result<PhaseField> {
    match state {
        StateKind::HoEigenstate { n } => ho_wigner(*n, units, grid),
        StateKind::Gaussian { sigma_q, sigma_p } => {
            let spec = GaussianSpec::new(0.0, 0.0, *sigma_q, *sigma_p)?;
            gaussian_wigner(&spec, grid)
        }
        StateKind::ClassicalGaussian { sigma_q, sigma_p } => {
            let spec = GaussianSpec::new(0.0, 0.0, *sigma_q, *sigma_p)?;
            classical_gaussian(&spec, grid)
        }
    }
}

fn ensure_contained(field: &PhaseField, what: &str) -> Result<()> {
    let ratio = field.boundary_ratio();
    if ratio > BOUNDARY_ESCALATE_RATIO {
        log::error!("{what}: boundary ratio {ratio:.3e} exceeds {BOUNDARY_ESCALATE_RATIO:.0e}");
        return Err(Error::DomainTruncation { ratio });
    }
    Ok(())
}

fn post_quench_omega(cfg: &ScenarioConfig) -> f64 {
    match cfg.scenario {
        ScenarioKind::QuenchClassical | ScenarioKind::QuenchQuantum => 0.0,
        ScenarioKind::Stationary => cfg.omega0,
        ScenarioKind::CustomOmega => cfg.omega_post.expect("validated by config parsing"),
    }
}

/// Execute a scenario end to end.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let units = UnitsSpec::new(cfg.hbar, cfg.mass, cfg.omega0)?;
    let state_kind = cfg.state.unwrap_or_else(|| default_state(cfg.scenario, &units));
    let bounds = cfg.bounds.clone().unwrap_or_else(|| default_bounds(&state_kind));

    let classical = is_classical(&state_kind);
    for kind in &bounds {
        let classical_bound = matches!(kind, BoundKind::Csl | BoundKind::CslTimeAvg);
        if classical_bound != classical {
            return Err(Error::InvalidArgument(format!(
                "bound '{}' does not apply to a {} state; run it in a separate scenario",
                kind.label(),
                if classical { "classical" } else { "Wigner" },
            )));
        }
    }
    if let StateKind::Gaussian { sigma_q, sigma_p }
    | StateKind::ClassicalGaussian { sigma_q, sigma_p } = state_kind
    {
        let ratio = sigma_p / (units.mass * units.omega0 * sigma_q);
        if (ratio - 1.0).abs() > 1e-9 {
            log::warn!(
                "Gaussian state is not trap-equilibrated (sigma_p / (m omega0 sigma_q) = \
                 {ratio:.6}); the scaling evolution is exact only for trap states"
            );
        }
    }

    let omega_post = post_quench_omega(cfg);
    let t_span = cfg.t_max / cfg.omega0;
    let traj = solve_ermakov(|_| omega_post, cfg.omega0, t_span, cfg.steps)?;

    let (sq_eff, sp_eff) = effective_sigmas(&state_kind, &units);
    let lq = cfg.halfwidth_sigmas * traj.max_b() * sq_eff;
    let shear = units.mass * sq_eff * traj.max_abs_bdot() / sp_eff;
    let lp = cfg.halfwidth_sigmas * sp_eff * shear.max(1.0);
    let grid = PhaseGrid::centered(lq, lp, cfg.grid_n, cfg.grid_n, cfg.hbar, cfg.mass)?;

    let state0 = build_state(&state_kind, &units, &grid)?;
    ensure_contained(&state0, "initial state")?;

    // Bound velocities are t = 0 quantities; compute them on a grid sized
    // to the initial state rather than the full quench window.
    let vgrid = PhaseGrid::centered(
        cfg.halfwidth_sigmas * sq_eff,
        cfg.halfwidth_sigmas * sp_eff,
        cfg.grid_n,
        cfg.grid_n,
        cfg.hbar,
        cfg.mass,
    )?;
    let vstate = build_state(&state_kind, &units, &vgrid)?;
    let vh = quadratic_hamiltonian(&units, omega_post, &vgrid);

    let times: Vec<f64> = traj.times().to_vec();
    let measure = if classical { OverlapMeasure::Bhattacharyya } else { OverlapMeasure::Fidelity };
    let series = overlap_series(&times, measure, &units, |i| evolve_quench(&state0, &traj, i))?;
    ensure_contained(&evolve_quench(&state0, &traj, times.len() - 1)?, "final state")?;

    let h_wide = quadratic_hamiltonian(&units, omega_post, &grid);
    let mut checks = Vec::new();
    let mut violation = None;
    for kind in &bounds {
        let velocity = match kind {
            BoundKind::Qsl => v_qsl(&vh, &vstate, MoyalOrder::HbarSquared, &units)?,
            BoundKind::Ssl => v_ssl(&vh, &vstate, &units)?,
            BoundKind::Csl => v_csl(&vh, &vstate)?,
            BoundKind::CslTimeAvg => {
                v_csl_timeavg(&h_wide, &times, |i| evolve_quench(&state0, &traj, i))?
            }
        };
        // velocities below the finite-difference noise floor count as
        // exactly zero (stationary states); in-scope physical bounds are
        // omega0/2, three orders of magnitude above the snap level
        let velocity = if velocity < 1e-3 * cfg.omega0 { 0.0 } else { velocity };
        let check = rate_dominance(*kind, velocity, &series)?;
        if !check.passed && violation.is_none() {
            if let Some((i, &m)) = check
                .margins
                .iter()
                .enumerate()
                .take(check.margins.len() - 1)
                .skip(1)
                .find(|&(_, &m)| m > 1.0 + crate::bounds::MARGIN_TOLERANCE)
            {
                violation = Some((*kind, i, m));
            }
        }
        checks.push(check);
    }

    let report = BoundReport { scenario: cfg.scenario.label().to_string(), overlap: series, checks };
    let passed = report.passed();
    let series_csv = render_csv(&report);
    let summary = render_summary(cfg, &state_kind, &traj, &report, start.elapsed().as_secs_f64());
    Ok(RunOutcome { report, series_csv, summary, passed, violation })
}

fn render_csv(report: &BoundReport) -> String {
    let mut out = String::from("bound,t,overlap,rate,v_bound,margin\n");
    for check in &report.checks {
        for i in 0..report.overlap.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                check.kind.label(),
                fmt_float(report.overlap.times()[i]),
                fmt_float(report.overlap.values()[i]),
                fmt_float(report.overlap.rates()[i]),
                fmt_float(check.velocity),
                fmt_float(check.margins[i]),
            );
        }
    }
    out
}

fn render_summary(
    cfg: &ScenarioConfig,
    state: &StateKind,
    traj: &QuenchTrajectory,
    report: &BoundReport,
    wall_seconds: f64,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", report.scenario);
    let state_desc = match state {
        StateKind::HoEigenstate { n } => format!("ho-eigenstate {n}"),
        StateKind::Gaussian { sigma_q, sigma_p } => format!("gaussian {sigma_q} {sigma_p}"),
        StateKind::ClassicalGaussian { sigma_q, sigma_p } => {
            format!("classical-gaussian {sigma_q} {sigma_p}")
        }
    };
    let _ = writeln!(s, "state: {state_desc}");
    let _ = writeln!(
        s,
        "units: hbar = {}, mass = {}, omega0 = {}",
        cfg.hbar, cfg.mass, cfg.omega0
    );
    let _ = writeln!(
        s,
        "grid: {0} x {0} nodes, halfwidth {1} sigmas",
        cfg.grid_n, cfg.halfwidth_sigmas
    );
    let _ = writeln!(
        s,
        "time: {} steps to t = {} / omega0 (b_max = {:.6}, bddot0 = {:.6})",
        cfg.steps,
        cfg.t_max,
        traj.max_b(),
        traj.bddot0()
    );
    let n = report.overlap.len();
    let _ = writeln!(
        s,
        "overlap: starts {:.9}, ends {:.9}",
        report.overlap.values()[0],
        report.overlap.values()[n - 1]
    );
    for check in &report.checks {
        let status = if check.trivially_satisfied {
            "pass (trivially satisfied: stationary state, zero velocity)".to_string()
        } else if check.passed {
            format!("pass (max margin {:.6})", check.max_margin)
        } else {
            format!("FAIL (max margin {:.6})", check.max_margin)
        };
        let _ = writeln!(s, "bound {}: v = {:.9}, {status}", check.kind.label(), check.velocity);
    }
    let _ = writeln!(s, "result: {}", if report.passed() { "PASS" } else { "FAIL" });
    let _ = writeln!(s, "wall time: {wall_seconds:.3} s");
    s
}

/// Write the run artifacts into `out_dir`, creating it if needed.
pub fn write_artifacts(out_dir: &Path, cfg: &ScenarioConfig, outcome: &RunOutcome) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join(&cfg.series_name), &outcome.series_csv)?;
    std::fs::write(out_dir.join(&cfg.summary_name), &outcome.summary)?;
    Ok(())
}
