//! Library walkthrough: release a trap ground state, verify that all
//! three speed limits coincide, and confirm the measured overlap rate
//! stays below them.
//!
//! Run with `cargo run --release --example quench`.

use phaselimit::bounds::{rate_dominance, v_csl, v_qsl, v_ssl, BoundKind};
use phaselimit::bracket::MoyalOrder;
use phaselimit::dynamics::{evolve_quench, solve_ermakov};
use phaselimit::grid::PhaseGrid;
use phaselimit::metrics::{closed_form_fidelity, overlap_series, OverlapMeasure};
use phaselimit::oracles::gaussian_energy_variance;
use phaselimit::states::{
    classical_gaussian, ho_wigner, quadratic_hamiltonian, GaussianSpec, UnitsSpec,
};

fn main() -> phaselimit::Result<()> {
    let units = UnitsSpec::natural();
    let spec = GaussianSpec::matched(&units);

    // trap switched off at t = 0: b(t) = sqrt(1 + t^2)
    let traj = solve_ermakov(|_| 0.0, units.omega0, 5.0, 500)?;
    println!("bddot(0) = {} (omega0^2)", traj.bddot0());

    // velocities are t = 0 quantities; an 8-sigma grid around the initial
    // state is enough
    let s = spec.sigma_q;
    let sg = PhaseGrid::centered(8.0 * s, 8.0 * spec.sigma_p, 512, 512, units.hbar, units.mass)?;
    let h = quadratic_hamiltonian(&units, 0.0, &sg);
    let w0 = ho_wigner(0, &units, &sg)?;
    let rho0 = classical_gaussian(&spec, &sg)?;

    let vq = v_qsl(&h, &w0, MoyalOrder::HbarSquared, &units)?;
    let vs = v_ssl(&h, &w0, &units)?;
    let vc = v_csl(&h, &rho0)?;
    let de = gaussian_energy_variance(&units, 0.0);
    println!("v_qsl = {vq:.8}  v_ssl = {vs:.8}  v_csl = {vc:.8}");
    println!("sqrt(2) dE / hbar = {:.8}", 2.0_f64.sqrt() * de / units.hbar);

    // the time series needs a grid that contains the expanding state
    let lq = 8.0 * traj.max_b() * spec.sigma_q;
    let g = PhaseGrid::centered(lq, 8.0 * spec.sigma_p, 512, 512, units.hbar, units.mass)?;
    let rho0 = classical_gaussian(&spec, &g)?;
    let times: Vec<f64> = traj.times().to_vec();
    let series = overlap_series(&times, OverlapMeasure::Bhattacharyya, &units, |i| {
        evolve_quench(&rho0, &traj, i)
    })?;

    let i1 = 100; // t = 1/omega0
    println!(
        "B(1/omega0) = {:.9}  closed form = {:.9}",
        series.values()[i1],
        closed_form_fidelity(0, traj.b(i1), traj.bdot(i1), units.omega0)?
    );

    let check = rate_dominance(BoundKind::Csl, vc, &series)?;
    println!(
        "max |dB/dt| / v = {:.6} at bound v = {vc:.6}  ->  {}",
        check.max_margin,
        if check.passed { "bound respected" } else { "bound violated" }
    );
    Ok(())
}
