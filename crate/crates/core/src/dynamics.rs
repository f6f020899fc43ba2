//! Time evolution under quadratic Hamiltonians: Ermakov scaling solutions,
//! symplectic point maps, and state transport by exact characteristics.
//!
//! For quadratic Hamiltonians the quantum and classical phase-space
//! propagators coincide, so a state at time t is the initial field pulled
//! back through a linear symplectic map; transport only ever pays
//! interpolation error, never time-stepping error.

use crate::error::{Error, Result};
use crate::grid::PhaseField;
use ndarray::Array2;

/// Scaling factor below which the Ermakov integration is considered to have
/// hit a focusing singularity.
pub const ERMAKOV_MIN_B: f64 = 1e-12;

/// Relative mass loss through transport above which a warning is emitted.
pub const TRANSPORT_MASS_WARN: f64 = 1e-8;

/// Linear map (q, p) -> (q', p') = (alpha q + beta p, gamma q + delta p)
/// with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMap {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SymplecticMap {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let map = Self { alpha, beta, gamma, delta };
        let det = map.det();
        if !det.is_finite() || (det - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "map is not symplectic: det = {det}"
            )));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        Self { alpha: 1.0, beta: 0.0, gamma: 0.0, delta: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    pub fn apply(&self, q: f64, p: f64) -> (f64, f64) {
        (self.alpha * q + self.beta * p, self.gamma * q + self.delta * p)
    }

    /// Apply the inverse map; exact because det = 1.
    pub fn inverse_apply(&self, q: f64, p: f64) -> (f64, f64) {
        (self.delta * q - self.beta * p, -self.gamma * q + self.alpha * p)
    }
}

/// Ermakov scaling solution b(t), db/dt(t) on a uniform time mesh, plus the
/// initial curvature d^2b/dt^2(0).
#[derive(Debug, Clone)]
pub struct QuenchTrajectory {
    times: Vec<f64>,
    b: Vec<f64>,
    bdot: Vec<f64>,
    bddot0: f64,
}

impl QuenchTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn b(&self, i: usize) -> f64 {
        self.b[i]
    }

    pub fn bdot(&self, i: usize) -> f64 {
        self.bdot[i]
    }

    pub fn bddot0(&self) -> f64 {
        self.bddot0
    }

    pub fn max_abs_bdot(&self) -> f64 {
        self.bdot.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_b(&self) -> f64 {
        self.b.iter().fold(0.0_f64, |m, v| m.max(*v))
    }
}

/// Integrate the Ermakov equation b'' + omega(t)^2 b = omega0^2 / b^3 with
/// b(0) = 1, b'(0) = 0 by fixed-step classical RK4 on [0, t_max].
pub fn solve_ermakov<F: Fn(f64) -> f64>(
    omega_of_t: F,
    omega0: f64,
    t_max: f64,
    steps: usize,
) -> Result<QuenchTrajectory> {
    if steps < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 Ermakov steps, got {steps}"
        )));
    }
    if !(t_max > 0.0) || !omega0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bad Ermakov window: t_max = {t_max}, omega0 = {omega0}"
        )));
    }
    let om0_sq = omega0 * omega0;
    let rhs = |t: f64, b: f64, bdot: f64| -> Result<(f64, f64)> {
        let om = omega_of_t(t);
        if !om.is_finite() {
            return Err(Error::InvalidArgument(format!("omega({t}) is not finite")));
        }
        Ok((bdot, om0_sq / (b * b * b) - om * om * b))
    };

    let dt = t_max / steps as f64;
    let n = steps + 1;
    let mut times = Vec::with_capacity(n);
    let mut bs = Vec::with_capacity(n);
    let mut bdots = Vec::with_capacity(n);

    let (mut b, mut bdot) = (1.0_f64, 0.0_f64);
    let (_, bddot0) = rhs(0.0, b, bdot)?;
    times.push(0.0);
    bs.push(b);
    bdots.push(bdot);

    for step in 0..steps {
        let t = step as f64 * dt;
        let (k1b, k1v) = rhs(t, b, bdot)?;
        let (k2b, k2v) = rhs(t + 0.5 * dt, b + 0.5 * dt * k1b, bdot + 0.5 * dt * k1v)?;
        let (k3b, k3v) = rhs(t + 0.5 * dt, b + 0.5 * dt * k2b, bdot + 0.5 * dt * k2v)?;
        let (k4b, k4v) = rhs(t + dt, b + dt * k3b, bdot + dt * k3v)?;
        b += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        bdot += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let t_next = (step + 1) as f64 * dt;
        if !(b > ERMAKOV_MIN_B) {
            return Err(Error::ErmakovSingularity { time: t_next, b });
        }
        times.push(t_next);
        bs.push(b);
        bdots.push(bdot);
    }

    Ok(QuenchTrajectory { times, b: bs, bdot: bdots, bddot0 })
}

/// Symplectic map of the scaling solution: (q, p) -> (q/b, b p - m q bdot).
pub fn scaling_map(b: f64, bdot: f64, mass: f64) -> Result<SymplecticMap> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("scaling factor must be positive, got {b}")));
    }
    SymplecticMap::new(1.0 / b, 0.0, -mass * bdot, b)
}

/// Cubic Lagrange weights for a fractional offset u in [0, 1) relative to
/// the second of four consecutive samples.
#[inline]
fn cubic_weights(u: f64) -> [f64; 4] {
    let um1 = u + 1.0;
    let up1 = 1.0 - u;
    let up2 = 2.0 - u;
    [
        -u * up1 * up2 / 6.0,
        um1 * up1 * up2 / 2.0,
        um1 * u * up2 / 2.0,
        -um1 * u * up1 / 6.0,
    ]
}

/// Pull a field back through a symplectic map: the result at (q, p) is
/// f0 evaluated at map(q, p) by bicubic interpolation; points mapped
/// outside the grid evaluate to 0.
///
/// Non-negative inputs stay non-negative: cubic overshoot below zero is
/// interpolation error, not signal, and is clamped. Signed fields (Wigner
/// functions of excited states) pass through unclamped.
///
/// The map has unit Jacobian, so total mass is preserved up to
/// interpolation error; a relative loss above [`TRANSPORT_MASS_WARN`]
/// triggers a warning.
pub fn transport(f0: &PhaseField, map: &SymplecticMap) -> PhaseField {
    let grid = f0.grid();
    let (nq, np) = (grid.nq(), grid.np());
    let (dq, dp) = (grid.dq(), grid.dp());
    let (q0, p0) = (grid.q_min(), grid.p_min());
    let vals = f0.values().as_slice().expect("fields are contiguous row-major");
    let nonnegative = f0.min_value() >= 0.0;

    let mut out = Array2::zeros((nq, np));
    {
        let out_slice = out.as_slice_mut().expect("freshly built array is contiguous");
        for i in 0..nq {
            let q = q0 + i as f64 * dq;
            let row = &mut out_slice[i * np..(i + 1) * np];
            for (j, slot) in row.iter_mut().enumerate() {
                let p = p0 + j as f64 * dp;
                let (x, y) = map.apply(q, p);
                let fx = (x - q0) / dq;
                let fy = (y - p0) / dp;
                if !(fx > -2.0 && fx < (nq + 1) as f64 && fy > -2.0 && fy < (np + 1) as f64) {
                    continue;
                }
                let ix = fx.floor();
                let iy = fy.floor();
                let wx = cubic_weights(fx - ix);
                let wy = cubic_weights(fy - iy);
                let ix = ix as isize;
                let iy = iy as isize;
                let mut acc = 0.0;
                if ix >= 1 && ix + 2 < nq as isize && iy >= 1 && iy + 2 < np as isize {
                    // full stencil strictly inside: tight path
                    let base = (ix as usize - 1) * np + (iy as usize - 1);
                    for (di, wxi) in wx.iter().enumerate() {
                        let r = &vals[base + di * np..base + di * np + 4];
                        acc += wxi
                            * (wy[0] * r[0] + wy[1] * r[1] + wy[2] * r[2] + wy[3] * r[3]);
                    }
                } else {
                    for (di, wxi) in wx.iter().enumerate() {
                        let r = ix - 1 + di as isize;
                        if r < 0 || r as usize >= nq {
                            continue;
                        }
                        let mut row_acc = 0.0;
                        for (dj, wyj) in wy.iter().enumerate() {
                            let c = iy - 1 + dj as isize;
                            if c < 0 || c as usize >= np {
                                continue;
                            }
                            row_acc += wyj * vals[r as usize * np + c as usize];
                        }
                        acc += wxi * row_acc;
                    }
                }
                *slot = if nonnegative { acc.max(0.0) } else { acc };
            }
        }
    }

    let result = PhaseField::from_values(grid, out).expect("shape matches by construction");

    // Mass that truly maps out of the domain: |f0| over the source nodes
    // whose image under the inverse map leaves the grid rectangle. This is
    // exact up to quadrature and unaffected by interpolation error.
    let mut lost = 0.0_f64;
    let mut mass0 = 0.0_f64;
    let (q_max, p_max) = (q0 + (nq - 1) as f64 * dq, p0 + (np - 1) as f64 * dp);
    for i in 0..nq {
        let wq = if i == 0 || i == nq - 1 { 0.5 } else { 1.0 };
        let q = q0 + i as f64 * dq;
        for j in 0..np {
            let wp = if j == 0 || j == np - 1 { 0.5 } else { 1.0 };
            let a = wq * wp * vals[i * np + j].abs();
            mass0 += a;
            let (x, y) = map.inverse_apply(q, p0 + j as f64 * dp);
            if x < q0 || x > q_max || y < p0 || y > p_max {
                lost += a;
            }
        }
    }
    if mass0 > 0.0 && lost / mass0 > TRANSPORT_MASS_WARN {
        log::warn!("transport: {:.3e} of the field mass left the domain", lost / mass0);
    }
    result
}

/// State at trajectory index `index`: the t = 0 field pulled back through
/// the scaling map for (b, bdot) at that time. Applies identically to
/// Wigner functions and classical densities.
pub fn evolve_quench(
    state0: &PhaseField,
    traj: &QuenchTrajectory,
    index: usize,
) -> Result<PhaseField> {
    if index >= traj.len() {
        return Err(Error::InvalidArgument(format!(
            "trajectory index {index} out of range 0..{}",
            traj.len()
        )));
    }
    if index == 0 {
        return Ok(state0.clone());
    }
    let map = scaling_map(traj.b(index), traj.bdot(index), state0.grid().mass())?;
    Ok(transport(state0, &map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;
    use crate::states::{
        classical_gaussian, ho_wigner, purity, GaussianSpec, UnitsSpec,
    };

    fn grid(l: f64, n: usize) -> PhaseGrid {
        PhaseGrid::centered(l, l, n, n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn constant_frequency_is_a_fixed_point() {
        let traj = solve_ermakov(|_| 1.0, 1.0, 5.0, 500).unwrap();
        for i in 0..traj.len() {
            assert!((traj.b(i) - 1.0).abs() < 1e-10);
            assert!(traj.bdot(i).abs() < 1e-10);
        }
        assert!(traj.bddot0().abs() < 1e-12);
    }

    #[test]
    fn sudden_quench_matches_analytic_solution() {
        let traj = solve_ermakov(|_| 0.0, 1.0, 5.0, 500).unwrap();
        let mut emax = 0.0_f64;
        for i in 0..traj.len() {
            let t = traj.time(i);
            let exact = (1.0 + t * t).sqrt();
            emax = emax.max((traj.b(i) - exact).abs());
            let exact_dot = t / exact;
            emax = emax.max((traj.bdot(i) - exact_dot).abs());
        }
        assert!(emax < 1e-8, "max error {emax}");
        // b''(0) from the ODE right-hand side: omega0^2 for the sudden quench
        assert!((traj.bddot0() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rk4_order_under_step_halving() {
        let err = |steps: usize| {
            let traj = solve_ermakov(|_| 0.0, 1.0, 5.0, steps).unwrap();
            let mut emax = 0.0_f64;
            for i in 0..traj.len() {
                let t = traj.time(i);
                emax = emax.max((traj.b(i) - (1.0 + t * t).sqrt()).abs());
            }
            emax
        };
        let ratio = err(250) / err(500);
        assert!(ratio >= 14.0, "convergence ratio {ratio}");
    }

    #[test]
    fn ermakov_input_validation() {
        assert!(solve_ermakov(|_| 1.0, 1.0, 5.0, 50).is_err());
        assert!(solve_ermakov(|_| f64::NAN, 1.0, 5.0, 500).is_err());
    }

    #[test]
    fn focusing_singularity_is_caught() {
        // omega0 = 0 removes the repulsive 1/b^3 term; with omega = 1 the
        // solution b(t) = cos(t) collapses through zero at t = pi/2
        let err = solve_ermakov(|_| 1.0, 0.0, 2.0, 1000).unwrap_err();
        match err {
            Error::ErmakovSingularity { time, .. } => {
                assert!((time - std::f64::consts::FRAC_PI_2).abs() < 0.05, "at t = {time}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn scaling_map_entries_and_determinant() {
        let m = scaling_map(1.0, 0.0, 1.0).unwrap();
        assert_eq!(m, SymplecticMap::identity());

        // quench at t = 1/omega0: b = sqrt(2), bdot = 1/sqrt(2)
        let b = 2.0_f64.sqrt();
        let bd = 1.0 / 2.0_f64.sqrt();
        let m = scaling_map(b, bd, 1.0).unwrap();
        assert!((m.alpha - 1.0 / b).abs() < 1e-15);
        assert_eq!(m.beta, 0.0);
        assert!((m.gamma + bd).abs() < 1e-15);
        assert!((m.delta - b).abs() < 1e-15);

        assert!(scaling_map(0.0, 1.0, 1.0).is_err());
        assert!(scaling_map(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn randomized_maps_have_unit_determinant() {
        // deterministic LCG so the test is reproducible
        let mut seed = 0x2545f4914f6cdd1d_u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let b = 0.05 + 4.0 * next();
            let bd = 4.0 * (next() - 0.5);
            let mass = 0.1 + 3.0 * next();
            let m = scaling_map(b, bd, mass).unwrap();
            assert!((m.det() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_transport_reproduces_field() {
        let g = grid(8.0, 128);
        let f = g.sample(|q, p| (-(q * q + p * p)).exp() * (1.0 + 0.3 * q * p));
        let t = transport(&f, &SymplecticMap::identity());
        let diff = t.zip_with(&f, |a, b| (a - b).abs()).unwrap().max_abs();
        assert!(diff < 1e-9, "identity transport diff {diff}");
    }

    #[test]
    fn quench_transport_conserves_mass_and_purity() {
        let units = UnitsSpec::natural();
        let traj = solve_ermakov(|_| 0.0, 1.0, 1.0, 100).unwrap();
        let lq = 8.0 * traj.max_b() * std::f64::consts::FRAC_1_SQRT_2;
        let g = PhaseGrid::centered(lq, 8.0 * std::f64::consts::FRAC_1_SQRT_2, 512, 512, 1.0, 1.0).unwrap();
        let w0 = ho_wigner(0, &units, &g).unwrap();
        let wt = evolve_quench(&w0, &traj, traj.len() - 1).unwrap();
        assert!((wt.integrate() - 1.0).abs() < 1e-7);
        assert!((purity(&wt, &units) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn stationary_trajectory_leaves_states_unchanged() {
        let units = UnitsSpec::natural();
        let traj = solve_ermakov(|_| 1.0, 1.0, 2.0, 200).unwrap();
        let g = grid(10.0, 256);
        let w = ho_wigner(2, &units, &g).unwrap();
        let wt = evolve_quench(&w, &traj, traj.len() - 1).unwrap();
        let diff = wt.zip_with(&w, |a, b| (a - b).abs()).unwrap().max_abs();
        assert!(diff < 1e-9, "stationary evolution moved the state by {diff}");
    }

    #[test]
    fn index_zero_is_identity_and_range_checked() {
        let units = UnitsSpec::natural();
        let traj = solve_ermakov(|_| 0.0, 1.0, 1.0, 100).unwrap();
        let g = grid(8.0, 64);
        let w = ho_wigner(0, &units, &g).unwrap();
        let w0 = evolve_quench(&w, &traj, 0).unwrap();
        assert_eq!(w0.values(), w.values());
        assert!(evolve_quench(&w, &traj, traj.len()).is_err());
    }

    #[test]
    fn gaussian_marginal_variance_grows_with_b_squared() {
        let units = UnitsSpec::natural();
        let spec = GaussianSpec::matched(&units);
        let traj = solve_ermakov(|_| 0.0, 1.0, 1.0, 100).unwrap();
        let i = traj.len() - 1;
        let b = traj.b(i);
        let lq = 8.0 * traj.max_b() * spec.sigma_q;
        let lp = 8.0 * spec.sigma_p * 1.5;
        let g = PhaseGrid::centered(lq, lp, 512, 512, 1.0, 1.0).unwrap();
        let rho0 = classical_gaussian(&spec, &g).unwrap();
        let rhot = evolve_quench(&rho0, &traj, i).unwrap();
        let q2 = g.sample(|q, _| q * q).zip_with(&rhot, |a, b| a * b).unwrap().integrate();
        let expect = spec.sigma_q * spec.sigma_q * b * b / 2.0;
        assert!((q2 - expect).abs() < 1e-6, "q variance {q2} vs {expect}");
    }

    #[test]
    fn liouville_consistency_of_the_characteristics() {
        // centered difference of the evolved state in t matches {H, W_t}
        let units = UnitsSpec::natural();
        let t = 0.5_f64;
        let dt = 1e-3;
        let g = grid(9.0, 512);
        let w0 = ho_wigner(0, &units, &g).unwrap();
        let h = crate::states::quadratic_hamiltonian(&units, 0.0, &g);
        let state_at = |tt: f64| {
            let b = (1.0 + tt * tt).sqrt();
            let bd = tt / b;
            transport(&w0, &scaling_map(b, bd, 1.0).unwrap())
        };
        let plus = state_at(t + dt);
        let minus = state_at(t - dt);
        let rate = plus.zip_with(&minus, |a, b| (a - b) / (2.0 * dt)).unwrap();
        let gen = crate::bracket::poisson(&h, &state_at(t)).unwrap();
        let diff = rate.zip_with(&gen, |a, b| (a - b).abs()).unwrap().max_abs();
        assert!(diff < 1e-3 * gen.max_abs(), "relative deviation {}", diff / gen.max_abs());
    }
}
