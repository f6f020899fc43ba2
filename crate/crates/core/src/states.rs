//! State constructors: harmonic-oscillator Wigner eigenstates, Gaussian
//! Wigner functions, classical Gaussian densities, and the
//! quantum-to-classical correspondence map rho = 2*pi*hbar*W^2.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{PhaseField, PhaseGrid, BOUNDARY_WARN_RATIO};

/// Highest oscillator level for which the Laguerre recurrence is validated.
pub const MAX_HO_LEVEL: usize = 12;

/// Relative threshold below which a Wigner value counts as genuinely
/// negative for the classical-correspondence guard.
pub const NEGATIVE_WIGNER_RATIO: f64 = 1e-10;

/// Physical constants of a scenario: hbar, mass, and the reference trap
/// frequency omega0 that sets the oscillator length x0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsSpec {
    pub hbar: f64,
    pub mass: f64,
    pub omega0: f64,
}

impl UnitsSpec {
    pub fn new(hbar: f64, mass: f64, omega0: f64) -> Result<Self> {
        let u = Self { hbar, mass, omega0 };
        if !(hbar > 0.0 && mass > 0.0 && omega0 > 0.0) || !u.x0().is_finite() {
            return Err(Error::InvalidArgument(format!(
                "units must be positive and finite: hbar = {hbar}, mass = {mass}, omega0 = {omega0}"
            )));
        }
        Ok(u)
    }

    /// Natural units hbar = m = omega0 = 1.
    pub fn natural() -> Self {
        Self { hbar: 1.0, mass: 1.0, omega0: 1.0 }
    }

    /// Oscillator length x0 = sqrt(hbar / (m omega0)).
    pub fn x0(&self) -> f64 {
        (self.hbar / (self.mass * self.omega0)).sqrt()
    }
}

/// Widths and center of a Gaussian state.
///
/// `sigma_q` and `sigma_p` follow the 1/e convention of the classical
/// density rho0 = exp(-q^2/sigma_q^2 - p^2/sigma_p^2) / (pi sigma_q sigma_p);
/// the matching Wigner Gaussian then has standard deviations sigma_q and
/// sigma_p, so that rho0 = 2*pi*hbar*W^2 holds exactly for pure specs
/// (2 sigma_q sigma_p = hbar).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center_q: f64,
    pub center_p: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
}

impl GaussianSpec {
    pub fn new(center_q: f64, center_p: f64, sigma_q: f64, sigma_p: f64) -> Result<Self> {
        if !(sigma_q > 0.0 && sigma_p > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "widths must be positive: sigma_q = {sigma_q}, sigma_p = {sigma_p}"
            )));
        }
        Ok(Self { center_q, center_p, sigma_q, sigma_p })
    }

    /// Centered spec matched to the trap ground state:
    /// sigma_q = x0/sqrt(2), sigma_p = hbar/(x0 sqrt(2)).
    pub fn matched(units: &UnitsSpec) -> Self {
        let x0 = units.x0();
        Self {
            center_q: 0.0,
            center_p: 0.0,
            sigma_q: x0 / std::f64::consts::SQRT_2,
            sigma_p: units.hbar / (x0 * std::f64::consts::SQRT_2),
        }
    }
}

/// Laguerre polynomial L_n(x) by the stable three-term recurrence.
fn laguerre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 - x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * l - k as f64 * lm1;
        lm1 = l;
        l = next / (k + 1) as f64;
    }
    l
}

fn warn_on_truncation(name: &str, field: &PhaseField) {
    let ratio = field.boundary_ratio();
    if ratio > BOUNDARY_WARN_RATIO {
        log::warn!("{name}: boundary magnitude ratio {ratio:.3e} suggests domain truncation");
    }
}

/// Wigner function of the n-th harmonic-oscillator eigenstate:
/// W_n = ((-1)^n / pi hbar) exp(-2h/(hbar omega0)) L_n(4h/(hbar omega0))
/// with h = p^2/2m + m omega0^2 q^2 / 2.
pub fn ho_wigner(n: usize, units: &UnitsSpec, grid: &PhaseGrid) -> Result<PhaseField> {
    if n > MAX_HO_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "oscillator level {n} exceeds validated range 0..={MAX_HO_LEVEL}"
        )));
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = sign / (PI * units.hbar);
    let scale = 1.0 / (units.hbar * units.omega0);
    let m = units.mass;
    let om2 = units.omega0 * units.omega0;
    let field = grid.sample(|q, p| {
        let h = p * p / (2.0 * m) + 0.5 * m * om2 * q * q;
        norm * (-2.0 * h * scale).exp() * laguerre(n, 4.0 * h * scale)
    });
    warn_on_truncation("ho_wigner", &field);
    Ok(field)
}

/// Gaussian Wigner function with standard deviations `sigma_q`, `sigma_p`:
/// W = exp(-(q-q0)^2/(2 sigma_q^2) - (p-p0)^2/(2 sigma_p^2)) / (2 pi sigma_q sigma_p).
pub fn gaussian_wigner(spec: &GaussianSpec, grid: &PhaseGrid) -> Result<PhaseField> {
    if !(spec.sigma_q > 0.0 && spec.sigma_p > 0.0) {
        return Err(Error::InvalidArgument("widths must be positive".into()));
    }
    let norm = 1.0 / (2.0 * PI * spec.sigma_q * spec.sigma_p);
    let aq = 1.0 / (2.0 * spec.sigma_q * spec.sigma_q);
    let ap = 1.0 / (2.0 * spec.sigma_p * spec.sigma_p);
    let (q0, p0) = (spec.center_q, spec.center_p);
    let field = grid.sample(|q, p| {
        let dq = q - q0;
        let dp = p - p0;
        norm * (-aq * dq * dq - ap * dp * dp).exp()
    });
    warn_on_truncation("gaussian_wigner", &field);
    Ok(field)
}

/// Classical Gaussian density
/// rho0 = exp(-(q-q0)^2/sigma_q^2 - (p-p0)^2/sigma_p^2) / (pi sigma_q sigma_p).
pub fn classical_gaussian(spec: &GaussianSpec, grid: &PhaseGrid) -> Result<PhaseField> {
    if !(spec.sigma_q > 0.0 && spec.sigma_p > 0.0) {
        return Err(Error::InvalidArgument("widths must be positive".into()));
    }
    let norm = 1.0 / (PI * spec.sigma_q * spec.sigma_p);
    let aq = 1.0 / (spec.sigma_q * spec.sigma_q);
    let ap = 1.0 / (spec.sigma_p * spec.sigma_p);
    let (q0, p0) = (spec.center_q, spec.center_p);
    let field = grid.sample(|q, p| {
        let dq = q - q0;
        let dp = p - p0;
        norm * (-aq * dq * dq - ap * dp * dp).exp()
    });
    warn_on_truncation("classical_gaussian", &field);
    Ok(field)
}

/// Classical phase-space density associated with a Wigner function:
/// rho = 2 pi hbar W^2.
///
/// With `require_nonnegative` set, any value below
/// -[`NEGATIVE_WIGNER_RATIO`] * max(w) is rejected: squaring would silently
/// produce a density whose classical evolution has nothing to do with the
/// quantum one.
pub fn classical_from_wigner(
    w: &PhaseField,
    units: &UnitsSpec,
    require_nonnegative: bool,
) -> Result<PhaseField> {
    if !w.is_finite() {
        return Err(Error::NonFinite { context: "classical_from_wigner input".into() });
    }
    if require_nonnegative {
        let threshold = -NEGATIVE_WIGNER_RATIO * w.values().iter().fold(0.0_f64, |m, v| m.max(*v));
        let min = w.min_value();
        if min < threshold {
            return Err(Error::NegativeDensity { min, threshold });
        }
    }
    let scale = 2.0 * PI * units.hbar;
    Ok(w.map(|v| scale * v * v))
}

/// Quadratic Hamiltonian H(q, p) = p^2/2m + m omega^2 q^2 / 2 sampled on
/// the grid; omega = 0 is the free particle after the quench.
pub fn quadratic_hamiltonian(units: &UnitsSpec, omega: f64, grid: &PhaseGrid) -> PhaseField {
    let m = units.mass;
    let om2 = omega * omega;
    grid.sample(|q, p| p * p / (2.0 * m) + 0.5 * m * om2 * q * q)
}

/// Purity 2 pi hbar * integral(W^2) of a Wigner function; 1 for pure states.
pub fn purity(w: &PhaseField, units: &UnitsSpec) -> f64 {
    2.0 * PI * units.hbar * w.map(|v| v * v).integrate()
}
