//! Grid-free closed-form reference values used to certify the numeric
//! pipeline: Gaussian moments, energy variances, and quench closed forms.
//! Nothing in this module touches a [`crate::grid::PhaseGrid`].

use crate::states::{GaussianSpec, UnitsSpec};

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// A formula printed in closed form.
    PaperClosedForm,
    /// Derived from Gaussian moment identities.
    GaussianMoment,
    /// Direct substitution into a closed form.
    Substitution,
}

/// A named reference value together with its origin.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

impl OracleResult {
    pub fn new(name: impl Into<String>, value: f64, provenance: Provenance) -> Self {
        Self { name: name.into(), value, provenance }
    }
}

/// Energy dispersion of the omega0 ground state under the post-quench
/// Hamiltonian H = p^2/2m + m omega^2 q^2 / 2.
///
/// Writing H = H(omega0) + m(omega^2 - omega0^2) q^2 / 2 and using that the
/// state is an H(omega0) eigenstate, the variance reduces to the variance of
/// the quadratic term; Gaussian fourth moments (<q^4> = 3 <q^2>^2) give
///
/// ```text
/// dE = hbar |omega^2 - omega0^2| / (2 sqrt(2) omega0)
/// ```
///
/// which is hbar omega0 / (2 sqrt(2)) for the free particle (omega = 0) and
/// 0 at omega = omega0.
pub fn gaussian_energy_variance(units: &UnitsSpec, post_quench_omega: f64) -> f64 {
    let w0 = units.omega0;
    let w = post_quench_omega;
    units.hbar * (w * w - w0 * w0).abs() / (2.0 * std::f64::consts::SQRT_2 * w0)
}

/// Bhattacharyya coefficient of the quench Gaussian:
/// B = 2 [ (1 + b^2)^2 / b^2 + (m sigma_q bdot / sigma_p)^2 ]^(-1/2).
pub fn quench_bhattacharyya(b: f64, bdot: f64, units: &UnitsSpec, spec: &GaussianSpec) -> f64 {
    let shear = units.mass * spec.sigma_q * bdot / spec.sigma_p;
    let inner = (1.0 + b * b).powi(2) / (b * b) + shear * shear;
    2.0 / inner.sqrt()
}

/// Closed-form classical speed bound for the quench Gaussian:
/// v = m sigma_q |bddot(0)| / (2 sigma_p).
pub fn quench_vcsl(units: &UnitsSpec, spec: &GaussianSpec, bddot0: f64) -> f64 {
    units.mass * spec.sigma_q * bddot0.abs() / (2.0 * spec.sigma_p)
}

/// The three oracle values for a quench scenario, packaged for reporting.
pub fn quench_oracles(units: &UnitsSpec, spec: &GaussianSpec, bddot0: f64) -> Vec<OracleResult> {
    vec![
        OracleResult::new(
            "energy-dispersion-free",
            gaussian_energy_variance(units, 0.0),
            Provenance::GaussianMoment,
        ),
        OracleResult::new(
            "quench-vcsl",
            quench_vcsl(units, spec, bddot0),
            Provenance::PaperClosedForm,
        ),
        OracleResult::new(
            "quench-bhattacharyya-t0",
            quench_bhattacharyya(1.0, 0.0, units, spec),
            Provenance::Substitution,
        ),
    ]
}
