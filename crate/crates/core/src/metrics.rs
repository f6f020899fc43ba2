//! Distinguishability measures between states: phase-space fidelity,
//! Bures angle, Bhattacharyya coefficient, Hellinger distance, and their
//! numeric rates of change along a trajectory.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::PhaseField;
use crate::states::UnitsSpec;

/// Largest tolerated overshoot of an overlap above 1 (or below 0) before
/// the grid is declared under-resolved.
pub const OVERLAP_RESIDUAL_LIMIT: f64 = 1e-5;

/// Densities may dip this far below zero from quadrature noise and are
/// clipped; anything lower is rejected as genuinely non-classical.
pub const DENSITY_CLIP: f64 = -1e-12;

/// Which overlap a series tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMeasure {
    Fidelity,
    Bhattacharyya,
}

/// Overlap against the t = 0 state along a uniformly sampled trajectory,
/// with centered-difference rates (one-sided second order at the ends).
#[derive(Debug, Clone)]
pub struct OverlapSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    rates: Vec<f64>,
}

impl OverlapSeries {
    /// Build a series from precomputed overlap values on uniform times.
    pub fn from_values(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 5 {
            return Err(Error::InvalidArgument(format!(
                "need at least 5 time points, got {}",
                times.len()
            )));
        }
        if times.len() != values.len() {
            return Err(Error::InvalidArgument("times/values length mismatch".into()));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("times must be increasing".into()));
        }
        for i in 1..times.len() {
            let step = times[i] - times[i - 1];
            if (step - dt).abs() > 1e-9 * dt {
                return Err(Error::InvalidArgument(format!(
                    "non-uniform time step at index {i}: {step} vs {dt}"
                )));
            }
        }
        if (values[0] - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "overlap at t = 0 is {} instead of 1",
                values[0]
            )));
        }
        if let Some(v) = values.iter().find(|v| **v > 1.0 + 1e-6 || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("overlap value {v} outside [0, 1]")));
        }

        let n = values.len();
        let mut rates = vec![0.0; n];
        rates[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
        for i in 1..n - 1 {
            rates[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
        }
        rates[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
        Ok(Self { times, values, rates })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }
}

fn clamp_unit(raw: f64, what: &str) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::NonFinite { context: what.into() });
    }
    let clamped = raw.clamp(0.0, 1.0);
    let residual = raw - clamped;
    if residual.abs() > OVERLAP_RESIDUAL_LIMIT {
        return Err(Error::OverlapResidual { residual });
    }
    if residual != 0.0 {
        log::trace!("{what}: clamped overlap residual {residual:.3e}");
    }
    Ok(clamped)
}

/// Phase-space fidelity of two pure-state Wigner functions:
/// F = 2 pi hbar * integral(w0 * wt), clamped to [0, 1].
pub fn fidelity(w0: &PhaseField, wt: &PhaseField, units: &UnitsSpec) -> Result<f64> {
    w0.ensure_same_grid(wt)?;
    let raw = 2.0 * PI * units.hbar * w0.zip_with(wt, |a, b| a * b)?.integrate();
    clamp_unit(raw, "fidelity")
}

/// Bures angle arccos(sqrt(overlap)) in radians.
pub fn bures_angle(overlap: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::InvalidArgument(format!(
            "overlap {overlap} outside [0, 1]"
        )));
    }
    Ok(overlap.sqrt().acos())
}

fn clip_density(rho: &PhaseField, what: &str) -> Result<PhaseField> {
    let min = rho.min_value();
    if min < DENSITY_CLIP {
        return Err(Error::NegativeDensity { min, threshold: DENSITY_CLIP });
    }
    if !rho.is_finite() {
        return Err(Error::NonFinite { context: what.into() });
    }
    Ok(rho.map(|v| v.max(0.0)))
}

/// Bhattacharyya coefficient B = integral sqrt(rho0 * rhot) of two
/// classical probability densities.
pub fn bhattacharyya(rho0: &PhaseField, rhot: &PhaseField) -> Result<f64> {
    rho0.ensure_same_grid(rhot)?;
    let a = clip_density(rho0, "bhattacharyya rho0")?;
    let b = clip_density(rhot, "bhattacharyya rhot")?;
    let raw = a.zip_with(&b, |x, y| (x * y).sqrt())?.integrate();
    clamp_unit(raw, "bhattacharyya")
}

/// Hellinger distance sqrt(1 - B).
pub fn hellinger(rho0: &PhaseField, rhot: &PhaseField) -> Result<f64> {
    let b = bhattacharyya(rho0, rhot)?;
    Ok((1.0 - b).max(0.0).sqrt())
}

/// Overlap of every trajectory state against the t = 0 state.
///
/// `state_at(i)` produces the state at `times[i]`; states are consumed one
/// at a time so long trajectories never live in memory at once.
pub fn overlap_series<F>(
    times: &[f64],
    measure: OverlapMeasure,
    units: &UnitsSpec,
    mut state_at: F,
) -> Result<OverlapSeries>
where
    F: FnMut(usize) -> Result<PhaseField>,
{
    if times.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "need at least 5 time points, got {}",
            times.len()
        )));
    }
    let state0 = state_at(0)?;
    let mut values = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let state = if i == 0 { state0.clone() } else { state_at(i)? };
        let v = match measure {
            OverlapMeasure::Fidelity => fidelity(&state0, &state, units)?,
            OverlapMeasure::Bhattacharyya => bhattacharyya(&state0, &state)?,
        };
        values.push(v);
    }
    OverlapSeries::from_values(times.to_vec(), values)
}

/// Closed-form fidelity F_n(t) of a harmonic-oscillator eigenstate against
/// its scaling evolution, for n = 0..=3:
///
/// ```text
/// F0 = 2 b w0 / D^(1/2)
/// F1 = 8 b^3 w0^3 / D^(3/2)
/// F2 = b w0 [b^2((b^2 - 10) w0^2 + bdot^2) + w0^2]^2 / (2 D^(5/2))
/// F3 = 2 b^3 w0^3 [3 b^2 bdot^2 + (3 b^4 - 14 b^2 + 3) w0^2]^2 / D^(7/2)
/// ```
///
/// with D = (b^2 + 1)^2 w0^2 + b^2 bdot^2.
pub fn closed_form_fidelity(n: usize, b: f64, bdot: f64, omega0: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("scaling factor must be positive, got {b}")));
    }
    let w0 = omega0;
    let d = (b * b + 1.0).powi(2) * w0 * w0 + b * b * bdot * bdot;
    match n {
        0 => Ok(2.0 * b * w0 / d.sqrt()),
        1 => Ok(8.0 * b.powi(3) * w0.powi(3) / d.powf(1.5)),
        2 => {
            let num = b * w0
                * (b * b * ((b * b - 10.0) * w0 * w0 + bdot * bdot) + w0 * w0).powi(2);
            Ok(num / (2.0 * d.powf(2.5)))
        }
        3 => {
            let inner = 3.0 * b * b * bdot * bdot
                + (3.0 * b.powi(4) - 14.0 * b * b + 3.0) * w0 * w0;
            Ok(2.0 * b.powi(3) * w0.powi(3) * inner * inner / d.powf(3.5))
        }
        _ => Err(Error::InvalidArgument(format!(
            "closed forms are printed for n = 0..=3 only, got {n}"
        ))),
    }
}
