//! Poisson bracket and truncated Moyal bracket — the generators of
//! classical and quantum phase-space evolution.
//!
//! Both brackets are taken in the `{H, f}` orientation that appears in the
//! equations of motion dW/dt = {H, W} and drho/dt = {H, rho}.

use crate::error::Result;
use crate::grid::PhaseField;
use crate::states::UnitsSpec;

/// Truncation level of the Moyal bracket's hbar expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoyalOrder {
    /// Leading order: the classical Poisson bracket.
    Poisson,
    /// Include the hbar^2 third-derivative correction of the sine expansion.
    HbarSquared,
}

/// Poisson bracket {h, f} = dh/dq df/dp - dh/dp df/dq.
///
/// This is the generator of classical evolution: df/dt = {H, f}.
pub fn poisson(h: &PhaseField, f: &PhaseField) -> Result<PhaseField> {
    h.ensure_same_grid(f)?;
    let hq = h.d_dq();
    let hp = h.d_dp();
    let fq = f.d_dq();
    let fp = f.d_dp();
    let term1 = hq.zip_with(&fp, |a, b| a * b)?;
    let term2 = hp.zip_with(&fq, |a, b| a * b)?;
    term1.zip_with(&term2, |a, b| a - b)
}

/// Moyal bracket {{h, f}} truncated at the requested order.
///
/// At [`MoyalOrder::HbarSquared`] the sine expansion contributes
/// -(hbar^2/24) [ h_qqq f_ppp - 3 h_qqp f_qpp + 3 h_qpp f_qqp - h_ppp f_qqq ],
/// which vanishes identically for quadratic Hamiltonians.
pub fn moyal(
    h: &PhaseField,
    f: &PhaseField,
    order: MoyalOrder,
    units: &UnitsSpec,
) -> Result<PhaseField> {
    let lead = poisson(h, f)?;
    match order {
        MoyalOrder::Poisson => Ok(lead),
        MoyalOrder::HbarSquared => {
            let coeff = units.hbar * units.hbar / 24.0;
            let h30 = h.d3(3, 0)?;
            let h21 = h.d3(2, 1)?;
            let h12 = h.d3(1, 2)?;
            let h03 = h.d3(0, 3)?;
            let f30 = f.d3(3, 0)?;
            let f21 = f.d3(2, 1)?;
            let f12 = f.d3(1, 2)?;
            let f03 = f.d3(0, 3)?;
            let mut corr = h30.zip_with(&f03, |a, b| a * b)?;
            corr = corr.zip_with(&h21.zip_with(&f12, |a, b| a * b)?, |a, b| a - 3.0 * b)?;
            corr = corr.zip_with(&h12.zip_with(&f21, |a, b| a * b)?, |a, b| a + 3.0 * b)?;
            corr = corr.zip_with(&h03.zip_with(&f30, |a, b| a * b)?, |a, b| a - b)?;
            lead.zip_with(&corr, |a, b| a - coeff * b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;
    use crate::states::{ho_wigner, quadratic_hamiltonian};

    fn grid(l: f64, n: usize) -> PhaseGrid {
        PhaseGrid::centered(l, l, n, n, 1.0, 1.0).unwrap()
    }

    #[test]
    fn bracket_of_field_with_itself_vanishes() {
        let g = grid(6.0, 128);
        let h = g.sample(|q, p| (-(q * q + p * p) / 2.0).exp() * (1.0 + 0.2 * q));
        let b = poisson(&h, &h).unwrap();
        assert!(b.max_abs() < 1e-10 * h.max_abs().max(1.0));
    }

    #[test]
    fn free_particle_generator_is_streaming_term() {
        let units = UnitsSpec::natural();
        let g = grid(7.0, 512);
        let h = quadratic_hamiltonian(&units, 0.0, &g);
        let f = g.sample(|q, p| (-(q * q + p * p)).exp());
        let b = poisson(&h, &f).unwrap();
        // {p^2/2m, f} = -(p/m) df/dq = 2 q p f for this Gaussian
        let exact = g.sample(|q, p| 2.0 * q * p * (-(q * q + p * p)).exp());
        let diff = b.zip_with(&exact, |x, y| (x - y).abs()).unwrap().max_abs();
        assert!(diff < 1e-6, "max diff {diff}");
    }

    #[test]
    fn eigenstates_are_stationary() {
        let units = UnitsSpec::natural();
        let g = grid(8.0, 1024);
        let h = quadratic_hamiltonian(&units, 1.0, &g);
        for n in [0usize, 2] {
            let w = ho_wigner(n, &units, &g).unwrap();
            let b = poisson(&h, &w).unwrap();
            assert!(b.max_abs() < 1e-6, "n = {n}: {}", b.max_abs());
        }
    }

    #[test]
    fn grid_mismatch_detected() {
        let h = grid(6.0, 64).sample(|q, _| q);
        let f = grid(6.0, 128).sample(|q, _| q);
        assert!(poisson(&h, &f).is_err());
        assert!(moyal(&h, &f, MoyalOrder::Poisson, &UnitsSpec::natural()).is_err());
    }

    #[test]
    fn moyal_equals_poisson_for_quadratic_hamiltonian() {
        let units = UnitsSpec::natural();
        let g = grid(8.0, 256);
        let h = quadratic_hamiltonian(&units, 0.7, &g);
        let f = g.sample(|q, p| (q - 0.4 * p) * (-(q * q + p * p) / 1.3).exp());
        let pb = poisson(&h, &f).unwrap();
        let mb = moyal(&h, &f, MoyalOrder::HbarSquared, &units).unwrap();
        let diff = pb.zip_with(&mb, |a, b| (a - b).abs()).unwrap().max_abs();
        assert!(diff < 1e-9 * pb.max_abs(), "diff {diff}");
    }

    #[test]
    fn quartic_test_field_reproduces_analytic_correction() {
        let units = UnitsSpec::natural();
        let g = grid(6.0, 512);
        let h = g.sample(|q, _| q * q * q * q);
        let f = g.sample(|q, p| (-(q * q + p * p)).exp());
        let pb = poisson(&h, &f).unwrap();
        let mb = moyal(&h, &f, MoyalOrder::HbarSquared, &units).unwrap();
        let correction = mb.zip_with(&pb, |a, b| a - b).unwrap();
        // only d^3h/dq^3 = 24 q survives: correction = -(hbar^2/24) 24 q f_ppp
        let exact = g.sample(|q, p| {
            let f = (-(q * q + p * p)).exp();
            let fppp = (-8.0 * p * p * p + 12.0 * p) * f;
            -q * fppp
        });
        let mut diff = 0.0_f64;
        let n = g.nq();
        for i in 8..n - 8 {
            for j in 8..n - 8 {
                diff = diff.max((correction.values()[(i, j)] - exact.values()[(i, j)]).abs());
            }
        }
        assert!(diff < 1e-5, "max diff {diff}");
    }

    #[test]
    fn moyal_antisymmetry() {
        let units = UnitsSpec::natural();
        let g = grid(6.0, 128);
        let h = g.sample(|q, p| (q * q * q - p * q) * (-(q * q + p * p) / 4.0).exp());
        let f = g.sample(|q, p| (-(q * q + p * p)).exp() * (1.0 + p));
        for order in [MoyalOrder::Poisson, MoyalOrder::HbarSquared] {
            let ab = moyal(&h, &f, order, &units).unwrap();
            let ba = moyal(&f, &h, order, &units).unwrap();
            let diff = ab.zip_with(&ba, |a, b| (a + b).abs()).unwrap().max_abs();
            assert!(diff < 1e-9 * ab.max_abs().max(1.0), "order {order:?}: {diff}");
        }
    }

    #[test]
    fn bracket_integral_vanishes_for_decaying_fields() {
        let g = grid(8.0, 256);
        let h = g.sample(|q, p| (q * q + 0.5 * p * p + 0.3 * q * p) * (-(q * q + p * p) / 6.0).exp());
        let f = g.sample(|q, p| (-(q * q + p * p)).exp() * (1.0 + 0.1 * q));
        let b = poisson(&h, &f).unwrap();
        assert!(b.integrate().abs() < 1e-8 * h.l2_norm() * f.l2_norm());
    }
}
