//! Uniform rectangular (q, p) grid with trapezoidal quadrature and
//! 4th-order central finite differences.
//!
//! Every field in the toolkit — Wigner functions, classical densities,
//! Hamiltonians, brackets — is a [`PhaseField`] sampled on a [`PhaseGrid`].
//! Storage is row-major with q as the outer (row) index and p as the inner
//! (column) index, so dumps of the raw buffer are bit-stable.
//!
//! Derivatives use zero extension beyond the boundary: fields are assumed
//! negligible there, consistent with the compact-support assumption behind
//! all integration-by-parts identities in the toolkit.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Minimum node count per axis for the 4th-order stencils to make sense.
pub const MIN_NODES: usize = 16;

/// Boundary-to-peak magnitude ratio above which a field is considered
/// truncated by the domain and a warning is emitted.
pub const BOUNDARY_WARN_RATIO: f64 = 1e-10;

/// Uniform rectangular phase-space grid with the physical constants that
/// fix the quadrature measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    q_min: f64,
    q_max: f64,
    p_min: f64,
    p_max: f64,
    nq: usize,
    np: usize,
    hbar: f64,
    mass: f64,
}

impl PhaseGrid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        q_min: f64,
        q_max: f64,
        p_min: f64,
        p_max: f64,
        nq: usize,
        np: usize,
        hbar: f64,
        mass: f64,
    ) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite() && p_min.is_finite() && p_max.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bounds".into()));
        }
        if q_max <= q_min || p_max <= p_min {
            return Err(Error::InvalidGrid(format!(
                "empty extent: q [{q_min}, {q_max}], p [{p_min}, {p_max}]"
            )));
        }
        if nq < MIN_NODES || np < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_NODES} nodes per axis, got {nq} x {np}"
            )));
        }
        if !(hbar > 0.0) || !(mass > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "hbar and mass must be positive, got hbar = {hbar}, mass = {mass}"
            )));
        }
        Ok(Self { q_min, q_max, p_min, p_max, nq, np, hbar, mass })
    }

    /// Grid centered on the origin with half-widths `lq`, `lp`.
    pub fn centered(lq: f64, lp: f64, nq: usize, np: usize, hbar: f64, mass: f64) -> Result<Self> {
        Self::new(-lq, lq, -lp, lp, nq, np, hbar, mass)
    }

    pub fn nq(&self) -> usize {
        self.nq
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.nq - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    /// Position coordinate of row `i`.
    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    /// Momentum coordinate of column `j`.
    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    /// Sample a function of (q, p) on every node.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> PhaseField {
        let dq = self.dq();
        let dp = self.dp();
        let values = Array2::from_shape_fn((self.nq, self.np), |(i, j)| {
            f(self.q_min + i as f64 * dq, self.p_min + j as f64 * dp)
        });
        PhaseField { grid: self.clone(), values }
    }

    pub fn zeros(&self) -> PhaseField {
        PhaseField { grid: self.clone(), values: Array2::zeros((self.nq, self.np)) }
    }
}

/// Real scalar field sampled on a [`PhaseGrid`]; row index is q, column
/// index is p.
#[derive(Debug, Clone)]
pub struct PhaseField {
    grid: PhaseGrid,
    values: Array2<f64>,
}

impl PhaseField {
    /// Wrap raw node values, which must have shape `(grid.nq(), grid.np())`.
    pub fn from_values(grid: &PhaseGrid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.nq, grid.np) {
            return Err(Error::InvalidArgument(format!(
                "value shape {:?} does not match grid {} x {}",
                values.dim(),
                grid.nq,
                grid.np
            )));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn same_grid(&self, other: &PhaseField) -> bool {
        self.grid == other.grid
    }

    pub fn ensure_same_grid(&self, other: &PhaseField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    /// Max |value| on the outermost two rows/columns relative to the global
    /// max; used to detect domain truncation.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let (nq, np) = self.values.dim();
        let mut edge = 0.0_f64;
        for i in 0..nq {
            for j in 0..np {
                if i < 2 || i >= nq - 2 || j < 2 || j >= np - 2 {
                    edge = edge.max(self.values[(i, j)].abs());
                }
            }
        }
        edge / peak
    }

    /// Pointwise map.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> PhaseField {
        PhaseField { grid: self.grid.clone(), values: self.values.mapv(f) }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &PhaseField, f: F) -> Result<PhaseField> {
        self.ensure_same_grid(other)?;
        let mut values = self.values.clone();
        values.zip_mut_with(&other.values, |a, &b| *a = f(*a, b));
        Ok(PhaseField { grid: self.grid.clone(), values })
    }

    /// Trapezoidal-rule double integral over the grid rectangle (plain
    /// dq dp measure; callers apply the 2πħ of d²Γ where it belongs).
    ///
    /// Summation runs in a fixed row-major order so results are
    /// bit-for-bit reproducible.
    pub fn integrate(&self) -> f64 {
        let (nq, np) = self.values.dim();
        let dq = self.grid.dq();
        let dp = self.grid.dp();
        let mut total = 0.0_f64;
        for i in 0..nq {
            let wq = if i == 0 || i == nq - 1 { 0.5 } else { 1.0 };
            let mut row = 0.0_f64;
            for j in 0..np {
                let wp = if j == 0 || j == np - 1 { 0.5 } else { 1.0 };
                row += wp * self.values[(i, j)];
            }
            total += wq * row;
        }
        total * dq * dp
    }

    /// L2 norm with the plain dq dp measure.
    pub fn l2_norm(&self) -> f64 {
        self.map(|v| v * v).integrate().max(0.0).sqrt()
    }

    fn at_or_zero(&self, i: isize, j: isize) -> f64 {
        if i < 0 || j < 0 || i as usize >= self.grid.nq || j as usize >= self.grid.np {
            0.0
        } else {
            self.values[(i as usize, j as usize)]
        }
    }

    /// 4th-order central ∂/∂q with zero extension beyond the boundary.
    pub fn d_dq(&self) -> PhaseField {
        let (nq, np) = self.values.dim();
        let c = 1.0 / (12.0 * self.grid.dq());
        let mut out = Array2::zeros((nq, np));
        for i in 0..nq {
            let ii = i as isize;
            for j in 0..np {
                let jj = j as isize;
                out[(i, j)] = c
                    * (self.at_or_zero(ii - 2, jj) - 8.0 * self.at_or_zero(ii - 1, jj)
                        + 8.0 * self.at_or_zero(ii + 1, jj)
                        - self.at_or_zero(ii + 2, jj));
            }
        }
        PhaseField { grid: self.grid.clone(), values: out }
    }

    /// 4th-order central ∂/∂p with zero extension beyond the boundary.
    pub fn d_dp(&self) -> PhaseField {
        let (nq, np) = self.values.dim();
        let c = 1.0 / (12.0 * self.grid.dp());
        let mut out = Array2::zeros((nq, np));
        for i in 0..nq {
            let ii = i as isize;
            for j in 0..np {
                let jj = j as isize;
                out[(i, j)] = c
                    * (self.at_or_zero(ii, jj - 2) - 8.0 * self.at_or_zero(ii, jj - 1)
                        + 8.0 * self.at_or_zero(ii, jj + 1)
                        - self.at_or_zero(ii, jj + 2));
            }
        }
        PhaseField { grid: self.grid.clone(), values: out }
    }

    /// Mixed third derivative ∂_q^iq ∂_p^ip with iq + ip = 3, built by
    /// composing the first-derivative stencils (p derivatives first).
    pub fn d3(&self, iq: usize, ip: usize) -> Result<PhaseField> {
        if iq + ip != 3 {
            return Err(Error::InvalidArgument(format!(
                "d3 needs iq + ip = 3, got {iq} + {ip}"
            )));
        }
        let mut out = self.clone();
        for _ in 0..ip {
            out = out.d_dp();
        }
        for _ in 0..iq {
            out = out.d_dq();
        }
        Ok(out)
    }
}
