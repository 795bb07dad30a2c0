//! Equilibrium families and equilibrium initialization.

use std::sync::Arc;

use crate::flux::{Axis, FluxModel};
use crate::lattice::{DistributionField, GridSpec, Stencil, Velocity};
use crate::{Error, Result, MAX_COMPONENTS, MAX_VELOCITIES};

/// Initial datum `(x, y) -> u` written into the output slice.
pub type InitialDatum = Arc<dyn Fn(f64, f64, &mut [f64]) + Send + Sync>;

/// Equilibria linear in `u` plus flux terms:
///
/// ```text
/// f_0  = (1 - 2 a_x - 2 a_y) u
/// f_+x = a_x u + phi_x(u) / (2 lambda)     f_-x = a_x u - phi_x(u) / (2 lambda)
/// f_+y = a_y u + phi_y(u) / (2 lambda)     f_-y = a_y u - phi_y(u) / (2 lambda)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSpec {
    pub stencil: Stencil,
    pub a_x: f64,
    pub a_y: f64,
    pub lambda: f64,
    pub flux: FluxModel,
}

impl EquilibriumSpec {
    pub fn new(stencil: Stencil, a_x: f64, a_y: f64, lambda: f64, flux: FluxModel) -> Result<Self> {
        let spec = EquilibriumSpec { stencil, a_x, a_y, lambda, flux };
        spec.validate()?;
        Ok(spec)
    }

    /// The two-velocity scheme: `a_x = 1/2`.
    pub fn d1q2(lambda: f64, flux: FluxModel) -> Result<Self> {
        Self::new(Stencil::D1Q2, 0.5, 0.0, lambda, flux)
    }

    /// Euler scheme (a): D2Q4 with `a_x = a_y = 1/4`.
    pub fn euler_d2q4(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Stencil::D2Q4, 0.25, 0.25, lambda, FluxModel::Euler { gamma })
    }

    /// Euler scheme (b) equilibria: D2Q5 with `f_0 = u/2`, `a_x = a_y = 1/8`.
    pub fn euler_d2q5(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(Stencil::D2Q5, 0.125, 0.125, lambda, FluxModel::Euler { gamma })
    }

    fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-14;
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lattice velocity {}", self.lambda)));
        }
        let one_d = self.stencil.dimension() == 1;
        if one_d && self.a_y != 0.0 {
            return Err(Error::StencilMismatch(format!(
                "a_y = {} on {}",
                self.a_y,
                self.stencil.name()
            )));
        }
        if one_d && !self.flux.is_zero_along(Axis::Y) {
            return Err(Error::StencilMismatch(format!(
                "flux {} has a y component on {}",
                self.flux.name(),
                self.stencil.name()
            )));
        }
        match self.stencil {
            Stencil::D1Q2 if (self.a_x - 0.5).abs() > TOL => Err(Error::StencilMismatch(format!(
                "D1Q2 requires a_x = 1/2, got {}",
                self.a_x
            ))),
            Stencil::D2Q4 if self.rest_weight().abs() > TOL => Err(Error::StencilMismatch(
                format!("D2Q4 requires a_x + a_y = 1/2, got {}", self.a_x + self.a_y),
            )),
            _ => Ok(()),
        }
    }

    pub fn components(&self) -> usize {
        self.flux.components()
    }

    /// `1 - 2 a_x - 2 a_y`.
    pub fn rest_weight(&self) -> f64 {
        1.0 - 2.0 * self.a_x - 2.0 * self.a_y
    }

    /// Writes every equilibrium of the stencil at `u` into `out`, laid out as
    /// `out[slot * M + component]`.
    pub fn equilibrium(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let m = self.components();
        if u.len() < m || out.len() < self.stencil.q() * m {
            return Err(Error::Shape("equilibrium buffers too small".into()));
        }
        let mut phi_x = [0.0; MAX_COMPONENTS];
        let mut phi_y = [0.0; MAX_COMPONENTS];
        self.flux.eval(Axis::X, u, &mut phi_x)?;
        if self.stencil.dimension() == 2 {
            self.flux.eval(Axis::Y, u, &mut phi_y)?;
        }
        let scale = 0.5 / self.lambda;
        let rest = self.rest_weight();
        for (slot, &v) in self.stencil.velocities().iter().enumerate() {
            let dst = &mut out[slot * m..(slot + 1) * m];
            for c in 0..m {
                dst[c] = match v {
                    Velocity::Zero => rest * u[c],
                    Velocity::PlusX => self.a_x * u[c] + scale * phi_x[c],
                    Velocity::MinusX => self.a_x * u[c] - scale * phi_x[c],
                    Velocity::PlusY => self.a_y * u[c] + scale * phi_y[c],
                    Velocity::MinusY => self.a_y * u[c] - scale * phi_y[c],
                };
            }
        }
        Ok(())
    }

    /// Equilibrium of a single velocity.
    pub fn equilibrium_of(&self, v: Velocity, u: &[f64], out: &mut [f64]) -> Result<()> {
        let slot = self
            .stencil
            .slot(v)
            .ok_or_else(|| Error::StencilMismatch(format!("{} not in stencil", v.symbol())))?;
        let m = self.components();
        let mut all = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
        self.equilibrium(u, &mut all)?;
        out[..m].copy_from_slice(&all[slot * m..(slot + 1) * m]);
        Ok(())
    }

    /// Scalar equilibrium of stencil slot `slot`.
    pub fn scalar_equilibrium(&self, slot: usize, u: f64) -> f64 {
        let v = self.stencil.velocities()[slot];
        let scale = 0.5 / self.lambda;
        match v {
            Velocity::Zero => self.rest_weight() * u,
            Velocity::PlusX => self.a_x * u + scale * self.flux.scalar_flux(Axis::X, u),
            Velocity::MinusX => self.a_x * u - scale * self.flux.scalar_flux(Axis::X, u),
            Velocity::PlusY => self.a_y * u + scale * self.flux.scalar_flux(Axis::Y, u),
            Velocity::MinusY => self.a_y * u - scale * self.flux.scalar_flux(Axis::Y, u),
        }
    }

    /// Invariant box `prod_i [f_i^eq(-m), f_i^eq(m)]` of a scalar scheme.
    pub fn invariant_box(&self, m: f64) -> Result<Vec<(f64, f64)>> {
        if !self.flux.is_scalar() {
            return Err(Error::NotScalar);
        }
        Ok((0..self.stencil.q())
            .map(|slot| (self.scalar_equilibrium(slot, -m), self.scalar_equilibrium(slot, m)))
            .collect())
    }
}

/// Equilibrium initialization from cell-sampled data.
///
/// `quadrature = 1` samples the datum at cell centers; `quadrature = n > 1`
/// averages `n^d` uniformly placed sub-cell samples.
pub fn initialize_field(
    spec: &EquilibriumSpec,
    grid: &GridSpec,
    datum: &(dyn Fn(f64, f64, &mut [f64]) + Send + Sync),
    quadrature: usize,
) -> Result<DistributionField> {
    let m = spec.components();
    let mut field = DistributionField::for_grid(spec.stencil, grid, m)?;
    let mut u = [0.0; MAX_COMPONENTS];
    let mut eq = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            cell_average(grid, ix, iy, datum, quadrature.max(1), &mut u[..m]);
            spec.equilibrium(&u[..m], &mut eq)?;
            let cell = grid.index(ix, iy);
            for slot in 0..spec.stencil.q() {
                field.get_mut(slot, cell).copy_from_slice(&eq[slot * m..(slot + 1) * m]);
            }
        }
    }
    Ok(field)
}

/// Approximate cell mean of `datum` with `n^d` uniform midpoint samples.
pub fn cell_average(
    grid: &GridSpec,
    ix: usize,
    iy: usize,
    datum: &(dyn Fn(f64, f64, &mut [f64]) + Send + Sync),
    n: usize,
    out: &mut [f64],
) {
    let m = out.len();
    if n <= 1 {
        datum(grid.x_center(ix), grid.y_center(iy), out);
        return;
    }
    let mut acc = [0.0; MAX_COMPONENTS];
    let mut sample = [0.0; MAX_COMPONENTS];
    let x0 = grid.x_min + ix as f64 * grid.dx;
    let y0 = grid.y_min + iy as f64 * grid.dx;
    let ny_samples = if grid.dim == 2 { n } else { 1 };
    for b in 0..ny_samples {
        let y = if grid.dim == 2 { y0 + (b as f64 + 0.5) * grid.dx / n as f64 } else { 0.0 };
        for a in 0..n {
            let x = x0 + (a as f64 + 0.5) * grid.dx / n as f64;
            datum(x, y, &mut sample[..m]);
            for c in 0..m {
                acc[c] += sample[c];
            }
        }
    }
    let count = (n * ny_samples) as f64;
    for c in 0..m {
        out[c] = acc[c] / count;
    }
}
