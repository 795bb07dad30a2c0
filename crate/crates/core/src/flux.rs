//! Flux functions of the benchmark systems.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Built-in flux models.
///
/// Scalar models carry their derivative and the exact critical points used to
/// compute extrema of the flux and of its derivative over intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxModel {
    /// Linear transport `phi_x = vx u`, `phi_y = vy u`.
    Transport { vx: f64, vy: f64 },
    /// `phi_x = u^2/2`, `phi_y = 0`.
    Burgers1d,
    /// `phi_x = phi_y = u^2/2`.
    Burgers2d,
    /// Non-convex `phi_x = u^3/3`.
    Cubic,
    /// Two-dimensional compressible Euler equations for an ideal gas,
    /// conserved variables `(rho, rho u, rho v, E)`.
    Euler { gamma: f64 },
}

impl FluxModel {
    pub fn components(&self) -> usize {
        match self {
            FluxModel::Euler { .. } => 4,
            _ => 1,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.components() == 1
    }

    pub fn name(&self) -> String {
        match self {
            FluxModel::Transport { vx, vy } => format!("transport(vx={vx}, vy={vy})"),
            FluxModel::Burgers1d => "burgers".into(),
            FluxModel::Burgers2d => "burgers2d".into(),
            FluxModel::Cubic => "cubic".into(),
            FluxModel::Euler { gamma } => format!("euler(gamma={gamma})"),
        }
    }

    /// `true` when `phi_axis` vanishes identically.
    pub fn is_zero_along(&self, axis: Axis) -> bool {
        match (self, axis) {
            (FluxModel::Transport { vx, .. }, Axis::X) => *vx == 0.0,
            (FluxModel::Transport { vy, .. }, Axis::Y) => *vy == 0.0,
            (FluxModel::Burgers1d | FluxModel::Cubic, Axis::Y) => true,
            _ => false,
        }
    }

    /// Evaluates `phi_axis(u)` into `out`.
    pub fn eval(&self, axis: Axis, u: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            FluxModel::Euler { gamma } => {
                let s = EulerState::from_slice(u, *gamma);
                let flux = s.flux(axis)?;
                out[..4].copy_from_slice(&flux);
                Ok(())
            }
            _ => {
                out[0] = self.scalar_flux(axis, u[0]);
                Ok(())
            }
        }
    }

    /// Scalar flux. Panics on Euler.
    pub fn scalar_flux(&self, axis: Axis, u: f64) -> f64 {
        match (self, axis) {
            (FluxModel::Transport { vx, .. }, Axis::X) => vx * u,
            (FluxModel::Transport { vy, .. }, Axis::Y) => vy * u,
            (FluxModel::Burgers1d, Axis::X) | (FluxModel::Burgers2d, _) => 0.5 * u * u,
            (FluxModel::Cubic, Axis::X) => u * u * u / 3.0,
            (FluxModel::Burgers1d | FluxModel::Cubic, Axis::Y) => 0.0,
            (FluxModel::Euler { .. }, _) => panic!("scalar_flux on a system"),
        }
    }

    pub fn scalar_derivative(&self, axis: Axis, u: f64) -> f64 {
        match (self, axis) {
            (FluxModel::Transport { vx, .. }, Axis::X) => *vx,
            (FluxModel::Transport { vy, .. }, Axis::Y) => *vy,
            (FluxModel::Burgers1d, Axis::X) | (FluxModel::Burgers2d, _) => u,
            (FluxModel::Cubic, Axis::X) => u * u,
            (FluxModel::Burgers1d | FluxModel::Cubic, Axis::Y) => 0.0,
            (FluxModel::Euler { .. }, _) => panic!("scalar_derivative on a system"),
        }
    }

    /// Real roots of `phi'` along `axis` (extrema candidates of `phi`).
    pub fn flux_critical_points(&self, axis: Axis) -> &'static [f64] {
        if self.is_zero_along(axis) {
            return &[];
        }
        match self {
            FluxModel::Burgers1d | FluxModel::Burgers2d | FluxModel::Cubic => &[0.0],
            _ => &[],
        }
    }

    /// Real roots of `phi''` along `axis` (extrema candidates of `phi'`).
    pub fn derivative_critical_points(&self, axis: Axis) -> &'static [f64] {
        if self.is_zero_along(axis) {
            return &[];
        }
        match self {
            FluxModel::Cubic => &[0.0],
            _ => &[],
        }
    }

    /// Exact `max |phi'|` over `[-m, m]`, from the endpoints and the roots of
    /// `phi''` inside the interval.
    pub fn max_abs_flux_derivative(&self, axis: Axis, m: f64) -> Result<f64> {
        if !self.is_scalar() {
            return Err(Error::NotScalar);
        }
        if !(m >= 0.0) {
            return Err(Error::InvalidParameter(format!("data bound {m}")));
        }
        let mut best = self
            .scalar_derivative(axis, -m)
            .abs()
            .max(self.scalar_derivative(axis, m).abs());
        for &c in self.derivative_critical_points(axis) {
            if c > -m && c < m {
                best = best.max(self.scalar_derivative(axis, c).abs());
            }
        }
        Ok(best)
    }

    /// Minimum and maximum of `phi_axis` over `[a, b]` (any order).
    pub fn flux_range(&self, axis: Axis, a: f64, b: f64) -> (f64, f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mut min = self.scalar_flux(axis, lo).min(self.scalar_flux(axis, hi));
        let mut max = self.scalar_flux(axis, lo).max(self.scalar_flux(axis, hi));
        for &c in self.flux_critical_points(axis) {
            if c > lo && c < hi {
                let v = self.scalar_flux(axis, c);
                min = min.min(v);
                max = max.max(v);
            }
        }
        (min, max)
    }
}

/// Conserved state of the 2D Euler equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub mom_x: f64,
    pub mom_y: f64,
    pub energy: f64,
    pub gamma: f64,
}

impl EulerState {
    pub fn new(rho: f64, mom_x: f64, mom_y: f64, energy: f64, gamma: f64) -> Self {
        EulerState { rho, mom_x, mom_y, energy, gamma }
    }

    pub fn from_slice(u: &[f64], gamma: f64) -> Self {
        EulerState::new(u[0], u[1], u[2], u[3], gamma)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.rho, self.mom_x, self.mom_y, self.energy]
    }

    /// `p = (gamma - 1) (E - rho (u^2 + v^2) / 2)`.
    pub fn pressure(&self) -> Result<f64> {
        if self.rho == 0.0 {
            return Err(Error::Inadmissible { rho: self.rho, pressure: f64::NAN });
        }
        let kinetic = 0.5 * (self.mom_x * self.mom_x + self.mom_y * self.mom_y) / self.rho;
        Ok((self.gamma - 1.0) * (self.energy - kinetic))
    }

    /// `rho > 0` and `p > 0`.
    pub fn is_admissible(&self) -> bool {
        self.rho > 0.0 && matches!(self.pressure(), Ok(p) if p > 0.0)
    }

    pub fn flux(&self, axis: Axis) -> Result<[f64; 4]> {
        if !(self.rho > 0.0) {
            return Err(Error::Inadmissible {
                rho: self.rho,
                pressure: self.pressure().unwrap_or(f64::NAN),
            });
        }
        let p = self.pressure()?;
        let u = self.mom_x / self.rho;
        let v = self.mom_y / self.rho;
        Ok(match axis {
            Axis::X => [self.mom_x, self.mom_x * u + p, self.mom_y * u, (self.energy + p) * u],
            Axis::Y => [self.mom_y, self.mom_x * v, self.mom_y * v + p, (self.energy + p) * v],
        })
    }
}
