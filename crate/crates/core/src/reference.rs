//! Reference solutions: a first-order Godunov scheme for scalar laws and the
//! exact solutions of the benchmark problems.

use std::fmt;
use std::sync::Arc;

use crate::boundary::BoundaryDatum;
use crate::flux::{Axis, EulerState, FluxModel};
use crate::lattice::GridSpec;
use crate::{Error, Result};

/// Left and right states of the Mach 10 problem and the adiabatic exponent.
pub const MACH10_LEFT: [f64; 4] = [8.0, 57.16, -33.0, 563.52];
pub const MACH10_RIGHT: [f64; 4] = [1.4, 0.0, 0.0, 2.5];
pub const MACH10_GAMMA: f64 = 1.4;

/// Abscissa of the undisturbed shock on the top wall `y = 1` at time `t`.
pub fn mach10_threshold(t: f64) -> f64 {
    1.0 / 6.0 + (1.0 + 20.0 * t) / 3f64.sqrt()
}

/// Post-shock state left of the undisturbed shock trace, pre-shock state
/// right of it.
pub fn mach10_north_trace(t: f64, x: f64) -> EulerState {
    let s = if x <= mach10_threshold(t) { MACH10_LEFT } else { MACH10_RIGHT };
    EulerState::from_slice(&s, MACH10_GAMMA)
}

/// Mach 10 initial datum: left state above the line `y = sqrt(3)(x - 1/6)`.
pub fn mach10_initial(x: f64, y: f64) -> [f64; 4] {
    if y - 3f64.sqrt() * (x - 1.0 / 6.0) >= 0.0 {
        MACH10_LEFT
    } else {
        MACH10_RIGHT
    }
}

/// Oblique Burgers shock `1{cos(theta)(x - t/2) + sin(theta)(y - t/2) <= 0}`.
pub fn exact_oblique_burgers(t: f64, x: f64, y: f64, theta: f64) -> f64 {
    let arg = theta.cos() * (x - 0.5 * t) + theta.sin() * (y - 0.5 * t);
    if arg <= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Linear transport on `(x_min, x_max)` with velocity `v`: the initial datum
/// along characteristics, or the inflow datum once the characteristic
/// enters through the upstream boundary.
pub fn exact_transport(
    u0: &dyn Fn(f64) -> f64,
    v: f64,
    t: f64,
    x: f64,
    domain: (f64, f64),
    inflow: &dyn Fn(f64) -> f64,
) -> f64 {
    let foot = x - v * t;
    if foot >= domain.0 && foot <= domain.1 {
        return u0(foot);
    }
    if v < 0.0 {
        inflow(t - (domain.1 - x) / -v)
    } else if v > 0.0 {
        inflow(t - (x - domain.0) / v)
    } else {
        u0(x)
    }
}

/// Exact solution evaluator `(t, x, y) -> u`, valid for `t <= t_max`.
#[derive(Clone)]
pub struct ExactSolution {
    pub name: String,
    pub t_max: f64,
    f: Arc<dyn Fn(f64, f64, f64, &mut [f64]) + Send + Sync>,
}

impl ExactSolution {
    pub fn new(
        name: impl Into<String>,
        t_max: f64,
        f: impl Fn(f64, f64, f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        ExactSolution { name: name.into(), t_max, f: Arc::new(f) }
    }

    pub fn eval(&self, t: f64, x: f64, y: f64, out: &mut [f64]) {
        (self.f)(t, x, y, out)
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactSolution({}, t_max = {})", self.name, self.t_max)
    }
}

/// Scalar Godunov flux: the minimum of `phi` over `[ul, ur]` if `ul <= ur`,
/// otherwise its maximum over `[ur, ul]`.
pub fn godunov_flux(model: &FluxModel, ul: f64, ur: f64) -> f64 {
    if ul <= ur {
        model.flux_range(Axis::X, ul, ur).0
    } else {
        model.flux_range(Axis::X, ur, ul).1
    }
}

/// Boundary treatment of the Godunov reference.
#[derive(Debug, Clone)]
pub enum GodunovTrace {
    /// Ghost value from the datum at the time midpoint of the step.
    Datum(BoundaryDatum),
    /// Copy of the adjacent cell.
    Extrapolate,
}

impl GodunovTrace {
    fn value(&self, t_mid: f64, adjacent: f64) -> f64 {
        match self {
            GodunovTrace::Datum(d) => {
                let mut v = [0.0];
                d.eval(t_mid, 0.0, &mut v);
                v[0]
            }
            GodunovTrace::Extrapolate => adjacent,
        }
    }
}

/// One first-order finite-volume step with ghost values `left`, `right`.
pub fn godunov_step(
    cells: &[f64],
    model: &FluxModel,
    left: f64,
    right: f64,
    dx: f64,
    dt: f64,
) -> Result<Vec<f64>> {
    if !model.is_scalar() {
        return Err(Error::NotScalar);
    }
    let n = cells.len();
    let bound = cells.iter().chain([&left, &right]).fold(0.0f64, |a, v| a.max(v.abs()));
    let speed = model.max_abs_flux_derivative(Axis::X, bound)?;
    let cfl = dt * speed / dx;
    if cfl > 1.0 + 1e-12 {
        return Err(Error::Cfl(cfl));
    }
    let at = |i: isize| -> f64 {
        if i < 0 {
            left
        } else if i as usize >= n {
            right
        } else {
            cells[i as usize]
        }
    };
    let fluxes: Vec<f64> = (0..=n as isize).map(|i| godunov_flux(model, at(i - 1), at(i))).collect();
    let r = dt / dx;
    Ok((0..n).map(|i| cells[i] - r * (fluxes[i + 1] - fluxes[i])).collect())
}

/// Runs the Godunov scheme on the cells of a 1D grid for `grid.steps` steps
/// of size `grid.dt`, starting from midpoint samples of `u0`.
pub fn godunov_solve(
    model: &FluxModel,
    grid: &GridSpec,
    u0: &dyn Fn(f64) -> f64,
    left: &GodunovTrace,
    right: &GodunovTrace,
) -> Result<Vec<f64>> {
    let mut u: Vec<f64> = (0..grid.nx).map(|i| u0(grid.x_center(i))).collect();
    for n in 0..grid.steps {
        let t_mid = grid.time(n) + 0.5 * grid.dt;
        let l = left.value(t_mid, u[0]);
        let r = right.value(t_mid, u[grid.nx - 1]);
        u = godunov_step(&u, model, l, r, grid.dx, grid.dt)?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_min_max(model: &FluxModel, a: f64, b: f64) -> (f64, f64) {
        let n = 10_000;
        (0..=n)
            .map(|k| model.scalar_flux(Axis::X, a + (b - a) * k as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    #[test]
    fn godunov_flux_examples() {
        let b = FluxModel::Burgers1d;
        assert_eq!(godunov_flux(&b, -1.0, 0.0), 0.0);
        assert_eq!(brute_min_max(&b, -1.0, 0.0).0, 0.0);
        assert_eq!(godunov_flux(&b, 1.0, 0.0), 0.5);
        assert_eq!(brute_min_max(&b, 0.0, 1.0).1, 0.5);
        let c = FluxModel::Cubic;
        assert!((godunov_flux(&c, -1.0, 1.0) + 1.0 / 3.0).abs() < 1e-15);
        assert!((brute_min_max(&c, -1.0, 1.0).0 + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn godunov_cfl_violation() {
        let r = godunov_step(&[1.0, 0.0], &FluxModel::Burgers1d, 1.0, 0.0, 0.1, 0.2);
        assert!(matches!(r, Err(Error::Cfl(_))));
    }

    #[test]
    fn godunov_preserves_bounds() {
        for model in [FluxModel::Burgers1d, FluxModel::Cubic, FluxModel::Transport { vx: -1.0, vy: 0.0 }] {
            let mut u: Vec<f64> = (0..100).map(|i| ((i as f64) * 0.37).sin()).collect();
            let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            for _ in 0..100 {
                let (l, r) = (u[0], u[99]);
                u = godunov_step(&u, &model, l, r, 0.01, 0.005).unwrap();
                assert!(u.iter().all(|&v| v >= lo - 1e-14 && v <= hi + 1e-14));
            }
        }
    }

    #[test]
    fn godunov_transport_converges() {
        let model = FluxModel::Transport { vx: -1.0, vy: 0.0 };
        let u0 = |x: f64| (std::f64::consts::PI * x).sin().powi(2);
        let mut pts = Vec::new();
        for &j in &[100usize, 200, 400] {
            let grid = GridSpec::new_1d(0.0, 1.0, j, 2.0, 0.25).unwrap();
            let zero = GodunovTrace::Datum(BoundaryDatum::constant(&[0.0]));
            let u = godunov_solve(&model, &grid, &u0, &GodunovTrace::Extrapolate, &zero).unwrap();
            let t = grid.realized_final_time();
            let err: f64 = (0..j)
                .map(|i| (u[i] - exact_transport(&u0, -1.0, t, grid.x_center(i), (0.0, 1.0), &|_| 0.0)).abs())
                .sum::<f64>()
                * grid.dx;
            pts.push((grid.dx, err));
        }
        let slope = crate::analysis::convergence::convergence_rate(&pts).unwrap();
        assert!((slope - 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn transport_examples() {
        let u0 = |x: f64| if x > 1.0 / 3.0 && x < 2.0 / 3.0 { 1.0 } else { 0.0 };
        let zero = |_t: f64| 0.0;
        assert_eq!(exact_transport(&u0, -1.0, 0.25, 0.2, (0.0, 1.0), &zero), 1.0);
        assert_eq!(exact_transport(&u0, -1.0, 0.0, 0.5, (0.0, 1.0), &zero), 1.0);
        for k in 1..100 {
            assert_eq!(exact_transport(&u0, -1.0, 0.7, k as f64 / 100.0, (0.0, 1.0), &zero), 0.0);
        }
    }

    #[test]
    fn oblique_examples() {
        let th = std::f64::consts::FRAC_PI_3;
        assert_eq!(exact_oblique_burgers(0.0, 0.1, 0.1, th), 0.0);
        assert_eq!(exact_oblique_burgers(0.5, 0.25, 0.25, th), 1.0);
        // a point with argument -1 at t = 0.2
        let (x, y) = (0.1 - th.cos(), 0.1 - th.sin());
        assert_eq!(exact_oblique_burgers(0.2, x, y, th), 1.0);
    }

    #[test]
    fn oblique_shock_moves_with_normal_speed() {
        let th = std::f64::consts::FRAC_PI_3;
        let (t, dt) = (0.2, 0.1);
        let (c, sn) = (th.cos(), th.sin());
        let speed = 0.5 * (c + sn);
        for k in 0..50 {
            let s = k as f64 / 50.0 - 0.5;
            // a point on the shock at time t, moved along the normal by speed * dt
            let p = (speed * t * c - s * sn + speed * dt * c, speed * t * sn + s * c + speed * dt * sn);
            let eps = 1e-9;
            assert_eq!(exact_oblique_burgers(t + dt, p.0 - eps * c, p.1 - eps * sn, th), 1.0);
            assert_eq!(exact_oblique_burgers(t + dt, p.0 + eps * c, p.1 + eps * sn, th), 0.0);
        }
    }

    #[test]
    fn mach10_trace_examples() {
        let l = mach10_north_trace(0.0, 0.0);
        assert_eq!(l.to_array(), MACH10_LEFT);
        let r = mach10_north_trace(0.0, 1.0 / 6.0 + 1.0 / 3f64.sqrt() + 0.01);
        assert_eq!(r.to_array(), MACH10_RIGHT);
        assert!((mach10_threshold(0.2) - (1.0 / 6.0 + 5.0 / 3f64.sqrt())).abs() < 1e-15);
        assert!((mach10_threshold(0.2) - 3.0534).abs() < 1e-3);
        assert_eq!(mach10_north_trace(0.2, 3.1).to_array(), MACH10_RIGHT);
        assert_eq!(mach10_initial(0.0, 0.5), MACH10_LEFT);
        assert_eq!(mach10_initial(3.0, 0.5), MACH10_RIGHT);
    }
}
