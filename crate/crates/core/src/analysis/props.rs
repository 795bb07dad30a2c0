//! Run-time checks of the stability estimates: l1 bound between two runs,
//! time equicontinuity and the total-variation bound (1D scalar).

use crate::analysis::norms::{discrete_tv, l1_distance_fields, DiagnosticsRecord};
use crate::boundary::{boundary_datum_average, SideCondition};
use crate::cases::{CollisionKind, Problem, Simulation};
use crate::lattice::{compute_moments, Side};
use crate::{Error, Result};

/// Slack added to the right-hand side of the l1 bound.
pub const L1_BOUND_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct L1BoundReport {
    /// `|g^n - f^n|_1` for `n = 0..=N`.
    pub lhs: Vec<f64>,
    /// Initial distance plus accumulated boundary-data distance.
    pub rhs: Vec<f64>,
    /// First step at which the bound fails.
    pub first_violation: Option<usize>,
}

impl L1BoundReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Boundary data of `side` as seen by the scheme, per step and position.
pub fn boundary_trace_series(problem: &Problem, side: Side) -> Result<Vec<Vec<f64>>> {
    let g = &problem.grid;
    let cond = problem
        .boundary
        .side(side)
        .ok_or_else(|| Error::Config(format!("no condition on the {} side", side.name())))?;
    let SideCondition::Dirichlet { datum, quadrature } = cond else {
        return Err(Error::InvalidParameter(format!(
            "the {} side is not a Dirichlet condition; the estimate needs prescribed data",
            side.name()
        )));
    };
    let m = problem.equilibrium.components();
    let mut out = vec![0.0; m];
    Ok((0..g.steps)
        .map(|n| {
            (0..g.side_len(side))
                .map(|k| {
                    boundary_datum_average(datum, *quadrature, g, side, k, n, &mut out);
                    out[0]
                })
                .collect()
        })
        .collect())
}

fn require_scalar(problem: &Problem) -> Result<()> {
    if !problem.equilibrium.flux.is_scalar() || matches!(problem.collision, CollisionKind::Guarded { .. }) {
        return Err(Error::NotScalar);
    }
    Ok(())
}

/// Steps two runs in lockstep and checks
/// `|g^n - f^n|_1 <= |g^0 - f^0|_1 + sum_{p<n} lambda dt dx^{d-1} sum |v~^p - u~^p| + slack`
/// with the boundary sums over every Dirichlet position.
pub fn check_l1_contraction(a: &Problem, b: &Problem) -> Result<L1BoundReport> {
    require_scalar(a)?;
    if a.grid != b.grid || a.equilibrium != b.equilibrium || a.collision != b.collision {
        return Err(Error::Config("l1 bound needs two runs with the same grid and scheme".into()));
    }
    let g = &a.grid;
    let d = g.dim;
    let mut boundary_increment = vec![0.0; g.steps];
    for &side in g.sides() {
        let (ta, tb) = (boundary_trace_series(a, side)?, boundary_trace_series(b, side)?);
        for n in 0..g.steps {
            boundary_increment[n] += ta[n].iter().zip(&tb[n]).map(|(x, y)| (x - y).abs()).sum::<f64>();
        }
    }
    let weight = g.lambda * g.dt * g.dx.powi(d as i32 - 1);
    let (mut sa, mut sb) = (Simulation::new(a)?, Simulation::new(b)?);
    let initial = l1_distance_fields(sa.field(), sb.field(), g.dx, d)?;
    let mut lhs = vec![initial];
    let mut rhs = vec![initial + L1_BOUND_SLACK];
    let mut acc = initial;
    for n in 0..g.steps {
        sa.advance()?;
        sb.advance()?;
        acc += weight * boundary_increment[n];
        lhs.push(l1_distance_fields(sa.field(), sb.field(), g.dx, d)?);
        rhs.push(acc + L1_BOUND_SLACK);
    }
    let first_violation = lhs.iter().zip(&rhs).position(|(l, r)| l > r);
    Ok(L1BoundReport { lhs, rhs, first_violation })
}

fn initial_moments_1d(problem: &Problem) -> Result<Vec<f64>> {
    if problem.grid.dim != 1 {
        return Err(Error::InvalidParameter("the assembled constants are available in 1D only".into()));
    }
    require_scalar(problem)?;
    Ok(compute_moments(&problem.initial_field()?).values)
}

fn sup_and_tv(series: &[Vec<f64>]) -> (f64, f64) {
    let sup = series.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let tv = series.windows(2).map(|w| (w[1][0] - w[0][0]).abs()).sum();
    (sup, tv)
}

/// `C_EC = 2 TV(u0) + sum over sides (|u0 at the side| + sup_n |u~| + TV_n(u~))`.
pub fn equicontinuity_constant_1d(problem: &Problem) -> Result<f64> {
    let u0 = initial_moments_1d(problem)?;
    let mut c = 2.0 * discrete_tv(&u0, u0.len(), 1, 1, problem.grid.dx, 1);
    for side in [Side::West, Side::East] {
        let adjacent = if side == Side::West { u0[0] } else { u0[u0.len() - 1] };
        let (sup, tv) = sup_and_tv(&boundary_trace_series(problem, side)?);
        c += adjacent.abs() + sup + tv;
    }
    Ok(c)
}

/// `C_V = 2 (TV(u0) + 2 |u0|_inf + 2 |u0|_1 + 2 lambda T m + sum over sides (TV_t(u~) + sup |u~|))`.
pub fn tv_constant_1d(problem: &Problem) -> Result<f64> {
    let u0 = initial_moments_1d(problem)?;
    let g = &problem.grid;
    let tv = discrete_tv(&u0, u0.len(), 1, 1, g.dx, 1);
    let linf = u0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let l1 = u0.iter().map(|v| v.abs()).sum::<f64>() * g.dx;
    let mut sides = 0.0;
    for side in [Side::West, Side::East] {
        let (sup, tv) = sup_and_tv(&boundary_trace_series(problem, side)?);
        sides += sup + tv;
    }
    Ok(2.0 * (tv + 2.0 * linf + 2.0 * l1 + 2.0 * g.lambda * g.t_final * problem.data_bound + sides))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub constant: f64,
    /// Largest observed value of the bounded quantity (already divided by
    /// `dx` for the equicontinuity check).
    pub observed: f64,
    pub holds: bool,
}

/// `max_n |f^{n+1} - f^n|_1 <= C_EC dx` over the recorded steps.
pub fn check_equicontinuity(records: &[DiagnosticsRecord], dx: f64, c_ec: f64) -> BoundCheck {
    let observed = records.iter().map(|r| r.increment_l1).fold(0.0f64, f64::max) / dx;
    BoundCheck { constant: c_ec, observed, holds: observed <= c_ec }
}

/// `max_n TV(f^n) <= C_V` over the recorded steps.
pub fn check_tv_bound(records: &[DiagnosticsRecord], c_v: f64) -> BoundCheck {
    let observed = records.iter().map(|r| r.tv_f).fold(0.0f64, f64::max);
    BoundCheck { constant: c_v, observed, holds: observed <= c_v }
}
