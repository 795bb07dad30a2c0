//! Ghost filling with equilibria of prescribed or reconstructed states.

use std::fmt;
use std::sync::Arc;

use crate::equilibrium::EquilibriumSpec;
use crate::flux::{EulerState, FluxModel};
use crate::lattice::{DistributionField, GridSpec, MomentField, Side};
use crate::{Error, Result, MAX_COMPONENTS};

/// Boundary data `(t, s) -> u`, `s` being the tangential coordinate (unused
/// in 1D).
#[derive(Clone)]
pub struct BoundaryDatum {
    name: String,
    f: Arc<dyn Fn(f64, f64, &mut [f64]) + Send + Sync>,
}

impl BoundaryDatum {
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64, &mut [f64]) + Send + Sync + 'static) -> Self {
        BoundaryDatum { name: name.into(), f: Arc::new(f) }
    }

    pub fn constant(values: &[f64]) -> Self {
        let v = values.to_vec();
        let name = format!("constant{v:?}");
        Self::new(name, move |_, _, out: &mut [f64]| out.copy_from_slice(&v))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64, s: f64, out: &mut [f64]) {
        (self.f)(t, s, out)
    }
}

impl fmt::Debug for BoundaryDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundaryDatum({})", self.name)
    }
}

/// Approximation of the time-space mean of a datum over a step and a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// One evaluation at the time midpoint and the face center.
    Midpoint,
    /// `n` uniformly spaced midpoint samples in time (and `n` along the
    /// face in 2D).
    Uniform(usize),
}

#[derive(Debug, Clone)]
pub enum SideCondition {
    Dirichlet { datum: BoundaryDatum, quadrature: Quadrature },
    /// Trace reconstructed from the interior: order 1 copies the adjacent
    /// cell, order 2 uses `2 u_0 - u_1`.
    Extrapolation { order: u8 },
    /// Euler wall: adjacent state with the normal momentum reversed.
    ReflectiveWall,
    /// Piecewise specification along the side, selected by the face center.
    Composite(Vec<CompositePiece>),
}

#[derive(Debug, Clone)]
pub struct CompositePiece {
    pub s_min: f64,
    pub s_max: f64,
    pub condition: SideCondition,
}

impl SideCondition {
    pub fn dirichlet(datum: BoundaryDatum) -> Self {
        SideCondition::Dirichlet { datum, quadrature: Quadrature::Midpoint }
    }

    /// Leaf condition in force at tangential coordinate `s`.
    pub fn resolve(&self, s: f64) -> Option<&SideCondition> {
        match self {
            SideCondition::Composite(pieces) => pieces
                .iter()
                .find(|p| s >= p.s_min && s <= p.s_max)
                .and_then(|p| p.condition.resolve(s)),
            leaf => Some(leaf),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SideCondition::Dirichlet { datum, quadrature } => {
                format!("dirichlet({}, {:?})", datum.name(), quadrature)
            }
            SideCondition::Extrapolation { order } => format!("extrapolation(order {order})"),
            SideCondition::ReflectiveWall => "reflective_wall".into(),
            SideCondition::Composite(pieces) => {
                let parts: Vec<String> = pieces
                    .iter()
                    .map(|p| format!("[{}, {}]: {}", p.s_min, p.s_max, p.condition.describe()))
                    .collect();
                format!("composite({})", parts.join("; "))
            }
        }
    }

    fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        match self {
            SideCondition::Extrapolation { order } if *order != 1 && *order != 2 => Err(
                Error::InvalidParameter(format!("extrapolation order {order} not in {{1, 2}}")),
            ),
            SideCondition::Composite(pieces) => {
                let tol = 1e-12 * (hi - lo).abs().max(1.0);
                let mut at = lo;
                for p in pieces {
                    if (p.s_min - at).abs() > tol || p.s_max <= p.s_min {
                        return Err(Error::InvalidParameter(format!(
                            "composite pieces do not partition [{lo}, {hi}]"
                        )));
                    }
                    p.condition.validate(p.s_min, p.s_max)?;
                    at = p.s_max;
                }
                if (at - hi).abs() > tol {
                    return Err(Error::InvalidParameter(format!(
                        "composite pieces do not partition [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Per-side boundary conditions.
#[derive(Debug, Clone, Default)]
pub struct BoundarySpec {
    sides: [Option<SideCondition>; 4],
    /// Clamp out-of-range scalar extrapolated traces into `[-m, m]`.
    pub safe_mode: bool,
    /// Data bound `m` used to flag (and in safe mode clamp) scalar traces.
    pub trace_bound: Option<f64>,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::West => 0,
        Side::East => 1,
        Side::South => 2,
        Side::North => 3,
    }
}

impl BoundarySpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, side: Side, condition: SideCondition) -> Self {
        self.sides[side_index(side)] = Some(condition);
        self
    }

    pub fn set(&mut self, side: Side, condition: SideCondition) {
        self.sides[side_index(side)] = Some(condition);
    }

    pub fn side(&self, side: Side) -> Option<&SideCondition> {
        self.sides[side_index(side)].as_ref()
    }

    /// Checks that every side of the grid has a condition and that composite
    /// pieces partition their side.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        for &side in grid.sides() {
            let cond = self
                .side(side)
                .ok_or_else(|| Error::Config(format!("no condition on the {} side", side.name())))?;
            let (lo, hi) = side_extent(grid, side);
            cond.validate(lo, hi)?;
        }
        Ok(())
    }
}

fn side_extent(grid: &GridSpec, side: Side) -> (f64, f64) {
    match side {
        Side::West | Side::East => (grid.y_min, grid.y_max),
        Side::South | Side::North => (grid.x_min, grid.x_max),
    }
}

/// Mean of `datum` over `[t^n, t^{n+1}]` times the face of boundary position
/// `k` on `side`.
pub fn boundary_datum_average(
    datum: &BoundaryDatum,
    quadrature: Quadrature,
    grid: &GridSpec,
    side: Side,
    k: usize,
    n: usize,
    out: &mut [f64],
) {
    let t0 = grid.time(n);
    let (s0, s1) = grid.face_interval(side, k);
    match quadrature {
        Quadrature::Midpoint | Quadrature::Uniform(0) | Quadrature::Uniform(1) => {
            datum.eval(t0 + 0.5 * grid.dt, 0.5 * (s0 + s1), out)
        }
        Quadrature::Uniform(nq) => {
            let m = out.len();
            let mut acc = [0.0; MAX_COMPONENTS];
            let mut v = [0.0; MAX_COMPONENTS];
            let ns = if grid.dim == 2 { nq } else { 1 };
            for a in 0..nq {
                let t = t0 + (a as f64 + 0.5) * grid.dt / nq as f64;
                for b in 0..ns {
                    let s = if grid.dim == 2 { s0 + (b as f64 + 0.5) * (s1 - s0) / ns as f64 } else { s0 };
                    datum.eval(t, s, &mut v[..m]);
                    for c in 0..m {
                        acc[c] += v[c];
                    }
                }
            }
            let count = (nq * ns) as f64;
            for c in 0..m {
                out[c] = acc[c] / count;
            }
        }
    }
}

/// Summary of one ghost fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FillReport {
    /// Scalar extrapolated traces outside `[-m, m]`.
    pub flagged_traces: usize,
    /// Of those, the ones clamped (safe mode).
    pub clamped_traces: usize,
}

/// Macroscopic state imposed at boundary position `k` of `side` during step
/// `n`, before the equilibrium is taken.
pub fn boundary_state(
    condition: &SideCondition,
    spec: &BoundarySpec,
    eq: &EquilibriumSpec,
    moments: &MomentField,
    grid: &GridSpec,
    side: Side,
    k: usize,
    n: usize,
    out: &mut [f64],
    report: &mut FillReport,
) -> Result<()> {
    let (s0, s1) = grid.face_interval(side, k);
    let leaf = condition.resolve(0.5 * (s0 + s1)).ok_or_else(|| {
        Error::Config(format!("composite {} side leaves position {k} uncovered", side.name()))
    })?;
    let (adjacent, inner) = grid.boundary_cells(side, k);
    let m = eq.components();
    match leaf {
        SideCondition::Dirichlet { datum, quadrature } => {
            boundary_datum_average(datum, *quadrature, grid, side, k, n, out);
        }
        SideCondition::Extrapolation { order } => {
            let u0 = moments.cell(adjacent);
            match (order, inner) {
                (2, Some(inner)) => {
                    let u1 = moments.cell(inner);
                    for c in 0..m {
                        out[c] = 2.0 * u0[c] - u1[c];
                    }
                }
                _ => out.copy_from_slice(u0),
            }
            match eq.flux {
                FluxModel::Euler { gamma } => {
                    let state = EulerState::from_slice(out, gamma);
                    if !state.is_admissible() {
                        return Err(Error::Inadmissible {
                            rho: state.rho,
                            pressure: state.pressure().unwrap_or(f64::NAN),
                        });
                    }
                }
                _ => {
                    if let Some(bound) = spec.trace_bound {
                        if out[0].abs() > bound + 1e-12 {
                            report.flagged_traces += 1;
                            if spec.safe_mode {
                                out[0] = out[0].clamp(-bound, bound);
                                report.clamped_traces += 1;
                            }
                        }
                    }
                }
            }
        }
        SideCondition::ReflectiveWall => {
            if m != 4 {
                return Err(Error::InvalidParameter("reflective wall needs the Euler model".into()));
            }
            out.copy_from_slice(moments.cell(adjacent));
            match side {
                Side::South | Side::North => out[2] = -out[2],
                Side::West | Side::East => out[1] = -out[1],
            }
        }
        SideCondition::Composite(_) => unreachable!("resolve returns leaves"),
    }
    Ok(())
}

/// Fills every incoming ghost strip of the post-collision `field` with the
/// equilibrium of the boundary state. `moments` are those of the pre-stream
/// interior state and `n` is the current step.
pub fn fill_ghosts(
    field: &mut DistributionField,
    spec: &BoundarySpec,
    eq: &EquilibriumSpec,
    moments: &MomentField,
    n: usize,
    grid: &GridSpec,
) -> Result<FillReport> {
    let mut report = FillReport::default();
    let m = eq.components();
    let mut state = [0.0; MAX_COMPONENTS];
    let mut ghost = [0.0; MAX_COMPONENTS];
    for &side in grid.sides() {
        let v = side.incoming();
        let Some(slot) = eq.stencil.slot(v) else { continue };
        let condition = spec
            .side(side)
            .ok_or_else(|| Error::Config(format!("no condition on the {} side", side.name())))?;
        for k in 0..grid.side_len(side) {
            boundary_state(condition, spec, eq, moments, grid, side, k, n, &mut state[..m], &mut report)?;
            eq.equilibrium_of(v, &state[..m], &mut ghost[..m])?;
            field.ghost_mut(slot, k).copy_from_slice(&ghost[..m]);
        }
        field.mark_ghost_filled(slot);
    }
    Ok(report)
}
