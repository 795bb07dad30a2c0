//! Local relaxation: TRT, BGK and a positivity-guarded BGK for Euler.

use crate::equilibrium::EquilibriumSpec;
use crate::flux::{EulerState, FluxModel};
use crate::lattice::{DistributionField, Velocity};
use crate::{Error, Result, MAX_COMPONENTS, MAX_VELOCITIES};

/// Symmetric and antisymmetric relaxation rates, both in `(0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams {
    pub omega_s: f64,
    pub omega_a: f64,
}

impl RelaxationParams {
    pub fn new(omega_s: f64, omega_a: f64) -> Result<Self> {
        for (name, w) in [("omega_s", omega_s), ("omega_a", omega_a)] {
            if !(w > 0.0 && w <= 2.0) {
                return Err(Error::InvalidParameter(format!("{name} = {w} outside (0, 2]")));
            }
        }
        Ok(RelaxationParams { omega_s, omega_a })
    }

    pub fn bgk(omega: f64) -> Result<Self> {
        Self::new(omega, omega)
    }

    pub fn is_bgk(&self) -> bool {
        self.omega_s == self.omega_a
    }
}

/// Collision of a single cell. `f` and `out` hold `q * M` values laid out as
/// `[slot * M + component]`.
pub fn collide_cell(
    spec: &EquilibriumSpec,
    params: RelaxationParams,
    f: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let m = spec.components();
    let vels = spec.stencil.velocities();
    let q = vels.len();
    let mut u = [0.0; MAX_COMPONENTS];
    for slot in 0..q {
        for c in 0..m {
            u[c] += f[slot * m + c];
        }
    }
    let mut eq = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    spec.equilibrium(&u[..m], &mut eq)?;
    collide_with_equilibrium(spec, params, f, &eq, out);
    Ok(())
}

fn collide_with_equilibrium(
    spec: &EquilibriumSpec,
    params: RelaxationParams,
    f: &[f64],
    eq: &[f64],
    out: &mut [f64],
) {
    let m = spec.components();
    let vels = spec.stencil.velocities();
    let (ws, wa) = (params.omega_s, params.omega_a);
    let plus = 0.5 * (ws + wa);
    let minus = 0.5 * (ws - wa);
    for (slot, &v) in vels.iter().enumerate() {
        if v == Velocity::Zero {
            for c in 0..m {
                let k = slot * m + c;
                out[k] = (1.0 - ws) * f[k] + ws * eq[k];
            }
        } else {
            let opp = spec.stencil.slot(v.opposite()).expect("stencils are symmetric");
            for c in 0..m {
                let k = slot * m + c;
                let ko = opp * m + c;
                out[k] = (1.0 - plus) * f[k] + plus * eq[k] + minus * (eq[ko] - f[ko]);
            }
        }
    }
}

fn gather(field: &DistributionField, cell: usize, buf: &mut [f64]) {
    let m = field.components();
    for slot in 0..field.stencil().q() {
        buf[slot * m..(slot + 1) * m].copy_from_slice(field.get(slot, cell));
    }
}

fn scatter(field: &mut DistributionField, cell: usize, buf: &[f64]) {
    let m = field.components();
    for slot in 0..field.stencil().q() {
        field.get_mut(slot, cell).copy_from_slice(&buf[slot * m..(slot + 1) * m]);
    }
}

fn check_stencil(field: &DistributionField, spec: &EquilibriumSpec) -> Result<()> {
    if field.stencil() != spec.stencil || field.components() != spec.components() {
        return Err(Error::StencilMismatch(format!(
            "field is {} with {} components, equilibrium is {} with {}",
            field.stencil().name(),
            field.components(),
            spec.stencil.name(),
            spec.components()
        )));
    }
    Ok(())
}

/// TRT relaxation of every cell, in place.
pub fn relax_trt(
    field: &mut DistributionField,
    spec: &EquilibriumSpec,
    params: RelaxationParams,
) -> Result<()> {
    check_stencil(field, spec)?;
    let n = spec.stencil.q() * spec.components();
    let mut f = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    let mut out = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    for cell in 0..field.cells() {
        gather(field, cell, &mut f[..n]);
        collide_cell(spec, params, &f[..n], &mut out[..n])?;
        scatter(field, cell, &out[..n]);
    }
    Ok(())
}

/// BGK relaxation: TRT with a single rate.
pub fn relax_bgk(field: &mut DistributionField, spec: &EquilibriumSpec, omega: f64) -> Result<()> {
    relax_trt(field, spec, RelaxationParams::bgk(omega)?)
}

/// Outcome of [`relax_guarded`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GuardReport {
    /// Cells re-collided with `omega = 1`.
    pub mask: Vec<bool>,
    pub fallbacks: usize,
}

/// Fraction of the local minimum density and pressure a guarded cell must
/// keep after the next transport.
pub const GUARD_MARGIN: f64 = 0.5;

/// BGK collision for Euler with a local positivity guard.
///
/// After a provisional collision at `omega`, the state each cell would reach
/// after the next transport is predicted from its 5-point neighbourhood.
/// Sources outside the domain are read from the ghost strips when they are
/// already filled (ghost values depend only on the conserved moments, so
/// they may be filled before the collision) and otherwise replaced by the
/// cell's own value. Cells
/// predicted to have non-positive density or pressure, together with the
/// neighbours feeding them, are re-collided with `omega = 1`. A predicted
/// state that stays inadmissible after that is a hard failure.
pub fn relax_guarded(
    field: &mut DistributionField,
    spec: &EquilibriumSpec,
    omega: f64,
) -> Result<GuardReport> {
    check_stencil(field, spec)?;
    let gamma = match spec.flux {
        FluxModel::Euler { gamma } => gamma,
        _ => return Err(Error::InvalidParameter("guarded collision needs the Euler model".into())),
    };
    let params = RelaxationParams::bgk(omega)?;
    let cells = field.cells();
    let mut report = GuardReport { mask: vec![false; cells], fallbacks: 0 };
    if omega == 1.0 {
        relax_trt(field, spec, params)?;
        return Ok(report);
    }

    let pre = field.clone();
    relax_trt(field, spec, params)?;

    let (nx, ny) = (field.nx(), field.ny());
    // local floors: a fraction of the smallest density and pressure in the
    // 5-point neighbourhood before the collision
    let m = spec.components();
    let mut state = vec![(0.0, 0.0); cells];
    let mut u = [0.0; MAX_COMPONENTS];
    for (cell, st) in state.iter_mut().enumerate() {
        u[..m].fill(0.0);
        for slot in 0..spec.stencil.q() {
            for (c, v) in pre.get(slot, cell).iter().enumerate() {
                u[c] += v;
            }
        }
        let e = EulerState::from_slice(&u, gamma);
        *st = (e.rho, e.pressure().unwrap_or(f64::NAN));
    }
    let floor = |cell: usize| -> (f64, f64) {
        let (ix, iy) = (cell % nx, cell / nx);
        let mut lo = state[cell];
        let mut take = |c: usize| {
            lo.0 = lo.0.min(state[c].0);
            lo.1 = lo.1.min(state[c].1);
        };
        if ix > 0 {
            take(cell - 1);
        }
        if ix + 1 < nx {
            take(cell + 1);
        }
        if iy > 0 {
            take(cell - nx);
        }
        if iy + 1 < ny {
            take(cell + nx);
        }
        (GUARD_MARGIN * lo.0.max(0.0), GUARD_MARGIN * lo.1.max(0.0))
    };
    let passes = |field: &DistributionField, cell: usize| -> bool {
        match lookahead_state(field, cell, nx, ny, gamma) {
            Some(e) => {
                let (rho_min, p_min) = floor(cell);
                e.is_admissible() && e.rho >= rho_min && matches!(e.pressure(), Ok(p) if p >= p_min)
            }
            None => false,
        }
    };
    let bad: Vec<usize> = (0..cells).filter(|&cell| !passes(field, cell)).collect();
    if bad.is_empty() {
        return Ok(report);
    }

    let n = spec.stencil.q() * spec.components();
    let unit = RelaxationParams::bgk(1.0)?;
    let mut f = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    let mut out = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    for &cell in &bad {
        let (ix, iy) = (cell % nx, cell / nx);
        let mut hood = vec![cell];
        if ix > 0 {
            hood.push(cell - 1);
        }
        if ix + 1 < nx {
            hood.push(cell + 1);
        }
        if iy > 0 {
            hood.push(cell - nx);
        }
        if iy + 1 < ny {
            hood.push(cell + nx);
        }
        for c in hood {
            if !report.mask[c] {
                report.mask[c] = true;
                report.fallbacks += 1;
                gather(&pre, c, &mut f[..n]);
                collide_cell(spec, unit, &f[..n], &mut out[..n])?;
                scatter(field, c, &out[..n]);
            }
        }
    }
    for &cell in &bad {
        if !lookahead_state(field, cell, nx, ny, gamma).is_some_and(|e| e.is_admissible()) {
            return Err(Error::InadmissibleCell { ix: cell % nx, iy: cell / nx });
        }
    }
    Ok(report)
}

/// The Euler state streamed into `cell` from the post-collision field.
fn lookahead_state(field: &DistributionField, cell: usize, nx: usize, ny: usize, gamma: f64) -> Option<EulerState> {
    let m = field.components();
    let (ix, iy) = ((cell % nx) as i64, (cell / nx) as i64);
    let mut u = [0.0; MAX_COMPONENTS];
    for (slot, &v) in field.stencil().velocities().iter().enumerate() {
        let (dx, dy) = v.displacement();
        let (sx, sy) = (ix - dx as i64, iy - dy as i64);
        let values = if sx < 0 || sy < 0 || sx >= nx as i64 || sy >= ny as i64 {
            if field.ghost_filled(slot) {
                field.ghost(slot, if dx != 0 { iy as usize } else { ix as usize })
            } else {
                field.get(slot, cell)
            }
        } else {
            field.get(slot, sy as usize * nx + sx as usize)
        };
        for (c, value) in values.iter().enumerate() {
            u[c] += value;
        }
    }
    (m == 4).then(|| EulerState::from_slice(&u, gamma))
}
