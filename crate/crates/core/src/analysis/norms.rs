//! Grid norms, discrete total variation, distance to equilibrium and the
//! per-step diagnostics record.

use crate::equilibrium::EquilibriumSpec;
use crate::lattice::{compute_moments, DistributionField, MomentField};
use crate::{Error, Result, MAX_COMPONENTS, MAX_VELOCITIES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

/// `(dx^d sum_j |u_j|^p)^(1/p)`, or `max_j |u_j|` for `p = inf`, where
/// `|u_j|` is the l1 norm over components.
pub fn grid_lp_norm(moments: &MomentField, p: Norm, dx: f64, d: usize) -> f64 {
    let m = moments.components;
    let abs = moments.values.chunks(m).map(|c| c.iter().map(|v| v.abs()).sum::<f64>());
    let vol = dx.powi(d as i32);
    match p {
        Norm::L1 => vol * abs.sum::<f64>(),
        Norm::L2 => (vol * abs.map(|a| a * a).sum::<f64>()).sqrt(),
        Norm::LInf => abs.fold(0.0, f64::max),
    }
}

/// `dx^d sum_j |a_j - b_j|` over moment fields of equal shape.
pub fn l1_distance_moments(a: &MomentField, b: &MomentField, dx: f64, d: usize) -> Result<f64> {
    if a.values.len() != b.values.len() {
        return Err(Error::Shape("moment fields differ in size".into()));
    }
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum();
    Ok(dx.powi(d as i32) * s)
}

/// `dx^d sum_i sum_j |f_ij - g_ij|` over distribution fields of equal shape.
pub fn l1_distance_fields(f: &DistributionField, g: &DistributionField, dx: f64, d: usize) -> Result<f64> {
    if f.stencil() != g.stencil() || f.cells() != g.cells() || f.components() != g.components() {
        return Err(Error::Shape("distribution fields differ in shape".into()));
    }
    let mut s = 0.0;
    for slot in 0..f.stencil().q() {
        s += f.slot_values(slot).iter().zip(g.slot_values(slot)).map(|(a, b)| (a - b).abs()).sum::<f64>();
    }
    Ok(dx.powi(d as i32) * s)
}

/// Discrete total variation of a cell array with `m` components per cell:
/// `sum_j |v_{j+1} - v_j|` in 1D and `dx * sum (x-differences + y-differences)`
/// in 2D, over interior neighbour pairs.
pub fn discrete_tv(values: &[f64], nx: usize, ny: usize, m: usize, dx: f64, d: usize) -> f64 {
    let at = |ix: usize, iy: usize| &values[(iy * nx + ix) * m..(iy * nx + ix + 1) * m];
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let mut s = 0.0;
    for iy in 0..ny {
        for ix in 0..nx {
            if ix + 1 < nx {
                s += diff(at(ix, iy), at(ix + 1, iy));
            }
            if d == 2 && iy + 1 < ny {
                s += diff(at(ix, iy), at(ix, iy + 1));
            }
        }
    }
    if d == 2 {
        dx * s
    } else {
        s
    }
}

pub fn tv_moments(moments: &MomentField, dx: f64, d: usize) -> f64 {
    discrete_tv(&moments.values, moments.nx, moments.ny, moments.components, dx, d)
}

/// Total variation of all distribution functions, summed over velocities.
pub fn tv_field(field: &DistributionField, dx: f64, d: usize) -> f64 {
    (0..field.stencil().q())
        .map(|slot| discrete_tv(field.slot_values(slot), field.nx(), field.ny(), field.components(), dx, d))
        .sum()
}

/// `delta = dx^d sum_j sum_i |f_ij - f_i^eq(u_j)|`.
pub fn equilibrium_distance(field: &DistributionField, spec: &EquilibriumSpec, dx: f64, d: usize) -> Result<f64> {
    let moments = compute_moments(field);
    let m = field.components();
    let q = field.stencil().q();
    let mut eq = [0.0; MAX_COMPONENTS * MAX_VELOCITIES];
    let mut s = 0.0;
    for cell in 0..field.cells() {
        spec.equilibrium(moments.cell(cell), &mut eq)?;
        for slot in 0..q {
            for (c, v) in field.get(slot, cell).iter().enumerate() {
                s += (v - eq[slot * m + c]).abs();
            }
        }
    }
    Ok(dx.powi(d as i32) * s)
}

/// Entropy levels `{-m, -m/2, 0, m/2, m}` used by the dissipation check.
pub fn entropy_levels(m: f64) -> [f64; 5] {
    [-m, -0.5 * m, 0.0, 0.5 * m, m]
}

/// Number of (cell, level) pairs where the collision increased the kinetic
/// entropy `sum_i |f_i - f_i^eq(kappa)|` by more than `1e-13`. Scalar only.
pub fn entropy_violations(
    pre: &DistributionField,
    post: &DistributionField,
    spec: &EquilibriumSpec,
    m: f64,
) -> Result<usize> {
    if !spec.flux.is_scalar() {
        return Err(Error::NotScalar);
    }
    let q = spec.stencil.q();
    let levels = entropy_levels(m);
    let mut eqs = [[0.0; MAX_VELOCITIES]; 5];
    for (k, &kappa) in levels.iter().enumerate() {
        spec.equilibrium(&[kappa], &mut eqs[k])?;
    }
    let mut count = 0;
    for cell in 0..pre.cells() {
        for eq in &eqs {
            let before: f64 = (0..q).map(|s| (pre.get(s, cell)[0] - eq[s]).abs()).sum();
            let after: f64 = (0..q).map(|s| (post.get(s, cell)[0] - eq[s]).abs()).sum();
            if after > before + 1e-13 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub tv_u: f64,
    pub tv_f: f64,
    pub eq_distance: f64,
    /// `|f^n - f^{n-1}|_1`, zero at `n = 0`.
    pub increment_l1: f64,
    /// Extremes of the first component.
    pub u_min: f64,
    pub u_max: f64,
    pub entropy_violations: usize,
}

impl DiagnosticsRecord {
    pub const HEADER: [&'static str; 12] = [
        "step",
        "time",
        "l1",
        "l2",
        "linf",
        "tv_u",
        "tv_f",
        "eq_distance",
        "increment_l1",
        "u_min",
        "u_max",
        "entropy_violations",
    ];

    /// Evaluates every field except the increment and the entropy count.
    pub fn measure(
        step: usize,
        time: f64,
        field: &DistributionField,
        spec: &EquilibriumSpec,
        dx: f64,
        d: usize,
    ) -> Result<Self> {
        let moments = compute_moments(field);
        let m = moments.components;
        let first = moments.values.iter().step_by(m);
        let (u_min, u_max) = first.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(DiagnosticsRecord {
            step,
            time,
            l1: grid_lp_norm(&moments, Norm::L1, dx, d),
            l2: grid_lp_norm(&moments, Norm::L2, dx, d),
            linf: grid_lp_norm(&moments, Norm::LInf, dx, d),
            tv_u: tv_moments(&moments, dx, d),
            tv_f: tv_field(field, dx, d),
            eq_distance: equilibrium_distance(field, spec, dx, d)?,
            increment_l1: 0.0,
            u_min,
            u_max,
            entropy_violations: 0,
        })
    }

    pub fn is_finite(&self) -> bool {
        [
            self.time,
            self.l1,
            self.l2,
            self.linf,
            self.tv_u,
            self.tv_f,
            self.eq_distance,
            self.increment_l1,
            self.u_min,
            self.u_max,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.step,
            self.time,
            self.l1,
            self.l2,
            self.linf,
            self.tv_u,
            self.tv_f,
            self.eq_distance,
            self.increment_l1,
            self.u_min,
            self.u_max,
            self.entropy_violations
        )
    }
}
