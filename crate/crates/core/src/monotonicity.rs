//! Certification of monotone relaxation and maximal monotone BGK rates.

use std::fmt;

use crate::collision::RelaxationParams;
use crate::equilibrium::EquilibriumSpec;
use crate::flux::Axis;
use crate::lattice::Stencil;
use crate::{Error, Result};

/// Slack below which an inequality is considered violated.
pub const SLACK_TOLERANCE: f64 = 1e-12;

/// Magnitude bound `m` of the initial and boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataBound(pub f64);

impl DataBound {
    pub fn new(m: f64) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!("data bound {m}")));
        }
        Ok(DataBound(m))
    }

    /// `max(|u0|_inf, max over sides of |u~|_inf)` from sampled values.
    pub fn from_samples<I, J>(initial: I, boundary: J) -> Self
    where
        I: IntoIterator<Item = f64>,
        J: IntoIterator<Item = f64>,
    {
        let m = initial.into_iter().chain(boundary).fold(0.0f64, |acc, v| acc.max(v.abs()));
        DataBound(m)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Monotone,
    NotMonotone,
    /// All Courant numbers vanish; excluded from certification.
    Trivial,
    /// No scalar monotonicity theory applies (systems).
    Uncertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Monotone => "monotone",
            Verdict::NotMonotone => "not_monotone",
            Verdict::Trivial => "trivial",
            Verdict::Uncertified => "uncertified",
        })
    }
}

/// One inequality `lhs <= rhs`, with `slack = rhs - lhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Inequality { name, lhs, rhs, slack, holds: slack >= -SLACK_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub stencil: Stencil,
    pub params: RelaxationParams,
    pub data_bound: f64,
    pub inequalities: Vec<Inequality>,
    pub verdict: Verdict,
    pub omega_star: Option<OmegaStar>,
}

impl MonotonicityReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Monotone
    }

    /// Smallest slack over all inequalities (`+inf` when there are none).
    pub fn min_slack(&self) -> f64 {
        self.inequalities.iter().map(|i| i.slack).fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for MonotonicityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stencil = {}", self.stencil.name())?;
        writeln!(f, "omega_s = {:.16e}", self.params.omega_s)?;
        writeln!(f, "omega_a = {:.16e}", self.params.omega_a)?;
        writeln!(f, "data_bound = {:.16e}", self.data_bound)?;
        for ineq in &self.inequalities {
            writeln!(
                f,
                "{}: lhs = {:.16e}, rhs = {:.16e}, slack = {:.16e}, holds = {}",
                ineq.name, ineq.lhs, ineq.rhs, ineq.slack, ineq.holds
            )?;
        }
        if let Some(star) = &self.omega_star {
            writeln!(f, "omega_star = {:.16e}", star.omega)?;
            writeln!(f, "omega_star_admissible = {}", star.admissible)?;
        }
        write!(f, "verdict = {}", self.verdict)
    }
}

fn flux_inequality(name: &'static str, params: RelaxationParams, a: f64, r: f64) -> Inequality {
    let (ws, wa) = (params.omega_s, params.omega_a);
    let lhs = 0.5 * wa * r;
    let rhs = ws * a + 0.5 * (2.0 - ws - wa).min(0.0).min(wa - ws);
    Inequality::new(name, lhs, rhs)
}

fn rest_inequality(params: RelaxationParams, rest_weight: f64) -> Inequality {
    let ws = params.omega_s;
    // ws * w >= max(0, ws - 1), written as lhs <= rhs
    Inequality::new("rest_weight", (ws - 1.0).max(0.0), ws * rest_weight)
}

/// Evaluates the stencil's monotonicity inequalities.
pub fn check_monotone(
    spec: &EquilibriumSpec,
    params: RelaxationParams,
    m: f64,
) -> Result<MonotonicityReport> {
    DataBound::new(m)?;
    let mut report = MonotonicityReport {
        stencil: spec.stencil,
        params,
        data_bound: m,
        inequalities: Vec::new(),
        verdict: Verdict::Uncertified,
        omega_star: None,
    };
    if !spec.flux.is_scalar() {
        return Ok(report);
    }
    let rx = spec.flux.max_abs_flux_derivative(Axis::X, m)? / spec.lambda;
    let ry = if spec.stencil.dimension() == 2 {
        spec.flux.max_abs_flux_derivative(Axis::Y, m)? / spec.lambda
    } else {
        0.0
    };
    report.inequalities = inequalities(spec, params, rx, ry);
    report.verdict = if rx == 0.0 && ry == 0.0 {
        Verdict::Trivial
    } else if report.inequalities.iter().all(|i| i.holds) {
        Verdict::Monotone
    } else {
        Verdict::NotMonotone
    };
    Ok(report)
}

fn inequalities(spec: &EquilibriumSpec, params: RelaxationParams, rx: f64, ry: f64) -> Vec<Inequality> {
    match spec.stencil {
        Stencil::D2Q5 => vec![
            rest_inequality(params, spec.rest_weight()),
            flux_inequality("flux_x", params, spec.a_x, rx),
            flux_inequality("flux_y", params, spec.a_y, ry),
        ],
        Stencil::D2Q4 => vec![
            flux_inequality("flux_x", params, spec.a_x, rx),
            flux_inequality("flux_y", params, spec.a_y, ry),
        ],
        Stencil::D1Q3 => vec![
            rest_inequality(params, spec.rest_weight()),
            flux_inequality("flux_x", params, spec.a_x, rx),
        ],
        Stencil::D1Q2 => {
            let wa = params.omega_a;
            vec![Inequality::new("flux_x", wa * rx, wa + 2.0 * (1.0 - wa).min(0.0))]
        }
    }
}

/// Largest monotone BGK rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaStar {
    pub omega: f64,
    /// `false` when no rate in `(0, 2]` is monotone (then `omega = 0`).
    pub admissible: bool,
}

/// Closed form for D1Q2: `omega* = 2 / (1 + r)` with `r = max|phi'| / lambda`,
/// capped at 2.
pub fn d1q2_closed_form(r: f64) -> f64 {
    (2.0 / (1.0 + r)).min(2.0)
}

/// Largest `omega` in `(0, 2]` such that BGK relaxation at `omega` is
/// monotone, found by bisection to `1e-12`.
///
/// For `omega <= 1` the inequalities are positively homogeneous in `omega`,
/// so either all of `(0, 1]` is monotone or none of it is.
pub fn max_bgk_omega(spec: &EquilibriumSpec, m: f64) -> Result<OmegaStar> {
    if !spec.flux.is_scalar() {
        return Err(Error::NotScalar);
    }
    let passes = |w: f64| -> Result<bool> {
        let report = check_monotone(spec, RelaxationParams::bgk(w)?, m)?;
        Ok(report.inequalities.iter().all(|i| i.slack >= 0.0))
    };
    if !passes(1.0)? {
        return Ok(OmegaStar { omega: 0.0, admissible: false });
    }
    if passes(2.0)? {
        return Ok(OmegaStar { omega: 2.0, admissible: true });
    }
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(OmegaStar { omega: lo, admissible: true })
}
