//! Benchmark registry, run configuration and the time-stepping driver.

use std::f64::consts::{FRAC_PI_3, PI};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::convergence::{convergence_rate, restrict_average};
use crate::analysis::norms::{entropy_violations, l1_distance_fields, DiagnosticsRecord};
use crate::boundary::{
    fill_ghosts, BoundaryDatum, BoundarySpec, CompositePiece, FillReport, Quadrature, SideCondition,
};
use crate::collision::{relax_guarded, relax_trt, RelaxationParams};
use crate::equilibrium::{cell_average, initialize_field, EquilibriumSpec, InitialDatum};
use crate::flux::FluxModel;
use crate::lattice::{compute_moments, compute_moments_into, stream, DistributionField, GridSpec, MomentField, Side, Stencil};
use crate::monotonicity::{check_monotone, MonotonicityReport};
use crate::reference::{
    exact_oblique_burgers, exact_transport, godunov_solve, mach10_initial, mach10_north_trace, ExactSolution,
    GodunovTrace, MACH10_GAMMA, MACH10_LEFT, MACH10_RIGHT,
};
use crate::{Error, Result, MAX_COMPONENTS};

/// Environment variable overriding the output directory of every run.
pub const OUTPUT_DIR_ENV: &str = "VLBM_OUTPUT_DIR";

/// Flat run configuration. Every key but `case` is an optional override of
/// the case defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: String,
    pub j: Option<usize>,
    pub lambda: Option<f64>,
    /// Sets both relaxation rates (BGK).
    pub omega: Option<f64>,
    pub omega_s: Option<f64>,
    pub omega_a: Option<f64>,
    pub t_final: Option<f64>,
    /// Outflow treatment of the 1D outflow cases: `wrong_trace`, `extrap1`, `extrap2`.
    pub left_bc: Option<String>,
    pub wrong_trace: Option<f64>,
    /// Samples per step (and per face in 2D) for boundary data; 1 is the midpoint rule.
    pub quadrature: Option<usize>,
    /// Sub-cell samples per direction for the initial datum.
    pub init_quadrature: Option<usize>,
    /// Euler scheme: `a` (D2Q4) or `b` (D2Q5, guarded collision).
    pub variant: Option<String>,
    /// Initial datum of the 1D outflow cases: `indicator` or `sine`.
    pub initial: Option<String>,
    pub output_dir: Option<String>,
    pub snapshot_every: Option<usize>,
    pub diag_every: Option<usize>,
    pub safe_mode: Option<bool>,
    pub entropy_check: Option<bool>,
    pub study_j: Option<Vec<usize>>,
    /// `exact`, `godunov` or `self`.
    pub study_target: Option<String>,
}

impl RunConfig {
    pub fn for_case(name: &str) -> Self {
        RunConfig { case: name.to_string(), ..Default::default() }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Output directory: the environment override, else the configured one,
    /// else `output`.
    pub fn resolve_output_dir(&self) -> PathBuf {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        PathBuf::from(self.output_dir.clone().unwrap_or_else(|| "output".into()))
    }
}

/// Static description of a benchmark and its default parameters.
#[derive(Debug, Clone)]
pub struct CaseDefinition {
    pub name: &'static str,
    pub description: &'static str,
    pub flux: FluxModel,
    pub stencil: Stencil,
    pub domain: ((f64, f64), (f64, f64)),
    pub default_j: usize,
    pub default_lambda: f64,
    pub default_omega: f64,
    pub default_t_final: f64,
    pub diagnostics: &'static [&'static str],
}

const SCALAR_DIAGNOSTICS: &[&str] = &["norms", "tv", "eq_distance", "increment", "entropy"];
const EULER_DIAGNOSTICS: &[&str] = &["norms", "tv", "eq_distance", "increment"];

pub fn registry() -> Vec<CaseDefinition> {
    vec![
        CaseDefinition {
            name: "transport_outflow",
            description: "linear transport with V = -1 leaving through the left boundary",
            flux: FluxModel::Transport { vx: -1.0, vy: 0.0 },
            stencil: Stencil::D1Q2,
            domain: ((0.0, 1.0), (0.0, 0.0)),
            default_j: 200,
            default_lambda: 2.0,
            default_omega: 1.0,
            default_t_final: 0.5,
            diagnostics: SCALAR_DIAGNOSTICS,
        },
        CaseDefinition {
            name: "burgers_outflow",
            description: "Burgers equation, u0 = -1 on (1/5, 1/2), shock leaving through the left boundary",
            flux: FluxModel::Burgers1d,
            stencil: Stencil::D1Q2,
            domain: ((0.0, 1.0), (0.0, 0.0)),
            default_j: 200,
            default_lambda: 2.0,
            default_omega: 1.0,
            default_t_final: 0.5,
            diagnostics: SCALAR_DIAGNOSTICS,
        },
        CaseDefinition {
            name: "nonconvex_sine",
            description: "cubic flux u^3/3 driven by sin(6t) on the left",
            flux: FluxModel::Cubic,
            stencil: Stencil::D1Q2,
            domain: ((0.0, 1.0), (0.0, 0.0)),
            default_j: 200,
            default_lambda: 10.0 / 7.0,
            default_omega: 1.0,
            default_t_final: 4.0,
            diagnostics: SCALAR_DIAGNOSTICS,
        },
        CaseDefinition {
            name: "burgers2d_oblique",
            description: "2D Burgers oblique shock at angle pi/3 built entirely from boundary data",
            flux: FluxModel::Burgers2d,
            stencil: Stencil::D2Q4,
            domain: ((0.0, 1.0), (0.0, 1.0)),
            default_j: 100,
            default_lambda: 3.0,
            default_omega: 1.0,
            default_t_final: 0.5,
            diagnostics: SCALAR_DIAGNOSTICS,
        },
        CaseDefinition {
            name: "euler_mach10",
            description: "double Mach 10 reflection for the 2D Euler equations",
            flux: FluxModel::Euler { gamma: MACH10_GAMMA },
            stencil: Stencil::D2Q4,
            domain: ((0.0, 4.0), (0.0, 1.0)),
            default_j: 100,
            default_lambda: 30.0,
            default_omega: 1.35,
            default_t_final: 0.2,
            diagnostics: EULER_DIAGNOSTICS,
        },
    ]
}

pub fn find_case(name: &str) -> Option<CaseDefinition> {
    registry().into_iter().find(|c| c.name == name)
}

/// Collision operator of a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CollisionKind {
    Trt(RelaxationParams),
    /// BGK with positivity fallback to `omega = 1` (Euler only).
    Guarded { omega: f64 },
}

impl CollisionKind {
    pub fn params(&self) -> Result<RelaxationParams> {
        match *self {
            CollisionKind::Trt(p) => Ok(p),
            CollisionKind::Guarded { omega } => RelaxationParams::bgk(omega),
        }
    }
}

/// Fully resolved problem: everything the driver needs.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub grid: GridSpec,
    pub equilibrium: EquilibriumSpec,
    pub collision: CollisionKind,
    pub boundary: BoundarySpec,
    pub initial: InitialDatum,
    pub init_quadrature: usize,
    pub data_bound: f64,
    pub exact: Option<ExactSolution>,
    /// Left/right traces of the Godunov reference (1D scalar cases).
    pub godunov: Option<(GodunovTrace, GodunovTrace)>,
    pub resolved: Vec<(String, String)>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("grid", &self.grid)
            .field("collision", &self.collision)
            .field("resolved", &self.resolved)
            .finish()
    }
}

impl Problem {
    pub fn initial_field(&self) -> Result<DistributionField> {
        initialize_field(&self.equilibrium, &self.grid, self.initial.as_ref(), self.init_quadrature)
    }

    pub fn monotonicity(&self) -> Result<MonotonicityReport> {
        check_monotone(&self.equilibrium, self.collision.params()?, self.data_bound)
    }

    /// Same problem with another initial datum.
    pub fn with_initial(mut self, label: &str, datum: impl Fn(f64, f64, &mut [f64]) + Send + Sync + 'static) -> Self {
        self.initial = Arc::new(datum);
        set_resolved(&mut self.resolved, "initial", label.to_string());
        self
    }

    /// Same problem with another condition on `side`.
    pub fn with_side(mut self, side: Side, condition: SideCondition) -> Self {
        set_resolved(&mut self.resolved, &format!("bc_{}", side.name()), condition.describe());
        self.boundary.set(side, condition);
        self
    }

    pub fn dimension(&self) -> usize {
        self.grid.dim
    }
}

fn set_resolved(resolved: &mut Vec<(String, String)>, key: &str, value: String) {
    match resolved.iter_mut().find(|(k, _)| k == key) {
        Some(entry) => entry.1 = value,
        None => resolved.push((key.to_string(), value)),
    }
}

fn quadrature_of(n: usize) -> Quadrature {
    if n <= 1 {
        Quadrature::Midpoint
    } else {
        Quadrature::Uniform(n)
    }
}

fn dirichlet(datum: BoundaryDatum, quadrature: Quadrature) -> SideCondition {
    SideCondition::Dirichlet { datum, quadrature }
}

fn relaxation(config: &RunConfig, default_omega: f64) -> Result<RelaxationParams> {
    let base = config.omega.unwrap_or(default_omega);
    RelaxationParams::new(config.omega_s.unwrap_or(base), config.omega_a.unwrap_or(base))
}

fn outflow_condition(config: &RunConfig, default_trace: f64, quadrature: Quadrature) -> Result<(SideCondition, f64)> {
    let trace = config.wrong_trace.unwrap_or(default_trace);
    match config.left_bc.as_deref().unwrap_or("wrong_trace") {
        "wrong_trace" => Ok((dirichlet(BoundaryDatum::constant(&[trace]), quadrature), trace.abs())),
        "extrap1" => Ok((SideCondition::Extrapolation { order: 1 }, 0.0)),
        "extrap2" => Ok((SideCondition::Extrapolation { order: 2 }, 0.0)),
        other => Err(Error::Config(format!("left_bc '{other}' is not one of wrong_trace, extrap1, extrap2"))),
    }
}

fn indicator(a: f64, b: f64, height: f64) -> impl Fn(f64) -> f64 + Copy + Send + Sync + 'static {
    move |x: f64| if x > a && x < b { height } else { 0.0 }
}

/// Resolves `config` against the case defaults.
pub fn build_problem(config: &RunConfig) -> Result<Problem> {
    let case = find_case(&config.case).ok_or_else(|| {
        let names: Vec<&str> = registry().iter().map(|c| c.name).collect();
        Error::Config(format!("unknown case '{}' (known: {})", config.case, names.join(", ")))
    })?;
    let lambda = config.lambda.unwrap_or(case.default_lambda);
    let t_final = config.t_final.unwrap_or(case.default_t_final);
    let init_quadrature = config.init_quadrature.unwrap_or(1).max(1);
    let mut resolved: Vec<(String, String)> = vec![("case".into(), case.name.into())];
    let mut boundary = BoundarySpec::new();
    boundary.safe_mode = config.safe_mode.unwrap_or(false);
    let initial_kind = config.initial.clone().unwrap_or_else(|| "indicator".into());
    let is_1d_outflow = matches!(case.name, "transport_outflow" | "burgers_outflow");
    if config.initial.is_some() && !is_1d_outflow {
        return Err(Error::Config(format!("case {} has a fixed initial datum", case.name)));
    }
    if (config.left_bc.is_some() || config.wrong_trace.is_some()) && !is_1d_outflow {
        return Err(Error::Config(format!("case {} has fixed boundary conditions", case.name)));
    }
    if config.variant.is_some() && case.name != "euler_mach10" {
        return Err(Error::Config("variant applies to euler_mach10 only".into()));
    }

    let problem = match case.name {
        "transport_outflow" | "burgers_outflow" => {
            let j = config.j.unwrap_or(case.default_j);
            let grid = GridSpec::new_1d(0.0, 1.0, j, lambda, t_final)?;
            let eq = EquilibriumSpec::d1q2(lambda, case.flux)?;
            let quad = quadrature_of(config.quadrature.unwrap_or(1));
            let transport = case.name == "transport_outflow";
            // the outflow trace is wrong on purpose; for Burgers a positive
            // value would be an inflow state, so zero is used there
            let default_trace = if transport { 1.0 } else { 0.0 };
            let (left, trace_mag) = outflow_condition(config, default_trace, quad)?;
            boundary.set(Side::West, left.clone());
            boundary.set(Side::East, dirichlet(BoundaryDatum::constant(&[0.0]), quad));
            let sign = if transport { 1.0 } else { -1.0 };
            let (a, b) = if transport { (1.0 / 3.0, 2.0 / 3.0) } else { (0.2, 0.5) };
            let u0: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match initial_kind.as_str() {
                "indicator" => Arc::new(indicator(a, b, sign)),
                "sine" => Arc::new(move |x: f64| sign * (PI * x).sin().powi(2)),
                other => return Err(Error::Config(format!("initial '{other}' is not one of indicator, sine"))),
            };
            let m = 1f64.max(trace_mag);
            boundary.trace_bound = Some(m);
            let exact = if transport {
                let u0 = u0.clone();
                Some(ExactSolution::new("transport", f64::INFINITY, move |t, x, _y, out: &mut [f64]| {
                    out[0] = exact_transport(u0.as_ref(), -1.0, t, x, (0.0, 1.0), &|_| 0.0);
                }))
            } else if initial_kind == "indicator" {
                // valid until the shock reaches x = 0
                Some(ExactSolution::new("burgers_riemann", 0.4, |t, x, _y, out: &mut [f64]| {
                    out[0] = burgers_outflow_exact(t, x);
                }))
            } else {
                None
            };
            let godunov_left = match &left {
                SideCondition::Dirichlet { datum, .. } => GodunovTrace::Datum(datum.clone()),
                _ => GodunovTrace::Extrapolate,
            };
            let init = u0.clone();
            resolved.push(("initial".into(), initial_kind.clone()));
            Problem {
                name: case.name.into(),
                grid,
                equilibrium: eq,
                collision: CollisionKind::Trt(relaxation(config, case.default_omega)?),
                boundary,
                initial: Arc::new(move |x, _y, out: &mut [f64]| out[0] = init(x)),
                init_quadrature,
                data_bound: m,
                exact,
                godunov: Some((godunov_left, GodunovTrace::Datum(BoundaryDatum::constant(&[0.0])))),
                resolved,
            }
        }
        "nonconvex_sine" => {
            let j = config.j.unwrap_or(case.default_j);
            let grid = GridSpec::new_1d(0.0, 1.0, j, lambda, t_final)?;
            let eq = EquilibriumSpec::d1q2(lambda, case.flux)?;
            let quad = quadrature_of(config.quadrature.unwrap_or(1));
            let drive = BoundaryDatum::new("sin(6t)", |t, _s, out: &mut [f64]| out[0] = (6.0 * t).sin());
            boundary.set(Side::West, dirichlet(drive.clone(), quad));
            boundary.set(Side::East, dirichlet(BoundaryDatum::constant(&[0.0]), quad));
            boundary.trace_bound = Some(1.0);
            resolved.push(("initial".into(), "zero".into()));
            Problem {
                name: case.name.into(),
                grid,
                equilibrium: eq,
                collision: CollisionKind::Trt(relaxation(config, case.default_omega)?),
                boundary,
                initial: Arc::new(|_x, _y, out: &mut [f64]| out[0] = 0.0),
                init_quadrature,
                data_bound: 1.0,
                exact: None,
                godunov: Some((GodunovTrace::Datum(drive), GodunovTrace::Extrapolate)),
                resolved,
            }
        }
        "burgers2d_oblique" => {
            let j = config.j.unwrap_or(case.default_j);
            let grid = GridSpec::new_2d((0.0, 1.0), (0.0, 1.0), j, lambda, t_final)?;
            let eq = EquilibriumSpec::new(Stencil::D2Q4, 0.25, 0.25, lambda, case.flux)?;
            let quad = quadrature_of(config.quadrature.unwrap_or(8));
            let theta = FRAC_PI_3;
            let side_datum = |name: &str, side: Side| {
                BoundaryDatum::new(format!("oblique_shock_{name}"), move |t, s, out: &mut [f64]| {
                    let (x, y) = match side {
                        Side::West => (0.0, s),
                        Side::East => (1.0, s),
                        Side::South => (s, 0.0),
                        Side::North => (s, 1.0),
                    };
                    out[0] = exact_oblique_burgers(t, x, y, theta);
                })
            };
            for side in Side::ALL {
                boundary.set(side, dirichlet(side_datum(side.name(), side), quad));
            }
            boundary.trace_bound = Some(1.0);
            resolved.push(("initial".into(), "zero".into()));
            resolved.push(("theta".into(), format!("{theta:.17e}")));
            Problem {
                name: case.name.into(),
                grid,
                equilibrium: eq,
                collision: CollisionKind::Trt(relaxation(config, case.default_omega)?),
                boundary,
                initial: Arc::new(|_x, _y, out: &mut [f64]| out[0] = 0.0),
                init_quadrature,
                data_bound: 1.0,
                exact: Some(ExactSolution::new("oblique_shock", f64::INFINITY, move |t, x, y, out: &mut [f64]| {
                    // the scheme starts from zero, consistent with the exact
                    // solution only once the shock has entered; the datum is
                    // zero inside the domain at t = 0 anyway
                    out[0] = exact_oblique_burgers(t, x, y, theta);
                })),
                godunov: None,
                resolved,
            }
        }
        "euler_mach10" => {
            let variant = config.variant.clone().unwrap_or_else(|| "a".into());
            let (eq_fn, collision, default_j): (fn(f64, f64) -> Result<EquilibriumSpec>, _, _) = match variant.as_str() {
                "a" => (EquilibriumSpec::euler_d2q4, CollisionKind::Trt(relaxation(config, case.default_omega)?), case.default_j),
                "b" => {
                    let omega = config.omega.unwrap_or(1.8);
                    if config.omega_s.is_some() || config.omega_a.is_some() {
                        return Err(Error::Config("variant b uses a single relaxation rate".into()));
                    }
                    RelaxationParams::bgk(omega)?;
                    (EquilibriumSpec::euler_d2q5, CollisionKind::Guarded { omega }, case.default_j / 2)
                }
                other => return Err(Error::Config(format!("variant '{other}' is not one of a, b"))),
            };
            let j = config.j.unwrap_or(default_j);
            // the D2Q5 weights (a = 1/8) need a faster lattice to keep the
            // guarded collision positive
            let lambda = match (variant.as_str(), config.lambda) {
                ("b", None) => VARIANT_B_LAMBDA,
                _ => lambda,
            };
            let grid = GridSpec::new_2d((0.0, 4.0), (0.0, 1.0), 4 * j, lambda, t_final)?;
            let eq = eq_fn(lambda, MACH10_GAMMA)?;
            let quad = quadrature_of(config.quadrature.unwrap_or(1));
            let left = BoundaryDatum::new("u_L", |_t, _s, out: &mut [f64]| out.copy_from_slice(&MACH10_LEFT));
            let right = BoundaryDatum::new("u_R", |_t, _s, out: &mut [f64]| out.copy_from_slice(&MACH10_RIGHT));
            let north = BoundaryDatum::new("undisturbed_shock_trace", |t, s, out: &mut [f64]| {
                out.copy_from_slice(&mach10_north_trace(t, s).to_array())
            });
            boundary.set(Side::West, dirichlet(left.clone(), quad));
            boundary.set(Side::East, dirichlet(right, quad));
            boundary.set(Side::North, dirichlet(north, quad));
            boundary.set(
                Side::South,
                SideCondition::Composite(vec![
                    CompositePiece { s_min: 0.0, s_max: 1.0 / 6.0, condition: dirichlet(left, quad) },
                    CompositePiece { s_min: 1.0 / 6.0, s_max: 4.0, condition: SideCondition::ReflectiveWall },
                ]),
            );
            resolved.push(("variant".into(), variant));
            resolved.push(("initial".into(), "mach10_split".into()));
            let m = MACH10_LEFT.iter().chain(&MACH10_RIGHT).fold(0.0f64, |a, v| a.max(v.abs()));
            Problem {
                name: case.name.into(),
                grid,
                equilibrium: eq,
                collision,
                boundary,
                initial: Arc::new(|x, y, out: &mut [f64]| out.copy_from_slice(&mach10_initial(x, y))),
                init_quadrature,
                data_bound: m,
                exact: None,
                godunov: None,
                resolved,
            }
        }
        _ => unreachable!("registry and builder out of sync"),
    };
    problem.boundary.validate(&problem.grid)?;
    let mut problem = problem;
    let g = &problem.grid;
    let params = problem.collision.params()?;
    let mut extra: Vec<(String, String)> = vec![
        ("stencil".into(), problem.equilibrium.stencil.name().into()),
        ("flux".into(), problem.equilibrium.flux.name()),
        ("j".into(), g.nx.to_string()),
        ("nx".into(), g.nx.to_string()),
        ("ny".into(), g.ny.to_string()),
        ("lambda".into(), format!("{:.17e}", g.lambda)),
        ("dx".into(), format!("{:.17e}", g.dx)),
        ("dt".into(), format!("{:.17e}", g.dt)),
        ("t_final".into(), format!("{:.17e}", g.t_final)),
        ("steps".into(), g.steps.to_string()),
        ("realized_final_time".into(), format!("{:.17e}", g.realized_final_time())),
        ("omega_s".into(), format!("{:.17e}", params.omega_s)),
        ("omega_a".into(), format!("{:.17e}", params.omega_a)),
        (
            "collision".into(),
            match problem.collision {
                CollisionKind::Trt(p) if p.is_bgk() => "bgk".into(),
                CollisionKind::Trt(_) => "trt".into(),
                CollisionKind::Guarded { .. } => "bgk_guarded".into(),
            },
        ),
        ("data_bound".into(), format!("{:.17e}", problem.data_bound)),
        ("init_quadrature".into(), problem.init_quadrature.to_string()),
        ("safe_mode".into(), problem.boundary.safe_mode.to_string()),
    ];
    if problem.grid.dim == 2 {
        extra[2].1 = (g.ny).to_string();
    }
    for &side in problem.grid.sides() {
        if let Some(c) = problem.boundary.side(side) {
            extra.push((format!("bc_{}", side.name()), c.describe()));
        }
    }
    problem.resolved.extend(extra);
    Ok(problem)
}

/// Entropy solution of the Burgers outflow problem before the shock reaches
/// the left boundary (`t <= 0.4`).
pub fn burgers_outflow_exact(t: f64, x: f64) -> f64 {
    let shock = 0.2 - 0.5 * t;
    let head = 0.5 - t;
    if x < shock {
        0.0
    } else if x <= head {
        -1.0
    } else if x < 0.5 && t > 0.0 {
        (x - 0.5) / t
    } else {
        0.0
    }
}

/// Time-stepping state of one problem.
pub struct Simulation<'a> {
    problem: &'a Problem,
    field: DistributionField,
    scratch: DistributionField,
    moments: MomentField,
    step: usize,
    fallbacks: usize,
    fill: FillReport,
    last_entropy_violations: Option<usize>,
}

impl<'a> Simulation<'a> {
    pub fn new(problem: &'a Problem) -> Result<Self> {
        let field = problem.initial_field()?;
        Self::from_field(problem, field)
    }

    pub fn from_field(problem: &'a Problem, field: DistributionField) -> Result<Self> {
        let scratch = field.clone();
        let moments = compute_moments(&field);
        Ok(Simulation { problem, field, scratch, moments, step: 0, fallbacks: 0, fill: FillReport::default(), last_entropy_violations: None })
    }

    /// One step: moments, collision, ghost fill, streaming.
    pub fn advance(&mut self) -> Result<()> {
        self.advance_with(false)
    }

    /// As [`advance`](Self::advance), optionally counting kinetic entropy
    /// violations of the collision (scalar models).
    pub fn advance_with(&mut self, entropy_check: bool) -> Result<()> {
        let p = self.problem;
        compute_moments_into(&self.field, &mut self.moments)?;
        let pre = if entropy_check { Some(self.field.clone()) } else { None };
        // ghost values depend only on the pre-stream moments, which the
        // collision conserves; the guard reads them, so fill them first
        let report = fill_ghosts(&mut self.field, &p.boundary, &p.equilibrium, &self.moments, self.step, &p.grid)?;
        match p.collision {
            CollisionKind::Trt(params) => relax_trt(&mut self.field, &p.equilibrium, params)?,
            CollisionKind::Guarded { omega } => {
                self.fallbacks += relax_guarded(&mut self.field, &p.equilibrium, omega)?.fallbacks;
            }
        }
        self.last_entropy_violations = match pre {
            Some(pre) => Some(entropy_violations(&pre, &self.field, &p.equilibrium, p.data_bound)?),
            None => None,
        };
        self.fill.flagged_traces += report.flagged_traces;
        self.fill.clamped_traces += report.clamped_traces;
        stream(&self.field, &mut self.scratch)?;
        std::mem::swap(&mut self.field, &mut self.scratch);
        self.step += 1;
        if !self.field.is_finite() {
            return Err(Error::NonFinite { step: self.step });
        }
        Ok(())
    }

    pub fn field(&self) -> &DistributionField {
        &self.field
    }

    pub fn moments(&self) -> MomentField {
        compute_moments(&self.field)
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.problem.grid.time(self.step)
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.problem.grid.steps
    }

    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    pub fn fill_report(&self) -> FillReport {
        self.fill
    }

    pub fn last_entropy_violations(&self) -> Option<usize> {
        self.last_entropy_violations
    }
}

/// Output cadence; zero disables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub diag_every: usize,
    pub snapshot_every: usize,
    pub entropy_check: bool,
}

impl RunOptions {
    pub fn from_config(config: &RunConfig, problem: &Problem) -> Self {
        let default_diag = if problem.grid.dim == 1 { 1 } else { 10 };
        RunOptions {
            diag_every: config.diag_every.unwrap_or(default_diag),
            snapshot_every: config.snapshot_every.unwrap_or(0),
            entropy_check: config.entropy_check.unwrap_or(false) && problem.equilibrium.flux.is_scalar(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub moments: MomentField,
}

#[derive(Debug, Clone)]
pub struct RunMetadata {
    pub report: MonotonicityReport,
    pub steps: usize,
    pub realized_time: f64,
    pub fallbacks: usize,
    pub flagged_traces: usize,
    pub clamped_traces: usize,
    pub resolved: Vec<(String, String)>,
}

impl RunMetadata {
    /// Resolved configuration followed by the run summary, as key/value pairs.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = self.resolved.clone();
        out.push(("monotonicity_verdict".into(), self.report.verdict.to_string()));
        out.push(("min_slack".into(), format!("{:.17e}", self.report.min_slack())));
        out.push(("steps_run".into(), self.steps.to_string()));
        out.push(("realized_final_time".into(), format!("{:.17e}", self.realized_time)));
        out.push(("guard_fallbacks".into(), self.fallbacks.to_string()));
        out.push(("flagged_traces".into(), self.flagged_traces.to_string()));
        out.push(("clamped_traces".into(), self.clamped_traces.to_string()));
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_field: DistributionField,
    pub final_moments: MomentField,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub metadata: RunMetadata,
}

/// Runs `problem` to its final step.
pub fn run_problem(problem: &Problem, options: RunOptions) -> Result<RunOutput> {
    let report = problem.monotonicity()?;
    let g = &problem.grid;
    let d = g.dim;
    let mut sim = Simulation::new(problem)?;
    let mut diagnostics = Vec::new();
    let mut snapshots = Vec::new();
    let record = |sim: &Simulation, prev: Option<&DistributionField>| -> Result<DiagnosticsRecord> {
        let mut r = DiagnosticsRecord::measure(sim.step(), sim.time(), sim.field(), &problem.equilibrium, g.dx, d)?;
        if let Some(prev) = prev {
            r.increment_l1 = l1_distance_fields(sim.field(), prev, g.dx, d)?;
        }
        r.entropy_violations = sim.last_entropy_violations().unwrap_or(0);
        Ok(r)
    };
    let wants = |every: usize, n: usize| every > 0 && (n % every == 0 || n == g.steps);
    if options.diag_every > 0 {
        diagnostics.push(record(&sim, None)?);
    }
    if options.snapshot_every > 0 {
        snapshots.push(Snapshot { step: 0, time: 0.0, moments: sim.moments() });
    }
    while !sim.is_done() {
        let next = sim.step() + 1;
        let prev = if wants(options.diag_every, next) { Some(sim.field().clone()) } else { None };
        sim.advance_with(options.entropy_check)?;
        if let Some(prev) = prev {
            diagnostics.push(record(&sim, Some(&prev))?);
        }
        if wants(options.snapshot_every, next) {
            snapshots.push(Snapshot { step: next, time: sim.time(), moments: sim.moments() });
        }
    }
    let fill = sim.fill_report();
    Ok(RunOutput {
        final_moments: sim.moments(),
        final_field: sim.field().clone(),
        snapshots,
        diagnostics,
        metadata: RunMetadata {
            report,
            steps: sim.step(),
            realized_time: sim.time(),
            fallbacks: sim.fallbacks(),
            flagged_traces: fill.flagged_traces,
            clamped_traces: fill.clamped_traces,
            resolved: problem.resolved.clone(),
        },
    })
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let problem = build_problem(config)?;
    run_problem(&problem, RunOptions::from_config(config, &problem))
}

/// Final moments only, without diagnostics.
pub fn final_moments(problem: &Problem) -> Result<MomentField> {
    let mut sim = Simulation::new(problem)?;
    while !sim.is_done() {
        sim.advance()?;
    }
    Ok(sim.moments())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyTarget {
    Exact,
    /// First-order Godunov on a 4x refined grid, restricted by averaging.
    Godunov,
    /// Each resolution against the next one in the list.
    SelfRefined,
}

impl std::str::FromStr for StudyTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(StudyTarget::Exact),
            "godunov" => Ok(StudyTarget::Godunov),
            "self" => Ok(StudyTarget::SelfRefined),
            other => Err(Error::Config(format!("study target '{other}' is not one of exact, godunov, self"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub j: usize,
    pub dx: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub target: StudyTarget,
    pub rows: Vec<StudyRow>,
    /// Least-squares slope over the rows with positive error, when at least
    /// two exist.
    pub slope: Option<f64>,
}

/// Default lattice speed of the guarded Euler variant.
pub const VARIANT_B_LAMBDA: f64 = 60.0;

/// Refinement factor of the Godunov reference.
pub const GODUNOV_REFINEMENT: usize = 4;

/// l1 errors of `config` over the resolutions `js` against `target`.
pub fn convergence_study(config: &RunConfig, js: &[usize], target: StudyTarget) -> Result<StudyResult> {
    if js.len() < 2 {
        return Err(Error::InvalidParameter("a convergence study needs at least two resolutions".into()));
    }
    let problems: Vec<Problem> = js
        .iter()
        .map(|&j| build_problem(&RunConfig { j: Some(j), ..config.clone() }))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    match target {
        StudyTarget::Exact => {
            for p in &problems {
                let exact = p.exact.as_ref().ok_or_else(|| Error::Config(format!("case {} has no exact solution", p.name)))?;
                let t = p.grid.realized_final_time();
                if t > exact.t_max + 1e-12 {
                    return Err(Error::Config(format!("exact solution of {} valid up to t = {}", p.name, exact.t_max)));
                }
                let u = final_moments(p)?;
                rows.push(StudyRow { j: p.grid.nx, dx: p.grid.dx, error: exact_error(p, &u, exact, t) });
            }
        }
        StudyTarget::Godunov => {
            for p in &problems {
                let u = final_moments(p)?;
                let reference = godunov_reference(p, GODUNOV_REFINEMENT)?;
                let err: f64 = u.values.iter().zip(&reference).map(|(a, b)| (a - b).abs()).sum::<f64>() * p.grid.dx;
                rows.push(StudyRow { j: p.grid.nx, dx: p.grid.dx, error: err });
            }
        }
        StudyTarget::SelfRefined => {
            let finals: Vec<MomentField> = problems.iter().map(final_moments).collect::<Result<_>>()?;
            for k in 0..problems.len() - 1 {
                let (coarse, fine) = (&problems[k], &problems[k + 1]);
                let (nc, nf) = (coarse.grid.nx, fine.grid.nx);
                if nf < nc || nf % nc != 0 {
                    return Err(Error::InvalidParameter(format!("resolutions {nc} and {nf} are not nested")));
                }
                let factor = nf / nc;
                let d = coarse.grid.dim;
                let m = finals[k].components;
                let restricted = restrict_average(&finals[k + 1].values, fine.grid.nx, fine.grid.ny, m, factor, d)?;
                let err: f64 = finals[k].values.iter().zip(&restricted).map(|(a, b)| (a - b).abs()).sum::<f64>()
                    * coarse.grid.cell_volume();
                rows.push(StudyRow { j: nc, dx: coarse.grid.dx, error: err });
            }
        }
    }
    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.error > 0.0).map(|r| (r.dx, r.error)).collect();
    let slope = if points.len() >= 2 { Some(convergence_rate(&points)?) } else { None };
    Ok(StudyResult { target, rows, slope })
}

/// `dx^d sum |u - mean of exact over the cell|` with 4^d samples per cell.
pub fn exact_error(problem: &Problem, u: &MomentField, exact: &ExactSolution, t: f64) -> f64 {
    let g = &problem.grid;
    let m = u.components;
    let datum = |x: f64, y: f64, out: &mut [f64]| exact.eval(t, x, y, out);
    let mut avg = [0.0; MAX_COMPONENTS];
    let mut err = 0.0;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            cell_average(g, ix, iy, &datum, 4, &mut avg[..m]);
            let cell = u.cell(g.index(ix, iy));
            err += (0..m).map(|c| (cell[c] - avg[c]).abs()).sum::<f64>();
        }
    }
    err * g.cell_volume()
}

/// Godunov solution on a `factor`-times refined grid with the same final
/// time, averaged back onto the problem grid.
pub fn godunov_reference(problem: &Problem, factor: usize) -> Result<Vec<f64>> {
    let g = &problem.grid;
    if g.dim != 1 || !problem.equilibrium.flux.is_scalar() {
        return Err(Error::NotScalar);
    }
    let (left, right) = problem
        .godunov
        .as_ref()
        .ok_or_else(|| Error::Config(format!("case {} has no Godunov reference", problem.name)))?;
    let mut fine = GridSpec::new_1d(g.x_min, g.x_max, g.nx * factor, g.lambda, g.t_final)?;
    fine.steps = g.steps * factor;
    let init = problem.initial.clone();
    let u0 = move |x: f64| {
        let mut v = [0.0];
        init(x, 0.0, &mut v);
        v[0]
    };
    let u = godunov_solve(&problem.equilibrium.flux, &fine, &u0, left, right)?;
    restrict_average(&u, fine.nx, 1, 1, factor, 1)
}
