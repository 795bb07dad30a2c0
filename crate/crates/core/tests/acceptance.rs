//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vlbm::analysis::layer::{
    boundary_layer_chebyshev_profile, boundary_layer_longtime, characteristic_roots, neumann_limit, simulate_layer,
    stable_root_kappa1, tridiagonal_oracle,
};
use vlbm::analysis::props::{check_equicontinuity, check_l1_contraction, check_tv_bound, equicontinuity_constant_1d, tv_constant_1d};
use vlbm::cases::{build_problem, convergence_study, run_problem, RunConfig, RunOptions, StudyTarget};
use vlbm::collision::{collide_cell, RelaxationParams};
use vlbm::equilibrium::EquilibriumSpec;
use vlbm::flux::{EulerState, FluxModel};
use vlbm::lattice::Stencil;
use vlbm::monotonicity::max_bgk_omega;
use vlbm::reference::{mach10_threshold, MACH10_GAMMA};
use vlbm::Error;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_thresholds() -> Outcome {
    let cases: [(&str, EquilibriumSpec, f64); 3] = [
        ("transport", EquilibriumSpec::d1q2(2.0, FluxModel::Transport { vx: -1.0, vy: 0.0 }).map_err(err)?, 4.0 / 3.0),
        ("cubic", EquilibriumSpec::d1q2(10.0 / 7.0, FluxModel::Cubic).map_err(err)?, 20.0 / 17.0),
        (
            "burgers2d",
            EquilibriumSpec::new(Stencil::D2Q4, 0.25, 0.25, 3.0, FluxModel::Burgers2d).map_err(err)?,
            12.0 / 11.0,
        ),
    ];
    let mut notes = Vec::new();
    for (name, spec, expected) in cases {
        let star = max_bgk_omega(&spec, 1.0).map_err(err)?;
        let dev = (star.omega - expected).abs();
        ensure(star.admissible && dev <= 1e-12, format!("{name}: omega* = {} (expected {expected})", star.omega))?;
        notes.push(format!("{name} |dev| = {dev:.1e}"));
    }
    Ok(notes.join(", "))
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c2_triple_equality() -> Outcome {
    let mut worst = 0.0f64;
    for n in [1, 7, 50, 200] {
        let sim = simulate_layer(20, -0.5, 1.0, n, 1.0).map_err(err)?;
        let cheb = boundary_layer_chebyshev_profile(20, -0.5, 1.0, n).map_err(err)?;
        let oracle = tridiagonal_oracle(20, -0.5, 1.0, n).map_err(err)?;
        let d = max_dev(&sim, &cheb).max(max_dev(&sim, &oracle)).max(max_dev(&cheb, &oracle));
        ensure(d <= 1e-10, format!("n = {n}: pairwise deviation {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max pairwise deviation {worst:.1e}"))
}

fn c3_longtime_profile() -> Outcome {
    let mut notes = Vec::new();
    for omega in [1.0, 5.0 / 3.0] {
        let sim = simulate_layer(20, -0.5, 1.0, 400, omega).map_err(err)?;
        let pred: Vec<f64> = (0..20).map(|j| boundary_layer_longtime(omega, -0.5, 1.0, j)).collect::<Result<_, _>>().map_err(err)?;
        let d = max_dev(&sim, &pred);
        ensure(d <= 1e-6, format!("omega = {omega}: max deviation {d:e}"))?;
        notes.push(format!("omega {omega:.4}: {d:.1e}"));
    }
    let sim = simulate_layer(20, -0.5, 1.0, 400, 4.0 / 3.0).map_err(err)?;
    let tail = sim[1..].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ensure((sim[0] - 0.25).abs() <= 1e-6 && tail <= 1e-8, format!("omega = 4/3: u0 = {}, tail {tail:e}", sim[0]))?;
    notes.push(format!("omega 4/3: u0 - 1/4 = {:.1e}, tail {tail:.1e}", sim[0] - 0.25));
    Ok(notes.join(", "))
}

fn c4_root_identities() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let omega = 0.05 + 0.095 * i as f64;
        for k in 0..20 {
            let c = -0.025 - 0.0475 * k as f64;
            let closed = stable_root_kappa1(omega, c).map_err(err)?;
            let (small, big) = characteristic_roots(omega, c, Complex64::new(1.0, 0.0)).map_err(err)?;
            ensure(small.norm() <= 1.0 && big.norm() >= 1.0 - 1e-12, format!("root classification at ({omega}, {c})"))?;
            let d = (small - closed).norm();
            ensure(d <= 1e-12, format!("({omega}, {c}): closed {closed} vs numeric {small}"))?;
            worst = worst.max(d);
        }
    }
    for k in 0..20 {
        let c = -0.025 - 0.0475 * k as f64;
        let r = stable_root_kappa1(2.0 / (1.0 - c), c).map_err(err)?;
        ensure(r == 0.0, format!("kappa at omega = 2/(1-C), C = {c}: {r:e}"))?;
        for j in 0..30 {
            let lt = boundary_layer_longtime(1.0, c, 1.0, j).map_err(err)?;
            let d = (lt - neumann_limit(c, 1.0, j)).abs();
            ensure(d <= 1e-13, format!("Neumann identity C = {c}, j = {j}: {d:e}"))?;
        }
    }
    Ok(format!("max root deviation {worst:.1e}; zero root exact; Neumann identity holds"))
}

fn burgers_range(omega: f64, left_bc: &str) -> Result<Result<(f64, f64), Error>, String> {
    let cfg = RunConfig {
        omega: Some(omega),
        left_bc: Some(left_bc.into()),
        diag_every: Some(1),
        ..RunConfig::for_case("burgers_outflow")
    };
    let p = build_problem(&cfg).map_err(err)?;
    Ok(run_problem(&p, RunOptions::from_config(&cfg, &p)).map(|out| {
        out.diagnostics
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.u_min), hi.max(r.u_max)))
    }))
}

fn c5_maximum_principle() -> Outcome {
    let mut notes = Vec::new();
    for omega in [1.0, 4.0 / 3.0] {
        for bc in ["wrong_trace", "extrap1"] {
            let (lo, hi) = burgers_range(omega, bc)?.map_err(err)?;
            ensure(lo >= -1.0 - 1e-12 && hi <= 1.0 + 1e-12, format!("omega {omega}, {bc}: range [{lo}, {hi}]"))?;
        }
        notes.push(format!("omega {omega:.4} in range"));
    }
    match burgers_range(5.0 / 3.0, "extrap2")? {
        Err(Error::NonFinite { step }) => notes.push(format!("omega 5/3 extrap2 aborts at step {step}")),
        Err(e) => return Err(format!("omega 5/3 extrap2: unexpected error {e}")),
        Ok((lo, hi)) => {
            ensure(lo < -1.0 || hi > 1.0, format!("omega 5/3 extrap2 stayed in [{lo}, {hi}]"))?;
            notes.push(format!("omega 5/3 extrap2 leaves [-1, 1]: [{lo:.3}, {hi:.3}]"));
        }
    }
    Ok(notes.join(", "))
}

fn c6_collision_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let schemes: Vec<(EquilibriumSpec, RelaxationParams)> = vec![
        (EquilibriumSpec::d1q2(2.0, FluxModel::Transport { vx: -1.0, vy: 0.0 }).map_err(err)?, RelaxationParams::bgk(4.0 / 3.0).map_err(err)?),
        (EquilibriumSpec::d1q2(2.0, FluxModel::Burgers1d).map_err(err)?, RelaxationParams::bgk(1.2).map_err(err)?),
        (EquilibriumSpec::d1q2(10.0 / 7.0, FluxModel::Cubic).map_err(err)?, RelaxationParams::bgk(20.0 / 17.0).map_err(err)?),
        (
            EquilibriumSpec::new(Stencil::D2Q4, 0.25, 0.25, 3.0, FluxModel::Burgers2d).map_err(err)?,
            RelaxationParams::bgk(12.0 / 11.0).map_err(err)?,
        ),
        (
            EquilibriumSpec::new(Stencil::D1Q3, 0.25, 0.0, 2.0, FluxModel::Burgers1d).map_err(err)?,
            RelaxationParams::new(1.0, 1.0).map_err(err)?,
        ),
    ];
    let (mut cons, mut contraction, mut entropy) = (0.0f64, 0usize, 0usize);
    let levels = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for (spec, params) in &schemes {
        let boxes = spec.invariant_box(1.0).map_err(err)?;
        let q = boxes.len();
        let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> { boxes.iter().map(|&(a, b)| rng.gen_range(a..=b)).collect() };
        let (mut fo, mut go) = (vec![0.0; q], vec![0.0; q]);
        for _ in 0..10_000 {
            let f = sample(&mut rng);
            let g = sample(&mut rng);
            collide_cell(spec, *params, &f, &mut fo).map_err(err)?;
            collide_cell(spec, *params, &g, &mut go).map_err(err)?;
            cons = cons.max((f.iter().sum::<f64>() - fo.iter().sum::<f64>()).abs());
            let before: f64 = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).sum();
            let after: f64 = fo.iter().zip(&go).map(|(a, b)| (a - b).abs()).sum();
            if after > before + 1e-13 {
                contraction += 1;
            }
            for &kappa in &levels {
                let pre: f64 = (0..q).map(|s| (f[s] - spec.scalar_equilibrium(s, kappa)).abs()).sum();
                let post: f64 = (0..q).map(|s| (fo[s] - spec.scalar_equilibrium(s, kappa)).abs()).sum();
                if post > pre + 1e-13 {
                    entropy += 1;
                }
            }
        }
    }
    ensure(cons <= 1e-13, format!("moment drift {cons:e}"))?;
    ensure(contraction == 0, format!("{contraction} contraction violations"))?;
    ensure(entropy == 0, format!("{entropy} entropy violations"))?;
    Ok(format!("{} schemes x 10^4 pairs: drift {cons:.1e}, 0 contraction and 0 entropy violations", schemes.len()))
}

fn burgers_cfg(j: usize, t: f64) -> RunConfig {
    RunConfig { j: Some(j), omega: Some(1.2), t_final: Some(t), diag_every: Some(1), ..RunConfig::for_case("burgers_outflow") }
}

fn c7_proposition_diagnostics() -> Outcome {
    let base = build_problem(&burgers_cfg(200, 0.5)).map_err(err)?;
    let perturbations: [(&str, f64, f64, f64); 2] = [("+0.1 on (0.6, 0.8)", 0.6, 0.8, 0.1), ("+0.5 on (0.25, 0.35)", 0.25, 0.35, 0.5)];
    for (label, a, b, h) in perturbations {
        let init = base.initial.clone();
        let other = base.clone().with_initial(label, move |x, y, out: &mut [f64]| {
            init(x, y, out);
            if x > a && x < b {
                out[0] += h;
            }
        });
        let r = check_l1_contraction(&base, &other).map_err(err)?;
        ensure(r.holds(), format!("l1 bound fails at step {:?} for {label}", r.first_violation))?;
    }
    let out = run_problem(&base, RunOptions { diag_every: 1, ..Default::default() }).map_err(err)?;
    let c_ec = equicontinuity_constant_1d(&base).map_err(err)?;
    let ec = check_equicontinuity(&out.diagnostics, base.grid.dx, c_ec);
    ensure(ec.holds, format!("equicontinuity: max increment/dx {} > C_EC {c_ec}", ec.observed))?;
    let c_v = tv_constant_1d(&base).map_err(err)?;
    let tv = check_tv_bound(&out.diagnostics, c_v);
    ensure(tv.holds, format!("TV(f) {} > C_V {c_v}", tv.observed))?;
    let delta = |j: usize| -> Result<f64, String> {
        let cfg = burgers_cfg(j, 0.2);
        let p = build_problem(&cfg).map_err(err)?;
        let out = run_problem(&p, RunOptions { diag_every: p.grid.steps, ..Default::default() }).map_err(err)?;
        Ok(out.diagnostics.last().unwrap().eq_distance)
    };
    let ratio = delta(400)? / delta(200)?;
    ensure((0.35..=0.65).contains(&ratio), format!("delta ratio {ratio}"))?;
    Ok(format!(
        "l1 bound holds (2 pairs), increment/dx {:.3} <= C_EC {c_ec:.3}, TV(f) {:.3} <= C_V {c_v:.3}, delta ratio {ratio:.3}",
        ec.observed, tv.observed
    ))
}

fn strictly_decreasing(e: &[f64]) -> bool {
    e.windows(2).all(|w| w[1] < w[0])
}

fn c8_nonconvex() -> Outcome {
    let r = convergence_study(&RunConfig::for_case("nonconvex_sine"), &[100, 200, 400], StudyTarget::Godunov).map_err(err)?;
    let errors: Vec<f64> = r.rows.iter().map(|r| r.error).collect();
    ensure(strictly_decreasing(&errors), format!("errors {errors:?}"))?;
    Ok(format!("l1 vs Godunov(4x): {errors:.4?}"))
}

fn c9_oblique_shock() -> Outcome {
    let cfg = RunConfig { diag_every: Some(1), ..RunConfig::for_case("burgers2d_oblique") };
    let p = build_problem(&cfg).map_err(err)?;
    let out = run_problem(&p, RunOptions::from_config(&cfg, &p)).map_err(err)?;
    let (lo, hi) = out.diagnostics.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.u_min), b.max(r.u_max)));
    ensure(lo >= -1e-12 && hi <= 1.0 + 1e-12, format!("range [{lo}, {hi}]"))?;
    let r = convergence_study(&RunConfig::for_case("burgers2d_oblique"), &[25, 50, 100], StudyTarget::Exact).map_err(err)?;
    let errors: Vec<f64> = r.rows.iter().map(|r| r.error).collect();
    ensure(strictly_decreasing(&errors), format!("errors {errors:?}"))?;
    let slope = r.slope.ok_or("no slope")?;
    ensure(slope >= 0.35, format!("slope {slope}"))?;
    Ok(format!("range [{lo:.2e}, {hi:.6}], errors {errors:.4?}, slope {slope:.3}"))
}

fn c10_mach10() -> Outcome {
    let cfg = RunConfig { diag_every: Some(0), ..RunConfig::for_case("euler_mach10") };
    let p = build_problem(&cfg).map_err(err)?;
    let out = run_problem(&p, RunOptions::from_config(&cfg, &p)).map_err(err)?;
    let g = &p.grid;
    ensure(out.metadata.steps == g.steps, format!("{} of {} steps", out.metadata.steps, g.steps))?;
    let (mut rho_min, mut p_min) = (f64::INFINITY, f64::INFINITY);
    for cell in 0..g.cells() {
        let s = EulerState::from_slice(out.final_moments.cell(cell), MACH10_GAMMA);
        rho_min = rho_min.min(s.rho);
        p_min = p_min.min(s.pressure().unwrap_or(f64::NEG_INFINITY));
    }
    ensure(rho_min > 0.0 && p_min > 0.0, format!("rho_min {rho_min}, p_min {p_min}"))?;
    let top = g.ny - 1;
    let ix = (0..g.nx)
        .rev()
        .find(|&ix| out.final_moments.at(ix, top)[0] >= 4.7)
        .ok_or("no density jump on the north row")?;
    let x_jump = g.x_center(ix) + 0.5 * g.dx;
    let target = mach10_threshold(out.metadata.realized_time);
    let dev = (x_jump - target).abs();
    ensure(dev <= 3.0 * g.dx, format!("jump at {x_jump}, threshold {target}"))?;
    Ok(format!(
        "{} steps, rho_min {rho_min:.3}, p_min {p_min:.3}, jump {x_jump:.4} vs {target:.4} ({:.2} dx)",
        g.steps,
        dev / g.dx
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("monotonicity thresholds", c1_thresholds),
        ("boundary-layer triple equality", c2_triple_equality),
        ("long-time layer profile", c3_longtime_profile),
        ("root identities", c4_root_identities),
        ("maximum principle (Burgers outflow)", c5_maximum_principle),
        ("collision conservation/contraction/entropy", c6_collision_properties),
        ("proposition-level diagnostics", c7_proposition_diagnostics),
        ("non-convex benchmark vs Godunov", c8_nonconvex),
        ("2D oblique shock", c9_oblique_shock),
        ("Euler Mach 10", c10_mach10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  C{:<2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  C{:<2} {name}: {detail} [{secs:.1}s]", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
