use proptest::prelude::*;

use vlbm::boundary::{boundary_state, fill_ghosts, BoundaryDatum, BoundarySpec, FillReport, SideCondition};
use vlbm::collision::{collide_cell, relax_trt, RelaxationParams};
use vlbm::equilibrium::EquilibriumSpec;
use vlbm::flux::{Axis, FluxModel};
use vlbm::lattice::{compute_moments, stream, DistributionField, GridSpec, MomentField, Side, Stencil, Velocity};
use vlbm::monotonicity::{check_monotone, Verdict};

/// Certified scalar schemes at their monotonicity threshold (m = 1).
fn certified() -> Vec<(EquilibriumSpec, RelaxationParams)> {
    vec![
        (EquilibriumSpec::d1q2(2.0, FluxModel::Transport { vx: -1.0, vy: 0.0 }).unwrap(), RelaxationParams::bgk(4.0 / 3.0).unwrap()),
        (EquilibriumSpec::d1q2(2.0, FluxModel::Burgers1d).unwrap(), RelaxationParams::bgk(1.0).unwrap()),
        (EquilibriumSpec::d1q2(10.0 / 7.0, FluxModel::Cubic).unwrap(), RelaxationParams::bgk(20.0 / 17.0).unwrap()),
        (
            EquilibriumSpec::new(Stencil::D2Q4, 0.25, 0.25, 3.0, FluxModel::Burgers2d).unwrap(),
            RelaxationParams::bgk(12.0 / 11.0).unwrap(),
        ),
        (
            EquilibriumSpec::new(Stencil::D2Q5, 0.2, 0.2, 3.0, FluxModel::Burgers2d).unwrap(),
            RelaxationParams::new(1.0, 0.95).unwrap(),
        ),
    ]
}

fn in_box(spec: &EquilibriumSpec, unit: &[f64]) -> Vec<f64> {
    spec.invariant_box(1.0).unwrap().iter().zip(unit).map(|(&(a, b), &t)| a + (b - a) * t).collect()
}

fn collide(spec: &EquilibriumSpec, p: RelaxationParams, f: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    collide_cell(spec, p, f, &mut out).unwrap();
    out
}

#[test]
fn schemes_under_test_are_certified() {
    for (spec, p) in certified() {
        assert_eq!(check_monotone(&spec, p, 1.0).unwrap().verdict, Verdict::Monotone, "{spec:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn collision_conserves_moments(
        f in prop::collection::vec(-3.0f64..3.0, 5),
        ws in 0.05f64..2.0, wa in 0.05f64..2.0, which in 0usize..5,
    ) {
        let (spec, _) = certified()[which];
        let q = spec.stencil.q();
        let p = RelaxationParams::new(ws, wa).unwrap();
        let out = collide(&spec, p, &f[..q]);
        let before: f64 = f[..q].iter().sum();
        let after: f64 = out.iter().sum();
        prop_assert!((before - after).abs() <= 1e-13);
    }

    #[test]
    fn collision_is_l1_contractive_and_monotone(
        a in prop::collection::vec(0.0f64..=1.0, 5),
        b in prop::collection::vec(0.0f64..=1.0, 5),
        which in 0usize..5,
    ) {
        let (spec, p) = certified()[which];
        let q = spec.stencil.q();
        let (f, g) = (in_box(&spec, &a[..q]), in_box(&spec, &b[..q]));
        let (fo, go) = (collide(&spec, p, &f), collide(&spec, p, &g));
        let before: f64 = f.iter().zip(&g).map(|(x, y)| (x - y).abs()).sum();
        let after: f64 = fo.iter().zip(&go).map(|(x, y)| (x - y).abs()).sum();
        prop_assert!(after <= before + 1e-13);
        // order preservation: max(f, g) maps above both images
        let hi: Vec<f64> = f.iter().zip(&g).map(|(x, y)| x.max(*y)).collect();
        let ho = collide(&spec, p, &hi);
        for s in 0..q {
            prop_assert!(ho[s] >= fo[s].max(go[s]) - 1e-13);
        }
        // the invariant box is preserved
        for (s, &(lo, up)) in spec.invariant_box(1.0).unwrap().iter().enumerate() {
            prop_assert!(fo[s] >= lo - 1e-13 && fo[s] <= up + 1e-13);
        }
    }

    #[test]
    fn kinetic_entropies_dissipate(
        a in prop::collection::vec(0.0f64..=1.0, 5),
        kappa in -1.0f64..=1.0,
        which in 0usize..5,
    ) {
        let (spec, p) = certified()[which];
        let q = spec.stencil.q();
        let f = in_box(&spec, &a[..q]);
        let fo = collide(&spec, p, &f);
        let ent = |g: &[f64]| -> f64 { (0..q).map(|s| (g[s] - spec.scalar_equilibrium(s, kappa)).abs()).sum() };
        prop_assert!(ent(&fo) <= ent(&f) + 1e-13);
    }

    #[test]
    fn equilibria_are_consistent(u in -1.0f64..=1.0, which in 0usize..5) {
        let (spec, _) = certified()[which];
        let q = spec.stencil.q();
        let mut eq = vec![0.0; q];
        spec.equilibrium(&[u], &mut eq).unwrap();
        prop_assert!((eq.iter().sum::<f64>() - u).abs() <= 1e-14);
        let vels = spec.stencil.velocities();
        for axis in [Axis::X, Axis::Y] {
            let first_moment: f64 = vels
                .iter()
                .zip(&eq)
                .map(|(v, f)| {
                    let (dx, dy) = v.displacement();
                    spec.lambda * f * if axis == Axis::X { dx } else { dy } as f64
                })
                .sum();
            let phi = if spec.stencil.dimension() == 1 && axis == Axis::Y { 0.0 } else { spec.flux.scalar_flux(axis, u) };
            prop_assert!((first_moment - phi).abs() <= 1e-13);
        }
    }

    #[test]
    fn streaming_is_a_shift(
        values in prop::collection::vec(-1.0f64..1.0, 5 * 6 * 4 + 5 * 6),
        two_d in any::<bool>(),
    ) {
        let (stencil, nx, ny) = if two_d { (Stencil::D2Q5, 6, 4) } else { (Stencil::D1Q3, 6, 1) };
        let mut f = DistributionField::zeros(stencil, nx, ny, 1).unwrap();
        let mut it = values.iter().copied();
        for slot in 0..stencil.q() {
            for v in f.slot_values_mut(slot) {
                *v = it.next().unwrap();
            }
            let v = stencil.velocities()[slot];
            let len = match v.inflow_side() {
                None => 0,
                Some(Side::West | Side::East) => ny,
                Some(_) => nx,
            };
            for k in 0..len {
                f.ghost_mut(slot, k)[0] = it.next().unwrap();
            }
            f.mark_ghost_filled(slot);
        }
        let mut out = f.clone();
        stream(&f, &mut out).unwrap();
        for (slot, &v) in stencil.velocities().iter().enumerate() {
            let (dx, dy) = v.displacement();
            for iy in 0..ny {
                for ix in 0..nx {
                    let (sx, sy) = (ix as i64 - dx as i64, iy as i64 - dy as i64);
                    let expected = if sx >= 0 && sy >= 0 && (sx as usize) < nx && (sy as usize) < ny {
                        f.get(slot, sy as usize * nx + sx as usize)[0]
                    } else {
                        let k = if dx != 0 { iy } else { ix };
                        f.ghost(slot, k)[0]
                    };
                    prop_assert_eq!(out.get(slot, iy * nx + ix)[0], expected);
                }
            }
            if v != Velocity::Zero {
                prop_assert!(!out.ghost_filled(slot));
            }
        }
    }

    #[test]
    fn dirichlet_ghosts_stay_in_the_box(data in prop::collection::vec(-1.0f64..=1.0, 4), j in 3usize..12) {
        let spec = EquilibriumSpec::new(Stencil::D2Q4, 0.25, 0.25, 3.0, FluxModel::Burgers2d).unwrap();
        let grid = GridSpec::new_2d((0.0, 1.0), (0.0, 1.0), j, 3.0, 0.1).unwrap();
        let mut bc = BoundarySpec::new();
        for (side, &u) in Side::ALL.iter().zip(&data) {
            bc.set(*side, SideCondition::dirichlet(BoundaryDatum::constant(&[u])));
        }
        let mut f = DistributionField::for_grid(Stencil::D2Q4, &grid, 1).unwrap();
        let moments = compute_moments(&f);
        fill_ghosts(&mut f, &bc, &spec, &moments, 0, &grid).unwrap();
        let bx = spec.invariant_box(1.0).unwrap();
        for side in Side::ALL {
            let slot = spec.stencil.slot(side.incoming()).unwrap();
            for k in 0..grid.side_len(side) {
                let g = f.ghost(slot, k)[0];
                prop_assert!(g >= bx[slot].0 - 1e-15 && g <= bx[slot].1 + 1e-15);
            }
        }
    }

    #[test]
    fn second_order_trace_is_exact_for_linear_profiles(a in -1.0f64..1.0, b in -2.0f64..2.0, j in 3usize..50) {
        let spec = EquilibriumSpec::d1q2(2.0, FluxModel::Burgers1d).unwrap();
        let grid = GridSpec::new_1d(0.0, 1.0, j, 2.0, 0.1).unwrap();
        let mut moments = MomentField::zeros(j, 1, 1);
        for i in 0..j {
            moments.cell_mut(i)[0] = a + b * grid.x_center(i);
        }
        let bc = BoundarySpec::new();
        let cond = SideCondition::Extrapolation { order: 2 };
        let mut out = [0.0];
        let mut report = FillReport::default();
        boundary_state(&cond, &bc, &spec, &moments, &grid, Side::West, 0, 0, &mut out, &mut report).unwrap();
        prop_assert!((out[0] - (a - 0.5 * b * grid.dx)).abs() <= 1e-12);
        boundary_state(&cond, &bc, &spec, &moments, &grid, Side::East, 0, 0, &mut out, &mut report).unwrap();
        prop_assert!((out[0] - (a + b * (1.0 + 0.5 * grid.dx))).abs() <= 1e-12);
    }
}

#[test]
fn field_relaxation_matches_cellwise() {
    let (spec, p) = certified()[3];
    let grid = GridSpec::new_2d((0.0, 1.0), (0.0, 1.0), 7, 3.0, 0.1).unwrap();
    let mut f = DistributionField::for_grid(spec.stencil, &grid, 1).unwrap();
    for slot in 0..4 {
        for (i, v) in f.slot_values_mut(slot).iter_mut().enumerate() {
            *v = ((i * 7 + slot * 3) as f64 * 0.31).sin() * 0.2;
        }
    }
    let pre = f.clone();
    relax_trt(&mut f, &spec, p).unwrap();
    for cell in 0..grid.cells() {
        let cellf: Vec<f64> = (0..4).map(|s| pre.get(s, cell)[0]).collect();
        let expected = collide(&spec, p, &cellf);
        for s in 0..4 {
            assert_eq!(f.get(s, cell)[0], expected[s]);
        }
    }
}
