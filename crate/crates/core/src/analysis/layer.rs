//! Outflow boundary layer of the linear two-velocity scheme under a wrong
//! Dirichlet trace: closed forms, long-time predictor, characteristic roots
//! and brute-force oracles.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::boundary::{fill_ghosts, BoundaryDatum, BoundarySpec, SideCondition};
use crate::collision::relax_bgk;
use crate::equilibrium::{initialize_field, EquilibriumSpec};
use crate::flux::FluxModel;
use crate::lattice::{compute_moments, stream, GridSpec, Side};
use crate::{Error, Result};

fn check_courant(c: f64) -> Result<()> {
    if !(c > -1.0 && c < 0.0) {
        return Err(Error::InvalidParameter(format!("Courant number {c} outside (-1, 0)")));
    }
    Ok(())
}

/// Chebyshev polynomial of the second kind `U_j(x)` by the three-term
/// recurrence.
pub fn chebyshev_u(j: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if j == 0 {
        return prev;
    }
    for _ in 1..j {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U_j(cos theta) = sin((j + 1) theta) / sin(theta)`.
pub fn chebyshev_u_trig(j: usize, theta: f64) -> f64 {
    ((j as f64 + 1.0) * theta).sin() / theta.sin()
}

/// Closed-form boundary layer for the relaxation scheme (`omega = 1`) at
/// step `n >= 1` and cell `j` of a `J`-cell domain, zero initial datum,
/// wrong trace `u_w` on the outflow side.
pub fn boundary_layer_chebyshev(big_j: usize, c: f64, u_w: f64, n: usize, j: usize) -> Result<f64> {
    check_courant(c)?;
    if j >= big_j {
        return Err(Error::InvalidParameter(format!("cell {j} outside 0..{big_j}")));
    }
    let prefactor = 0.5 * u_w * (1.0 + c);
    let delta = if j == 0 { 1.0 } else { 0.0 };
    if n <= 1 {
        return Ok(prefactor * delta * n as f64);
    }
    let ratio = ((1.0 + c) / (1.0 - c)).powf(0.5 * j as f64);
    let scale = 0.5 * (1.0 - c * c).sqrt();
    let mut sum = 0.0;
    for h in 1..=big_j / 2 {
        let eig = -2.0 * ((big_j - h + 1) as f64 * PI / (big_j as f64 + 1.0)).cos();
        let weight = (4.0 - eig * eig) * chebyshev_u(j, 0.5 * eig);
        let base = scale * eig;
        let mut power = 1.0;
        let mut inner = 0.0;
        for p in 1..n {
            power *= base;
            if (j + p) % 2 == 0 {
                inner += 2.0 * power;
            }
        }
        sum += weight * inner;
    }
    Ok(prefactor * (delta + ratio / (2.0 * big_j as f64 + 2.0) * sum))
}

pub fn boundary_layer_chebyshev_profile(big_j: usize, c: f64, u_w: f64, n: usize) -> Result<Vec<f64>> {
    (0..big_j).map(|j| boundary_layer_chebyshev(big_j, c, u_w, n, j)).collect()
}

/// `u_w (1 + C) / 2 * (sum_{p < n} A^p) e_1` by repeated tridiagonal
/// products, `A` having `(1 + C)/2` below and `(1 - C)/2` above a zero
/// diagonal.
pub fn tridiagonal_oracle(big_j: usize, c: f64, u_w: f64, n: usize) -> Result<Vec<f64>> {
    check_courant(c)?;
    let (lower, upper) = (0.5 * (1.0 + c), 0.5 * (1.0 - c));
    let mut term = vec![0.0; big_j];
    let mut acc = vec![0.0; big_j];
    if big_j == 0 || n == 0 {
        return Ok(acc);
    }
    term[0] = 1.0;
    let mut next = vec![0.0; big_j];
    for p in 0..n {
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
        if p + 1 == n {
            break;
        }
        for i in 0..big_j {
            let below = if i > 0 { lower * term[i - 1] } else { 0.0 };
            let above = if i + 1 < big_j { upper * term[i + 1] } else { 0.0 };
            next[i] = below + above;
        }
        std::mem::swap(&mut term, &mut next);
    }
    let prefactor = 0.5 * u_w * (1.0 + c);
    Ok(acc.into_iter().map(|v| prefactor * v).collect())
}

/// True when `w = 2 / (1 - C)` up to rounding of the inputs, i.e. the
/// numerator `2 - w + wC` vanishes.
fn annihilates_root(omega: f64, c: f64) -> bool {
    let num = 2.0 - omega + omega * c;
    num.abs() <= 4.0 * f64::EPSILON * (2.0 + omega.abs() + (omega * c).abs())
}

/// Stable root `kappa_-(1) = (2 - w + wC) / (2 - w - wC)`; exactly zero at
/// `w = 2 / (1 - C)`.
pub fn stable_root_kappa1(omega: f64, c: f64) -> Result<f64> {
    let den = 2.0 - omega - omega * c;
    if den == 0.0 {
        return Err(Error::InvalidParameter("degenerate coefficient 2 - w - wC = 0".into()));
    }
    if annihilates_root(omega, c) {
        return Ok(0.0);
    }
    Ok((2.0 - omega + omega * c) / den)
}

/// Both roots of the characteristic equation
/// `(2 - w - wC)/2 k + (2 - w + wC)/2 / k = z + (1 - w) / z`,
/// ordered by increasing modulus.
pub fn characteristic_roots(omega: f64, c: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let a = 0.5 * (2.0 - omega - omega * c);
    let cc = 0.5 * (2.0 - omega + omega * c);
    if a == 0.0 {
        return Err(Error::InvalidParameter("degenerate coefficient 2 - w - wC = 0".into()));
    }
    // a k^2 - b k + c = 0
    let b = z + (1.0 - omega) / z;
    let disc = (b * b - 4.0 * a * cc).sqrt();
    let (q1, q2) = (0.5 * (b + disc), 0.5 * (b - disc));
    let q = if q1.norm() >= q2.norm() { q1 } else { q2 };
    let big = q / a;
    let small = if q.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { cc / q };
    Ok(if small.norm() <= big.norm() { (small, big) } else { (big, small) })
}

/// Long-time boundary layer for rate `omega`.
pub fn boundary_layer_longtime(omega: f64, c: f64, u_w: f64, j: usize) -> Result<f64> {
    check_courant(c)?;
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::InvalidParameter(format!("omega = {omega} outside (0, 2)")));
    }
    if annihilates_root(omega, c) {
        return Ok(if j == 0 { 0.5 * u_w * (1.0 + c) } else { 0.0 });
    }
    let kappa = stable_root_kappa1(omega, c)?;
    let pre = u_w * (2.0 - omega) * (1.0 + c) / (2.0 - omega * (1.0 + c));
    Ok(pre * kappa.powi(j as i32))
}

/// Limit `n -> inf` of the relaxation-scheme layer on a half line:
/// `u_w ((1 + C)/(1 - C))^(j + 1)`.
pub fn neumann_limit(c: f64, u_w: f64, j: usize) -> f64 {
    u_w * ((1.0 + c) / (1.0 - c)).powi(j as i32 + 1)
}

/// Simulates the two-velocity transport scheme on `J` cells with Courant
/// number `C` (`lambda = 1`, `V = C`), zero initial datum, wrong trace `u_w`
/// on the west side and a zero datum on the east side, for `n` BGK steps.
pub fn simulate_layer(big_j: usize, c: f64, u_w: f64, n: usize, omega: f64) -> Result<Vec<f64>> {
    check_courant(c)?;
    let lambda = 1.0;
    let grid = GridSpec::new_1d(0.0, 1.0, big_j, lambda, 0.0)?;
    let eq = EquilibriumSpec::d1q2(lambda, FluxModel::Transport { vx: c * lambda, vy: 0.0 })?;
    let bc = BoundarySpec::new()
        .with(Side::West, SideCondition::dirichlet(BoundaryDatum::constant(&[u_w])))
        .with(Side::East, SideCondition::dirichlet(BoundaryDatum::constant(&[0.0])));
    let mut f = initialize_field(&eq, &grid, &|_, _, o: &mut [f64]| o[0] = 0.0, 1)?;
    let mut next = f.clone();
    for step in 0..n {
        let moments = compute_moments(&f);
        relax_bgk(&mut f, &eq, omega)?;
        fill_ghosts(&mut f, &bc, &eq, &moments, step, &grid)?;
        stream(&f, &mut next)?;
        std::mem::swap(&mut f, &mut next);
    }
    Ok(compute_moments(&f).values)
}
