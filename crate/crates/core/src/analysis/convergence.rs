//! Refinement-study helpers.

use crate::{Error, Result};

/// Least-squares slope of `log e` against `log dx`.
pub fn convergence_rate(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two resolutions".into()));
    }
    if let Some(&(dx, e)) = points.iter().find(|(dx, e)| !(*dx > 0.0) || !(*e > 0.0)) {
        return Err(Error::InvalidParameter(format!("non-positive point (dx = {dx}, e = {e})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all resolutions coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Restriction by cell averaging of a fine cell array (`m` components per
/// cell, `nx * ny` cells) onto the grid coarser by `factor` in every
/// direction of dimension `d`.
pub fn restrict_average(fine: &[f64], nx: usize, ny: usize, m: usize, factor: usize, d: usize) -> Result<Vec<f64>> {
    let fy = if d == 2 { factor } else { 1 };
    if factor == 0 || nx % factor != 0 || ny % fy != 0 || fine.len() != nx * ny * m {
        return Err(Error::Shape(format!("cannot restrict {nx}x{ny} by {factor}")));
    }
    let (cx, cy) = (nx / factor, ny / fy);
    let mut out = vec![0.0; cx * cy * m];
    let w = 1.0 / (factor * fy) as f64;
    for iy in 0..ny {
        for ix in 0..nx {
            let coarse = (iy / fy) * cx + ix / factor;
            for c in 0..m {
                out[coarse * m + c] += w * fine[(iy * nx + ix) * m + c];
            }
        }
    }
    Ok(out)
}
