use num_complex::Complex64;
use std::f64::consts::PI;

use super::Resolvent;
use crate::error::{Error, Result};
use crate::field::{self, Grid, GridField};
use crate::fit::linear_fit;

/// `exp(-1/(1 - |x|^2))` inside the unit disc, 0 outside.
pub fn endpoint_bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EndpointRow {
    pub k: f64,
    pub h: f64,
    /// `||f_k||_1` on the grid.
    pub l1_norm: f64,
    pub sup_norm: f64,
    /// Fewer than four samples across the bump radius.
    pub under_resolved: bool,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct EndpointScan {
    pub rows: Vec<EndpointRow>,
    /// Slope of `sup_norm` against `ln k`.
    pub slope: f64,
    /// `||f||_1 / (2 pi)`, the predicted slope.
    pub predicted_slope: f64,
}

/// `||Phi * f_k||_inf` for `f_k(x) = k^2 f(kx)` and each `k`, on `n x n` grids
/// with spacing `min(2 pi/16, 1/(8k))`.
pub fn endpoint_counterexample(ks: &[f64], n: usize) -> Result<EndpointScan> {
    if ks.len() < 2 || ks.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive k".into()));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let h = (2.0 * PI / 16.0).min(1.0 / (8.0 * k));
        let g = Grid::new(n, h)?;
        let f = GridField::from_fn(g, |x, y| Complex64::new(k * k * endpoint_bump(k * x.hypot(y)), 0.0));
        let u = Resolvent::new(g)?.apply(&f)?;
        rows.push(EndpointRow {
            k,
            h,
            l1_norm: field::lp_norm(&f, 1.0)?,
            sup_norm: u.u.max_abs(),
            under_resolved: 1.0 / (k * h) < 4.0,
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.k.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.sup_norm).collect();
    let slope = linear_fit(&x, &y)?.slope;
    let predicted_slope = rows[0].l1_norm / (2.0 * PI);
    Ok(EndpointScan { rows, slope, predicted_slope })
}
