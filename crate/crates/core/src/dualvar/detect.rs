use super::Coefficient;
use crate::error::{Error, Result};
use crate::field::{convolve, Grid, RealField};

/// Where a field concentrates: the ball `B_R(center)` carrying `zeta` of
/// `int |v|^{p'}`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Concentration {
    pub radius: f64,
    pub zeta: f64,
    pub center: [f64; 2],
}

/// Values within this relative distance of the maximum count as tied.
const TIE: f64 = 1e-9;

fn disc(grid: &Grid, radius: f64) -> RealField {
    let c = grid.center();
    RealField::from_fn(*grid, |x, y| if (x - c[0]).hypot(y - c[1]) <= radius { 1.0 } else { 0.0 })
}

/// Maximises `int_{B_R(y)} |v|^{p'}` over grid points `y` (balls wrap around
/// the grid torus). Ties go to the lexicographically smallest center.
pub fn nonvanishing_detect(v: &RealField, radius: f64, pp: f64) -> Result<Concentration> {
    let g = v.grid();
    if !(radius >= g.h()) {
        return Err(Error::InvalidArgument(format!("ball radius {radius} below the grid spacing")));
    }
    let dens = v.map(|a: f64| a.abs().powf(pp));
    let mass = convolve(&dens, &disc(g, radius))?;
    let vals: Vec<f64> = mass.samples().iter().map(|c| c.re).collect();
    let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pick: Option<[f64; 2]> = None;
    for (k, &m) in vals.iter().enumerate() {
        if m >= best - TIE * best.abs() {
            let x = g.point(k);
            if pick.is_none_or(|p| (x[0], x[1]) < (p[0], p[1])) {
                pick = Some(x);
            }
        }
    }
    let center = pick.ok_or_else(|| Error::InvalidArgument("empty field".into()))?;
    Ok(Concentration { radius, zeta: best.max(0.0), center })
}

/// Grid point maximising the area of `{Q > 1e-8 max Q}` inside `B_delta`,
/// closest to the grid center on ties, then lexicographically smallest.
/// Fails unless that area is at least half the ball.
pub fn find_density_point(q: &Coefficient, delta: f64) -> Result<[f64; 2]> {
    let s = q.samples();
    let g = s.grid();
    let thr = 1e-8 * s.max_abs();
    let ind = s.map(|a: f64| if a > thr { 1.0 } else { 0.0 });
    let area = convolve(&ind, &disc(g, delta))?;
    let vals: Vec<f64> = area.samples().iter().map(|c| c.re).collect();
    let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ball = g.cell() * disc(g, delta).samples().iter().sum::<f64>();
    if !(best >= 0.5 * ball) || ball == 0.0 {
        return Err(Error::Domain(format!("no ball of radius {delta} is half covered by the support of Q")));
    }
    let mut pick: Option<(f64, [f64; 2])> = None;
    for (k, &m) in vals.iter().enumerate() {
        if m >= best - 0.25 * g.cell() {
            let x = g.point(k);
            let d = g.radius(k);
            let better = match pick {
                None => true,
                Some((pd, px)) => d < pd - 1e-12 || (d <= pd + 1e-12 && (x[0], x[1]) < (px[0], px[1])),
            };
            if better {
                pick = Some((d, x));
            }
        }
    }
    Ok(pick.map(|p| p.1).expect("nonempty grid"))
}
