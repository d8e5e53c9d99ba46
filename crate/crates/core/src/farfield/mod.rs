//! Far-field traces `f^(cos t, sin t)`, the leading-order prediction
//! `sqrt(pi/2) |x|^{-1/2} Re[e^{i|x| + i pi/4} f^(x/|x|)]`, and the error and
//! decay measurements built on it.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::field::{restrict_annulus, GridField, RealField, Sample};
use crate::fit::{linear_fit, solve_spd};
use crate::par;
use crate::specfun;

/// Default number of trace angles.
pub const DEFAULT_ANGLES: usize = 256;

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FarFieldTrace {
    /// Uniform angles `2 pi k / N` in `[0, 2 pi)`.
    pub angles: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FarFieldTrace {
    /// Trace with every value equal to `c`.
    pub fn constant(c: Complex64, n_theta: usize) -> Self {
        FarFieldTrace { angles: uniform_angles(n_theta), values: vec![c; n_theta] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at angle `theta`, interpolated linearly and periodically.
    pub fn value_at(&self, theta: f64) -> Complex64 {
        let n = self.values.len();
        let t = theta.rem_euclid(2.0 * PI) * n as f64 / (2.0 * PI);
        let k = (t.floor() as usize).min(n - 1);
        let w = t - k as f64;
        self.values[k] * (1.0 - w) + self.values[(k + 1) % n] * w
    }

    /// Largest `|f(t + pi) - conj f(t)|`, which vanishes for real sources.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.values.len();
        if n % 2 != 0 {
            return f64::NAN;
        }
        (0..n).map(|k| (self.values[(k + n / 2) % n] - self.values[k].conj()).norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        FarFieldTrace { angles: self.angles.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }
}

fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// `f^(xi) = (2 pi)^-1 h^2 sum f(x) e^{-i x.xi}` at `xi = (cos t, sin t)` for
/// `N` uniform angles, by direct summation.
pub fn hat_on_circle<T: Sample>(f: &GridField<T>, n_theta: usize) -> Result<FarFieldTrace> {
    if n_theta == 0 {
        return Err(Error::InvalidArgument("need at least one angle".into()));
    }
    let g = f.grid();
    let n = g.n();
    let [cx, cy] = g.center();
    let d = f.samples();
    // rows that are identically zero contribute nothing
    let rows: Vec<usize> = (0..n).filter(|&j| d[j * n..(j + 1) * n].iter().any(|v| v.norm() != 0.0)).collect();
    let xs: Vec<f64> = (0..n).map(|i| cx + g.offset(i)).collect();
    let angles = uniform_angles(n_theta);
    let scale = g.cell() / (2.0 * PI);
    let values = par::map_range(n_theta, |k| {
        let (s, c) = angles[k].sin_cos();
        let ex: Vec<Complex64> = xs.iter().map(|&x| Complex64::from_polar(1.0, -x * c)).collect();
        let mut acc = Complex64::default();
        for &j in &rows {
            let row = &d[j * n..(j + 1) * n];
            let mut rs = Complex64::default();
            for (v, e) in row.iter().zip(&ex) {
                rs += v.to_complex() * e;
            }
            acc += rs * Complex64::from_polar(1.0, -(cy + g.offset(j)) * s);
        }
        acc * scale
    });
    Ok(FarFieldTrace { angles, values })
}

/// Leading-order far-field value at `x`.
pub fn predict_farfield(trace: &FarFieldTrace, x: [f64; 2]) -> Result<f64> {
    let r = x[0].hypot(x[1]);
    if !(r > 0.0) {
        return Err(Error::Domain("far-field prediction is undefined at the origin".into()));
    }
    Ok(prediction(trace, x, r))
}

fn prediction(trace: &FarFieldTrace, x: [f64; 2], r: f64) -> f64 {
    let f = trace.value_at(x[1].atan2(x[0]));
    (PI / 2.0).sqrt() / r.sqrt() * (Complex64::from_polar(1.0, r + FRAC_PI_4) * f).re
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct AnnulusError {
    pub r_in: f64,
    pub r_out: f64,
    /// `sup |x|^{1/2} |u - prediction|`.
    pub sup: f64,
    /// `(int |x| |u - prediction|^2)^{1/2}` over the annulus.
    pub l2: f64,
}

/// Scaled deviation of `u` from the prediction on an annulus about the grid
/// center.
pub fn annulus_error(u: &RealField, trace: &FarFieldTrace, r_in: f64, r_out: f64) -> Result<AnnulusError> {
    let pts = restrict_annulus(u, r_in, r_out);
    if pts.is_empty() {
        return Err(Error::InvalidArgument(format!("annulus [{r_in}, {r_out}] holds no samples")));
    }
    let mut sup = 0.0f64;
    let mut ss = 0.0;
    for s in pts.iter().filter(|s| s.radius > 0.0) {
        let r = s.point[0].hypot(s.point[1]);
        let e = r.sqrt() * (s.value - prediction(trace, s.point, r)).abs();
        sup = sup.max(e);
        ss += e * e;
    }
    Ok(AnnulusError { r_in, r_out, sup, l2: (u.grid().cell() * ss).sqrt() })
}

/// Inner radius excluded from the Cesaro integrals.
pub const CESARO_INNER: f64 = 1.0;

/// `(R, (1/R) int_{1 <= |x| <= R} |u - prediction|^2)` for each `R`.
pub fn cesaro_error(u: &RealField, trace: &FarFieldTrace, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    let g = u.grid();
    let half = 0.5 * g.side();
    if let Some(r) = radii.iter().find(|&&r| !(r > CESARO_INNER && r <= half)) {
        return Err(Error::InvalidArgument(format!("Cesaro radius {r} outside (1, L/2]")));
    }
    let d = u.samples();
    let n = g.n();
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    // per-sample squared error, then cumulative sums in a fixed order
    let mut err = vec![0.0f64; d.len()];
    par::for_each_row(&mut err, n, |j, row| {
        for (i, e) in row.iter_mut().enumerate() {
            let k = j * n + i;
            let r = g.radius(k);
            if r >= CESARO_INNER && r <= rmax {
                let x = g.point(k);
                let diff = d[k] - prediction(trace, x, x[0].hypot(x[1]));
                *e = diff * diff;
            }
        }
    });
    Ok(radii
        .iter()
        .map(|&rc| {
            let s = par::sum_by_rows(err.len(), n, |k| if g.radius(k) <= rc { err[k] } else { 0.0 });
            (rc, g.cell() * s / rc)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub range: [f64; 2],
    /// RMS residual of the log-log regression.
    pub residual: f64,
}

/// Width of the annuli whose maxima form the envelope.
pub const DECAY_BIN: f64 = 2.0 * PI;

/// Fits `max_{annulus} |u| ~ A r^s` over annuli of width `2 pi` tiling
/// `range`, against the annulus midpoints.
pub fn decay_fit<T: Sample>(u: &GridField<T>, range: [f64; 2]) -> Result<DecayFit> {
    let [r1, r2] = range;
    let g = u.grid();
    if !(r1 > 0.0 && r2 - r1 >= 2.0 * DECAY_BIN) || r2 > 0.5 * g.side() {
        return Err(Error::InvalidArgument(format!("decay range [{r1}, {r2}] unusable on this grid")));
    }
    let bins = ((r2 - r1) / DECAY_BIN).floor() as usize;
    let mut maxima = vec![0.0f64; bins];
    for (k, v) in u.samples().iter().enumerate() {
        let r = g.radius(k);
        if r >= r1 && r < r1 + bins as f64 * DECAY_BIN {
            let b = (((r - r1) / DECAY_BIN) as usize).min(bins - 1);
            maxima[b] = maxima[b].max(v.norm());
        }
    }
    if maxima.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::Domain("field vanishes on part of the decay range".into()));
    }
    let x: Vec<f64> = (0..bins).map(|b| (r1 + (b as f64 + 0.5) * DECAY_BIN).ln()).collect();
    let y: Vec<f64> = maxima.iter().map(|m| m.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(DecayFit { exponent: fit.slope, amplitude: fit.intercept.exp(), range, residual: fit.rms })
}

/// Far-field value recovered directly from `u` on one angular sector.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SectorFit {
    pub angle: f64,
    pub value: Complex64,
    pub residual: f64,
}

/// Fits `u ~ Re[(i pi/2) H0(r) f]` on each of `sectors` angular sectors of
/// the annulus `[r_in, r_out]`; `f` is then directly comparable with a trace
/// of the source. Radii are measured from the origin.
pub fn sector_fit(u: &RealField, r_in: f64, r_out: f64, sectors: usize) -> Result<Vec<SectorFit>> {
    if sectors == 0 || !(r_in > 0.0) {
        return Err(Error::InvalidArgument("sector fit needs sectors and r_in > 0".into()));
    }
    let width = 2.0 * PI / sectors as f64;
    let mut acc = vec![([0.0f64; 4], [0.0f64; 2], 0.0f64, Vec::new()); sectors];
    for s in restrict_annulus(u, r_in, r_out) {
        let r = s.point[0].hypot(s.point[1]);
        let t = s.point[1].atan2(s.point[0]);
        let k = (((t + 0.5 * width).rem_euclid(2.0 * PI)) / width) as usize % sectors;
        let (j0, y0) = specfun::bessel_j0_y0(r)?;
        let b = [-0.5 * PI * y0, -0.5 * PI * j0];
        let e = &mut acc[k];
        e.0[0] += b[0] * b[0];
        e.0[1] += b[0] * b[1];
        e.0[3] += b[1] * b[1];
        e.1[0] += b[0] * s.value;
        e.1[1] += b[1] * s.value;
        e.2 += s.value * s.value;
        e.3.push((b, s.value));
    }
    acc.into_iter()
        .enumerate()
        .map(|(k, (mut m, rhs, uu, rows))| {
            m[2] = m[1];
            let c = solve_spd(&m, &rhs, 2)
                .ok_or_else(|| Error::InvalidArgument(format!("sector {k} has too few samples")))?;
            let ss: f64 = rows.iter().map(|(b, v)| (v - c[0] * b[0] - c[1] * b[1]).powi(2)).sum();
            Ok(SectorFit {
                angle: k as f64 * width,
                value: Complex64::new(c[0], c[1]),
                residual: if uu > 0.0 { (ss / uu).sqrt() } else { 0.0 },
            })
        })
        .collect()
}

/// Amplitude and phase comparison of the two far-field routes.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RouteComparison {
    /// Largest relative amplitude difference over the sectors.
    pub amplitude: f64,
    /// Largest phase difference over the sectors, radians.
    pub phase: f64,
}

pub fn compare_routes(trace: &FarFieldTrace, fits: &[SectorFit]) -> RouteComparison {
    let mut out = RouteComparison { amplitude: 0.0, phase: 0.0 };
    for s in fits {
        let t = trace.value_at(s.angle);
        out.amplitude = out.amplitude.max((s.value.norm() - t.norm()).abs() / t.norm());
        let d = (s.value * t.conj()).arg().abs();
        out.phase = out.phase.max(d);
    }
    out
}

/// Far field of a radial source from its scalar circle value: the trace is
/// constant.
pub fn radial_trace(value: f64, n_theta: usize) -> FarFieldTrace {
    FarFieldTrace::constant(Complex64::new(value, 0.0), n_theta)
}
