//! Radial shooting oracle for `u'' + u'/r + u + Q(r)|u|^{p-2}u = 0`.
//!
//! A radial solution of the integral equation is an ODE solution whose far
//! field is phase-locked: `u(r) ~ A cos(r + pi/4)/sqrt(r)`. [`shoot_solve`]
//! finds the central amplitude `a = u(0)` producing that phase.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::specfun;

mod ode;

use ode::{Outcome, Segment, State, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Radius where the Taylor start hands over to the integrator.
    pub r_start: f64,
    pub max_step: f64,
    /// `|u|` or `|u'|` above this counts as blow-up.
    pub blow_up: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions { rtol: 1e-10, atol: 1e-13, r_start: 1e-3, max_step: 0.25, blow_up: 1e8 }
    }
}

/// Integrated radial profile with dense output.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    pub a: f64,
    pub p: f64,
    pub r_max: f64,
    /// Accepted step end points, starting with `r_start`.
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Radius at which the solution blew up, if it did.
    pub blow_up: Option<f64>,
    q0: f64,
    r_start: f64,
    segments: Vec<Segment>,
    circle: f64,
}

/// Integrates from `u(0) = a`, `u'(0) = 0` out to `r_max`.
pub fn integrate_radial<Q>(a: f64, q: &Q, p: f64, r_max: f64) -> Result<RadialProfile>
where
    Q: Fn(f64) -> f64,
{
    integrate_radial_with(a, q, p, r_max, &RadialOptions::default())
}

pub fn integrate_radial_with<Q>(a: f64, q: &Q, p: f64, r_max: f64, opts: &RadialOptions) -> Result<RadialProfile>
where
    Q: Fn(f64) -> f64,
{
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("central amplitude must be nonzero, got {a}")));
    }
    if !(p > 2.0) {
        return Err(Error::InvalidArgument(format!("exponent must exceed 2, got {p}")));
    }
    if !(r_max > opts.r_start) {
        return Err(Error::InvalidArgument(format!("r_max = {r_max} is below the start radius")));
    }
    let nl = |u: f64| u.abs().powf(p - 2.0) * u;
    let q0 = q(0.0);
    let r0 = opts.r_start;
    let c = a + q0 * nl(a);
    // F(r) = int_0^r J0(s) Q(s) |u|^{p-2} u s ds, started with its leading term
    let y0: State = [a - c * r0 * r0 / 4.0, -c * r0 / 2.0, q0 * nl(a) * r0 * r0 / 2.0];
    let rhs = |r: f64, y: &State| -> State {
        let g = q(r) * nl(y[0]);
        let j0 = specfun::bessel_j0_y0(r).map(|v| v.0).unwrap_or(1.0);
        [y[1], -y[1] / r - y[0] - g, j0 * g * r]
    };
    let tol = Tolerances { rtol: opts.rtol, atol: opts.atol, max_step: opts.max_step };
    let (segments, outcome) = ode::integrate(rhs, r0, y0, r_max, &tol, opts.blow_up);
    let blow_up = match outcome {
        Outcome::Finished => None,
        Outcome::BlowUp(r) => Some(r),
        Outcome::StepUnderflow(r) => return Err(Error::Domain(format!("radial integration stalled at r = {r}"))),
    };
    let mut r = vec![r0];
    let mut u = vec![y0[0]];
    let mut du = vec![y0[1]];
    for s in &segments {
        let y = s.eval(s.end());
        r.push(s.end());
        u.push(y[0]);
        du.push(y[1]);
    }
    let circle = segments.last().map(|s| s.eval(s.end())[2]).unwrap_or(y0[2]);
    Ok(RadialProfile { a, p, r_max, r, u, du, blow_up, q0, r_start: r0, segments, circle })
}

impl RadialProfile {
    /// Last radius covered by the integration.
    pub fn reach(&self) -> f64 {
        *self.r.last().unwrap_or(&self.r_start)
    }

    /// `(u(r), u'(r))` for `0 <= r <= reach()`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r >= 0.0) || r > self.reach() {
            return Err(Error::Domain(format!("radius {r} outside the integrated range")));
        }
        if r <= self.r_start {
            let c = self.a + self.q0 * self.a.abs().powf(self.p - 2.0) * self.a;
            return Ok((self.a - c * r * r / 4.0, -c * r / 2.0));
        }
        let k = self.segments.partition_point(|s| s.end() < r).min(self.segments.len() - 1);
        let y = self.segments[k].eval(r);
        Ok((y[0], y[1]))
    }

    pub fn u_at(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.0)
    }

    /// Circle transform at unit frequency of the radial source,
    /// `(2 pi)^-1 int J0(r) Q(r) |u|^{p-2} u(r) 2 pi r dr`, integrated out to
    /// [`RadialProfile::reach`].
    pub fn circle_transform(&self) -> f64 {
        self.circle
    }

    pub fn match_asymptotics(&self, window: [f64; 2], basis: MatchBasis) -> Result<MatchResult> {
        if self.blow_up.is_some() {
            return Err(Error::Domain("profile blew up before the matching window".into()));
        }
        if window[1] > self.reach() {
            return Err(Error::InvalidArgument("matching window beyond the profile".into()));
        }
        match_samples(|r| self.u_at(r).unwrap_or(f64::NAN), window, basis)
    }
}

/// Functions spanning `cos r/sqrt r`, `sin r/sqrt r` in the fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MatchBasis {
    /// `cos r/sqrt r` and `sin r/sqrt r` exactly.
    Plain,
    /// `(sqrt pi/2)(J0 -+ Y0)`: the same leading behaviour, plus the `1/r`
    /// corrections of free radial waves.
    Hankel,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MatchResult {
    pub amplitude: f64,
    /// `theta` in `A cos(r + theta)/sqrt(r)`, in `(-pi, pi]`.
    pub phase: f64,
    /// `A cos(theta - pi/4)`: the amplitude with sign for phase-locked data.
    pub signed_amplitude: f64,
    pub coeffs: [f64; 2],
    /// Relative RMS residual of the fit.
    pub residual: f64,
}

const MATCH_SAMPLES: usize = 2000;

/// Least-squares fit of `u` on the window to the chosen basis.
pub fn match_samples<F>(u: F, window: [f64; 2], basis: MatchBasis) -> Result<MatchResult>
where
    F: Fn(f64) -> f64,
{
    let [lo, hi] = window;
    if !(lo > 0.0 && hi - lo >= 4.0 * PI) {
        return Err(Error::InvalidArgument(format!(
            "matching window [{lo}, {hi}] must be positive and span two wavelengths"
        )));
    }
    let half_root_pi = 0.5 * PI.sqrt();
    let mut m = [0.0; 4];
    let mut rhs = [0.0; 2];
    let mut rows = Vec::with_capacity(MATCH_SAMPLES);
    for k in 0..MATCH_SAMPLES {
        let r = lo + (hi - lo) * k as f64 / (MATCH_SAMPLES - 1) as f64;
        let b = match basis {
            MatchBasis::Plain => {
                let s = r.sqrt();
                [r.cos() / s, r.sin() / s]
            }
            MatchBasis::Hankel => {
                let (j, y) = specfun::bessel_j0_y0(r)?;
                [half_root_pi * (j - y), half_root_pi * (j + y)]
            }
        };
        let v = u(r);
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite sample at r = {r}")));
        }
        m[0] += b[0] * b[0];
        m[1] += b[0] * b[1];
        m[3] += b[1] * b[1];
        rhs[0] += b[0] * v;
        rhs[1] += b[1] * v;
        rows.push((b, v));
    }
    m[2] = m[1];
    let c = crate::fit::solve_spd(&m, &rhs, 2)
        .ok_or_else(|| Error::InvalidArgument("degenerate matching window".into()))?;
    let (mut ss, mut uu) = (0.0, 0.0);
    for (b, v) in rows {
        ss += (v - c[0] * b[0] - c[1] * b[1]).powi(2);
        uu += v * v;
    }
    let amplitude = c[0].hypot(c[1]);
    Ok(MatchResult {
        amplitude,
        phase: (-c[1]).atan2(c[0]),
        signed_amplitude: (c[0] - c[1]) / 2f64.sqrt(),
        coeffs: [c[0], c[1]],
        residual: if uu > 0.0 { (ss / uu).sqrt() } else { 0.0 },
    })
}

/// Distance of `theta - pi/4` from the nearest multiple of `pi`.
pub fn phase_defect(theta: f64) -> f64 {
    let d = (theta - FRAC_PI_4).rem_euclid(PI);
    d.min(PI - d)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PhaseScanRow {
    pub a: f64,
    /// `sin(theta(a) - pi/4)`; NaN when the profile blew up.
    pub lock: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ShootingResult {
    pub a: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub phase_defect: f64,
    /// `|A_signed - sqrt(pi/2) f(1)| / A`.
    pub amplitude_defect: f64,
    pub circle_transform: f64,
    pub fit_residual: f64,
    pub iterations: usize,
    pub scan: Vec<PhaseScanRow>,
}

/// Root search failure, carrying the scan that was done.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ShootFailure {
    pub message: String,
    pub scan: Vec<PhaseScanRow>,
}

impl std::fmt::Display for ShootFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ShootFailure {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootOptions {
    pub window: [f64; 2],
    pub scan_points: usize,
    pub basis: MatchBasis,
    pub integrator: RadialOptions,
}

impl ShootOptions {
    /// Window `[3 r_max/4, r_max]`, five scan points, Hankel basis.
    pub fn for_radius(r_max: f64) -> Self {
        ShootOptions {
            window: [0.75 * r_max, r_max],
            scan_points: 5,
            basis: MatchBasis::Hankel,
            integrator: RadialOptions::default(),
        }
    }
}

fn lock_value<Q: Fn(f64) -> f64>(a: f64, q: &Q, p: f64, r_max: f64, o: &ShootOptions) -> f64 {
    integrate_radial_with(a, q, p, r_max, &o.integrator)
        .and_then(|prof| prof.match_asymptotics(o.window, o.basis))
        .map(|m| -(m.coeffs[0] + m.coeffs[1]) / (2f64.sqrt() * m.amplitude))
        .unwrap_or(f64::NAN)
}

/// Finds `a` in `bracket` with phase-locked far field: the bracket is scanned
/// for the first sign change of `sin(theta - pi/4)`, which is then refined
/// by bisection followed by safeguarded secant steps.
pub fn shoot_solve<Q>(
    q: &Q,
    p: f64,
    bracket: [f64; 2],
    r_max: f64,
    opts: &ShootOptions,
) -> std::result::Result<ShootingResult, ShootFailure>
where
    Q: Fn(f64) -> f64,
{
    let fail = |message: String, scan: Vec<PhaseScanRow>| ShootFailure { message, scan };
    let [a0, a1] = bracket;
    if !(a1 > a0) || opts.scan_points < 2 {
        return Err(fail("empty bracket".into(), vec![]));
    }
    let m = opts.scan_points;
    let scan: Vec<PhaseScanRow> = (0..m)
        .map(|k| {
            let a = a0 + (a1 - a0) * k as f64 / (m - 1) as f64;
            PhaseScanRow { a, lock: if a == 0.0 { f64::NAN } else { lock_value(a, q, p, r_max, opts) } }
        })
        .collect();
    let Some(k) = scan.windows(2).position(|w| w[0].lock * w[1].lock <= 0.0) else {
        return Err(fail("no sign change of the phase lock in the bracket".into(), scan));
    };
    let (mut lo, mut hi) = (scan[k].a, scan[k + 1].a);
    let (mut glo, mut ghi) = (scan[k].lock, scan[k + 1].lock);
    let g = |a: f64| lock_value(a, q, p, r_max, opts);
    let mut iterations = 0;
    let mut root = if glo == 0.0 { lo } else { hi };
    if glo != 0.0 && ghi != 0.0 {
        loop {
            iterations += 1;
            let bisect = iterations <= 12;
            let mut x = if bisect { 0.5 * (lo + hi) } else { hi - ghi * (hi - lo) / (ghi - glo) };
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let gx = g(x);
            if !gx.is_finite() {
                return Err(fail(format!("profile blew up at a = {x} inside the bracket"), scan));
            }
            root = x;
            if gx.abs() < 1e-13 || hi - lo < 1e-15 * x.abs() || iterations >= 80 {
                break;
            }
            if gx * glo < 0.0 {
                hi = x;
                ghi = gx;
            } else {
                lo = x;
                glo = gx;
            }
        }
    }
    let prof =
        integrate_radial_with(root, q, p, r_max, &opts.integrator).map_err(|e| fail(e.to_string(), scan.clone()))?;
    let mt = prof.match_asymptotics(opts.window, opts.basis).map_err(|e| fail(e.to_string(), scan.clone()))?;
    let f1 = prof.circle_transform();
    Ok(ShootingResult {
        a: root,
        amplitude: mt.amplitude,
        phase: mt.phase,
        phase_defect: phase_defect(mt.phase),
        amplitude_defect: (mt.signed_amplitude - (PI / 2.0).sqrt() * f1).abs() / mt.amplitude,
        circle_transform: f1,
        fit_residual: mt.residual,
        iterations,
        scan,
    })
}
