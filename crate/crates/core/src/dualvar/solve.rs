use serde::Serialize;

use super::{nonvanishing_detect, signed_pow, CoefficientClass, Concentration, DualProblem, DualState};
use crate::error::{Error, Result};
use crate::field::{GridField, RealField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    /// Residual grew tenfold over 50 iterations.
    Diverged,
    /// Iterate collapsed to zero.
    Trivial,
    /// Iteration budget exhausted.
    NotConverged,
    /// Starting point rejected, e.g. `int v K v <= 0`.
    InvalidStart,
    /// Concentration fell below the vanishing threshold.
    Vanishing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub mode: String,
    pub status: SolveStatus,
    pub message: String,
    pub p: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    /// `(1/p' - 1/2) ||v||_{p'}^{p'}` at the final iterate.
    pub mountain_pass_level: f64,
    pub v_norm: f64,
    pub u_norm: f64,
    /// `|1 - int v K v / ||v||_{p'}^{p'}|` at the final iterate.
    pub euler_defect: f64,
    pub concentration: Vec<Concentration>,
    pub backend: String,
}

impl SolveReport {
    fn new(mode: &str, problem: &DualProblem, tol: f64) -> Self {
        SolveReport {
            mode: mode.into(),
            status: SolveStatus::NotConverged,
            message: String::new(),
            p: problem.p(),
            tolerance: tol,
            iterations: 0,
            residual_history: Vec::new(),
            final_residual: f64::NAN,
            mountain_pass_level: f64::NAN,
            v_norm: f64::NAN,
            u_norm: f64::NAN,
            euler_defect: f64::NAN,
            concentration: Vec::new(),
            backend: problem.operator().describe(),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    fn finish(&mut self, problem: &DualProblem, u: &[f64], v: &[f64]) {
        let pp = problem.conjugate();
        self.u_norm = problem.norm(u, problem.p());
        self.v_norm = problem.norm(v, pp);
        self.mountain_pass_level = problem.critical_level(v);
        self.euler_defect = if self.v_norm > 0.0 { problem.euler_defect(v) } else { f64::NAN };
        if let Some(&r) = self.residual_history.last() {
            self.final_residual = r;
        }
    }

    fn diverging(&self) -> bool {
        let h = &self.residual_history;
        h.len() > 50 && h[h.len() - 1] > 10.0 * h[h.len() - 51]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    /// Initial damping `theta` in (0, 1].
    pub theta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { theta: 0.5, tol: 1e-6, max_iter: 200 }
    }
}

/// Damped iteration `u <- (1 - theta) u + theta M^{(p-1)/(p-2)} T(u)` with
/// `T(u) = **R**(Q|u|^{p-2}u)` and the stabilising factor
/// `M = <N(u), u> / <N(u), T(u)>`, `N(u) = Q|u|^{p-2}u`. The seed is first
/// rescaled so that `M = 1`. `theta` halves whenever the residual jumps by
/// more than half.
pub fn fixed_point_solve(
    u0: &RealField,
    problem: &DualProblem,
    opts: &FixedPointOptions,
) -> Result<(RealField, SolveReport)> {
    if !u0.grid().same_as(problem.grid()) {
        return Err(Error::GridMismatch);
    }
    if !(opts.theta > 0.0 && opts.theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("damping must lie in (0, 1], got {}", opts.theta)));
    }
    let p = problem.p();
    let gamma = (p - 1.0) / (p - 2.0);
    let mut report = SolveReport::new("fixed-point", problem, opts.tol);
    let mut u = u0.samples().to_vec();
    let n0 = problem.norm(&u, p);
    if n0 == 0.0 {
        report.status = SolveStatus::Trivial;
        report.message = "zero seed".into();
        report.residual_history.push(0.0);
        report.finish(problem, &u, &u);
        return Ok((u0.clone(), report));
    }
    let stab = |u: &[f64], nl: &[f64], t: &[f64]| {
        let m = problem.inner(nl, u) / problem.inner(nl, t);
        if m.is_finite() && m > 0.0 {
            m
        } else {
            1.0
        }
    };
    let mut nl = problem.nonlinearity(&u);
    let mut t = problem.operator().apply_real(&nl);
    let m = stab(&u, &nl, &t);
    if m != 1.0 {
        let lam = m.powf(1.0 / (p - 2.0));
        for x in u.iter_mut() {
            *x *= lam;
        }
        nl = problem.nonlinearity(&u);
        t = problem.operator().apply_real(&nl);
    }
    let mut theta = opts.theta;
    for it in 0..=opts.max_iter {
        let res = problem.relative_residual(&u, &t);
        report.iterations = it;
        let prev = report.residual_history.last().copied();
        report.residual_history.push(res);
        if res <= opts.tol {
            report.status = SolveStatus::Converged;
            break;
        }
        if problem.norm(&u, p) < 1e-12 * n0 {
            report.status = SolveStatus::Trivial;
            report.message = "iterate collapsed to zero".into();
            break;
        }
        if !res.is_finite() || report.diverging() {
            report.status = SolveStatus::Diverged;
            report.message = "residual grew tenfold over 50 iterations".into();
            break;
        }
        if it == opts.max_iter {
            report.message = format!("no convergence in {} iterations", opts.max_iter);
            break;
        }
        if prev.is_some_and(|r| res > 1.5 * r) {
            theta = (0.5 * theta).max(1.0 / 64.0);
        }
        let f = stab(&u, &nl, &t).powf(gamma);
        for (a, b) in u.iter_mut().zip(&t) {
            *a = (1.0 - theta) * *a + theta * f * b;
        }
        nl = problem.nonlinearity(&u);
        t = problem.operator().apply_real(&nl);
    }
    let v = problem.v_from_u(&u);
    report.finish(problem, &u, &v);
    Ok((GridField::from_vec(*problem.grid(), u)?, report))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualOptions {
    /// Relaxation of the normalised update, 1 for none.
    pub theta: f64,
    /// Tolerance on the `u` fixed-point residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions { theta: 1.0, tol: 1e-7, max_iter: 300 }
    }
}

/// Iterate state shared by the dual and periodic solvers: `v` and
/// `u = **R**(Q^{1/p} v)`, kept consistent by linearity so each step costs one
/// operator application.
struct DualIter<'a, 'b> {
    problem: &'a DualProblem<'b>,
    v: Vec<f64>,
    u: Vec<f64>,
}

impl DualIter<'_, '_> {
    /// One normalised step. With `w = |K v|^{p-2} K v` and
    /// `s = (<w, K w> / ||w||_{p'}^{p'})^{1/(p'-2)}`, `v <- s w` satisfies the
    /// Euler identity `||v||_{p'}^{p'} = <v, K v>` exactly. Returns the
    /// residual of the current `u`, or `None` when `<w, K w> <= 0`.
    fn step(&mut self, theta: f64) -> Option<f64> {
        let pr = self.problem;
        let p = pr.p();
        let pp = pr.conjugate();
        let qr = pr.q_root();
        let w: Vec<f64> = self.u.iter().zip(qr).map(|(u, q)| signed_pow(q * u, p - 1.0)).collect();
        // R(Q^{1/p} w) = R(Q |u|^{p-2} u) = T(u), and K w = Q^{1/p} T(u)
        let qw: Vec<f64> = w.iter().zip(qr).map(|(a, q)| a * q).collect();
        let t = pr.operator().apply_real(&qw);
        let res = pr.relative_residual(&self.u, &t);
        let kw: Vec<f64> = t.iter().zip(qr).map(|(a, q)| a * q).collect();
        let a = pr.inner(&w, &kw);
        if !(a > 0.0) {
            return None;
        }
        let s = (a / pr.power_integral(&w, pp)).powf(1.0 / (pp - 2.0));
        for ((v, u), (wi, ti)) in self.v.iter_mut().zip(self.u.iter_mut()).zip(w.iter().zip(&t)) {
            *v = (1.0 - theta) * *v + theta * s * wi;
            *u = (1.0 - theta) * *u + theta * s * ti;
        }
        Some(res)
    }

    fn refresh(&mut self) {
        self.u = self.problem.u_from_v(&self.v);
    }
}

/// Normalised power iteration `v <- s |K v|^{p-2} K v` for critical points
/// of `J`. Returns `v`, `u = **R**(Q^{1/p} v)` and the report; stops when the
/// `u` residual `||u - T(u)||_p / ||u||_p` reaches `tol`.
pub fn dual_power_iterate(
    v0: &DualState,
    problem: &DualProblem,
    opts: &DualOptions,
) -> Result<(RealField, RealField, SolveReport)> {
    run_dual(v0, problem, opts, None)
}

struct Recentering {
    steps: usize,
    block: usize,
    radius: f64,
    threshold: f64,
}

fn run_dual(
    v0: &DualState,
    problem: &DualProblem,
    opts: &DualOptions,
    recenter: Option<Recentering>,
) -> Result<(RealField, RealField, SolveReport)> {
    if !v0.v.grid().same_as(problem.grid()) {
        return Err(Error::GridMismatch);
    }
    if v0.p != problem.p() {
        return Err(Error::InvalidArgument("state and problem exponents differ".into()));
    }
    let mode = if recenter.is_some() { "periodic" } else { "dual" };
    let mut report = SolveReport::new(mode, problem, opts.tol);
    let g = *problem.grid();
    let v = v0.v.samples().to_vec();
    let u = problem.u_from_v(&v);
    let mut it = DualIter { problem, v, u };
    let qv: Vec<f64> = it.u.iter().zip(problem.q_root()).map(|(a, q)| a * q).collect();
    if !(problem.inner(&it.v, &qv) > 0.0) {
        report.status = SolveStatus::InvalidStart;
        report.message = "int v K v <= 0 at the seed".into();
        report.finish(problem, &it.u, &it.v);
        return Ok((v0.v.clone(), GridField::from_vec(g, it.u)?, report));
    }
    let pp = problem.conjugate();
    for k in 0..=opts.max_iter {
        if let Some(rc) = &recenter {
            if k % rc.block == 0 {
                let c = nonvanishing_detect(&GridField::from_vec(g, it.v.clone())?, rc.radius, pp)?;
                report.concentration.push(c);
                if c.zeta < rc.threshold * problem.power_integral(&it.v, pp) {
                    report.status = SolveStatus::Vanishing;
                    report.message = "vanishing sequence: no ball keeps a fixed share of the mass".into();
                    break;
                }
                // move the concentration to the nearest lattice point of the origin
                let si = -((c.center[0] - g.center()[0]).round() as i64) * rc.steps as i64;
                let sj = -((c.center[1] - g.center()[1]).round() as i64) * rc.steps as i64;
                if si != 0 || sj != 0 {
                    it.v = GridField::from_vec(g, it.v)?.shifted(si, sj).into_samples();
                    it.u = GridField::from_vec(g, it.u)?.shifted(si, sj).into_samples();
                }
            }
        }
        let Some(res) = it.step(opts.theta) else {
            report.status = SolveStatus::InvalidStart;
            report.message = "int w K w <= 0 during the iteration".into();
            break;
        };
        report.iterations = k;
        report.residual_history.push(res);
        if res <= opts.tol {
            report.status = SolveStatus::Converged;
            break;
        }
        if !res.is_finite() || report.diverging() {
            report.status = SolveStatus::Diverged;
            report.message = "residual grew tenfold over 50 iterations".into();
            break;
        }
        if k == opts.max_iter {
            report.message = format!("no convergence in {} iterations", opts.max_iter);
        }
    }
    // the last step advanced v past the residual that was recorded
    it.refresh();
    report.finish(problem, &it.u, &it.v);
    report.final_residual = problem.u_residual(&it.u);
    Ok((GridField::from_vec(g, it.v)?, GridField::from_vec(g, it.u)?, report))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicOptions {
    pub dual: DualOptions,
    /// Iterations between recentering passes.
    pub block: usize,
    /// Ball radius of the concentration test, in periods.
    pub radius: f64,
    /// Vanishing when the best ball holds less than this share of
    /// `||v||_{p'}^{p'}`.
    pub vanishing: f64,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions { dual: DualOptions::default(), block: 10, radius: 5.0, vanishing: 1e-6 }
    }
}

/// Dual iteration for a periodic weight, recentering the iterate on the
/// integer lattice after every block of steps.
pub fn periodic_solve(
    v0: &DualState,
    problem: &DualProblem,
    opts: &PeriodicOptions,
) -> Result<(RealField, RealField, SolveReport)> {
    let q = problem.coefficient();
    if q.class() != CoefficientClass::Periodic {
        return Err(Error::InvalidArgument("periodic solve needs a periodic weight".into()));
    }
    if !(problem.p() > 6.0) {
        return Err(Error::InvalidArgument("periodic solve needs p > 6".into()));
    }
    let steps =
        q.lattice_steps().ok_or_else(|| Error::Grid("grid is not commensurate with the unit lattice".into()))?;
    if opts.block == 0 {
        return Err(Error::InvalidArgument("recentering block must be positive".into()));
    }
    let rc = Recentering { steps, block: opts.block, radius: opts.radius, threshold: opts.vanishing };
    run_dual(v0, problem, &opts.dual, Some(rc))
}
