//! Dual formulation of `u = **R**(Q|u|^{p-2}u)`.
//!
//! With `K v = Q^{1/p} **R**(Q^{1/p} v)` the functional
//! `J(v) = (1/p') int |v|^{p'} - (1/2) int v K v` has critical points exactly
//! at solutions of `|v|^{p'-2} v = K v`, and `u = **R**(Q^{1/p} v)` then solves
//! the original equation.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Grid, GridField, RealField};
use crate::par;
use crate::resolvent::{smoothstep, weight_root, RealOperator, WeightedOperator};

mod detect;
mod solve;
mod subspace;

pub use detect::{find_density_point, nonvanishing_detect, Concentration};
pub use solve::{
    dual_power_iterate, fixed_point_solve, periodic_solve, DualOptions, FixedPointOptions, PeriodicOptions,
    SolveReport, SolveStatus,
};
pub use subspace::{build_positive_subspace, psi_inner, psi_outer, SubspaceConstruction};

/// Closed-form description of a weight `Q`, enough to resample it on any grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QDescriptor {
    /// `q0 exp(-|x|^2 / width^2)`.
    Gaussian { q0: f64, width: f64 },
    /// `1 + q1 cos(2 pi x1) cos(2 pi x2)` with `0 <= q1 < 1`.
    CosineLattice { q1: f64 },
    /// `q0` on `|x| <= radius`, falling smoothly to 0 at `radius + edge`.
    Disc { q0: f64, radius: f64, edge: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientClass {
    Decaying,
    /// Periodic under integer translations in both coordinates.
    Periodic,
    CompactlySupported,
}

impl QDescriptor {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            QDescriptor::Gaussian { q0, width } => q0 >= 0.0 && q0.is_finite() && width > 0.0,
            QDescriptor::CosineLattice { q1 } => (0.0..1.0).contains(&q1),
            QDescriptor::Disc { q0, radius, edge } => q0 >= 0.0 && q0.is_finite() && radius > 0.0 && edge > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid weight parameters: {self:?}")))
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match *self {
            QDescriptor::Gaussian { q0, width } => q0 * (-(x[0] * x[0] + x[1] * x[1]) / (width * width)).exp(),
            QDescriptor::CosineLattice { q1 } => 1.0 + q1 * (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).cos(),
            QDescriptor::Disc { q0, radius, edge } => q0 * (1.0 - smoothstep(2, (x[0].hypot(x[1]) - radius) / edge)),
        }
    }

    pub fn class(&self) -> CoefficientClass {
        match self {
            QDescriptor::Gaussian { .. } => CoefficientClass::Decaying,
            QDescriptor::CosineLattice { .. } => CoefficientClass::Periodic,
            QDescriptor::Disc { .. } => CoefficientClass::CompactlySupported,
        }
    }

    /// Radial profile `Q(r)`, for radially symmetric weights.
    pub fn radial(&self) -> Option<impl Fn(f64) -> f64 + Copy + Send + Sync> {
        match self {
            QDescriptor::CosineLattice { .. } => None,
            _ => {
                let d = *self;
                Some(move |r: f64| d.eval([r, 0.0]))
            }
        }
    }
}

/// Weight samples on a grid together with their descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    samples: RealField,
    descriptor: QDescriptor,
}

impl Coefficient {
    pub fn sample(descriptor: QDescriptor, grid: &Grid) -> Result<Self> {
        descriptor.validate()?;
        let samples = RealField::from_fn(*grid, |x, y| descriptor.eval([x, y]));
        Ok(Coefficient { samples, descriptor })
    }

    /// Wraps existing samples; they must be non-negative.
    pub fn from_samples(samples: RealField, descriptor: QDescriptor) -> Result<Self> {
        if let Some(k) = samples.samples().iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidArgument(format!("negative weight sample at index {k}")));
        }
        Ok(Coefficient { samples, descriptor })
    }

    pub fn samples(&self) -> &RealField {
        &self.samples
    }

    pub fn descriptor(&self) -> &QDescriptor {
        &self.descriptor
    }

    pub fn class(&self) -> CoefficientClass {
        self.descriptor.class()
    }

    pub fn grid(&self) -> &Grid {
        self.samples.grid()
    }

    /// For periodic weights: whether integer translations are grid shifts of
    /// the torus, i.e. `1/h` and `L` are integers.
    pub fn lattice_steps(&self) -> Option<usize> {
        let g = self.grid();
        let per = 1.0 / g.h();
        let steps = per.round();
        let cells = g.side().round();
        if (per - steps).abs() < 1e-9 && (g.side() - cells).abs() < 1e-9 && steps >= 1.0 {
            Some(steps as usize)
        } else {
            None
        }
    }
}

/// Real dual variable with its exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct DualState {
    pub v: RealField,
    pub p: f64,
}

impl DualState {
    pub fn new(v: RealField, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(DualState { v, p })
    }

    /// `p' = p/(p-1)`.
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 6.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent must be >= 6, got {p}")))
    }
}

/// `sign(x) |x|^e`.
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    x.abs().powf(e).copysign(x)
}

/// Operator, weight and exponent of one dual problem.
pub struct DualProblem<'a> {
    op: &'a dyn RealOperator,
    q: &'a Coefficient,
    p: f64,
    q_root: Vec<f64>,
}

impl<'a> DualProblem<'a> {
    pub fn new(op: &'a dyn RealOperator, q: &'a Coefficient, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if !q.grid().same_as(op.grid()) {
            return Err(Error::GridMismatch);
        }
        let q_root = weight_root(q.samples(), p)?;
        Ok(DualProblem { op, q, p, q_root })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn grid(&self) -> &Grid {
        self.op.grid()
    }

    pub fn coefficient(&self) -> &Coefficient {
        self.q
    }

    pub fn operator(&self) -> &dyn RealOperator {
        self.op
    }

    pub(crate) fn q_root(&self) -> &[f64] {
        &self.q_root
    }

    pub fn k(&self, v: &[f64]) -> Vec<f64> {
        WeightedOperator::new(self.op, &self.q_root).expect("shapes checked at construction").apply(v)
    }

    /// `h^2 sum a b`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid().cell() * par::sum_by_rows(a.len(), self.grid().n(), |k| a[k] * b[k])
    }

    /// `h^2 sum |a|^s`.
    pub fn power_integral(&self, a: &[f64], s: f64) -> f64 {
        self.grid().cell() * par::sum_by_rows(a.len(), self.grid().n(), |k| a[k].abs().powf(s))
    }

    pub fn norm(&self, a: &[f64], s: f64) -> f64 {
        self.power_integral(a, s).powf(1.0 / s)
    }

    /// `J(v)`.
    pub fn j(&self, v: &[f64]) -> f64 {
        let pp = self.conjugate();
        let kv = self.k(v);
        self.power_integral(v, pp) / pp - 0.5 * self.inner(v, &kv)
    }

    /// `|v|^{p'-2} v - K v`.
    pub fn grad_j(&self, v: &[f64]) -> Vec<f64> {
        let e = self.conjugate() - 1.0;
        let kv = self.k(v);
        v.iter().zip(kv).map(|(&a, b)| signed_pow(a, e) - b).collect()
    }

    /// `u = **R**(Q^{1/p} v)`.
    pub fn u_from_v(&self, v: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = v.iter().zip(&self.q_root).map(|(a, q)| a * q).collect();
        self.op.apply_real(&w)
    }

    /// `v = Q^{1/p'} |u|^{p-2} u`.
    pub fn v_from_u(&self, u: &[f64]) -> Vec<f64> {
        let e = 1.0 / self.conjugate();
        u.iter().zip(self.q.samples().samples()).map(|(&a, &q)| q.powf(e) * signed_pow(a, self.p - 1.0)).collect()
    }

    /// `Q |u|^{p-2} u`.
    pub fn nonlinearity(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(self.q.samples().samples()).map(|(&a, &q)| q * signed_pow(a, self.p - 1.0)).collect()
    }

    /// `T(u) = **R**(Q |u|^{p-2} u)`.
    pub fn fixed_point_map(&self, u: &[f64]) -> Vec<f64> {
        self.op.apply_real(&self.nonlinearity(u))
    }

    /// `||u - T(u)||_p / ||u||_p`; 0 for `u = 0`.
    pub fn u_residual(&self, u: &[f64]) -> f64 {
        let t = self.fixed_point_map(u);
        self.relative_residual(u, &t)
    }

    pub(crate) fn relative_residual(&self, u: &[f64], t: &[f64]) -> f64 {
        let nu = self.norm(u, self.p);
        if nu == 0.0 {
            return 0.0;
        }
        let d: Vec<f64> = u.iter().zip(t).map(|(a, b)| a - b).collect();
        self.norm(&d, self.p) / nu
    }

    /// `|1 - int v K v / ||v||_{p'}^{p'}|`.
    pub fn euler_defect(&self, v: &[f64]) -> f64 {
        let kv = self.k(v);
        let a = self.power_integral(v, self.conjugate());
        (1.0 - self.inner(v, &kv) / a).abs()
    }

    /// `(1/p' - 1/2) ||v||_{p'}^{p'}`, the critical value at a solution.
    pub fn critical_level(&self, v: &[f64]) -> f64 {
        let pp = self.conjugate();
        (1.0 / pp - 0.5) * self.power_integral(v, pp)
    }
}

/// `J(v)` for a state on the problem's grid.
pub fn eval_j(state: &DualState, problem: &DualProblem) -> Result<f64> {
    check_state(state, problem)?;
    Ok(problem.j(state.v.samples()))
}

/// L2 representative of `J'(v)`.
pub fn eval_grad_j(state: &DualState, problem: &DualProblem) -> Result<RealField> {
    check_state(state, problem)?;
    GridField::from_vec(*problem.grid(), problem.grad_j(state.v.samples()))
}

fn check_state(state: &DualState, problem: &DualProblem) -> Result<()> {
    if !state.v.grid().same_as(problem.grid()) {
        return Err(Error::GridMismatch);
    }
    if (state.p - problem.p).abs() > 0.0 {
        return Err(Error::InvalidArgument("state and problem exponents differ".into()));
    }
    Ok(())
}
