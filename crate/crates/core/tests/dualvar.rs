use std::f64::consts::PI;

use hf2d::dualvar::{
    build_positive_subspace, dual_power_iterate, eval_grad_j, eval_j, find_density_point, fixed_point_solve,
    nonvanishing_detect, periodic_solve, psi_inner, psi_outer, Coefficient, CoefficientClass, DualOptions, DualProblem,
    DualState, FixedPointOptions, PeriodicOptions, QDescriptor, SolveStatus,
};
use hf2d::field::{Grid, RealField};
use hf2d::resolvent::{Resolvent, TorusResolvent};
use hf2d::Error;

const GAUSS: QDescriptor = QDescriptor::Gaussian { q0: 2.0, width: 1.0 };

fn small() -> (Grid, Coefficient, Resolvent) {
    let g = Grid::new(128, 2.0 * PI / 16.0).unwrap();
    let q = Coefficient::sample(GAUSS, &g).unwrap();
    (g, q, Resolvent::new(g).unwrap())
}

fn bump(g: Grid, c: [f64; 2], w2: f64) -> RealField {
    RealField::from_fn(g, |x, y| (-((x - c[0]).powi(2) + (y - c[1]).powi(2)) / w2).exp())
}

#[test]
fn descriptors_round_trip_through_json() {
    let all = [GAUSS, QDescriptor::CosineLattice { q1: 0.5 }, QDescriptor::Disc { q0: 1.0, radius: 2.0, edge: 0.5 }];
    for d in all {
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<QDescriptor>(&s).unwrap(), d);
    }
    assert!(serde_json::to_string(&all[1]).unwrap().contains("\"kind\":\"cosine-lattice\""));
    assert_eq!(all[0].class(), CoefficientClass::Decaying);
    assert_eq!(all[2].class(), CoefficientClass::CompactlySupported);
    assert!(QDescriptor::CosineLattice { q1: 1.0 }.validate().is_err());
    assert!(QDescriptor::Gaussian { q0: -1.0, width: 1.0 }.validate().is_err());
}

#[test]
fn exponent_below_six_is_rejected() {
    let (g, q, op) = small();
    assert!(DualProblem::new(&op, &q, 5.0).is_err());
    assert!(DualState::new(bump(g, [0.0, 0.0], 1.0), 4.0).is_err());
    let other = Coefficient::sample(GAUSS, &Grid::new(64, 0.3).unwrap()).unwrap();
    assert!(matches!(DualProblem::new(&op, &other, 6.0), Err(Error::GridMismatch)));
}

#[test]
fn functional_is_even_and_gradient_is_consistent() {
    let (g, q, op) = small();
    let pr = DualProblem::new(&op, &q, 6.0).unwrap();
    let v = DualState::new(bump(g, [0.3, 0.0], 1.0), 6.0).unwrap();
    let minus = DualState::new(v.v.map(|a: f64| -a), 6.0).unwrap();
    assert_eq!(eval_j(&v, &pr).unwrap(), eval_j(&minus, &pr).unwrap());
    let grad = eval_grad_j(&v, &pr).unwrap();
    let d = bump(g, [-0.5, 0.4], 0.5);
    let exact = pr.inner(grad.samples(), d.samples());
    let fd = |e: f64| {
        let p: Vec<f64> = v.v.samples().iter().zip(d.samples()).map(|(a, b)| a + e * b).collect();
        let m: Vec<f64> = v.v.samples().iter().zip(d.samples()).map(|(a, b)| a - e * b).collect();
        ((pr.j(&p) - pr.j(&m)) / (2.0 * e) - exact).abs()
    };
    let (e1, e2) = (fd(1e-2), fd(1e-3));
    assert!(e1 / e2 > 50.0, "{e1:e} {e2:e}");
}

#[test]
fn dual_iteration_satisfies_euler_identity() {
    let (g, q, op) = small();
    let pr = DualProblem::new(&op, &q, 6.0).unwrap();
    let v0 = DualState::new(bump(g, [0.0, 0.0], 0.18), 6.0).unwrap();
    let (v, u, rep) = dual_power_iterate(&v0, &pr, &DualOptions::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::Converged, "{}", rep.message);
    assert!(rep.euler_defect < 1e-6);
    assert!(pr.critical_level(v.samples()) > 0.0);
    assert!(pr.u_residual(u.samples()) < 1e-6);
}

#[test]
fn dual_iteration_rejects_negative_start() {
    let (g, q, op) = small();
    let pr = DualProblem::new(&op, &q, 6.0).unwrap();
    // Re Phi < 0 between r = 0.89 and 3.96, so a ring there starts below zero
    let ring = RealField::from_fn(g, |x, y| (-(x.hypot(y) - 2.4).powi(2) / 0.02).exp());
    let v0 = DualState::new(ring, 6.0).unwrap();
    let (_, _, rep) = dual_power_iterate(&v0, &pr, &DualOptions::default()).unwrap();
    assert_eq!(rep.status, SolveStatus::InvalidStart);
}

#[test]
fn fixed_point_solution_satisfies_euler_identity() {
    let (g, q, op) = small();
    let pr = DualProblem::new(&op, &q, 6.0).unwrap();
    let u0 = bump(g, [0.0, 0.0], 2.0).scaled(2.0);
    let opts = FixedPointOptions { tol: 1e-8, ..Default::default() };
    let (u, rep) = fixed_point_solve(&u0, &pr, &opts).unwrap();
    assert!(rep.converged(), "{}", rep.message);
    assert!(pr.u_residual(u.samples()) < 1e-7);
    let v = pr.v_from_u(u.samples());
    assert!(pr.euler_defect(&v) < 1e-6);
    // zero is a trivial fixed point
    let (_, z) = fixed_point_solve(&RealField::zeros(g), &pr, &opts).unwrap();
    assert_eq!(z.status, SolveStatus::Trivial);
}

#[test]
fn impossible_tolerance_does_not_converge() {
    let (g, q, op) = small();
    let pr = DualProblem::new(&op, &q, 6.0).unwrap();
    let u0 = bump(g, [0.0, 0.0], 2.0).scaled(2.0);
    let opts = FixedPointOptions { tol: 0.0, max_iter: 15, ..Default::default() };
    let (_, rep) = fixed_point_solve(&u0, &pr, &opts).unwrap();
    assert!(!rep.converged());
    assert_eq!(rep.residual_history.len(), 16);
}

#[test]
fn periodic_solve_recenters_and_converges() {
    let g = Grid::new(128, 1.0 / 8.0).unwrap();
    let q = Coefficient::sample(QDescriptor::CosineLattice { q1: 0.5 }, &g).unwrap();
    assert_eq!(q.lattice_steps(), Some(8));
    let op = TorusResolvent::new(g).unwrap();
    let pr = DualProblem::new(&op, &q, 8.0).unwrap();
    // start off-center so the first recentering moves the iterate
    let v0 = DualState::new(bump(g, [3.0, -2.0], 0.08), 8.0).unwrap();
    let opts = PeriodicOptions { dual: DualOptions { tol: 1e-6, ..Default::default() }, ..Default::default() };
    let (v, _, rep) = periodic_solve(&v0, &pr, &opts).unwrap();
    assert!(rep.converged(), "{}", rep.message);
    let c = nonvanishing_detect(&v, 2.0, pr.conjugate()).unwrap();
    assert!(c.center[0].abs() <= 0.5 && c.center[1].abs() <= 0.5, "{:?}", c.center);
    let j = pr.j(v.samples());
    let moved = v.shifted(16, 40);
    assert!((pr.j(moved.samples()) - j).abs() <= 1e-12 * j.abs());
}

#[test]
fn periodic_solve_needs_a_lattice_weight() {
    let (g, q, op) = small();
    let pr = DualProblem::new(&op, &q, 8.0).unwrap();
    let v0 = DualState::new(bump(g, [0.0, 0.0], 0.1), 8.0).unwrap();
    assert!(periodic_solve(&v0, &pr, &PeriodicOptions::default()).is_err());
}

#[test]
fn concentration_finds_the_bump() {
    let g = Grid::new(64, 0.25).unwrap();
    let v = bump(g, [2.0, -1.5], 0.3);
    let c = nonvanishing_detect(&v, 1.0, 1.2).unwrap();
    assert_eq!(c.center, [2.0, -1.5]);
    assert!(c.zeta > 0.0);
    assert!(nonvanishing_detect(&v, 0.1, 1.2).is_err());
}

#[test]
fn density_point_of_a_disc() {
    let g = Grid::new(64, 0.25).unwrap();
    let q = Coefficient::sample(QDescriptor::Disc { q0: 1.0, radius: 1.5, edge: 0.5 }, &g).unwrap();
    assert_eq!(find_density_point(&q, 0.9).unwrap(), [0.0, 0.0]);
    assert!(find_density_point(&q, 6.0).is_err());
}

#[test]
fn bump_subspaces_are_positive() {
    let g = Grid::new(64, 2.0 * PI / 16.0).unwrap();
    let q = Coefficient::sample(GAUSS, &g).unwrap();
    for m in 1..=3 {
        let s = build_positive_subspace(&q, 6.0, m, 0.9, None).unwrap();
        assert_eq!(s.centers.len(), m);
        assert!(s.psi_inequality());
        assert!(s.min_eigenvalue > 0.0);
        for i in 0..m {
            for j in 0..i {
                let d = (s.centers[i][0] - s.centers[j][0]).hypot(s.centers[i][1] - s.centers[j][1]);
                assert!(d >= s.sigma + 2.0 * s.tau);
            }
        }
    }
    assert!(build_positive_subspace(&q, 6.0, 0, 0.9, None).is_err());
    assert!(build_positive_subspace(&q, 6.0, 2, 1.5, None).is_err());
}

#[test]
fn psi_envelopes() {
    // Re Phi = -Y0/4 grows like -ln(r)/(2 pi) at the origin
    assert!(psi_inner(1e-3).unwrap() > psi_inner(1e-2).unwrap());
    assert!(psi_outer(0.1).unwrap() > psi_outer(1.0).unwrap());
}
