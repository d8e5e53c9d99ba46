use std::f64::consts::{FRAC_PI_4, PI};

use hf2d::radial::{
    integrate_radial, integrate_radial_with, match_samples, phase_defect, shoot_solve, MatchBasis, RadialOptions,
    ShootOptions,
};
use hf2d::specfun::bessel_j0_y0;

fn q_gauss(r: f64) -> f64 {
    2.0 * (-r * r).exp()
}

// central amplitude of the phase-locked p = 6 profile for Q = 2 e^{-r^2},
// from an independent shooting code (scipy, DOP853, rtol 1e-12)
const A_STAR: f64 = 1.968_013_388_380_122;

#[test]
fn free_profile_is_j0() {
    let prof = integrate_radial(0.7, &|_| 0.0, 6.0, 40.0).unwrap();
    for &r in &[0.5, 3.0, 11.0, 27.5, 40.0] {
        let (j0, _) = bessel_j0_y0(r).unwrap();
        assert!((prof.u_at(r).unwrap() - 0.7 * j0).abs() < 1e-8, "r = {r}");
    }
    assert_eq!(prof.circle_transform(), 0.0);
}

#[test]
fn shooting_finds_the_locked_amplitude() {
    let res = shoot_solve(&q_gauss, 6.0, [1.9, 2.0], 60.0, &ShootOptions::for_radius(60.0)).unwrap();
    assert!((res.a - A_STAR).abs() < 1e-7, "{}", res.a);
    assert!(res.phase_defect < 1e-8);
    assert!(res.amplitude_defect < 1e-6);
    // the far-field amplitude equals sqrt(pi/2) times the circle transform
    assert!((res.amplitude - (PI / 2.0).sqrt() * res.circle_transform).abs() < 1e-6);
}

#[test]
fn matching_radius_barely_moves_the_root() {
    let a = shoot_solve(&q_gauss, 6.0, [1.9, 2.0], 60.0, &ShootOptions::for_radius(60.0)).unwrap().a;
    let b = shoot_solve(&q_gauss, 6.0, [1.9, 2.0], 160.0, &ShootOptions::for_radius(160.0)).unwrap().a;
    assert!((a - b).abs() < 1e-7);
}

#[test]
fn bracket_without_root_fails_with_scan() {
    let err = shoot_solve(&q_gauss, 6.0, [1.0, 1.2], 60.0, &ShootOptions::for_radius(60.0)).unwrap_err();
    assert_eq!(err.scan.len(), 5);
    assert!(!err.message.is_empty());
}

#[test]
fn matching_recovers_phase_of_free_waves() {
    for &theta in &[0.0, FRAC_PI_4, 1.0, -2.0] {
        let f = |r: f64| 1.3 * (r + theta).cos() / r.sqrt();
        let m = match_samples(f, [300.0, 340.0], MatchBasis::Plain).unwrap();
        assert!((m.amplitude - 1.3).abs() < 1e-12);
        assert!(phase_defect(m.phase) - phase_defect(theta) < 1e-12);
    }
    // Y0 is a pure free wave with phase -pi/4 - pi/2, so the Hankel basis fits it exactly
    let y = |r: f64| bessel_j0_y0(r).unwrap().1;
    let m = match_samples(y, [20.0, 40.0], MatchBasis::Hankel).unwrap();
    assert!(m.residual < 1e-10);
    assert!(match_samples(y, [20.0, 25.0], MatchBasis::Hankel).is_err());
}

#[test]
fn phase_defect_is_mod_pi() {
    assert!(phase_defect(FRAC_PI_4) < 1e-15);
    assert!(phase_defect(FRAC_PI_4 + PI) < 1e-15);
    assert!(phase_defect(FRAC_PI_4 - PI) < 1e-15);
    assert!((phase_defect(FRAC_PI_4 + 0.3) - 0.3).abs() < 1e-15);
}

#[test]
fn blow_up_is_reported() {
    let opts = RadialOptions { blow_up: 1.5, ..RadialOptions::default() };
    let prof = integrate_radial_with(2.0, &q_gauss, 6.0, 30.0, &opts).unwrap();
    assert!(prof.blow_up.is_some());
    assert!(prof.match_asymptotics([10.0, 30.0], MatchBasis::Hankel).is_err());
}
