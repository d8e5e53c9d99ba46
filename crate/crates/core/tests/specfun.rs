#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;
use std::path::PathBuf;

use hf2d::specfun::{
    bessel_j0_y0, bessel_j1_y1, check_phi_bound, eval_phi, eval_re_phi, phi_origin_sample, PHI_FAR_AMPLITUDE,
};
use proptest::prelude::*;

// mpmath, 30 digits
const ORDER_ONE: [(f64, f64, f64); 6] = [
    (0.5, 0.242_268_457_674_873_89, -1.471_472_392_670_243_1),
    (1.0, 0.440_050_585_744_933_52, -0.781_212_821_300_288_72),
    (3.0, 0.339_058_958_525_936_46, 0.324_674_424_791_799_98),
    (10.0, 0.043_472_746_168_861_437, 0.249_015_424_206_953_88),
    (25.0, -0.125_350_249_580_289_9, -0.098_829_964_783_237_41),
    (100.0, -0.077_145_352_014_112_158, -0.020_372_312_002_759_793),
];

#[test]
fn order_one_matches_reference() {
    for (r, j, y) in ORDER_ONE {
        let (a, b) = bessel_j1_y1(r).unwrap();
        assert!((a - j).abs() <= 1e-12, "J1({r}) = {a}");
        assert!((b - y).abs() <= 1e-12, "Y1({r}) = {b}");
    }
}

#[test]
fn phi_matches_reference_table() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/hankel0_ref.csv");
    let text = std::fs::read_to_string(path).unwrap();
    let mut worst: f64 = 0.0;
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (r, j, y) = (v[0], v[1], v[2]);
        let want = hf2d::Complex64::new(-0.25 * y, 0.25 * j);
        worst = worst.max((eval_phi(r).unwrap() - want).norm() / want.norm());
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn far_amplitude() {
    let r: f64 = 1e3;
    let v = r.sqrt() * eval_phi(r).unwrap().norm();
    assert!((v / PHI_FAR_AMPLITUDE - 1.0).abs() < 1e-3);
    assert!((PHI_FAR_AMPLITUDE - 1.0 / (2.0 * (2.0 * PI).sqrt())).abs() < 1e-16);
}

#[test]
fn origin_sample_has_quarter_imaginary_part() {
    let s = phi_origin_sample(0.1);
    assert_eq!(s.im, 0.25);
    // the origin sample grows like -ln(h)/(2 pi)
    let d = phi_origin_sample(0.05).re - s.re;
    assert!((d - 2f64.ln() / (2.0 * PI)).abs() < 1e-14);
}

#[test]
fn bound_ratio_is_finite() {
    let radii: Vec<f64> = (0..400).map(|k| 10f64.powf(-4.0 + k as f64 / 50.0)).collect();
    let c = check_phi_bound(&radii).unwrap();
    assert!(c > 0.1 && c < 1.0, "{c}");
    assert!(check_phi_bound(&[0.0]).is_err());
}

proptest! {
    #[test]
    fn wronskian(r in 1e-3f64..1e3) {
        let (j0, y0) = bessel_j0_y0(r).unwrap();
        let (j1, y1) = bessel_j1_y1(r).unwrap();
        let w = j1 * y0 - j0 * y1;
        let want = 2.0 / (PI * r);
        prop_assert!((w - want).abs() <= 1e-11 * want.max(1.0), "r = {}", r);
    }

    #[test]
    fn real_part_is_minus_quarter_y0(r in 1e-4f64..1e4) {
        let (_, y0) = bessel_j0_y0(r).unwrap();
        prop_assert_eq!(eval_re_phi(r).unwrap(), -0.25 * y0);
    }
}
