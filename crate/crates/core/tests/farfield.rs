use std::f64::consts::PI;

use hf2d::farfield::{
    annulus_error, cesaro_error, compare_routes, decay_fit, hat_on_circle, predict_farfield, radial_trace, sector_fit,
    FarFieldTrace,
};
use hf2d::field::{Grid, GridField, RealField};
use hf2d::resolvent::{RealOperator, Resolvent};
use hf2d::Complex64;

fn gaussian(g: Grid) -> RealField {
    RealField::from_fn(g, |x, y| (-0.5 * (x * x + y * y)).exp())
}

#[test]
fn gaussian_trace_is_constant() {
    let g = Grid::new(64, 0.25).unwrap();
    let t = hat_on_circle(&gaussian(g), 32).unwrap();
    let want = (-0.5f64).exp();
    for v in &t.values {
        assert!((v - Complex64::new(want, 0.0)).norm() < 1e-12);
    }
    assert!(t.conjugate_symmetry_defect() < 1e-14);
}

#[test]
fn shifted_source_picks_up_a_phase() {
    let g = Grid::new(64, 0.25).unwrap();
    let f = RealField::from_fn(g, |x, y| (-0.5 * ((x - 1.0).powi(2) + y * y)).exp());
    let t = hat_on_circle(&f, 16).unwrap();
    for (th, v) in t.angles.iter().zip(&t.values) {
        let want = Complex64::from_polar((-0.5f64).exp(), -th.cos());
        assert!((v - want).norm() < 1e-10, "{th}: {v} vs {want}");
    }
}

#[test]
fn interpolation_is_periodic() {
    let t = FarFieldTrace {
        angles: (0..4).map(|k| k as f64 * PI / 2.0).collect(),
        values: vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ],
    };
    assert!((t.value_at(7.0 * PI / 4.0).re - 2.5).abs() < 1e-12);
    assert!((t.value_at(-PI / 4.0).re - 2.5).abs() < 1e-12);
    assert!((t.value_at(PI / 4.0).re - 1.5).abs() < 1e-12);
}

#[test]
fn prediction_of_a_plain_hankel_wave() {
    // a constant real trace gives sqrt(pi/2) r^{-1/2} cos(r + pi/4)
    let t = radial_trace(1.0, 8);
    let r: f64 = 400.0;
    let p = predict_farfield(&t, [r, 0.0]).unwrap();
    let want = (PI / 2.0).sqrt() / r.sqrt() * (r + PI / 4.0).cos();
    assert!((p - want).abs() < 1e-14);
}

#[test]
fn linear_far_field_errors_shrink() {
    let g = Grid::new(512, 2.0 * PI / 16.0).unwrap();
    let f = gaussian(g);
    let u = RealField::from_vec(g, Resolvent::new(g).unwrap().apply_real(f.samples())).unwrap();
    let t = hat_on_circle(&f, 32).unwrap();
    let e1 = annulus_error(&u, &t, 10.0, 20.0).unwrap();
    let e2 = annulus_error(&u, &t, 40.0, 60.0).unwrap();
    assert!(e2.sup < e1.sup);
    assert!(e2.sup < 0.01);
    let ces = cesaro_error(&u, &t, &[5.0, 10.0, 20.0, 40.0]).unwrap();
    assert!(ces.windows(2).all(|w| w[1].1 < w[0].1), "{ces:?}");
    let fit = decay_fit(&u, [10.0, 80.0]).unwrap();
    assert!((fit.exponent + 0.5).abs() < 0.05, "{}", fit.exponent);
    let fits = sector_fit(&u, 40.0, 75.0, 8).unwrap();
    let c = compare_routes(&t, &fits);
    assert!(c.amplitude < 0.01 && c.phase < 0.01, "{c:?}");
}

#[test]
fn empty_annulus_is_an_error() {
    let g = Grid::new(32, 0.5).unwrap();
    let u = GridField::zeros(g);
    let t = radial_trace(1.0, 8);
    assert!(annulus_error(&u, &t, 100.0, 120.0).is_err());
}
