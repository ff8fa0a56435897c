use std::f64::consts::PI;

use num_complex::Complex64;

use wbl_core::quad::{integrate_with, plane_norm_sq_enclosure, truncation_tail, SingularPoint};
use wbl_core::{inner_product, integrate, weighted_norm_sq, Circle, Domain, QuadSettings, Weight};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one(_: Complex64) -> Complex64 {
    c(1.0, 0.0)
}

#[test]
fn closed_form_disc_integrals() {
    let d = Domain::unit_disc();
    let area = integrate(&d, one, &[], 1e-12).unwrap();
    assert!((area.value.re - PI).abs() < 1e-12);
    assert!(area.err >= 0.0);
    let inv = integrate(&d, |z: Complex64| c(1.0 / z.norm(), 0.0), &[c(0.0, 0.0)], 1e-10).unwrap();
    assert!((inv.value.re - 2.0 * PI).abs() < 1e-9);
    let s = QuadSettings::with_tol(1e-10);
    let g = |z: Complex64| c(z.norm().powf(-1.5), 0.0);
    let r = integrate_with(&d, &g, &[SingularPoint::known(c(0.0, 0.0), 1.5)], &[], &s).unwrap();
    assert!((r.value.re - 4.0 * PI).abs() < 1e-9);
}

#[test]
fn norms_and_products() {
    let d = Domain::unit_disc();
    let s = QuadSettings::with_tol(1e-11);
    for k in 0..6 {
        let n = weighted_norm_sq(&|z: Complex64| z.powu(k), &d, &Weight::Zero, &[], &s).unwrap();
        assert!((n.value - PI / (k as f64 + 1.0)).abs() < 1e-10, "k = {k}");
    }
    let lp = Weight::log_potential(vec![(c(0.0, 0.0), 1.5)]).unwrap();
    let n = weighted_norm_sq(&one, &d, &lp, &[], &s).unwrap();
    assert!((n.value - 4.0 * PI).abs() < 1e-9);

    let zz = inner_product(&|z: Complex64| z, &|z: Complex64| z * z, &d, &Weight::Zero, &[], &s).unwrap();
    assert!(zz.value.norm() < 1e-12);
    let z1 = inner_product(&|z: Complex64| z, &|z: Complex64| z, &d, &Weight::Zero, &[], &s).unwrap();
    assert!((z1.value - PI / 2.0).norm() < 1e-11);
    let pole = inner_product(&|z: Complex64| 1.0 / (z - 2.0), &one, &d, &Weight::Zero, &[c(2.0, 0.0)], &s).unwrap();
    assert!((pole.value - c(-PI / 2.0, 0.0)).norm() < 1e-10, "{}", pole.value);
}

/// `2π ∫_R^∞ r e^{-√r} dr = 4π e^{-u}(u^3 + 3u^2 + 6u + 6)` with `u = √R`.
fn tail_oracle(radius: f64) -> f64 {
    let u = radius.sqrt();
    4.0 * PI * (-u).exp() * (u * u * u + 3.0 * u * u + 6.0 * u + 6.0)
}

#[test]
fn truncation_tail_values() {
    let w = Weight::im_abs_plus_power(0.5).unwrap();
    let t0 = truncation_tail(&w, 0.0, 1.0, 0.0).unwrap();
    assert!((t0 - 24.0 * PI).abs() < 1e-9 * 24.0 * PI);
    let t2 = truncation_tail(&w, 0.0, 2.0, 0.0).unwrap();
    assert!((t2 - 2.0 * t0).abs() < 1e-12 * t2);
    let t40 = truncation_tail(&w, 40.0, 1.0, 1.0).unwrap();
    assert!((t40 - tail_oracle(40.0)).abs() < 1e-9 * t40, "{t40}");
    assert!(truncation_tail(&w, 40.0, 1.0, 1.5).is_err());
    assert!(truncation_tail(&Weight::Zero, 40.0, 1.0, 1.0).is_err());
}

#[test]
fn cos_half_enclosure() {
    let w = Weight::im_abs_plus_power(0.5).unwrap();
    let enc = plane_norm_sq_enclosure(&|z: Complex64| (z * 0.5).cos(), 40.0, &w, 1.0, 1.0, &QuadSettings::default()).unwrap();
    assert!(enc.lower <= enc.truncated.value && enc.truncated.value <= enc.upper);
    assert!((enc.tail - tail_oracle(40.0)).abs() < 1e-9 * enc.tail);
    // a bigger disc captures more mass but stays inside the enclosure
    let big = plane_norm_sq_enclosure(&|z: Complex64| (z * 0.5).cos(), 60.0, &w, 1.0, 1.0, &QuadSettings::default()).unwrap();
    assert!(big.truncated.value >= enc.truncated.value - enc.truncated.err);
    assert!(big.truncated.value <= enc.upper);
}

#[test]
fn additive_over_moon_split() {
    let outer = Domain::disc(c(0.0, 0.0), 2.0).unwrap();
    let moon = Domain::moon(Circle::new(c(0.0, 0.0), 2.0), Circle::new(c(1.3, 0.0), 0.7)).unwrap();
    let hole = Domain::disc(c(1.3, 0.0), 0.7).unwrap();
    let g = |z: Complex64| (z * z - 0.5 * z + 2.0).conj() * (1.0 + z.norm_sqr());
    let s = QuadSettings::with_tol(1e-10);
    let a = integrate_with(&outer, &g, &[], &[], &s).unwrap();
    let b = integrate_with(&moon, &g, &[], &[], &s).unwrap();
    let h = integrate_with(&hole, &g, &[], &[], &s).unwrap();
    assert!((a.value - b.value - h.value).norm() <= a.err + b.err + h.err + 1e-12 * a.value.norm());
    // monotone for a nonnegative integrand
    let pos = |z: Complex64| c(z.norm_sqr(), 0.0);
    let big = integrate_with(&outer, &pos, &[], &[], &s).unwrap();
    let small = integrate_with(&moon, &pos, &[], &[], &s).unwrap();
    assert!(big.value.re >= small.value.re - big.err - small.err);
}

#[test]
fn tighter_tolerance_never_hurts() {
    let d = Domain::unit_disc();
    let g = |z: Complex64| c(z.norm().powf(-1.5), 0.0);
    let mut last = f64::INFINITY;
    for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
        let r = integrate(&d, g, &[c(0.0, 0.0)], tol).unwrap();
        let e = (r.value.re - 4.0 * PI).abs();
        assert!(e <= last.max(1e-12), "tol {tol}: {e} > {last}");
        last = e;
    }
}

#[test]
fn bitwise_reproducible() {
    let moon = Domain::moon(Circle::new(c(0.0, 0.0), 1.0), Circle::new(c(0.45, 0.0), 0.55)).unwrap();
    let g = |z: Complex64| c(1.0 / z.norm(), 0.0) * (z * 3.0).sin();
    let a = integrate(&moon, g, &[c(0.0, 0.0)], 1e-10).unwrap();
    for _ in 0..3 {
        let b = integrate(&moon, g, &[c(0.0, 0.0)], 1e-10).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.err.to_bits(), b.err.to_bits());
    }
}

#[test]
fn non_integrable_points_are_reported() {
    let d = Domain::unit_disc();
    let g = |z: Complex64| c(z.norm().powf(-2.2), 0.0);
    assert!(integrate(&d, g, &[c(0.0, 0.0)], 1e-6).is_err());
}
