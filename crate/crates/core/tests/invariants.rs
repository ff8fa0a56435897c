use num_complex::Complex64;
use proptest::prelude::*;

use wbl_core::bergman::{best_poly_approx, best_poly_approx_with_jet, BergmanSettings, Frame, Target};
use wbl_core::certs::{c1_constant, nondensity_certificate, poisson_extension, potential_mass_bound};
use wbl_core::moon::{parity_split, BranchSpec};
use wbl_core::weights::poly_bump_weight;
use wbl_core::{weighted_norm_sq, Circle, Domain, Polynomial, QuadSettings, Weight};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small_moon() -> Domain {
    Domain::moon(Circle::new(c(0.0, 0.0), 1.0), Circle::new(c(0.45, 0.0), 0.55)).unwrap()
}

fn coeffs(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b)), 1..=max)
}

fn point() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_split_recombines(cs in coeffs(9), w in point()) {
        let p = Polynomial::from_taylor(c(0.0, 0.0), cs.clone());
        let (even, odd) = parity_split(&p);
        let lhs = p.eval(w);
        let rhs = even.eval(w * w) + w * odd.eval(w * w);
        let scale: f64 = cs.iter().map(|a| a.norm()).sum::<f64>() * (1.0 + w.norm()).powi(cs.len() as i32);
        prop_assert!(close(lhs, rhs, scale));
    }

    #[test]
    fn branch_sqrt_squares_back(r in 0.01..10.0f64, t in -3.1..3.1f64) {
        let spec = BranchSpec::new(&small_moon(), None).unwrap();
        let z = Complex64::from_polar(r, t);
        let s = spec.sqrt(z);
        prop_assert!((s * s - z).norm() <= 1e-12 * r);
        // the argument of the root stays inside half the window
        let (lo, hi) = spec.window();
        let mut a = s.arg();
        while a <= 0.5 * lo { a += std::f64::consts::PI; }
        prop_assert!(a <= 0.5 * hi + 1e-12);
    }

    #[test]
    fn rebase_keeps_values(cs in coeffs(7), center in point(), scale in 0.2..3.0f64, w in point()) {
        let p = Polynomial::from_taylor(c(0.3, -0.1), cs.clone());
        let q = p.rebase(center, scale);
        let size: f64 = cs.iter().map(|a| a.norm()).sum::<f64>() * (2.0 + w.norm() + center.norm()).powi(cs.len() as i32);
        prop_assert!(close(p.eval(w), q.eval(w), size));
    }

    #[test]
    fn weight_sum_adds(z in point(), a in 0.1..1.5f64, b in 0.1..1.5f64) {
        let u = Weight::log_potential(vec![(c(0.3, 0.2), a)]).unwrap();
        let v = Weight::im_abs_plus_power(0.5).unwrap();
        let s = Weight::sum(vec![u.clone(), v.clone()]);
        prop_assume!((z - c(0.3, 0.2)).norm() > 1e-6);
        prop_assert!((s.evaluate(z) - u.evaluate(z) - v.evaluate(z)).abs() <= 1e-12 * (1.0 + s.evaluate(z).abs()));
        let w = Weight::log_potential(vec![(c(0.0, 0.0), a), (c(0.5, 0.5), b)]).unwrap();
        let mut prev = 0.0;
        for r in [0.1, 0.5, 0.8, 1.0, 2.0] {
            let m = w.mass_on_disc(z, r).unwrap();
            prop_assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn poly_bump_is_nonnegative(cs in coeffs(4), z in point(), amp in 0.1..10.0f64) {
        let w = poly_bump_weight(Polynomial::from_taylor(c(0.0, 0.0), cs), 1.0, amp).unwrap();
        prop_assert!(w.evaluate(z) >= 0.0);
    }

    #[test]
    fn poisson_scales_homogeneously(p in 0.2..0.8f64, lambda in 0.1..10.0f64) {
        let one = poisson_extension(p, 0.0, 1.0, 1e-11).unwrap();
        let scaled = poisson_extension(p, 0.0, lambda, 1e-11).unwrap();
        prop_assert!((scaled - lambda.powf(p) * one).abs() <= 1e-8 * scaled);
    }

    #[test]
    fn poisson_sandwich(p in 0.2..0.8f64, x in -50.0..50.0f64, y in 0.01..50.0f64) {
        let u = poisson_extension(p, x, y, 1e-10).unwrap();
        let cp = 2.0 / (p * std::f64::consts::FRAC_PI_2).cos();
        let lo = (x * x + y * y).powf(0.5 * p);
        prop_assert!(u >= lo * (1.0 - 1e-8), "{u} < {lo}");
        prop_assert!(u <= y + cp * x.abs().powf(p) * (1.0 + 1e-8) + 1e-8 + cp * y.powf(p), "{u}");
    }

    #[test]
    fn potential_bound_holds(a1 in 0.1..0.9f64, a2 in 0.1..0.9f64, x in -0.5..0.5f64, y in -0.5..0.5f64) {
        prop_assume!(x.hypot(y) > 0.2);
        let d = Domain::unit_disc();
        let r = potential_mass_bound(&[a1, a2], &[c(0.0, 0.0), c(x, y)], &d, 1e-5).unwrap();
        prop_assert!(r.integral <= r.lebesgue_bound + r.err);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn distances_are_monotone_and_scale_free(cs in coeffs(4), pole in 1.3..3.0f64, lambda in 0.2..5.0f64) {
        let disc = Domain::unit_disc();
        let frame = Frame::new(c(0.0, 0.0), 1.0).unwrap();
        let s = BergmanSettings::default();
        let shift = Polynomial::from_taylor(c(0.0, 0.0), cs.clone());
        let f = move |z: Complex64| 1.0 / (z - pole) + shift.eval(z);
        let t = Target::new(f.clone()).with_singular(&[c(pole, 0.0)]);
        let r = best_poly_approx(&t, &disc, &Weight::Zero, &frame, 8, None, &s).unwrap();
        for k in 1..r.history.len() {
            prop_assert!(r.history[k] <= r.history[k - 1] * (1.0 + 1e-10) + 1e-14);
        }
        // polynomial parts of degree <= n do not change d_n
        let pure = Target::new(move |z: Complex64| 1.0 / (z - pole)).with_singular(&[c(pole, 0.0)]);
        let rp = best_poly_approx(&pure, &disc, &Weight::Zero, &frame, 8, None, &s).unwrap();
        let k = cs.len() - 1;
        prop_assert!((r.history[8] - rp.history[8]).abs() <= 1e-9 * rp.history[8].max(1e-12));
        prop_assert!(r.history[k] <= r.history[0] + 1e-12);
        // Pythagoras: |f|^2 = |p_n|^2 + d_n^2 once the residual is orthogonal
        let pn = weighted_norm_sq(&|z: Complex64| r.poly.eval(z), &disc, &Weight::Zero, &[], &QuadSettings::with_tol(1e-12)).unwrap();
        prop_assert!((r.norm.powi(2) - r.distance.powi(2) - pn.value).abs() <= 1e-8 * r.norm.powi(2));
        let scaled = Target::new(move |z: Complex64| f(z) * lambda).with_singular(&[c(pole, 0.0)]);
        let rs = best_poly_approx(&scaled, &disc, &Weight::Zero, &frame, 8, None, &s).unwrap();
        prop_assert!((rs.distance - lambda * r.distance).abs() <= 1e-9 * rs.distance.max(1e-12));
        // a prescribed jet can only hurt
        let j = best_poly_approx_with_jet(&t, &disc, &Weight::Zero, &frame, 8, &[c(0.25, 0.0)], &s).unwrap();
        prop_assert!(j.distance >= r.distance * (1.0 - 1e-10));
    }

    #[test]
    fn polynomials_reproduce(cs in coeffs(6)) {
        let disc = Domain::unit_disc();
        let frame = Frame::new(c(0.0, 0.0), 1.0).unwrap();
        let p = Polynomial::from_taylor(c(0.0, 0.0), cs.clone());
        let r = best_poly_approx(&Target::polynomial(p.clone()), &disc, &Weight::Zero, &frame, cs.len() - 1, None, &BergmanSettings::default()).unwrap();
        let size: f64 = cs.iter().map(|a| a.norm()).sum();
        prop_assert!(r.distance <= 1e-11 * size.max(1.0));
        for k in 0..cs.len() {
            prop_assert!(close(r.poly.coefficient(k), cs[k], size));
        }
    }

    #[test]
    fn epsilon0_falls_as_m_grows(p in 0.3..0.7f64, m in 2.0..50.0f64, dm in 0.5..20.0f64) {
        let a = nondensity_certificate(p, m).unwrap();
        let b = nondensity_certificate(p, m + dm).unwrap();
        prop_assert!(b.log_epsilon0_sq <= a.log_epsilon0_sq + 1e-9);
        prop_assert!(c1_constant(m + dm) > c1_constant(m));
    }
}
