use std::f64::consts::PI;

use proptest::prelude::*;
use surfsc_core::coefficients::{coefficient_row, CoefficientRow};
use surfsc_core::geometry::{
    curvature_integral, curve_from_descriptor, predict_density_per_arclength, predict_quartic_mass,
    BoundaryCurve, BoundarySegment, Descriptor, DEFAULT_SAMPLES,
};
use surfsc_core::profile1d::default_grid;
use surfsc_core::Error;

fn curve(s: &str) -> BoundaryCurve {
    curve_from_descriptor(s.parse().unwrap()).unwrap()
}

fn row() -> CoefficientRow {
    CoefficientRow {
        b: 1.5,
        alpha0: -0.78,
        e0: -0.0076,
        f0_sq_at_0: 0.15,
        e_corr: 0.043,
        c1: 0.0228,
        c2: 0.1297,
        c1_quadrature: 0.0228,
        converged: true,
        near_critical: false,
    }
}

#[test]
fn circle_length_and_curvature() {
    let c = curve("circle:R=2");
    assert!((c.length() - 4.0 * PI).abs() <= 1e-10);
    assert!(c.curvature_table().iter().all(|k| (k - 0.5).abs() <= 1e-10));
    let full = curvature_integral(&c, &BoundarySegment::full(&c)).unwrap();
    assert!((full - 2.0 * PI).abs() <= 1e-9);
    let half = BoundarySegment::new(&c, 0.0, c.length() / 2.0).unwrap();
    assert!((curvature_integral(&c, &half).unwrap() - PI).abs() <= 1e-9);
}

#[test]
fn gauss_bonnet_and_sample_invariance() {
    for s in [
        "circle:R=1",
        "ellipse:a=2,b=1",
        "fourier:a2=0.05",
        "fourier:a2=0.05,a3=0.01",
    ] {
        let c = curve(s);
        let c2 = BoundaryCurve::with_samples(s.parse().unwrap(), 2 * DEFAULT_SAMPLES).unwrap();
        assert!((c.total_turning() - 2.0 * PI).abs() <= 1e-8, "{s}");
        assert!((c.length() - c2.length()).abs() <= 1e-9, "{s}");
        assert!(
            (c.total_turning() - c2.total_turning()).abs() <= 1e-9,
            "{s}"
        );
    }
}

#[test]
fn fourier_curvature_peaks_on_the_symmetry_axis() {
    let c = curve("fourier:a2=0.05");
    let k = c.curvature_table();
    let th = c.parameter_table();
    let imax = (0..k.len()).max_by(|i, j| k[*i].total_cmp(&k[*j])).unwrap();
    let t = th[imax] % PI;
    assert!(t.min(PI - t) < 1e-9, "max at θ = {}", th[imax]);
}

#[test]
fn quarter_ellipse_matches_riemann_sum() {
    let c = curve("ellipse:a=2,b=1");
    let q = c.length() / 4.0;
    let seg = BoundarySegment::new(&c, 0.1, 0.1 + q).unwrap();
    let v = curvature_integral(&c, &seg).unwrap();
    let n = 1_000_000;
    let ds = q / n as f64;
    let riemann: f64 = (0..n)
        .map(|i| c.curvature_at(0.1 + (i as f64 + 0.5) * ds).unwrap())
        .sum::<f64>()
        * ds;
    assert!((v - riemann).abs() <= 1e-7, "{v} vs {riemann}");
}

#[test]
fn segments_outside_the_curve_are_rejected() {
    let c = curve("circle:R=1");
    for (a, b) in [(-0.1, 1.0), (1.0, 1.0), (2.0, 1.0), (0.0, 7.0)] {
        assert!(matches!(
            BoundarySegment::new(&c, a, b),
            Err(Error::SegmentOutOfRange(_))
        ));
    }
    assert!(matches!(
        c.curvature_at(10.0),
        Err(Error::SegmentOutOfRange(_))
    ));
}

#[test]
fn unit_circle_prediction() {
    let c = curve("circle:R=1");
    let r = coefficient_row(1.5, &default_grid()).unwrap();
    let p = predict_quartic_mass(&c, &BoundarySegment::full(&c), 0.05, &r).unwrap();
    let expected = 2.0 * PI * (0.05 * r.c1 + 0.0025 * r.c2);
    assert!((p.total - expected).abs() <= 1e-12);
    assert!((p.leading - 2.0 * PI * 0.05 * r.c1).abs() <= 1e-12);
    for s in [0.0, 1.0, 3.0, 6.0] {
        let d = predict_density_per_arclength(&c, s, 0.05, &r).unwrap();
        assert!((d - (0.05 * r.c1 + 0.0025 * r.c2)).abs() <= 1e-12);
    }
}

#[test]
fn flat_region_has_negligible_correction() {
    // a very large circle is locally flat
    let c = curve("circle:R=1000");
    let seg = BoundarySegment::new(&c, 0.0, 1.0).unwrap();
    let p = predict_quartic_mass(&c, &seg, 0.05, &row()).unwrap();
    assert!(p.correction.abs() <= 1e-3 * p.leading);
}

#[test]
fn ellipse_density_integrates_to_prediction() {
    let c = curve("ellipse:a=2,b=1");
    let r = row();
    let full = predict_quartic_mass(&c, &BoundarySegment::full(&c), 0.05, &r).unwrap();
    // composite Simpson in arclength on 4000 panels
    let n = 4000;
    let h = c.length() / n as f64;
    let d = |s: f64| predict_density_per_arclength(&c, s.min(c.length()), 0.05, &r).unwrap();
    let mut sum = d(0.0) + d(c.length());
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * d(i as f64 * h);
    }
    assert!((sum * h / 3.0 - full.total).abs() <= 1e-9);

    let k = c.curvature_table();
    let s = c.arclength_table();
    let imax = (0..k.len()).max_by(|i, j| k[*i].total_cmp(&k[*j])).unwrap();
    let dmax = d(s[imax]);
    assert!(s.iter().step_by(97).all(|x| d(*x) <= dmax + 1e-15));
}

#[test]
fn predictions_need_valid_inputs() {
    let c = curve("circle:R=1");
    let seg = BoundarySegment::full(&c);
    assert!(predict_quartic_mass(&c, &seg, 0.3, &row()).is_err());
    let mut r = row();
    r.converged = false;
    assert!(predict_quartic_mass(&c, &seg, 0.05, &r).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn predictions_are_additive(split in 0.05f64..0.95, eps in 0.001f64..0.19) {
        let c = curve("ellipse:a=2,b=1");
        let r = row();
        let x = split * c.length();
        let full = predict_quartic_mass(&c, &BoundarySegment::full(&c), eps, &r).unwrap();
        let a = predict_quartic_mass(&c, &BoundarySegment::new(&c, 0.0, x).unwrap(), eps, &r).unwrap();
        let b = predict_quartic_mass(&c, &BoundarySegment::new(&c, x, c.length()).unwrap(), eps, &r).unwrap();
        prop_assert!((a.total + b.total - full.total).abs() <= 1e-12);
    }

    #[test]
    fn fourier_curves_satisfy_gauss_bonnet(a2 in -0.12f64..0.12, a3 in -0.05f64..0.05) {
        let d = Descriptor::Fourier { coeffs: vec![(2, a2), (3, a3)] };
        prop_assume!(4.0 * a2.abs() + 9.0 * a3.abs() < 0.5);
        let c = BoundaryCurve::with_samples(d.clone(), 4096).unwrap();
        prop_assert!((c.total_turning() - 2.0 * PI).abs() <= 1e-8);
        let back: Descriptor = d.to_string().parse().unwrap();
        prop_assert_eq!(back, d);
    }
}
