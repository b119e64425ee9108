use normproj::cantor::*;
use normproj::error::Error;
use normproj::vecops::{dist, polar_angle};
use std::f64::consts::{FRAC_PI_2, PI};

fn triadic_curve(level: u32) -> CounterexampleCurve {
    CounterexampleCurve::new(CantorSet::triadic(), level).unwrap()
}

/// Lower bound on the measure of the tangent-angle image, frozen from the
/// gap-sum computation at level 10 of the triadic set.
const P2_LOWER_LEVEL10: f64 = 0.128_168_619_289_322_7;

#[test]
fn f_examples() {
    let c = triadic_curve(8);
    assert_eq!(c.point(0.0).f, 0.0);
    assert_eq!(c.point(1.0).f, 1.0);
    assert!((c.point(1.0 / 3.0).f - 5.0 / 12.0).abs() < 1e-15);
}

#[test]
fn big_f_examples() {
    let c = triadic_curve(8);
    assert_eq!(c.point(0.0).big_f, 0.0);
    let f1 = c.point(1.0).big_f;
    assert!((f1 - 0.125).abs() < 1e-6);
    assert!(f1 <= 0.25);
    // Independent bracket: trapezoid sums of the nondecreasing f on a fine grid.
    let n = 3usize.pow(9);
    let (mut lo, mut hi) = (0.0, 0.0);
    let mut prev = c.point(0.0).f;
    for i in 1..=n {
        let cur = c.point(i as f64 / n as f64).f;
        lo += prev / n as f64;
        hi += cur / n as f64;
        prev = cur;
    }
    assert!(0.25 * lo <= f1 + 1e-15 && f1 <= 0.25 * hi + 1e-15);
}

#[test]
fn f1_bound_for_other_sets() {
    for (m, r) in [(2, 0.25), (3, 0.2), (4, 0.1), (2, 0.45)] {
        let c = CounterexampleCurve::new(CantorSet::new(m, r).unwrap(), 6).unwrap();
        let end = c.end();
        assert!(end.big_f <= 0.25);
        assert!(end.theta > 0.0 && end.theta < THETA1_LIMIT);
        assert!(c.beta_is_injective());
    }
}

#[test]
fn theta_at_one() {
    let c = triadic_curve(10);
    let end = c.end();
    assert!((end.psi - 2.0 / 7.0).abs() < 1e-15);
    assert!((end.theta - (2.0f64 / 7.0).atan()).abs() < 1e-15);
    assert!((end.theta - 0.278300).abs() < 1e-6);
    assert!(end.theta > 0.0 && end.theta < THETA1_LIMIT);
}

#[test]
fn endpoints_of_gamma_and_beta() {
    let c = triadic_curve(6);
    let s = c.start();
    assert!(dist(&s.gamma(), &[1.0, 0.0]) < 1e-15);
    assert!(dist(&s.beta(), &[0.0, 1.0]) < 1e-15);
    // The quarter turn of beta(0) is (-1, 0), which points inward; the
    // outward normal at gamma(0) is (1, 0).
    assert_eq!(c.orientation(), -1.0);
    assert!(dist(&c.gauss_on_gamma(0.0), &[1.0, 0.0]) < 1e-15);
    let s_end = end_tangent_angle(&c);
    assert!(s_end > 1.0 + FRAC_PI_2 && s_end < PI);
    let g1 = c.gauss_on_gamma(1.0);
    assert!((polar_angle(&g1) - (s_end - FRAC_PI_2)).abs() < 1e-12);
}

#[test]
fn gauss_on_gamma_points_outward_and_turns_counterclockwise() {
    let c = triadic_curve(8);
    let mut last = f64::NEG_INFINITY;
    for s in c.samples() {
        let t = s.point.t;
        let g = c.gauss_on_gamma(t);
        assert!(normproj::vecops::dot(&s.point.gamma(), &g) > 0.0);
        let a = c.normal_angle(t);
        assert!(a > last);
        last = a;
    }
}

#[test]
fn slope_half_on_gaps() {
    let k = CantorSet::triadic();
    let c = triadic_curve(8);
    for g in k.gaps(8) {
        let (a, b) = (c.point(g.left), c.point(g.right));
        let slope = (b.f - a.f) / (g.right - g.left);
        assert!((slope - 0.5).abs() < 1e-9, "slope {slope}");
    }
    for s in c.samples().iter().filter(|s| s.kind == SampleKind::GapMidpoint) {
        let p = c.point(s.point.t);
        assert!((p.f - s.point.f).abs() < 1e-15);
        assert!((p.big_f - s.point.big_f).abs() < 1e-15);
    }
}

#[test]
fn f_strictly_increasing_and_big_f_strictly_convex() {
    let c = triadic_curve(12);
    let n = 2000;
    let pts: Vec<CurvePoint> = (0..=n).map(|i| c.point(i as f64 / n as f64)).collect();
    for w in pts.windows(2) {
        assert!(w[1].f > w[0].f);
        assert!(w[1].psi > w[0].psi);
    }
    for w in pts.windows(3) {
        assert!(w[2].big_f - 2.0 * w[1].big_f + w[0].big_f > 0.0);
    }
}

#[test]
fn grid_samples_are_consistent() {
    let c = triadic_curve(12);
    assert!(c.beta_is_injective());
    for s in c.samples().iter().step_by(97) {
        let p = c.point(s.point.t);
        assert!((p.big_f - s.point.big_f).abs() < 1e-14);
        assert!((p.theta - s.point.theta).abs() < 1e-14);
    }
    for w in c.samples().windows(2) {
        assert!(w[1].point.t >= w[0].point.t);
    }
}

#[test]
fn beta_separates_at_least_as_much_as_w() {
    let c = triadic_curve(6);
    let s = c.samples();
    for i in (0..s.len()).step_by(3) {
        for j in (i + 1..s.len()).step_by(5) {
            let (a, b) = (&s[i].point, &s[j].point);
            let db = dist(&a.beta(), &b.beta());
            let dw = dist(&a.w(), &b.w());
            assert!(db >= dw - 1e-15, "{} {}", a.t, b.t);
        }
    }
}

#[test]
fn p2_lower_bound_frozen() {
    let c = triadic_curve(10);
    let b = c.image_measure_bounds(10).unwrap();
    assert!((b.lower - P2_LOWER_LEVEL10).abs() < 1e-12, "{}", b.lower);
    assert!(b.upper >= b.lower);
    // Independent route: walk the gaps and evaluate theta through `point`.
    let k = CantorSet::triadic();
    let gap_sum: f64 = k
        .gaps(10)
        .iter()
        .map(|g| c.point(g.right).theta - c.point(g.left).theta)
        .sum();
    assert!((c.point(1.0).theta - gap_sum - b.upper).abs() < 1e-12);
}

#[test]
fn p2_lower_bound_positive_and_monotone() {
    let c = triadic_curve(12);
    let mut last = f64::NEG_INFINITY;
    for k in 1..=12 {
        let b = c.image_measure_bounds(k).unwrap();
        if k >= 4 {
            assert!(b.lower > 0.0);
        }
        assert!(b.lower >= last - 1e-15, "level {k}");
        assert!(b.upper >= b.lower);
        last = b.lower;
    }
    let (b10, b12) = (c.image_measure_bounds(10).unwrap(), c.image_measure_bounds(12).unwrap());
    assert!(b12.upper <= b10.upper + 1e-15);
}

#[test]
fn f_image_bracket_shrinks_to_half() {
    let c = triadic_curve(12);
    let b = c.f_image_bounds(12).unwrap();
    assert!((b.lower - 0.5).abs() < 1e-12);
    assert!((b.upper - 0.5 * (1.0 + (2.0f64 / 3.0).powi(12))).abs() < 1e-12);
}

#[test]
fn product_measure_probe_dominates() {
    let k = CantorSet::triadic();
    for n in [2, 3, 9] {
        for g in [
            |t: f64| 1.0 + t,
            |t: f64| t.exp(),
            |t: f64| 1.0 / (4.0 * (1.0 - t * t / 8.0)),
        ] {
            let (dh, bound) = product_measure_probe(&k, 10, g, n);
            assert!(dh >= bound && bound > 0.0);
        }
    }
}

#[test]
fn curve_rejects_oversized_levels() {
    let k = CantorSet::with_level_cap(2, 1.0 / 3.0, 5).unwrap();
    assert!(matches!(
        CounterexampleCurve::new(k, 6),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        triadic_curve(4).image_measure_bounds(41),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn built_norm_is_a_valid_table() {
    let c = triadic_curve(12);
    let b = build_norm(&c, GlueOptions::default()).unwrap();
    assert!(b.diagnostics.antipodal_defect <= 1e-10);
    assert!(b.diagnostics.min_curvature_radius > 0.0);
    assert!(b.joint_mismatch <= 1e-6);
    assert!(b.radii.iter().all(|&r| r > 0.0));
    assert!((b.phi_end - (1.0 + c.end().theta)).abs() < 1e-12);
    let r = b.norm.check_gauss_properties(2048).unwrap();
    assert!(r.passes(1e-10), "{r:?}");
}

#[test]
fn built_norm_contains_gamma() {
    let c = triadic_curve(12);
    let b = build_norm(&c, GlueOptions::default()).unwrap();
    for i in 0..=100 {
        let p = c.point(i as f64 / 100.0);
        let v = b.norm.eval(&p.gamma()).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "t={} norm={v}", p.t);
    }
}

#[test]
fn built_norm_gauss_map_matches_curve_off_the_cantor_set() {
    let c = triadic_curve(12);
    let b = build_norm(&c, GlueOptions::default()).unwrap();
    for g in CantorSet::triadic().gaps(4) {
        let t = 0.5 * (g.left + g.right);
        let x = b.norm.sphere_point(&c.point(t).gamma()).unwrap();
        let gt = b.norm.gauss_map(&x).unwrap();
        assert!(dist(&gt, &c.gauss_on_gamma(t)) <= 1e-5);
    }
    let fine = build_norm(
        &c,
        GlueOptions {
            rows: 16384,
            ..GlueOptions::default()
        },
    )
    .unwrap();
    for g in CantorSet::triadic().gaps(6) {
        let t = 0.5 * (g.left + g.right);
        let x = fine.norm.sphere_point(&c.point(t).gamma()).unwrap();
        let gt = fine.norm.gauss_map(&x).unwrap();
        assert!(dist(&gt, &c.gauss_on_gamma(t)) <= 1e-5);
    }
}

#[test]
fn flipped_glue_fails() {
    let c = triadic_curve(8);
    let opts = GlueOptions {
        flip_curvature: true,
        ..GlueOptions::default()
    };
    assert!(matches!(build_norm(&c, opts), Err(Error::GlueFailed(_))));
}
