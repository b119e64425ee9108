use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use normproj::boxdim::default_scales;
use normproj::cantor::CantorSet;
use normproj::cantor::CounterexampleCurve;
use normproj::fractals::{cantor_line, cantor_product, unit_square};
use normproj::norms::NormModel;
use normproj::projections::angle_family;
use normproj::projections::ProjectionFamily;
use normproj::sweep::*;
use normproj::Error;
use std::f64::consts::PI;

fn euclid() -> ProjectionFamily {
    ProjectionFamily::from_norm(NormModel::euclidean(2).unwrap())
}

fn triadic_scales(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 3f64.powi(-k)).collect()
}

#[test]
fn grid_is_uniform_on_the_quotient() {
    let g = DirectionGrid::new(720).unwrap();
    assert_eq!(g.count(), 720);
    assert!((g.weight() * 720.0 - 1.0).abs() < 1e-15);
    for w in g.angles().windows(2) {
        assert!((w[1] - w[0] - PI / 720.0).abs() < 1e-14);
    }
    assert_eq!(g.angle(0), 0.0);
    assert!(*g.angles().last().unwrap() < PI);
    assert!((g.line(360).line_angle() - FRAC_PI_2).abs() < 1e-15);
    assert!(DirectionGrid::new(0).is_err());
}

#[test]
fn product_profile_examples() {
    let cloud = cantor_product(1.0 / 3.0, 8).unwrap();
    let grid = DirectionGrid::new(72).unwrap();
    let p = dim_profile(&euclid(), &cloud, &grid, &triadic_scales(2, 7), None).unwrap();
    assert!((p.at(0.0).slope.unwrap() - 2f64.ln() / 3f64.ln()).abs() < 0.03);
    assert!(
        (p.at(FRAC_PI_4).slope.unwrap() - 1.0).abs() < 0.05,
        "{:?}",
        p.at(FRAC_PI_4).slope
    );
    assert!((p.threshold - 0.9).abs() < 1e-12);
    assert!(p.flagged.contains(&0.0) && p.flagged.contains(&FRAC_PI_2));
}

#[test]
fn square_profile_is_one_everywhere() {
    let cloud = unit_square(10).unwrap();
    let grid = DirectionGrid::new(36).unwrap();
    let p = dim_profile(&euclid(), &cloud, &grid, &default_scales(&cloud, 3), None).unwrap();
    for r in &p.records {
        assert!((r.slope.unwrap() - 1.0).abs() < 0.05, "{} {:?}", r.angle, r.slope);
    }
    assert!(p.flagged.is_empty());
}

#[test]
fn marstrand_probe() {
    let cloud = cantor_product(1.0 / 3.0, 8).unwrap();
    let grid = DirectionGrid::new(720).unwrap();
    let p = dim_profile(&euclid(), &cloud, &grid, &triadic_scales(2, 7), Some(0.9)).unwrap();
    assert!(p.flagged_measure <= 0.10, "{}", p.flagged_measure);
    assert!(p.flagged.contains(&0.0) && p.flagged.contains(&FRAC_PI_2));
}

#[test]
fn oblique_family_profile_is_a_reindexed_euclidean_profile() {
    let cloud = cantor_product(1.0 / 3.0, 8).unwrap();
    let grid = DirectionGrid::new(72).unwrap();
    let scales = triadic_scales(2, 7);
    let oblique = angle_family(|_| FRAC_PI_4).unwrap();
    let pe = dim_profile(&euclid(), &cloud, &grid, &scales, Some(0.9)).unwrap();
    let po = dim_profile(&oblique, &cloud, &grid, &scales, Some(0.9)).unwrap();
    // projecting onto L along the direction at angle a + pi/4 factors through
    // the orthogonal projection onto the line at angle a - pi/4
    for (i, r) in po.records.iter().enumerate() {
        let j = (i + 72 - 18) % 72;
        let e = &pe.records[j];
        assert!(
            (r.slope.unwrap() - e.slope.unwrap()).abs() < 0.05,
            "{} {:?} {:?}",
            r.angle,
            r.slope,
            e.slope
        );
    }
}

#[test]
fn profile_is_translation_and_quarter_turn_equivariant() {
    let cloud = cantor_product(1.0 / 3.0, 7).unwrap();
    let grid = DirectionGrid::new(36).unwrap();
    let scales = triadic_scales(2, 6);
    let base = dim_profile(&euclid(), &cloud, &grid, &scales, Some(0.5)).unwrap();
    let moved = dim_profile(&euclid(), &cloud.translated(&[3.0, -2.0]), &grid, &scales, Some(0.5)).unwrap();
    for (a, b) in base.records.iter().zip(&moved.records) {
        assert!((a.slope.unwrap() - b.slope.unwrap()).abs() < 0.05);
    }
    let mut rot = cloud.clone();
    for p in rot.coords.chunks_exact_mut(2) {
        let (x, y) = (p[0], p[1]);
        p[0] = -y;
        p[1] = x;
    }
    let turned = dim_profile(&euclid(), &rot, &grid, &scales, Some(0.5)).unwrap();
    for i in 0..36 {
        let a = &base.records[i];
        let b = &turned.records[(i + 18) % 36];
        assert!((a.slope.unwrap() - b.slope.unwrap()).abs() < 0.05);
    }
}

#[test]
fn profile_preconditions() {
    let cloud = cantor_product(1.0 / 3.0, 5).unwrap();
    let small = DirectionGrid::new(10).unwrap();
    assert!(dim_profile(&euclid(), &cloud, &small, &triadic_scales(1, 4), None).is_err());
    let grid = DirectionGrid::new(36).unwrap();
    assert!(matches!(
        dim_profile(&euclid(), &cloud, &grid, &triadic_scales(2, 6), None),
        Err(Error::UnderResolved { .. })
    ));
    let line = cantor_line(1.0 / 3.0, 5).unwrap();
    assert!(dim_profile(&euclid(), &line, &grid, &triadic_scales(1, 4), None).is_err());
}

#[test]
fn gauss_pushforward_has_positive_measure() {
    let k = CantorSet::triadic();
    let c = CounterexampleCurve::new(k, 10).unwrap();
    let b = gauss_pushforward_measure(&c, 10).unwrap();
    assert!((b.lower - 0.128_168_619_289_322_7).abs() < 1e-12);
    let mut last = f64::INFINITY;
    for level in [2, 4, 8, 12] {
        let e = euclidean_pushforward_measure(&k, level);
        assert!(e.lower == 0.0 && e.upper < last);
        last = e.upper;
    }
    assert!(last < 0.01);
}

#[test]
fn gauss_map_spreads_a_cantor_direction_set() {
    // gamma(t) has polar angle t, so the points gamma(K) sit at the angles of K
    let cloud = cantor_line(1.0 / 3.0, 10).unwrap();
    let scales = triadic_scales(2, 8);
    let e = normproj::boxdim::estimate_dim(&cloud, &scales).unwrap();
    assert!((e.slope - 0.6309).abs() < 0.03);
    // their normal angles cover a set of measure at least the certified bound
    let c = CounterexampleCurve::new(CantorSet::triadic(), 12).unwrap();
    let lower = gauss_pushforward_measure(&c, 10).unwrap().lower;
    let angles: Vec<f64> = c
        .samples()
        .iter()
        .filter(|s| s.kind == normproj::cantor::SampleKind::Breakpoint)
        .map(|s| c.normal_angle(s.point.t))
        .collect();
    let src: Vec<f64> = cloud.points().map(|p| p[0]).collect();
    // the source shadow length shrinks like (2/3)^k while the image keeps
    // at least the certified measure
    for k in [6, 7, 8] {
        let d = 3f64.powi(-k);
        let image = normproj::boxdim::count_1d(&angles, d) as f64 * d;
        let source = normproj::boxdim::count_1d(&src, d) as f64 * d;
        assert!(image >= lower, "{image}");
        assert!((source - (2.0f64 / 3.0).powi(k)).abs() < 1e-12);
    }
}
