//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p normproj-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use normproj::boxdim::{counts_1d, default_scales, estimate_dim, favard_proxy, fit_counts, projected_coordinates};
use normproj::cantor::{build_norm, CantorSet, CounterexampleCurve, GlueOptions};
use normproj::checks::P2_LOWER_LEVEL10;
use normproj::fractals::{cantor_line, cantor_product, four_corner, unit_square, PointCloud};
use normproj::norms::{HyperplaneNormal, NormModel};
use normproj::projections::{
    conjugate_projection, construct_intertwiner, kernel_collinearity_defect, linearity_defect, project_hyperplane,
    project_hyperplane_direct, project_line_lp, q_norm_projection_direct, LinearProjector, ProjectionFamily,
};
use normproj::sweep::{dim_profile, DirectionGrid};
use normproj::vecops::dist;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn triadic_norm() -> Result<(CounterexampleCurve, NormModel), String> {
    let curve = CounterexampleCurve::new(CantorSet::triadic(), 12).map_err(fail)?;
    let norm = build_norm(&curve, GlueOptions::default()).map_err(fail)?.norm;
    Ok((curve, norm))
}

fn spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.transpose() * &a + DMatrix::identity(n, n) * 0.2
}

fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0, 8.0] {
        let r = NormModel::lp(p, 2)
            .and_then(|n| n.check_gauss_properties(2048))
            .map_err(fail)?;
        if !r.monotone || r.min_inner.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(format!("p = {p}: monotone {} min inner {}", r.monotone, r.min_inner));
        }
        worst = worst.max(r.antipodal_defect);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= 1e-12 && secs < 5.0,
        format!("antipodal defect {worst:.2e}, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (_, ce) = triadic_norm()?;
    let models = vec![
        NormModel::euclidean(2).map_err(fail)?,
        NormModel::lp(1.5, 2).map_err(fail)?,
        NormModel::lp(3.0, 2).map_err(fail)?,
        NormModel::lp(3.0, 3).map_err(fail)?,
        NormModel::inner_product(spd(&mut rng, 2)).map_err(fail)?,
        NormModel::inner_product(spd(&mut rng, 3)).map_err(fail)?,
        ce,
    ];
    let (mut gap, mut coll): (f64, f64) = (0.0, 0.0);
    for m in &models {
        let n = m.dim();
        let w = HyperplaneNormal::new(&point(&mut rng, n)).map_err(fail)?;
        let mut pts = Vec::new();
        for _ in 0..100 {
            let w = HyperplaneNormal::new(&point(&mut rng, n)).map_err(fail)?;
            let x = point(&mut rng, n);
            let a = project_hyperplane(m, &w, &x).map_err(fail)?;
            let b = project_hyperplane_direct(m, &w, &x).map_err(fail)?;
            gap = gap.max(dist(&a, &b));
            pts.push(point(&mut rng, n));
        }
        coll = coll.max(kernel_collinearity_defect(|x| project_hyperplane(m, &w, x), &pts).map_err(fail)?);
    }
    ensure(
        gap <= 1e-7 && coll <= 1e-8,
        format!("gauss route vs direct {gap:.2e}, kernel collinearity {coll:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cloud = cantor_product(1.0 / 3.0, 8).map_err(fail)?;
    let scales: Vec<f64> = (2..=7).map(|k| 3f64.powi(-k)).collect();
    let slope = |p: &LinearProjector| -> Result<f64, String> {
        let xs = projected_coordinates(p, &cloud).map_err(fail)?;
        match fit_counts(&scales, &counts_1d(&xs, &scales)) {
            Ok(e) => Ok(e.slope),
            Err(normproj::Error::LowQualityFit { slope, .. }) => Ok(slope),
            Err(e) => Err(e.to_string()),
        }
    };
    let (mut alg, mut dim): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let v = HyperplaneNormal::from_line_angle(rng.gen_range(0.0..PI));
        let f = LinearProjector::new(v.clone(), v.w()).map_err(fail)?;
        let target = HyperplaneNormal::from_line_angle(v.line_angle() + rng.gen_range(-1.0..1.0));
        let g = LinearProjector::new(target, v.w()).map_err(fail)?;
        let h = construct_intertwiner(f.matrix(), g.matrix()).map_err(fail)?;
        let x = point(&mut rng, 2);
        alg = alg.max(dist(&h.apply(&f.apply(&x)), &g.apply(&x)));
        if i % 10 == 0 {
            dim = dim.max((slope(&f)? - slope(&g)?).abs());
        }
    }
    ensure(
        alg <= 1e-12 && dim <= 0.05,
        format!("h f - g {alg:.2e}, dimension gap {dim:.4}"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for n in [2usize, 3] {
        for m in [1usize, n - 1] {
            for _ in 0..50 {
                let q = spd(&mut rng, n);
                let basis = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
                let x = point(&mut rng, n);
                let a = conjugate_projection(&q, &basis, &x).map_err(fail)?;
                let b = q_norm_projection_direct(&q, &basis, &x).map_err(fail)?;
                worst = worst.max(dist(&a, &b));
            }
        }
    }
    let v = vec![1.0 / 3f64.sqrt(); 3];
    let d2 = linearity_defect(|x| project_line_lp(2.0, &v, x), 3, 100, 4).map_err(fail)?;
    let d4 = linearity_defect(|x| project_line_lp(4.0, &v, x), 3, 100, 4).map_err(fail)?;
    ensure(
        worst <= 1e-9 && d2 <= 1e-9 && d4 > 1e-3,
        format!("conjugation {worst:.2e}, defect p=2 {d2:.2e}, p=4 {d4:.2e}"),
    )
}

fn criterion_5() -> Outcome {
    let curve = CounterexampleCurve::new(CantorSet::triadic(), 12).map_err(fail)?;
    let end = curve.end();
    let f1 = end.big_f;
    let th = end.theta;
    let fk = curve.f_image_bounds(12).map_err(fail)?;
    let expected_upper = 0.5 * (1.0 + (2.0f64 / 3.0).powi(12));
    let p1 = curve
        .samples()
        .windows(2)
        .all(|w| w[1].point.t == w[0].point.t || w[1].point.beta_angle() > w[0].point.beta_angle());
    let p2 = curve.image_measure_bounds(10).map_err(fail)?.lower;
    let ok = (f1 - 0.125).abs() <= 1e-6
        && f1 <= 0.25
        && (th - (2.0f64 / 7.0).atan()).abs() <= 1e-6
        && th > 0.0
        && th < FRAC_PI_2 - 1.0
        && (fk.lower - 0.5).abs() <= 1e-12
        && (fk.upper - expected_upper).abs() <= 1e-12
        && (fk.upper - 0.5) / 0.5 <= 0.01
        && p1
        && p2 > 0.0
        && (p2 - P2_LOWER_LEVEL10).abs() <= 1e-12;
    ensure(
        ok,
        format!(
            "F(1) {f1:.9}, theta(1) {th:.9}, f(K) in [{:.6}, {:.6}], monotone {p1}, level-10 bound {p2:.12}",
            fk.lower, fk.upper
        ),
    )
}

fn criterion_6() -> Outcome {
    let curve = CounterexampleCurve::new(CantorSet::triadic(), 12).map_err(fail)?;
    let b = build_norm(&curve, GlueOptions::default()).map_err(fail)?;
    let g = b.norm.check_gauss_properties(2048).map_err(fail)?;
    let d = b.diagnostics;
    let ok = d.antipodal_defect <= 1e-10 && d.min_curvature_radius > 0.0 && b.joint_mismatch <= 1e-6 && g.passes(1e-10);
    ensure(
        ok,
        format!(
            "antipodal {:.2e}, min h + h'' {:.4}, glue mismatch {:.2e}, gauss ok {}",
            d.antipodal_defect,
            d.min_curvature_radius,
            b.joint_mismatch,
            g.passes(1e-10)
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let refs: [(&str, Result<PointCloud, normproj::Error>, f64, f64); 4] = [
        ("cantor", cantor_line(1.0 / 3.0, 10), 0.631, 0.03),
        ("cantor-product", cantor_product(1.0 / 3.0, 10), 1.262, 0.05),
        ("four-corner", four_corner(10), 1.0, 0.05),
        ("square", unit_square(10), 2.0, 0.02),
    ];
    let mut msg = Vec::new();
    let mut ok = true;
    for (name, cloud, want, tol) in refs {
        let cloud = cloud.map_err(fail)?;
        let e = estimate_dim(&cloud, &default_scales(&cloud, 1)).map_err(fail)?;
        ok &= (e.slope - want).abs() <= tol && e.r2 >= 0.999;
        msg.push(format!("{name} {:.4} (r2 {:.5})", e.slope, e.r2));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(ok && secs < 30.0, format!("{}, {secs:.2} s", msg.join(", ")))
}

fn criterion_8() -> Outcome {
    let cloud = cantor_product(1.0 / 3.0, 8).map_err(fail)?;
    let scales: Vec<f64> = (2..=7).map(|k| 3f64.powi(-k)).collect();
    let dim_a = estimate_dim(&cloud, &scales).map_err(fail)?.slope;
    let family = ProjectionFamily::from_norm(NormModel::euclidean(2).map_err(fail)?);
    let grid = DirectionGrid::new(720).map_err(fail)?;
    let threshold = 0.9 * dim_a.min(1.0);
    let p = dim_profile(&family, &cloud, &grid, &scales, Some(threshold)).map_err(fail)?;
    let (h, v) = (p.at(0.0).flagged, p.at(FRAC_PI_2).flagged);
    ensure(
        p.flagged_measure <= 0.1 && h && v,
        format!(
            "flagged measure {:.4}, angle 0 flagged {h}, angle pi/2 flagged {v}",
            p.flagged_measure
        ),
    )
}

fn criterion_9() -> Outcome {
    let (_, ce) = triadic_norm()?;
    let e = NormModel::euclidean(2).map_err(fail)?;
    let grid = DirectionGrid::new(180).map_err(fail)?;
    let mut last = f64::INFINITY;
    let mut decreasing = true;
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for g in 3..=7 {
        // one generation finer so that the box size clears the resolution guard
        let cloud = four_corner(g + 1).map_err(fail)?;
        let d = 4f64.powi(-(g as i32));
        let fe = favard_proxy(&e, &cloud, &grid, d).map_err(fail)?;
        let fc = favard_proxy(&ce, &cloud, &grid, d).map_err(fail)?;
        decreasing &= fe < last;
        last = fe;
        worst = worst.max((fc - fe).abs() / fe);
        values.push(format!("{fe:.4}"));
    }
    ensure(
        decreasing && worst <= 0.2,
        format!(
            "euclidean proxies [{}], worst relative gap {worst:.4}",
            values.join(", ")
        ),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_normproj")
}

fn run_cli(dir: &Path, config: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(bin())
        .current_dir(dir)
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .map_err(fail)?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

fn run_suite(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    std::fs::create_dir_all(dir).map_err(fail)?;
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# acceptance run\nthreads=2\n").map_err(fail)?;
    let cmds: [&[&str]; 7] = [
        &["verify", "--out", "verify.json"],
        &[
            "counterexample",
            "build",
            "--m",
            "2",
            "--r",
            "0.333333333",
            "--level",
            "12",
            "--out",
            "ce.csv",
        ],
        &["set", "--set", "four-corner", "--gen", "5", "--out", "set.csv"],
        &[
            "dim",
            "--set",
            "cantor-product",
            "--gen",
            "10",
            "--out",
            "dim.json",
            "--csv",
            "dim.csv",
        ],
        &[
            "sweep",
            "--set",
            "cantor-product",
            "--gen",
            "6",
            "--kmax",
            "5",
            "--directions",
            "72",
            "--out",
            "sweep.csv",
            "--summary",
            "sweep.json",
        ],
        &[
            "project",
            "--norm",
            "counterexample",
            "--w",
            "0.3,1",
            "--x",
            "1,2",
            "--out",
            "project.json",
        ],
        &["norm-info", "--norm", "lp", "--p", "3", "--out", "info.json"],
    ];
    for c in cmds {
        run_cli(dir, &cfg, c)?;
    }
    let mut files = Vec::new();
    for name in [
        "verify.json",
        "ce.csv",
        "ce.json",
        "set.csv",
        "dim.json",
        "dim.csv",
        "sweep.csv",
        "sweep.json",
        "project.json",
        "info.json",
    ] {
        files.push((name.to_string(), std::fs::read(dir.join(name)).map_err(fail)?));
    }
    Ok(files)
}

fn criterion_10() -> Outcome {
    let root: PathBuf = std::env::temp_dir().join(format!("normproj-acceptance-{}", std::process::id()));
    let a = run_suite(&root.join("a"));
    let b = run_suite(&root.join("b"));
    let _ = std::fs::remove_dir_all(&root);
    let (a, b) = (a?, b?);
    let differing: Vec<&str> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| x.1 != y.1)
        .map(|(x, _)| x.0.as_str())
        .collect();
    ensure(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} artifacts byte-identical across two runs", a.len())
        } else {
            format!("differing artifacts: {}", differing.join(", "))
        },
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Gauss map of L^p norms", criterion_1),
        ("projection reduction", criterion_2),
        ("intertwiner", criterion_3),
        ("conjugation and L^p linearity", criterion_4),
        ("counterexample constants", criterion_5),
        ("built norm validity", criterion_6),
        ("dimension estimator references", criterion_7),
        ("Marstrand probe", criterion_8),
        ("Favard length probe", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(m) => println!("criterion {:2} PASS  {name}: {m} [{secs:.1} s]", i + 1),
            Err(m) => {
                failed += 1;
                println!("criterion {:2} FAIL  {name}: {m} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
