//! The cross-cutting verification suite. Every check produces one report;
//! a failing check is a report with `passed == false`, never an error.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boxdim::{counts_1d, fit_counts, lipschitz_image_counts, projected_coordinates};
use crate::cantor::{
    build_norm, product_measure_probe, BuiltNorm, CantorSet, CounterexampleCurve, GlueOptions, SampleKind,
};
use crate::error::{Error, Result};
use crate::fractals::cantor_product;
use crate::norms::{HyperplaneNormal, NormModel};
use crate::projections::{
    conjugate_projection, construct_intertwiner, kernel_collinearity_defect, linearity_defect, norm_projector,
    project_hyperplane, project_hyperplane_direct, project_line_lp, q_norm_projection_direct, LinearProjector,
};
use crate::vecops::{dist, norm2};

/// Default seed of the suite.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Lower bound on the measure of the tangent-angle image of the triadic
/// Cantor set at level 10, as computed by the gap sum.
pub const P2_LOWER_LEVEL10: f64 = 0.128_168_619_289_322_7;

/// Names of the checks, in report order.
pub const CHECK_NAMES: [&str; 15] = [
    "gauss_lemma_lp",
    "projection_reduction",
    "kernel_collinearity",
    "projector_rank",
    "intertwiner",
    "box_dim_equivalence",
    "conjugation",
    "lp_linearity_p2",
    "lp_nonlinearity_p4",
    "lipschitz_image_counts",
    "product_image_measure",
    "glue_validity",
    "gauss_agreement",
    "counterexample_constants",
    "p2_lower_bound",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub worst_defect: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    /// Error message when the check could not run to completion.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckOptions {
    /// Negates the glue arc radii, which must make `glue_validity` fail.
    pub broken_glue: bool,
}

struct Outcome {
    worst: f64,
    tolerance: f64,
    samples: usize,
}

fn outcome(worst: f64, tolerance: f64, samples: usize) -> Result<Outcome> {
    Ok(Outcome {
        worst,
        tolerance,
        samples,
    })
}

/// Shared fixtures: the triadic arc and the norm built from it.
struct Fixture {
    curve: CounterexampleCurve,
    built: Result<BuiltNorm>,
}

impl Fixture {
    fn norm(&self) -> Result<&NormModel> {
        self.built.as_ref().map(|b| &b.norm).map_err(Clone::clone)
    }
}

/// Runs every check with the default options.
pub fn run_all(seed: u64) -> Vec<CheckReport> {
    run_all_with(seed, CheckOptions::default())
}

pub fn run_all_with(seed: u64, options: CheckOptions) -> Vec<CheckReport> {
    let curve = CounterexampleCurve::new(CantorSet::triadic(), 12).expect("triadic level 12 is in range");
    let built = build_norm(&curve, GlueOptions::default());
    let fx = Fixture { curve, built };
    (0..CHECK_NAMES.len())
        .into_par_iter()
        .map(|i| {
            let res = run_one(i, seed, options, &fx);
            let name = CHECK_NAMES[i].to_string();
            match res {
                Ok(o) => CheckReport {
                    name,
                    passed: o.worst <= o.tolerance,
                    worst_defect: o.worst,
                    tolerance: o.tolerance,
                    samples: o.samples,
                    seed,
                    error: None,
                },
                Err(e) => CheckReport {
                    name,
                    passed: false,
                    worst_defect: f64::INFINITY,
                    tolerance: 0.0,
                    samples: 0,
                    seed,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn run_one(i: usize, seed: u64, options: CheckOptions, fx: &Fixture) -> Result<Outcome> {
    // each check draws from its own stream
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    match CHECK_NAMES[i] {
        "gauss_lemma_lp" => gauss_lemma_lp(),
        "projection_reduction" => projection_reduction(&mut rng, fx),
        "kernel_collinearity" => kernel_collinearity(&mut rng, fx),
        "projector_rank" => projector_rank(&mut rng, fx),
        "intertwiner" => intertwiner(&mut rng),
        "box_dim_equivalence" => box_dim_equivalence(&mut rng),
        "conjugation" => conjugation(&mut rng),
        "lp_linearity_p2" => lp_linearity(seed, 2.0),
        "lp_nonlinearity_p4" => lp_linearity(seed, 4.0),
        "lipschitz_image_counts" => lipschitz_counts(fx),
        "product_image_measure" => product_image_measure(),
        "glue_validity" => glue_validity(options, fx),
        "gauss_agreement" => gauss_agreement(fx),
        "counterexample_constants" => counterexample_constants(fx),
        "p2_lower_bound" => p2_lower_bound(fx),
        _ => unreachable!("every name has a check"),
    }
}

fn sample_models(rng: &mut ChaCha8Rng, fx: &Fixture) -> Result<Vec<NormModel>> {
    let a = DMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
    let q = a.transpose() * &a + DMatrix::identity(2, 2) * 0.2;
    Ok(vec![
        NormModel::euclidean(2)?,
        NormModel::lp(1.5, 2)?,
        NormModel::lp(3.0, 2)?,
        NormModel::lp(8.0, 2)?,
        NormModel::inner_product(q)?,
        fx.norm()?.clone(),
    ])
}

fn random_normal(rng: &mut ChaCha8Rng) -> HyperplaneNormal {
    HyperplaneNormal::from_line_angle(rng.gen_range(0.0..PI))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn gauss_lemma_lp() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0, 8.0] {
        let r = NormModel::lp(p, 2)?.check_gauss_properties(2048)?;
        if !r.monotone || !(r.min_inner > 0.0) {
            worst = f64::INFINITY;
        }
        worst = worst.max(r.antipodal_defect);
    }
    outcome(worst, 1e-12, 4 * 2048)
}

fn projection_reduction(rng: &mut ChaCha8Rng, fx: &Fixture) -> Result<Outcome> {
    let models = sample_models(rng, fx)?;
    let mut worst: f64 = 0.0;
    for m in &models {
        for _ in 0..100 {
            let w = random_normal(rng);
            let x = random_point(rng, 2);
            worst = worst.max(dist(
                &project_hyperplane(m, &w, &x)?,
                &project_hyperplane_direct(m, &w, &x)?,
            ));
        }
    }
    outcome(worst, 1e-7, 100 * models.len())
}

fn kernel_collinearity(rng: &mut ChaCha8Rng, fx: &Fixture) -> Result<Outcome> {
    let models = sample_models(rng, fx)?;
    let mut worst: f64 = 0.0;
    for m in &models {
        let w = random_normal(rng);
        let pts: Vec<Vec<f64>> = (0..50).map(|_| random_point(rng, 2)).collect();
        worst = worst.max(kernel_collinearity_defect(|x| project_hyperplane(m, &w, x), &pts)?);
    }
    outcome(worst, 1e-8, 50 * models.len())
}

fn projector_rank(rng: &mut ChaCha8Rng, fx: &Fixture) -> Result<Outcome> {
    let mut models = sample_models(rng, fx)?;
    models.push(NormModel::lp(3.0, 3)?);
    models.push(NormModel::lp(1.5, 4)?);
    let mut worst: f64 = 0.0;
    for m in &models {
        let n = m.dim();
        for _ in 0..20 {
            let v = random_point(rng, n);
            if norm2(&v) < 1e-3 {
                continue;
            }
            let p = norm_projector(m, &HyperplaneNormal::new(&v)?)?;
            if p.rank(1e-10) != n - 1 {
                worst = f64::INFINITY;
            }
            worst = worst.max(p.idempotence_defect());
        }
    }
    outcome(worst, 1e-10, 20 * models.len())
}

/// Orthogonal projection onto the line at a random angle and an oblique
/// projection onto another line along the same kernel.
fn equal_kernel_pair(rng: &mut ChaCha8Rng) -> Result<(LinearProjector, LinearProjector)> {
    let v = random_normal(rng);
    let f = LinearProjector::new(v.clone(), v.w())?;
    // keep the target within one radian of the line so that g stays well
    // conditioned
    let target = HyperplaneNormal::from_line_angle(v.line_angle() + rng.gen_range(-1.0..1.0));
    let g = LinearProjector::new(target, v.w())?;
    Ok((f, g))
}

fn intertwiner(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (f, g) = equal_kernel_pair(rng)?;
        let h = construct_intertwiner(f.matrix(), g.matrix())?;
        for _ in 0..10 {
            let x = random_point(rng, 2);
            worst = worst.max(dist(&h.apply(&f.apply(&x)), &g.apply(&x)));
        }
    }
    // a pair with different kernels must be refused
    let (f, _) = equal_kernel_pair(rng)?;
    let other = LinearProjector::new(f.target().clone(), &[f.target().w()[0] + 0.5, f.target().w()[1]])?;
    if !matches!(
        construct_intertwiner(f.matrix(), other.matrix()),
        Err(Error::KernelMismatch(_))
    ) {
        worst = f64::INFINITY;
    }
    outcome(worst, 1e-12, 100)
}

fn box_dim_equivalence(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let cloud = cantor_product(1.0 / 3.0, 8)?;
    let scales: Vec<f64> = (2..=7).map(|k| 3f64.powi(-k)).collect();
    let slope = |p: &LinearProjector| -> Result<f64> {
        let xs = projected_coordinates(p, &cloud)?;
        match fit_counts(&scales, &counts_1d(&xs, &scales)) {
            Ok(e) => Ok(e.slope),
            Err(Error::LowQualityFit { slope, .. }) => Ok(slope),
            Err(e) => Err(e),
        }
    };
    let mut worst: f64 = 0.0;
    let pairs = 8;
    for _ in 0..pairs {
        let (f, g) = equal_kernel_pair(rng)?;
        worst = worst.max((slope(&f)? - slope(&g)?).abs());
    }
    outcome(worst, 0.05, pairs)
}

fn conjugation(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for n in [2usize, 3] {
        for m in [1usize, n - 1] {
            for _ in 0..50 {
                let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
                let q = a.transpose() * &a + DMatrix::identity(n, n) * 0.2;
                let basis = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
                let x = random_point(rng, n);
                worst = worst.max(dist(
                    &conjugate_projection(&q, &basis, &x)?,
                    &q_norm_projection_direct(&q, &basis, &x)?,
                ));
                samples += 1;
            }
        }
    }
    outcome(worst, 1e-9, samples)
}

/// At `p = 2` the defect itself must be below `1e-9`. At other `p` the
/// report carries `1e-3 / defect`, which is at most 1 exactly when the
/// projection is visibly nonlinear.
fn lp_linearity(seed: u64, p: f64) -> Result<Outcome> {
    let v = vec![1.0 / 3f64.sqrt(); 3];
    let d = linearity_defect(|x| project_line_lp(p, &v, x), 3, 100, seed)?;
    if p == 2.0 {
        outcome(d, 1e-9, 100)
    } else {
        outcome(1e-3 / d, 1.0, 100)
    }
}

/// Box counts of Lipschitz images of the tangent-angle parameterization:
/// `N_beta(delta) <= 2 N_alpha(delta / (2M))`, reported as the worst ratio.
fn lipschitz_counts(fx: &Fixture) -> Result<Outcome> {
    let s: Vec<_> = fx.curve.samples().iter().map(|s| s.point).collect();
    let alpha: Vec<f64> = s.iter().map(|p| p.beta_angle()).collect();
    // both theta and t are increasing with t + theta = alpha - pi/2
    let images: [(Vec<f64>, f64); 2] = [
        (s.iter().map(|p| p.theta).collect(), 1.0),
        (s.iter().map(|p| p.t).collect(), 1.0),
    ];
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for (beta, lip) in &images {
        for k in 2..=9 {
            let (nb, na) = lipschitz_image_counts(&alpha, beta, *lip, 3f64.powi(-k))?;
            worst = worst.max(nb as f64 / (2.0 * na as f64));
            samples += 1;
        }
    }
    outcome(worst, 1.0, samples)
}

/// Increments of `f g` over the level-10 intervals against
/// `g(1/n)` times those of `f`, reported as the worst ratio.
fn product_image_measure() -> Result<Outcome> {
    let k = CantorSet::triadic();
    let factors: [fn(f64) -> f64; 3] = [|t| 1.0 + t, f64::exp, |t| 0.25 / (1.0 - t * t / 8.0)];
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for g in factors {
        for n in [2, 3, 9] {
            let (dh, bound) = product_measure_probe(&k, 10, g, n);
            if !(bound > 0.0) {
                worst = f64::INFINITY;
            }
            worst = worst.max(bound / dh);
            samples += 1;
        }
    }
    outcome(worst, 1.0, samples)
}

fn glue_validity(options: CheckOptions, fx: &Fixture) -> Result<Outcome> {
    let glue = GlueOptions {
        flip_curvature: options.broken_glue,
        ..GlueOptions::default()
    };
    let b = build_norm(&fx.curve, glue)?;
    let r = b.norm.check_gauss_properties(2048)?;
    let mut worst = b.diagnostics.antipodal_defect.max(b.joint_mismatch);
    if !(b.diagnostics.min_curvature_radius > 0.0) || !r.passes(1e-10) {
        worst = f64::INFINITY;
    }
    outcome(worst, 1e-6, b.diagnostics.rows)
}

fn gauss_agreement(fx: &Fixture) -> Result<Outcome> {
    let norm = fx.norm()?;
    let mut worst: f64 = 0.0;
    let mids: Vec<f64> = fx
        .curve
        .samples()
        .iter()
        .filter(|s| s.kind == SampleKind::GapMidpoint)
        .map(|s| s.point.t)
        .collect();
    // gaps of level <= 4 are those of length >= 3^-4
    let k = CantorSet::triadic();
    let wide: Vec<f64> = k.gaps(4).iter().map(|g| 0.5 * (g.left + g.right)).collect();
    for &t in wide.iter().filter(|t| mids.iter().any(|m| (*m - **t).abs() < 1e-15)) {
        let x = norm.sphere_point(&fx.curve.point(t).gamma())?;
        worst = worst.max(dist(&norm.gauss_map(&x)?, &fx.curve.gauss_on_gamma(t)));
    }
    outcome(worst, 1e-5, wide.len())
}

fn counterexample_constants(fx: &Fixture) -> Result<Outcome> {
    let end = fx.curve.end();
    let mut worst = (end.big_f - 0.125).abs().max((end.theta - (2.0f64 / 7.0).atan()).abs());
    let s = end.beta_angle();
    if end.big_f > 0.25 || !(end.theta > 0.0 && end.theta < FRAC_PI_2 - 1.0) || !(s > 1.0 + FRAC_PI_2 && s < PI) {
        worst = f64::INFINITY;
    }
    if !fx.curve.beta_is_injective() {
        worst = f64::INFINITY;
    }
    let fk = fx.curve.f_image_bounds(12)?;
    worst = worst.max((fk.lower - 0.5).abs());
    outcome(worst, 1e-6, fx.curve.samples().len())
}

fn p2_lower_bound(fx: &Fixture) -> Result<Outcome> {
    let b = fx.curve.image_measure_bounds(10)?;
    let worst = if b.lower > 0.0 {
        (b.lower - P2_LOWER_LEVEL10).abs()
    } else {
        f64::INFINITY
    };
    outcome(worst, 1e-12, 1)
}
