//! `normproj` command-line interface.

mod args;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use nalgebra::DMatrix;
use normproj::boxdim::{default_scales, estimate_dim, DimensionEstimate};
use normproj::cantor::{build_norm, CantorSet, CounterexampleCurve, GlueOptions};
use normproj::checks::{run_all_with, CheckOptions};
use normproj::fractals::{self, PointCloud};
use normproj::norms::{HyperplaneNormal, NormModel, SupportTable};
use normproj::projections::{
    angle_family, norm_projector, project_hyperplane, project_hyperplane_direct, ProjectionFamily,
};
use normproj::sweep::{dim_profile, DirectionGrid};
use normproj::vecops::dist;
use normproj::Error;
use serde::Serialize;
use serde_json::json;

use args::{
    BuildArgs, CantorArgs, Cli, Command, CounterexampleCommand, DimArgs, GaussArgs, Method, NormArgs, NormInfoArgs,
    NormKind, ProjectArgs, ScaleArgs, SetArgs, SetKind, SetSpec, SweepArgs, VerifyArgs,
};
use output::{csv_text, emit, json_text, sig};

fn main() -> ExitCode {
    let argv = match args::merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for invalid input, 1 for failures during computation or I/O.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(
            Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::NotStrictlyConvex(_)
            | Error::TooLarge(_)
            | Error::UnderResolved { .. }
            | Error::TooFewScales(_)
            | Error::NotContracting(_)
            | Error::DegenerateSplitting(_),
        ) => 2,
        _ => 1,
    }
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidParameter(msg.into()).into()
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    match cli.command {
        Command::NormInfo(a) => norm_info(&a),
        Command::Gauss(a) => gauss(&a),
        Command::Project(a) => project(&a),
        Command::Counterexample(CounterexampleCommand::Build(a)) => build(&a),
        Command::Set(a) => set(&a),
        Command::Dim(a) => dim(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Verify(a) => verify(&a),
    }
    .map(|ok| if ok { 0 } else { 1 })
}

fn curve_from(c: &CantorArgs) -> Result<CounterexampleCurve> {
    Ok(CounterexampleCurve::new(CantorSet::new(c.m, c.r)?, c.level)?)
}

fn glue_options(c: &CantorArgs) -> GlueOptions {
    GlueOptions {
        rows: c.rows,
        arcs: c.arcs,
        ..GlueOptions::default()
    }
}

fn make_norm(a: &NormArgs) -> Result<NormModel> {
    let norm = match a.norm {
        NormKind::Euclidean => NormModel::euclidean(a.dim)?,
        NormKind::Lp => NormModel::lp(a.p.ok_or_else(|| invalid("--norm lp needs --p"))?, a.dim)?,
        NormKind::InnerProduct => {
            let q = a.q.as_ref().ok_or_else(|| invalid("--norm inner-product needs --q"))?;
            if q.len() != a.dim * a.dim {
                return Err(invalid(format!(
                    "--q needs {} entries for --dim {}",
                    a.dim * a.dim,
                    a.dim
                )));
            }
            NormModel::inner_product(DMatrix::from_row_slice(a.dim, a.dim, q))?
        }
        NormKind::Table => {
            let path = a.table.as_ref().ok_or_else(|| invalid("--norm table needs --table"))?;
            let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            NormModel::support_table(SupportTable::read_csv(file)?)
        }
        NormKind::Counterexample => build_norm(&curve_from(&a.cantor)?, glue_options(&a.cantor))?.norm,
    };
    if norm.dim() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: norm.dim(),
            got: a.dim,
        }
        .into());
    }
    Ok(norm)
}

fn check_len(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        }
        .into());
    }
    Ok(())
}

fn norm_info(a: &NormInfoArgs) -> Result<bool> {
    let norm = make_norm(&a.norm)?;
    let gauss = if norm.dim() == 2 {
        Some(norm.check_gauss_properties(a.grid)?)
    } else {
        None
    };
    let fixed = norm.find_gauss_fixed_points()?;
    let diagnostics = norm.table().ok().map(|t| t.diagnostics());
    let v = json!({
        "kind": norm.kind(),
        "dim": norm.dim(),
        "gauss": gauss,
        "fixed_points": fixed,
        "table": diagnostics,
    });
    emit(a.out.as_deref(), &json_text(&v)?)?;
    Ok(true)
}

fn gauss(a: &GaussArgs) -> Result<bool> {
    let norm = make_norm(&a.norm)?;
    if let Some(x) = &a.x {
        check_len(x, norm.dim())?;
        let p = norm.sphere_point(x)?;
        let g = norm.gauss_map(&p)?;
        let v = json!({ "x": x, "sphere_point": p.coords(), "gauss": g });
        emit(a.out.as_deref(), &json_text(&v)?)?;
        return Ok(true);
    }
    let n = a.grid.unwrap_or(360);
    if norm.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: norm.dim(),
        }
        .into());
    }
    if n < 3 {
        return Err(invalid("--grid needs at least 3 angles"));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = std::f64::consts::TAU * i as f64 / n as f64;
        let p = norm.sphere_point_at_angle(t)?;
        let g = norm.gauss_map(&p)?;
        let c = p.coords();
        rows.push(vec![sig(t), sig(c[0]), sig(c[1]), sig(g[0]), sig(g[1])]);
    }
    emit(
        a.out.as_deref(),
        &csv_text(None, &["angle", "x", "y", "gx", "gy"], rows),
    )?;
    Ok(true)
}

fn project(a: &ProjectArgs) -> Result<bool> {
    let norm = make_norm(&a.norm)?;
    check_len(&a.w, norm.dim())?;
    check_len(&a.x, norm.dim())?;
    let w = HyperplaneNormal::new(&a.w)?;
    let lemma = project_hyperplane(&norm, &w, &a.x)?;
    let direct = project_hyperplane_direct(&norm, &w, &a.x)?;
    let kernel = norm_projector(&norm, &w)?;
    let projection = match a.method {
        Method::Lemma => &lemma,
        Method::Direct => &direct,
    };
    let v = json!({
        "projection": projection,
        "kernel_dir": kernel.kernel_dir(),
        "defect": dist(&lemma, &direct),
    });
    emit(a.out.as_deref(), &json_text(&v)?)?;
    Ok(true)
}

#[derive(Serialize)]
struct Sidecar {
    m: u32,
    r: f64,
    s: f64,
    level: u32,
    #[serde(rename = "F1")]
    f1: f64,
    theta1: f64,
    p2_lower_bound: f64,
    rows: usize,
    joint_mismatch: f64,
    antipodal_defect: f64,
    min_curvature_radius: f64,
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn build(a: &BuildArgs) -> Result<bool> {
    let curve = curve_from(&a.cantor)?;
    let built = build_norm(&curve, glue_options(&a.cantor))?;
    let table = built.norm.table()?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv, Some(output::VERSION_LINE), sig)?;
    emit(Some(&a.out), std::str::from_utf8(&csv)?)?;
    let end = curve.end();
    let p2 = curve.image_measure_bounds(a.cantor.level.min(10))?;
    let meta = Sidecar {
        m: a.cantor.m,
        r: a.cantor.r,
        s: curve.cantor().dimension(),
        level: a.cantor.level,
        f1: end.big_f,
        theta1: end.theta,
        p2_lower_bound: p2.lower,
        rows: table.len(),
        joint_mismatch: built.joint_mismatch,
        antipodal_defect: built.diagnostics.antipodal_defect,
        min_curvature_radius: built.diagnostics.min_curvature_radius,
    };
    emit(Some(&sidecar_path(&a.out)), &json_text(&meta)?)?;
    Ok(true)
}

fn make_cloud(s: &SetSpec) -> Result<PointCloud> {
    let g = s.generation;
    Ok(match s.set {
        SetKind::Cantor => fractals::cantor_line(s.ratio, g)?,
        SetKind::CantorProduct => fractals::cantor_product(s.ratio, g)?,
        SetKind::FourCorner => fractals::four_corner(g)?,
        SetKind::Square => fractals::unit_square(g)?,
        SetKind::Segment => fractals::segment(g)?,
        SetKind::Circle => fractals::circle(s.points)?,
    })
}

fn set(a: &SetArgs) -> Result<bool> {
    let cloud = make_cloud(&a.spec)?;
    let meta = serde_json::to_string(&output::round_json(serde_json::to_value(&cloud)?))?;
    let cols: &[&str] = if cloud.dim == 1 { &["x"] } else { &["x", "y"] };
    if cloud.dim > 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: cloud.dim,
        }
        .into());
    }
    let rows = cloud.points().map(|p| p.iter().map(|&c| sig(c)).collect());
    emit(a.out.as_deref(), &csv_text(Some(&meta), cols, rows))?;
    Ok(true)
}

fn scales_for(cloud: &PointCloud, s: &ScaleArgs) -> Result<Vec<f64>> {
    let mut scales = default_scales(cloud, s.kmin);
    if let Some(kmax) = s.kmax {
        if kmax < s.kmin {
            return Err(invalid("--kmax must not be below --kmin"));
        }
        let finest = (cloud.base as f64).powi(-(kmax as i32));
        if finest < 2.0 * cloud.resolution * (1.0 - 1e-12) {
            return Err(Error::UnderResolved {
                delta: finest,
                resolution: cloud.resolution,
            }
            .into());
        }
        scales.retain(|&d| d >= finest * (1.0 - 1e-12));
    }
    if scales.len() < 4 {
        return Err(Error::TooFewScales(scales.len()).into());
    }
    Ok(scales)
}

fn dim(a: &DimArgs) -> Result<bool> {
    let cloud = make_cloud(&a.spec)?;
    let scales = scales_for(&cloud, &a.scales)?;
    let est: DimensionEstimate = estimate_dim(&cloud, &scales)?;
    if let Some(path) = &a.csv {
        let rows = est
            .scales
            .iter()
            .zip(&est.counts)
            .map(|(d, n)| vec![sig(*d), n.to_string()]);
        emit(Some(path), &csv_text(None, &["delta", "count"], rows))?;
    }
    emit(a.out.as_deref(), &json_text(&est)?)?;
    Ok(true)
}

fn sweep(a: &SweepArgs) -> Result<bool> {
    let cloud = make_cloud(&a.spec)?;
    let scales = scales_for(&cloud, &a.scales)?;
    let grid = DirectionGrid::new(a.directions)?;
    let family = match a.alpha {
        Some(alpha) => angle_family(move |_| alpha)?,
        None => {
            let norm = make_norm(&a.norm)?;
            if norm.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: norm.dim(),
                }
                .into());
            }
            ProjectionFamily::from_norm(norm)
        }
    };
    let cloud_dim = estimate_dim(&cloud, &scales).map(|e| e.slope).or_else(|e| match e {
        Error::LowQualityFit { slope, .. } => Ok(slope),
        e => Err(e),
    })?;
    let profile = dim_profile(&family, &cloud, &grid, &scales, a.threshold)?;
    let opt = |x: Option<f64>| x.map(sig).unwrap_or_default();
    let rows = profile
        .records
        .iter()
        .map(|r| vec![sig(r.angle), opt(r.slope), opt(r.r2), (r.flagged as u8).to_string()]);
    emit(
        a.out.as_deref(),
        &csv_text(None, &["angle", "slope", "r2", "flagged"], rows),
    )?;
    if let Some(path) = &a.summary {
        let failed = profile.records.iter().filter(|r| r.slope.is_none()).count();
        let v = json!({
            "directions": grid.count(),
            "scales": scales,
            "cloud_dim": cloud_dim,
            "mean_slope": profile.mean_slope(),
            "flagged_measure": profile.flagged_measure,
            "flagged": profile.flagged,
            "thresholds": { "flag": profile.threshold, "generic": cloud_dim.min(1.0) },
            "failed_directions": failed,
            "caveat": normproj::boxdim::CAVEAT,
        });
        emit(Some(path), &json_text(&v)?)?;
    }
    Ok(true)
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let reports = run_all_with(
        a.seed,
        CheckOptions {
            broken_glue: a.broken_glue,
        },
    );
    let v = output::round_json(serde_json::to_value(&reports)?);
    let text = format!("{}\n", serde_json::to_string_pretty(&v)?);
    emit(a.out.as_deref(), &text)?;
    for r in &reports {
        let status = if r.passed { "ok" } else { "FAIL" };
        eprintln!(
            "{status:4} {} (worst {}, tol {})",
            r.name,
            sig(r.worst_defect),
            sig(r.tolerance)
        );
    }
    Ok(reports.iter().all(|r| r.passed))
}
